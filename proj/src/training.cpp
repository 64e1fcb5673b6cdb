#include "hiergcn/training.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "hiergcn/evaluation.hpp"
#include "hiergcn/format.hpp"

namespace hiergcn {

double sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    double e = std::exp(x);
    return e / (1.0 + e);
}

double softplus(double x) {
    if (x > 0.0) return x + std::log1p(std::exp(-x));
    return std::log1p(std::exp(x));
}

namespace {

double theta_sq_norm(const ModelParams& params) {
    double s = params.embeddings.squaredNorm();
    for (const auto& w : params.transforms) s += w.squaredNorm();
    return s;
}

void validate(const TrainConfig& cfg) {
    if (cfg.reg_lambda < 0.0) throw DataError("reg_lambda must be >= 0");
    if (!(cfg.keep_prob > 0.0 && cfg.keep_prob <= 1.0))
        throw DataError("keep_prob must be in (0, 1], got " + fmt_double(cfg.keep_prob));
    if (cfg.batch_size < 1) throw DataError("batch_size must be >= 1");
    if (cfg.epochs < 0) throw DataError("epochs must be >= 0");
    if (cfg.patience > 0 && cfg.eval_every <= 0)
        throw DataError("patience requires eval_every > 0");
}

}  // namespace

double bpr_loss(double r_ui, double r_uj, const ModelParams& params, double lambda) {
    return softplus(-(r_ui - r_uj)) + lambda * theta_sq_norm(params);
}

EpochStats train_epoch(ModelParams& params, const NormalizedAdjacency& adj,
                       const InteractionSet& set, const TrainConfig& cfg, Rng& rng) {
    validate(cfg);
    if (set.train_pairs.empty()) throw DataError("no training pairs");
    auto t0 = std::chrono::steady_clock::now();

    int K = params.layers;
    int d = params.dim;
    int n = adj.n_nodes();
    bool drop = cfg.keep_prob < 1.0;

    std::vector<EdgeMask> masks;
    auto refresh_masks = [&] {
        masks.clear();
        masks.reserve(K);
        for (int k = 0; k < K; ++k)
            masks.push_back(sample_mask(adj, cfg.keep_prob, rng, cfg.mask_options));
    };
    if (drop && cfg.mask_refresh == MaskRefresh::epoch) refresh_masks();

    index_t total = static_cast<index_t>(set.train_pairs.size());
    index_t done = 0;
    double loss_sum = 0.0;
    std::vector<Triplet> batch;
    std::vector<index_t> touched;

    while (done < total) {
        auto b = static_cast<index_t>(
            std::min<index_t>(cfg.batch_size, total - done));
        batch.clear();
        for (index_t t = 0; t < b; ++t) batch.push_back(sample_triplet(set, rng));
        if (drop && cfg.mask_refresh == MaskRefresh::step) refresh_masks();

        ForwardResult fr = forward(params, adj, drop ? &masks : nullptr);
        const Mat& O = fr.rep.out;

        Mat G = Mat::Zero(n, (K + 1) * d);
        double batch_bpr = 0.0;
        for (const auto& t : batch) {
            int ri = set.num_users + t.pos_item;
            int rj = set.num_users + t.neg_item;
            double x = O.row(t.user).dot(O.row(ri)) - O.row(t.user).dot(O.row(rj));
            batch_bpr += softplus(-x);
            double c = (sigmoid(x) - 1.0) / static_cast<double>(b);
            G.row(t.user) += c * (O.row(ri) - O.row(rj));
            G.row(ri) += c * O.row(t.user);
            G.row(rj) -= c * O.row(t.user);
        }
        batch_bpr /= static_cast<double>(b);

        Gradients grads = backward(fr.trace, params, G);

        double reg = 0.0;
        if (cfg.reg_lambda > 0.0) {
            if (cfg.reg_scope == RegScope::full) {
                reg = cfg.reg_lambda * theta_sq_norm(params);
                grads.d_embeddings += 2.0 * cfg.reg_lambda * params.embeddings;
            } else {
                touched.clear();
                for (const auto& t : batch) {
                    touched.push_back(t.user);
                    touched.push_back(set.num_users + t.pos_item);
                    touched.push_back(set.num_users + t.neg_item);
                }
                std::sort(touched.begin(), touched.end());
                touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
                double rows_sq = 0.0;
                for (index_t r : touched) {
                    rows_sq += params.embeddings.row(r).squaredNorm();
                    grads.d_embeddings.row(r) += 2.0 * cfg.reg_lambda * params.embeddings.row(r);
                }
                double w_sq = 0.0;
                for (const auto& w : params.transforms) w_sq += w.squaredNorm();
                reg = cfg.reg_lambda * (rows_sq + w_sq);
            }
            for (int k = 0; k < K; ++k)
                grads.d_transforms[k] += 2.0 * cfg.reg_lambda * params.transforms[k];
        }

        double batch_loss = batch_bpr + reg;
        if (!std::isfinite(batch_loss))
            throw NumericalError("training loss became non-finite (try a smaller learning rate)");
        loss_sum += batch_loss * static_cast<double>(b);

        params.embeddings -= cfg.learning_rate * grads.d_embeddings;
        for (int k = 0; k < K; ++k)
            params.transforms[k] -= cfg.learning_rate * grads.d_transforms[k];
        done += b;
    }

    EpochStats stats;
    stats.loss = loss_sum / static_cast<double>(total);
    stats.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return stats;
}

TrainReport train(ModelParams& params, const NormalizedAdjacency& adj,
                  const InteractionSet& set, const TrainConfig& cfg) {
    validate(cfg);
    TrainReport report;
    Rng rng(cfg.seed);
    bool has_test = !set.test_pairs.empty();
    double best_ndcg = -1.0;
    int stale = 0;

    for (int e = 1; e <= cfg.epochs; ++e) {
        EpochStats stats = train_epoch(params, adj, set, cfg, rng);
        stats.epoch = e;
        bool evaluated = false;
        if (cfg.eval_every > 0 && e % cfg.eval_every == 0 && has_test) {
            auto m = evaluate(params, adj, set, {10});
            stats.recall10 = m[0].recall;
            stats.ndcg10 = m[0].ndcg;
            evaluated = true;
        }
        report.epochs.push_back(stats);
        if (cfg.checkpoint_every > 0 && !cfg.checkpoint_path.empty() &&
            e % cfg.checkpoint_every == 0)
            save_checkpoint(cfg.checkpoint_path + "_epoch_" + std::to_string(e), params);
        if (evaluated && cfg.patience > 0) {
            if (stats.ndcg10 > best_ndcg) {
                best_ndcg = stats.ndcg10;
                stale = 0;
            } else if (++stale >= cfg.patience) {
                break;
            }
        }
    }
    if (!cfg.checkpoint_path.empty()) save_checkpoint(cfg.checkpoint_path, params);
    return report;
}

void write_train_report_csv(const std::string& path, const TrainReport& report) {
    auto f = open_out(path);
    f << "epoch,loss,recall10,ndcg10,seconds\n";
    for (const auto& s : report.epochs) {
        f << s.epoch << ',' << fmt_double(s.loss) << ',';
        if (s.recall10 >= 0.0) f << fmt_double(s.recall10);
        f << ',';
        if (s.ndcg10 >= 0.0) f << fmt_double(s.ndcg10);
        f << ',' << fmt_double(s.seconds) << '\n';
    }
    if (!f) throw DataError("write failed: " + path);
}

}  // namespace hiergcn
