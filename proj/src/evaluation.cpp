#include "hiergcn/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <thread>

#include "hiergcn/format.hpp"
#include "hiergcn/rng.hpp"

namespace hiergcn {

std::vector<int> top_k_items(const std::vector<double>& scores, int k) {
    if (k < 1) throw DataError("k must be >= 1");
    constexpr double ninf = -std::numeric_limits<double>::infinity();
    std::vector<int> ids;
    ids.reserve(scores.size());
    for (int i = 0; i < static_cast<int>(scores.size()); ++i)
        if (scores[i] != ninf) ids.push_back(i);
    auto better = [&](int a, int b) {
        if (scores[a] != scores[b]) return scores[a] > scores[b];
        return a < b;
    };
    if (static_cast<std::size_t>(k) < ids.size()) {
        std::partial_sort(ids.begin(), ids.begin() + k, ids.end(), better);
        ids.resize(k);
    } else {
        std::sort(ids.begin(), ids.end(), better);
    }
    return ids;
}

double recall_at_k(const std::vector<int>& ranked_items, const std::vector<int>& test_sorted,
                   int k, bool truncated) {
    if (k < 1) throw DataError("k must be >= 1");
    if (test_sorted.empty()) return 0.0;
    int cut = std::min<int>(k, static_cast<int>(ranked_items.size()));
    int hits = 0;
    for (int r = 0; r < cut; ++r)
        if (std::binary_search(test_sorted.begin(), test_sorted.end(), ranked_items[r])) ++hits;
    double denom = truncated ? static_cast<double>(std::min<int>(k, test_sorted.size()))
                             : static_cast<double>(test_sorted.size());
    return hits / denom;
}

double ndcg_at_k(const std::vector<int>& ranked_items, const std::vector<int>& test_sorted,
                 int k) {
    if (k < 1) throw DataError("k must be >= 1");
    if (test_sorted.empty()) return 0.0;
    int cut = std::min<int>(k, static_cast<int>(ranked_items.size()));
    double dcg = 0.0;
    for (int r = 1; r <= cut; ++r)
        if (std::binary_search(test_sorted.begin(), test_sorted.end(), ranked_items[r - 1]))
            dcg += 1.0 / std::log2(static_cast<double>(r) + 1.0);
    int ideal = std::min<int>(k, static_cast<int>(test_sorted.size()));
    double idcg = 0.0;
    for (int r = 1; r <= ideal; ++r) idcg += 1.0 / std::log2(static_cast<double>(r) + 1.0);
    return dcg / idcg;
}

namespace {

// Shared ranking loop; deterministic regardless of thread count because each
// user's metrics land in its own slot and the reduction runs in user order.
std::vector<RankingMetrics> metrics_from_rep(const NodeRepresentation& rep,
                                             const InteractionSet& set,
                                             const std::vector<int>& k_list,
                                             const EvalOptions& opts) {
    for (int k : k_list)
        if (k < 1) throw DataError("k must be >= 1");
    std::vector<int> users;
    for (int u = 0; u < set.num_users; ++u)
        if (!set.user_test_index[u].empty()) users.push_back(u);

    std::size_t nk = k_list.size();
    std::vector<double> rec(users.size() * nk), ndc(users.size() * nk);
    int kmax = k_list.empty() ? 1 : *std::max_element(k_list.begin(), k_list.end());

    auto work = [&](std::size_t lo, std::size_t hi) {
        for (std::size_t idx = lo; idx < hi; ++idx) {
            int u = users[idx];
            auto scores = score_all_items(rep, u, set.user_train_index[u]);
            auto ranked = top_k_items(scores, kmax);
            const auto& test = set.user_test_index[u];
            for (std::size_t j = 0; j < nk; ++j) {
                rec[idx * nk + j] = recall_at_k(ranked, test, k_list[j], opts.truncated_recall);
                ndc[idx * nk + j] = ndcg_at_k(ranked, test, k_list[j]);
            }
        }
    };

    int threads = std::max(1, opts.threads);
    if (threads == 1 || users.size() < 2) {
        work(0, users.size());
    } else {
        threads = std::min<int>(threads, static_cast<int>(users.size()));
        std::vector<std::thread> pool;
        std::size_t chunk = (users.size() + threads - 1) / threads;
        for (int t = 0; t < threads; ++t) {
            std::size_t lo = t * chunk;
            std::size_t hi = std::min(users.size(), lo + chunk);
            if (lo < hi) pool.emplace_back(work, lo, hi);
        }
        for (auto& th : pool) th.join();
    }

    std::vector<RankingMetrics> out;
    out.reserve(nk);
    for (std::size_t j = 0; j < nk; ++j) {
        RankingMetrics m;
        m.k = k_list[j];
        m.n_users_evaluated = static_cast<int>(users.size());
        if (!users.empty()) {
            double rs = 0.0, ns = 0.0;
            for (std::size_t idx = 0; idx < users.size(); ++idx) {
                rs += rec[idx * nk + j];
                ns += ndc[idx * nk + j];
            }
            m.recall = rs / static_cast<double>(users.size());
            m.ndcg = ns / static_cast<double>(users.size());
        }
        out.push_back(m);
    }
    return out;
}

NodeRepresentation eval_forward(const ModelParams& params, const NormalizedAdjacency& adj,
                                const EvalOptions& opts) {
    if (opts.eval_with_mask && opts.keep_prob < 1.0) {
        Rng rng(opts.mask_seed);
        std::vector<EdgeMask> masks;
        masks.reserve(params.layers);
        for (int k = 0; k < params.layers; ++k)
            masks.push_back(sample_mask(adj, opts.keep_prob, rng));
        return forward(params, adj, &masks).rep;
    }
    return forward(params, adj, nullptr).rep;
}

}  // namespace

std::vector<RankingMetrics> evaluate(const ModelParams& params, const NormalizedAdjacency& adj,
                                     const InteractionSet& set, const std::vector<int>& k_list,
                                     const EvalOptions& opts) {
    NodeRepresentation rep = eval_forward(params, adj, opts);
    return metrics_from_rep(rep, set, k_list, opts);
}

std::vector<RankingMetrics> evaluate_under_attack(const ModelParams& params,
                                                  const NormalizedAdjacency& adj,
                                                  const InteractionSet& set,
                                                  const AttackConfig& attack,
                                                  const std::vector<int>& k_list,
                                                  const EvalOptions& opts) {
    NodeRepresentation rep;
    if (attack.kind == AttackConfig::Kind::gaussian_embedding) {
        if (attack.sigma < 0.0) throw DataError("attack sigma must be >= 0");
        rep = forward(params, adj, nullptr).rep;
        if (attack.sigma > 0.0) {
            Rng rng(attack.seed);
            int n = rep.out.rows();
            int d = rep.dim;
            for (int k = 0; k <= rep.layers; ++k)
                for (int r = 0; r < n; ++r)
                    for (int c = 0; c < d; ++c)
                        rep.out(r, k * d + c) += attack.sigma * rng.gaussian();
        }
    } else {
        if (attack.keep_prob == 1.0) {
            rep = forward(params, adj, nullptr).rep;
        } else {
            Rng rng(attack.seed);
            EdgeMask shared = sample_mask(adj, attack.keep_prob, rng);
            std::vector<EdgeMask> masks(params.layers, shared);
            rep = forward(params, adj, &masks).rep;
        }
    }
    return metrics_from_rep(rep, set, k_list, opts);
}

void write_metrics_csv(const std::string& path, const std::vector<RankingMetrics>& metrics) {
    auto f = open_out(path);
    f << "k,recall,ndcg,n_users\n";
    for (const auto& m : metrics)
        f << m.k << ',' << fmt_double(m.recall) << ',' << fmt_double(m.ndcg) << ','
          << m.n_users_evaluated << '\n';
    if (!f) throw DataError("write failed: " + path);
}

void write_attack_csv(const std::string& path, const std::vector<AttackRow>& rows) {
    auto f = open_out(path);
    f << "kind,param,k,recall,ndcg,degradation_pct\n";
    for (const auto& r : rows)
        f << r.kind << ',' << fmt_double(r.param) << ',' << r.k << ',' << fmt_double(r.recall)
          << ',' << fmt_double(r.ndcg) << ',' << fmt_double(r.degradation_pct) << '\n';
    if (!f) throw DataError("write failed: " + path);
}

}  // namespace hiergcn
