#include "hiergcn/cli.hpp"

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "hiergcn/evaluation.hpp"
#include "hiergcn/format.hpp"
#include "hiergcn/graph.hpp"
#include "hiergcn/interactions.hpp"
#include "hiergcn/model.hpp"
#include "hiergcn/spectral.hpp"
#include "hiergcn/training.hpp"

namespace hiergcn {

namespace {

using ParamMap = std::map<std::string, std::string>;

// manifest.txt: sorted `key=value`, one line per effective parameter. Keys
// match the long flag names, booleans are true/false, so a run can be
// replayed by turning each `k=v` back into `--k v`.
void write_manifest(const std::string& out_dir, const ParamMap& params) {
    auto f = open_out(out_dir + "/manifest.txt");
    for (const auto& [k, v] : params) f << k << '=' << v << '\n';
    if (!f) throw DataError("write failed: " + out_dir + "/manifest.txt");
}

std::vector<double> parse_double_list(const std::string& s) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos <= s.size()) {
        std::size_t comma = s.find(',', pos);
        std::string tok = s.substr(pos, comma == std::string::npos ? comma : comma - pos);
        char* end = nullptr;
        double v = std::strtod(tok.c_str(), &end);
        if (tok.empty() || end != tok.c_str() + tok.size())
            throw DataError("bad list element '" + tok + "'");
        out.push_back(v);
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    if (out.empty()) throw DataError("empty list");
    return out;
}

std::vector<int> parse_int_list(const std::string& s) {
    std::vector<int> out;
    for (double v : parse_double_list(s)) {
        int i = static_cast<int>(v);
        if (static_cast<double>(i) != v) throw DataError("expected integer list, got " + s);
        out.push_back(i);
    }
    return out;
}

const CLI::Validator kProbability(
    [](std::string& s) {
        char* end = nullptr;
        double v = std::strtod(s.c_str(), &end);
        if (s.empty() || end != s.c_str() + s.size() || !(v > 0.0 && v <= 1.0))
            return std::string("value must be in (0, 1]");
        return std::string();
    },
    "PROB");

const CLI::Validator kOpenRatio(
    [](std::string& s) {
        char* end = nullptr;
        double v = std::strtod(s.c_str(), &end);
        if (s.empty() || end != s.c_str() + s.size() || !(v > 0.0 && v < 1.0))
            return std::string("value must be in (0, 1)");
        return std::string();
    },
    "RATIO");

const CLI::Validator kDoubleList(
    [](std::string& s) {
        try {
            parse_double_list(s);
        } catch (const DataError& e) {
            return std::string(e.what());
        }
        return std::string();
    },
    "LIST");

const CLI::Validator kIntList(
    [](std::string& s) {
        try {
            parse_int_list(s);
        } catch (const DataError& e) {
            return std::string(e.what());
        }
        return std::string();
    },
    "ILIST");

void ensure_out_dir(const std::string& out) {
    std::error_code ec;
    std::filesystem::create_directories(out, ec);
    if (ec) throw DataError("cannot create output directory " + out + ": " + ec.message());
}

void check_dims(const ModelParams& params, const InteractionSet& set) {
    if (params.num_users != set.num_users || params.num_items != set.num_items)
        throw DataError("checkpoint covers " + std::to_string(params.num_users) + " users / " +
                        std::to_string(params.num_items) + " items but the data has " +
                        std::to_string(set.num_users) + " / " + std::to_string(set.num_items));
}

// ---- split ----------------------------------------------------------------

struct SplitArgs {
    std::string input, out;
    double ratio = 0.8;
    std::uint64_t seed = 42;
    bool global = false;
    double min_weight = 0.0;
};

int cmd_split(const SplitArgs& a) {
    ensure_out_dir(a.out);
    auto records = ingest_file(a.input, {a.min_weight});
    SplitConfig cfg;
    cfg.split_ratio = a.ratio;
    cfg.seed = a.seed;
    cfg.per_user = !a.global;
    auto set = build_split(records, cfg);
    write_pairs_tsv(a.out + "/train.tsv", set.train_pairs);
    write_pairs_tsv(a.out + "/test.tsv", set.test_pairs);
    write_idmap_tsv(a.out + "/idmap.tsv", set);
    write_manifest(a.out, {{"command", "split"},
                           {"input", a.input},
                           {"out", a.out},
                           {"ratio", fmt_double(a.ratio)},
                           {"seed", std::to_string(a.seed)},
                           {"global", a.global ? "true" : "false"},
                           {"min-weight", fmt_double(a.min_weight)}});
    std::cout << "split: " << set.num_users << " users, " << set.num_items << " items, "
              << set.train_pairs.size() << " train pairs, " << set.test_pairs.size()
              << " test pairs -> " << a.out << '\n';
    return 0;
}

// ---- train ----------------------------------------------------------------

struct TrainArgs {
    std::string train, test, out;
    int d = 64, K = 3, epochs = 50, batch = 1024;
    double p = 0.9, lr = 0.05, lambda = 1e-3, min_weight = 0.0;
    std::uint64_t seed = 42;
    std::string mask_refresh = "step", reg_scope = "batch";
    bool no_drop = false, preserve_self_loops = false, symmetric_mask = false;
    int eval_every = 0, patience = 0, checkpoint_every = 0;
};

TrainConfig to_train_config(const TrainArgs& a) {
    TrainConfig cfg;
    cfg.learning_rate = a.lr;
    cfg.reg_lambda = a.lambda;
    cfg.keep_prob = a.no_drop ? 1.0 : a.p;
    cfg.layers = a.K;
    cfg.dim = a.d;
    cfg.epochs = a.epochs;
    cfg.batch_size = a.batch;
    cfg.seed = Rng::mix(a.seed, 1);
    cfg.mask_refresh = a.mask_refresh == "epoch" ? MaskRefresh::epoch : MaskRefresh::step;
    cfg.reg_scope = a.reg_scope == "full" ? RegScope::full : RegScope::batch;
    cfg.mask_options.preserve_self_loops = a.preserve_self_loops;
    cfg.mask_options.symmetric_mask = a.symmetric_mask;
    cfg.eval_every = a.eval_every;
    cfg.patience = a.patience;
    return cfg;
}

ParamMap train_manifest(const TrainArgs& a, const char* command) {
    return {{"command", command},
            {"train", a.train},
            {"test", a.test},
            {"out", a.out},
            {"d", std::to_string(a.d)},
            {"K", std::to_string(a.K)},
            {"p", fmt_double(a.no_drop ? 1.0 : a.p)},
            {"lr", fmt_double(a.lr)},
            {"lambda", fmt_double(a.lambda)},
            {"epochs", std::to_string(a.epochs)},
            {"batch", std::to_string(a.batch)},
            {"seed", std::to_string(a.seed)},
            {"mask-refresh", a.mask_refresh},
            {"reg-scope", a.reg_scope},
            {"preserve-self-loops", a.preserve_self_loops ? "true" : "false"},
            {"symmetric-mask", a.symmetric_mask ? "true" : "false"},
            {"eval-every", std::to_string(a.eval_every)},
            {"patience", std::to_string(a.patience)},
            {"checkpoint-every", std::to_string(a.checkpoint_every)},
            {"min-weight", fmt_double(a.min_weight)}};
}

int cmd_train(const TrainArgs& a) {
    ensure_out_dir(a.out);
    auto set = load_split(a.train, a.test, {a.min_weight});
    auto adj = build_adjacency(set);
    auto params = init_params(set.num_users, set.num_items, a.d, a.K, Rng::mix(a.seed, 0));
    TrainConfig cfg = to_train_config(a);
    cfg.checkpoint_path = a.out + "/checkpoint.txt";
    cfg.checkpoint_every = a.checkpoint_every;
    TrainReport report = train(params, adj, set, cfg);
    write_train_report_csv(a.out + "/train_report.csv", report);
    write_manifest(a.out, train_manifest(a, "train"));
    for (const auto& s : report.epochs) {
        std::cout << "epoch " << s.epoch << '/' << a.epochs << "  loss " << fmt_double(s.loss);
        if (s.ndcg10 >= 0.0)
            std::cout << "  recall@10 " << fmt_double(s.recall10) << "  ndcg@10 "
                      << fmt_double(s.ndcg10);
        std::cout << '\n';
    }
    std::cout << "checkpoint -> " << cfg.checkpoint_path << '\n';
    return 0;
}

// ---- eval -----------------------------------------------------------------

struct EvalArgs {
    std::string checkpoint, train, test, out;
    std::string k_list = "10";
    int threads = 1;
    bool truncated_recall = false, with_mask = false;
    double p = 0.9;
    std::uint64_t mask_seed = 0;
    double min_weight = 0.0;
};

int cmd_eval(const EvalArgs& a) {
    ensure_out_dir(a.out);
    auto params = load_checkpoint(a.checkpoint);
    auto set = load_split(a.train, a.test, {a.min_weight});
    check_dims(params, set);
    auto adj = build_adjacency(set);
    EvalOptions opts;
    opts.threads = a.threads;
    opts.truncated_recall = a.truncated_recall;
    opts.eval_with_mask = a.with_mask;
    opts.keep_prob = a.p;
    opts.mask_seed = a.mask_seed;
    auto metrics = evaluate(params, adj, set, parse_int_list(a.k_list), opts);
    write_metrics_csv(a.out + "/metrics.csv", metrics);
    write_manifest(a.out, {{"command", "eval"},
                           {"checkpoint", a.checkpoint},
                           {"train", a.train},
                           {"test", a.test},
                           {"out", a.out},
                           {"k", a.k_list},
                           {"threads", std::to_string(a.threads)},
                           {"truncated-recall", a.truncated_recall ? "true" : "false"},
                           {"with-mask", a.with_mask ? "true" : "false"},
                           {"p", fmt_double(a.p)},
                           {"mask-seed", std::to_string(a.mask_seed)},
                           {"min-weight", fmt_double(a.min_weight)}});
    for (const auto& m : metrics)
        std::cout << "k=" << m.k << "  recall " << fmt_double(m.recall) << "  ndcg "
                  << fmt_double(m.ndcg) << "  (" << m.n_users_evaluated << " users)\n";
    return 0;
}

// ---- sweep ----------------------------------------------------------------

struct SweepArgs {
    TrainArgs base;  // train/test/out + hyperparameters shared with `train`
    std::string K_list = "1,2,3", p_list = "0.8,0.9,1";
    int k = 10, threads = 1;
};

int cmd_sweep(const SweepArgs& a) {
    ensure_out_dir(a.base.out);
    auto set = load_split(a.base.train, a.base.test, {a.base.min_weight});
    auto adj = build_adjacency(set);
    auto Ks = parse_int_list(a.K_list);
    auto ps = parse_double_list(a.p_list);

    auto f = open_out(a.base.out + "/sweep.csv");
    f << "K,p,seed,k,recall,ndcg\n";
    ParamMap manifest = train_manifest(a.base, "sweep");
    manifest.erase("p");
    manifest.erase("K");
    manifest.erase("eval-every");
    manifest.erase("patience");
    manifest.erase("checkpoint-every");
    manifest["K-list"] = a.K_list;
    manifest["p-list"] = a.p_list;
    manifest["k"] = std::to_string(a.k);
    manifest["threads"] = std::to_string(a.threads);

    int run = 0;
    for (int K : Ks) {
        for (double p : ps) {
            TrainArgs cell = a.base;
            cell.K = K;
            cell.p = p;
            TrainConfig cfg = to_train_config(cell);
            auto params =
                init_params(set.num_users, set.num_items, cell.d, K, Rng::mix(cell.seed, 0));
            train(params, adj, set, cfg);
            EvalOptions opts;
            opts.threads = a.threads;
            auto m = evaluate(params, adj, set, {a.k}, opts)[0];
            f << K << ',' << fmt_double(p) << ',' << a.base.seed << ',' << a.k << ','
              << fmt_double(m.recall) << ',' << fmt_double(m.ndcg) << '\n';
            manifest["run." + std::to_string(run++)] =
                "K:" + std::to_string(K) + ",p:" + fmt_double(p) + ",seed:" +
                std::to_string(a.base.seed);
            std::cout << "K=" << K << " p=" << fmt_double(p) << "  recall@" << a.k << ' '
                      << fmt_double(m.recall) << "  ndcg@" << a.k << ' ' << fmt_double(m.ndcg)
                      << '\n';
        }
    }
    if (!f) throw DataError("write failed: " + a.base.out + "/sweep.csv");
    f.close();
    write_manifest(a.base.out, manifest);
    return 0;
}

// ---- attack ---------------------------------------------------------------

struct AttackArgs {
    std::string checkpoint, train, test, out;
    std::string sigma_list = "0,0.1,1", keep_list = "1,0.9,0.5";
    int k = 10, trials = 1, threads = 1;
    std::uint64_t seed = 42;
    double min_weight = 0.0;
};

int cmd_attack(const AttackArgs& a) {
    ensure_out_dir(a.out);
    auto params = load_checkpoint(a.checkpoint);
    auto set = load_split(a.train, a.test, {a.min_weight});
    check_dims(params, set);
    auto adj = build_adjacency(set);
    EvalOptions opts;
    opts.threads = a.threads;

    auto clean = evaluate(params, adj, set, {a.k}, opts)[0];
    auto degradation = [&](double ndcg) {
        return clean.ndcg > 0.0 ? 100.0 * (clean.ndcg - ndcg) / clean.ndcg : 0.0;
    };

    std::vector<AttackRow> rows;
    auto run_grid = [&](AttackConfig::Kind kind, const std::vector<double>& grid,
                        std::uint64_t stream_base, const char* name) {
        for (std::size_t g = 0; g < grid.size(); ++g) {
            double recall = 0.0, ndcg = 0.0;
            for (int t = 0; t < a.trials; ++t) {
                AttackConfig atk;
                atk.kind = kind;
                if (kind == AttackConfig::Kind::gaussian_embedding)
                    atk.sigma = grid[g];
                else
                    atk.keep_prob = grid[g];
                atk.seed = Rng::mix(a.seed, stream_base + (g << 16) + static_cast<std::uint64_t>(t));
                auto m = evaluate_under_attack(params, adj, set, atk, {a.k}, opts)[0];
                recall += m.recall;
                ndcg += m.ndcg;
            }
            recall /= a.trials;
            ndcg /= a.trials;
            rows.push_back({name, grid[g], a.k, recall, ndcg, degradation(ndcg)});
        }
    };
    run_grid(AttackConfig::Kind::gaussian_embedding, parse_double_list(a.sigma_list),
             std::uint64_t{1} << 32, "gaussian_embedding");
    for (double kp : parse_double_list(a.keep_list))
        if (!(kp > 0.0 && kp <= 1.0))
            throw DataError("keep probability must be in (0, 1], got " + fmt_double(kp));
    run_grid(AttackConfig::Kind::edge_sparsify, parse_double_list(a.keep_list),
             std::uint64_t{2} << 32, "edge_sparsify");

    write_attack_csv(a.out + "/attack.csv", rows);
    write_manifest(a.out, {{"command", "attack"},
                           {"checkpoint", a.checkpoint},
                           {"train", a.train},
                           {"test", a.test},
                           {"out", a.out},
                           {"sigma-list", a.sigma_list},
                           {"keep-list", a.keep_list},
                           {"k", std::to_string(a.k)},
                           {"trials", std::to_string(a.trials)},
                           {"seed", std::to_string(a.seed)},
                           {"threads", std::to_string(a.threads)},
                           {"min-weight", fmt_double(a.min_weight)}});
    for (const auto& r : rows)
        std::cout << r.kind << " param=" << fmt_double(r.param) << "  ndcg@" << r.k << ' '
                  << fmt_double(r.ndcg) << "  degradation " << fmt_double(r.degradation_pct)
                  << "%\n";
    return 0;
}

// ---- analyze --------------------------------------------------------------

struct AnalyzeArgs {
    std::string train, out;
    std::string p_list = "1,0.9,0.7,0.5";
    int k_max = 20, trials = 10, threads = 1, rayleigh_samples = 1000;
    int max_dense_nodes = 4096, probe_cols = 32;
    std::uint64_t seed = 42;
    bool dump_adjacency = false;
    double min_weight = 0.0;
};

int cmd_analyze(const AnalyzeArgs& a) {
    ensure_out_dir(a.out);
    auto set = load_split(a.train, "", {a.min_weight});
    auto adj = build_adjacency(set);

    auto summary = spectral_summary(adj, a.rayleigh_samples, Rng::mix(a.seed, 0));
    write_spectral_csv(a.out + "/spectral.csv", summary);

    CurveOptions opts;
    opts.k_max = a.k_max;
    opts.n_trials = a.trials;
    opts.max_dense_nodes = a.max_dense_nodes;
    opts.probe_cols = a.probe_cols;
    opts.threads = a.threads;
    std::vector<ConvergenceCurve> curves;
    auto ps = parse_double_list(a.p_list);
    for (std::size_t i = 0; i < ps.size(); ++i)
        curves.push_back(convergence_curve(adj, ps[i], opts, Rng::mix(a.seed, 100 + i)));
    write_convergence_csv(a.out + "/convergence.csv", curves);
    if (a.dump_adjacency) write_adjacency_tsv(a.out + "/adjacency.tsv", adj);

    write_manifest(a.out, {{"command", "analyze"},
                           {"train", a.train},
                           {"out", a.out},
                           {"p-list", a.p_list},
                           {"k-max", std::to_string(a.k_max)},
                           {"trials", std::to_string(a.trials)},
                           {"threads", std::to_string(a.threads)},
                           {"rayleigh-samples", std::to_string(a.rayleigh_samples)},
                           {"max-dense-nodes", std::to_string(a.max_dense_nodes)},
                           {"probe-cols", std::to_string(a.probe_cols)},
                           {"seed", std::to_string(a.seed)},
                           {"dump-adjacency", a.dump_adjacency ? "true" : "false"},
                           {"min-weight", fmt_double(a.min_weight)}});
    std::cout << "lambda_max " << fmt_double(summary.lambda_max) << "  components "
              << summary.n_components << "  rayleigh [" << fmt_double(summary.rayleigh_min)
              << ", " << fmt_double(summary.rayleigh_max) << "]\n";
    for (const auto& c : curves)
        std::cout << "p=" << fmt_double(c.keep_prob) << "  ratio@k=" << a.k_max << ' '
                  << fmt_double(c.points.back().ratio_mean) << "  (" << c.n_trials
                  << " trials)\n";
    return 0;
}

void add_train_flags(CLI::App* cmd, TrainArgs& a) {
    cmd->add_option("--d", a.d, "embedding size")->check(CLI::PositiveNumber);
    cmd->add_option("--K", a.K, "propagation depth")->check(CLI::NonNegativeNumber);
    cmd->add_option("--p", a.p, "edge keep probability")->check(kProbability);
    cmd->add_option("--lr", a.lr, "SGD learning rate")->check(CLI::PositiveNumber);
    cmd->add_option("--lambda", a.lambda, "L2 strength")->check(CLI::NonNegativeNumber);
    cmd->add_option("--epochs", a.epochs)->check(CLI::NonNegativeNumber);
    cmd->add_option("--batch", a.batch, "triplets per SGD step")->check(CLI::PositiveNumber);
    cmd->add_option("--seed", a.seed, "master seed");
    cmd->add_option("--mask-refresh", a.mask_refresh, "resample masks per step or per epoch")
        ->check(CLI::IsMember({"step", "epoch"}));
    cmd->add_option("--reg-scope", a.reg_scope, "L2 over batch rows or all parameters")
        ->check(CLI::IsMember({"batch", "full"}));
    cmd->add_flag("--preserve-self-loops", a.preserve_self_loops,
                  "exempt self-connections from dropout");
    cmd->add_flag("--symmetric-mask", a.symmetric_mask, "drop (a,b) and (b,a) together");
    cmd->add_option("--min-weight", a.min_weight, "keep records with weight > this");
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"hierarchical graph-convolution recommender"};
    app.require_subcommand(1);

    SplitArgs sp;
    auto* split_cmd = app.add_subcommand("split", "partition an interaction file");
    split_cmd->add_option("--input", sp.input, "interaction file")->required();
    split_cmd->add_option("--out", sp.out, "output directory")->required();
    split_cmd->add_option("--ratio", sp.ratio, "train fraction")->check(kOpenRatio);
    split_cmd->add_option("--seed", sp.seed);
    split_cmd->add_flag("--global", sp.global, "shuffle pairs globally instead of per user");
    split_cmd->add_option("--min-weight", sp.min_weight, "keep records with weight > this");

    TrainArgs tr;
    auto* train_cmd = app.add_subcommand("train", "fit a model");
    train_cmd->add_option("--train", tr.train, "train pairs file")->required();
    train_cmd->add_option("--test", tr.test, "held-out pairs (id space + periodic metrics)");
    train_cmd->add_option("--out", tr.out, "output directory")->required();
    add_train_flags(train_cmd, tr);
    train_cmd->add_flag("--no-drop", tr.no_drop, "disable edge dropout (same as --p 1)");
    train_cmd->add_option("--eval-every", tr.eval_every, "holdout metrics every n epochs")
        ->check(CLI::NonNegativeNumber);
    train_cmd->add_option("--patience", tr.patience, "early stop after n flat evaluations")
        ->check(CLI::NonNegativeNumber);
    train_cmd->add_option("--checkpoint-every", tr.checkpoint_every)
        ->check(CLI::NonNegativeNumber);

    EvalArgs ev;
    auto* eval_cmd = app.add_subcommand("eval", "rank and score a checkpoint");
    eval_cmd->add_option("--checkpoint", ev.checkpoint)->required();
    eval_cmd->add_option("--train", ev.train, "train pairs (excluded from ranking)")->required();
    eval_cmd->add_option("--test", ev.test, "held-out pairs")->required();
    eval_cmd->add_option("--out", ev.out)->required();
    eval_cmd->add_option("--k", ev.k_list, "cutoffs, comma separated")->check(kIntList);
    eval_cmd->add_option("--threads", ev.threads)->check(CLI::PositiveNumber);
    eval_cmd->add_flag("--truncated-recall", ev.truncated_recall,
                       "denominator min(k, |test|) instead of |test|");
    eval_cmd->add_flag("--with-mask", ev.with_mask, "apply fresh eval-time masks at --p");
    eval_cmd->add_option("--p", ev.p, "keep probability for --with-mask")->check(kProbability);
    eval_cmd->add_option("--mask-seed", ev.mask_seed);
    eval_cmd->add_option("--min-weight", ev.min_weight);

    SweepArgs sw;
    auto* sweep_cmd = app.add_subcommand("sweep", "grid over depth and keep probability");
    sweep_cmd->add_option("--train", sw.base.train)->required();
    sweep_cmd->add_option("--test", sw.base.test)->required();
    sweep_cmd->add_option("--out", sw.base.out)->required();
    add_train_flags(sweep_cmd, sw.base);
    sweep_cmd->add_option("--K-list", sw.K_list, "depths, comma separated")->check(kIntList);
    sweep_cmd->add_option("--p-list", sw.p_list, "keep probabilities")->check(kDoubleList);
    sweep_cmd->add_option("--k", sw.k, "metric cutoff")->check(CLI::PositiveNumber);
    sweep_cmd->add_option("--threads", sw.threads)->check(CLI::PositiveNumber);

    AttackArgs at;
    auto* attack_cmd = app.add_subcommand("attack", "robustness under corruption");
    attack_cmd->add_option("--checkpoint", at.checkpoint)->required();
    attack_cmd->add_option("--train", at.train)->required();
    attack_cmd->add_option("--test", at.test)->required();
    attack_cmd->add_option("--out", at.out)->required();
    attack_cmd->add_option("--sigma-list", at.sigma_list, "gaussian noise levels")
        ->check(kDoubleList);
    attack_cmd->add_option("--keep-list", at.keep_list, "sparsification keep probabilities")
        ->check(kDoubleList);
    attack_cmd->add_option("--k", at.k)->check(CLI::PositiveNumber);
    attack_cmd->add_option("--trials", at.trials, "seeds averaged per grid point")
        ->check(CLI::PositiveNumber);
    attack_cmd->add_option("--seed", at.seed);
    attack_cmd->add_option("--threads", at.threads)->check(CLI::PositiveNumber);
    attack_cmd->add_option("--min-weight", at.min_weight);

    AnalyzeArgs an;
    auto* analyze_cmd = app.add_subcommand("analyze", "spectral facts and smoothing curves");
    analyze_cmd->add_option("--train", an.train, "interaction file for the graph")->required();
    analyze_cmd->add_option("--out", an.out)->required();
    analyze_cmd->add_option("--p-list", an.p_list)->check(kDoubleList);
    analyze_cmd->add_option("--k-max", an.k_max)->check(CLI::PositiveNumber);
    analyze_cmd->add_option("--trials", an.trials)->check(CLI::PositiveNumber);
    analyze_cmd->add_option("--threads", an.threads)->check(CLI::PositiveNumber);
    analyze_cmd->add_option("--rayleigh-samples", an.rayleigh_samples)
        ->check(CLI::PositiveNumber);
    analyze_cmd->add_option("--max-dense-nodes", an.max_dense_nodes)
        ->check(CLI::PositiveNumber);
    analyze_cmd->add_option("--probe-cols", an.probe_cols)->check(CLI::PositiveNumber);
    analyze_cmd->add_option("--seed", an.seed);
    analyze_cmd->add_flag("--dump-adjacency", an.dump_adjacency, "also write adjacency.tsv");
    analyze_cmd->add_option("--min-weight", an.min_weight);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*split_cmd) return cmd_split(sp);
        if (*train_cmd) return cmd_train(tr);
        if (*eval_cmd) return cmd_eval(ev);
        if (*sweep_cmd) return cmd_sweep(sw);
        if (*attack_cmd) return cmd_attack(at);
        if (*analyze_cmd) return cmd_analyze(an);
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}

}  // namespace hiergcn
