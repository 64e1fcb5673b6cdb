#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "hiergcn/synth.hpp"
#include "hiergcn/training.hpp"
#include "oracles.hpp"

using namespace hiergcn;

namespace {

// Two taste blocks: users 0-1 with items 0-1, users 2-3 with items 2-3.
InteractionSet two_block_toy() {
    return make_set(4, 4, {{0, 0}, {0, 1}, {1, 0}, {2, 2}, {2, 3}, {3, 2}}, {{1, 1}, {3, 3}});
}

TrainConfig small_cfg() {
    TrainConfig cfg;
    cfg.dim = 4;
    cfg.layers = 1;
    cfg.batch_size = 8;
    cfg.keep_prob = 1.0;
    cfg.learning_rate = 0.1;
    cfg.reg_lambda = 1e-3;
    return cfg;
}

}  // namespace

TEST_CASE("stable link functions hit their pinned values") {
    CHECK(sigmoid(0.0) == 0.5);
    CHECK(sigmoid(1.0) == doctest::Approx(0.7310585786300049).epsilon(1e-15));
    CHECK(softplus(0.0) == doctest::Approx(0.6931471805599453).epsilon(1e-15));
    CHECK(softplus(-1.0) == doctest::Approx(0.3132616875182228).epsilon(1e-14));
    CHECK(softplus(-100.0) < 1e-40);
    CHECK(softplus(-100.0) > 0.0);
    CHECK(softplus(100.0) == doctest::Approx(100.0).epsilon(1e-15));
    CHECK(std::isfinite(softplus(-745.0)));
    CHECK(std::isfinite(softplus(745.0)));

    auto params = init_params(2, 2, 3, 1, 1);
    CHECK(bpr_loss(1.3, 1.3, params, 0.0) == doctest::Approx(0.6931471805599453).epsilon(1e-15));
    CHECK(bpr_loss(2.0, 1.0, params, 0.0) ==
          doctest::Approx(0.3132616875182228).epsilon(1e-14));
    CHECK(bpr_loss(101.0, 1.0, params, 0.0) < 1e-40);
    double theta = params.embeddings.squaredNorm() + params.transforms[0].squaredNorm();
    CHECK(bpr_loss(1.0, 1.0, params, 0.01) ==
          doctest::Approx(0.6931471805599453 + 0.01 * theta).epsilon(1e-14));
}

TEST_CASE("one triplet, one step: the update is exactly -lr * gradient") {
    auto set = make_set(1, 2, {{0, 0}}, {});  // forces the triplet (0, 0, 1)
    auto adj = build_adjacency(set);
    auto params = init_params(1, 2, 3, 1, 5);
    TrainConfig cfg = small_cfg();
    cfg.layers = 1;
    cfg.dim = 3;
    cfg.batch_size = 1;
    cfg.keep_prob = 1.0;
    cfg.learning_rate = 0.2;
    cfg.reg_lambda = 0.05;

    // assemble the expected gradient by hand
    auto fr = forward(params, adj);
    const Mat& O = fr.rep.out;
    double x = O.row(0).dot(O.row(1)) - O.row(0).dot(O.row(2));
    double c = sigmoid(x) - 1.0;
    Mat G = Mat::Zero(3, 6);
    G.row(0) += c * (O.row(1) - O.row(2));
    G.row(1) += c * O.row(0);
    G.row(2) -= c * O.row(0);
    auto grads = backward(fr.trace, params, G);
    for (int r = 0; r < 3; ++r)
        grads.d_embeddings.row(r) += 2.0 * cfg.reg_lambda * params.embeddings.row(r);
    grads.d_transforms[0] += 2.0 * cfg.reg_lambda * params.transforms[0];
    Mat want_e = params.embeddings - cfg.learning_rate * grads.d_embeddings;
    Mat want_w = params.transforms[0] - cfg.learning_rate * grads.d_transforms[0];

    auto trained = params;
    Rng rng(3);
    train_epoch(trained, adj, set, cfg, rng);
    CHECK((trained.embeddings - want_e).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((trained.transforms[0] - want_w).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("zero learning rate and zero lambda leave parameters bit-identical") {
    auto set = two_block_toy();
    auto adj = build_adjacency(set);
    auto params = init_params(4, 4, 4, 2, 9);
    auto before = params;
    TrainConfig cfg = small_cfg();
    cfg.layers = 2;
    cfg.learning_rate = 0.0;
    cfg.reg_lambda = 0.0;
    cfg.keep_prob = 0.9;
    Rng rng(4);
    train_epoch(params, adj, set, cfg, rng);
    CHECK(params.embeddings == before.embeddings);
    CHECK(params.transforms[0] == before.transforms[0]);
    CHECK(params.transforms[1] == before.transforms[1]);
}

TEST_CASE("the full step gradient matches central differences") {
    Rng rng(61);
    auto edges = random_bipartite_edges(4, 5, 0.6, rng);
    auto set = make_set(4, 5, edges, {});
    auto adj = build_adjacency(set);
    int K = 2, d = 3;
    auto params = init_params(4, 5, d, K, 62);
    Rng mrng(63);
    std::vector<EdgeMask> masks;
    for (int k = 0; k < K; ++k) masks.push_back(sample_mask(adj, 0.7, mrng));
    Rng trng(64);
    std::vector<Triplet> triplets;
    for (int t = 0; t < 6; ++t) triplets.push_back(sample_triplet(set, trng));
    double lambda = 1e-3;

    std::vector<index_t> touched;
    for (const auto& t : triplets) {
        touched.push_back(t.user);
        touched.push_back(set.num_users + t.pos_item);
        touched.push_back(set.num_users + t.neg_item);
    }
    std::sort(touched.begin(), touched.end());
    touched.erase(std::unique(touched.begin(), touched.end()), touched.end());

    auto loss = [&](const ModelParams& p) {
        auto fr = forward(p, adj, &masks);
        const Mat& O = fr.rep.out;
        double s = 0.0;
        for (const auto& t : triplets) {
            double x = O.row(t.user).dot(O.row(set.num_users + t.pos_item)) -
                       O.row(t.user).dot(O.row(set.num_users + t.neg_item));
            s += softplus(-x);
        }
        s /= triplets.size();
        for (index_t r : touched) s += lambda * p.embeddings.row(r).squaredNorm();
        for (const auto& w : p.transforms) s += lambda * w.squaredNorm();
        return s;
    };

    auto fr = forward(params, adj, &masks);
    const Mat& O = fr.rep.out;
    Mat G = Mat::Zero(adj.n_nodes(), (K + 1) * d);
    for (const auto& t : triplets) {
        int ri = set.num_users + t.pos_item, rj = set.num_users + t.neg_item;
        double x = O.row(t.user).dot(O.row(ri)) - O.row(t.user).dot(O.row(rj));
        double c = (sigmoid(x) - 1.0) / triplets.size();
        G.row(t.user) += c * (O.row(ri) - O.row(rj));
        G.row(ri) += c * O.row(t.user);
        G.row(rj) -= c * O.row(t.user);
    }
    auto grads = backward(fr.trace, params, G);
    for (index_t r : touched)
        grads.d_embeddings.row(r) += 2.0 * lambda * params.embeddings.row(r);
    for (int k = 0; k < K; ++k) grads.d_transforms[k] += 2.0 * lambda * params.transforms[k];

    double max_rel = 0.0;
    auto check_entry = [&](int matrix, index_t r, index_t c, double analytic) {
        double fd = oracle::central_fd(loss, params, matrix, r, c, 1e-5);
        double rel =
            std::abs(analytic - fd) / std::max({std::abs(analytic), std::abs(fd), 1e-3});
        max_rel = std::max(max_rel, rel);
    };
    for (index_t r = 0; r < params.embeddings.rows(); ++r)
        for (index_t c = 0; c < d; ++c) check_entry(-1, r, c, grads.d_embeddings(r, c));
    for (int k = 0; k < K; ++k)
        for (index_t r = 0; r < d; ++r)
            for (index_t c = 0; c < d; ++c) check_entry(k, r, c, grads.d_transforms[k](r, c));
    CHECK(max_rel < 1e-6);
}

TEST_CASE("loss falls on the two-block toy") {
    auto set = two_block_toy();
    auto adj = build_adjacency(set);
    auto params = init_params(4, 4, 4, 1, 17);
    TrainConfig cfg = small_cfg();
    cfg.epochs = 200;
    cfg.seed = 18;
    auto report = train(params, adj, set, cfg);
    REQUIRE(report.epochs.size() == 200);
    CHECK(report.epochs.back().loss < report.epochs.front().loss);
    CHECK(report.epochs.back().loss < 0.6931471805599453);

    // held-out block items now outscore cross-block ones
    auto fr = forward(params, adj);
    CHECK(score(fr.rep, 1, 1) > score(fr.rep, 1, 2));
    CHECK(score(fr.rep, 1, 1) > score(fr.rep, 1, 3));
    CHECK(score(fr.rep, 3, 3) > score(fr.rep, 3, 0));
}

TEST_CASE("training is deterministic per seed") {
    auto records = planted_interactions({12, 12, 2, 5, 0.1, 3});
    auto set = build_split(records, {0.8, 4, true});
    auto adj = build_adjacency(set);
    TrainConfig cfg = small_cfg();
    cfg.layers = 2;
    cfg.keep_prob = 0.8;
    cfg.epochs = 3;
    cfg.seed = 5;
    auto p1 = init_params(set.num_users, set.num_items, 4, 2, 6);
    auto p2 = init_params(set.num_users, set.num_items, 4, 2, 6);
    train(p1, adj, set, cfg);
    train(p2, adj, set, cfg);
    CHECK(p1.embeddings == p2.embeddings);
    CHECK(p1.transforms[1] == p2.transforms[1]);

    cfg.seed = 7;
    auto p3 = init_params(set.num_users, set.num_items, 4, 2, 6);
    train(p3, adj, set, cfg);
    CHECK(p1.embeddings != p3.embeddings);
}

TEST_CASE("mask refresh cadence changes the trajectory") {
    auto records = planted_interactions({10, 10, 2, 5, 0.1, 8});
    auto set = build_split(records, {0.8, 9, true});
    auto adj = build_adjacency(set);
    TrainConfig cfg = small_cfg();
    cfg.layers = 2;
    cfg.keep_prob = 0.7;
    cfg.epochs = 2;
    cfg.batch_size = 4;  // several steps per epoch
    auto a = init_params(set.num_users, set.num_items, 4, 2, 10);
    auto b = a;
    TrainConfig cfg_epoch = cfg;
    cfg_epoch.mask_refresh = MaskRefresh::epoch;
    train(a, adj, set, cfg);
    train(b, adj, set, cfg_epoch);
    CHECK(a.embeddings != b.embeddings);
}

TEST_CASE("regularization scope: full decays every row, batch only touched ones") {
    auto set = make_set(3, 3, {{0, 0}}, {});  // user rows 1-2, item rows 4-5 never touched
    auto adj = build_adjacency(set);
    auto params = init_params(3, 3, 3, 0, 11);
    auto before = params;
    TrainConfig cfg = small_cfg();
    cfg.layers = 0;
    cfg.dim = 3;
    cfg.reg_lambda = 0.1;
    cfg.keep_prob = 1.0;
    Rng r1(12);
    auto batch_scope = params;
    train_epoch(batch_scope, adj, set, cfg, r1);
    CHECK(batch_scope.embeddings.row(1) == before.embeddings.row(1));

    cfg.reg_scope = RegScope::full;
    Rng r2(12);
    auto full_scope = params;
    train_epoch(full_scope, adj, set, cfg, r2);
    CHECK(full_scope.embeddings.row(1) != before.embeddings.row(1));
    CHECK(full_scope.embeddings.row(1).norm() < before.embeddings.row(1).norm());
}

TEST_CASE("stronger lambda shrinks the embedding table") {
    auto records = planted_interactions({10, 10, 2, 5, 0.05, 13});
    auto set = build_split(records, {0.8, 14, true});
    auto adj = build_adjacency(set);
    std::vector<double> lambdas{0.0, 1e-3, 1e-1};
    std::vector<double> norms;
    for (double l : lambdas) {
        auto params = init_params(set.num_users, set.num_items, 4, 1, 15);
        TrainConfig cfg = small_cfg();
        cfg.reg_lambda = l;
        cfg.reg_scope = RegScope::full;
        cfg.epochs = 40;
        cfg.seed = 16;
        train(params, adj, set, cfg);
        norms.push_back(params.embeddings.norm());
    }
    CHECK(norms[0] >= norms[1]);
    CHECK(norms[1] >= norms[2]);
}

TEST_CASE("diverging training raises a numerical error") {
    auto set = two_block_toy();
    auto adj = build_adjacency(set);
    auto params = init_params(4, 4, 4, 1, 19);
    TrainConfig cfg = small_cfg();
    cfg.learning_rate = 1e200;
    cfg.reg_lambda = 1e-3;
    cfg.epochs = 3;
    CHECK_THROWS_AS(train(params, adj, set, cfg), NumericalError);
}

TEST_CASE("config validation") {
    auto set = two_block_toy();
    auto adj = build_adjacency(set);
    auto params = init_params(4, 4, 4, 1, 20);
    Rng rng(1);
    TrainConfig cfg = small_cfg();
    cfg.reg_lambda = -1.0;
    CHECK_THROWS_AS(train_epoch(params, adj, set, cfg, rng), DataError);
    cfg = small_cfg();
    cfg.keep_prob = 0.0;
    CHECK_THROWS_AS(train_epoch(params, adj, set, cfg, rng), DataError);
    cfg = small_cfg();
    cfg.batch_size = 0;
    CHECK_THROWS_AS(train_epoch(params, adj, set, cfg, rng), DataError);
    cfg = small_cfg();
    cfg.patience = 2;  // without eval_every
    CHECK_THROWS_AS(train(params, adj, set, cfg), DataError);
}

TEST_CASE("epochs = 0 is a no-op with an empty report") {
    auto set = two_block_toy();
    auto adj = build_adjacency(set);
    auto params = init_params(4, 4, 4, 1, 21);
    auto before = params;
    TrainConfig cfg = small_cfg();
    cfg.epochs = 0;
    auto report = train(params, adj, set, cfg);
    CHECK(report.epochs.empty());
    CHECK(params.embeddings == before.embeddings);
}

TEST_CASE("periodic holdout metrics, early stopping, checkpoints, csv cells") {
    auto dir = std::filesystem::temp_directory_path() / "hiergcn_train_test";
    std::filesystem::create_directories(dir);
    auto set = two_block_toy();
    auto adj = build_adjacency(set);
    auto params = init_params(4, 4, 4, 1, 23);
    TrainConfig cfg = small_cfg();
    cfg.epochs = 60;
    cfg.eval_every = 2;
    cfg.patience = 3;
    cfg.checkpoint_path = (dir / "ck.txt").string();
    cfg.checkpoint_every = 2;
    auto report = train(params, adj, set, cfg);
    CHECK(report.epochs.size() < 60);  // perfect ndcg plateaus, patience trips
    for (const auto& s : report.epochs) {
        if (s.epoch % 2 == 0) {
            CHECK(s.ndcg10 >= 0.0);
            CHECK(s.recall10 >= 0.0);
        } else {
            CHECK(s.ndcg10 < 0.0);
        }
        CHECK(s.seconds >= 0.0);
    }
    CHECK(std::filesystem::exists(dir / "ck.txt"));
    CHECK(std::filesystem::exists(dir / "ck.txt_epoch_2"));
    auto saved = load_checkpoint((dir / "ck.txt").string());
    CHECK(saved.embeddings == params.embeddings);

    write_train_report_csv((dir / "report.csv").string(), report);
    std::ifstream f(dir / "report.csv");
    std::string header, row1;
    std::getline(f, header);
    std::getline(f, row1);
    CHECK(header == "epoch,loss,recall10,ndcg10,seconds");
    CHECK(row1.find(",,") != std::string::npos);  // epoch 1 had no evaluation
    std::filesystem::remove_all(dir);
}
