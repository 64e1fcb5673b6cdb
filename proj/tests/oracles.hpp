#pragma once

// Naive dense / brute-force reference implementations. Everything here is
// written independently of the library kernels so the two sides of each
// comparison share no code beyond basic types.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <set>
#include <vector>

#include "hiergcn/graph.hpp"
#include "hiergcn/model.hpp"
#include "hiergcn/rng.hpp"

namespace oracle {

using Dense = Eigen::MatrixXd;

// Normalized adjacency with self-connections, built entrywise.
inline Dense dense_adjacency(int M, int N, const std::vector<std::pair<int, int>>& pairs) {
    int n = M + N;
    Dense a = Dense::Identity(n, n);
    for (const auto& [u, i] : pairs) {
        a(u, M + i) = 1.0;
        a(M + i, u) = 1.0;
    }
    Eigen::VectorXd deg = a.rowwise().sum();
    Dense out(n, n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) out(r, c) = a(r, c) / std::sqrt(deg[r] * deg[c]);
    return out;
}

// 0/1 matrix of a sampled mask, aligned with the CSR layout it came from.
inline Dense dense_mask(const hiergcn::NormalizedAdjacency& adj, const hiergcn::EdgeMask& mask) {
    int n = adj.n_nodes();
    Dense b = Dense::Zero(n, n);
    for (int r = 0; r < n; ++r)
        for (hiergcn::index_t e = adj.row_offsets[r]; e < adj.row_offsets[r + 1]; ++e)
            if (mask.kept(e)) b(r, adj.col_indices[e]) = 1.0;
    return b;
}

// Forward pass with dense matrices: Z^(k) = (A .* B_k) Z^(k-1),
// O = [Z0 | Z1 W1 | ... | ZK WK].
inline Dense dense_forward(const hiergcn::ModelParams& p, const Dense& a_hat,
                           const std::vector<Dense>& layer_masks) {
    int n = p.num_users + p.num_items;
    int K = p.layers, d = p.dim;
    Dense z = p.embeddings;
    Dense out(n, (K + 1) * d);
    out.block(0, 0, n, d) = z;
    for (int k = 1; k <= K; ++k) {
        Dense op = layer_masks.empty() ? a_hat : Dense(a_hat.cwiseProduct(layer_masks[k - 1]));
        z = op * z;
        out.block(0, k * d, n, d) = z * Dense(p.transforms[k - 1]);
    }
    return out;
}

// Rank a score vector by (score desc, id asc) with a full stable sort;
// ids scored -inf are excluded entirely.
inline std::vector<int> rank_ref(const std::vector<double>& scores) {
    std::vector<int> ids;
    for (int i = 0; i < static_cast<int>(scores.size()); ++i)
        if (scores[i] > -std::numeric_limits<double>::infinity()) ids.push_back(i);
    std::stable_sort(ids.begin(), ids.end(), [&](int a, int b) {
        if (scores[a] != scores[b]) return scores[a] > scores[b];
        return a < b;
    });
    return ids;
}

inline double recall_ref(const std::vector<int>& ranked, const std::set<int>& test, int k,
                         bool truncated) {
    if (test.empty()) return 0.0;
    int hits = 0;
    for (int r = 0; r < k && r < static_cast<int>(ranked.size()); ++r)
        hits += test.count(ranked[r]);
    int denom = truncated ? std::min<int>(k, static_cast<int>(test.size()))
                          : static_cast<int>(test.size());
    return static_cast<double>(hits) / denom;
}

inline double ndcg_ref(const std::vector<int>& ranked, const std::set<int>& test, int k) {
    if (test.empty()) return 0.0;
    double dcg = 0.0;
    for (int r = 0; r < k && r < static_cast<int>(ranked.size()); ++r)
        if (test.count(ranked[r])) dcg += 1.0 / std::log2(r + 2.0);
    double idcg = 0.0;
    for (int r = 0; r < std::min<int>(k, static_cast<int>(test.size())); ++r)
        idcg += 1.0 / std::log2(r + 2.0);
    return dcg / idcg;
}

// Central finite difference of f at one parameter entry.
// matrix: -1 = embeddings, otherwise transform index.
inline double central_fd(const std::function<double(const hiergcn::ModelParams&)>& f,
                         hiergcn::ModelParams params, int matrix, hiergcn::index_t r,
                         hiergcn::index_t c, double eps) {
    double* slot = matrix < 0 ? &params.embeddings(r, c) : &params.transforms[matrix](r, c);
    double orig = *slot;
    *slot = orig + eps;
    double fp = f(params);
    *slot = orig - eps;
    double fm = f(params);
    return (fp - fm) / (2.0 * eps);
}

// Expected ndcg@k of a uniformly random permutation of n candidates that
// contains t relevant items, by Monte-Carlo.
inline double mc_random_ndcg(int n_candidates, int n_test, int k, int trials, hiergcn::Rng& rng) {
    std::vector<int> perm(n_candidates);
    std::iota(perm.begin(), perm.end(), 0);
    std::set<int> test;
    for (int i = 0; i < n_test; ++i) test.insert(i);
    double sum = 0.0;
    for (int t = 0; t < trials; ++t) {
        for (int i = n_candidates - 1; i >= 1; --i) {
            int j = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(i + 1)));
            std::swap(perm[i], perm[j]);
        }
        sum += ndcg_ref(perm, test, k);
    }
    return sum / trials;
}

// Closed form of the same expectation: hit probability at every rank is t/n.
inline double exact_random_ndcg(int n_candidates, int n_test, int k) {
    double disc_k = 0.0;
    for (int r = 0; r < std::min(k, n_candidates); ++r) disc_k += 1.0 / std::log2(r + 2.0);
    double idcg = 0.0;
    for (int r = 0; r < std::min(k, n_test); ++r) idcg += 1.0 / std::log2(r + 2.0);
    return (static_cast<double>(n_test) / n_candidates) * disc_k / idcg;
}

}  // namespace oracle
