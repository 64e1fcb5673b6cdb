#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hiergcn/graph.hpp"
#include "hiergcn/interactions.hpp"
#include "hiergcn/model.hpp"

namespace hiergcn {

struct RankingMetrics {
  int k = 0;
  double recall = 0.0;  // mean over evaluable users
  double ndcg = 0.0;
  int n_users_evaluated = 0;
};

struct EvalOptions {
  int threads = 1;
  // Recall denominator: |test(u)| by default, min(k, |test(u)|) if set.
  bool truncated_recall = false;
  // Apply fresh per-layer masks at keep_prob during the evaluation forward
  // pass instead of the full adjacency.
  bool eval_with_mask = false;
  double keep_prob = 1.0;
  std::uint64_t mask_seed = 0;
};

// Item ids of the k best scores, descending score, ties broken by ascending
// id. Entries scored -inf (exclusions) never appear.
std::vector<int> top_k_items(const std::vector<double>& scores, int k);

// recall@k for one user given the already-ranked candidate list (train items
// excluded) and the sorted test set.
double recall_at_k(const std::vector<int>& ranked_items, const std::vector<int>& test_sorted,
                   int k, bool truncated = false);

// Binary-relevance ndcg@k, log2 discount, ranks starting at 1.
double ndcg_at_k(const std::vector<int>& ranked_items, const std::vector<int>& test_sorted, int k);

// Ranks every non-train item per user (full adjacency, score ties broken by
// ascending item id) and averages both metrics over users with a non-empty
// test set. Identical results regardless of thread count.
std::vector<RankingMetrics> evaluate(const ModelParams& params, const NormalizedAdjacency& adj,
                                     const InteractionSet& set, const std::vector<int>& k_list,
                                     const EvalOptions& opts = {});

struct AttackConfig {
  enum class Kind { gaussian_embedding, edge_sparsify };
  Kind kind = Kind::gaussian_embedding;
  double sigma = 0.0;      // gaussian: i.i.d. N(0, sigma^2) on every layer block
  double keep_prob = 1.0;  // sparsify: one fixed mask applied at every layer
  std::uint64_t seed = 0;
};

// Evaluation under one of the two corruption protocols. sigma = 0 or
// keep_prob = 1 reproduces evaluate() exactly.
std::vector<RankingMetrics> evaluate_under_attack(const ModelParams& params,
                                                  const NormalizedAdjacency& adj,
                                                  const InteractionSet& set,
                                                  const AttackConfig& attack,
                                                  const std::vector<int>& k_list,
                                                  const EvalOptions& opts = {});

// `k,recall,ndcg,n_users`
void write_metrics_csv(const std::string& path, const std::vector<RankingMetrics>& metrics);

struct AttackRow {
  std::string kind;
  double param = 0.0;
  int k = 0;
  double recall = 0.0;
  double ndcg = 0.0;
  double degradation_pct = 0.0;  // ndcg drop vs the clean run, percent
};

// `kind,param,k,recall,ndcg,degradation_pct`
void write_attack_csv(const std::string& path, const std::vector<AttackRow>& rows);

}  // namespace hiergcn
