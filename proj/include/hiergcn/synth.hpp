#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "hiergcn/interactions.hpp"
#include "hiergcn/rng.hpp"

namespace hiergcn {

// Synthetic data for tests and trend experiments.

// Users and items are assigned to blocks round-robin; each user draws
// `items_per_user` distinct items, from the own block with probability
// 1 - noise and uniformly otherwise.
struct PlantedConfig {
  int num_users = 20;
  int num_items = 20;
  int num_blocks = 2;
  int items_per_user = 6;
  double noise = 0.1;
  std::uint64_t seed = 7;
};

std::vector<RawRecord> planted_interactions(const PlantedConfig& cfg);

// Random bipartite edge list, each (u, i) present independently with
// probability `density`. May be disconnected.
std::vector<std::pair<int, int>> random_bipartite_edges(int num_users, int num_items,
                                                        double density, Rng& rng);

// Connected bipartite graph: an alternating spanning path plus random extra
// edges up to n_edges total.
std::vector<std::pair<int, int>> random_connected_bipartite(int num_users, int num_items,
                                                            int n_edges, Rng& rng);

}  // namespace hiergcn
