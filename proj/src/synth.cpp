#include "hiergcn/synth.hpp"

#include <algorithm>
#include <set>
#include <string>

#include "hiergcn/types.hpp"

namespace hiergcn {

std::vector<RawRecord> planted_interactions(const PlantedConfig& cfg) {
    if (cfg.num_users < 1 || cfg.num_items < 1) throw DataError("planted: empty universe");
    if (cfg.num_blocks < 1 || cfg.num_blocks > std::min(cfg.num_users, cfg.num_items))
        throw DataError("planted: bad block count");
    if (cfg.items_per_user < 1 || cfg.items_per_user > cfg.num_items)
        throw DataError("planted: bad items_per_user");
    if (!(cfg.noise >= 0.0 && cfg.noise <= 1.0)) throw DataError("planted: noise not in [0, 1]");

    Rng rng(cfg.seed);
    std::vector<RawRecord> records;
    records.reserve(static_cast<std::size_t>(cfg.num_users) * cfg.items_per_user);
    for (int u = 0; u < cfg.num_users; ++u) {
        int block = u % cfg.num_blocks;
        // items with id % num_blocks == block
        int in_block = (cfg.num_items - block + cfg.num_blocks - 1) / cfg.num_blocks;
        std::set<int> chosen;
        long long attempts = 0;
        while (static_cast<int>(chosen.size()) < cfg.items_per_user &&
               attempts < 200LL * cfg.items_per_user + 200) {
            ++attempts;
            int item;
            if (in_block > 0 && !rng.bernoulli(cfg.noise))
                item = block + cfg.num_blocks * static_cast<int>(rng.uniform_int(in_block));
            else
                item = static_cast<int>(rng.uniform_int(cfg.num_items));
            chosen.insert(item);
        }
        for (int item : chosen)
            records.push_back({"u" + std::to_string(u), "i" + std::to_string(item), {}, {}});
    }
    return records;
}

std::vector<std::pair<int, int>> random_bipartite_edges(int num_users, int num_items,
                                                        double density, Rng& rng) {
    if (!(density >= 0.0 && density <= 1.0)) throw DataError("density not in [0, 1]");
    std::vector<std::pair<int, int>> edges;
    for (int u = 0; u < num_users; ++u)
        for (int i = 0; i < num_items; ++i)
            if (rng.bernoulli(density)) edges.emplace_back(u, i);
    return edges;
}

std::vector<std::pair<int, int>> random_connected_bipartite(int num_users, int num_items,
                                                            int n_edges, Rng& rng) {
    if (num_users < 1 || num_items < 1) throw DataError("empty side");
    if (n_edges < num_users + num_items - 1)
        throw DataError("too few edges for a connected bipartite graph");
    if (static_cast<long long>(n_edges) > static_cast<long long>(num_users) * num_items)
        throw DataError("more edges than user-item pairs");

    std::set<std::pair<int, int>> edges;
    // Spanning construction: attach each new node to a random already-connected
    // node on the other side, then top up with random extras.
    edges.emplace(0, 0);
    int lu = 1, li = 1;  // users [0, lu) and items [0, li) are connected so far
    while (lu < num_users || li < num_items) {
        if (lu < num_users) {
            edges.emplace(lu, static_cast<int>(rng.uniform_int(li)));
            ++lu;
        }
        if (li < num_items) {
            edges.emplace(static_cast<int>(rng.uniform_int(lu)), li);
            ++li;
        }
    }
    while (static_cast<int>(edges.size()) < n_edges) {
        int u = static_cast<int>(rng.uniform_int(num_users));
        int i = static_cast<int>(rng.uniform_int(num_items));
        edges.emplace(u, i);
    }
    return {edges.begin(), edges.end()};
}

}  // namespace hiergcn
