#include "hiergcn/graph.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "hiergcn/format.hpp"

namespace hiergcn {

double NormalizedAdjacency::at(int row, int col) const {
    auto lo = row_offsets[row], hi = row_offsets[row + 1];
    auto begin = col_indices.begin() + lo, end = col_indices.begin() + hi;
    auto it = std::lower_bound(begin, end, col);
    if (it == end || *it != col) return 0.0;
    return values[lo + (it - begin)];
}

NormalizedAdjacency build_adjacency(const InteractionSet& set, GraphSource source) {
    NormalizedAdjacency adj;
    adj.num_users = set.num_users;
    adj.num_items = set.num_items;
    int n = adj.n_nodes();

    std::vector<std::vector<int>> nb(n);
    auto add_pairs = [&](const std::vector<std::pair<int, int>>& pairs) {
        for (const auto& [u, i] : pairs) {
            nb[u].push_back(set.num_users + i);
            nb[set.num_users + i].push_back(u);
        }
    };
    add_pairs(set.train_pairs);
    if (source == GraphSource::train_and_test) add_pairs(set.test_pairs);
    for (int a = 0; a < n; ++a) nb[a].push_back(a);  // self-connection

    adj.degrees.resize(n);
    adj.row_offsets.resize(n + 1);
    adj.row_offsets[0] = 0;
    for (int a = 0; a < n; ++a) {
        std::sort(nb[a].begin(), nb[a].end());
        adj.degrees[a] = static_cast<double>(nb[a].size());
        adj.row_offsets[a + 1] = adj.row_offsets[a] + static_cast<index_t>(nb[a].size());
    }
    adj.col_indices.reserve(adj.row_offsets[n]);
    adj.values.reserve(adj.row_offsets[n]);
    for (int a = 0; a < n; ++a)
        for (int b : nb[a]) {
            adj.col_indices.push_back(b);
            adj.values.push_back(1.0 / std::sqrt(adj.degrees[a] * adj.degrees[b]));
        }
    return adj;
}

index_t EdgeMask::count_kept() const {
    index_t c = 0;
    for (auto w : bits) c += std::popcount(w);
    return c;
}

EdgeMask sample_mask(const NormalizedAdjacency& adj, double p, Rng& rng,
                     const MaskOptions& opts) {
    if (!(p > 0.0 && p <= 1.0))
        throw DataError("keep probability must be in (0, 1], got " + fmt_double(p));
    EdgeMask mask;
    mask.keep_prob = p;
    mask.bits.assign(static_cast<std::size_t>((adj.nnz() + 63) / 64), 0);

    int n = adj.n_nodes();
    auto entry_index = [&](int row, int col) -> index_t {
        auto lo = adj.row_offsets[row], hi = adj.row_offsets[row + 1];
        auto begin = adj.col_indices.begin() + lo;
        auto it = std::lower_bound(begin, adj.col_indices.begin() + hi, col);
        return lo + (it - begin);
    };

    for (int a = 0; a < n; ++a) {
        for (index_t e = adj.row_offsets[a]; e < adj.row_offsets[a + 1]; ++e) {
            int b = adj.col_indices[e];
            if (b == a) {
                if (opts.preserve_self_loops || rng.bernoulli(p)) mask.set(e);
                continue;
            }
            if (opts.symmetric_mask) {
                if (b < a) continue;  // mirrored from the (b, a) visit below
                if (rng.bernoulli(p)) {
                    mask.set(e);
                    mask.set(entry_index(b, a));
                }
            } else if (rng.bernoulli(p)) {
                mask.set(e);
            }
        }
    }
    return mask;
}

Mat masked_spmm(const NormalizedAdjacency& adj, const EdgeMask* mask, const Mat& x) {
    int n = adj.n_nodes();
    if (x.rows() != n)
        throw DataError("spmm: operand has " + std::to_string(x.rows()) + " rows, graph has " +
                        std::to_string(n) + " nodes");
    Mat out = Mat::Zero(n, x.cols());
    for (int a = 0; a < n; ++a) {
        auto row = out.row(a);
        for (index_t e = adj.row_offsets[a]; e < adj.row_offsets[a + 1]; ++e) {
            if (mask && !mask->kept(e)) continue;
            row += adj.values[e] * x.row(adj.col_indices[e]);
        }
    }
    return out;
}

Mat masked_spmm_transpose(const NormalizedAdjacency& adj, const EdgeMask* mask, const Mat& g) {
    int n = adj.n_nodes();
    if (g.rows() != n)
        throw DataError("spmm_transpose: operand has " + std::to_string(g.rows()) +
                        " rows, graph has " + std::to_string(n) + " nodes");
    Mat out = Mat::Zero(n, g.cols());
    for (int a = 0; a < n; ++a) {
        auto grow = g.row(a);
        for (index_t e = adj.row_offsets[a]; e < adj.row_offsets[a + 1]; ++e) {
            if (mask && !mask->kept(e)) continue;
            out.row(adj.col_indices[e]) += adj.values[e] * grow;
        }
    }
    return out;
}

void write_adjacency_tsv(const std::string& path, const NormalizedAdjacency& adj) {
    auto f = open_out(path);
    int n = adj.n_nodes();
    for (int a = 0; a < n; ++a)
        for (index_t e = adj.row_offsets[a]; e < adj.row_offsets[a + 1]; ++e)
            f << a << '\t' << adj.col_indices[e] << '\t' << fmt_double(adj.values[e]) << '\n';
    if (!f) throw DataError("write failed: " + path);
}

}  // namespace hiergcn
