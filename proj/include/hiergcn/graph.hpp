#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hiergcn/interactions.hpp"
#include "hiergcn/rng.hpp"
#include "hiergcn/types.hpp"

namespace hiergcn {

// Symmetrically normalized adjacency of the bipartite interaction graph with
// self-connections, in CSR form. Users occupy node ids [0, M), items
// [M, M+N). Entry (a, b) = 1 / sqrt(deg~_a * deg~_b) where deg~ counts the
// self-loop; the diagonal is always present, so an isolated node carries a
// single entry of 1. Immutable after construction and safe to share across
// threads.
struct NormalizedAdjacency {
  int num_users = 0;
  int num_items = 0;
  std::vector<index_t> row_offsets;  // size n_nodes() + 1
  std::vector<int> col_indices;      // sorted within each row
  std::vector<double> values;
  std::vector<double> degrees;  // augmented degree per node

  int n_nodes() const { return num_users + num_items; }
  index_t nnz() const { return static_cast<index_t>(col_indices.size()); }

  // Stored value at (row, col), 0 if the entry is not present.
  double at(int row, int col) const;
};

enum class GraphSource { train_only, train_and_test };

// Train-only is the default: held-out edges never enter the operator.
NormalizedAdjacency build_adjacency(const InteractionSet& set,
                                    GraphSource source = GraphSource::train_only);

// Per-layer Bernoulli keep/drop decisions, one bit per stored nonzero of the
// adjacency. No 1/p rescaling is applied anywhere: the masked operator is
// used as-is.
struct EdgeMask {
  double keep_prob = 1.0;
  std::vector<std::uint64_t> bits;

  bool kept(index_t e) const {
    return (bits[static_cast<std::size_t>(e >> 6)] >> (e & 63)) & 1u;
  }
  void set(index_t e) {
    bits[static_cast<std::size_t>(e >> 6)] |= std::uint64_t{1} << (e & 63);
  }
  index_t count_kept() const;
};

struct MaskOptions {
  bool preserve_self_loops = false;  // exempt diagonal entries from dropout
  bool symmetric_mask = false;       // drop (a,b) and (b,a) together
};

// Each stored nonzero is kept independently with probability p (subject to
// the options above). Deterministic for a fixed rng state. Throws DataError
// unless p in (0, 1].
EdgeMask sample_mask(const NormalizedAdjacency& adj, double p, Rng& rng,
                     const MaskOptions& opts = {});

// out(a, :) = sum_b kept(a,b) * A(a,b) * x(b, :). Pass mask = nullptr for the
// exact unmasked product. Throws DataError on a row-count mismatch.
Mat masked_spmm(const NormalizedAdjacency& adj, const EdgeMask* mask, const Mat& x);

// Transpose of the masked operator: out(b, :) = sum_a kept(a,b) * A(a,b) * g(a, :).
// The matrix is symmetric but the mask is not, so this is not masked_spmm.
Mat masked_spmm_transpose(const NormalizedAdjacency& adj, const EdgeMask* mask, const Mat& g);

// Diagnostic dump, lines `row col value`.
void write_adjacency_tsv(const std::string& path, const NormalizedAdjacency& adj);

}  // namespace hiergcn
