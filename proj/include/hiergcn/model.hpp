#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hiergcn/graph.hpp"
#include "hiergcn/types.hpp"

namespace hiergcn {

// Embedding table plus one trained d x d transform per layer. K = 0
// degenerates to plain matrix factorization on E.
struct ModelParams {
  int num_users = 0;
  int num_items = 0;
  int dim = 0;     // embedding size d
  int layers = 0;  // propagation depth K
  Mat embeddings;  // (M+N) x d
  std::vector<Mat> transforms;  // K matrices, d x d
};

// Xavier-uniform init for E and every W_k: uniform on [-a, a] with
// a = sqrt(6 / (rows + cols)). Deterministic per seed.
ModelParams init_params(int num_users, int num_items, int dim, int layers, std::uint64_t seed);

// Per-layer states kept for exact backpropagation through the sampled masks:
// Z^(0) = E and Z^(k) = S_k Z^(k-1), where S_k is the layer-k masked
// operator. The transforms H^(k) = Z^(k) W_k live in the representation.
struct ForwardTrace {
  const NormalizedAdjacency* adj = nullptr;
  std::vector<Mat> pre;          // Z^(0..K)
  std::vector<EdgeMask> masks;   // empty when the forward ran unmasked
};

// Concatenated per-layer outputs O = [H^(0) | H^(1) | ... | H^(K)],
// (M+N) x (K+1)d, column blocks ordered by layer.
struct NodeRepresentation {
  int num_users = 0;
  int num_items = 0;
  int dim = 0;
  int layers = 0;
  Mat out;

  int width() const { return (layers + 1) * dim; }
  int item_row(int item) const { return num_users + item; }
};

struct ForwardResult {
  ForwardTrace trace;
  NodeRepresentation rep;
};

// Hierarchical linear forward pass. Layer k propagates the layer-(k-1) state
// through its own mask, so layer-wise noise accumulates along the chain.
// masks == nullptr runs on the full adjacency (evaluation mode). Throws
// DataError when the mask count differs from K.
ForwardResult forward(const ModelParams& params, const NormalizedAdjacency& adj,
                      const std::vector<EdgeMask>* masks = nullptr);

// Predicted preference: dot product of the two concatenated node vectors.
double score(const NodeRepresentation& rep, int user, int item);

// Scores of all items for one user; items in `exclude_sorted` get -inf so
// they can never enter a top-k cut.
std::vector<double> score_all_items(const NodeRepresentation& rep, int user,
                                    const std::vector<int>& exclude_sorted);

struct Gradients {
  Mat d_embeddings;
  std::vector<Mat> d_transforms;
};

// Exact reverse-mode gradients for the masks recorded in the trace.
// grad_out is dL/dO, shape (M+N) x (K+1)d.
Gradients backward(const ForwardTrace& trace, const ModelParams& params, const Mat& grad_out);

// Text checkpoint: header `hiergcn-v1 M N d K`, then E and W_1..W_K
// row-major at 17 significant digits. Round-trips bit-exactly.
void save_checkpoint(const std::string& path, const ModelParams& params);
ModelParams load_checkpoint(const std::string& path);

}  // namespace hiergcn
