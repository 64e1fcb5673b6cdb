#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "hiergcn/graph.hpp"
#include "hiergcn/types.hpp"

namespace hiergcn {

// Empirical eigen-structure of the normalized adjacency and the slowdown of
// over-smoothing under per-layer edge dropout.

struct EigenPair {
  double value = 0.0;
  Vec vector;  // unit norm
  double residual = 0.0;
  int iterations = 0;
};

// Power iteration from a positive start vector. On any graph built here the
// dominant eigenvalue is 1 with eigenvector proportional to sqrt(deg~).
// Throws NumericalError (carrying the last residual) if max_iter is reached.
EigenPair dominant_eigenpair(const NormalizedAdjacency& adj, double tol = 1e-10,
                             int max_iter = 20000);

// Component label per node, labels dense from 0.
std::vector<int> connected_components(const NormalizedAdjacency& adj);
int count_components(const NormalizedAdjacency& adj);

// The k -> infinity limit of the propagation operator: per component c with
// unit vector x_c ~ restriction of sqrt(deg~), row n is x_c(n) * x_c^T.
// Dense n x n; diagnostic for small graphs.
Mat limit_reference(const NormalizedAdjacency& adj);

struct ConvergencePoint {
  int k = 0;
  double ratio_mean = 0.0;  // mean over nodes of cos(current row, limit row)
  double ratio_min = 0.0;   // min over nodes, averaged over trials
};

struct ConvergenceCurve {
  double keep_prob = 1.0;
  int n_trials = 1;  // trials actually run (1 when keep_prob == 1)
  std::vector<ConvergencePoint> points;  // k = 1..k_max
};

struct CurveOptions {
  int k_max = 20;
  int n_trials = 10;
  // Graphs larger than this track a random probe block instead of the full
  // dense propagation state; valid because the limit is low-rank.
  int max_dense_nodes = 4096;
  int probe_cols = 32;
  int threads = 1;
};

// Propagates the identity through k_max fresh masked operators and measures,
// per k, the cosine between each node's current vector and its converged
// limit. Trials use decorrelated sub-seeds and average by trial index.
// Cosines are reported raw, no clamping.
ConvergenceCurve convergence_curve(const NormalizedAdjacency& adj, double keep_prob,
                                   const CurveOptions& opts, std::uint64_t seed);

// Min/max Rayleigh quotient v^T A v over random unit vectors; the spectrum
// lies in (-1, 1].
std::pair<double, double> rayleigh_range(const NormalizedAdjacency& adj, int n_samples,
                                         Rng& rng);

struct SpectralSummary {
  double lambda_max = 0.0;
  double residual = 0.0;
  int n_components = 0;
  double rayleigh_min = 0.0;
  double rayleigh_max = 0.0;
};

SpectralSummary spectral_summary(const NormalizedAdjacency& adj, int rayleigh_samples,
                                 std::uint64_t seed);

// `p,k,ratio_mean,ratio_min,trials`
void write_convergence_csv(const std::string& path, const std::vector<ConvergenceCurve>& curves);
// `lambda_max,residual,n_components,rayleigh_min,rayleigh_max`
void write_spectral_csv(const std::string& path, const SpectralSummary& summary);

}  // namespace hiergcn
