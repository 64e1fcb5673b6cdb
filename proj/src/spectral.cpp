#include "hiergcn/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <thread>
#include <vector>

#include "hiergcn/format.hpp"
#include "hiergcn/rng.hpp"

namespace hiergcn {

namespace {

Vec spmv(const NormalizedAdjacency& adj, const Vec& v) {
    int n = adj.n_nodes();
    Vec out = Vec::Zero(n);
    for (int a = 0; a < n; ++a) {
        double s = 0.0;
        for (index_t e = adj.row_offsets[a]; e < adj.row_offsets[a + 1]; ++e)
            s += adj.values[e] * v[adj.col_indices[e]];
        out[a] = s;
    }
    return out;
}

// Unit reference vector per node: restriction of sqrt(deg~) to the node's
// component, normalized within the component. Zero nowhere, so a full-length
// dot against it only picks up the in-component entries of a propagated row.
Vec component_reference(const NormalizedAdjacency& adj, const std::vector<int>& comp,
                        int n_comps) {
    int n = adj.n_nodes();
    Vec x(n);
    std::vector<double> norm_sq(n_comps, 0.0);
    for (int a = 0; a < n; ++a) {
        x[a] = std::sqrt(adj.degrees[a]);
        norm_sq[comp[a]] += adj.degrees[a];
    }
    for (int a = 0; a < n; ++a) x[a] /= std::sqrt(norm_sq[comp[a]]);
    return x;
}

}  // namespace

EigenPair dominant_eigenpair(const NormalizedAdjacency& adj, double tol, int max_iter) {
    int n = adj.n_nodes();
    if (n == 0) throw DataError("empty graph");
    Vec v = Vec::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)));
    double resid = 0.0;
    for (int it = 1; it <= max_iter; ++it) {
        Vec w = spmv(adj, v);
        double lambda = v.dot(w);
        resid = (w - lambda * v).norm();
        if (resid <= tol) return {lambda, v, resid, it};
        v = w / w.norm();
    }
    throw NumericalError("power iteration stalled at residual " + fmt_double(resid) + " after " +
                         std::to_string(max_iter) + " iterations");
}

std::vector<int> connected_components(const NormalizedAdjacency& adj) {
    int n = adj.n_nodes();
    std::vector<int> comp(n, -1);
    std::vector<int> stack;
    int label = 0;
    for (int s = 0; s < n; ++s) {
        if (comp[s] != -1) continue;
        comp[s] = label;
        stack.push_back(s);
        while (!stack.empty()) {
            int a = stack.back();
            stack.pop_back();
            for (index_t e = adj.row_offsets[a]; e < adj.row_offsets[a + 1]; ++e) {
                int b = adj.col_indices[e];
                if (comp[b] == -1) {
                    comp[b] = label;
                    stack.push_back(b);
                }
            }
        }
        ++label;
    }
    return comp;
}

int count_components(const NormalizedAdjacency& adj) {
    auto comp = connected_components(adj);
    return comp.empty() ? 0 : 1 + *std::max_element(comp.begin(), comp.end());
}

Mat limit_reference(const NormalizedAdjacency& adj) {
    int n = adj.n_nodes();
    auto comp = connected_components(adj);
    int n_comps = count_components(adj);
    Vec x = component_reference(adj, comp, n_comps);
    Mat r = Mat::Zero(n, n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            if (comp[a] == comp[b]) r(a, b) = x[a] * x[b];
    return r;
}

ConvergenceCurve convergence_curve(const NormalizedAdjacency& adj, double keep_prob,
                                   const CurveOptions& opts, std::uint64_t seed) {
    if (!(keep_prob > 0.0 && keep_prob <= 1.0))
        throw DataError("keep probability must be in (0, 1], got " + fmt_double(keep_prob));
    if (opts.k_max < 1) throw DataError("k_max must be >= 1");
    if (opts.n_trials < 1) throw DataError("n_trials must be >= 1");
    if (opts.probe_cols < 1) throw DataError("probe_cols must be >= 1");

    int n = adj.n_nodes();
    auto comp = connected_components(adj);
    int n_comps = count_components(adj);
    Vec x = component_reference(adj, comp, n_comps);
    bool dense = n <= opts.max_dense_nodes;
    bool masked = keep_prob < 1.0;
    int trials = masked ? opts.n_trials : 1;

    // Probe state starts from a shared random block instead of the identity;
    // cosines survive the projection because the limit rows are rank one per
    // component.
    Mat probe;
    Mat ref_rows;  // per component, the projected reference direction
    if (!dense) {
        Rng prng(Rng::mix(seed, 0x50524F42ULL));
        probe.resize(n, opts.probe_cols);
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < opts.probe_cols; ++c) probe(r, c) = prng.gaussian();
        ref_rows = Mat::Zero(n_comps, opts.probe_cols);
        for (int r = 0; r < n; ++r) ref_rows.row(comp[r]) += x[r] * probe.row(r);
    }

    std::vector<std::vector<double>> mean_by_trial(trials), min_by_trial(trials);
    auto run_trial = [&](int t) {
        Rng rng(Rng::mix(seed, static_cast<std::uint64_t>(t)));
        Mat state = dense ? Mat(Mat::Identity(n, n)) : probe;
        auto& means = mean_by_trial[t];
        auto& mins = min_by_trial[t];
        means.resize(opts.k_max);
        mins.resize(opts.k_max);
        for (int k = 1; k <= opts.k_max; ++k) {
            EdgeMask mask;
            if (masked) mask = sample_mask(adj, keep_prob, rng);
            state = masked_spmm(adj, masked ? &mask : nullptr, state);
            Vec norms = state.rowwise().norm();
            double sum = 0.0, mn = 2.0;
            for (int r = 0; r < n; ++r) {
                double dot = dense ? state.row(r).transpose().dot(x)
                                   : state.row(r).dot(ref_rows.row(comp[r]));
                double denom = dense ? norms[r] : norms[r] * ref_rows.row(comp[r]).norm();
                double cos = denom > 0.0 ? dot / denom : 0.0;
                sum += cos;
                mn = std::min(mn, cos);
            }
            means[k - 1] = sum / static_cast<double>(n);
            mins[k - 1] = mn;
        }
    };

    int threads = std::max(1, std::min(opts.threads, trials));
    if (threads == 1) {
        for (int t = 0; t < trials; ++t) run_trial(t);
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < threads; ++w)
            pool.emplace_back([&, w] {
                for (int t = w; t < trials; t += threads) run_trial(t);
            });
        for (auto& th : pool) th.join();
    }

    ConvergenceCurve curve;
    curve.keep_prob = keep_prob;
    curve.n_trials = trials;
    curve.points.resize(opts.k_max);
    for (int k = 1; k <= opts.k_max; ++k) {
        double ms = 0.0, mns = 0.0;
        for (int t = 0; t < trials; ++t) {
            ms += mean_by_trial[t][k - 1];
            mns += min_by_trial[t][k - 1];
        }
        curve.points[k - 1] = {k, ms / trials, mns / trials};
    }
    return curve;
}

std::pair<double, double> rayleigh_range(const NormalizedAdjacency& adj, int n_samples, Rng& rng) {
    if (n_samples < 1) throw DataError("need at least one Rayleigh sample");
    int n = adj.n_nodes();
    double lo = 2.0, hi = -2.0;
    Vec v(n);
    for (int s = 0; s < n_samples; ++s) {
        for (int a = 0; a < n; ++a) v[a] = rng.gaussian();
        double norm = v.norm();
        if (norm == 0.0) continue;
        v /= norm;
        double q = v.dot(spmv(adj, v));
        lo = std::min(lo, q);
        hi = std::max(hi, q);
    }
    return {lo, hi};
}

SpectralSummary spectral_summary(const NormalizedAdjacency& adj, int rayleigh_samples,
                                 std::uint64_t seed) {
    SpectralSummary s;
    EigenPair pair = dominant_eigenpair(adj);
    s.lambda_max = pair.value;
    s.residual = pair.residual;
    s.n_components = count_components(adj);
    Rng rng(seed);
    auto [lo, hi] = rayleigh_range(adj, rayleigh_samples, rng);
    s.rayleigh_min = lo;
    s.rayleigh_max = hi;
    return s;
}

void write_convergence_csv(const std::string& path, const std::vector<ConvergenceCurve>& curves) {
    auto f = open_out(path);
    f << "p,k,ratio_mean,ratio_min,trials\n";
    for (const auto& c : curves)
        for (const auto& pt : c.points)
            f << fmt_double(c.keep_prob) << ',' << pt.k << ',' << fmt_double(pt.ratio_mean) << ','
              << fmt_double(pt.ratio_min) << ',' << c.n_trials << '\n';
    if (!f) throw DataError("write failed: " + path);
}

void write_spectral_csv(const std::string& path, const SpectralSummary& summary) {
    auto f = open_out(path);
    f << "lambda_max,residual,n_components,rayleigh_min,rayleigh_max\n";
    f << fmt_double(summary.lambda_max) << ',' << fmt_double(summary.residual) << ','
      << summary.n_components << ',' << fmt_double(summary.rayleigh_min) << ','
      << fmt_double(summary.rayleigh_max) << '\n';
    if (!f) throw DataError("write failed: " + path);
}

}  // namespace hiergcn
