#include "hiergcn/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "hiergcn/format.hpp"
#include "hiergcn/rng.hpp"

namespace hiergcn {

namespace {

Mat xavier_uniform(index_t rows, index_t cols, Rng& rng) {
    double a = std::sqrt(6.0 / static_cast<double>(rows + cols));
    Mat m(rows, cols);
    for (index_t r = 0; r < rows; ++r)
        for (index_t c = 0; c < cols; ++c) m(r, c) = rng.uniform(-a, a);
    return m;
}

void write_matrix(std::ostream& out, const Mat& m) {
    for (index_t r = 0; r < m.rows(); ++r) {
        for (index_t c = 0; c < m.cols(); ++c) {
            if (c) out << ' ';
            out << fmt_double17(m(r, c));
        }
        out << '\n';
    }
}

void read_matrix(std::istream& in, Mat& m, const std::string& what) {
    for (index_t r = 0; r < m.rows(); ++r)
        for (index_t c = 0; c < m.cols(); ++c)
            if (!(in >> m(r, c)))
                throw DataError("checkpoint truncated or non-numeric while reading " + what);
}

}  // namespace

ModelParams init_params(int num_users, int num_items, int dim, int layers, std::uint64_t seed) {
    if (num_users <= 0 || num_items <= 0) throw DataError("init_params: empty node set");
    if (dim < 1) throw DataError("embedding dim must be >= 1");
    if (layers < 0) throw DataError("layer count must be >= 0");
    ModelParams p;
    p.num_users = num_users;
    p.num_items = num_items;
    p.dim = dim;
    p.layers = layers;
    Rng rng(seed);
    p.embeddings = xavier_uniform(num_users + num_items, dim, rng);
    p.transforms.reserve(layers);
    for (int k = 0; k < layers; ++k) p.transforms.push_back(xavier_uniform(dim, dim, rng));
    return p;
}

ForwardResult forward(const ModelParams& params, const NormalizedAdjacency& adj,
                      const std::vector<EdgeMask>* masks) {
    int n = params.num_users + params.num_items;
    if (adj.n_nodes() != n)
        throw DataError("model covers " + std::to_string(n) + " nodes but graph has " +
                        std::to_string(adj.n_nodes()));
    if (params.embeddings.rows() != n || params.embeddings.cols() != params.dim)
        throw DataError("embedding table shape mismatch");
    int K = params.layers;
    if (static_cast<int>(params.transforms.size()) != K)
        throw DataError("expected " + std::to_string(K) + " transforms, have " +
                        std::to_string(params.transforms.size()));
    if (masks && static_cast<int>(masks->size()) != K)
        throw DataError("expected " + std::to_string(K) + " layer masks, got " +
                        std::to_string(masks->size()));

    ForwardResult fr;
    fr.trace.adj = &adj;
    fr.trace.pre.reserve(K + 1);
    fr.trace.pre.push_back(params.embeddings);
    if (masks) fr.trace.masks = *masks;
    for (int k = 1; k <= K; ++k) {
        const EdgeMask* mk = masks ? &(*masks)[k - 1] : nullptr;
        fr.trace.pre.push_back(masked_spmm(adj, mk, fr.trace.pre[k - 1]));
    }

    auto& rep = fr.rep;
    rep.num_users = params.num_users;
    rep.num_items = params.num_items;
    rep.dim = params.dim;
    rep.layers = K;
    rep.out.resize(n, (K + 1) * params.dim);
    rep.out.block(0, 0, n, params.dim) = fr.trace.pre[0];
    for (int k = 1; k <= K; ++k)
        rep.out.block(0, k * params.dim, n, params.dim) =
            fr.trace.pre[k] * params.transforms[k - 1];
    return fr;
}

double score(const NodeRepresentation& rep, int user, int item) {
    if (user < 0 || user >= rep.num_users)
        throw DataError("user id " + std::to_string(user) + " out of range");
    if (item < 0 || item >= rep.num_items)
        throw DataError("item id " + std::to_string(item) + " out of range");
    return rep.out.row(user).dot(rep.out.row(rep.item_row(item)));
}

std::vector<double> score_all_items(const NodeRepresentation& rep, int user,
                                    const std::vector<int>& exclude_sorted) {
    if (user < 0 || user >= rep.num_users)
        throw DataError("user id " + std::to_string(user) + " out of range");
    Eigen::VectorXd s =
        rep.out.bottomRows(rep.num_items) * rep.out.row(user).transpose();
    std::vector<double> out(s.data(), s.data() + s.size());
    for (int i : exclude_sorted) out[i] = -std::numeric_limits<double>::infinity();
    return out;
}

Gradients backward(const ForwardTrace& trace, const ModelParams& params, const Mat& grad_out) {
    if (!trace.adj) throw DataError("backward: trace has no graph");
    const auto& adj = *trace.adj;
    int n = adj.n_nodes();
    int K = params.layers;
    int d = params.dim;
    if (static_cast<int>(trace.pre.size()) != K + 1)
        throw DataError("backward: trace depth mismatch");
    if (grad_out.rows() != n || grad_out.cols() != (K + 1) * d)
        throw DataError("backward: grad_out shape mismatch");
    bool masked = !trace.masks.empty();
    if (masked && static_cast<int>(trace.masks.size()) != K)
        throw DataError("backward: trace mask count mismatch");

    Gradients g;
    g.d_transforms.resize(K);
    for (int k = 1; k <= K; ++k)
        g.d_transforms[k - 1] = trace.pre[k].transpose() * grad_out.block(0, k * d, n, d);

    if (K == 0) {
        g.d_embeddings = grad_out;
        return g;
    }
    // D_k = dL/dZ^(k); peel layers from the top.
    Mat D = grad_out.block(0, K * d, n, d) * params.transforms[K - 1].transpose();
    for (int k = K; k >= 1; --k) {
        const EdgeMask* mk = masked ? &trace.masks[k - 1] : nullptr;
        Mat lower = masked_spmm_transpose(adj, mk, D);
        if (k - 1 >= 1)
            lower.noalias() += grad_out.block(0, (k - 1) * d, n, d) *
                               params.transforms[k - 2].transpose();
        else
            lower += grad_out.block(0, 0, n, d);
        D = std::move(lower);
    }
    g.d_embeddings = std::move(D);
    return g;
}

void save_checkpoint(const std::string& path, const ModelParams& params) {
    auto f = open_out(path);
    f << "hiergcn-v1 " << params.num_users << ' ' << params.num_items << ' ' << params.dim << ' '
      << params.layers << '\n';
    write_matrix(f, params.embeddings);
    for (const auto& w : params.transforms) write_matrix(f, w);
    if (!f) throw DataError("write failed: " + path);
}

ModelParams load_checkpoint(const std::string& path) {
    auto f = open_in(path);
    std::string magic;
    ModelParams p;
    if (!(f >> magic >> p.num_users >> p.num_items >> p.dim >> p.layers))
        throw DataError("checkpoint header unreadable: " + path);
    if (magic != "hiergcn-v1")
        throw DataError("not a hiergcn-v1 checkpoint: " + path);
    if (p.num_users <= 0 || p.num_items <= 0 || p.dim < 1 || p.layers < 0)
        throw DataError("checkpoint header has invalid dimensions: " + path);
    p.embeddings.resize(p.num_users + p.num_items, p.dim);
    read_matrix(f, p.embeddings, "embeddings");
    p.transforms.resize(p.layers);
    for (int k = 0; k < p.layers; ++k) {
        p.transforms[k].resize(p.dim, p.dim);
        read_matrix(f, p.transforms[k], "transform " + std::to_string(k + 1));
    }
    double extra;
    if (f >> extra) throw DataError("checkpoint has trailing data: " + path);
    return p;
}

}  // namespace hiergcn
