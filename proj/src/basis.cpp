#include "fenc/basis.hpp"

#include <cmath>
#include <stdexcept>

#include "fenc/kernels.hpp"

namespace fenc {

const char* head_mode_name(HeadMode m) {
    return m == HeadMode::fused ? "fused" : "per_head";
}

HeadMode head_mode_from_name(const std::string& s) {
    if (s == "fused") return HeadMode::fused;
    if (s == "per_head") return HeadMode::per_head;
    throw std::invalid_argument("unknown head mode: " + s);
}

void BasisNetwork::Grads::zero() {
    trunk.zero();
    for (auto& h : heads) h.zero();
}

std::vector<double> embed_observation(const NetConfig& cfg,
                                      std::span<const double> obs) {
    if (cfg.fourier_features == 0) return {obs.begin(), obs.end()};
    std::vector<double> out;
    out.reserve(cfg.embedded_dim());
    out.assign(obs.begin(), obs.end());
    for (std::size_t i = 0; i < obs.size(); ++i) {
        for (std::size_t j = 1; j <= cfg.fourier_features; ++j) {
            const double arg = cfg.fourier_base * static_cast<double>(j) * obs[i];
            out.push_back(std::sin(arg));
            out.push_back(std::cos(arg));
        }
    }
    return out;
}

namespace {

std::vector<std::size_t> trunk_dims(const NetConfig& cfg) {
    std::vector<std::size_t> dims{cfg.embedded_dim()};
    dims.insert(dims.end(), cfg.trunk_hidden.begin(), cfg.trunk_hidden.end());
    return dims;
}

}  // namespace

BasisNetwork BasisNetwork::create(const NetConfig& cfg, Prng& rng) {
    require(cfg.k >= 1 && cfg.action_dim >= 1, "BasisNetwork: k and action_dim >= 1");
    require(!cfg.trunk_hidden.empty(), "BasisNetwork: trunk needs layers");
    BasisNetwork net;
    net.cfg_ = cfg;
    // The trunk's feature output keeps the nonlinearity; heads are identity.
    net.trunk_ = Mlp::create(trunk_dims(cfg), cfg.activation, rng, 1.0,
                             cfg.residual_trunk, cfg.activation);
    if (cfg.head_mode == HeadMode::fused) {
        net.heads_.push_back(Mlp::create({cfg.feature_dim(), cfg.k * cfg.action_dim},
                                         cfg.activation, rng, cfg.head_init_gain));
    } else {
        for (std::size_t i = 0; i < cfg.k; ++i) {
            std::vector<std::size_t> dims{cfg.feature_dim()};
            dims.insert(dims.end(), cfg.head_hidden.begin(), cfg.head_hidden.end());
            dims.push_back(cfg.action_dim);
            net.heads_.push_back(
                Mlp::create(dims, cfg.activation, rng, cfg.head_init_gain));
        }
    }
    return net;
}

std::size_t BasisNetwork::param_count() const {
    std::size_t n = trunk_.param_count();
    for (const auto& h : heads_) n += h.param_count();
    return n;
}

Matrix BasisNetwork::basis_eval(std::span<const double> obs, Tape* tape) const {
    require(obs.size() == cfg_.obs_dim, "basis_eval: obs dim mismatch");
    const auto embedded = embed_observation(cfg_, obs);
    const auto feature = trunk_.forward(embedded, tape ? &tape->trunk : nullptr);

    Matrix basis(cfg_.k, cfg_.action_dim);
    if (tape) tape->heads.resize(heads_.size());
    if (cfg_.head_mode == HeadMode::fused) {
        const auto flat =
            heads_[0].forward(feature, tape ? &tape->heads[0] : nullptr);
        std::copy(flat.begin(), flat.end(), basis.flat().begin());
    } else {
        for (std::size_t i = 0; i < cfg_.k; ++i) {
            const auto row =
                heads_[i].forward(feature, tape ? &tape->heads[i] : nullptr);
            std::copy(row.begin(), row.end(), basis.row(i));
        }
    }
    return basis;
}

void BasisNetwork::backward(const Tape& tape, const Matrix& grad_basis,
                            Grads& grads) const {
    require(grad_basis.rows() == cfg_.k && grad_basis.cols() == cfg_.action_dim,
            "basis backward: grad shape mismatch");
    std::vector<double> grad_feature(cfg_.feature_dim(), 0.0);
    std::vector<double> tmp;
    if (cfg_.head_mode == HeadMode::fused) {
        heads_[0].backward(tape.heads[0], grad_basis.flat(), grads.heads[0], &tmp);
        grad_feature = tmp;
    } else {
        for (std::size_t i = 0; i < cfg_.k; ++i) {
            heads_[i].backward(tape.heads[i],
                               std::span<const double>(grad_basis.row(i), cfg_.action_dim),
                               grads.heads[i], &tmp);
            for (std::size_t j = 0; j < grad_feature.size(); ++j) {
                grad_feature[j] += tmp[j];
            }
        }
    }
    trunk_.backward(tape.trunk, grad_feature, grads.trunk);
}

BasisNetwork::Grads BasisNetwork::zero_grads() const {
    Grads g;
    g.trunk = trunk_.zero_grads();
    for (const auto& h : heads_) g.heads.push_back(h.zero_grads());
    return g;
}

std::vector<std::span<double>> BasisNetwork::param_blocks() {
    auto blocks = trunk_.param_blocks();
    for (auto& h : heads_) {
        for (auto b : h.param_blocks()) blocks.push_back(b);
    }
    return blocks;
}

std::vector<std::span<const double>> BasisNetwork::param_blocks() const {
    auto blocks = trunk_.param_blocks();
    for (const auto& h : heads_) {
        for (auto b : h.param_blocks()) blocks.push_back(b);
    }
    return blocks;
}

std::vector<std::span<const double>> grad_blocks(const BasisNetwork::Grads& g) {
    auto blocks = grad_blocks(g.trunk);
    for (const auto& h : g.heads) {
        for (auto b : grad_blocks(h)) blocks.push_back(b);
    }
    return blocks;
}

std::vector<std::span<double>> grad_blocks(BasisNetwork::Grads& g) {
    auto blocks = grad_blocks(g.trunk);
    for (auto& h : g.heads) {
        for (auto b : grad_blocks(h)) blocks.push_back(b);
    }
    return blocks;
}

std::vector<double> combine(const Matrix& basis, std::span<const double> alpha) {
    require(alpha.size() == basis.rows(), "combine: alpha length mismatch");
    std::vector<double> action(basis.cols());
    matvec_transposed(basis, alpha, action);
    return action;
}

std::vector<double> policy_action(const BasisNetwork& net,
                                  std::span<const double> alpha,
                                  std::span<const double> obs) {
    return combine(net.basis_eval(obs), alpha);
}

void MonolithicNetwork::Grads::zero() {
    trunk.zero();
    head.zero();
}

MonolithicNetwork MonolithicNetwork::create(const NetConfig& cfg, Prng& rng) {
    MonolithicNetwork net;
    net.cfg_ = cfg;
    net.trunk_ = Mlp::create(trunk_dims(cfg), cfg.activation, rng, 1.0,
                             cfg.residual_trunk, cfg.activation);
    net.head_ = Mlp::create({cfg.feature_dim(), cfg.action_dim}, cfg.activation,
                            rng, cfg.head_init_gain);
    return net;
}

std::size_t MonolithicNetwork::param_count() const {
    return trunk_.param_count() + head_.param_count();
}

std::vector<double> MonolithicNetwork::forward(std::span<const double> obs,
                                               Tape* tape) const {
    require(obs.size() == cfg_.obs_dim, "monolithic forward: obs dim mismatch");
    const auto embedded = embed_observation(cfg_, obs);
    const auto feature = trunk_.forward(embedded, tape ? &tape->trunk : nullptr);
    return head_.forward(feature, tape ? &tape->head : nullptr);
}

void MonolithicNetwork::backward(const Tape& tape,
                                 std::span<const double> grad_action,
                                 Grads& grads) const {
    std::vector<double> grad_feature;
    head_.backward(tape.head, grad_action, grads.head, &grad_feature);
    trunk_.backward(tape.trunk, grad_feature, grads.trunk);
}

MonolithicNetwork::Grads MonolithicNetwork::zero_grads() const {
    Grads g;
    g.trunk = trunk_.zero_grads();
    g.head = head_.zero_grads();
    return g;
}

std::vector<std::span<double>> MonolithicNetwork::param_blocks() {
    auto blocks = trunk_.param_blocks();
    for (auto b : head_.param_blocks()) blocks.push_back(b);
    return blocks;
}

std::vector<std::span<const double>> MonolithicNetwork::param_blocks() const {
    auto blocks = trunk_.param_blocks();
    for (auto b : head_.param_blocks()) blocks.push_back(b);
    return blocks;
}

std::vector<std::span<const double>> grad_blocks(const MonolithicNetwork::Grads& g) {
    auto blocks = grad_blocks(g.trunk);
    for (auto b : grad_blocks(g.head)) blocks.push_back(b);
    return blocks;
}

std::vector<std::span<double>> grad_blocks(MonolithicNetwork::Grads& g) {
    auto blocks = grad_blocks(g.trunk);
    for (auto b : grad_blocks(g.head)) blocks.push_back(b);
    return blocks;
}

}  // namespace fenc
