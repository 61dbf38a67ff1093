#pragma once

// The k-head basis network: a shared trunk producing a feature vector and k
// heads each emitting one action vector, evaluated in a single pass. The
// default head is one fused linear projection of size k*action_dim that is
// reshaped to k x action_dim; a per-head mode (k separate Mlps) exists for
// ablation. The monolithic baseline shares the trunk architecture but has a
// single head and no coefficient interface.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "fenc/matrix.hpp"
#include "fenc/mlp.hpp"
#include "fenc/prng.hpp"

namespace fenc {

enum class HeadMode { fused, per_head };

const char* head_mode_name(HeadMode m);
HeadMode head_mode_from_name(const std::string& s);

struct NetConfig {
    std::size_t obs_dim = 4;
    std::vector<std::size_t> trunk_hidden = {128, 128};  // last entry is the feature dim
    std::size_t k = 16;
    std::size_t action_dim = 2;
    Activation activation = Activation::relu;
    bool residual_trunk = false;
    HeadMode head_mode = HeadMode::fused;
    std::vector<std::size_t> head_hidden = {};  // per-head mode only; empty = linear
    double head_init_gain = 0.1;  // heads start near zero

    // Fixed sinusoidal input featurization (the desk-scale stand-in for a
    // pretrained backbone's feature space): each observation coordinate u is
    // augmented with sin(j*fourier_base*u), cos(j*fourier_base*u) for
    // j = 1..fourier_features. 0 disables it. Parameter-free, so gradients
    // are unaffected.
    std::size_t fourier_features = 0;
    double fourier_base = 1.0;

    std::size_t feature_dim() const { return trunk_hidden.back(); }
    std::size_t embedded_dim() const {
        return obs_dim * (1 + 2 * fourier_features);
    }
};

// [obs, sin(j*base*obs_i), cos(j*base*obs_i) ...]; identity when
// fourier_features == 0.
std::vector<double> embed_observation(const NetConfig& cfg,
                                      std::span<const double> obs);

// alpha for one context plus provenance: which solver produced it, from how
// many samples, at what objective.
struct CoefficientVector {
    std::vector<double> values;
    std::string solver = "lae";
    double objective = 0.0;
    std::size_t n_samples = 0;

    std::size_t k() const { return values.size(); }
};

class BasisNetwork {
public:
    BasisNetwork() = default;
    static BasisNetwork create(const NetConfig& cfg, Prng& rng);

    struct Tape {
        Mlp::Tape trunk;
        std::vector<Mlp::Tape> heads;  // one entry in fused mode
    };

    struct Grads {
        MlpGrads trunk;
        std::vector<MlpGrads> heads;
        void zero();
    };

    const NetConfig& config() const { return cfg_; }
    std::size_t k() const { return cfg_.k; }
    std::size_t action_dim() const { return cfg_.action_dim; }
    std::size_t obs_dim() const { return cfg_.obs_dim; }
    std::size_t param_count() const;

    // Evaluates all k basis functions: row i of the result is g_i(obs).
    Matrix basis_eval(std::span<const double> obs, Tape* tape = nullptr) const;

    // Accumulates parameter gradients given dLoss/dB (k x action_dim).
    void backward(const Tape& tape, const Matrix& grad_basis, Grads& grads) const;

    Grads zero_grads() const;
    std::vector<std::span<double>> param_blocks();
    std::vector<std::span<const double>> param_blocks() const;

    Mlp& trunk() { return trunk_; }
    const Mlp& trunk() const { return trunk_; }
    std::vector<Mlp>& heads() { return heads_; }
    const std::vector<Mlp>& heads() const { return heads_; }

private:
    NetConfig cfg_;
    Mlp trunk_;
    std::vector<Mlp> heads_;  // size 1 in fused mode, k in per-head mode
};

std::vector<std::span<const double>> grad_blocks(const BasisNetwork::Grads& g);
std::vector<std::span<double>> grad_blocks(BasisNetwork::Grads& g);

// action = B^T alpha: the linear combination sum_i alpha_i g_i(obs).
std::vector<double> combine(const Matrix& basis, std::span<const double> alpha);

// combine(basis_eval(net, obs), alpha); constant cost per query.
std::vector<double> policy_action(const BasisNetwork& net,
                                  std::span<const double> alpha,
                                  std::span<const double> obs);

// Single-head baseline on the same trunk architecture. Deliberately has no
// coefficient or calibration surface.
class MonolithicNetwork {
public:
    MonolithicNetwork() = default;
    static MonolithicNetwork create(const NetConfig& cfg, Prng& rng);

    struct Tape {
        Mlp::Tape trunk;
        Mlp::Tape head;
    };

    struct Grads {
        MlpGrads trunk;
        MlpGrads head;
        void zero();
    };

    const NetConfig& config() const { return cfg_; }
    std::size_t param_count() const;

    std::vector<double> forward(std::span<const double> obs, Tape* tape = nullptr) const;
    void backward(const Tape& tape, std::span<const double> grad_action,
                  Grads& grads) const;

    Grads zero_grads() const;
    std::vector<std::span<double>> param_blocks();
    std::vector<std::span<const double>> param_blocks() const;

    Mlp& trunk() { return trunk_; }
    const Mlp& trunk() const { return trunk_; }
    Mlp& head() { return head_; }
    const Mlp& head() const { return head_; }

private:
    NetConfig cfg_;
    Mlp trunk_;
    Mlp head_;
};

std::vector<std::span<const double>> grad_blocks(const MonolithicNetwork::Grads& g);
std::vector<std::span<double>> grad_blocks(MonolithicNetwork::Grads& g);

}  // namespace fenc
