#include "fenc/mlp.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "fenc/instrumentation.hpp"
#include "fenc/kernels.hpp"

namespace fenc {

const char* activation_name(Activation a) {
    switch (a) {
        case Activation::relu: return "relu";
        case Activation::tanh: return "tanh";
        case Activation::identity: return "identity";
    }
    return "identity";
}

Activation activation_from_name(const std::string& s) {
    if (s == "relu") return Activation::relu;
    if (s == "tanh") return Activation::tanh;
    if (s == "identity") return Activation::identity;
    throw std::invalid_argument("unknown activation: " + s);
}

void MlpGrads::zero() {
    for (auto& m : w) std::fill(m.flat().begin(), m.flat().end(), 0.0);
    for (auto& v : b) std::fill(v.begin(), v.end(), 0.0);
}

Mlp Mlp::create(const std::vector<std::size_t>& dims, Activation hidden,
                Prng& rng, double gain, bool residual_hidden,
                Activation final_act) {
    require(dims.size() >= 2, "Mlp: need at least input and output dims");
    Mlp net;
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
        Layer layer;
        layer.w = Matrix(dims[l + 1], dims[l]);
        layer.b.assign(dims[l + 1], 0.0);
        const bool last = (l + 2 == dims.size());
        layer.act = last ? final_act : hidden;
        layer.residual = residual_hidden && !last && dims[l] == dims[l + 1];
        const double bound = gain * std::sqrt(6.0 / static_cast<double>(dims[l]));
        for (double& v : layer.w.flat()) v = rng.uniform(-bound, bound);
        net.layers_.push_back(std::move(layer));
    }
    return net;
}

std::size_t Mlp::param_count() const {
    std::size_t n = 0;
    for (const auto& l : layers_) n += l.w.size() + l.b.size();
    return n;
}

namespace {

inline double activate(Activation a, double z) {
    switch (a) {
        case Activation::relu: return z > 0.0 ? z : 0.0;
        case Activation::tanh: return std::tanh(z);
        case Activation::identity: return z;
    }
    return z;
}

// Derivative in terms of the pre-activation z. relu'(0) := 0.
inline double activate_deriv(Activation a, double z) {
    switch (a) {
        case Activation::relu: return z > 0.0 ? 1.0 : 0.0;
        case Activation::tanh: {
            const double t = std::tanh(z);
            return 1.0 - t * t;
        }
        case Activation::identity: return 1.0;
    }
    return 1.0;
}

}  // namespace

std::vector<double> Mlp::forward(std::span<const double> x, Tape* tape) const {
    require(!layers_.empty(), "Mlp: empty network");
    require(x.size() == in_dim(), "mlp_forward: input dim mismatch");

    std::vector<double> h(x.begin(), x.end());
    if (tape) {
        tape->inputs.clear();
        tape->preacts.clear();
    }
    for (const auto& layer : layers_) {
        std::vector<double> z(layer.out_dim());
        matvec(layer.w, h, z);
        for (std::size_t i = 0; i < z.size(); ++i) z[i] += layer.b[i];
        std::vector<double> out(z.size());
        for (std::size_t i = 0; i < z.size(); ++i) out[i] = activate(layer.act, z[i]);
        if (layer.residual) {
            for (std::size_t i = 0; i < out.size(); ++i) out[i] += h[i];
        }
        if (tape) {
            tape->inputs.push_back(std::move(h));
            tape->preacts.push_back(std::move(z));
        }
        h = std::move(out);
    }
    if (tape) tape->output = h;
    return h;
}

void Mlp::backward(const Tape& tape, std::span<const double> grad_out,
                   MlpGrads& grads, std::vector<double>* grad_in) const {
    require(tape.inputs.size() == layers_.size(), "mlp_backward: tape mismatch");
    require(grad_out.size() == out_dim(), "mlp_backward: grad_out dim mismatch");
    require(grads.w.size() == layers_.size(), "mlp_backward: grads shape mismatch");
    instrumentation::count_backward_pass();

    std::vector<double> g(grad_out.begin(), grad_out.end());
    for (std::size_t l = layers_.size(); l-- > 0;) {
        const Layer& layer = layers_[l];
        const auto& z = tape.preacts[l];
        const auto& in = tape.inputs[l];
        std::vector<double> dz(z.size());
        for (std::size_t i = 0; i < z.size(); ++i) {
            dz[i] = g[i] * activate_deriv(layer.act, z[i]);
        }
        add_outer(grads.w[l], dz, in);
        for (std::size_t i = 0; i < dz.size(); ++i) grads.b[l][i] += dz[i];

        std::vector<double> gprev(layer.in_dim());
        matvec_transposed(layer.w, dz, gprev);
        if (layer.residual) {
            for (std::size_t i = 0; i < gprev.size(); ++i) gprev[i] += g[i];
        }
        g = std::move(gprev);
    }
    if (grad_in) *grad_in = std::move(g);
}

MlpGrads Mlp::zero_grads() const {
    MlpGrads g;
    for (const auto& l : layers_) {
        g.w.emplace_back(l.out_dim(), l.in_dim());
        g.b.emplace_back(l.out_dim(), 0.0);
    }
    return g;
}

std::vector<std::span<double>> Mlp::param_blocks() {
    std::vector<std::span<double>> blocks;
    for (auto& l : layers_) {
        blocks.push_back(l.w.flat());
        blocks.push_back(l.b);
    }
    return blocks;
}

std::vector<std::span<const double>> Mlp::param_blocks() const {
    std::vector<std::span<const double>> blocks;
    for (const auto& l : layers_) {
        blocks.push_back(l.w.flat());
        blocks.push_back(l.b);
    }
    return blocks;
}

std::vector<std::span<const double>> grad_blocks(const MlpGrads& g) {
    std::vector<std::span<const double>> blocks;
    for (std::size_t i = 0; i < g.w.size(); ++i) {
        blocks.push_back(g.w[i].flat());
        blocks.push_back(g.b[i]);
    }
    return blocks;
}

std::vector<std::span<double>> grad_blocks(MlpGrads& g) {
    std::vector<std::span<double>> blocks;
    for (std::size_t i = 0; i < g.w.size(); ++i) {
        blocks.push_back(g.w[i].flat());
        blocks.push_back(g.b[i]);
    }
    return blocks;
}

}  // namespace fenc
