#pragma once

// Plain feed-forward network with analytic backward pass. Layers are dense
// (out x in) with relu/tanh/identity activations; a layer may carry a skip
// connection (output += input) when its dims match, which gives the residual
// trunk flavor.

#include <cstddef>
#include <span>
#include <vector>

#include "fenc/matrix.hpp"
#include "fenc/prng.hpp"

namespace fenc {

enum class Activation { relu, tanh, identity };

const char* activation_name(Activation a);
Activation activation_from_name(const std::string& s);

struct Layer {
    Matrix w;               // out x in
    std::vector<double> b;  // out
    Activation act = Activation::identity;
    bool residual = false;  // h_out = act(Wx+b) + x, requires in == out

    std::size_t in_dim() const { return w.cols(); }
    std::size_t out_dim() const { return w.rows(); }
};

struct MlpGrads {
    std::vector<Matrix> w;
    std::vector<std::vector<double>> b;

    void zero();
};

class Mlp {
public:
    Mlp() = default;

    // dims = [in, h1, ..., out]; hidden layers use `hidden`, the final layer
    // uses `final_act` (identity unless the net is a trunk whose feature
    // output should stay activated). Weights are Kaiming-uniform fan-in
    // scaled by `gain`, biases zero. `residual_hidden` adds skips on hidden
    // layers with equal in/out dims.
    static Mlp create(const std::vector<std::size_t>& dims, Activation hidden,
                      Prng& rng, double gain = 1.0, bool residual_hidden = false,
                      Activation final_act = Activation::identity);

    struct Tape {
        std::vector<std::vector<double>> inputs;// input to each layer
        std::vector<std::vector<double>> preacts; // Wx+b per layer
        std::vector<double> output;
    };

    std::size_t in_dim() const { return layers_.front().in_dim(); }
    std::size_t out_dim() const { return layers_.back().out_dim(); }
    std::size_t param_count() const;

    std::vector<Layer>& layers() { return layers_; }
    const std::vector<Layer>& layers() const { return layers_; }

    std::vector<double> forward(std::span<const double> x, Tape* tape = nullptr) const;

    // Accumulates parameter gradients of (loss composed with this net) into
    // `grads` given dLoss/dOutput, and returns dLoss/dInput via `grad_in`.
    void backward(const Tape& tape, std::span<const double> grad_out,
                  MlpGrads& grads, std::vector<double>* grad_in = nullptr) const;

    MlpGrads zero_grads() const;

    // Parameter blocks in a fixed order (w0, b0, w1, b1, ...); used by the
    // optimizer and the checkpoint writer.
    std::vector<std::span<double>> param_blocks();
    std::vector<std::span<const double>> param_blocks() const;

private:
    std::vector<Layer> layers_;
};

std::vector<std::span<const double>> grad_blocks(const MlpGrads& g);
std::vector<std::span<double>> grad_blocks(MlpGrads& g);

}  // namespace fenc
