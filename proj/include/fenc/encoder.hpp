#pragma once

// The function-encoder training and calibration machinery: empirical L1
// loss, gradient-free coefficient calibration via the LAE solver, Gram
// regularization toward an orthonormal basis, the training loop with its
// periodic-recalibration schedule, and one-shot adaptation.
//
// Coefficients are solved from fixed-capacity calibration buffers on a
// simulated node partition: contexts are assigned round-robin (by sorted
// context id) to virtual nodes, each node calibrates its contexts, and the
// merged table is "broadcast". The result is bit-identical for any node
// count. Gradients never flow through calibration.

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "fenc/adam.hpp"
#include "fenc/basis.hpp"
#include "fenc/data.hpp"
#include "fenc/lae.hpp"

namespace fenc {

struct CalibrationBuffer {
    std::string context_id;
    std::size_t capacity = 512;
    std::vector<Sample> samples;  // at most `capacity`, from the train split
};

struct CoefficientEntry {
    std::vector<double> alpha;
    std::uint64_t calibrated_at_step = 0;
};

// Ordered by context_id so every walk over the table is deterministic.
using CoefficientTable = std::map<std::string, CoefficientEntry>;

struct TrainConfig {
    std::size_t k = 16;
    double lr = 1e-4;
    double adam_eps = 1e-8;
    std::uint64_t warmup_steps = 10;
    std::uint64_t total_steps = 5000;
    std::size_t batch_size = 64;
    std::uint64_t recalibration_period = 16;
    std::size_t buffer_capacity = 512;
    double reg_weight = 1.0;  // lambda on the Gram regularizer
    std::size_t num_virtual_nodes = 1;
    std::uint64_t seed = 1;
    std::size_t gram_probe_cap = 1024;  // probes drawn from the buffer union

    void validate() const;
};

struct StepStats {
    std::uint64_t step = 0;
    double loss_l1 = 0.0;
    double loss_reg = 0.0;
    double lr = 0.0;
};

struct TrainState {
    BasisNetwork net;
    AdamState opt;
    std::uint64_t step = 0;
    CoefficientTable coefficients;
    std::vector<CalibrationBuffer> buffers;  // sorted by context_id
    std::vector<Sample> gram_probes;         // fixed for the whole run
    std::vector<StepStats> history;
    std::vector<std::pair<std::uint64_t, CoefficientTable>> coefficient_snapshots;
    std::map<std::string, std::uint64_t> sample_draws;  // minibatch draws per context
    bool diverged = false;
    std::uint64_t diverged_at_step = 0;
};

// Mean over samples of the action-wise L1 error: (1/m) sum_j sum_i |e_ji|.
double empirical_l1(std::span<const std::vector<double>> pred,
                    std::span<const std::vector<double>> target);

// Stacks basis evaluations over the samples into G ((m * action_dim) x k)
// and the actions into y, then solves the least-absolute-error problem.
// Zero gradient computation.
CoefficientVector calibrate(const BasisNetwork& net,
                            std::span<const Sample> samples,
                            lae::PivotRule rule = lae::PivotRule::dantzig);

// K_ij = (1/m) sum_s g_i(s)^T g_j(s); symmetric PSD.
Matrix gram_matrix(const BasisNetwork& net, std::span<const Sample> probes);

// || K - I ||_F^2
double reg_loss(const Matrix& k);

// One per-context slice of a minibatch.
struct ContextBatch {
    std::string context_id;
    std::vector<Sample> samples;
};
using Minibatch = std::vector<ContextBatch>;

// Total training loss L + lambda*L_reg (data term: per-context empirical L1
// of combine(B(s), alpha_c) with alpha_c constant; reg term: ||K - I||_F^2
// over the probe set) and its analytic parameter gradients.
double train_loss_and_grads(const BasisNetwork& net, const Minibatch& batch,
                            const CoefficientTable& table,
                            std::span<const Sample> probes, double lambda,
                            BasisNetwork::Grads& grads, double* loss_l1 = nullptr,
                            double* loss_reg = nullptr);

// Same loss, forward passes only (for finite-difference verification).
double train_loss_value(const BasisNetwork& net, const Minibatch& batch,
                        const CoefficientTable& table,
                        std::span<const Sample> probes, double lambda);

// One Adam step on L + lambda * L_reg, with L the sum over contexts of the
// empirical L1 error of combine(B(s), alpha_c) and alpha_c read from the
// coefficient table as constants. Appends to history. Returns false if the
// loss or gradients are non-finite (state is flagged diverged).
bool train_step(TrainState& state, const Minibatch& batch, const TrainConfig& cfg);

// Recalibrates every context from its buffer on the simulated partition and
// merges the results into the table, stamping the current step.
void recalibrate_all(TrainState& state, std::size_t num_virtual_nodes);

// Round-robin context->node assignment over sorted context ids; node j of
// `assignment[j]` owns the listed context indices.
std::vector<std::vector<std::size_t>> node_assignments(std::size_t n_contexts,
                                                       std::size_t n_nodes);

using StepObserver = std::function<void(const TrainState&)>;

// Full training loop: fills buffers, recalibrates at step 0 and every
// recalibration_period steps, draws minibatches across contexts by mixture
// weight, and runs total_steps gradient steps.
TrainState train(const TrainConfig& cfg, const NetConfig& net_cfg,
                 std::span<const ContextDataset> datasets,
                 const StepObserver& on_step = nullptr);

// Gradient-free adaptation from a single demonstration, treated as a set of
// pairs: identical to calibrate on the trajectory's steps.
CoefficientVector adapt_one_shot(const BasisNetwork& net, const Trajectory& demo);

// Mean of the training-context coefficients; the uncalibrated fallback.
std::vector<double> mean_coefficients(const CoefficientTable& table);

// Monolithic baseline trained with the same L1 objective and schedule minus
// calibration and regularization.
struct MonoTrainState {
    MonolithicNetwork net;
    AdamState opt;
    std::uint64_t step = 0;
    std::vector<StepStats> history;
    bool diverged = false;
    std::uint64_t diverged_at_step = 0;
};

MonoTrainState train_monolithic(const TrainConfig& cfg, const NetConfig& net_cfg,
                                std::span<const ContextDataset> datasets);

}  // namespace fenc
