#include "fenc/encoder.hpp"

#include <algorithm>
#include <cmath>
#include <utility>
#include <stdexcept>

#include "fenc/kernels.hpp"
#include "fenc/prng.hpp"

namespace fenc {

void TrainConfig::validate() const {
    require(k >= 1, "TrainConfig: k >= 1");
    require(total_steps >= 1, "TrainConfig: total_steps >= 1");
    require(batch_size >= 1, "TrainConfig: batch_size >= 1");
    require(recalibration_period >= 1, "TrainConfig: recalibration_period >= 1");
    require(buffer_capacity >= 1, "TrainConfig: buffer_capacity >= 1");
    require(num_virtual_nodes >= 1, "TrainConfig: num_virtual_nodes >= 1");
    require(reg_weight >= 0.0, "TrainConfig: reg_weight >= 0");
    require(lr > 0.0, "TrainConfig: lr > 0");
}

double empirical_l1(std::span<const std::vector<double>> pred,
                    std::span<const std::vector<double>> target) {
    require(pred.size() == target.size(), "empirical_l1: count mismatch");
    require(!pred.empty(), "empirical_l1: empty input");
    double total = 0.0;
    for (std::size_t j = 0; j < pred.size(); ++j) {
        require(pred[j].size() == target[j].size(), "empirical_l1: dim mismatch");
        total += kernels::sum_abs_diff(pred[j].data(), target[j].data(),
                                       pred[j].size());
    }
    return total / static_cast<double>(pred.size());
}

CoefficientVector calibrate(const BasisNetwork& net,
                            std::span<const Sample> samples,
                            lae::PivotRule rule) {
    require(!samples.empty(), "calibrate: need at least one sample");
    const std::size_t k = net.k();
    const std::size_t da = net.action_dim();

    lae::RegressionProblem p;
    p.g = Matrix(samples.size() * da, k);
    p.y.resize(samples.size() * da);
    for (std::size_t j = 0; j < samples.size(); ++j) {
        require(samples[j].act.size() == da, "calibrate: action dim mismatch");
        const Matrix basis = net.basis_eval(samples[j].obs);
        for (std::size_t d = 0; d < da; ++d) {
            const std::size_t row = j * da + d;
            for (std::size_t i = 0; i < k; ++i) p.g(row, i) = basis(i, d);
            p.y[row] = samples[j].act[d];
        }
    }

    const auto sol = lae::solve_lae(p, rule);
    CoefficientVector out;
    out.values = sol.alpha;
    out.solver = "lae";
    out.objective = sol.objective;
    out.n_samples = samples.size();
    return out;
}

Matrix gram_matrix(const BasisNetwork& net, std::span<const Sample> probes) {
    require(!probes.empty(), "gram_matrix: need at least one probe");
    const std::size_t k = net.k();
    Matrix gram(k, k);
    for (const auto& s : probes) {
        const Matrix basis = net.basis_eval(s.obs);
        for (std::size_t i = 0; i < k; ++i) {
            for (std::size_t j = i; j < k; ++j) {
                gram(i, j) += kernels::dot(basis.row(i), basis.row(j),
                                           net.action_dim());
            }
        }
    }
    const double inv = 1.0 / static_cast<double>(probes.size());
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = i; j < k; ++j) {
            gram(i, j) *= inv;
            gram(j, i) = gram(i, j);
        }
    }
    return gram;
}

double reg_loss(const Matrix& k) {
    require(k.rows() == k.cols(), "reg_loss: square matrix required");
    double total = 0.0;
    for (std::size_t i = 0; i < k.rows(); ++i) {
        for (std::size_t j = 0; j < k.cols(); ++j) {
            const double e = k(i, j) - (i == j ? 1.0 : 0.0);
            total += e * e;
        }
    }
    return total;
}

namespace {

inline double sign_of(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

// Data term: accumulates gradients of sum_c mean_j sum_d |pred - act| and
// returns the loss value.
double accumulate_data_term(const BasisNetwork& net, const Minibatch& batch,
                            const CoefficientTable& table,
                            BasisNetwork::Grads& grads) {
    const std::size_t k = net.k();
    const std::size_t da = net.action_dim();
    double total = 0.0;
    BasisNetwork::Tape tape;
    Matrix grad_basis(k, da);
    for (const auto& cb : batch) {
        const auto it = table.find(cb.context_id);
        require(it != table.end(), "train_step: missing coefficients for context");
        const auto& alpha = it->second.alpha;
        require(alpha.size() == k, "train_step: coefficient length mismatch");
        require(!cb.samples.empty(), "train_step: empty context batch");
        const double inv_m = 1.0 / static_cast<double>(cb.samples.size());
        double ctx_l1 = 0.0;
        for (const auto& s : cb.samples) {
            const Matrix basis = net.basis_eval(s.obs, &tape);
            const auto pred = combine(basis, alpha);
            for (std::size_t d = 0; d < da; ++d) {
                const double r = pred[d] - s.act[d];
                ctx_l1 += std::fabs(r);
                const double g = sign_of(r) * inv_m;
                for (std::size_t i = 0; i < k; ++i) grad_basis(i, d) = alpha[i] * g;
            }
            net.backward(tape, grad_basis, grads);
        }
        total += ctx_l1 * inv_m;
    }
    return total;
}

// Gram term: L_reg = ||K - I||_F^2 with K averaged over the probe set.
// dL_reg/dB_s = (4/M) (K - I) B_s.
double accumulate_reg_term(const BasisNetwork& net,
                           std::span<const Sample> probes, double lambda,
                           BasisNetwork::Grads& grads) {
    const std::size_t k = net.k();
    const std::size_t da = net.action_dim();
    const std::size_t m = probes.size();

    std::vector<Matrix> basis_evals;
    std::vector<BasisNetwork::Tape> tapes(m);
    basis_evals.reserve(m);
    Matrix gram(k, k);
    for (std::size_t s = 0; s < m; ++s) {
        basis_evals.push_back(net.basis_eval(probes[s].obs, &tapes[s]));
        const Matrix& b = basis_evals.back();
        for (std::size_t i = 0; i < k; ++i) {
            for (std::size_t j = i; j < k; ++j) {
                gram(i, j) += kernels::dot(b.row(i), b.row(j), da);
            }
        }
    }
    const double inv_m = 1.0 / static_cast<double>(m);
    double value = 0.0;
    Matrix err(k, k);
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = i; j < k; ++j) {
            const double kij = gram(i, j) * inv_m;
            const double e = kij - (i == j ? 1.0 : 0.0);
            err(i, j) = e;
            err(j, i) = e;
            value += (i == j) ? e * e : 2.0 * e * e;
        }
    }

    const double coeff = 4.0 * lambda * inv_m;
    Matrix grad_basis(k, da);
    for (std::size_t s = 0; s < m; ++s) {
        const Matrix& b = basis_evals[s];
        for (std::size_t i = 0; i < k; ++i) {
            for (std::size_t d = 0; d < da; ++d) {
                double acc = 0.0;
                for (std::size_t j = 0; j < k; ++j) acc += err(i, j) * b(j, d);
                grad_basis(i, d) = coeff * acc;
            }
        }
        net.backward(tapes[s], grad_basis, grads);
    }
    return value;
}

}  // namespace

double train_loss_and_grads(const BasisNetwork& net, const Minibatch& batch,
                            const CoefficientTable& table,
                            std::span<const Sample> probes, double lambda,
                            BasisNetwork::Grads& grads, double* loss_l1,
                            double* loss_reg) {
    const double data = accumulate_data_term(net, batch, table, grads);
    double reg = 0.0;
    if (lambda > 0.0 && !probes.empty()) {
        reg = accumulate_reg_term(net, probes, lambda, grads);
    }
    if (loss_l1) *loss_l1 = data;
    if (loss_reg) *loss_reg = reg;
    return data + lambda * reg;
}

double train_loss_value(const BasisNetwork& net, const Minibatch& batch,
                        const CoefficientTable& table,
                        std::span<const Sample> probes, double lambda) {
    const std::size_t da = net.action_dim();
    double total = 0.0;
    for (const auto& cb : batch) {
        const auto& alpha = table.at(cb.context_id).alpha;
        double ctx_l1 = 0.0;
        for (const auto& s : cb.samples) {
            const auto pred = combine(net.basis_eval(s.obs), alpha);
            for (std::size_t d = 0; d < da; ++d) {
                ctx_l1 += std::fabs(pred[d] - s.act[d]);
            }
        }
        total += ctx_l1 / static_cast<double>(cb.samples.size());
    }
    if (lambda > 0.0 && !probes.empty()) {
        total += lambda * reg_loss(gram_matrix(net, probes));
    }
    return total;
}

bool train_step(TrainState& state, const Minibatch& batch, const TrainConfig& cfg) {
    auto grads = state.net.zero_grads();
    double loss_l1 = 0.0;
    double loss_reg = 0.0;
    const double total =
        train_loss_and_grads(state.net, batch, state.coefficients,
                             state.gram_probes, cfg.reg_weight, grads,
                             &loss_l1, &loss_reg);

    const double lr_now = adam_effective_lr(state.opt, cfg.warmup_steps);
    if (!std::isfinite(total)) {
        state.diverged = true;
        state.diverged_at_step = state.step;
        return false;
    }

    auto params = state.net.param_blocks();
    auto gblocks = grad_blocks(std::as_const(grads));
    if (!adam_step(params, gblocks, state.opt, cfg.warmup_steps)) {
        state.diverged = true;
        state.diverged_at_step = state.step;
        return false;
    }

    state.history.push_back({state.step, loss_l1, loss_reg, lr_now});
    state.step += 1;
    return true;
}

std::vector<std::vector<std::size_t>> node_assignments(std::size_t n_contexts,
                                                       std::size_t n_nodes) {
    require(n_nodes >= 1, "node_assignments: n_nodes >= 1");
    std::vector<std::vector<std::size_t>> nodes(n_nodes);
    for (std::size_t i = 0; i < n_contexts; ++i) {
        nodes[i % n_nodes].push_back(i);
    }
    return nodes;
}

void recalibrate_all(TrainState& state, std::size_t num_virtual_nodes) {
    const auto assignment = node_assignments(state.buffers.size(), num_virtual_nodes);
    std::vector<std::pair<std::string, CoefficientEntry>> results;
    results.reserve(state.buffers.size());
    // Each virtual node calibrates the contexts it hosts; per-context solves
    // are independent, so the merged table does not depend on the partition.
    for (const auto& node : assignment) {
        for (std::size_t idx : node) {
            const auto& buf = state.buffers[idx];
            require(!buf.samples.empty(), "recalibrate_all: empty buffer");
            auto coeff = calibrate(state.net, buf.samples);
            results.emplace_back(
                buf.context_id,
                CoefficientEntry{std::move(coeff.values), state.step});
        }
    }
    // Broadcast: merge into one table, deterministic by sorted context id.
    for (auto& [id, entry] : results) {
        state.coefficients[id] = std::move(entry);
    }
}

namespace {

std::vector<const ContextDataset*> sorted_views(
    std::span<const ContextDataset> datasets) {
    std::vector<const ContextDataset*> views;
    views.reserve(datasets.size());
    for (const auto& d : datasets) views.push_back(&d);
    std::sort(views.begin(), views.end(),
              [](const auto* a, const auto* b) { return a->context_id < b->context_id; });
    return views;
}

}  // namespace

TrainState train(const TrainConfig& cfg, const NetConfig& net_cfg,
                 std::span<const ContextDataset> datasets,
                 const StepObserver& on_step) {
    cfg.validate();
    require(!datasets.empty(), "train: need at least one dataset");
    const auto views = sorted_views(datasets);
    for (const auto* d : views) {
        require(!d->samples.empty(), "train: dataset has no samples");
        require(d->mixture_weight >= 0.0, "train: negative mixture weight");
    }

    double weight_sum = 0.0;
    for (const auto* d : views) weight_sum += d->mixture_weight;
    require(weight_sum > 0.0, "train: mixture weights sum to zero");
    std::vector<double> cumulative;
    double acc = 0.0;
    for (const auto* d : views) {
        acc += d->mixture_weight / weight_sum;
        cumulative.push_back(acc);
    }
    cumulative.back() = 1.0;

    Prng master(cfg.seed);
    Prng init_rng = master.derive(0);

    TrainState state;
    NetConfig net_cfg_k = net_cfg;
    net_cfg_k.k = cfg.k;
    state.net = BasisNetwork::create(net_cfg_k, init_rng);
    {
        auto params = state.net.param_blocks();
        state.opt = AdamState::create(params, cfg.lr);
        state.opt.eps = cfg.adam_eps;
    }

    // Calibration buffers: the first `capacity` samples of each context's
    // train split under a per-context seeded shuffle.
    for (std::size_t i = 0; i < views.size(); ++i) {
        Prng shuffle_rng = master.derive(1000 + i);
        std::vector<std::size_t> idx(views[i]->samples.size());
        for (std::size_t j = 0; j < idx.size(); ++j) idx[j] = j;
        shuffle_rng.shuffle(idx);
        CalibrationBuffer buf;
        buf.context_id = views[i]->context_id;
        buf.capacity = cfg.buffer_capacity;
        const std::size_t take = std::min(cfg.buffer_capacity, idx.size());
        for (std::size_t j = 0; j < take; ++j) {
            buf.samples.push_back(views[i]->samples[idx[j]]);
        }
        state.buffers.push_back(std::move(buf));
    }

    // Fixed Gram probe set: a seeded subsample of the buffer union.
    {
        std::vector<const Sample*> pool;
        for (const auto& buf : state.buffers) {
            for (const auto& s : buf.samples) pool.push_back(&s);
        }
        Prng probe_rng = master.derive(2);
        std::vector<std::size_t> idx(pool.size());
        for (std::size_t j = 0; j < idx.size(); ++j) idx[j] = j;
        probe_rng.shuffle(idx);
        const std::size_t take = std::min(cfg.gram_probe_cap, idx.size());
        for (std::size_t j = 0; j < take; ++j) {
            state.gram_probes.push_back(*pool[idx[j]]);
        }
    }

    Prng sample_rng = master.derive(3);
    for (std::uint64_t t = 0; t < cfg.total_steps; ++t) {
        if (t % cfg.recalibration_period == 0) {
            recalibrate_all(state, cfg.num_virtual_nodes);
            state.coefficient_snapshots.emplace_back(t, state.coefficients);
        }

        // Contexts drawn with replacement by mixture weight, then samples
        // uniformly within the chosen context.
        std::map<std::string, std::vector<Sample>> grouped;
        for (std::size_t b = 0; b < cfg.batch_size; ++b) {
            const double u = sample_rng.uniform();
            std::size_t ci = 0;
            while (ci + 1 < cumulative.size() && u >= cumulative[ci]) ++ci;
            const auto* ds = views[ci];
            const std::size_t j = static_cast<std::size_t>(
                sample_rng.below(ds->samples.size()));
            grouped[ds->context_id].push_back(ds->samples[j]);
            state.sample_draws[ds->context_id] += 1;
        }
        Minibatch batch;
        for (auto& [id, samples] : grouped) {
            batch.push_back({id, std::move(samples)});
        }

        if (!train_step(state, batch, cfg)) break;
        if (on_step) on_step(state);
    }
    return state;
}

CoefficientVector adapt_one_shot(const BasisNetwork& net, const Trajectory& demo) {
    require(!demo.steps.empty(), "adapt_one_shot: empty demonstration");
    return calibrate(net, demo.steps);
}

std::vector<double> mean_coefficients(const CoefficientTable& table) {
    require(!table.empty(), "mean_coefficients: empty table");
    std::vector<double> mean(table.begin()->second.alpha.size(), 0.0);
    for (const auto& [id, entry] : table) {
        require(entry.alpha.size() == mean.size(), "mean_coefficients: k mismatch");
        for (std::size_t i = 0; i < mean.size(); ++i) mean[i] += entry.alpha[i];
    }
    const double inv = 1.0 / static_cast<double>(table.size());
    for (auto& v : mean) v *= inv;
    return mean;
}

MonoTrainState train_monolithic(const TrainConfig& cfg, const NetConfig& net_cfg,
                                std::span<const ContextDataset> datasets) {
    cfg.validate();
    require(!datasets.empty(), "train_monolithic: need at least one dataset");
    const auto views = sorted_views(datasets);

    double weight_sum = 0.0;
    for (const auto* d : views) weight_sum += d->mixture_weight;
    std::vector<double> cumulative;
    double acc = 0.0;
    for (const auto* d : views) {
        acc += d->mixture_weight / weight_sum;
        cumulative.push_back(acc);
    }
    cumulative.back() = 1.0;

    Prng master(cfg.seed);
    Prng init_rng = master.derive(0);

    MonoTrainState state;
    state.net = MonolithicNetwork::create(net_cfg, init_rng);
    {
        auto params = state.net.param_blocks();
        state.opt = AdamState::create(params, cfg.lr);
        state.opt.eps = cfg.adam_eps;
    }

    const std::size_t da = net_cfg.action_dim;
    Prng sample_rng = master.derive(3);
    MonolithicNetwork::Tape tape;
    std::vector<double> grad_action(da);
    for (std::uint64_t t = 0; t < cfg.total_steps; ++t) {
        std::map<std::string, std::vector<const Sample*>> grouped;
        for (std::size_t b = 0; b < cfg.batch_size; ++b) {
            const double u = sample_rng.uniform();
            std::size_t ci = 0;
            while (ci + 1 < cumulative.size() && u >= cumulative[ci]) ++ci;
            const auto* ds = views[ci];
            const std::size_t j = static_cast<std::size_t>(
                sample_rng.below(ds->samples.size()));
            grouped[ds->context_id].push_back(&ds->samples[j]);
        }

        auto grads = state.net.zero_grads();
        double loss = 0.0;
        for (const auto& [id, samples] : grouped) {
            const double inv_m = 1.0 / static_cast<double>(samples.size());
            double ctx_l1 = 0.0;
            for (const auto* s : samples) {
                const auto pred = state.net.forward(s->obs, &tape);
                for (std::size_t d = 0; d < da; ++d) {
                    const double r = pred[d] - s->act[d];
                    ctx_l1 += std::fabs(r);
                    grad_action[d] = sign_of(r) * inv_m;
                }
                state.net.backward(tape, grad_action, grads);
            }
            loss += ctx_l1 * inv_m;
        }

        const double lr_now = adam_effective_lr(state.opt, cfg.warmup_steps);
        if (!std::isfinite(loss)) {
            state.diverged = true;
            state.diverged_at_step = t;
            break;
        }
        auto params = state.net.param_blocks();
        auto gblocks = grad_blocks(std::as_const(grads));
        if (!adam_step(params, gblocks, state.opt, cfg.warmup_steps)) {
            state.diverged = true;
            state.diverged_at_step = t;
            break;
        }
        state.history.push_back({t, loss, 0.0, lr_now});
        state.step = t + 1;
    }
    return state;
}

}  // namespace fenc
