#pragma once

// File formats. Everything written here is deterministic given its inputs:
// keys are emitted in fixed order and doubles with 17 significant digits,
// which round-trips bit-exactly. Parsing uses nlohmann/json.
//
//   checkpoint.json    {"meta": {...}, "params": {...}}  (17-digit decimals)
//   <ctx>.jsonl        {"ctx":..,"traj":..,"t":..,"obs":[..],"act":[..]}
//   manifest.json      world config + context list + split
//   history.csv        step,loss_l1,loss_reg,lr
//   report.csv         context_id,split,mean_l1,n
//   alpha.json         {"context_id":..,"alpha":[..],"k":..,
//                       "solver_objective":..,"wall_ms":..}

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fenc/analysis.hpp"
#include "fenc/basis.hpp"
#include "fenc/encoder.hpp"
#include "fenc/worlds.hpp"

namespace fenc::io {

// 17 significant digits: enough to reconstruct the exact double.
std::string format_double(double v);

void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

// -- checkpoints -----------------------------------------------------------

void save_basis_checkpoint(const std::string& path, const BasisNetwork& net,
                           std::uint64_t seed);
BasisNetwork load_basis_checkpoint(const std::string& path);

void save_monolithic_checkpoint(const std::string& path,
                                const MonolithicNetwork& net, std::uint64_t seed);
MonolithicNetwork load_monolithic_checkpoint(const std::string& path);

// -- datasets ---------------------------------------------------------------

// One JSONL file per context plus manifest.json in `dir`.
void save_dataset(const std::string& dir, const worlds::GeneratedData& data);
worlds::GeneratedData load_dataset(const std::string& dir);

void save_trajectory(const std::string& path, const Trajectory& traj);
Trajectory load_trajectory(const std::string& path);

// -- run artifacts -----------------------------------------------------------

void write_history_csv(const std::string& path,
                       const std::vector<StepStats>& history);

void write_coefficients_json(
    const std::string& path,
    const std::vector<std::pair<std::uint64_t, CoefficientTable>>& snapshots);

void write_report_csv(const std::string& path, const analysis::EvalReport& report);
void write_report_json(const std::string& path, const analysis::EvalReport& report);

void write_alpha_json(const std::string& path, const CoefficientVector& coeff,
                      const std::optional<std::string>& context_id,
                      std::optional<double> wall_ms);
CoefficientVector load_alpha_json(const std::string& path,
                                  std::optional<std::string>* context_id = nullptr);

void write_projection_csv(const std::string& path,
                          const analysis::Projection2D& proj);

// -- experiment config --------------------------------------------------------

struct ExperimentConfig {
    worlds::WorldConfig world;
    NetConfig net;
    TrainConfig train;
    std::size_t calib_samples = 512;
};

ExperimentConfig load_experiment_config(const std::string& path);
void save_experiment_config(const std::string& path, const ExperimentConfig& cfg);

// -- plots (self-contained SVG, no dependencies) ------------------------------

struct SvgSeries {
    std::string label;
    std::vector<std::pair<double, double>> points;
};

std::string svg_scatter(const std::vector<SvgSeries>& series, const std::string& title);
std::string svg_lines(const std::vector<SvgSeries>& series, const std::string& title);

}  // namespace fenc::io
