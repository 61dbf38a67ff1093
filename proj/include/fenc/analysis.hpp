#pragma once

// Coefficient-space analysis and per-context evaluation: PCA of calibrated
// coefficient vectors, intra/inter family clustering distances, and L1
// error tables over disjoint calibration/evaluation splits.

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "fenc/basis.hpp"
#include "fenc/data.hpp"
#include "fenc/matrix.hpp"
#include "fenc/worlds.hpp"

namespace fenc::analysis {

struct ProjectedPoint {
    std::string context_id;
    double x = 0.0;
    double y = 0.0;
};

struct Projection2D {
    std::vector<ProjectedPoint> points;
    std::array<double, 2> explained_variance{0.0, 0.0};  // non-increasing
    Matrix components;  // 2 x k, orthonormal rows, deterministic signs
};

// Centers the coefficient vectors, eigen-decomposes the covariance with
// cyclic Jacobi rotations, and projects onto the top-2 components. Sign
// convention: each component's largest-magnitude entry is positive.
Projection2D pca_project(const std::map<std::string, std::vector<double>>& coeffs);

// Symmetric eigen-decomposition (cyclic Jacobi). Returns eigenvalues in
// descending order; eigenvector i is the i-th row of `vectors`.
void symmetric_eigen(const Matrix& a, std::vector<double>& values, Matrix& vectors);

struct ClusterScore {
    double mean_intra = 0.0;
    double mean_inter = 0.0;
};

// Mean pairwise Euclidean distance within vs across families, in the full
// coefficient space.
ClusterScore cluster_score(
    const std::map<std::string, std::vector<std::vector<double>>>& families);

struct SplitSamples {
    std::vector<Sample> calib;
    std::vector<Sample> eval;
};

// Seeded shuffle of the dataset, first `calib_n` samples for calibration,
// the rest for evaluation. Depends only on (seed, context_id), so every
// model sees identical splits.
SplitSamples split_calib_eval(const ContextDataset& ds, std::size_t calib_n,
                              std::uint64_t seed);

struct EvalRow {
    std::string context_id;
    std::string split;  // "train" | "ood"
    double mean_l1 = 0.0;
    std::size_t n = 0;  // evaluation samples
    std::vector<double> alpha;  // empty for the monolithic baseline
};

struct EvalReport {
    std::vector<EvalRow> rows;  // sorted by context_id
    double aggregate_train = 0.0;  // sample-weighted means per split
    double aggregate_ood = 0.0;
    std::size_t calib_samples = 0;
    std::string protocol;
};

// Per context: calibrate on the calibration split, measure empirical L1 on
// the disjoint evaluation split. OOD contexts contribute nothing but their
// own calibration samples.
EvalReport eval_contexts(const BasisNetwork& net, const worlds::GeneratedData& data,
                         std::size_t calib_samples_per_context);

// Baseline table on the same evaluation splits; no calibration exists.
EvalReport eval_monolithic(const MonolithicNetwork& net,
                           const worlds::GeneratedData& data,
                           std::size_t calib_samples_per_context);

}  // namespace fenc::analysis
