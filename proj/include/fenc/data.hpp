#pragma once

// Shared dataset types: observation/action pairs grouped per hidden context.

#include <cstdint>
#include <string>
#include <vector>

namespace fenc {

struct Sample {
    std::vector<double> obs;
    std::vector<double> act;
    // Provenance within the generating world (trajectory index and step);
    // used to keep calibration and evaluation splits disjoint.
    std::uint32_t traj = 0;
    std::uint32_t t = 0;
};

// All pairs collected under one hidden context.
struct ContextDataset {
    std::string context_id;
    std::vector<Sample> samples;
    double mixture_weight = 1.0;
};

struct Trajectory {
    std::string context_id;
    std::vector<Sample> steps;

    std::size_t horizon() const { return steps.size(); }
};

}  // namespace fenc
