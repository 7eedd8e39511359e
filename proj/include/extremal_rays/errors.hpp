#pragma once

#include <stdexcept>
#include <string>

namespace extremal_rays {

// Bad arguments or geometric preconditions (degenerate rectangles, overlapping
// boundary sets, eps <= 0, ...).
struct invalid_parameter : std::invalid_argument {
    explicit invalid_parameter(const std::string& what) : std::invalid_argument(what) {}
};

// Grid too coarse for the requested geometry: a coordinate is off-grid, a
// boundary piece maps to no face, or h exceeds half the feature separation.
struct resolution_error : std::runtime_error {
    explicit resolution_error(const std::string& what) : std::runtime_error(what) {}
};

// Linear solver failed to converge within its iteration cap.
struct solver_error : std::runtime_error {
    explicit solver_error(const std::string& what) : std::runtime_error(what) {}
};

// A path or trace point came within the guard distance of a zero of the
// quadratic differential.
struct near_singularity_error : std::runtime_error {
    explicit near_singularity_error(const std::string& what) : std::runtime_error(what) {}
};

// Asked for the boundary endpoint pair of a trajectory that ended at a zero
// or was truncated at its trace budget.
struct not_full_trajectory : std::logic_error {
    explicit not_full_trajectory(const std::string& what) : std::logic_error(what) {}
};

}  // namespace extremal_rays
