#pragma once

#include <string>
#include <vector>

#include "cvxcone/grid.hpp"

namespace cvxcone {

struct TargetParams {
    double alpha = -0.1;
    double theta = 0.39269908169872414;  // pi/8
    double c = 1.0;
};

/// Builtin test functions by name (see target_names()). Throws InvalidArgument for unknown names.
PointFunction builtin_target(const std::string& name, const TargetParams& params = {});
std::vector<std::string> target_names();

/// Domain the builtin is usually sampled on ([-1, 1] for sin_pi and step, [0, 1] otherwise).
Interval default_bounds(const std::string& name);

/// 1 for the one-dimensional builtins, 2 otherwise.
int default_dim(const std::string& name);

}  // namespace cvxcone
