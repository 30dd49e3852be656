#pragma once

#include <functional>
#include <string_view>

#include "zifit/distributions.hpp"

namespace zifit {

// Objective to maximize. Returns the value and, when grad is non-null,
// writes the gradient. Non-finite values are treated as infeasible.
using Objective = std::function<double(const Vec& x, Vec* grad)>;

struct OptimizerConfig {
  Vec lower;
  Vec upper;
  Vec init;
  double gradient_tolerance = 1e-8;
  int max_iterations = 500;
};

enum class OptimizerStatus { Converged, Stalled, MaxIterations };

std::string_view optimizer_status_name(OptimizerStatus status) noexcept;

struct OptimizerResult {
  Vec x;
  double value = 0.0;
  Vec gradient;
  // Infinity norm of the projected gradient at x.
  double projected_gradient = 0.0;
  int iterations = 0;
  int evaluations = 0;
  OptimizerStatus status = OptimizerStatus::MaxIterations;
};

// Projected BFGS ascent inside the box [lower, upper]. The objective is never
// evaluated outside the box. Stalled means no further ascent was possible
// along either the quasi-Newton or the steepest direction.
OptimizerResult maximize_bounded(const Objective& objective, const OptimizerConfig& config);

}  // namespace zifit
