#include "zifit/optimizer.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "zifit/error.hpp"

namespace zifit {
namespace {

constexpr double kArmijo = 1e-4;
constexpr double kMaxStep = 10.0;
constexpr int kMaxHalvings = 60;

Vec clamp(const Vec& x, const Vec& lo, const Vec& hi) {
  return x.cwiseMax(lo).cwiseMin(hi);
}

// Coordinates pinned at a bound with the gradient pushing outward.
std::array<bool, 4> pinned(const Vec& x, const Vec& g, const Vec& lo, const Vec& hi) {
  std::array<bool, 4> out{};
  for (int i = 0; i < x.size(); ++i) {
    out[static_cast<std::size_t>(i)] = (x[i] <= lo[i] && g[i] < 0.0) || (x[i] >= hi[i] && g[i] > 0.0);
  }
  return out;
}

double projected_norm(const Vec& x, const Vec& g, const Vec& lo, const Vec& hi) {
  const auto pin = pinned(x, g, lo, hi);
  double norm = 0.0;
  for (int i = 0; i < x.size(); ++i) {
    if (!pin[static_cast<std::size_t>(i)]) norm = std::max(norm, std::fabs(g[i]));
  }
  return norm;
}

}  // namespace

std::string_view optimizer_status_name(OptimizerStatus status) noexcept {
  switch (status) {
    case OptimizerStatus::Converged: return "converged";
    case OptimizerStatus::Stalled: return "stalled";
    case OptimizerStatus::MaxIterations: return "max_iterations";
  }
  return "unknown";
}

OptimizerResult maximize_bounded(const Objective& objective, const OptimizerConfig& config) {
  const int n = static_cast<int>(config.init.size());
  if (config.lower.size() != n || config.upper.size() != n) {
    fail(ErrorKind::initialization, "optimizer bounds do not match the initial point");
  }
  for (int i = 0; i < n; ++i) {
    if (!(config.lower[i] <= config.upper[i])) {
      fail(ErrorKind::initialization, "optimizer lower bound exceeds upper bound");
    }
  }
  OptimizerResult res;
  res.x = clamp(config.init, config.lower, config.upper);
  res.gradient = Vec::Zero(n);
  res.value = objective(res.x, &res.gradient);
  res.evaluations = 1;
  if (!std::isfinite(res.value) || !res.gradient.allFinite()) {
    fail(ErrorKind::initialization, "objective is not finite at the initial point");
  }

  Mat h = Mat::Identity(n, n);
  bool identity = true;
  int flat_steps = 0;
  std::array<bool, 4> last_pin{};
  Vec trial_grad(n);
  for (res.iterations = 0; res.iterations < config.max_iterations; ++res.iterations) {
    res.projected_gradient = projected_norm(res.x, res.gradient, config.lower, config.upper);
    if (res.projected_gradient <= config.gradient_tolerance) {
      res.status = OptimizerStatus::Converged;
      return res;
    }
    const auto pin = pinned(res.x, res.gradient, config.lower, config.upper);
    // Curvature learned with a different active set describes the wrong
    // subspace; start over from steepest ascent.
    if (pin != last_pin) {
      h.setIdentity();
      identity = true;
      last_pin = pin;
    }
    Vec g_free = res.gradient;
    for (int i = 0; i < n; ++i) {
      if (pin[static_cast<std::size_t>(i)]) g_free[i] = 0.0;
    }
    Vec dir = h * g_free;
    for (int i = 0; i < n; ++i) {
      if (pin[static_cast<std::size_t>(i)]) dir[i] = 0.0;
    }
    if (!(dir.dot(g_free) > 0.0)) {
      h.setIdentity();
      identity = true;
      dir = g_free;
    }
    double t = std::min(1.0, kMaxStep / std::max(dir.cwiseAbs().maxCoeff(), 1e-300));

    bool accepted = false;
    Vec trial;
    double trial_value = 0.0;
    for (int k = 0; k < kMaxHalvings; ++k, t *= 0.5) {
      trial = clamp(res.x + t * dir, config.lower, config.upper);
      const Vec step = trial - res.x;
      if (step.cwiseAbs().maxCoeff() == 0.0) break;
      trial_value = objective(trial, &trial_grad);
      ++res.evaluations;
      if (std::isfinite(trial_value) && trial_grad.allFinite() &&
          trial_value >= res.value + kArmijo * res.gradient.dot(step)) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      if (!identity) {
        h.setIdentity();
        identity = true;
        continue;
      }
      res.status = OptimizerStatus::Stalled;
      return res;
    }

    const Vec s = trial - res.x;
    Vec y = res.gradient - trial_grad;
    for (int i = 0; i < n; ++i) {
      if (pin[static_cast<std::size_t>(i)]) y[i] = 0.0;
    }
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      const double rho = 1.0 / sy;
      const Mat left = Mat::Identity(n, n) - rho * s * y.transpose();
      h = left * h * left.transpose() + rho * s * s.transpose();
      identity = false;
    }
    flat_steps = (trial_value - res.value <= 1e-15 * (1.0 + std::fabs(res.value))) ? flat_steps + 1 : 0;
    res.x = trial;
    res.value = trial_value;
    res.gradient = trial_grad;
    if (flat_steps >= 4) {
      res.projected_gradient = projected_norm(res.x, res.gradient, config.lower, config.upper);
      res.status = res.projected_gradient <= config.gradient_tolerance ? OptimizerStatus::Converged
                                                                       : OptimizerStatus::Stalled;
      return res;
    }
  }
  res.projected_gradient = projected_norm(res.x, res.gradient, config.lower, config.upper);
  res.status = res.projected_gradient <= config.gradient_tolerance ? OptimizerStatus::Converged
                                                                   : OptimizerStatus::MaxIterations;
  return res;
}

}  // namespace zifit
