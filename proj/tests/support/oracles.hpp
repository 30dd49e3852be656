#pragma once

// Independent reference implementations used by the unit and acceptance
// tests. Nothing here calls into the library's density, CDF or fitting code
// except where a test explicitly compares the two.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <vector>

#include "zifit/distributions.hpp"
#include "zifit/models.hpp"
#include "zifit/random.hpp"

namespace zifit::oracle {

inline double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

// Interior parameters away from the fitting bounds. Beta-binomial n is an
// integer unless `real_size`, in which case the fractional part stays in
// [0.1, 0.9] so finite differences never cross floor(n).
inline ParameterSet random_theta(Family f, Rng& rng, bool real_size = false) {
  switch (f) {
    case Family::Poisson: return ParameterSet::poisson(uniform(rng, 0.5, 15.0));
    case Family::Geometric: return ParameterSet::geometric(uniform(rng, 0.1, 0.9));
    case Family::NegBinomial:
      return ParameterSet::neg_binomial(uniform(rng, 0.5, 12.0), uniform(rng, 0.1, 0.9));
    case Family::BetaBinomial: {
      double n = std::floor(uniform(rng, 2.0, 15.0));
      if (real_size) n += uniform(rng, 0.1, 0.9);
      return ParameterSet::beta_binomial(n, uniform(rng, 0.5, 10.0), uniform(rng, 0.5, 10.0));
    }
    case Family::BetaNegBinomial:
      return ParameterSet::beta_neg_binomial(uniform(rng, 0.5, 10.0), uniform(rng, 2.5, 12.0),
                                             uniform(rng, 0.5, 10.0));
    case Family::Normal: return ParameterSet::normal(uniform(rng, -3.0, 3.0), uniform(rng, 0.5, 3.0));
    case Family::LogNormal:
      return ParameterSet::log_normal(uniform(rng, -1.0, 1.5), uniform(rng, 0.3, 1.5));
    case Family::HalfNormal: return ParameterSet::half_normal(uniform(rng, 0.3, 3.0));
    case Family::Exponential: return ParameterSet::exponential(uniform(rng, 0.2, 5.0));
  }
  return {};
}

inline ModelParams random_params(const ModelSpec& spec, Rng& rng, bool real_size = false) {
  ModelParams p;
  p.phi = spec.has_phi() ? uniform(rng, 0.1, 0.7) : 0.0;
  p.theta = random_theta(spec.family, rng, real_size);
  return p;
}

// Log density from the textbook formulas with std::lgamma. The
// beta-binomial formula is evaluated as written for real n (no support
// truncation), which finite differences in n rely on.
inline double log_baseline(Family f, const double* t, double y) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  const double half_log_2pi = 0.5 * std::log(2.0 * M_PI);
  switch (f) {
    case Family::Poisson: return y * std::log(t[0]) - t[0] - std::lgamma(y + 1.0);
    case Family::Geometric: return std::log(t[0]) + y * std::log(1.0 - t[0]);
    case Family::NegBinomial:
      return std::lgamma(y + t[0]) - std::lgamma(y + 1.0) - std::lgamma(t[0]) +
             t[0] * std::log(t[1]) + y * std::log(1.0 - t[1]);
    case Family::BetaBinomial: {
      const double n = t[0], a = t[1], b = t[2];
      return std::lgamma(n + 1.0) - std::lgamma(y + 1.0) - std::lgamma(n - y + 1.0) +
             std::lgamma(y + a) + std::lgamma(n - y + b) - std::lgamma(n + a + b) -
             (std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b));
    }
    case Family::BetaNegBinomial: {
      const double r = t[0], a = t[1], b = t[2];
      return std::lgamma(r + y) - std::lgamma(y + 1.0) - std::lgamma(r) + std::lgamma(a + r) +
             std::lgamma(b + y) - std::lgamma(a + r + b + y) - std::lgamma(a) - std::lgamma(b) +
             std::lgamma(a + b);
    }
    case Family::Normal: {
      const double z = (y - t[0]) / t[1];
      return -half_log_2pi - std::log(t[1]) - 0.5 * z * z;
    }
    case Family::LogNormal: {
      if (y <= 0.0) return -kInf;
      const double z = (std::log(y) - t[0]) / t[1];
      return -half_log_2pi - std::log(t[1]) - std::log(y) - 0.5 * z * z;
    }
    case Family::HalfNormal: {
      if (y < 0.0) return -kInf;
      const double z = y / t[0];
      return 0.5 * std::log(2.0 / M_PI) - std::log(t[0]) - 0.5 * z * z;
    }
    case Family::Exponential:
      if (y < 0.0) return -kInf;
      return std::log(t[0]) - t[0] * y;
  }
  return -kInf;
}

// eta holds (phi, theta...) for zero-modified models and theta otherwise.
inline double log_model(const ModelSpec& spec, const double* eta, double y) {
  if (!spec.has_phi()) return log_baseline(spec.family, eta, y);
  const double phi = eta[0];
  const double* t = eta + 1;
  if (!is_discrete(spec.family)) {
    return y == 0.0 ? std::log(phi) : std::log1p(-phi) + log_baseline(spec.family, t, y);
  }
  const double p0 = std::exp(log_baseline(spec.family, t, 0.0));
  if (spec.kind == ModelKind::ZeroInflated) {
    if (y == 0.0) return std::log(phi + (1.0 - phi) * p0);
    return std::log1p(-phi) + log_baseline(spec.family, t, y);
  }
  if (y == 0.0) return std::log(phi);
  return std::log1p(-phi) + log_baseline(spec.family, t, y) - std::log1p(-p0);
}

inline std::vector<double> eta_of(const ModelSpec& spec, const ModelParams& p) {
  std::vector<double> eta;
  if (spec.has_phi()) eta.push_back(p.phi);
  for (int i = 0; i < family_dim(spec.family); ++i) eta.push_back(p.theta[i]);
  return eta;
}

using ScalarFn = std::function<double(const std::vector<double>&)>;

inline std::vector<double> fd_gradient(const ScalarFn& f, std::vector<double> x, double h) {
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double xi = x[i];
    const double step = h * std::max(1.0, std::fabs(xi));
    x[i] = xi + step;
    const double up = f(x);
    x[i] = xi - step;
    const double down = f(x);
    x[i] = xi;
    g[i] = (up - down) / (2.0 * step);
  }
  return g;
}

// Central second differences with an absolute step.
inline std::vector<std::vector<double>> fd_hessian(const ScalarFn& f, std::vector<double> x,
                                                   double h) {
  const std::size_t d = x.size();
  std::vector<std::vector<double>> H(d, std::vector<double>(d));
  const double f0 = f(x);
  for (std::size_t i = 0; i < d; ++i) {
    const double xi = x[i];
    x[i] = xi + h;
    const double up = f(x);
    x[i] = xi - h;
    const double down = f(x);
    x[i] = xi;
    H[i][i] = (up - 2.0 * f0 + down) / (h * h);
    for (std::size_t j = 0; j < i; ++j) {
      const double xj = x[j];
      auto at = [&](double si, double sj) {
        x[i] = xi + si * h;
        x[j] = xj + sj * h;
        const double v = f(x);
        x[i] = xi;
        x[j] = xj;
        return v;
      };
      H[i][j] = H[j][i] = (at(1, 1) - at(1, -1) - at(-1, 1) + at(-1, -1)) / (4.0 * h * h);
    }
  }
  return H;
}

// Baseline draws built from the standard library distributions only.
inline double draw_baseline_std(const ParameterSet& t, Rng& rng) {
  auto gamma = [&](double shape) { return std::gamma_distribution<double>(shape, 1.0)(rng); };
  auto beta = [&](double a, double b) {
    const double x = gamma(a);
    return x / (x + gamma(b));
  };
  auto neg_binomial = [&](double r, double p) {
    const double rate = gamma(r) * (1.0 - p) / p;
    return static_cast<double>(std::poisson_distribution<long long>(rate)(rng));
  };
  switch (t.family) {
    case Family::Poisson: return static_cast<double>(std::poisson_distribution<long long>(t[0])(rng));
    case Family::Geometric: return static_cast<double>(std::geometric_distribution<long long>(t[0])(rng));
    case Family::NegBinomial: return neg_binomial(t[0], t[1]);
    case Family::BetaBinomial:
      return static_cast<double>(
          std::binomial_distribution<long long>(static_cast<long long>(t[0]), beta(t[1], t[2]))(rng));
    case Family::BetaNegBinomial: return neg_binomial(t[0], beta(t[1], t[2]));
    case Family::Normal: return t[0] + t[1] * std::normal_distribution<double>()(rng);
    case Family::LogNormal: return std::exp(t[0] + t[1] * std::normal_distribution<double>()(rng));
    case Family::HalfNormal: return std::fabs(t[0] * std::normal_distribution<double>()(rng));
    case Family::Exponential: return std::exponential_distribution<double>(t[0])(rng);
  }
  return 0.0;
}

inline double draw_model_std(const ModelSpec& spec, const ModelParams& p, Rng& rng) {
  if (!spec.has_phi()) return draw_baseline_std(p.theta, rng);
  const bool zero = std::bernoulli_distribution(p.phi)(rng);
  if (zero) return 0.0;
  if (spec.kind == ModelKind::Hurdle && is_discrete(spec.family)) {
    for (;;) {
      const double y = draw_baseline_std(p.theta, rng);
      if (y != 0.0) return y;
    }
  }
  return draw_baseline_std(p.theta, rng);
}

// Monte Carlo estimate of -E[Hessian of log f] from `draws` model draws with
// finite-difference Hessians. Discrete draws are tallied so each distinct
// value is differentiated once; normal and log-normal draws come in
// antithetic pairs (z, -z), which leaves the estimator unbiased.
inline std::vector<std::vector<double>> mc_information(const ModelSpec& spec, const ModelParams& p,
                                                       std::size_t draws, double h,
                                                       std::uint64_t seed) {
  Rng rng = make_rng(seed, 77);
  std::map<double, double> tally;
  const bool antithetic = spec.family == Family::Normal || spec.family == Family::LogNormal;
  if (antithetic) {
    const double mu = p.theta[0], sigma = p.theta[1];
    std::normal_distribution<double> normal;
    std::bernoulli_distribution zero(spec.has_phi() ? p.phi : 0.0);
    for (std::size_t i = 0; i < draws / 2; ++i) {
      const bool z0 = zero(rng);
      const double z = normal(rng);
      for (double s : {z, -z}) {
        double y = mu + sigma * s;
        if (spec.family == Family::LogNormal) y = std::exp(y);
        tally[z0 ? 0.0 : y] += 1.0;
      }
    }
  } else {
    for (std::size_t i = 0; i < draws; ++i) tally[draw_model_std(spec, p, rng)] += 1.0;
  }
  const auto eta = eta_of(spec, p);
  const std::size_t d = eta.size();
  std::vector<std::vector<double>> info(d, std::vector<double>(d, 0.0));
  double total = 0.0;
  for (const auto& [y, w] : tally) {
    const auto H = fd_hessian([&](const std::vector<double>& e) { return log_model(spec, e.data(), y); },
                              eta, h);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) info[i][j] -= w * H[i][j];
    total += w;
  }
  for (auto& row : info)
    for (double& v : row) v /= total;
  return info;
}

// Empirical-vs-model sup distance evaluated on a dense lattice (step 1/64
// over [min - 1, max + 1]) plus every observation, its left neighbour and
// both sides of 0. Counts the empirical CDF directly.
inline double brute_force_ks(const std::vector<double>& data, const ModelSpec& spec,
                             const ModelParams& params) {
  std::vector<double> sorted = data;
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  std::vector<double> grid;
  const double lo = std::floor(sorted.front()) - 1.0, hi = std::ceil(sorted.back()) + 1.0;
  for (double u = lo; u <= hi; u += 1.0 / 64.0) grid.push_back(u);
  for (double y : sorted) {
    grid.push_back(y);
    grid.push_back(std::nextafter(y, -std::numeric_limits<double>::infinity()));
  }
  grid.push_back(0.0);
  grid.push_back(-std::numeric_limits<double>::denorm_min());
  double d = 0.0;
  for (double u : grid) {
    const double count =
        static_cast<double>(std::upper_bound(sorted.begin(), sorted.end(), u) - sorted.begin());
    d = std::max(d, std::fabs(model_cdf(spec, params, u) - count / n));
  }
  return d;
}

// Pattern search for the maximum log-likelihood: a 9-point lattice per
// coordinate in logit/log space, re-centred on the best point and shrunk
// each round. Stays inside the same box the fitter uses (positive
// parameters in [lower, upper], probabilities in [lower, 1 - lower], and
// beta-binomial n at least the largest observation). Discrete families only.
inline double grid_max_loglik(const ModelSpec& spec, const std::map<double, double>& tally,
                              int rounds = 8, std::vector<double>* argmax = nullptr) {
  const int dim = family_dim(spec.family);
  const bool with_phi = spec.has_phi();
  const double max_y = tally.rbegin()->first;
  struct Axis {
    double lo, hi;
    bool logit;
  };
  std::vector<Axis> axes;
  if (with_phi) axes.push_back({-12.0, 12.0, true});
  for (int i = 0; i < dim; ++i) {
    const auto b = spec.bounds[static_cast<std::size_t>(i)];
    const bool prob = parameter_kind(spec.family, i) == ParameterKind::Probability;
    if (prob) {
      axes.push_back({std::log(b.lower / (1.0 - b.lower)), std::log((1.0 - b.lower) / b.lower), true});
    } else {
      double lo = b.lower;
      if (spec.family == Family::BetaBinomial && i == 0) lo = std::max(lo, max_y);
      axes.push_back({std::log(lo), std::log(b.upper), false});
    }
  }
  const std::size_t d = axes.size();
  auto natural = [&](const std::vector<double>& u) {
    std::vector<double> eta(d);
    for (std::size_t i = 0; i < d; ++i) {
      eta[i] = axes[i].logit ? 1.0 / (1.0 + std::exp(-u[i])) : std::exp(u[i]);
    }
    if (spec.family == Family::BetaBinomial) {
      double& n = eta[with_phi ? 1 : 0];
      n = std::max(n, max_y);
      if (spec.integer_size) n = std::ceil(n - 1e-9);
    } else if (spec.integer_size) {
      double& r = eta[with_phi ? 1 : 0];
      r = std::max(1.0, std::round(r));
    }
    return eta;
  };
  auto loglik = [&](const std::vector<double>& u) {
    const auto eta = natural(u);
    double s = 0.0;
    for (const auto& [y, w] : tally) s += w * log_model(spec, eta.data(), y);
    return std::isfinite(s) ? s : -std::numeric_limits<double>::infinity();
  };
  std::vector<double> centre(d), span(d);
  for (std::size_t i = 0; i < d; ++i) {
    centre[i] = 0.5 * (axes[i].lo + axes[i].hi);
    span[i] = 0.5 * (axes[i].hi - axes[i].lo);
  }
  constexpr int kPoints = 9;
  double best = -std::numeric_limits<double>::infinity();
  std::vector<double> best_u = centre;
  for (int round = 0; round < rounds; ++round) {
    std::vector<int> idx(d, 0);
    std::vector<double> u(d);
    for (;;) {
      for (std::size_t i = 0; i < d; ++i) {
        const double step = 2.0 * span[i] / (kPoints - 1);
        u[i] = std::clamp(centre[i] - span[i] + step * idx[i], axes[i].lo, axes[i].hi);
      }
      const double v = loglik(u);
      if (v > best) {
        best = v;
        best_u = u;
      }
      std::size_t k = 0;
      while (k < d && ++idx[k] == kPoints) idx[k++] = 0;
      if (k == d) break;
    }
    centre = best_u;
    for (double& s : span) s *= 0.35;
  }
  if (argmax) *argmax = natural(best_u);
  return best;
}

inline std::map<double, double> tally_of(const std::vector<double>& data) {
  std::map<double, double> t;
  for (double y : data) t[y] += 1.0;
  return t;
}

}  // namespace zifit::oracle
