#include "zifit/mle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <vector>

#include "zifit/error.hpp"
#include "zifit/special_functions.hpp"

namespace zifit {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double logit(double p) { return std::log(p) - std::log1p(-p); }
double logistic(double z) { return z >= 0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z)); }

// Maps the free baseline parameters to an unconstrained-ish box: logs for
// positive parameters, logits for probabilities, identity for locations.
class Coordinates {
 public:
  Coordinates(const ModelSpec& spec, double max_observation, std::optional<double> fixed_size)
      : family_(spec.family) {
    const int dim = family_dim(family_);
    for (int i = 0; i < dim; ++i) {
      const auto b = spec.bounds[static_cast<std::size_t>(i)];
      double lo = b.lower, hi = b.upper;
      switch (parameter_kind(family_, i)) {
        case ParameterKind::Probability:
          lo = b.lower;
          hi = 1.0 - b.lower;
          break;
        case ParameterKind::Real:
          lo = -b.upper;
          hi = b.upper;
          break;
        case ParameterKind::Positive: break;
      }
      if (family_ == Family::BetaBinomial && i == 0) lo = std::max(lo, max_observation);
      if (!(lo <= hi)) {
        std::ostringstream os;
        os << "empty parameter box for " << parameter_names(family_)[static_cast<std::size_t>(i)]
           << ": [" << lo << ", " << hi << "]";
        fail(ErrorKind::domain, os.str());
      }
      lo_[static_cast<std::size_t>(i)] = lo;
      hi_[static_cast<std::size_t>(i)] = hi;
      if (i == 0 && fixed_size) {
        fixed_ = *fixed_size;
        continue;
      }
      free_.push_back(i);
    }
    base_.family = family_;
    if (fixed_) base_[0] = *fixed_;
  }

  int size() const { return static_cast<int>(free_.size()); }
  std::optional<double> fixed() const { return fixed_; }
  double lower(int i) const { return lo_[static_cast<std::size_t>(i)]; }
  double upper(int i) const { return hi_[static_cast<std::size_t>(i)]; }

  ParameterSet clamp(ParameterSet t) const {
    t.family = family_;
    for (int i = 0; i < family_dim(family_); ++i) t[i] = std::clamp(t[i], lower(i), upper(i));
    if (fixed_) t[0] = *fixed_;
    return t;
  }

  double forward(int i, double v) const {
    switch (parameter_kind(family_, i)) {
      case ParameterKind::Positive: return std::log(v);
      case ParameterKind::Probability: return logit(v);
      case ParameterKind::Real: return v;
    }
    return v;
  }

  double backward(int i, double z) const {
    switch (parameter_kind(family_, i)) {
      case ParameterKind::Positive: return std::exp(z);
      case ParameterKind::Probability: return logistic(z);
      case ParameterKind::Real: return z;
    }
    return z;
  }

  double jacobian(int i, double v) const {
    switch (parameter_kind(family_, i)) {
      case ParameterKind::Positive: return v;
      case ParameterKind::Probability: return v * (1.0 - v);
      case ParameterKind::Real: return 1.0;
    }
    return 1.0;
  }

  Vec to_z(const ParameterSet& t) const {
    Vec z(size());
    for (int k = 0; k < size(); ++k) z[k] = forward(free_[k], t[free_[k]]);
    return z;
  }

  ParameterSet to_theta(const Vec& z) const {
    ParameterSet t = base_;
    for (int k = 0; k < size(); ++k) t[free_[k]] = backward(free_[k], z[k]);
    return clamp(t);
  }

  Vec z_lower() const {
    Vec v(size());
    for (int k = 0; k < size(); ++k) v[k] = forward(free_[k], lower(free_[k]));
    return v;
  }

  Vec z_upper() const {
    Vec v(size());
    for (int k = 0; k < size(); ++k) v[k] = forward(free_[k], upper(free_[k]));
    return v;
  }

  Vec chain(const ParameterSet& t, const Vec& grad_theta) const {
    Vec g(size());
    for (int k = 0; k < size(); ++k) g[k] = grad_theta[free_[k]] * jacobian(free_[k], t[free_[k]]);
    return g;
  }

  bool pinned(const ParameterSet& t) const {
    for (int i : free_) {
      const double span = 1e-7 * std::max(1.0, std::fabs(t[i]));
      if (t[i] <= lower(i) + span || t[i] >= upper(i) - span) return true;
    }
    return false;
  }

 private:
  Family family_;
  std::array<double, 3> lo_{};
  std::array<double, 3> hi_{};
  std::vector<int> free_;
  std::optional<double> fixed_;
  ParameterSet base_;
};

// Objective in the natural parameters: value and full-length gradient.
using ThetaObjective = std::function<double(const ParameterSet&, Vec*)>;

struct ThetaRun {
  ParameterSet theta;
  double value = -kInf;
  bool converged = false;
  int iterations = 0;
};

bool run_converged(const OptimizerResult& r) {
  return r.status == OptimizerStatus::Converged ||
         (r.status == OptimizerStatus::Stalled && r.projected_gradient <= 1e-5);
}

ThetaRun optimize_theta(const ThetaObjective& objective, const Coordinates& coords,
                        const ParameterSet& start, const FitOptions& options) {
  ThetaRun run;
  if (coords.size() == 0) {
    run.theta = coords.clamp(start);
    run.value = objective(run.theta, nullptr);
    run.converged = true;
    return run;
  }
  Objective wrapped = [&](const Vec& z, Vec* grad) -> double {
    const ParameterSet t = coords.to_theta(z);
    try {
      Vec g = Vec::Zero(family_dim(t.family));
      const double v = objective(t, grad ? &g : nullptr);
      if (grad) *grad = coords.chain(t, g);
      return v;
    } catch (const Error&) {
      if (grad) *grad = Vec::Zero(z.size());
      return -kInf;
    }
  };
  OptimizerConfig cfg;
  cfg.lower = coords.z_lower();
  cfg.upper = coords.z_upper();
  cfg.init = coords.to_z(coords.clamp(start));
  cfg.gradient_tolerance = options.gradient_tolerance;
  cfg.max_iterations = options.max_iterations;
  const OptimizerResult r = maximize_bounded(wrapped, cfg);
  run.theta = coords.to_theta(r.x);
  run.value = r.value;
  run.converged = run_converged(r);
  run.iterations = r.iterations;
  return run;
}

struct Moments {
  double mean = 0.0;
  double var = 0.0;
  double max = 0.0;
};

Moments moments(const WeightedSample& s) {
  Moments m;
  if (s.empty()) return m;
  double total = 0.0, sum = 0.0;
  for (std::size_t i = 0; i < s.values.size(); ++i) {
    total += s.counts[i];
    sum += s.counts[i] * s.values[i];
  }
  m.mean = sum / total;
  double ss = 0.0;
  for (std::size_t i = 0; i < s.values.size(); ++i) {
    const double d = s.values[i] - m.mean;
    ss += s.counts[i] * d * d;
  }
  m.var = ss / total;
  m.max = s.values.back();
  return m;
}

// Moment-based starting points; several for the harder multi-parameter
// families so the best one can be picked by objective value.
std::vector<ParameterSet> starting_points(Family family, const WeightedSample& s,
                                          bool truncated) {
  const Moments mo = moments(s);
  const double mean = std::max(mo.mean, 1e-3);
  const double var = std::max(mo.var, 1e-6);
  std::vector<ParameterSet> out;
  switch (family) {
    case Family::Poisson:
      out.push_back(ParameterSet::poisson(mean));
      if (truncated) out.push_back(ParameterSet::poisson(std::max(mean - 1.0, 0.05)));
      break;
    case Family::Geometric:
      out.push_back(ParameterSet::geometric(truncated ? 1.0 / std::max(mean, 1.0 + 1e-6)
                                                      : 1.0 / (1.0 + mean)));
      break;
    case Family::NegBinomial: {
      const double p = var > mean ? mean / var : 0.9;
      out.push_back(ParameterSet::neg_binomial(mean * p / (1.0 - p), p));
      for (double r : {0.5, 2.0, 10.0, 50.0}) {
        out.push_back(ParameterSet::neg_binomial(r, r / (r + mean)));
      }
      break;
    }
    case Family::BetaBinomial: {
      const double top = std::max(mo.max, 1.0);
      for (double n : {top, std::ceil(1.5 * top), 2.0 * top + 5.0, 4.0 * top + 20.0}) {
        const double pi = std::clamp(mo.mean / n, 0.02, 0.98);
        const double binom_var = n * pi * (1.0 - pi);
        double s_ab = 10.0;
        if (var > binom_var * 1.0001 && n > 1.0) {
          s_ab = (n - 1.0) / (var / binom_var - 1.0) - 1.0;
        }
        s_ab = std::clamp(s_ab, 0.2, 500.0);
        out.push_back(ParameterSet::beta_binomial(n, pi * s_ab, (1.0 - pi) * s_ab));
      }
      break;
    }
    case Family::BetaNegBinomial: {
      for (double r : {1.0, 3.0, 10.0, 50.0}) {
        for (double a : {2.5, 5.0, 15.0}) {
          out.push_back(ParameterSet::beta_neg_binomial(r, a, std::max(mean * (a - 1.0) / r, 0.05)));
        }
      }
      break;
    }
    default: break;
  }
  return out;
}

struct WeightedTerms {
  double sum_log_f = 0.0;
  Vec score;
};

WeightedTerms weighted_terms(const ParameterSet& theta, const WeightedSample& s, bool need_score) {
  const DensityKernel kernel(theta);
  WeightedTerms out;
  if (need_score) out.score = Vec::Zero(theta.dim());
  for (std::size_t i = 0; i < s.values.size(); ++i) {
    const double lf = kernel.log_density(s.values[i]);
    if (lf == -kInf) {
      out.sum_log_f = -kInf;
      return out;
    }
    out.sum_log_f += s.counts[i] * lf;
    if (need_score) kernel.add_score(s.values[i], s.counts[i], out.score);
  }
  return out;
}

// Mean truncated log-likelihood over the nonzero part; `scale` is 1/n.
double truncated_objective(const ParameterSet& theta, const WeightedSample& nonzero, double scale,
                           Vec* grad) {
  const auto terms = weighted_terms(theta, nonzero, grad != nullptr);
  if (terms.sum_log_f == -kInf) return -kInf;
  const double m = static_cast<double>(nonzero.size);
  const double l1m = log1m_zero_prob(theta);
  if (l1m == -kInf) return -kInf;
  if (grad) {
    Vec g = terms.score;
    if (is_discrete(theta.family)) {
      const double odds = std::exp(log_zero_prob(theta) - l1m);
      g += m * odds * grad_log_zero_prob(theta);
    }
    *grad = g * scale;
  }
  return (terms.sum_log_f - m * l1m) * scale;
}

double baseline_objective(const ParameterSet& theta, const WeightedSample& all, double scale,
                          Vec* grad) {
  const auto terms = weighted_terms(theta, all, grad != nullptr);
  if (terms.sum_log_f == -kInf) return -kInf;
  if (grad) *grad = terms.score * scale;
  return terms.sum_log_f * scale;
}

double x_log_x_ratio(double k, double n) { return k > 0.0 ? k * std::log(k / n) : 0.0; }

ThetaRun best_start_and_optimize(const ThetaObjective& objective, const Coordinates& coords,
                                 std::vector<ParameterSet> starts, const FitOptions& options) {
  if (options.init) starts = {*options.init};
  std::vector<std::pair<double, ParameterSet>> scored;
  for (auto& s : starts) {
    const ParameterSet c = coords.clamp(s);
    double v = -kInf;
    try {
      v = objective(c, nullptr);
    } catch (const Error&) {
    }
    if (std::isfinite(v)) scored.emplace_back(v, c);
  }
  if (scored.empty()) {
    fail(ErrorKind::initialization, "no finite starting point for the likelihood");
  }
  std::stable_sort(scored.begin(), scored.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  const std::size_t tries = family_dim(coords.clamp(starts.front()).family) >= 3 ? 2 : 1;
  ThetaRun best;
  int iterations = 0;
  // Later starts are only tried while nothing has converged yet.
  for (std::size_t k = 0; k < scored.size() && (k < tries || !best.converged); ++k) {
    ThetaRun run = optimize_theta(objective, coords, scored[k].second, options);
    iterations += run.iterations;
    if (run.value > best.value) best = run;
  }
  best.iterations = iterations;
  return best;
}

FitResult finish(FitResult r, const WeightedSample& sample) {
  r.loglik = log_likelihood(r.spec, r.params_hat, sample);
  return r;
}

FitResult undefined_theta(const ModelSpec& spec, const WeightedSample& sample, FitCase c,
                          const FitOptions& options) {
  FitResult r;
  r.spec = spec;
  r.n = sample.size;
  r.m = 0;
  r.case_taken = c;
  r.theta_defined = false;
  r.boundary = true;
  r.params_hat.phi = 1.0;
  r.params_hat.theta = options.init ? *options.init : ParameterSet{};
  r.params_hat.theta.family = spec.family;
  r.params_hat.theta.integer_size = spec.integer_size;
  r.loglik = 0.0;
  r.note = "no nonzero observations: theta is not identified";
  return r;
}

void require_data(const WeightedSample& sample) {
  if (sample.empty()) fail(ErrorKind::insufficient_data, "no observations");
}

}  // namespace

std::string_view fit_case_name(FitCase c) noexcept {
  switch (c) {
    case FitCase::HurdleClosedForm: return "hurdle_closed_form";
    case FitCase::ZICase1: return "zi_case1";
    case FitCase::ZICase2: return "zi_case2";
    case FitCase::ClosedFormContinuous: return "closed_form_continuous";
    case FitCase::BaselineFit: return "baseline_fit";
  }
  return "unknown";
}

TruncatedFit fit_truncated(Family family, const WeightedSample& nonzero, const ModelSpec& spec,
                           const FitOptions& options, std::optional<double> fixed_size) {
  if (nonzero.empty()) {
    fail(ErrorKind::insufficient_data, "truncated fit needs at least one nonzero observation");
  }
  if (!is_discrete(family)) {
    ModelSpec zazi = spec;
    zazi.family = family;
    zazi.kind = ModelKind::Hurdle;
    const FitResult r = fit_zazi(zazi, nonzero);
    return {r.params_hat.theta, true, 0, r.boundary};
  }
  const Coordinates coords(spec, nonzero.max(), fixed_size);
  const double scale = 1.0 / static_cast<double>(nonzero.size);
  ThetaObjective objective = [&](const ParameterSet& t, Vec* g) {
    return truncated_objective(t, nonzero, scale, g);
  };
  const ThetaRun run =
      best_start_and_optimize(objective, coords, starting_points(family, nonzero, true), options);
  TruncatedFit out;
  out.theta = run.theta;
  out.theta.integer_size = spec.integer_size;
  out.converged = run.converged;
  out.iterations = run.iterations;
  out.boundary = coords.pinned(run.theta);
  return out;
}

FitResult fit_hurdle(const ModelSpec& spec, const WeightedSample& sample, const FitOptions& options,
                     std::optional<double> fixed_size) {
  require_data(sample);
  if (!is_discrete(spec.family)) return fit_zazi(spec, sample);
  const WeightedSample nonzero = sample.nonzero();
  if (nonzero.empty()) return undefined_theta(spec, sample, FitCase::HurdleClosedForm, options);
  const TruncatedFit t = fit_truncated(spec.family, nonzero, spec, options, fixed_size);
  FitResult r;
  r.spec = spec;
  r.n = sample.size;
  r.m = nonzero.size;
  r.case_taken = FitCase::HurdleClosedForm;
  r.params_hat.phi = static_cast<double>(r.n - r.m) / static_cast<double>(r.n);
  r.params_hat.theta = t.theta;
  r.converged = t.converged;
  r.iterations = t.iterations;
  r.boundary = t.boundary || r.m == r.n;
  return finish(r, sample);
}

FitResult fit_zero_inflated(const ModelSpec& spec, const WeightedSample& sample,
                            const FitOptions& options, std::optional<double> fixed_size) {
  require_data(sample);
  if (!is_discrete(spec.family)) return fit_zazi(spec, sample);
  const WeightedSample nonzero = sample.nonzero();
  if (nonzero.empty()) return undefined_theta(spec, sample, FitCase::ZICase1, options);

  const double n = static_cast<double>(sample.size);
  const double m = static_cast<double>(nonzero.size);
  const double log_share = std::log(m / n);
  const TruncatedFit star = fit_truncated(spec.family, nonzero, spec, options, fixed_size);

  FitResult r;
  r.spec = spec;
  r.n = sample.size;
  r.m = nonzero.size;
  r.iterations = star.iterations;
  r.converged = star.converged;

  const double l1m_star = log1m_zero_prob(star.theta);
  if (log_share <= l1m_star) {
    r.case_taken = FitCase::ZICase1;
    r.params_hat.theta = star.theta;
    r.params_hat.phi = std::clamp(1.0 - std::exp(log_share - l1m_star), 0.0, 1.0);
    r.boundary = star.boundary;
    return finish(r, sample);
  }

  // Profile likelihood with psi(theta) = min(m/n, 1 - p0(theta)); ties at the
  // kink belong to the interior branch.
  const double constant = x_log_x_ratio(m, n) + x_log_x_ratio(n - m, n);
  const double scale = 1.0 / n;
  ThetaObjective profile = [&](const ParameterSet& t, Vec* g) -> double {
    const double l1m = log1m_zero_prob(t);
    if (l1m >= log_share) {
      const double v = truncated_objective(t, nonzero, scale, g);
      return v + constant * scale;
    }
    const auto terms = weighted_terms(t, nonzero, g != nullptr);
    if (terms.sum_log_f == -kInf) return -kInf;
    const double lp0 = log_zero_prob(t);
    if (g) *g = (terms.score + (n - m) * grad_log_zero_prob(t)) * scale;
    return (terms.sum_log_f + (n - m) * lp0) * scale;
  };
  const Coordinates coords(spec, nonzero.max(), fixed_size);
  const ThetaRun run = optimize_theta(profile, coords, star.theta, options);
  r.case_taken = FitCase::ZICase2;
  r.params_hat.theta = run.theta;
  r.params_hat.theta.integer_size = spec.integer_size;
  const double l1m = log1m_zero_prob(run.theta);
  const double psi_ratio = l1m >= log_share ? std::exp(log_share - l1m) : 1.0;
  r.params_hat.phi = std::clamp(1.0 - psi_ratio, 0.0, 1.0);
  r.iterations += run.iterations;
  r.converged = r.converged && run.converged;
  r.boundary = coords.pinned(run.theta) || r.params_hat.phi == 0.0;
  return finish(r, sample);
}

FitResult fit_zazi(const ModelSpec& spec, const WeightedSample& sample) {
  require_data(sample);
  if (is_discrete(spec.family)) {
    fail(ErrorKind::unsupported, "closed-form fits exist only for continuous families");
  }
  const WeightedSample nonzero = sample.nonzero();
  FitResult r;
  r.spec = spec;
  r.n = sample.size;
  r.m = nonzero.size;
  r.case_taken = FitCase::ClosedFormContinuous;
  r.params_hat.phi = static_cast<double>(r.n - r.m) / static_cast<double>(r.n);
  r.params_hat.theta.family = spec.family;
  if (spec.kind == ModelKind::Baseline) {
    fail(ErrorKind::unsupported, "baseline continuous fits go through fit_baseline");
  }
  if (nonzero.empty()) {
    FitOptions none;
    return undefined_theta(spec, sample, FitCase::ClosedFormContinuous, none);
  }
  for (std::size_t i = 0; i < nonzero.values.size(); ++i) {
    const double y = nonzero.values[i];
    if (spec.family != Family::Normal && !(y > 0.0)) {
      std::ostringstream os;
      os << "observation " << y << " lies outside the support of " << family_name(spec.family);
      fail(ErrorKind::domain, os.str());
    }
  }
  const double m = static_cast<double>(r.m);
  auto& t = r.params_hat.theta;
  double sigma = 0.0;
  switch (spec.family) {
    case Family::Normal:
    case Family::LogNormal: {
      const bool logs = spec.family == Family::LogNormal;
      double sum = 0.0;
      for (std::size_t i = 0; i < nonzero.values.size(); ++i) {
        sum += nonzero.counts[i] * (logs ? std::log(nonzero.values[i]) : nonzero.values[i]);
      }
      const double mu = sum / m;
      double ss = 0.0;
      for (std::size_t i = 0; i < nonzero.values.size(); ++i) {
        const double d = (logs ? std::log(nonzero.values[i]) : nonzero.values[i]) - mu;
        ss += nonzero.counts[i] * d * d;
      }
      sigma = std::sqrt(ss / m);
      t[0] = mu;
      t[1] = sigma;
      break;
    }
    case Family::HalfNormal: {
      double ss = 0.0;
      for (std::size_t i = 0; i < nonzero.values.size(); ++i) {
        ss += nonzero.counts[i] * nonzero.values[i] * nonzero.values[i];
      }
      sigma = std::sqrt(ss / m);
      t[0] = sigma;
      break;
    }
    case Family::Exponential: {
      double sum = 0.0;
      for (std::size_t i = 0; i < nonzero.values.size(); ++i) {
        sum += nonzero.counts[i] * nonzero.values[i];
      }
      t[0] = m / sum;
      sigma = 1.0;
      break;
    }
    default: break;
  }
  if (!(sigma > 0.0)) {
    r.boundary = true;
    r.loglik = kInf;
    r.note = "degenerate nonzero subsample: scale estimate is 0 and the information is singular";
    return r;
  }
  return finish(r, sample);
}

FitResult fit_baseline(const ModelSpec& spec, const WeightedSample& sample,
                       const FitOptions& options, std::optional<double> fixed_size) {
  require_data(sample);
  FitResult r;
  r.spec = spec;
  r.n = sample.size;
  r.m = sample.nonzero_count();
  r.case_taken = FitCase::BaselineFit;
  r.params_hat.phi = 0.0;
  auto& t = r.params_hat.theta;
  t.family = spec.family;
  t.integer_size = spec.integer_size;
  const Coordinates coords(spec, sample.max(), fixed_size);
  const Moments mo = moments(sample);

  if (!is_discrete(spec.family)) {
    if (spec.family != Family::Normal && !(sample.min() > 0.0)) {
      std::ostringstream os;
      os << "observation " << sample.min() << " lies outside the support of "
         << family_name(spec.family);
      fail(ErrorKind::domain, os.str());
    }
    ModelSpec as_zazi = spec;
    as_zazi.kind = ModelKind::Hurdle;
    const FitResult z = fit_zazi(as_zazi, sample);
    t = z.params_hat.theta;
    r.boundary = z.boundary;
    r.note = z.note;
    if (z.boundary) {
      r.loglik = kInf;
      return r;
    }
    return finish(r, sample);
  }
  if (spec.family == Family::Poisson || spec.family == Family::Geometric) {
    const double raw = spec.family == Family::Poisson ? mo.mean : 1.0 / (1.0 + mo.mean);
    t[0] = std::clamp(raw, coords.lower(0), coords.upper(0));
    r.boundary = t[0] != raw;
    return finish(r, sample);
  }
  const double scale = 1.0 / static_cast<double>(sample.size);
  ThetaObjective objective = [&](const ParameterSet& th, Vec* g) {
    return baseline_objective(th, sample, scale, g);
  };
  const ThetaRun run =
      best_start_and_optimize(objective, coords, starting_points(spec.family, sample, false), options);
  t = run.theta;
  t.integer_size = spec.integer_size;
  r.converged = run.converged;
  r.iterations = run.iterations;
  r.boundary = coords.pinned(run.theta);
  return finish(r, sample);
}

FitResult fit_integer_size(const ModelSpec& spec, const WeightedSample& sample,
                           const FitOptions& options) {
  if (!has_size_parameter(spec.family)) {
    fail(ErrorKind::unsupported, "integer-size fits need a family with a size parameter");
  }
  ModelSpec real = spec;
  real.integer_size = false;
  auto dispatch = [&](const ModelSpec& s, const FitOptions& o, std::optional<double> fixed) {
    switch (s.kind) {
      case ModelKind::Baseline: return fit_baseline(s, sample, o, fixed);
      case ModelKind::Hurdle: return fit_hurdle(s, sample, o, fixed);
      case ModelKind::ZeroInflated: return fit_zero_inflated(s, sample, o, fixed);
    }
    return fit_baseline(s, sample, o, fixed);
  };
  FitResult base = dispatch(real, options, std::nullopt);
  if (!base.theta_defined) {
    base.spec = spec;
    return base;
  }
  const double size = base.params_hat.theta[0];
  double lowest = std::max(1.0, std::ceil(spec.bounds[0].lower - 1e-12));
  if (spec.family == Family::BetaBinomial) {
    lowest = std::max(lowest, spec.kind == ModelKind::Baseline ? sample.max() : sample.nonzero().max());
  }
  std::vector<double> sizes;
  for (double k : {std::floor(size) - 1.0, std::floor(size), std::ceil(size), std::ceil(size) + 1.0}) {
    if (k >= lowest && k <= spec.bounds[0].upper &&
        std::find(sizes.begin(), sizes.end(), k) == sizes.end()) {
      sizes.push_back(k);
    }
  }
  if (sizes.empty()) sizes.push_back(std::min(std::max(lowest, std::round(size)), spec.bounds[0].upper));

  FitResult best;
  bool have = false;
  int iterations = base.iterations;
  for (double k : sizes) {
    FitOptions o = options;
    ParameterSet init = base.params_hat.theta;
    init[0] = k;
    init.integer_size = false;
    o.init = init;
    FitResult r;
    try {
      r = dispatch(spec, o, k);
    } catch (const Error&) {
      continue;
    }
    iterations += r.iterations;
    if (!have || r.loglik > best.loglik) {
      best = r;
      have = true;
    }
  }
  if (!have) fail(ErrorKind::numerical, "no integer size produced a finite likelihood");
  best.spec = spec;
  best.params_hat.theta.integer_size = true;
  best.iterations = iterations;
  return best;
}

FitResult fit(const ModelSpec& spec, const WeightedSample& sample, const FitOptions& options) {
  require_data(sample);
  if (spec.integer_size && has_size_parameter(spec.family)) {
    return fit_integer_size(spec, sample, options);
  }
  switch (spec.kind) {
    case ModelKind::Baseline: return fit_baseline(spec, sample, options);
    case ModelKind::Hurdle: return fit_hurdle(spec, sample, options);
    case ModelKind::ZeroInflated: return fit_zero_inflated(spec, sample, options);
  }
  return fit_baseline(spec, sample, options);
}

FitResult fit(const ModelSpec& spec, std::span<const double> data, const FitOptions& options) {
  if (data.empty()) fail(ErrorKind::insufficient_data, "no observations");
  const auto clean = prepare_observations(spec.family, data);
  return fit(spec, WeightedSample::from(clean), options);
}

double log_likelihood(const ModelSpec& spec, const ModelParams& params,
                      const WeightedSample& sample) {
  validate(spec, params);
  double total = 0.0;
  for (std::size_t i = 0; i < sample.values.size(); ++i) {
    const double term = model_log_density(spec, params, sample.values[i]);
    if (term == -kInf) return -kInf;
    total += sample.counts[i] * term;
  }
  return total;
}

double log_likelihood(const ModelSpec& spec, const ModelParams& params,
                      std::span<const double> data) {
  return log_likelihood(spec, params, WeightedSample::from(data));
}

}  // namespace zifit
