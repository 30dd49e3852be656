#include "zifit/fisher.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/LU>

#include "zifit/error.hpp"
#include "zifit/special_functions.hpp"

namespace zifit {
namespace {

void require_interior_phi(double phi) {
  if (!(phi > 0.0 && phi < 1.0)) {
    std::ostringstream os;
    os << "phi = " << phi << " lies on the boundary; the information diverges there";
    fail(ErrorKind::boundary, os.str());
  }
}

// LU rather than Cholesky: with a real-valued beta-binomial n the matrix
// -E[Hessian] need not be definite, and only invertibility is required.
Mat symmetric_inverse(const Mat& f, const char* what) {
  const Eigen::FullPivLU<Mat> lu(f);
  if (!lu.isInvertible() || lu.rcond() < 1e-14) {
    fail(ErrorKind::singularity, std::string(what) + " is singular");
  }
  Mat inv = lu.inverse();
  if (!inv.allFinite()) fail(ErrorKind::singularity, std::string(what) + " is singular");
  return 0.5 * (inv + inv.transpose());
}

double kernel_argument(TrigammaKernel k, double y) { return k.offset + k.sign * y; }

}  // namespace

std::vector<Expectation> expected_trigamma(const ParameterSet& theta,
                                           std::span<const TrigammaKernel> kernels,
                                           const MonteCarloConfig& mc) {
  validate(theta);
  if (mc.samples < 1) fail(ErrorKind::domain, "Monte Carlo needs at least one draw");
  std::vector<Expectation> out(kernels.size());
  bool all_constant = true;
  for (const auto& k : kernels) all_constant = all_constant && k.sign == 0.0;
  if (all_constant) {
    for (std::size_t j = 0; j < kernels.size(); ++j) {
      out[j].value = trigamma(kernels[j].offset);
      out[j].exact = true;
      out[j].samples = mc.samples;
    }
    return out;
  }
  Rng rng = make_rng(mc.seed, 0);
  const auto draws = sample_baseline(theta, mc.samples, rng);
  const WeightedSample s = WeightedSample::from(draws);
  for (std::size_t j = 0; j < kernels.size(); ++j) {
    double sum = 0.0, sum_sq = 0.0, used = 0.0;
    std::size_t skipped = 0;
    for (std::size_t i = 0; i < s.values.size(); ++i) {
      const double arg = kernel_argument(kernels[j], s.values[i]);
      if (!(arg > 0.0)) {
        skipped += static_cast<std::size_t>(s.counts[i]);
        continue;
      }
      const double v = trigamma(arg);
      sum += s.counts[i] * v;
      sum_sq += s.counts[i] * v * v;
      used += s.counts[i];
    }
    if (static_cast<double>(skipped) > 1e-3 * static_cast<double>(mc.samples) || used == 0.0) {
      std::ostringstream os;
      os << "expected trigamma skipped " << skipped << " of " << mc.samples
         << " draws with a nonpositive argument";
      fail(ErrorKind::numerical, os.str());
    }
    const double mean = sum / used;
    const double var = std::max(0.0, sum_sq / used - mean * mean);
    out[j].value = mean;
    out[j].standard_error = std::sqrt(var / used);
    out[j].samples = mc.samples;
    out[j].skipped = skipped;
  }
  return out;
}

Expectation expected_trigamma(const ParameterSet& theta, TrigammaKernel kernel,
                              const MonteCarloConfig& mc) {
  return expected_trigamma(theta, std::span<const TrigammaKernel>(&kernel, 1), mc).front();
}

Expectation expected_trigamma_exact(const ParameterSet& theta, TrigammaKernel kernel, double tail) {
  validate(theta);
  if (!is_discrete(theta.family)) {
    fail(ErrorKind::unsupported, "exact expectations need a discrete family");
  }
  const DensityKernel density(theta);
  Expectation e;
  e.exact = true;
  if (theta.family == Family::BetaBinomial) {
    const auto top = static_cast<std::size_t>(std::floor(theta[0]));
    double total = 0.0, sum = 0.0;
    for (std::size_t y = 0; y <= top; ++y) {
      const double yy = static_cast<double>(y);
      const double f = std::exp(density.log_density(yy));
      const double arg = kernel_argument(kernel, yy);
      if (!(arg > 0.0)) continue;
      total += f;
      sum += f * trigamma(arg);
    }
    e.value = sum / total;
    return e;
  }
  double cum = 0.0, sum = 0.0, last = 0.0;
  constexpr std::size_t kMaxTerms = 20000000;
  for (std::size_t y = 0; y < kMaxTerms; ++y) {
    const double yy = static_cast<double>(y);
    const double f = std::exp(density.log_density(yy));
    const double arg = kernel_argument(kernel, yy);
    if (arg > 0.0) {
      last = trigamma(arg);
      sum += f * last;
    }
    cum += f;
    if (1.0 - cum < tail && y > 0) break;
  }
  // Remaining mass enters at the last kernel value; trigamma is monotone so
  // this bounds the truncation error.
  e.value = sum + std::max(0.0, 1.0 - cum) * last;
  return e;
}

FisherMatrix baseline_fisher(const ParameterSet& theta, const MonteCarloConfig& mc) {
  validate(theta);
  const auto& t = theta;
  FisherMatrix out;
  Mat& f = out.matrix;
  f = Mat::Zero(t.dim(), t.dim());
  switch (t.family) {
    case Family::Poisson: f(0, 0) = 1.0 / t[0]; break;
    case Family::Geometric: f(0, 0) = 1.0 / (t[0] * t[0] * (1.0 - t[0])); break;
    case Family::NegBinomial: {
      const double r = t[0], p = t[1];
      const double e = expected_trigamma(t, TrigammaKernel{r, 1.0}, mc).value;
      f(0, 0) = trigamma(r) - e;
      f(0, 1) = f(1, 0) = -1.0 / p;
      f(1, 1) = r / (p * p * (1.0 - p));
      out.mc = mc;
      break;
    }
    case Family::BetaBinomial: {
      const double n = t[0], a = t[1], b = t[2];
      const double e1 = expected_trigamma_exact(t, {n + 1.0, -1.0}).value;
      const double e2 = expected_trigamma_exact(t, {n + b, -1.0}).value;
      const double e3 = expected_trigamma_exact(t, {a, 1.0}).value;
      const double t_nab = trigamma(n + a + b), t_ab = trigamma(a + b);
      f(0, 0) = -(trigamma(n + 1.0) - e1 + e2 - t_nab);
      f(0, 1) = f(1, 0) = t_nab;
      f(0, 2) = f(2, 0) = -(e2 - t_nab);
      f(1, 1) = -(e3 - t_nab + t_ab - trigamma(a));
      f(1, 2) = f(2, 1) = -(t_ab - t_nab);
      f(2, 2) = -(e2 - t_nab + t_ab - trigamma(b));
      break;
    }
    case Family::BetaNegBinomial: {
      const double r = t[0], a = t[1], b = t[2];
      const std::array<TrigammaKernel, 3> kernels = {
          TrigammaKernel{r, 1.0}, TrigammaKernel{r + a + b, 1.0}, TrigammaKernel{b, 1.0}};
      const auto e = expected_trigamma(t, kernels, mc);
      const double e1 = e[0].value, e2 = e[1].value, e3 = e[2].value;
      const double t_ra = trigamma(r + a), t_ab = trigamma(a + b);
      f(0, 0) = -(e1 - trigamma(r) + t_ra - e2);
      f(0, 1) = f(1, 0) = -(t_ra - e2);
      f(0, 2) = f(2, 0) = e2;
      f(1, 1) = -(t_ra - e2 + t_ab - trigamma(a));
      f(1, 2) = f(2, 1) = -(t_ab - e2);
      f(2, 2) = -(e3 - e2 + t_ab - trigamma(b));
      out.mc = mc;
      break;
    }
    case Family::Normal:
    case Family::LogNormal: {
      const double s2 = t[1] * t[1];
      f(0, 0) = 1.0 / s2;
      f(1, 1) = 2.0 / s2;
      break;
    }
    case Family::HalfNormal: f(0, 0) = 2.0 / (t[0] * t[0]); break;
    case Family::Exponential: f(0, 0) = 1.0 / (t[0] * t[0]); break;
  }
  return out;
}

FisherMatrix fisher_zazi(const ModelSpec& spec, const ModelParams& params) {
  validate(spec, params);
  if (is_discrete(spec.family)) {
    fail(ErrorKind::unsupported, "the ZAZI information applies to continuous families only");
  }
  require_interior_phi(params.phi);
  const double phi = params.phi;
  const FisherMatrix base = baseline_fisher(params.theta);
  const int d = params.theta.dim();
  FisherMatrix out;
  out.matrix = Mat::Zero(d + 1, d + 1);
  out.matrix(0, 0) = 1.0 / (phi * (1.0 - phi));
  out.matrix.bottomRightCorner(d, d) = (1.0 - phi) * base.matrix;
  return out;
}

FisherMatrix fisher_hurdle(const ModelSpec& spec, const ModelParams& params,
                           const MonteCarloConfig& mc) {
  validate(spec, params);
  if (!is_discrete(spec.family)) return fisher_zazi(spec, params);
  require_interior_phi(params.phi);
  const auto& theta = params.theta;
  const double phi = params.phi;
  const FisherMatrix base = baseline_fisher(theta, mc);
  const Vec g = grad_log_zero_prob(theta);
  const double lp0 = log_zero_prob(theta);
  const double l1m = log1m_zero_prob(theta);
  const double odds = std::exp(lp0 - l1m);
  const int d = theta.dim();
  FisherMatrix out;
  out.mc = base.mc;
  out.matrix = Mat::Zero(d + 1, d + 1);
  out.matrix(0, 0) = 1.0 / (phi * (1.0 - phi));
  out.matrix.bottomRightCorner(d, d) =
      (1.0 - phi) * std::exp(-l1m) * (base.matrix - odds * g * g.transpose());
  return out;
}

FisherMatrix fisher_zero_inflated(const ModelSpec& spec, const ModelParams& params,
                                  const MonteCarloConfig& mc) {
  validate(spec, params);
  if (!is_discrete(spec.family)) {
    fail(ErrorKind::unsupported,
         "continuous zero-inflated models are ZAZI models; use the ZAZI information");
  }
  require_interior_phi(params.phi);
  const auto& theta = params.theta;
  const double phi = params.phi;
  const FisherMatrix base = baseline_fisher(theta, mc);
  const Vec g = grad_log_zero_prob(theta);
  const double p0 = zero_prob(theta);
  const double d0 = phi + (1.0 - phi) * p0;
  const int d = theta.dim();
  FisherMatrix out;
  out.mc = base.mc;
  out.matrix = Mat::Zero(d + 1, d + 1);
  out.matrix(0, 0) = (1.0 - p0) / (d0 * (1.0 - phi));
  const Vec cross = (p0 / d0) * g;
  out.matrix.block(1, 0, d, 1) = cross;
  out.matrix.block(0, 1, 1, d) = cross.transpose();
  out.matrix.bottomRightCorner(d, d) =
      (1.0 - phi) * (base.matrix - (phi * p0 / d0) * g * g.transpose());
  return out;
}

FisherMatrix fisher_information(const ModelSpec& spec, const ModelParams& params,
                                const MonteCarloConfig& mc) {
  switch (spec.kind) {
    case ModelKind::Baseline: return baseline_fisher(params.theta, mc);
    case ModelKind::Hurdle: return fisher_hurdle(spec, params, mc);
    case ModelKind::ZeroInflated:
      return is_discrete(spec.family) ? fisher_zero_inflated(spec, params, mc)
                                      : fisher_zazi(spec, params);
  }
  return baseline_fisher(params.theta, mc);
}

ZiInverse inverse_fisher_zi(const ModelSpec& spec, const ModelParams& params,
                            const MonteCarloConfig& mc) {
  validate(spec, params);
  if (!is_discrete(spec.family)) {
    fail(ErrorKind::unsupported, "the closed-form zero-inflated inverse needs a discrete family");
  }
  require_interior_phi(params.phi);
  const auto& theta = params.theta;
  const double phi = params.phi;
  const Mat f_inv = symmetric_inverse(baseline_fisher(theta, mc).matrix, "baseline information");
  const Vec g = grad_log_zero_prob(theta);
  const double p0 = zero_prob(theta);
  ZiInverse out;
  out.d = phi + (1.0 - phi) * p0;
  const Vec v = f_inv * g;
  const double c = phi * p0 / out.d;
  out.delta = 1.0 - c * g.dot(v);
  const double denom = out.d * out.delta - p0;
  if (std::fabs(out.delta) < 1e-14 || std::fabs(denom) < 1e-300 || !std::isfinite(out.delta)) {
    fail(ErrorKind::singularity, "zero-inflated information is singular (delta vanishes)");
  }
  out.phi_variance = phi * (1.0 - phi) * out.d * out.delta / denom;
  const int d = theta.dim();
  // Inverse of the theta block and its coupling to phi.
  const Mat block_inv = (f_inv + (c / out.delta) * v * v.transpose()) / (1.0 - phi);
  const Vec coupling = (p0 / (out.d * (1.0 - phi) * out.delta)) * v;
  out.matrix = Mat::Zero(d + 1, d + 1);
  out.matrix(0, 0) = out.phi_variance;
  out.matrix.block(1, 0, d, 1) = -out.phi_variance * coupling;
  out.matrix.block(0, 1, 1, d) = -out.phi_variance * coupling.transpose();
  out.matrix.bottomRightCorner(d, d) =
      block_inv + out.phi_variance * coupling * coupling.transpose();
  return out;
}

Mat inverse_fisher(const ModelSpec& spec, const ModelParams& params, const MonteCarloConfig& mc) {
  if (spec.kind == ModelKind::Baseline) {
    return symmetric_inverse(baseline_fisher(params.theta, mc).matrix, "information matrix");
  }
  if (spec.kind == ModelKind::ZeroInflated && is_discrete(spec.family)) {
    return inverse_fisher_zi(spec, params, mc).matrix;
  }
  const FisherMatrix f = fisher_information(spec, params, mc);
  const int d = params.theta.dim();
  Mat inv = Mat::Zero(d + 1, d + 1);
  inv(0, 0) = params.phi * (1.0 - params.phi);
  inv.bottomRightCorner(d, d) =
      symmetric_inverse(f.matrix.bottomRightCorner(d, d), "information matrix");
  return inv;
}

ConfidenceIntervals confidence_intervals(const FitResult& fit, double level,
                                         const MonteCarloConfig& mc) {
  if (!(level > 0.0 && level < 1.0)) fail(ErrorKind::domain, "confidence level must lie in (0, 1)");
  ConfidenceIntervals ci;
  ci.level = level;
  ci.names = model_parameter_names(fit.spec);
  const Vec est = to_vector(fit.spec, fit.params_hat);
  ci.estimates.assign(est.data(), est.data() + est.size());
  auto unavailable = [&](std::string reason) {
    ci.available = false;
    ci.reason = std::move(reason);
    ci.intervals.clear();
    return ci;
  };
  if (!fit.theta_defined) return unavailable("theta is not identified (no nonzero observations)");
  if (fit.spec.has_phi() && (fit.params_hat.phi <= 0.0 || fit.params_hat.phi >= 1.0)) {
    return unavailable("phi estimate lies on the boundary of [0, 1]");
  }
  if (!std::isfinite(fit.loglik)) return unavailable("degenerate fit (zero scale estimate)");
  Mat inv;
  try {
    inv = inverse_fisher(fit.spec, fit.params_hat, mc);
  } catch (const Error& e) {
    return unavailable(e.what());
  }
  if (fit.spec.family == Family::NegBinomial || fit.spec.family == Family::BetaNegBinomial) {
    ci.mc = mc;
  }
  const double z = normal_quantile(0.5 + 0.5 * level);
  const double n = static_cast<double>(fit.n);
  for (int i = 0; i < est.size(); ++i) {
    const double var = inv(i, i);
    if (!(var >= 0.0) || !std::isfinite(var)) {
      return unavailable("inverse information has a negative diagonal entry");
    }
    const double half = z * std::sqrt(var / n);
    Interval iv{est[i] - half, est[i] + half};
    if (fit.spec.has_phi() && i == 0) {
      iv.lower = std::max(0.0, iv.lower);
      iv.upper = std::min(1.0, iv.upper);
    }
    ci.intervals.push_back(iv);
  }
  return ci;
}

std::string_view zero_alteration_name(ZeroAlteration z) noexcept {
  switch (z) {
    case ZeroAlteration::Inflated: return "inflated";
    case ZeroAlteration::Deflated: return "deflated";
    case ZeroAlteration::Neither: return "neither";
  }
  return "unknown";
}

ZeroAlterationTest test_zero_alteration(const FitResult& hurdle_fit, const ParameterSet& theta_null,
                                        double level) {
  const FitResult& fit = hurdle_fit;
  if (fit.spec.kind != ModelKind::Hurdle || !is_discrete(fit.spec.family)) {
    fail(ErrorKind::unsupported, "the zero-alteration test needs a discrete hurdle fit");
  }
  if (theta_null.family != fit.spec.family) {
    fail(ErrorKind::input, "null parameters belong to a different family than the hurdle fit");
  }
  if (!fit.theta_defined || fit.params_hat.phi <= 0.0 || fit.params_hat.phi >= 1.0) {
    fail(ErrorKind::boundary, "no test available: the hurdle fit lies on the boundary");
  }
  if (!(level > 0.0 && level < 1.0)) fail(ErrorKind::domain, "confidence level must lie in (0, 1)");
  const double phi = fit.params_hat.phi;
  const double z = normal_quantile(0.5 + 0.5 * level);
  const double half = z * std::sqrt(phi * (1.0 - phi) / static_cast<double>(fit.n));
  ZeroAlterationTest out;
  out.phi_interval = {std::max(0.0, phi - half), std::min(1.0, phi + half)};
  out.theta_null = theta_null;
  out.p0_at_theta_hat = zero_prob(theta_null);
  if (out.p0_at_theta_hat < out.phi_interval.lower) {
    out.verdict = ZeroAlteration::Inflated;
  } else if (out.p0_at_theta_hat > out.phi_interval.upper) {
    out.verdict = ZeroAlteration::Deflated;
  }
  return out;
}

ZeroAlterationTest test_zero_alteration(const FitResult& hurdle_fit, const WeightedSample& sample,
                                        double level) {
  if (sample.size != hurdle_fit.n) {
    fail(ErrorKind::input, "the sample does not match the hurdle fit");
  }
  const ModelSpec null_spec = ModelSpec::baseline(hurdle_fit.spec.family, hurdle_fit.spec.integer_size);
  return test_zero_alteration(hurdle_fit, fit(null_spec, sample).params_hat.theta, level);
}

}  // namespace zifit
