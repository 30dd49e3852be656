#include "zifit/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "zifit/error.hpp"
#include "zifit/special_functions.hpp"

namespace zifit {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kHalfLog2Pi = 0.91893853320467274178;
constexpr double kTailCut = 1e-12;

std::string describe(const ParameterSet& theta) {
  std::ostringstream os;
  os << family_name(theta.family) << "(";
  for (int i = 0; i < theta.dim(); ++i) os << (i ? ", " : "") << theta[i];
  os << ")";
  return os.str();
}

[[noreturn]] void bad_parameter(const ParameterSet& theta, const char* why) {
  fail(ErrorKind::domain, "invalid parameters " + describe(theta) + ": " + why);
}

double max_support(const ParameterSet& theta) {
  return theta.family == Family::BetaBinomial ? std::floor(theta[0]) : kInf;
}

// Gamma-product pieces of p0 for the two Beta-compound families:
// p0 = exp(low - high) with high > low.
struct ZeroProbParts {
  double high;
  double low;
};

ZeroProbParts beta_zero_parts(const ParameterSet& t) {
  const double size = t[0], a = t[1], b = t[2];
  if (t.family == Family::BetaBinomial) {
    return {log_gamma(size + a + b) + log_gamma(b), log_gamma(size + b) + log_gamma(a + b)};
  }
  return {log_gamma(size + a + b) + log_gamma(a), log_gamma(size + a) + log_gamma(a + b)};
}

double poisson_draw(double mean, Rng& rng) {
  if (mean <= 0.0) return 0.0;
  if (mean > 1e12) {
    std::normal_distribution<double> z(0.0, 1.0);
    return std::max(0.0, std::round(mean + std::sqrt(mean) * z(rng)));
  }
  std::poisson_distribution<long long> d(mean);
  return static_cast<double>(d(rng));
}

double beta_draw(double a, double b, Rng& rng) {
  std::gamma_distribution<double> ga(a, 1.0), gb(b, 1.0);
  const double x = ga(rng);
  const double y = gb(rng);
  if (x + y > 0.0) return x / (x + y);
  // Both shapes tiny enough to underflow: the Beta mass sits at the ends.
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return u(rng) < a / (a + b) ? 1.0 : 0.0;
}

double neg_binomial_draw(double r, double p, Rng& rng) {
  if (p >= 1.0) return 0.0;
  if (p <= 0.0) return std::numeric_limits<double>::max();
  std::gamma_distribution<double> g(r, (1.0 - p) / p);
  return poisson_draw(g(rng), rng);
}

double inverse_cdf_draw(const std::vector<double>& cdf, Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double v = u(rng);
  const auto it = std::upper_bound(cdf.begin(), cdf.end(), v);
  return static_cast<double>(std::min<std::ptrdiff_t>(it - cdf.begin(),
                                                      static_cast<std::ptrdiff_t>(cdf.size()) - 1));
}

}  // namespace

int family_dim(Family f) noexcept {
  switch (f) {
    case Family::Poisson:
    case Family::Geometric:
    case Family::HalfNormal:
    case Family::Exponential: return 1;
    case Family::NegBinomial:
    case Family::Normal:
    case Family::LogNormal: return 2;
    case Family::BetaBinomial:
    case Family::BetaNegBinomial: return 3;
  }
  return 0;
}

std::string_view family_name(Family f) noexcept {
  switch (f) {
    case Family::Poisson: return "poisson";
    case Family::Geometric: return "geometric";
    case Family::NegBinomial: return "nb";
    case Family::BetaBinomial: return "bb";
    case Family::BetaNegBinomial: return "bnb";
    case Family::Normal: return "normal";
    case Family::LogNormal: return "lognormal";
    case Family::HalfNormal: return "halfnormal";
    case Family::Exponential: return "exponential";
  }
  return "unknown";
}

std::vector<std::string> parameter_names(Family f) {
  switch (f) {
    case Family::Poisson: return {"lambda"};
    case Family::Geometric: return {"p"};
    case Family::NegBinomial: return {"r", "p"};
    case Family::BetaBinomial: return {"n", "alpha", "beta"};
    case Family::BetaNegBinomial: return {"r", "alpha", "beta"};
    case Family::Normal:
    case Family::LogNormal: return {"mu", "sigma"};
    case Family::HalfNormal: return {"sigma"};
    case Family::Exponential: return {"lambda"};
  }
  return {};
}

ParameterKind parameter_kind(Family f, int index) noexcept {
  switch (f) {
    case Family::Geometric: return ParameterKind::Probability;
    case Family::NegBinomial:
      return index == 1 ? ParameterKind::Probability : ParameterKind::Positive;
    case Family::Normal:
    case Family::LogNormal: return index == 0 ? ParameterKind::Real : ParameterKind::Positive;
    default: return ParameterKind::Positive;
  }
}

Vec ParameterSet::vector() const {
  Vec v(dim());
  for (int i = 0; i < dim(); ++i) v[i] = (*this)[i];
  return v;
}

ParameterSet ParameterSet::from_vector(Family family, const Vec& v, bool integer_size) {
  ParameterSet t;
  t.family = family;
  t.integer_size = integer_size;
  for (int i = 0; i < family_dim(family); ++i) t[i] = v[i];
  return t;
}

ParameterSet ParameterSet::poisson(double lambda) { return {Family::Poisson, {lambda, 0, 0}}; }
ParameterSet ParameterSet::geometric(double p) { return {Family::Geometric, {p, 0, 0}}; }
ParameterSet ParameterSet::neg_binomial(double r, double p) {
  return {Family::NegBinomial, {r, p, 0}};
}
ParameterSet ParameterSet::beta_binomial(double n, double alpha, double beta) {
  return {Family::BetaBinomial, {n, alpha, beta}};
}
ParameterSet ParameterSet::beta_neg_binomial(double r, double alpha, double beta) {
  return {Family::BetaNegBinomial, {r, alpha, beta}};
}
ParameterSet ParameterSet::normal(double mu, double sigma) { return {Family::Normal, {mu, sigma, 0}}; }
ParameterSet ParameterSet::log_normal(double mu, double sigma) {
  return {Family::LogNormal, {mu, sigma, 0}};
}
ParameterSet ParameterSet::half_normal(double sigma) { return {Family::HalfNormal, {sigma, 0, 0}}; }
ParameterSet ParameterSet::exponential(double lambda) {
  return {Family::Exponential, {lambda, 0, 0}};
}

void validate(const ParameterSet& theta) {
  for (int i = 0; i < theta.dim(); ++i) {
    const double v = theta[i];
    if (!std::isfinite(v)) bad_parameter(theta, "non-finite value");
    switch (parameter_kind(theta.family, i)) {
      case ParameterKind::Positive:
        if (!(v > 0.0)) bad_parameter(theta, "parameter must be positive");
        break;
      case ParameterKind::Probability:
        if (!(v > 0.0 && v < 1.0)) bad_parameter(theta, "probability must lie in (0, 1)");
        break;
      case ParameterKind::Real: break;
    }
  }
  if (theta.integer_size && has_size_parameter(theta.family) &&
      std::fabs(theta[0] - std::round(theta[0])) > 1e-9) {
    bad_parameter(theta, "size parameter must be an integer");
  }
}

double check_observation(Family family, double y) {
  if (!std::isfinite(y)) {
    fail(ErrorKind::domain, "observation is not finite");
  }
  if (is_discrete(family)) {
    const double k = std::round(y);
    if (std::fabs(y - k) > 1e-9 || k < 0.0) {
      std::ostringstream os;
      os << "observation " << y << " is not a nonnegative integer (family "
         << family_name(family) << ")";
      fail(ErrorKind::domain, os.str());
    }
    return k;
  }
  return y;
}

bool in_support(const ParameterSet& theta, double y) {
  if (!std::isfinite(y)) return false;
  if (is_discrete(theta.family)) {
    if (y < 0.0 || y != std::floor(y)) return false;
    return y <= max_support(theta);
  }
  if (theta.family == Family::Normal) return true;
  return y > 0.0;
}

DensityKernel::DensityKernel(const ParameterSet& theta) : theta_(theta) {
  validate(theta_);
  const auto& t = theta_;
  switch (t.family) {
    case Family::Poisson:
    case Family::Exponential: c_[0] = std::log(t[0]); break;
    case Family::Geometric:
      c_[0] = std::log(t[0]);
      c_[1] = std::log1p(-t[0]);
      break;
    case Family::NegBinomial: {
      const double r = t[0], p = t[1];
      c_[0] = r * std::log(p) - log_gamma(r);
      c_[1] = std::log1p(-p);
      c_[2] = std::log(p) - digamma(r);
      break;
    }
    case Family::BetaBinomial: {
      const double n = t[0], a = t[1], b = t[2];
      const double lg_nab = log_gamma(n + a + b);
      c_[0] = log_gamma(n + 1.0) - lg_nab + log_gamma(a + b) - log_gamma(a) - log_gamma(b);
      const double dg_nab = digamma(n + a + b), dg_ab = digamma(a + b);
      c_[1] = digamma(n + 1.0) - dg_nab;
      c_[2] = dg_ab - dg_nab - digamma(a);
      c_[3] = dg_ab - dg_nab - digamma(b);
      c_[4] = std::floor(n);
      break;
    }
    case Family::BetaNegBinomial: {
      const double r = t[0], a = t[1], b = t[2];
      c_[0] = log_gamma(r + a) - log_gamma(r) - log_gamma(a) - log_gamma(b) + log_gamma(a + b);
      const double dg_ra = digamma(r + a), dg_ab = digamma(a + b);
      c_[1] = dg_ra - digamma(r);
      c_[2] = dg_ra + dg_ab - digamma(a);
      c_[3] = dg_ab - digamma(b);
      break;
    }
    case Family::Normal:
    case Family::LogNormal: c_[0] = -kHalfLog2Pi - std::log(t[1]); break;
    case Family::HalfNormal: c_[0] = 0.5 * std::log(2.0 / std::numbers::pi) - std::log(t[0]); break;
  }
}

double DensityKernel::log_density(double y) const {
  const auto& t = theta_;
  switch (t.family) {
    case Family::Poisson:
      if (y < 0.0) return -kInf;
      return y * c_[0] - t[0] - log_gamma(y + 1.0);
    case Family::Geometric:
      if (y < 0.0) return -kInf;
      return c_[0] + y * c_[1];
    case Family::NegBinomial:
      if (y < 0.0) return -kInf;
      return log_gamma(y + t[0]) - log_gamma(y + 1.0) + c_[0] + y * c_[1];
    case Family::BetaBinomial: {
      if (y < 0.0 || y > c_[4]) return -kInf;
      const double n = t[0], a = t[1], b = t[2];
      return c_[0] - log_gamma(y + 1.0) - log_gamma(n - y + 1.0) + log_gamma(y + a) +
             log_gamma(n - y + b);
    }
    case Family::BetaNegBinomial: {
      if (y < 0.0) return -kInf;
      const double r = t[0], a = t[1], b = t[2];
      return log_gamma(r + y) - log_gamma(y + 1.0) + log_gamma(y + b) -
             log_gamma(r + y + a + b) + c_[0];
    }
    case Family::Normal: {
      const double z = (y - t[0]) / t[1];
      return c_[0] - 0.5 * z * z;
    }
    case Family::LogNormal: {
      if (!(y > 0.0)) return -kInf;
      const double ly = std::log(y);
      const double z = (ly - t[0]) / t[1];
      return c_[0] - ly - 0.5 * z * z;
    }
    case Family::HalfNormal: {
      if (!(y > 0.0)) return -kInf;
      const double z = y / t[0];
      return c_[0] - 0.5 * z * z;
    }
    case Family::Exponential:
      if (!(y > 0.0)) return -kInf;
      return c_[0] - t[0] * y;
  }
  return -kInf;
}

void DensityKernel::add_score(double y, double w, Vec& g) const {
  const auto& t = theta_;
  switch (t.family) {
    case Family::Poisson: g[0] += w * (y / t[0] - 1.0); break;
    case Family::Geometric: g[0] += w * (1.0 / t[0] - y / (1.0 - t[0])); break;
    case Family::NegBinomial: {
      const double r = t[0], p = t[1];
      g[0] += w * (digamma(y + r) + c_[2]);
      g[1] += w * (r / p - y / (1.0 - p));
      break;
    }
    case Family::BetaBinomial: {
      const double n = t[0], a = t[1], b = t[2];
      const double dg_nyb = digamma(n - y + b);
      g[0] += w * (c_[1] - digamma(n - y + 1.0) + dg_nyb);
      g[1] += w * (digamma(y + a) + c_[2]);
      g[2] += w * (dg_nyb + c_[3]);
      break;
    }
    case Family::BetaNegBinomial: {
      const double r = t[0], a = t[1], b = t[2];
      const double dg_all = digamma(r + y + a + b);
      g[0] += w * (digamma(r + y) - dg_all + c_[1]);
      g[1] += w * (c_[2] - dg_all);
      g[2] += w * (digamma(y + b) - dg_all + c_[3]);
      break;
    }
    case Family::Normal: {
      const double d = y - t[0], s = t[1];
      g[0] += w * d / (s * s);
      g[1] += w * (-1.0 / s + d * d / (s * s * s));
      break;
    }
    case Family::LogNormal: {
      const double d = std::log(y) - t[0], s = t[1];
      g[0] += w * d / (s * s);
      g[1] += w * (-1.0 / s + d * d / (s * s * s));
      break;
    }
    case Family::HalfNormal: {
      const double s = t[0];
      g[0] += w * (-1.0 / s + y * y / (s * s * s));
      break;
    }
    case Family::Exponential: g[0] += w * (1.0 / t[0] - y); break;
  }
}

double log_density(const ParameterSet& theta, double y) {
  validate(theta);
  if (is_discrete(theta.family)) y = check_observation(theta.family, y);
  if (!in_support(theta, y)) return -kInf;
  return DensityKernel(theta).log_density(y);
}

Vec grad_log_density(const ParameterSet& theta, double y) {
  validate(theta);
  if (is_discrete(theta.family)) y = check_observation(theta.family, y);
  if (!in_support(theta, y)) {
    fail(ErrorKind::domain, "gradient requested outside the support of " + describe(theta));
  }
  Vec g = Vec::Zero(theta.dim());
  DensityKernel(theta).add_score(y, 1.0, g);
  return g;
}

double log_zero_prob(const ParameterSet& theta) {
  validate(theta);
  const auto& t = theta;
  switch (t.family) {
    case Family::Poisson: return -t[0];
    case Family::Geometric: return std::log(t[0]);
    case Family::NegBinomial: return t[0] * std::log(t[1]);
    case Family::BetaBinomial:
    case Family::BetaNegBinomial: {
      const auto parts = beta_zero_parts(t);
      return std::min(0.0, parts.low - parts.high);
    }
    default: return -kInf;
  }
}

double zero_prob(const ParameterSet& theta) { return std::exp(log_zero_prob(theta)); }

double log1m_zero_prob(const ParameterSet& theta) {
  validate(theta);
  switch (theta.family) {
    case Family::BetaBinomial:
    case Family::BetaNegBinomial: {
      const auto parts = beta_zero_parts(theta);
      if (parts.low >= parts.high) return -kInf;
      // ln(e^high - e^low) - high, with the large common term cancelled
      // before rounding.
      return log1m_exp(parts.low - parts.high);
    }
    default: {
      const double lp0 = log_zero_prob(theta);
      return lp0 == -kInf ? 0.0 : log1m_exp(lp0);
    }
  }
}

Vec grad_log_zero_prob(const ParameterSet& theta) {
  validate(theta);
  const auto& t = theta;
  Vec g(t.dim());
  switch (t.family) {
    case Family::Poisson: g[0] = -1.0; break;
    case Family::Geometric: g[0] = 1.0 / t[0]; break;
    case Family::NegBinomial:
      g[0] = std::log(t[1]);
      g[1] = t[0] / t[1];
      break;
    case Family::BetaBinomial: {
      const double n = t[0], a = t[1], b = t[2];
      const double dg_nab = digamma(n + a + b), dg_nb = digamma(n + b), dg_ab = digamma(a + b);
      g[0] = dg_nb - dg_nab;
      g[1] = dg_ab - dg_nab;
      g[2] = dg_nb + dg_ab - dg_nab - digamma(b);
      break;
    }
    case Family::BetaNegBinomial: {
      const double r = t[0], a = t[1], b = t[2];
      const double dg_rab = digamma(r + a + b), dg_ra = digamma(r + a), dg_ab = digamma(a + b);
      g[0] = dg_ra - dg_rab;
      g[1] = dg_ra + dg_ab - dg_rab - digamma(a);
      g[2] = dg_ab - dg_rab;
      break;
    }
    default:
      fail(ErrorKind::unsupported,
           std::string("zero probability is identically 0 for the continuous family ") +
               std::string(family_name(t.family)));
  }
  return g;
}

std::vector<double> discrete_cdf_table(const ParameterSet& theta, std::size_t last) {
  validate(theta);
  if (!is_discrete(theta.family)) {
    fail(ErrorKind::unsupported, "cumulative tables exist only for discrete families");
  }
  const DensityKernel kernel(theta);
  std::vector<double> table;
  table.reserve(last + 1);
  if (theta.family == Family::BetaBinomial) {
    const auto top = static_cast<std::size_t>(std::floor(theta[0]));
    std::vector<double> mass(top + 1);
    double total = 0.0;
    for (std::size_t k = 0; k <= top; ++k) {
      mass[k] = std::exp(kernel.log_density(static_cast<double>(k)));
      total += mass[k];
    }
    double cum = 0.0;
    for (std::size_t k = 0; k <= last; ++k) {
      if (k <= top) cum += mass[k] / total;
      table.push_back(k >= top ? 1.0 : std::min(cum, 1.0));
    }
    return table;
  }
  double cum = 0.0;
  bool saturated = false;
  for (std::size_t k = 0; k <= last; ++k) {
    if (!saturated) {
      cum += std::exp(kernel.log_density(static_cast<double>(k)));
      if (cum > 1.0 - kTailCut) saturated = true;
    }
    table.push_back(saturated ? 1.0 : cum);
  }
  return table;
}

double baseline_cdf(const ParameterSet& theta, double y) {
  validate(theta);
  const auto& t = theta;
  if (is_discrete(t.family)) {
    if (y < 0.0) return 0.0;
    const double k = std::floor(y);
    if (k >= max_support(t)) return 1.0;
    // The tail beyond a few million terms is never needed in practice; guard
    // the allocation anyway.
    const auto last = static_cast<std::size_t>(std::min(k, 5e7));
    return discrete_cdf_table(t, last).back();
  }
  switch (t.family) {
    case Family::Normal: return normal_cdf((y - t[0]) / t[1]);
    case Family::LogNormal: return y <= 0.0 ? 0.0 : normal_cdf((std::log(y) - t[0]) / t[1]);
    case Family::HalfNormal:
      return y <= 0.0 ? 0.0 : std::erf(y / (t[0] * std::numbers::sqrt2));
    case Family::Exponential: return y <= 0.0 ? 0.0 : -std::expm1(-t[0] * y);
    default: break;
  }
  return 0.0;
}

double draw_baseline(const ParameterSet& theta, Rng& rng) {
  const auto& t = theta;
  switch (t.family) {
    case Family::Poisson: return poisson_draw(t[0], rng);
    case Family::Geometric: {
      std::geometric_distribution<long long> d(t[0]);
      return static_cast<double>(d(rng));
    }
    case Family::NegBinomial: return neg_binomial_draw(t[0], t[1], rng);
    case Family::BetaBinomial: {
      const double n = t[0];
      if (n == std::floor(n)) {
        std::binomial_distribution<long long> d(static_cast<long long>(n),
                                                beta_draw(t[1], t[2], rng));
        return static_cast<double>(d(rng));
      }
      return inverse_cdf_draw(discrete_cdf_table(t, static_cast<std::size_t>(std::floor(n))), rng);
    }
    case Family::BetaNegBinomial: return neg_binomial_draw(t[0], beta_draw(t[1], t[2], rng), rng);
    case Family::Normal: {
      std::normal_distribution<double> d(t[0], t[1]);
      return d(rng);
    }
    case Family::LogNormal: {
      std::lognormal_distribution<double> d(t[0], t[1]);
      return d(rng);
    }
    case Family::HalfNormal: {
      std::normal_distribution<double> d(0.0, t[0]);
      return std::fabs(d(rng));
    }
    case Family::Exponential: {
      std::exponential_distribution<double> d(t[0]);
      return d(rng);
    }
  }
  return 0.0;
}

std::vector<double> sample_baseline(const ParameterSet& theta, std::size_t count, Rng& rng) {
  validate(theta);
  std::vector<double> out;
  out.reserve(count);
  const auto& t = theta;
  if (t.family == Family::BetaBinomial && t[0] != std::floor(t[0])) {
    const auto table = discrete_cdf_table(t, static_cast<std::size_t>(std::floor(t[0])));
    for (std::size_t i = 0; i < count; ++i) out.push_back(inverse_cdf_draw(table, rng));
    return out;
  }
  for (std::size_t i = 0; i < count; ++i) out.push_back(draw_baseline(t, rng));
  return out;
}

}  // namespace zifit
