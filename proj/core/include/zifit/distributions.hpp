#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "zifit/random.hpp"

namespace zifit {

// Parameter vectors never exceed four entries (phi plus three baseline
// parameters), so fixed-capacity Eigen storage avoids heap traffic.
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 4, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 4, 4>;

enum class Family {
  Poisson,
  Geometric,
  NegBinomial,
  BetaBinomial,
  BetaNegBinomial,
  Normal,
  LogNormal,
  HalfNormal,
  Exponential,
};

inline constexpr std::array<Family, 9> kAllFamilies = {
    Family::Poisson,    Family::Geometric, Family::NegBinomial,
    Family::BetaBinomial, Family::BetaNegBinomial, Family::Normal,
    Family::LogNormal,  Family::HalfNormal, Family::Exponential,
};

constexpr bool is_discrete(Family f) noexcept {
  return f == Family::Poisson || f == Family::Geometric || f == Family::NegBinomial ||
         f == Family::BetaBinomial || f == Family::BetaNegBinomial;
}

// True for the families whose first parameter is a size (n or r) that may be
// restricted to integers.
constexpr bool has_size_parameter(Family f) noexcept {
  return f == Family::NegBinomial || f == Family::BetaBinomial ||
         f == Family::BetaNegBinomial;
}

int family_dim(Family f) noexcept;
std::string_view family_name(Family f) noexcept;
std::vector<std::string> parameter_names(Family f);

enum class ParameterKind { Positive, Probability, Real };
ParameterKind parameter_kind(Family f, int index) noexcept;

// Baseline parameters in family order:
//   Poisson (lambda), Geometric (p), NegBinomial (r, p), BetaBinomial
//   (n, alpha, beta), BetaNegBinomial (r, alpha, beta), Normal and LogNormal
//   (mu, sigma), HalfNormal (sigma), Exponential (lambda).
// NegBinomial uses the success-probability convention: P(Y=0) = p^r and the
// mass carries (1-p)^y.
struct ParameterSet {
  Family family = Family::Poisson;
  std::array<double, 3> values{};
  bool integer_size = false;

  int dim() const noexcept { return family_dim(family); }
  double operator[](int i) const { return values[static_cast<std::size_t>(i)]; }
  double& operator[](int i) { return values[static_cast<std::size_t>(i)]; }

  Vec vector() const;
  static ParameterSet from_vector(Family family, const Vec& v, bool integer_size = false);

  static ParameterSet poisson(double lambda);
  static ParameterSet geometric(double p);
  static ParameterSet neg_binomial(double r, double p);
  static ParameterSet beta_binomial(double n, double alpha, double beta);
  static ParameterSet beta_neg_binomial(double r, double alpha, double beta);
  static ParameterSet normal(double mu, double sigma);
  static ParameterSet log_normal(double mu, double sigma);
  static ParameterSet half_normal(double sigma);
  static ParameterSet exponential(double lambda);
};

// Throws a domain error if any constraint is violated.
void validate(const ParameterSet& theta);

// Observation checks. Discrete families accept values within 1e-9 of a
// nonnegative integer; anything else is a domain error.
bool in_support(const ParameterSet& theta, double y);
double check_observation(Family family, double y);

double log_density(const ParameterSet& theta, double y);
double zero_prob(const ParameterSet& theta);
double log_zero_prob(const ParameterSet& theta);
// ln(1 - p0), with the Gamma-product families routed through log_diff_exp.
double log1m_zero_prob(const ParameterSet& theta);

Vec grad_log_density(const ParameterSet& theta, double y);
Vec grad_log_zero_prob(const ParameterSet& theta);

double baseline_cdf(const ParameterSet& theta, double y);

// Cumulative probabilities P(Y <= k) for k = 0..last (discrete families).
// Entries snap to 1 once the running mass passes 1 - 1e-12; beta-binomial
// with non-integer n is normalized over {0..floor(n)}.
std::vector<double> discrete_cdf_table(const ParameterSet& theta, std::size_t last);

double draw_baseline(const ParameterSet& theta, Rng& rng);
std::vector<double> sample_baseline(const ParameterSet& theta, std::size_t count, Rng& rng);

// Log density and score with the parameter-only terms hoisted, for the
// likelihood loops in the fitters.
class DensityKernel {
 public:
  explicit DensityKernel(const ParameterSet& theta);

  const ParameterSet& theta() const noexcept { return theta_; }
  double log_density(double y) const;
  // Adds weight * d/dtheta log f(y) into grad.
  void add_score(double y, double weight, Vec& grad) const;

 private:
  ParameterSet theta_;
  std::array<double, 6> c_{};
};

}  // namespace zifit
