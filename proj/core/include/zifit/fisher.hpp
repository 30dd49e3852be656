#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "zifit/mle.hpp"
#include "zifit/models.hpp"

namespace zifit {

struct MonteCarloConfig {
  std::size_t samples = 100000;
  std::uint64_t seed = 20240601;
};

// Expected trigamma terms take the form E psi1(offset + sign * Y) with Y
// drawn from the baseline.
struct TrigammaKernel {
  double offset = 0.0;
  double sign = 0.0;
};

struct Expectation {
  double value = 0.0;
  double standard_error = 0.0;
  std::size_t samples = 0;
  std::size_t skipped = 0;
  bool exact = false;
};

// Monte Carlo estimate from one shared set of baseline draws (so repeated
// kernels see the same sample). Draws with a nonpositive kernel argument are
// skipped; more than 0.1% skipped is a numerical error.
std::vector<Expectation> expected_trigamma(const ParameterSet& theta,
                                           std::span<const TrigammaKernel> kernels,
                                           const MonteCarloConfig& mc);
Expectation expected_trigamma(const ParameterSet& theta, TrigammaKernel kernel,
                              const MonteCarloConfig& mc);

// Exact summation over the support, stopping once the remaining mass falls
// below `tail` (finite support for the beta-binomial).
Expectation expected_trigamma_exact(const ParameterSet& theta, TrigammaKernel kernel,
                                    double tail = 1e-15);

struct FisherMatrix {
  Mat matrix;
  std::optional<MonteCarloConfig> mc;
};

// Per-observation information of the baseline family.
FisherMatrix baseline_fisher(const ParameterSet& theta, const MonteCarloConfig& mc = {});

FisherMatrix fisher_hurdle(const ModelSpec& spec, const ModelParams& params,
                           const MonteCarloConfig& mc = {});
FisherMatrix fisher_zero_inflated(const ModelSpec& spec, const ModelParams& params,
                                  const MonteCarloConfig& mc = {});
FisherMatrix fisher_zazi(const ModelSpec& spec, const ModelParams& params);
FisherMatrix fisher_information(const ModelSpec& spec, const ModelParams& params,
                                const MonteCarloConfig& mc = {});

struct ZiInverse {
  Mat matrix;
  double phi_variance = 0.0;
  double d = 0.0;      // phi + (1 - phi) p0
  double delta = 0.0;  // 1 - phi p0 / d * g' F^-1 g
};

// Closed-form inverse of the zero-inflated information matrix.
ZiInverse inverse_fisher_zi(const ModelSpec& spec, const ModelParams& params,
                            const MonteCarloConfig& mc = {});

// Inverse information for any model (closed form for ZI, block form for
// hurdle and ZAZI, Cholesky-based for baselines).
Mat inverse_fisher(const ModelSpec& spec, const ModelParams& params,
                   const MonteCarloConfig& mc = {});

struct Interval {
  double lower = 0.0;
  double upper = 0.0;
};

struct ConfidenceIntervals {
  double level = 0.95;
  bool available = true;
  std::string reason;
  std::vector<std::string> names;
  std::vector<double> estimates;
  std::vector<Interval> intervals;
  std::optional<MonteCarloConfig> mc;
};

// Wald intervals estimate +- z * sqrt(diag(F^-1) / n); phi is clipped to [0, 1].
ConfidenceIntervals confidence_intervals(const FitResult& fit, double level = 0.95,
                                         const MonteCarloConfig& mc = {});

enum class ZeroAlteration { Inflated, Deflated, Neither };

std::string_view zero_alteration_name(ZeroAlteration z) noexcept;

struct ZeroAlterationTest {
  ZeroAlteration verdict = ZeroAlteration::Neither;
  Interval phi_interval;
  // Baseline zero probability at the null estimate of theta.
  double p0_at_theta_hat = 0.0;
  ParameterSet theta_null;
};

// Compares the baseline zero probability p0(theta_null) against the hurdle
// interval for phi: below it is inflation, above it deflation.
ZeroAlterationTest test_zero_alteration(const FitResult& hurdle_fit, const ParameterSet& theta_null,
                                        double level = 0.95);

// Same test with theta_null fitted by the plain baseline model on `sample`.
// Without zero alteration the hurdle collapses to the baseline, so that fit
// is the estimate of theta under the null.
ZeroAlterationTest test_zero_alteration(const FitResult& hurdle_fit, const WeightedSample& sample,
                                        double level = 0.95);

}  // namespace zifit
