#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "zifit/models.hpp"
#include "zifit/optimizer.hpp"
#include "zifit/sample.hpp"

namespace zifit {

struct FitOptions {
  double gradient_tolerance = 1e-8;
  int max_iterations = 500;
  // Starting point for the baseline parameters; moment-based when absent.
  std::optional<ParameterSet> init;
};

enum class FitCase { HurdleClosedForm, ZICase1, ZICase2, ClosedFormContinuous, BaselineFit };

std::string_view fit_case_name(FitCase c) noexcept;

struct FitResult {
  ModelSpec spec;
  ModelParams params_hat;
  double loglik = 0.0;
  std::size_t n = 0;
  std::size_t m = 0;  // nonzero observations
  FitCase case_taken = FitCase::BaselineFit;
  bool converged = true;
  int iterations = 0;
  // False when the data carry no information on theta (no nonzero values).
  bool theta_defined = true;
  // Estimate on the edge of the parameter space (sigma = 0, a pinned bound).
  bool boundary = false;
  std::string note;
};

// Fits any model; dispatches on kind, family and the integer-size flag.
FitResult fit(const ModelSpec& spec, std::span<const double> data, const FitOptions& options = {});
FitResult fit(const ModelSpec& spec, const WeightedSample& sample, const FitOptions& options = {});

// Maximizes sum log f(y) - m log(1 - p0) over nonzero observations. Only
// the size parameter may be held fixed, through `fixed_size`.
struct TruncatedFit {
  ParameterSet theta;
  bool converged = true;
  int iterations = 0;
  bool boundary = false;
};
TruncatedFit fit_truncated(Family family, const WeightedSample& nonzero, const ModelSpec& spec,
                           const FitOptions& options = {},
                           std::optional<double> fixed_size = std::nullopt);

FitResult fit_hurdle(const ModelSpec& spec, const WeightedSample& sample,
                     const FitOptions& options = {}, std::optional<double> fixed_size = std::nullopt);
FitResult fit_zero_inflated(const ModelSpec& spec, const WeightedSample& sample,
                            const FitOptions& options = {},
                            std::optional<double> fixed_size = std::nullopt);
FitResult fit_zazi(const ModelSpec& spec, const WeightedSample& sample);
FitResult fit_baseline(const ModelSpec& spec, const WeightedSample& sample,
                       const FitOptions& options = {},
                       std::optional<double> fixed_size = std::nullopt);
// Real-valued fit first, then the best integer size among the neighbours of
// the real estimate, with the remaining parameters re-optimized.
FitResult fit_integer_size(const ModelSpec& spec, const WeightedSample& sample,
                           const FitOptions& options = {});

double log_likelihood(const ModelSpec& spec, const ModelParams& params,
                      std::span<const double> data);
double log_likelihood(const ModelSpec& spec, const ModelParams& params,
                      const WeightedSample& sample);

}  // namespace zifit
