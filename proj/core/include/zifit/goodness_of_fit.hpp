#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "zifit/mle.hpp"
#include "zifit/models.hpp"
#include "zifit/sample.hpp"

namespace zifit {

// A CDF given by callables plus the points where it may jump. A missing
// left_limit means the CDF is continuous.
struct CdfView {
  std::function<double(double)> cdf;
  std::function<double(double)> left_limit;
  std::vector<double> jumps;
};

// sup_y |F_n(y) - F(y)|, exact: both one-sided gaps are checked at every
// sample point and every jump point of F inside the sample range.
double ks_statistic(std::span<const double> data, const CdfView& cdf);
double ks_statistic(const WeightedSample& sample, const ModelCdf& cdf);
double ks_statistic(std::span<const double> data, const ModelSpec& spec, const ModelParams& params);

// Exact sup_y |F(y) - G(y)| between two model CDFs over the integers (discrete)
// or over a fine grid plus the atom at 0 (continuous).
double cdf_distance(const ModelSpec& a, const ModelParams& pa, const ModelSpec& b,
                    const ModelParams& pb);

enum class KsAlgorithm { A, B };

std::string_view ks_algorithm_name(KsAlgorithm a) noexcept;

struct BootstrapOptions {
  std::size_t B = 1000;
  std::uint64_t seed = 1;
  // 0 reads ZIFIT_THREADS, defaulting to 1. Results never depend on it.
  unsigned threads = 0;
  FitOptions fit;
};

struct KsReport {
  KsAlgorithm algorithm = KsAlgorithm::A;
  double statistic = 0.0;
  double p_value = 1.0;
  std::size_t B = 0;       // requested replicates
  std::size_t failed = 0;  // dropped replicates
  std::vector<double> replicate_statistics;
  std::uint64_t seed = 0;
  FitResult fit;
};

// Parametric bootstrap: refit on a resample, simulate from that fit and
// measure the simulated sample against the resample's fitted CDF (A) or
// against a fit to the simulated sample itself (B). The p-value counts
// replicates strictly above the observed statistic.
KsReport kstest_A(std::span<const double> data, const ModelSpec& spec, const BootstrapOptions& opts);
KsReport kstest_B(std::span<const double> data, const ModelSpec& spec, const BootstrapOptions& opts);
KsReport kstest(std::span<const double> data, const ModelSpec& spec, KsAlgorithm algorithm,
                const BootstrapOptions& opts);

struct LrtReport {
  double lambda = 0.0;  // loglik(H0) - loglik(H1)
  double p_value = 1.0;
  std::size_t B = 0;
  std::size_t failed = 0;
  std::vector<double> replicate_lambdas;
  std::uint64_t seed = 0;
  // Replicates within this distance of lambda count as ties (not evidence
  // for H1); it absorbs optimizer noise between equivalent models.
  double tie_tolerance = 0.0;
  ModelSpec h0;
  ModelSpec h1;
  FitResult fit_h0;
  FitResult fit_h1;
};

// A small p-value means H1 fits significantly better than H0.
LrtReport lrt_bootstrap(std::span<const double> data, const ModelSpec& h0, const ModelSpec& h1,
                        const BootstrapOptions& opts);

struct CandidateOutcome {
  ModelSpec spec;
  std::optional<KsReport> ks;
  std::string failure;  // why the candidate could not be tested
  bool passing = false;
};

struct SelectionReport {
  double threshold = 0.05;
  KsAlgorithm algorithm = KsAlgorithm::A;
  std::vector<CandidateOutcome> candidates;
  std::vector<std::size_t> passing;  // indices into candidates
  // Over passing candidates: row = H0, column = H1, diagonal 1. NaN marks a
  // comparison that could not be run.
  Eigen::MatrixXd lrt_p_values;
  Eigen::MatrixXd lrt_lambdas;
  std::vector<std::size_t> recommendation;  // indices into candidates
};

// Candidates pass when their KS p-value exceeds the threshold; a passing
// candidate is recommended when no other passing candidate beats it in the
// bootstrapped likelihood-ratio test.
SelectionReport model_select(std::span<const double> data, const std::vector<ModelSpec>& candidates,
                             const BootstrapOptions& opts, double threshold = 0.05,
                             KsAlgorithm algorithm = KsAlgorithm::A);

// The nineteen-model candidate list: nine baselines, five zero-inflated and
// five hurdle count models.
std::vector<ModelSpec> all_candidates();

}  // namespace zifit
