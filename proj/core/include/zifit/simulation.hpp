#pragma once

#include <cstddef>
#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "zifit/goodness_of_fit.hpp"
#include "zifit/models.hpp"

namespace zifit {

enum class StudyKind { TypeOneError, Power, MleConvergence, CdfApproximation };

std::string_view study_kind_name(StudyKind kind) noexcept;
StudyKind parse_study_kind(std::string_view name);

struct StudyConfig {
  StudyKind kind = StudyKind::TypeOneError;
  ModelSpec truth;
  ModelParams truth_params;
  // Models tested against (rejection studies) or fitted to (the other two).
  // Type-I studies test the true model when this is empty.
  std::vector<ModelSpec> test_specs;
  std::vector<std::size_t> sample_sizes;
  std::size_t replications = 200;
  std::size_t B = 100;
  std::uint64_t seed = 1;
  int threads = 0;
  std::vector<KsAlgorithm> algorithms{KsAlgorithm::A, KsAlgorithm::B};
  double level = 0.05;
  FitOptions fit;
};

void validate(const StudyConfig& config);

// One table entry. `label` is "kstest_A", "zibnb:kstest_B", "real",
// "integer" or the fitted model name, depending on the study.
struct StudyCell {
  std::size_t sample_size = 0;
  std::string label;
  // Rejection rate, mean L1RD or mean sup-CDF distance.
  double value = 0.0;
  double median = 0.0;
  std::size_t rejections = 0;
  std::size_t failures = 0;
  std::vector<double> raw;  // p-values, L1RD or distances per replication
};

struct StudyResult {
  StudyConfig config;
  std::vector<StudyCell> cells;
};

StudyResult type_one_error_study(const StudyConfig& config);
StudyResult power_study(const StudyConfig& config);
StudyResult mle_convergence_study(const StudyConfig& config);
StudyResult cdf_approximation_study(const StudyConfig& config);
StudyResult run_study(const StudyConfig& config);

// Sum over parameters of |estimate - truth| / |truth|, phi included.
double l1_relative_distance(const ModelSpec& spec, const ModelParams& estimate,
                            const ModelParams& truth);

// Desk-scale versions of the published tables, e.g. "table3-desk".
StudyConfig study_preset(std::string_view name);
std::vector<std::string> study_preset_names();

// Columns: study,label,n,value,median,rejections,failures,replications.
void write_csv(std::ostream& out, const StudyResult& result);

}  // namespace zifit
