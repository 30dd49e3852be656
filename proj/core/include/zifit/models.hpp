#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "zifit/distributions.hpp"
#include "zifit/random.hpp"

namespace zifit {

enum class ModelKind { Baseline, ZeroInflated, Hurdle };

std::string_view model_kind_name(ModelKind kind) noexcept;

// Box used when fitting one baseline parameter. Probability parameters are
// clipped to (lower, 1 - lower); real-valued ones to [-upper, upper].
struct ParameterBounds {
  double lower = 0.01;
  double upper = 10000.0;
};

struct ModelSpec {
  Family family = Family::Poisson;
  ModelKind kind = ModelKind::Baseline;
  bool integer_size = false;
  std::array<ParameterBounds, 3> bounds{};

  static ModelSpec baseline(Family f, bool integer_size = false);
  static ModelSpec zero_inflated(Family f, bool integer_size = false);
  static ModelSpec hurdle(Family f, bool integer_size = false);

  bool has_phi() const noexcept { return kind != ModelKind::Baseline; }
  // Continuous families have p0 = 0, so their zero-inflated and hurdle forms
  // are one distribution.
  bool is_zazi() const noexcept { return has_phi() && !is_discrete(family); }
  int dim() const noexcept { return family_dim(family) + (has_phi() ? 1 : 0); }

  friend bool operator==(const ModelSpec& a, const ModelSpec& b) noexcept {
    return a.family == b.family && a.kind == b.kind && a.integer_size == b.integer_size;
  }
};

struct ModelParams {
  double phi = 0.0;
  ParameterSet theta;
};

// Short names: "zinb", "bnbh", "ph", "nb1", ... (see parse_model).
std::string model_name(const ModelSpec& spec);
ModelSpec parse_model(std::string_view name);
std::vector<std::string> known_model_names();

// "phi" first when present, then the baseline names.
std::vector<std::string> model_parameter_names(const ModelSpec& spec);
Vec to_vector(const ModelSpec& spec, const ModelParams& params);
ModelParams from_vector(const ModelSpec& spec, const Vec& v);

void validate(const ModelSpec& spec, const ModelParams& params);

double model_log_density(const ModelSpec& spec, const ModelParams& params, double y);

// Total probability of the observation 0.
double model_zero_mass(const ModelSpec& spec, const ModelParams& params);

double model_cdf(const ModelSpec& spec, const ModelParams& params, double y);

// Right-continuous model CDF with its jump set, precomputed for repeated
// evaluation. Discrete models cache P(Y <= k) for k up to `support_hint`.
class ModelCdf {
 public:
  ModelCdf(const ModelSpec& spec, const ModelParams& params, double support_hint = 0.0);

  double operator()(double y) const;
  double left_limit(double y) const;
  // Points in [lo, hi] where the CDF may jump.
  std::vector<double> jump_points(double lo, double hi) const;
  bool discrete() const noexcept { return discrete_; }

 private:
  double table_at(double k) const;

  ModelSpec spec_;
  ModelParams params_;
  bool discrete_;
  double max_support_;
  std::vector<double> table_;
};

std::vector<double> sample_model(const ModelSpec& spec, const ModelParams& params,
                                 std::size_t count, Rng& rng);

// Hurdle and zero-inflated models coincide under these weight maps.
double za_to_zi(const ParameterSet& theta, double phi_za);
double zi_to_za(const ParameterSet& theta, double phi_zi);

}  // namespace zifit
