#include "zifit/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "zifit/error.hpp"
#include "zifit/special_functions.hpp"

namespace zifit {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTailCut = 1e-12;
constexpr std::size_t kRejectionBudget = 1000000;

struct NameRow {
  Family family;
  const char* baseline;
  const char* zero_inflated;
  const char* hurdle;
};

constexpr std::array<NameRow, 9> kNames = {{
    {Family::Poisson, "poisson", "zip", "ph"},
    {Family::Geometric, "geometric", "zigeom", "geomh"},
    {Family::NegBinomial, "nb", "zinb", "nbh"},
    {Family::BetaBinomial, "bb", "zibb", "bbh"},
    {Family::BetaNegBinomial, "bnb", "zibnb", "bnbh"},
    {Family::Normal, "normal", "zinormal", "normalh"},
    {Family::LogNormal, "lognormal", "zilognorm", "lognormh"},
    {Family::HalfNormal, "halfnormal", "zihalfnorm", "halfnormh"},
    {Family::Exponential, "exponential", "ziexp", "exph"},
}};

const NameRow& row_for(Family f) {
  for (const auto& row : kNames) {
    if (row.family == f) return row;
  }
  return kNames[0];
}

double log_weight(double w) { return w <= 0.0 ? -kInf : std::log(w); }
double log_complement(double w) { return w >= 1.0 ? -kInf : std::log1p(-w); }

}  // namespace

std::string_view model_kind_name(ModelKind kind) noexcept {
  switch (kind) {
    case ModelKind::Baseline: return "baseline";
    case ModelKind::ZeroInflated: return "zero-inflated";
    case ModelKind::Hurdle: return "hurdle";
  }
  return "unknown";
}

ModelSpec ModelSpec::baseline(Family f, bool integer_size) {
  ModelSpec s;
  s.family = f;
  s.kind = ModelKind::Baseline;
  s.integer_size = integer_size && has_size_parameter(f);
  return s;
}

ModelSpec ModelSpec::zero_inflated(Family f, bool integer_size) {
  ModelSpec s = baseline(f, integer_size);
  s.kind = ModelKind::ZeroInflated;
  return s;
}

ModelSpec ModelSpec::hurdle(Family f, bool integer_size) {
  ModelSpec s = baseline(f, integer_size);
  s.kind = ModelKind::Hurdle;
  return s;
}

std::string model_name(const ModelSpec& spec) {
  const auto& row = row_for(spec.family);
  std::string name = spec.kind == ModelKind::Baseline       ? row.baseline
                     : spec.kind == ModelKind::ZeroInflated ? row.zero_inflated
                                                            : row.hurdle;
  if (spec.integer_size) name += "1";
  return name;
}

std::vector<std::string> known_model_names() {
  std::vector<std::string> out;
  for (const auto& row : kNames) {
    out.emplace_back(row.baseline);
    out.emplace_back(row.zero_inflated);
    out.emplace_back(row.hurdle);
  }
  return out;
}

ModelSpec parse_model(std::string_view raw) {
  std::string name(raw);
  std::transform(name.begin(), name.end(), name.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  bool integer_size = false;
  if (!name.empty() && name.back() == '1') {
    integer_size = true;
    name.pop_back();
  }
  for (const auto& row : kNames) {
    ModelKind kind;
    if (name == row.baseline) {
      kind = ModelKind::Baseline;
    } else if (name == row.zero_inflated) {
      kind = ModelKind::ZeroInflated;
    } else if (name == row.hurdle) {
      kind = ModelKind::Hurdle;
    } else {
      continue;
    }
    if (integer_size && !has_size_parameter(row.family)) {
      fail(ErrorKind::input, "model '" + std::string(raw) + "' has no size parameter to restrict");
    }
    ModelSpec spec = ModelSpec::baseline(row.family, integer_size);
    spec.kind = kind;
    return spec;
  }
  fail(ErrorKind::input, "unknown model '" + std::string(raw) + "'");
}

std::vector<std::string> model_parameter_names(const ModelSpec& spec) {
  std::vector<std::string> names;
  if (spec.has_phi()) names.emplace_back("phi");
  for (auto& n : parameter_names(spec.family)) names.push_back(std::move(n));
  return names;
}

Vec to_vector(const ModelSpec& spec, const ModelParams& params) {
  Vec v(spec.dim());
  int offset = 0;
  if (spec.has_phi()) v[offset++] = params.phi;
  for (int i = 0; i < family_dim(spec.family); ++i) v[offset + i] = params.theta[i];
  return v;
}

ModelParams from_vector(const ModelSpec& spec, const Vec& v) {
  ModelParams p;
  int offset = 0;
  if (spec.has_phi()) p.phi = v[offset++];
  p.theta.family = spec.family;
  p.theta.integer_size = spec.integer_size;
  for (int i = 0; i < family_dim(spec.family); ++i) p.theta[i] = v[offset + i];
  return p;
}

void validate(const ModelSpec& spec, const ModelParams& params) {
  if (params.theta.family != spec.family) {
    fail(ErrorKind::domain, "parameter family does not match the model");
  }
  validate(params.theta);
  if (spec.has_phi() && !(params.phi >= 0.0 && params.phi <= 1.0)) {
    fail(ErrorKind::domain, "zero weight phi must lie in [0, 1]");
  }
}

double model_zero_mass(const ModelSpec& spec, const ModelParams& params) {
  validate(spec, params);
  const double p0 = zero_prob(params.theta);
  switch (spec.kind) {
    case ModelKind::Baseline: return p0;
    case ModelKind::ZeroInflated: return params.phi + (1.0 - params.phi) * p0;
    case ModelKind::Hurdle: return params.phi;
  }
  return 0.0;
}

double model_log_density(const ModelSpec& spec, const ModelParams& params, double y) {
  validate(spec, params);
  const auto& theta = params.theta;
  if (spec.kind == ModelKind::Baseline) return log_density(theta, y);
  if (is_discrete(spec.family)) y = check_observation(spec.family, y);
  const double phi = params.phi;
  if (!is_discrete(spec.family)) {
    // Shared by both kinds so the two forms stay bit-identical.
    if (y == 0.0) return log_weight(phi);
    return log_complement(phi) + log_density(theta, y);
  }
  if (spec.kind == ModelKind::Hurdle) {
    if (y == 0.0) return log_weight(phi);
    return log_complement(phi) + log_density(theta, y) - log1m_zero_prob(theta);
  }
  if (y == 0.0) return log_sum_exp(log_weight(phi), log_complement(phi) + log_zero_prob(theta));
  return log_complement(phi) + log_density(theta, y);
}

double model_cdf(const ModelSpec& spec, const ModelParams& params, double y) {
  validate(spec, params);
  const auto& theta = params.theta;
  const double phi = params.phi;
  if (spec.kind == ModelKind::Baseline) return baseline_cdf(theta, y);
  if (!is_discrete(spec.family)) {
    const double f = baseline_cdf(theta, y);
    return y < 0.0 ? (1.0 - phi) * f : phi + (1.0 - phi) * f;
  }
  if (y < 0.0) return 0.0;
  return ModelCdf(spec, params, std::floor(y))(y);
}

ModelCdf::ModelCdf(const ModelSpec& spec, const ModelParams& params, double support_hint)
    : spec_(spec), params_(params), discrete_(is_discrete(spec.family)) {
  validate(spec_, params_);
  max_support_ = spec.family == Family::BetaBinomial ? std::floor(params.theta[0]) : kInf;
  if (!discrete_) return;
  double last = std::max(0.0, std::floor(support_hint));
  last = std::min(last, max_support_);
  last = std::min(last, 5e7);
  const auto base = discrete_cdf_table(params_.theta, static_cast<std::size_t>(last));
  const double phi = params_.phi;
  table_.resize(base.size());
  switch (spec_.kind) {
    case ModelKind::Baseline: table_ = base; break;
    case ModelKind::ZeroInflated:
      for (std::size_t k = 0; k < base.size(); ++k) {
        table_[k] = base[k] >= 1.0 ? 1.0 : phi + (1.0 - phi) * base[k];
      }
      break;
    case ModelKind::Hurdle: {
      // Mass of the nonzero part relative to its total: (F(k) - F(0)) / (1 - F(0)).
      const double nonzero_total = 1.0 - base[0];
      for (std::size_t k = 0; k < base.size(); ++k) {
        if (base[k] >= 1.0) {
          table_[k] = 1.0;
        } else if (nonzero_total <= 0.0) {
          table_[k] = phi;
        } else {
          table_[k] = phi + (1.0 - phi) * std::min(1.0, (base[k] - base[0]) / nonzero_total);
        }
      }
      break;
    }
  }
}

double ModelCdf::table_at(double k) const {
  if (k < 0.0) return 0.0;
  if (k >= max_support_) return 1.0;
  if (k < static_cast<double>(table_.size())) return table_[static_cast<std::size_t>(k)];
  if (!table_.empty() && table_.back() >= 1.0) return 1.0;
  return ModelCdf(spec_, params_, k).table_.back();
}

double ModelCdf::operator()(double y) const {
  if (discrete_) return table_at(std::floor(y));
  const double phi = params_.phi;
  const double f = baseline_cdf(params_.theta, y);
  if (spec_.kind == ModelKind::Baseline) return f;
  return y < 0.0 ? (1.0 - phi) * f : phi + (1.0 - phi) * f;
}

double ModelCdf::left_limit(double y) const {
  if (discrete_) {
    const double k = std::floor(y);
    return table_at(k == y ? k - 1.0 : k);
  }
  if (spec_.kind != ModelKind::Baseline && y == 0.0) {
    return (1.0 - params_.phi) * baseline_cdf(params_.theta, 0.0);
  }
  return (*this)(y);
}

std::vector<double> ModelCdf::jump_points(double lo, double hi) const {
  std::vector<double> out;
  if (discrete_) {
    const double first = std::max(0.0, std::ceil(lo));
    const double last = std::min(std::floor(hi), max_support_);
    for (double k = first; k <= last; k += 1.0) out.push_back(k);
    return out;
  }
  if (spec_.kind != ModelKind::Baseline && params_.phi > 0.0 && lo <= 0.0 && hi >= 0.0) {
    out.push_back(0.0);
  }
  return out;
}

std::vector<double> sample_model(const ModelSpec& spec, const ModelParams& params,
                                 std::size_t count, Rng& rng) {
  validate(spec, params);
  const auto& theta = params.theta;
  if (spec.kind == ModelKind::Baseline) return sample_baseline(theta, count, rng);

  // Beta-binomial with fractional n draws by table lookup; build it once.
  std::vector<double> table;
  const bool tabulated = spec.family == Family::BetaBinomial && theta[0] != std::floor(theta[0]);
  if (tabulated) table = discrete_cdf_table(theta, static_cast<std::size_t>(std::floor(theta[0])));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto draw = [&]() -> double {
    if (!tabulated) return draw_baseline(theta, rng);
    const auto it = std::upper_bound(table.begin(), table.end(), unit(rng));
    return static_cast<double>(
        std::min<std::ptrdiff_t>(it - table.begin(), static_cast<std::ptrdiff_t>(table.size()) - 1));
  };

  const bool truncate = spec.kind == ModelKind::Hurdle && is_discrete(spec.family);
  if (truncate && params.phi < 1.0 && zero_prob(theta) > 1.0 - 1e-9) {
    fail(ErrorKind::starvation,
         "zero-truncated sampling would starve: baseline zero probability exceeds 1 - 1e-9");
  }
  std::vector<double> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    if (unit(rng) < params.phi) {
      out.push_back(0.0);
      continue;
    }
    double y = draw();
    if (truncate) {
      std::size_t rejected = 0;
      while (y == 0.0) {
        if (++rejected >= kRejectionBudget) {
          fail(ErrorKind::starvation, "zero-truncated sampling exhausted its rejection budget");
        }
        y = draw();
      }
    }
    out.push_back(y);
  }
  return out;
}

double zi_to_za(const ParameterSet& theta, double phi_zi) {
  if (!(phi_zi >= 0.0 && phi_zi <= 1.0)) {
    fail(ErrorKind::domain, "zero weight must lie in [0, 1]");
  }
  const double p0 = zero_prob(theta);
  return phi_zi + (1.0 - phi_zi) * p0;
}

double za_to_zi(const ParameterSet& theta, double phi_za) {
  if (!(phi_za >= 0.0 && phi_za <= 1.0)) {
    fail(ErrorKind::domain, "zero weight must lie in [0, 1]");
  }
  const double p0 = zero_prob(theta);
  if (phi_za < p0) {
    std::ostringstream os;
    os << "hurdle zero mass " << phi_za << " is below the baseline zero probability " << p0
       << "; a zero-deflated hurdle model has no zero-inflated counterpart";
    fail(ErrorKind::no_equivalent, os.str());
  }
  if (p0 >= 1.0) return 0.0;
  return (phi_za - p0) / (1.0 - p0);
}

}  // namespace zifit
