#include "zifit/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <optional>

#include "zifit/error.hpp"
#include "zifit/mle.hpp"
#include "zifit/parallel.hpp"
#include "zifit/random.hpp"

namespace zifit {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Outcome {
  double value = 0.0;
  bool ok = false;
};

double median_of(std::vector<double> v) {
  if (v.empty()) return kNaN;
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double upper = v[mid];
  if (v.size() % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return kNaN;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

StudyCell summarize(std::size_t n, std::string label, const std::vector<Outcome>& outcomes,
                    std::optional<double> level) {
  StudyCell cell;
  cell.sample_size = n;
  cell.label = std::move(label);
  for (const auto& o : outcomes) {
    if (!o.ok) {
      ++cell.failures;
      continue;
    }
    cell.raw.push_back(o.value);
    if (level && o.value < *level) ++cell.rejections;
  }
  if (level) {
    cell.value = cell.raw.empty() ? kNaN
                                  : static_cast<double>(cell.rejections) /
                                        static_cast<double>(cell.raw.size());
  } else {
    cell.value = mean_of(cell.raw);
  }
  cell.median = median_of(cell.raw);
  return cell;
}

std::size_t largest(const std::vector<std::size_t>& sizes) {
  return *std::max_element(sizes.begin(), sizes.end());
}

std::vector<ModelSpec> tested(const StudyConfig& c) {
  if (c.test_specs.empty()) return {c.truth};
  return c.test_specs;
}

std::string algorithm_label(KsAlgorithm a) {
  return std::string("kstest_") + std::string(ks_algorithm_name(a));
}

StudyResult rejection_study(const StudyConfig& config, bool with_spec_prefix) {
  validate(config);
  const auto specs = tested(config);
  const std::size_t per_rep = specs.size() * config.algorithms.size();
  const std::size_t R = config.replications;
  const std::size_t jobs = config.sample_sizes.size() * R;
  // outcomes[(size index * per_rep + test index) * R + rep]
  std::vector<Outcome> outcomes(config.sample_sizes.size() * per_rep * R);

  parallel_for(jobs, resolve_threads(config.threads), [&](std::size_t job) {
    const std::size_t si = job / R, rep = job % R;
    const std::size_t n = config.sample_sizes[si];
    const std::uint64_t stream = mix_seed(config.seed, n);
    Rng rng = make_rng(stream, rep);
    std::vector<double> data;
    try {
      data = sample_model(config.truth, config.truth_params, n, rng);
    } catch (const Error&) {
      return;  // every test of this replication counts as failed
    }
    for (std::size_t j = 0; j < specs.size(); ++j) {
      for (std::size_t a = 0; a < config.algorithms.size(); ++a) {
        const std::size_t t = j * config.algorithms.size() + a;
        BootstrapOptions opts;
        opts.B = config.B;
        opts.seed = mix_seed(mix_seed(stream, rep + 1), t);
        opts.threads = 1;
        opts.fit = config.fit;
        Outcome& out = outcomes[(si * per_rep + t) * R + rep];
        try {
          out.value = kstest(data, specs[j], config.algorithms[a], opts).p_value;
          out.ok = true;
        } catch (const Error&) {
          out.ok = false;
        }
      }
    }
  });

  StudyResult result{config, {}};
  for (std::size_t si = 0; si < config.sample_sizes.size(); ++si) {
    for (std::size_t j = 0; j < specs.size(); ++j) {
      for (std::size_t a = 0; a < config.algorithms.size(); ++a) {
        const std::size_t t = j * config.algorithms.size() + a;
        std::string label = algorithm_label(config.algorithms[a]);
        if (with_spec_prefix) label = model_name(specs[j]) + ":" + label;
        const auto first = outcomes.begin() + static_cast<std::ptrdiff_t>((si * per_rep + t) * R);
        result.cells.push_back(summarize(config.sample_sizes[si], std::move(label),
                                         std::vector<Outcome>(first, first + static_cast<std::ptrdiff_t>(R)),
                                         config.level));
      }
    }
  }
  return result;
}

// Variants fitted per test model in the nested-sample studies.
struct Variant {
  ModelSpec spec;
  std::string label;
};

std::vector<Variant> convergence_variants(const StudyConfig& c) {
  std::vector<Variant> out;
  for (ModelSpec s : tested(c)) {
    const std::string base = model_name(ModelSpec{s.family, s.kind, false, s.bounds});
    s.integer_size = false;
    out.push_back({s, base + ":real"});
    if (has_size_parameter(s.family)) {
      s.integer_size = true;
      out.push_back({s, base + ":integer"});
    }
  }
  return out;
}

template <class Measure>
StudyResult nested_study(const StudyConfig& config, const std::vector<Variant>& variants,
                         const Measure& measure) {
  validate(config);
  const std::size_t R = config.replications;
  const std::size_t S = config.sample_sizes.size();
  const std::size_t V = variants.size();
  std::vector<Outcome> outcomes(S * V * R);
  const std::size_t max_n = largest(config.sample_sizes);

  parallel_for(R * V, resolve_threads(config.threads), [&](std::size_t job) {
    const std::size_t rep = job / V, v = job % V;
    // The maximal sample depends on the replication only, so all variants
    // see the same data and smaller samples are prefixes of larger ones.
    Rng rng = make_rng(config.seed, rep);
    std::vector<double> data;
    try {
      data = sample_model(config.truth, config.truth_params, max_n, rng);
    } catch (const Error&) {
      return;
    }
    for (std::size_t si = 0; si < S; ++si) {
      const std::size_t n = config.sample_sizes[si];
      Outcome& out = outcomes[(si * V + v) * R + rep];
      try {
        const auto prefix = std::span<const double>(data).first(n);
        const FitResult fitted = fit(variants[v].spec, prefix, config.fit);
        if (!fitted.theta_defined || !std::isfinite(fitted.loglik)) continue;
        out.value = measure(fitted);
        out.ok = std::isfinite(out.value);
      } catch (const Error&) {
        out.ok = false;
      }
    }
  });

  StudyResult result{config, {}};
  for (std::size_t si = 0; si < S; ++si) {
    for (std::size_t v = 0; v < V; ++v) {
      const auto first = outcomes.begin() + static_cast<std::ptrdiff_t>((si * V + v) * R);
      result.cells.push_back(summarize(config.sample_sizes[si], variants[v].label,
                                       std::vector<Outcome>(first, first + static_cast<std::ptrdiff_t>(R)),
                                       std::nullopt));
    }
  }
  return result;
}

ModelParams zi_params(double phi, ParameterSet theta) { return ModelParams{phi, theta}; }

}  // namespace

std::string_view study_kind_name(StudyKind kind) noexcept {
  switch (kind) {
    case StudyKind::TypeOneError: return "type_one_error";
    case StudyKind::Power: return "power";
    case StudyKind::MleConvergence: return "mle_convergence";
    case StudyKind::CdfApproximation: return "cdf_approximation";
  }
  return "unknown";
}

StudyKind parse_study_kind(std::string_view name) {
  for (StudyKind k : {StudyKind::TypeOneError, StudyKind::Power, StudyKind::MleConvergence,
                      StudyKind::CdfApproximation}) {
    if (study_kind_name(k) == name) return k;
  }
  fail(ErrorKind::input, "unknown study kind '" + std::string(name) + "'");
}

void validate(const StudyConfig& c) {
  if (c.replications < 1) fail(ErrorKind::domain, "a study needs at least one replication");
  if (c.sample_sizes.empty()) fail(ErrorKind::domain, "a study needs at least one sample size");
  for (std::size_t n : c.sample_sizes) {
    if (n < 10) fail(ErrorKind::domain, "study sample sizes must be at least 10");
  }
  validate(c.truth, c.truth_params);
  const bool rejection = c.kind == StudyKind::TypeOneError || c.kind == StudyKind::Power;
  if (rejection) {
    if (c.B < 1) fail(ErrorKind::domain, "a rejection study needs B >= 1");
    if (c.algorithms.empty()) fail(ErrorKind::domain, "a rejection study needs an algorithm");
  }
  if (c.kind == StudyKind::TypeOneError && !c.test_specs.empty() &&
      std::find(c.test_specs.begin(), c.test_specs.end(), c.truth) == c.test_specs.end()) {
    fail(ErrorKind::domain, "a type-I error study must test the true model");
  }
  if (c.kind == StudyKind::Power) {
    if (c.test_specs.empty()) fail(ErrorKind::domain, "a power study needs test models");
    for (const auto& s : c.test_specs) {
      if (s == c.truth) fail(ErrorKind::domain, "power study test models must differ from the truth");
    }
  }
  if (c.kind == StudyKind::MleConvergence || c.kind == StudyKind::CdfApproximation) {
    if (!std::is_sorted(c.sample_sizes.begin(), c.sample_sizes.end())) {
      fail(ErrorKind::domain, "nested sample sizes must be ascending");
    }
  }
}

StudyResult type_one_error_study(const StudyConfig& config) {
  return rejection_study(config, !config.test_specs.empty() && config.test_specs.size() > 1);
}

StudyResult power_study(const StudyConfig& config) { return rejection_study(config, true); }

double l1_relative_distance(const ModelSpec& spec, const ModelParams& estimate,
                            const ModelParams& truth) {
  const Vec e = to_vector(spec, estimate);
  const Vec t = to_vector(spec, truth);
  double total = 0.0;
  for (Eigen::Index i = 0; i < t.size(); ++i) total += std::fabs(e[i] - t[i]) / std::fabs(t[i]);
  return total;
}

StudyResult mle_convergence_study(const StudyConfig& config) {
  for (const auto& s : tested(config)) {
    if (s.family != config.truth.family || s.kind != config.truth.kind) {
      fail(ErrorKind::domain, "a convergence study fits the true model family and kind");
    }
  }
  return nested_study(config, convergence_variants(config), [&](const FitResult& f) {
    return l1_relative_distance(f.spec, f.params_hat, config.truth_params);
  });
}

StudyResult cdf_approximation_study(const StudyConfig& config) {
  std::vector<Variant> variants;
  for (const auto& s : tested(config)) variants.push_back({s, model_name(s)});
  return nested_study(config, variants, [&](const FitResult& f) {
    return cdf_distance(config.truth, config.truth_params, f.spec, f.params_hat);
  });
}

StudyResult run_study(const StudyConfig& config) {
  switch (config.kind) {
    case StudyKind::TypeOneError: return type_one_error_study(config);
    case StudyKind::Power: return power_study(config);
    case StudyKind::MleConvergence: return mle_convergence_study(config);
    case StudyKind::CdfApproximation: return cdf_approximation_study(config);
  }
  fail(ErrorKind::domain, "unknown study kind");
}

std::vector<std::string> study_preset_names() {
  return {"table1-desk",  "table2-desk",  "table3-desk",  "table4-desk",
          "table5-desk",  "table6-desk",  "table7-desk",  "tableS1-desk",
          "tableS2-desk", "tableS3-desk", "table9-desk",  "table10-desk"};
}

StudyConfig study_preset(std::string_view name) {
  const auto zip = zi_params(0.3, ParameterSet::poisson(10.0));
  const auto zinb = zi_params(0.3, ParameterSet::neg_binomial(5.0, 0.2));
  const auto zibnb = zi_params(0.3, ParameterSet::beta_neg_binomial(3.0, 3.0, 5.0));
  const auto zibb = zi_params(0.3, ParameterSet::beta_binomial(5.0, 8.0, 3.0));
  const auto zi = [](Family f) { return ModelSpec::zero_inflated(f); };
  const std::vector<std::size_t> desk{30, 100, 500};

  StudyConfig c;
  c.sample_sizes = desk;
  auto rejection = [&](StudyKind kind, Family f, const ModelParams& p, std::vector<Family> tests) {
    c.kind = kind;
    c.truth = zi(f);
    c.truth_params = p;
    for (Family t : tests) c.test_specs.push_back(zi(t));
  };
  if (name == "table1-desk" || name == "table2-desk") {
    c.kind = StudyKind::MleConvergence;
    c.sample_sizes = {10000, 50000, 200000};
    c.replications = 1;
    if (name == "table1-desk") {
      c.truth = ModelSpec::hurdle(Family::BetaNegBinomial);
      c.truth_params = zi_params(0.3, ParameterSet::beta_neg_binomial(5.0, 8.0, 3.0));
    } else {
      c.truth = ModelSpec::hurdle(Family::BetaBinomial);
      c.truth_params = zi_params(0.6, ParameterSet::beta_binomial(5.0, 8.0, 3.0));
    }
  } else if (name == "table3-desk") {
    rejection(StudyKind::TypeOneError, Family::Poisson, zip, {});
  } else if (name == "table4-desk") {
    rejection(StudyKind::TypeOneError, Family::NegBinomial, zinb, {});
  } else if (name == "table5-desk") {
    rejection(StudyKind::TypeOneError, Family::BetaNegBinomial, zibnb, {});
  } else if (name == "table6-desk") {
    rejection(StudyKind::TypeOneError, Family::BetaBinomial, zibb, {});
  } else if (name == "table7-desk") {
    rejection(StudyKind::Power, Family::Poisson, zip,
              {Family::NegBinomial, Family::BetaNegBinomial, Family::BetaBinomial});
  } else if (name == "tableS1-desk") {
    rejection(StudyKind::Power, Family::NegBinomial, zinb,
              {Family::Poisson, Family::BetaNegBinomial, Family::BetaBinomial});
  } else if (name == "tableS2-desk") {
    rejection(StudyKind::Power, Family::BetaNegBinomial, zibnb,
              {Family::Poisson, Family::NegBinomial, Family::BetaBinomial});
  } else if (name == "tableS3-desk") {
    rejection(StudyKind::Power, Family::BetaBinomial, zibb,
              {Family::Poisson, Family::NegBinomial, Family::BetaNegBinomial});
  } else if (name == "table9-desk" || name == "table10-desk") {
    c.kind = StudyKind::CdfApproximation;
    c.sample_sizes = {30, 50, 100, 200, 500, 1000, 5000};
    c.replications = 20;
    if (name == "table9-desk") {
      c.truth = zi(Family::Poisson);
      c.truth_params = zip;
      c.test_specs = {zi(Family::NegBinomial)};
    } else {
      c.truth = zi(Family::BetaNegBinomial);
      c.truth_params = zi_params(0.3, ParameterSet::beta_neg_binomial(15.0, 19.0, 10.0));
      c.test_specs = {zi(Family::BetaBinomial)};
    }
  } else {
    fail(ErrorKind::input, "unknown study preset '" + std::string(name) + "'");
  }
  return c;
}

void write_csv(std::ostream& out, const StudyResult& result) {
  const auto old_flags = out.flags();
  const auto old_precision = out.precision();
  out << "study,label,n,value,median,rejections,failures,replications\n";
  out << std::setprecision(12);
  for (const auto& cell : result.cells) {
    out << study_kind_name(result.config.kind) << ',' << cell.label << ',' << cell.sample_size
        << ',' << cell.value << ',' << cell.median << ',' << cell.rejections << ','
        << cell.failures << ',' << result.config.replications << '\n';
  }
  out.flags(old_flags);
  out.precision(old_precision);
}

}  // namespace zifit
