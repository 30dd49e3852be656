#include "zifit_cli/cli.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "zifit/error.hpp"
#include "zifit/fisher.hpp"
#include "zifit/goodness_of_fit.hpp"
#include "zifit/mle.hpp"
#include "zifit/models.hpp"
#include "zifit/simulation.hpp"
#include "zifit/version.hpp"

namespace zifit::cli {
namespace {

using json = nlohmann::ordered_json;

constexpr const char* kSchema = "zifit-report/1";

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::input:
    case ErrorKind::domain:
    case ErrorKind::unsupported:
    case ErrorKind::insufficient_data:
    case ErrorKind::no_equivalent:
      return kExitInput;
    default:
      return kExitNumerical;
  }
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

// ---------------------------------------------------------------- models --

struct ModelFlags {
  std::string model;
  std::string family;
  std::string kind;
  bool integer_size = false;
};

void add_model_flags(CLI::App* sub, ModelFlags& f) {
  sub->add_option("-m,--model", f.model, "Model short name, e.g. zinb, bnbh, nb1");
  sub->add_option("--family", f.family,
                  "Baseline family: poisson, geometric, nb, bb, bnb, normal, lognormal, "
                  "halfnormal, exponential");
  sub->add_option("--kind", f.kind, "baseline, zi or hurdle (default baseline)");
  sub->add_flag("--integer-size", f.integer_size, "Restrict n or r to integers");
}

Family parse_family(const std::string& raw) {
  const std::string name = lower(raw);
  for (Family f : kAllFamilies) {
    if (family_name(f) == name) return f;
  }
  fail(ErrorKind::input, "unknown family '" + raw + "'");
}

ModelKind parse_kind(const std::string& raw) {
  const std::string k = lower(raw);
  if (k.empty() || k == "baseline" || k == "none") return ModelKind::Baseline;
  if (k == "zi" || k == "zero-inflated" || k == "zero_inflated") return ModelKind::ZeroInflated;
  if (k == "hurdle" || k == "za" || k == "h" || k == "zero-altered" || k == "zero_altered") {
    return ModelKind::Hurdle;
  }
  fail(ErrorKind::input, "unknown model kind '" + raw + "' (use baseline, zi or hurdle)");
}

// Continuous zero-inflated and hurdle forms are the same distribution; the
// hurdle spelling is used for both so reports do not depend on the choice.
ModelSpec canonical(ModelSpec spec) {
  if (spec.is_zazi()) spec.kind = ModelKind::Hurdle;
  return spec;
}

ModelSpec parse_spec(const std::string& name) { return canonical(parse_model(name)); }

ModelSpec resolve_model(const ModelFlags& f) {
  ModelSpec spec;
  if (!f.model.empty()) {
    if (!f.family.empty() || !f.kind.empty()) {
      fail(ErrorKind::input, "use either --model or --family/--kind, not both");
    }
    spec = parse_model(f.model);
  } else {
    if (f.family.empty()) fail(ErrorKind::input, "a model is required (--model or --family)");
    spec = ModelSpec::baseline(parse_family(f.family));
    spec.kind = parse_kind(f.kind);
  }
  if (f.integer_size) {
    if (!has_size_parameter(spec.family)) {
      fail(ErrorKind::input, "--integer-size needs a family with a size parameter (nb, bb, bnb)");
    }
    spec.integer_size = true;
  }
  return canonical(spec);
}

ModelParams params_from_named(const ModelSpec& spec, const std::map<std::string, double>& named) {
  const auto names = model_parameter_names(spec);
  for (const auto& [key, value] : named) {
    if (std::find(names.begin(), names.end(), key) == names.end()) {
      fail(ErrorKind::input, "parameter '" + key + "' does not belong to model " + model_name(spec));
    }
  }
  Vec v(static_cast<Eigen::Index>(names.size()));
  for (std::size_t i = 0; i < names.size(); ++i) {
    const auto it = named.find(names[i]);
    if (it == named.end()) {
      fail(ErrorKind::input, "missing parameter '" + names[i] + "' for model " + model_name(spec));
    }
    v[static_cast<Eigen::Index>(i)] = it->second;
  }
  ModelParams p = from_vector(spec, v);
  validate(spec, p);
  return p;
}

// ------------------------------------------------------------------ data --

std::vector<double> checked_values(const ModelSpec& spec, const Observations& obs) {
  for (std::size_t i = 0; i < obs.values.size(); ++i) {
    const double y = obs.values[i];
    auto bad = [&](const std::string& why) {
      std::ostringstream os;
      os << "line " << obs.lines[i] << ": value " << y << ' ' << why;
      fail(ErrorKind::input, os.str());
    };
    if (!std::isfinite(y)) bad("is not finite");
    if (is_discrete(spec.family)) {
      const double k = std::round(y);
      if (std::fabs(y - k) > 1e-9 || k < 0.0) {
        bad("is not a nonnegative integer, required by " + model_name(spec));
      }
    } else if (spec.family != Family::Normal) {
      if (y < 0.0) bad("is negative, outside the support of " + model_name(spec));
      if (y == 0.0 && !spec.has_phi()) bad("is zero, outside the support of " + model_name(spec));
    }
  }
  return obs.values;
}

// ---------------------------------------------------------------- output --

std::uint64_t resolve_seed(const CLI::Option* opt, std::uint64_t& seed, std::ostream& err) {
  if (opt->count() == 0) {
    std::random_device rd;
    seed = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
    err << "no --seed given; using generated seed " << seed << '\n';
  }
  return seed;
}

json manifest(const std::string& command, json flags, std::optional<std::uint64_t> seed,
              std::optional<std::uint64_t> checksum) {
  json m;
  m["schema"] = kSchema;
  m["command"] = command;
  m["version"] = kVersion;
  m["flags"] = std::move(flags);
  m["seed"] = seed ? json(*seed) : json(nullptr);
  m["input_checksum"] = checksum ? json("fnv1a64:" + hex64(*checksum)) : json(nullptr);
  return m;
}

json model_flags_json(const ModelSpec& spec) {
  json j;
  j["model"] = model_name(spec);
  j["family"] = family_name(spec.family);
  j["kind"] = model_kind_name(spec.kind);
  j["integer_size"] = spec.integer_size;
  return j;
}

json params_json(const ModelSpec& spec, const ModelParams& params) {
  json j = json::object();
  const auto names = model_parameter_names(spec);
  const Vec v = to_vector(spec, params);
  for (std::size_t i = 0; i < names.size(); ++i) j[names[i]] = v[static_cast<Eigen::Index>(i)];
  return j;
}

json matrix_json(const Mat& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

json dense_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

json fit_json(const FitResult& r) {
  json j;
  j["model"] = model_name(r.spec);
  j["n"] = r.n;
  j["nonzero"] = r.m;
  j["case"] = fit_case_name(r.case_taken);
  j["converged"] = r.converged;
  j["iterations"] = r.iterations;
  j["theta_defined"] = r.theta_defined;
  j["boundary"] = r.boundary;
  j["loglik"] = r.loglik;
  j["params"] = r.theta_defined ? params_json(r.spec, r.params_hat) : json(nullptr);
  if (!r.theta_defined) j["phi"] = r.params_hat.phi;
  j["note"] = r.note;
  return j;
}

json mc_json(const std::optional<MonteCarloConfig>& mc) {
  if (!mc) return nullptr;
  return json{{"samples", mc->samples}, {"seed", mc->seed}};
}

void write_json(const std::string& path, const json& report) {
  if (path.empty()) return;
  std::ofstream f(path, std::ios::binary);
  if (!f) fail(ErrorKind::input, "cannot write '" + path + "'");
  f << report.dump(2) << '\n';
}

std::string fmt(double v, int digits = 6) {
  std::ostringstream os;
  os << std::setprecision(digits) << v;
  return os.str();
}

void print_params(std::ostream& out, const FitResult& r) {
  if (!r.theta_defined) {
    out << "  phi = " << fmt(r.params_hat.phi) << " (no nonzero observations; theta undefined)\n";
    return;
  }
  const auto names = model_parameter_names(r.spec);
  const Vec v = to_vector(r.spec, r.params_hat);
  for (std::size_t i = 0; i < names.size(); ++i) {
    out << "  " << std::left << std::setw(6) << names[i] << std::right << " = "
        << fmt(v[static_cast<Eigen::Index>(i)], 8) << '\n';
  }
}

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

KsAlgorithm parse_algorithm(const std::string& raw) {
  const std::string a = lower(raw);
  if (a == "a") return KsAlgorithm::A;
  if (a == "b") return KsAlgorithm::B;
  fail(ErrorKind::input, "unknown KS algorithm '" + raw + "' (use A or B)");
}

// -------------------------------------------------------------- commands --

struct BootstrapFlags {
  std::size_t B = 1000;
  std::uint64_t seed = 0;
  unsigned threads = 0;
  CLI::Option* seed_opt = nullptr;
};

void add_bootstrap_flags(CLI::App* sub, BootstrapFlags& f) {
  sub->add_option("--bootstrap,-B", f.B, "Bootstrap replicates")->capture_default_str();
  f.seed_opt = sub->add_option("--seed", f.seed, "Random seed (generated when absent)");
  sub->add_option("--threads", f.threads,
                  "Worker threads; 0 reads ZIFIT_THREADS (results do not depend on it)")
      ->capture_default_str();
}

struct FitFlags {
  std::string input;
  ModelFlags model;
  std::vector<double> init;
  std::vector<double> bounds;
  double level = 0.95;
  std::uint64_t seed = MonteCarloConfig{}.seed;
  std::size_t mc_samples = MonteCarloConfig{}.samples;
  std::string json_path;
};

int cmd_fit(const FitFlags& f, std::ostream& out) {
  Stopwatch clock;
  const Observations obs = read_observations(f.input);
  ModelSpec spec = resolve_model(f.model);
  if (!f.bounds.empty()) {
    if (f.bounds.size() != 2 || !(f.bounds[0] > 0.0) || !(f.bounds[1] > f.bounds[0])) {
      fail(ErrorKind::input, "--bounds takes two numbers 0 < lower < upper");
    }
    for (auto& b : spec.bounds) b = ParameterBounds{f.bounds[0], f.bounds[1]};
  }
  if (!(f.level > 0.0 && f.level < 1.0)) fail(ErrorKind::input, "--level must lie in (0, 1)");
  FitOptions options;
  if (!f.init.empty()) {
    if (static_cast<int>(f.init.size()) != family_dim(spec.family)) {
      fail(ErrorKind::input, "--init needs " + std::to_string(family_dim(spec.family)) +
                                 " baseline values for " + model_name(spec));
    }
    Vec v(static_cast<Eigen::Index>(f.init.size()));
    for (std::size_t i = 0; i < f.init.size(); ++i) v[static_cast<Eigen::Index>(i)] = f.init[i];
    options.init = ParameterSet::from_vector(spec.family, v);
    validate(*options.init);
  }
  const auto data = checked_values(spec, obs);
  const FitResult r = fit(spec, data, options);
  const MonteCarloConfig mc{f.mc_samples, f.seed};

  json flags = model_flags_json(spec);
  flags["input"] = f.input;
  flags["init"] = f.init;
  flags["bounds"] = f.bounds;
  flags["level"] = f.level;
  flags["mc_samples"] = f.mc_samples;
  json report;
  report["manifest"] = manifest("fit", flags, f.seed, obs.checksum);
  report["fit"] = fit_json(r);

  out << "model " << model_name(spec) << "  n=" << r.n << "  nonzero=" << r.m
      << "  loglik=" << fmt(r.loglik, 10) << "  (" << fit_case_name(r.case_taken)
      << (r.converged ? "" : ", not converged") << ")\n";
  print_params(out, r);
  if (!r.note.empty()) out << "  note: " << r.note << '\n';

  const bool informative = r.theta_defined && std::isfinite(r.loglik);
  if (informative) {
    try {
      const FisherMatrix F = fisher_information(spec, r.params_hat, mc);
      report["fisher"] = {{"names", model_parameter_names(spec)},
                          {"matrix", matrix_json(F.matrix)},
                          {"monte_carlo", mc_json(F.mc)}};
      report["inverse_fisher"] = matrix_json(inverse_fisher(spec, r.params_hat, mc));
    } catch (const Error& e) {
      report["fisher"] = nullptr;
      report["fisher_error"] = e.what();
      out << "  Fisher information unavailable: " << e.what() << '\n';
    }
  }
  try {
    const ConfidenceIntervals ci = confidence_intervals(r, f.level, mc);
    json rows = json::array();
    for (std::size_t i = 0; i < ci.names.size(); ++i) {
      json row = {{"name", ci.names[i]}, {"estimate", ci.estimates[i]}};
      if (ci.available) {
        row["lower"] = ci.intervals[i].lower;
        row["upper"] = ci.intervals[i].upper;
      } else {
        row["lower"] = nullptr;
        row["upper"] = nullptr;
      }
      rows.push_back(std::move(row));
    }
    report["intervals"] = {{"level", ci.level},
                           {"available", ci.available},
                           {"reason", ci.reason},
                           {"rows", rows}};
    if (ci.available) {
      out << "  " << fmt(100.0 * f.level) << "% Wald intervals:\n";
      for (std::size_t i = 0; i < ci.names.size(); ++i) {
        out << "    " << std::left << std::setw(6) << ci.names[i] << std::right << " ["
            << fmt(ci.intervals[i].lower) << ", " << fmt(ci.intervals[i].upper) << "]\n";
      }
    } else {
      out << "  intervals unavailable: " << ci.reason << '\n';
    }
  } catch (const Error& e) {
    report["intervals"] = {{"level", f.level}, {"available", false}, {"reason", e.what()}};
    out << "  intervals unavailable: " << e.what() << '\n';
  }
  if (spec.kind == ModelKind::Hurdle && is_discrete(spec.family)) {
    try {
      const ZeroAlterationTest z = test_zero_alteration(r, WeightedSample::from(data), f.level);
      report["zero_alteration"] = {
          {"verdict", zero_alteration_name(z.verdict)},
          {"phi_interval", {z.phi_interval.lower, z.phi_interval.upper}},
          {"baseline_zero_probability", z.p0_at_theta_hat},
          {"null_parameters", std::vector<double>(z.theta_null.values.begin(),
                                                  z.theta_null.values.begin() + z.theta_null.dim())}};
      out << "  zero alteration: " << zero_alteration_name(z.verdict) << " (baseline P(0) = "
          << fmt(z.p0_at_theta_hat) << ")\n";
    } catch (const Error& e) {
      report["zero_alteration"] = {{"verdict", nullptr}, {"reason", e.what()}};
      out << "  zero alteration: not available (" << e.what() << ")\n";
    }
  }
  write_json(f.json_path, report);
  out << "elapsed " << fmt(clock.seconds(), 3) << " s\n";
  return kExitOk;
}

struct KsFlags {
  std::string input;
  ModelFlags model;
  std::string algorithm = "A";
  BootstrapFlags boot;
  std::string json_path;
};

BootstrapOptions bootstrap_options(const BootstrapFlags& f) {
  BootstrapOptions o;
  o.B = f.B;
  o.seed = f.seed;
  o.threads = f.threads;
  return o;
}

int cmd_ks(KsFlags f, std::ostream& out, std::ostream& err) {
  Stopwatch clock;
  const Observations obs = read_observations(f.input);
  const ModelSpec spec = resolve_model(f.model);
  const KsAlgorithm algorithm = parse_algorithm(f.algorithm);
  resolve_seed(f.boot.seed_opt, f.boot.seed, err);
  const auto data = checked_values(spec, obs);
  const KsReport r = kstest(data, spec, algorithm, bootstrap_options(f.boot));

  json flags = model_flags_json(spec);
  flags["input"] = f.input;
  flags["algorithm"] = ks_algorithm_name(algorithm);
  flags["bootstrap"] = f.boot.B;
  json report;
  report["manifest"] = manifest("ks", flags, f.boot.seed, obs.checksum);
  report["algorithm"] = ks_algorithm_name(r.algorithm);
  report["statistic"] = r.statistic;
  report["p_value"] = r.p_value;
  report["B"] = r.B;
  report["failed"] = r.failed;
  report["fit"] = fit_json(r.fit);
  report["replicate_statistics"] = r.replicate_statistics;
  write_json(f.json_path, report);

  out << "KS test (algorithm " << ks_algorithm_name(r.algorithm) << ") for " << model_name(spec)
      << ": D = " << fmt(r.statistic, 8) << ", p = " << fmt(r.p_value) << " (B = " << r.B
      << ", failed = " << r.failed << ")\n";
  print_params(out, r.fit);
  out << "elapsed " << fmt(clock.seconds(), 3) << " s\n";
  return kExitOk;
}

struct LrtFlags {
  std::string input;
  std::string h0;
  std::string h1;
  BootstrapFlags boot;
  std::string json_path;
};

int cmd_lrt(LrtFlags f, std::ostream& out, std::ostream& err) {
  Stopwatch clock;
  const Observations obs = read_observations(f.input);
  const ModelSpec h0 = parse_spec(f.h0), h1 = parse_spec(f.h1);
  resolve_seed(f.boot.seed_opt, f.boot.seed, err);
  checked_values(h1, obs);
  const auto data = checked_values(h0, obs);
  const LrtReport r = lrt_bootstrap(data, h0, h1, bootstrap_options(f.boot));

  json flags;
  flags["input"] = f.input;
  flags["h0"] = model_name(h0);
  flags["h1"] = model_name(h1);
  flags["bootstrap"] = f.boot.B;
  json report;
  report["manifest"] = manifest("lrt", flags, f.boot.seed, obs.checksum);
  report["h0"] = model_name(h0);
  report["h1"] = model_name(h1);
  report["lambda"] = r.lambda;
  report["p_value"] = r.p_value;
  report["tie_tolerance"] = r.tie_tolerance;
  report["B"] = r.B;
  report["failed"] = r.failed;
  report["fit_h0"] = fit_json(r.fit_h0);
  report["fit_h1"] = fit_json(r.fit_h1);
  report["replicate_lambdas"] = r.replicate_lambdas;
  write_json(f.json_path, report);

  out << "LRT H0 = " << model_name(h0) << " vs H1 = " << model_name(h1)
      << ": log ratio = " << fmt(r.lambda, 8) << ", p = " << fmt(r.p_value) << " (B = " << r.B
      << ", failed = " << r.failed << ")\n";
  out << (r.p_value < 0.05 ? "  H1 is significantly better at the 0.05 level\n"
                           : "  no significant improvement of H1 over H0 at the 0.05 level\n");
  out << "elapsed " << fmt(clock.seconds(), 3) << " s\n";
  return kExitOk;
}

struct SelectFlags {
  std::string input;
  std::vector<std::string> candidates{"all"};
  std::string algorithm = "A";
  double threshold = 0.05;
  BootstrapFlags boot;
  std::string json_path;
};

int cmd_select(SelectFlags f, std::ostream& out, std::ostream& err) {
  Stopwatch clock;
  const Observations obs = read_observations(f.input);
  std::vector<ModelSpec> candidates;
  for (const auto& c : f.candidates) {
    if (lower(c) == "all") {
      for (const auto& s : all_candidates()) candidates.push_back(s);
    } else {
      candidates.push_back(parse_spec(c));
    }
  }
  if (candidates.empty()) fail(ErrorKind::input, "no candidates given");
  const KsAlgorithm algorithm = parse_algorithm(f.algorithm);
  if (!(f.threshold >= 0.0 && f.threshold <= 1.0)) {
    fail(ErrorKind::input, "--threshold must lie in [0, 1]");
  }
  resolve_seed(f.boot.seed_opt, f.boot.seed, err);
  for (std::size_t i = 0; i < obs.values.size(); ++i) {
    if (!std::isfinite(obs.values[i])) {
      fail(ErrorKind::input, "line " + std::to_string(obs.lines[i]) + ": value is not finite");
    }
  }
  const SelectionReport r =
      model_select(obs.values, candidates, bootstrap_options(f.boot), f.threshold, algorithm);

  std::vector<std::string> names;
  for (const auto& s : candidates) names.push_back(model_name(s));
  json flags;
  flags["input"] = f.input;
  flags["candidates"] = names;
  flags["algorithm"] = ks_algorithm_name(algorithm);
  flags["bootstrap"] = f.boot.B;
  flags["threshold"] = f.threshold;
  json report;
  report["manifest"] = manifest("select", flags, f.boot.seed, obs.checksum);
  json rows = json::array();
  out << "KS screening (algorithm " << ks_algorithm_name(algorithm) << ", B = " << f.boot.B
      << ", pass when p > " << fmt(f.threshold) << "):\n";
  for (const auto& c : r.candidates) {
    json row;
    row["model"] = model_name(c.spec);
    row["passing"] = c.passing;
    row["statistic"] = c.ks ? json(c.ks->statistic) : json(nullptr);
    row["p_value"] = c.ks ? json(c.ks->p_value) : json(nullptr);
    row["failed_replicates"] = c.ks ? json(c.ks->failed) : json(nullptr);
    row["failure"] = c.failure.empty() ? json(nullptr) : json(c.failure);
    rows.push_back(row);
    out << "  " << std::left << std::setw(12) << model_name(c.spec) << std::right;
    if (c.ks) {
      out << " D = " << std::setw(10) << fmt(c.ks->statistic) << "  p = " << std::setw(6)
          << fmt(c.ks->p_value) << (c.passing ? "  pass" : "") << '\n';
    } else {
      out << " not fittable: " << c.failure << '\n';
    }
  }
  report["candidates"] = rows;
  std::vector<std::string> passing, recommended;
  for (std::size_t i : r.passing) passing.push_back(model_name(r.candidates[i].spec));
  for (std::size_t i : r.recommendation) recommended.push_back(model_name(r.candidates[i].spec));
  report["passing"] = passing;
  report["lrt"] = {{"rows_h0_columns_h1", passing},
                   {"p_values", dense_json(r.lrt_p_values)},
                   {"log_ratios", dense_json(r.lrt_lambdas)}};
  report["recommendation"] = recommended;
  write_json(f.json_path, report);

  if (passing.size() > 1) {
    out << "pairwise LRT p-values (row H0, column H1):\n";
    out << std::setw(12) << "";
    for (const auto& n : passing) out << std::setw(10) << n;
    out << '\n';
    for (std::size_t i = 0; i < passing.size(); ++i) {
      out << "  " << std::left << std::setw(10) << passing[i] << std::right;
      for (std::size_t j = 0; j < passing.size(); ++j) {
        out << std::setw(10)
            << fmt(r.lrt_p_values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)), 4);
      }
      out << '\n';
    }
  }
  out << "recommended:";
  for (const auto& n : recommended) out << ' ' << n;
  out << (recommended.empty() ? " none\n" : "\n");
  out << "elapsed " << fmt(clock.seconds(), 3) << " s\n";
  return passing.empty() ? kExitStatistical : kExitOk;
}

struct SimulateFlags {
  ModelFlags model;
  std::map<std::string, double> values;
  std::map<std::string, CLI::Option*> options;
  std::size_t count = 0;
  std::uint64_t seed = 0;
  CLI::Option* seed_opt = nullptr;
  std::string output;
};

int cmd_simulate(SimulateFlags& f, std::ostream& out, std::ostream& err) {
  const ModelSpec spec = resolve_model(f.model);
  std::map<std::string, double> named;
  for (const auto& [flag, opt] : f.options) {
    if (opt->count() == 0) continue;
    named[flag == "size" ? "n" : flag] = f.values[flag];
  }
  const ModelParams params = params_from_named(spec, named);
  resolve_seed(f.seed_opt, f.seed, err);
  Rng rng = make_rng(f.seed);
  const auto draws = sample_model(spec, params, f.count, rng);

  std::ostringstream csv;
  csv << "y\n";
  char buf[40];
  for (double y : draws) {
    if (is_discrete(spec.family)) {
      std::snprintf(buf, sizeof buf, "%.0f", y);
    } else {
      std::snprintf(buf, sizeof buf, "%.17g", y);
    }
    csv << buf << '\n';
  }
  if (f.output.empty()) {
    out << csv.str();
  } else {
    std::ofstream file(f.output, std::ios::binary);
    if (!file) fail(ErrorKind::input, "cannot write '" + f.output + "'");
    file << csv.str();
    const auto zeros = std::count(draws.begin(), draws.end(), 0.0);
    out << "wrote " << draws.size() << " draws from " << model_name(spec) << " to " << f.output
        << " (zero fraction " << fmt(static_cast<double>(zeros) / static_cast<double>(draws.size()))
        << ")\n";
  }
  return kExitOk;
}

struct BenchFlags {
  std::string config;
  std::optional<std::size_t> replications;
  std::optional<std::size_t> B;
  std::vector<std::size_t> sizes;
  std::uint64_t seed = 0;
  CLI::Option* seed_opt = nullptr;
  unsigned threads = 0;
  std::string csv_path;
  std::string json_path;
  bool list = false;
};

std::vector<KsAlgorithm> parse_algorithms(const json& j) {
  std::vector<KsAlgorithm> out;
  for (const auto& a : j) out.push_back(parse_algorithm(a.get<std::string>()));
  return out;
}

StudyConfig config_from_json(const json& j) {
  StudyConfig c = j.contains("preset") ? study_preset(j.at("preset").get<std::string>())
                                       : StudyConfig{};
  if (j.contains("kind")) c.kind = parse_study_kind(j.at("kind").get<std::string>());
  if (j.contains("truth")) c.truth = parse_spec(j.at("truth").get<std::string>());
  if (j.contains("truth_params")) {
    c.truth_params =
        params_from_named(c.truth, j.at("truth_params").get<std::map<std::string, double>>());
  }
  if (j.contains("tests")) {
    c.test_specs.clear();
    for (const auto& t : j.at("tests")) c.test_specs.push_back(parse_spec(t.get<std::string>()));
  }
  if (j.contains("sample_sizes")) c.sample_sizes = j.at("sample_sizes").get<std::vector<std::size_t>>();
  if (j.contains("replications")) c.replications = j.at("replications").get<std::size_t>();
  if (j.contains("B")) c.B = j.at("B").get<std::size_t>();
  if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("algorithms")) c.algorithms = parse_algorithms(j.at("algorithms"));
  if (j.contains("level")) c.level = j.at("level").get<double>();
  return c;
}

json config_json(const StudyConfig& c) {
  json j;
  j["kind"] = study_kind_name(c.kind);
  j["truth"] = model_name(c.truth);
  j["truth_params"] = params_json(c.truth, c.truth_params);
  json tests = json::array();
  for (const auto& s : c.test_specs) tests.push_back(model_name(s));
  j["tests"] = tests;
  j["sample_sizes"] = c.sample_sizes;
  j["replications"] = c.replications;
  j["B"] = c.B;
  j["seed"] = c.seed;
  json algorithms = json::array();
  for (auto a : c.algorithms) algorithms.push_back(ks_algorithm_name(a));
  j["algorithms"] = algorithms;
  j["level"] = c.level;
  return j;
}

int cmd_bench(BenchFlags& f, std::ostream& out) {
  if (f.list) {
    for (const auto& name : study_preset_names()) out << name << '\n';
    return kExitOk;
  }
  if (f.config.empty()) fail(ErrorKind::input, "bench needs a preset name or a config file");
  Stopwatch clock;
  StudyConfig config;
  std::optional<std::uint64_t> checksum;
  const auto presets = study_preset_names();
  if (std::find(presets.begin(), presets.end(), f.config) != presets.end()) {
    config = study_preset(f.config);
  } else {
    std::ifstream file(f.config, std::ios::binary);
    if (!file) fail(ErrorKind::input, "'" + f.config + "' is neither a preset nor a readable file");
    const std::string text((std::istreambuf_iterator<char>(file)), std::istreambuf_iterator<char>());
    checksum = fnv1a64(text);
    try {
      config = config_from_json(json::parse(text));
    } catch (const json::exception& e) {
      fail(ErrorKind::input, "config '" + f.config + "': " + e.what());
    }
  }
  if (f.replications) config.replications = *f.replications;
  if (f.B) config.B = *f.B;
  if (!f.sizes.empty()) config.sample_sizes = f.sizes;
  if (f.seed_opt->count() > 0) config.seed = f.seed;
  config.threads = static_cast<int>(f.threads);
  const StudyResult result = run_study(config);

  std::ostringstream csv;
  write_csv(csv, result);
  if (!f.csv_path.empty()) {
    std::ofstream file(f.csv_path, std::ios::binary);
    if (!file) fail(ErrorKind::input, "cannot write '" + f.csv_path + "'");
    file << csv.str();
  }
  if (!f.json_path.empty()) {
    json flags;
    flags["config"] = f.config;
    json report;
    report["manifest"] = manifest("bench", flags, config.seed, checksum);
    report["study"] = config_json(config);
    json cells = json::array();
    for (const auto& c : result.cells) {
      cells.push_back({{"label", c.label},
                       {"n", c.sample_size},
                       {"value", c.value},
                       {"median", c.median},
                       {"rejections", c.rejections},
                       {"failures", c.failures},
                       {"raw", c.raw}});
    }
    report["cells"] = cells;
    write_json(f.json_path, report);
  }
  out << csv.str();
  out << "elapsed " << fmt(clock.seconds(), 3) << " s\n";
  return kExitOk;
}

}  // namespace

std::uint64_t fnv1a64(std::string_view bytes) noexcept {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

Observations parse_observations(std::string_view text) {
  Observations obs;
  obs.checksum = fnv1a64(text);
  bool header_allowed = true;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    std::vector<std::string_view> tokens;
    std::size_t i = 0;
    auto is_sep = [](char c) { return c == ' ' || c == '\t' || c == ',' || c == ';' || c == '\r'; };
    while (i < line.size()) {
      while (i < line.size() && is_sep(line[i])) ++i;
      std::size_t j = i;
      while (j < line.size() && !is_sep(line[j])) ++j;
      if (j > i) tokens.push_back(line.substr(i, j - i));
      i = j;
    }
    if (tokens.empty()) {
      if (end == text.size()) break;
      continue;
    }
    std::vector<double> parsed;
    std::optional<std::string_view> bad;
    for (auto tok : tokens) {
      if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
      if (ec != std::errc() || ptr != tok.data() + tok.size()) {
        bad = tok;
        break;
      }
      parsed.push_back(v);
    }
    if (bad) {
      if (header_allowed) {
        header_allowed = false;
        continue;
      }
      fail(ErrorKind::input,
           "line " + std::to_string(line_no) + ": cannot parse '" + std::string(*bad) + "' as a number");
    }
    header_allowed = false;
    for (double v : parsed) {
      obs.values.push_back(v);
      obs.lines.push_back(line_no);
    }
    if (end == text.size()) break;
  }
  if (obs.values.empty()) fail(ErrorKind::insufficient_data, "no observations");
  return obs;
}

Observations read_observations(const std::string& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) fail(ErrorKind::input, "cannot open '" + path + "'");
  const std::string text((std::istreambuf_iterator<char>(file)), std::istreambuf_iterator<char>());
  return parse_observations(text);
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Zero-inflated and hurdle model fitting, testing and selection"};
  app.name("zifit");
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  FitFlags fit_flags;
  auto* fit_cmd = app.add_subcommand("fit", "Maximum likelihood fit with Fisher information and Wald intervals");
  fit_cmd->add_option("input", fit_flags.input, "Data file")->required();
  add_model_flags(fit_cmd, fit_flags.model);
  fit_cmd->add_option("--init", fit_flags.init, "Starting baseline parameters");
  fit_cmd->add_option("--bounds", fit_flags.bounds, "Lower and upper parameter bounds")->expected(2);
  fit_cmd->add_option("--level", fit_flags.level, "Confidence level")->capture_default_str();
  fit_cmd->add_option("--seed", fit_flags.seed, "Seed for Monte Carlo expectations")->capture_default_str();
  fit_cmd->add_option("--mc-samples", fit_flags.mc_samples, "Monte Carlo draws for NB and BNB information")
      ->capture_default_str();
  fit_cmd->add_option("--json", fit_flags.json_path, "Write the JSON report here");
  unsigned unused_threads = 0;
  fit_cmd->add_option("--threads", unused_threads, "Accepted for uniformity; fitting is single-threaded");

  KsFlags ks_flags;
  auto* ks_cmd = app.add_subcommand("ks", "Bootstrapped Kolmogorov-Smirnov test");
  ks_cmd->add_option("input", ks_flags.input, "Data file")->required();
  add_model_flags(ks_cmd, ks_flags.model);
  ks_cmd->add_option("--algorithm", ks_flags.algorithm, "A (plain) or B (refit per replicate)")
      ->capture_default_str();
  add_bootstrap_flags(ks_cmd, ks_flags.boot);
  ks_cmd->add_option("--json", ks_flags.json_path, "Write the JSON report here");

  LrtFlags lrt_flags;
  auto* lrt_cmd = app.add_subcommand("lrt", "Bootstrapped likelihood-ratio test of H0 against H1");
  lrt_cmd->add_option("input", lrt_flags.input, "Data file")->required();
  lrt_cmd->add_option("--h0", lrt_flags.h0, "Null model")->required();
  lrt_cmd->add_option("--h1", lrt_flags.h1, "Alternative model")->required();
  add_bootstrap_flags(lrt_cmd, lrt_flags.boot);
  lrt_cmd->add_option("--json", lrt_flags.json_path, "Write the JSON report here");

  SelectFlags select_flags;
  auto* select_cmd = app.add_subcommand("select", "KS screening plus pairwise LRTs over candidates");
  select_cmd->add_option("input", select_flags.input, "Data file")->required();
  select_cmd->add_option("--candidates", select_flags.candidates, "Model names, or 'all'")
      ->delimiter(',')
      ->capture_default_str();
  select_cmd->add_option("--algorithm", select_flags.algorithm, "KS algorithm A or B")
      ->capture_default_str();
  select_cmd->add_option("--threshold", select_flags.threshold, "Significance threshold")
      ->capture_default_str();
  add_bootstrap_flags(select_cmd, select_flags.boot);
  select_cmd->add_option("--json", select_flags.json_path, "Write the JSON report here");

  SimulateFlags sim_flags;
  auto* sim_cmd = app.add_subcommand("simulate", "Draw a sample from a model as CSV");
  add_model_flags(sim_cmd, sim_flags.model);
  for (const char* name : {"phi", "lambda", "p", "r", "size", "alpha", "beta", "mu", "sigma"}) {
    sim_flags.values[name] = 0.0;
    sim_flags.options[name] =
        sim_cmd->add_option(std::string("--") + name, sim_flags.values[name],
                            std::string(name) == "size" ? "Beta-binomial n" : "Model parameter");
  }
  sim_cmd->add_option("-n,--count", sim_flags.count, "Number of draws")->required();
  sim_flags.seed_opt = sim_cmd->add_option("--seed", sim_flags.seed, "Random seed");
  sim_cmd->add_option("-o,--output", sim_flags.output, "CSV path (standard output when absent)");
  sim_cmd->add_option("--threads", unused_threads, "Accepted for uniformity; drawing is sequential");

  BenchFlags bench_flags;
  auto* bench_cmd = app.add_subcommand("bench", "Run a simulation study from a preset or JSON config");
  bench_cmd->add_option("config", bench_flags.config, "Preset name (see --list) or config file");
  bench_cmd->add_flag("--list", bench_flags.list, "List presets");
  bench_cmd->add_option("--replications", bench_flags.replications, "Override replications");
  bench_cmd->add_option("--bootstrap,-B", bench_flags.B, "Override bootstrap replicates");
  bench_cmd->add_option("--sizes", bench_flags.sizes, "Override sample sizes")->delimiter(',');
  bench_flags.seed_opt = bench_cmd->add_option("--seed", bench_flags.seed, "Override the seed");
  bench_cmd->add_option("--threads", bench_flags.threads, "Worker threads (0 reads ZIFIT_THREADS)");
  bench_cmd->add_option("--csv", bench_flags.csv_path, "Write the CSV table here");
  bench_cmd->add_option("--json", bench_flags.json_path, "Write the JSON twin here");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (fit_cmd->parsed()) return cmd_fit(fit_flags, out);
    if (ks_cmd->parsed()) return cmd_ks(ks_flags, out, err);
    if (lrt_cmd->parsed()) return cmd_lrt(lrt_flags, out, err);
    if (select_cmd->parsed()) return cmd_select(select_flags, out, err);
    if (sim_cmd->parsed()) return cmd_simulate(sim_flags, out, err);
    if (bench_cmd->parsed()) return cmd_bench(bench_flags, out);
  } catch (const Error& e) {
    err << "error (" << error_kind_name(e.kind()) << "): " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
  return kExitInput;
}

}  // namespace zifit::cli
