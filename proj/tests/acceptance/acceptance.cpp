// Acceptance driver: one PASS/FAIL line per criterion. Pass criterion ids
// as arguments to run a subset; no arguments runs everything.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "../support/oracles.hpp"
#include "zifit/error.hpp"
#include "zifit/fisher.hpp"
#include "zifit/goodness_of_fit.hpp"
#include "zifit/mle.hpp"
#include "zifit/parallel.hpp"
#include "zifit/simulation.hpp"
#include "zifit_cli/cli.hpp"

namespace {

using namespace zifit;
namespace fs = std::filesystem;

struct Verdict {
  bool pass = true;
  std::ostringstream detail;
  std::string first_failure;

  void require(bool ok, const std::string& what) {
    if (!ok && pass) {
      first_failure = what;
      pass = false;
    }
  }

  std::string text() const {
    std::string out = detail.str();
    while (!out.empty() && (out.back() == ' ' || out.back() == ';')) out.pop_back();
    if (!first_failure.empty()) out += "; first failure: " + first_failure;
    return out;
  }
};

const std::vector<Family> kDiscrete{Family::Poisson, Family::Geometric, Family::NegBinomial,
                                    Family::BetaBinomial, Family::BetaNegBinomial};

ModelParams zi(double phi, ParameterSet theta) { return ModelParams{phi, theta}; }

std::string num(double v) {
  std::ostringstream os;
  os.precision(4);
  os << v;
  return os.str();
}

// ------------------------------------------------------------------ 1 ----
void gradients(Verdict& v) {
  Rng rng = make_rng(101);
  double worst = 0.0;
  int checks = 0;
  for (Family f : kAllFamilies) {
    for (int k = 0; k < 50; ++k) {
      const ParameterSet theta = oracle::random_theta(f, rng, true);
      double y = oracle::draw_baseline_std(theta, rng);
      if (!is_discrete(f) && f != Family::Normal && y <= 0.0) y = 0.5;
      const Vec g = grad_log_density(theta, y);
      const std::vector<double> x(theta.values.begin(), theta.values.begin() + theta.dim());
      auto at = [&](const std::vector<double>& e) {
        ParameterSet t = theta;
        for (int i = 0; i < t.dim(); ++i) t[i] = e[static_cast<std::size_t>(i)];
        return t;
      };
      const auto fd = oracle::fd_gradient(
          [&](const std::vector<double>& e) { return log_density(at(e), y); }, x, 1e-5);
      for (int i = 0; i < theta.dim(); ++i) {
        const double err = std::fabs(g[i] - fd[static_cast<std::size_t>(i)]);
        worst = std::max(worst, err);
        ++checks;
        v.require(err <= 1e-4, std::string(family_name(f)) + " density gradient off by " + num(err));
      }
      if (is_discrete(f)) {
        const Vec g0 = grad_log_zero_prob(theta);
        const auto fd0 = oracle::fd_gradient(
            [&](const std::vector<double>& e) { return log_zero_prob(at(e)); }, x, 1e-5);
        for (int i = 0; i < theta.dim(); ++i) {
          const double err = std::fabs(g0[i] - fd0[static_cast<std::size_t>(i)]);
          worst = std::max(worst, err);
          ++checks;
          v.require(err <= 1e-4, std::string(family_name(f)) + " zero-prob gradient off by " + num(err));
        }
      }
    }
  }
  v.detail << checks << " components, worst absolute error " << num(worst);
}

// ------------------------------------------------------------------ 2 ----
void fisher_oracle(Verdict& v) {
  struct Case {
    const char* label;
    ModelSpec spec;
  };
  const std::vector<Case> cases{
      {"ZAGe", ModelSpec::hurdle(Family::Geometric)},
      {"PH", ModelSpec::hurdle(Family::Poisson)},
      {"NBH", ModelSpec::hurdle(Family::NegBinomial)},
      {"ZABB", ModelSpec::hurdle(Family::BetaBinomial)},
      {"ZABNB", ModelSpec::hurdle(Family::BetaNegBinomial)},
      {"ZIGe", ModelSpec::zero_inflated(Family::Geometric)},
      {"ZIP", ModelSpec::zero_inflated(Family::Poisson)},
      {"ZINB", ModelSpec::zero_inflated(Family::NegBinomial)},
      {"ZIBB", ModelSpec::zero_inflated(Family::BetaBinomial)},
      {"ZIBNB", ModelSpec::zero_inflated(Family::BetaNegBinomial)},
      {"ZAZIG", ModelSpec::hurdle(Family::Normal)},
      {"ZAZILN", ModelSpec::hurdle(Family::LogNormal)},
      {"ZAZIHN", ModelSpec::hurdle(Family::HalfNormal)},
      {"ZAZIE", ModelSpec::hurdle(Family::Exponential)},
  };
  Rng rng = make_rng(202);
  double worst_ratio = 0.0;
  std::string worst_at;
  for (const auto& c : cases) {
    for (int point = 0; point < 3; ++point) {
      const ModelParams p = oracle::random_params(c.spec, rng);
      const Mat F = fisher_information(c.spec, p).matrix;
      const auto O = oracle::mc_information(c.spec, p, 1000000, 1e-4, 3000 + point);
      for (std::size_t i = 0; i < O.size(); ++i) {
        for (std::size_t j = 0; j < O.size(); ++j) {
          const double a = F(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
          const double tol = std::max(0.05 * std::fabs(O[i][j]), 1e-3);
          const double ratio = std::fabs(a - O[i][j]) / tol;
          if (ratio > worst_ratio) {
            worst_ratio = ratio;
            worst_at = std::string(c.label) + "[" + std::to_string(i) + "," + std::to_string(j) +
                       "] analytic " + num(a) + " vs oracle " + num(O[i][j]);
          }
          v.require(ratio <= 1.0, std::string(c.label) + " entry (" + std::to_string(i) + "," +
                                      std::to_string(j) + ") analytic " + num(a) + " vs oracle " +
                                      num(O[i][j]));
        }
      }
    }
  }
  v.detail << "14 models x 3 points; worst error/tolerance " << num(worst_ratio) << " at "
           << worst_at;
}

// ------------------------------------------------------------------ 3 ----
void inverse_identity(Verdict& v) {
  Rng rng = make_rng(303);
  double worst = 0.0;
  for (Family f : kDiscrete) {
    const ModelSpec spec = ModelSpec::zero_inflated(f);
    for (int k = 0; k < 20; ++k) {
      const ModelParams p = oracle::random_params(spec, rng);
      const Mat F = fisher_zero_inflated(spec, p).matrix;
      const Mat inv = inverse_fisher_zi(spec, p).matrix;
      const Mat I = Mat::Identity(F.rows(), F.cols());
      const double err = (inv * F - I).cwiseAbs().maxCoeff();
      worst = std::max(worst, err);
      v.require(err <= 1e-8, std::string(family_name(f)) + " identity error " + num(err));
    }
  }
  v.detail << "100 points, worst max-entry error " << num(worst);
}

// ------------------------------------------------------------------ 4 ----
void zi_za_equivalence(Verdict& v) {
  Rng rng = make_rng(404);
  double worst = 0.0;
  int points = 0;
  for (Family f : kDiscrete) {
    const ModelSpec zis = ModelSpec::zero_inflated(f), zas = ModelSpec::hurdle(f);
    for (int k = 0; k < 20; ++k) {
      const ModelParams p = oracle::random_params(zis, rng);
      const ModelParams q{zi_to_za(p.theta, p.phi), p.theta};
      double mass = 0.0;
      for (double y = 0.0; mass < 1.0 - 1e-9; y += 1.0) {
        const double a = std::exp(model_log_density(zis, p, y));
        const double b = std::exp(model_log_density(zas, q, y));
        mass += a;
        worst = std::max(worst, std::fabs(a - b));
        ++points;
        v.require(std::fabs(a - b) <= 1e-12, std::string(family_name(f)) + " differs by " +
                                                 num(std::fabs(a - b)));
        if (y > 1e7) {
          v.require(false, "support prefix did not reach the target mass");
          break;
        }
      }
      // Round trip back to the zero-inflated weight.
      v.require(std::fabs(za_to_zi(q.theta, q.phi) - p.phi) <= 1e-12, "round trip of phi");
    }
  }
  v.detail << points << " support points over 100 settings, worst difference " << num(worst);
}

// ------------------------------------------------------------------ 5 ----
void mle_exactness(Verdict& v) {
  Rng rng = make_rng(505);
  int exact = 0;
  for (int k = 0; k < 100; ++k) {
    const Family f = kAllFamilies[static_cast<std::size_t>(k) % kAllFamilies.size()];
    const ModelSpec spec = ModelSpec::hurdle(f);
    const ModelParams p = oracle::random_params(spec, rng);
    const std::size_t n = 20 + static_cast<std::size_t>(oracle::uniform(rng, 0.0, 280.0));
    std::vector<double> data(n);
    for (auto& y : data) y = oracle::draw_model_std(spec, p, rng);
    const std::size_t zeros = static_cast<std::size_t>(std::count(data.begin(), data.end(), 0.0));
    const double expected = static_cast<double>(zeros) / static_cast<double>(n);
    const FitResult r = fit(spec, data);
    if (r.params_hat.phi == expected) ++exact;
    v.require(r.params_hat.phi == expected, model_name(spec) + " phi " + num(r.params_hat.phi) +
                                                " vs " + num(expected));
  }
  double worst_gap = -1e300;
  int datasets = 0;
  for (Family f : kDiscrete) {
    for (int k = 0; k < 30; ++k) {
      const ModelKind kind = static_cast<ModelKind>(k % 3);
      ModelSpec spec = ModelSpec::baseline(f);
      spec.kind = kind;
      const ModelParams p = oracle::random_params(spec, rng);
      std::vector<double> data(50);
      for (auto& y : data) y = oracle::draw_model_std(spec, p, rng);
      if (spec.has_phi() && std::count(data.begin(), data.end(), 0.0) == 50) continue;
      ++datasets;
      double fitted = -std::numeric_limits<double>::infinity();
      try {
        const FitResult r = fit(spec, data);
        fitted = r.loglik;
      } catch (const Error& e) {
        v.require(false, model_name(spec) + " fit failed: " + e.what());
        continue;
      }
      const double grid = oracle::grid_max_loglik(spec, oracle::tally_of(data));
      worst_gap = std::max(worst_gap, grid - fitted);
      v.require(grid <= fitted + 1e-3, model_name(spec) + " grid " + num(grid) + " beats fit " +
                                           num(fitted));
    }
  }
  v.detail << exact << "/100 hurdle phi exact; " << datasets
           << " grid-oracle datasets, largest (grid - fit) " << num(worst_gap);
}

// ------------------------------------------------------------------ 6 ----
void convergence(Verdict& v) {
  struct Case {
    const char* preset;
    const char* label;
    std::vector<double> limits;
  };
  const std::vector<Case> cases{{"table1-desk", "bnbh:integer", {0.6, 0.25, 0.15}},
                                {"table2-desk", "bbh:integer", {0.10, 0.10, 0.10}}};
  for (const auto& c : cases) {
    const StudyResult r = mle_convergence_study(study_preset(c.preset));
    std::vector<double> values;
    for (const auto& cell : r.cells) {
      if (cell.label == c.label) values.push_back(cell.failures == 0 ? cell.value : 1e300);
    }
    v.require(values.size() == c.limits.size(), "missing cells");
    v.detail << c.label << " L1RD";
    for (std::size_t i = 0; i < values.size(); ++i) {
      v.detail << ' ' << num(values[i]);
      v.require(values[i] <= c.limits[i], std::string(c.label) + " exceeds " + num(c.limits[i]));
      if (i > 0) {
        v.require(values[i] <= 1.1 * values[i - 1], std::string(c.label) + " increases");
      }
    }
    v.detail << "; ";
  }
}

// ------------------------------------------------------------------ 7 ----
void coverage(Verdict& v) {
  const ModelSpec spec = ModelSpec::zero_inflated(Family::NegBinomial);
  const ModelParams truth = zi(0.4, ParameterSet::neg_binomial(10.0, 0.2));
  const Vec t = to_vector(spec, truth);
  std::vector<int> covered(3, 0);
  int unavailable = 0;
  for (int k = 0; k < 200; ++k) {
    Rng rng = make_rng(707, static_cast<std::uint64_t>(k));
    std::vector<double> data(1000);
    for (auto& y : data) y = oracle::draw_model_std(spec, truth, rng);
    const FitResult r = fit(spec, data);
    const ConfidenceIntervals ci =
        confidence_intervals(r, 0.95, MonteCarloConfig{100000, mix_seed(7070, k)});
    if (!ci.available) {
      ++unavailable;
      continue;
    }
    for (int i = 0; i < 3; ++i) {
      const auto& iv = ci.intervals[static_cast<std::size_t>(i)];
      if (iv.lower <= t[i] && t[i] <= iv.upper) ++covered[static_cast<std::size_t>(i)];
    }
  }
  const char* names[] = {"phi", "r", "p"};
  for (int i = 0; i < 3; ++i) {
    const double rate = covered[static_cast<std::size_t>(i)] / 200.0;
    v.detail << names[i] << ' ' << num(rate) << ' ';
    v.require(rate >= 0.90 && rate <= 0.99, std::string(names[i]) + " coverage " + num(rate));
  }
  v.detail << "(unavailable " << unavailable << ")";
}

// ------------------------------------------------------------------ 8 ----
void zero_alteration(Verdict& v) {
  const ModelSpec ph = ModelSpec::hurdle(Family::Poisson);
  int neither = 0, inflated = 0;
  for (int k = 0; k < 100; ++k) {
    Rng rng = make_rng(808, static_cast<std::uint64_t>(k));
    std::vector<double> data(1000);
    for (auto& y : data) y = oracle::draw_baseline_std(ParameterSet::poisson(0.8), rng);
    if (test_zero_alteration(fit(ph, data), WeightedSample::from(data)).verdict == ZeroAlteration::Neither) ++neither;
  }
  const ModelSpec zip = ModelSpec::zero_inflated(Family::Poisson);
  for (int k = 0; k < 100; ++k) {
    Rng rng = make_rng(809, static_cast<std::uint64_t>(k));
    std::vector<double> data(500);
    for (auto& y : data) y = oracle::draw_model_std(zip, zi(0.3, ParameterSet::poisson(10.0)), rng);
    if (test_zero_alteration(fit(ph, data), WeightedSample::from(data)).verdict == ZeroAlteration::Inflated) ++inflated;
  }
  v.detail << "Poisson -> neither " << neither << "/100; ZIP -> inflated " << inflated << "/100";
  v.require(neither >= 90, "too few 'neither' verdicts");
  v.require(inflated >= 95, "too few 'inflated' verdicts");
}

// ------------------------------------------------------------------ 9 ----
unsigned env_threads() { return resolve_threads(0); }

void type_one_error(Verdict& v) {
  struct Case {
    Family f;
    ModelParams p;
  };
  const std::vector<Case> cases{
      {Family::Poisson, zi(0.3, ParameterSet::poisson(10.0))},
      {Family::NegBinomial, zi(0.3, ParameterSet::neg_binomial(5.0, 0.2))},
      {Family::BetaNegBinomial, zi(0.3, ParameterSet::beta_neg_binomial(3.0, 3.0, 5.0))},
      {Family::BetaBinomial, zi(0.3, ParameterSet::beta_binomial(5.0, 8.0, 3.0))},
  };
  for (const auto& c : cases) {
    StudyConfig cfg;
    cfg.kind = StudyKind::TypeOneError;
    cfg.truth = ModelSpec::zero_inflated(c.f);
    cfg.truth_params = c.p;
    cfg.sample_sizes = {200};
    cfg.replications = 200;
    cfg.B = 100;
    cfg.seed = 909;
    cfg.threads = static_cast<int>(env_threads());
    const StudyResult r = type_one_error_study(cfg);
    v.detail << model_name(cfg.truth) << ':';
    for (const auto& cell : r.cells) {
      v.detail << ' ' << cell.label << '=' << num(cell.value) << " (failed " << cell.failures << ')';
      v.require(cell.value <= 0.05, model_name(cfg.truth) + " " + cell.label + " rate " + num(cell.value));
    }
    v.detail << "; ";
  }
}

// ----------------------------------------------------------------- 10 ----
void power(Verdict& v) {
  struct Case {
    Family truth;
    ModelParams p;
    Family test;
    double limit;
  };
  const std::vector<Case> cases{
      {Family::Poisson, zi(0.3, ParameterSet::poisson(10.0)), Family::BetaNegBinomial, 0.85},
      {Family::BetaNegBinomial, zi(0.3, ParameterSet::beta_neg_binomial(3.0, 3.0, 5.0)),
       Family::Poisson, 0.95},
      {Family::BetaBinomial, zi(0.3, ParameterSet::beta_binomial(5.0, 8.0, 3.0)),
       Family::BetaNegBinomial, 0.90},
  };
  for (const auto& c : cases) {
    StudyConfig cfg;
    cfg.kind = StudyKind::Power;
    cfg.truth = ModelSpec::zero_inflated(c.truth);
    cfg.truth_params = c.p;
    cfg.test_specs = {ModelSpec::zero_inflated(c.test)};
    cfg.sample_sizes = {100};
    cfg.replications = 200;
    cfg.B = 100;
    cfg.seed = 1010;
    cfg.threads = static_cast<int>(env_threads());
    const StudyResult r = power_study(cfg);
    v.detail << model_name(cfg.truth) << " vs";
    for (const auto& cell : r.cells) {
      v.detail << ' ' << cell.label << '=' << num(cell.value) << " (failed " << cell.failures << ')';
      v.require(cell.value >= c.limit, cell.label + " power " + num(cell.value));
    }
    v.detail << "; ";
  }
}

// ----------------------------------------------------------------- 11 ----
void indistinguishability(Verdict& v) {
  struct Case {
    Family truth;
    ModelParams p;
    Family approx;
  };
  const std::vector<Case> cases{
      {Family::Poisson, zi(0.3, ParameterSet::poisson(10.0)), Family::NegBinomial},
      {Family::BetaNegBinomial, zi(0.3, ParameterSet::beta_neg_binomial(15.0, 19.0, 10.0)),
       Family::BetaBinomial},
  };
  for (const auto& c : cases) {
    StudyConfig cfg;
    cfg.kind = StudyKind::CdfApproximation;
    cfg.truth = ModelSpec::zero_inflated(c.truth);
    cfg.truth_params = c.p;
    cfg.test_specs = {ModelSpec::zero_inflated(c.approx)};
    cfg.sample_sizes = {100, 1000, 5000};
    cfg.replications = 20;
    cfg.seed = 1111;
    cfg.threads = static_cast<int>(env_threads());
    const StudyResult r = cdf_approximation_study(cfg);
    v.detail << model_name(cfg.truth) << " by " << model_name(cfg.test_specs[0]) << ':';
    for (const auto& cell : r.cells) {
      v.detail << " N=" << cell.sample_size << " mean " << num(cell.value);
    }
    const auto& last = r.cells.back();
    v.require(last.failures == 0 && last.value <= 0.03,
              model_name(cfg.truth) + " distance " + num(last.value));
    v.detail << "; ";
  }
}

// ----------------------------------------------------------------- 12 ----
void ks_oracle(Verdict& v) {
  Rng rng = make_rng(1212);
  double worst = 0.0;
  for (int k = 0; k < 50; ++k) {
    const Family f = kAllFamilies[static_cast<std::size_t>(k) % kAllFamilies.size()];
    ModelSpec spec = ModelSpec::baseline(f);
    spec.kind = static_cast<ModelKind>((k / 9) % 3);
    if (spec.is_zazi()) spec.kind = ModelKind::Hurdle;
    const ModelParams model = oracle::random_params(spec, rng);
    const ModelParams source = oracle::random_params(spec, rng);
    const std::size_t n = 5 + static_cast<std::size_t>(oracle::uniform(rng, 0.0, 195.0));
    std::vector<double> data(n);
    for (auto& y : data) y = oracle::draw_model_std(spec, source, rng);
    const double fast = ks_statistic(data, spec, model);
    const double slow = oracle::brute_force_ks(data, spec, model);
    worst = std::max(worst, std::fabs(fast - slow));
    v.require(std::fabs(fast - slow) <= 1e-9, model_name(spec) + " jump-point " + num(fast) +
                                                  " vs grid " + num(slow));
  }
  v.detail << "50 pairs, worst difference " << num(worst);
}

// ----------------------------------------------------------------- 13 ----
std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
}

void reproducibility(Verdict& v) {
  const fs::path dir = fs::temp_directory_path() / ("zifit_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  std::ostringstream sink;
  auto run = [&](std::vector<std::string> args) { return cli::run(args, sink, sink); };
  const std::string data = (dir / "zip.csv").string();
  run({"simulate", "-m", "zip", "--phi", "0.3", "--lambda", "10", "-n", "150", "--seed", "13",
       "-o", data});
  {
    std::ofstream cfg(dir / "study.json");
    cfg << R"({"kind":"type_one_error","truth":"zip","truth_params":{"phi":0.3,"lambda":10},)"
        << R"("sample_sizes":[40],"replications":6,"B":20,"seed":5})";
  }
  struct Command {
    std::string name;
    std::vector<std::string> args;
    std::string output_flag;
  };
  const std::vector<Command> commands{
      {"fit", {"fit", data, "-m", "zinb", "--seed", "3"}, "--json"},
      {"ks", {"ks", data, "-m", "zip", "-B", "60", "--seed", "3"}, "--json"},
      {"ks-B", {"ks", data, "-m", "zinb", "--algorithm", "B", "-B", "30", "--seed", "3"}, "--json"},
      {"lrt", {"lrt", data, "--h0", "poisson", "--h1", "zip", "-B", "40", "--seed", "3"}, "--json"},
      {"select",
       {"select", data, "--candidates", "poisson,zip,ph,zinb", "-B", "30", "--seed", "3"},
       "--json"},
      {"bench", {"bench", (dir / "study.json").string()}, "--json"},
      {"simulate", {"simulate", "-m", "zibnb", "--phi", "0.3", "--r", "3", "--alpha", "3", "--beta",
                    "5", "-n", "200", "--seed", "9"}, "-o"},
  };
  for (const auto& c : commands) {
    std::vector<std::string> outputs;
    for (const char* threads : {"1", "3"}) {
      const fs::path out = dir / (c.name + "_" + threads + ".out");
      auto args = c.args;
      args.insert(args.end(), {"--threads", threads, c.output_flag, out.string()});
      const int code = run(args);
      v.require(code == 0 || (c.name == "select" && code == 1),
                c.name + " exited with " + std::to_string(code));
      outputs.push_back(slurp(out));
    }
    v.require(!outputs[0].empty() && outputs[0] == outputs[1], c.name + " output differs");
    v.detail << c.name << (outputs[0] == outputs[1] ? " identical" : " DIFFERS") << "; ";
  }
  fs::remove_all(dir);
}

struct Criterion {
  int id;
  const char* title;
  void (*run)(Verdict&);
};

const Criterion kCriteria[] = {
    {1, "analytic gradients match central finite differences", gradients},
    {2, "Fisher information matches Monte Carlo -E[Hessian]", fisher_oracle},
    {3, "closed-form ZI inverse times information is the identity", inverse_identity},
    {4, "ZI and hurdle densities agree under the weight map", zi_za_equivalence},
    {5, "hurdle phi exact and no grid point beats the fitter", mle_exactness},
    {6, "nested-sample L1RD convergence for BNBH and BBH", convergence},
    {7, "Wald interval coverage for ZINB", coverage},
    {8, "zero-alteration verdicts", zero_alteration},
    {9, "KS type-I error at N=200", type_one_error},
    {10, "KS power at N=100", power},
    {11, "sup CDF distance of approximating fits at N=5000", indistinguishability},
    {12, "jump-point KS statistic equals dense-grid sup", ks_oracle},
    {13, "CLI reports byte-identical across thread counts", reproducibility},
};

}  // namespace

int main(int argc, char** argv) {
  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));
  bool all_pass = true;
  for (const auto& c : kCriteria) {
    if (!wanted.empty() && !wanted.count(c.id)) continue;
    Verdict v;
    const auto start = std::chrono::steady_clock::now();
    try {
      c.run(v);
    } catch (const std::exception& e) {
      v.require(false, std::string("exception: ") + e.what());
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("CRITERION %2d %s  %s  [%s] (%.1f s)\n", c.id, v.pass ? "PASS" : "FAIL", c.title,
                v.text().c_str(), secs);
    std::fflush(stdout);
    all_pass = all_pass && v.pass;
  }
  return all_pass ? 0 : 1;
}
