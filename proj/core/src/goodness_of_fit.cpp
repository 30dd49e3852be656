#include "zifit/goodness_of_fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "zifit/error.hpp"
#include "zifit/parallel.hpp"
#include "zifit/random.hpp"

namespace zifit {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kMaxFailureShare = 0.2;

// Shared sweep over the merged evaluation points. `cdf` and `left` evaluate
// the model; the empirical side comes from the weighted sample.
template <class Cdf, class Left>
double sweep(const WeightedSample& s, std::vector<double> jumps, const Cdf& cdf, const Left& left) {
  if (s.empty()) fail(ErrorKind::insufficient_data, "KS statistic needs data");
  std::vector<double> points = s.values;
  const double lo = s.values.front(), hi = s.values.back();
  for (double j : jumps) {
    if (j >= lo && j <= hi) points.push_back(j);
  }
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());

  const double n = static_cast<double>(s.size);
  double below = 0.0;  // count of observations < current point
  std::size_t next = 0;
  double d = 0.0;
  for (double u : points) {
    double at = 0.0;
    if (next < s.values.size() && s.values[next] == u) at = s.counts[next++];
    const double fn_left = below / n;
    const double fn = (below + at) / n;
    d = std::max(d, std::fabs(left(u) - fn_left));
    d = std::max(d, std::fabs(cdf(u) - fn));
    below += at;
  }
  return d;
}

struct Replicate {
  double value = 0.0;
  bool ok = false;
};

std::vector<double> resample(const std::vector<double>& sorted, Rng& rng) {
  std::uniform_int_distribution<std::size_t> pick(0, sorted.size() - 1);
  std::vector<double> out(sorted.size());
  for (auto& v : out) v = sorted[pick(rng)];
  return out;
}

bool usable(const FitResult& r) { return r.theta_defined && std::isfinite(r.loglik); }

std::vector<double> prepared_sorted(const ModelSpec& spec, std::span<const double> data) {
  if (data.empty()) fail(ErrorKind::insufficient_data, "no observations");
  auto clean = prepare_observations(spec.family, data);
  std::sort(clean.begin(), clean.end());
  return clean;
}

void check_failures(std::size_t failed, std::size_t B, const char* what) {
  if (static_cast<double>(failed) > kMaxFailureShare * static_cast<double>(B)) {
    std::ostringstream os;
    os << what << ": " << failed << " of " << B
       << " bootstrap replicates failed, more than the 20% allowed";
    fail(ErrorKind::numerical, os.str());
  }
}

double model_ks(const WeightedSample& s, const FitResult& r) {
  const ModelCdf cdf(r.spec, r.params_hat, s.max());
  return ks_statistic(s, cdf);
}

KsReport run_kstest(std::span<const double> data, const ModelSpec& spec, KsAlgorithm algorithm,
                    const BootstrapOptions& opts) {
  if (opts.B == 0) fail(ErrorKind::domain, "at least one bootstrap replicate is required");
  const auto sorted = prepared_sorted(spec, data);
  const WeightedSample sample = WeightedSample::from(sorted);
  KsReport report;
  report.algorithm = algorithm;
  report.B = opts.B;
  report.seed = opts.seed;
  report.fit = fit(spec, sample, opts.fit);
  if (!usable(report.fit)) {
    fail(ErrorKind::numerical, "the model cannot be fitted to the data: " + report.fit.note);
  }
  report.statistic = model_ks(sample, report.fit);

  std::vector<Replicate> reps(opts.B);
  parallel_for(opts.B, resolve_threads(opts.threads), [&](std::size_t b) {
    Rng rng = make_rng(opts.seed, b + 1);
    try {
      const auto boot = resample(sorted, rng);
      const FitResult boot_fit = fit(spec, WeightedSample::from(boot), opts.fit);
      if (!usable(boot_fit)) return;
      const auto simulated = sample_model(spec, boot_fit.params_hat, sorted.size(), rng);
      const WeightedSample sim = WeightedSample::from(simulated);
      if (algorithm == KsAlgorithm::A) {
        reps[b].value = model_ks(sim, boot_fit);
      } else {
        const FitResult sim_fit = fit(spec, sim, opts.fit);
        if (!usable(sim_fit)) return;
        reps[b].value = model_ks(sim, sim_fit);
      }
      reps[b].ok = std::isfinite(reps[b].value);
    } catch (const Error&) {
      reps[b].ok = false;
    }
  });

  std::size_t exceed = 0;
  for (const auto& r : reps) {
    if (!r.ok) {
      ++report.failed;
      continue;
    }
    report.replicate_statistics.push_back(r.value);
    if (r.value > report.statistic) ++exceed;
  }
  check_failures(report.failed, opts.B, "KS test");
  report.p_value = static_cast<double>(exceed) /
                   static_cast<double>(report.replicate_statistics.size());
  return report;
}

}  // namespace

double ks_statistic(std::span<const double> data, const CdfView& view) {
  const WeightedSample s = WeightedSample::from(data);
  auto left = [&](double u) { return view.left_limit ? view.left_limit(u) : view.cdf(u); };
  return sweep(s, view.jumps, view.cdf, left);
}

double ks_statistic(const WeightedSample& sample, const ModelCdf& cdf) {
  if (sample.empty()) fail(ErrorKind::insufficient_data, "KS statistic needs data");
  return sweep(
      sample, cdf.jump_points(sample.min(), sample.max()), [&](double u) { return cdf(u); },
      [&](double u) { return cdf.left_limit(u); });
}

double ks_statistic(std::span<const double> data, const ModelSpec& spec, const ModelParams& params) {
  const WeightedSample s = WeightedSample::from(prepare_observations(spec.family, data));
  if (s.empty()) fail(ErrorKind::insufficient_data, "KS statistic needs data");
  return ks_statistic(s, ModelCdf(spec, params, s.max()));
}

double cdf_distance(const ModelSpec& a, const ModelParams& pa, const ModelSpec& b,
                    const ModelParams& pb) {
  if (is_discrete(a.family) != is_discrete(b.family)) {
    fail(ErrorKind::unsupported, "CDF distance needs two discrete or two continuous models");
  }
  if (is_discrete(a.family)) {
    double last = 64.0;
    for (;;) {
      const ModelCdf fa(a, pa, last), fb(b, pb, last);
      const bool done = (fa(last) >= 1.0 - 1e-12 && fb(last) >= 1.0 - 1e-12) || last >= 5e7;
      if (done) {
        double d = 0.0;
        for (double k = 0.0; k <= last; k += 1.0) d = std::max(d, std::fabs(fa(k) - fb(k)));
        return d;
      }
      last *= 4.0;
    }
  }
  // Continuous: both sides of the atom at 0 plus a dense grid between
  // extreme quantiles of either model.
  double lo = -1.0, hi = 1.0;
  for (double y = 1.0; y < 1e12; y *= 2.0) {
    if (model_cdf(a, pa, y) > 1.0 - 1e-12 && model_cdf(b, pb, y) > 1.0 - 1e-12) {
      hi = y;
      break;
    }
    hi = y;
  }
  for (double y = -1.0; y > -1e12; y *= 2.0) {
    if (model_cdf(a, pa, y) < 1e-12 && model_cdf(b, pb, y) < 1e-12) {
      lo = y;
      break;
    }
    lo = y;
  }
  const ModelCdf fa(a, pa), fb(b, pb);
  double d = std::fabs(fa.left_limit(0.0) - fb.left_limit(0.0));
  constexpr int kGrid = 200000;
  for (int i = 0; i <= kGrid; ++i) {
    const double y = lo + (hi - lo) * i / kGrid;
    d = std::max(d, std::fabs(fa(y) - fb(y)));
  }
  return std::max(d, std::fabs(fa(0.0) - fb(0.0)));
}

std::string_view ks_algorithm_name(KsAlgorithm a) noexcept {
  return a == KsAlgorithm::A ? "A" : "B";
}

KsReport kstest_A(std::span<const double> data, const ModelSpec& spec, const BootstrapOptions& opts) {
  return run_kstest(data, spec, KsAlgorithm::A, opts);
}

KsReport kstest_B(std::span<const double> data, const ModelSpec& spec, const BootstrapOptions& opts) {
  return run_kstest(data, spec, KsAlgorithm::B, opts);
}

KsReport kstest(std::span<const double> data, const ModelSpec& spec, KsAlgorithm algorithm,
                const BootstrapOptions& opts) {
  return run_kstest(data, spec, algorithm, opts);
}

LrtReport lrt_bootstrap(std::span<const double> data, const ModelSpec& h0, const ModelSpec& h1,
                        const BootstrapOptions& opts) {
  if (opts.B == 0) fail(ErrorKind::domain, "at least one bootstrap replicate is required");
  auto sorted = prepared_sorted(h0, data);
  prepare_observations(h1.family, sorted);
  const WeightedSample sample = WeightedSample::from(sorted);
  LrtReport report;
  report.B = opts.B;
  report.seed = opts.seed;
  report.h0 = h0;
  report.h1 = h1;
  report.fit_h0 = fit(h0, sample, opts.fit);
  report.fit_h1 = fit(h1, sample, opts.fit);
  if (!usable(report.fit_h0) || !usable(report.fit_h1)) {
    fail(ErrorKind::numerical, "both hypotheses must be fittable on the data");
  }
  report.lambda = report.fit_h0.loglik - report.fit_h1.loglik;
  report.tie_tolerance =
      1e-7 * (1.0 + std::fabs(report.fit_h0.loglik) + std::fabs(report.fit_h1.loglik));

  std::vector<Replicate> reps(opts.B);
  parallel_for(opts.B, resolve_threads(opts.threads), [&](std::size_t b) {
    Rng rng = make_rng(opts.seed, b + 1);
    try {
      const WeightedSample boot = WeightedSample::from(resample(sorted, rng));
      const FitResult f0 = fit(h0, boot, opts.fit);
      const FitResult f1 = fit(h1, boot, opts.fit);
      if (!usable(f0) || !usable(f1)) return;
      const WeightedSample sim =
          WeightedSample::from(sample_model(h0, f0.params_hat, sorted.size(), rng));
      const FitResult s0 = fit(h0, sim, opts.fit);
      const FitResult s1 = fit(h1, sim, opts.fit);
      if (!usable(s0) || !usable(s1)) return;
      reps[b].value = s0.loglik - s1.loglik;
      reps[b].ok = std::isfinite(reps[b].value);
    } catch (const Error&) {
      reps[b].ok = false;
    }
  });

  std::size_t below = 0;
  for (const auto& r : reps) {
    if (!r.ok) {
      ++report.failed;
      continue;
    }
    report.replicate_lambdas.push_back(r.value);
    if (r.value < report.lambda + report.tie_tolerance) ++below;
  }
  check_failures(report.failed, opts.B, "likelihood-ratio test");
  report.p_value = static_cast<double>(below) / static_cast<double>(report.replicate_lambdas.size());
  return report;
}

std::vector<ModelSpec> all_candidates() {
  std::vector<ModelSpec> out;
  for (Family f : kAllFamilies) out.push_back(ModelSpec::baseline(f));
  for (Family f : kAllFamilies) {
    if (is_discrete(f)) out.push_back(ModelSpec::zero_inflated(f));
  }
  for (Family f : kAllFamilies) {
    if (is_discrete(f)) out.push_back(ModelSpec::hurdle(f));
  }
  return out;
}

SelectionReport model_select(std::span<const double> data, const std::vector<ModelSpec>& candidates,
                             const BootstrapOptions& opts, double threshold,
                             KsAlgorithm algorithm) {
  if (candidates.empty()) fail(ErrorKind::domain, "model selection needs at least one candidate");
  if (data.empty()) fail(ErrorKind::insufficient_data, "no observations");
  SelectionReport report;
  report.threshold = threshold;
  report.algorithm = algorithm;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    CandidateOutcome outcome;
    outcome.spec = candidates[i];
    BootstrapOptions o = opts;
    o.seed = mix_seed(opts.seed, i);
    try {
      outcome.ks = kstest(data, candidates[i], algorithm, o);
      outcome.passing = outcome.ks->p_value > threshold;
    } catch (const Error& e) {
      outcome.failure = e.what();
    }
    if (outcome.passing) report.passing.push_back(i);
    report.candidates.push_back(std::move(outcome));
  }
  const auto k = static_cast<Eigen::Index>(report.passing.size());
  report.lrt_p_values = Eigen::MatrixXd::Ones(k, k);
  report.lrt_lambdas = Eigen::MatrixXd::Zero(k, k);
  for (Eigen::Index r = 0; r < k; ++r) {
    for (Eigen::Index c = 0; c < k; ++c) {
      if (r == c) continue;
      const std::size_t i = report.passing[static_cast<std::size_t>(r)];
      const std::size_t j = report.passing[static_cast<std::size_t>(c)];
      BootstrapOptions o = opts;
      o.seed = mix_seed(opts.seed, 1000003ULL * (i + 1) + j);
      try {
        const LrtReport lrt = lrt_bootstrap(data, candidates[i], candidates[j], o);
        report.lrt_p_values(r, c) = lrt.p_value;
        report.lrt_lambdas(r, c) = lrt.lambda;
      } catch (const Error&) {
        report.lrt_p_values(r, c) = kNaN;
        report.lrt_lambdas(r, c) = kNaN;
      }
    }
  }
  for (Eigen::Index r = 0; r < k; ++r) {
    bool beaten = false;
    for (Eigen::Index c = 0; c < k; ++c) {
      const double p = report.lrt_p_values(r, c);
      if (r != c && !std::isnan(p) && p < threshold) beaten = true;
    }
    if (!beaten) report.recommendation.push_back(report.passing[static_cast<std::size_t>(r)]);
  }
  return report;
}

}  // namespace zifit
