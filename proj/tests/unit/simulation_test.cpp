#include <gtest/gtest.h>

#include <sstream>

#include "zifit/error.hpp"
#include "zifit/simulation.hpp"

namespace {

using namespace zifit;

StudyConfig small_rejection_study() {
  StudyConfig c;
  c.kind = StudyKind::TypeOneError;
  c.truth = ModelSpec::zero_inflated(Family::Poisson);
  c.truth_params = {0.3, ParameterSet::poisson(10)};
  c.sample_sizes = {30, 60};
  c.replications = 4;
  c.B = 20;
  c.seed = 5;
  c.threads = 1;
  return c;
}

TEST(L1RelativeDistance, ZeroAtTruthAndSumsRelativeErrors) {
  const auto spec = ModelSpec::hurdle(Family::BetaNegBinomial);
  const ModelParams truth{0.3, ParameterSet::beta_neg_binomial(5, 8, 3)};
  EXPECT_EQ(l1_relative_distance(spec, truth, truth), 0.0);
  const ModelParams off{0.33, ParameterSet::beta_neg_binomial(5.5, 8, 2.7)};
  EXPECT_NEAR(l1_relative_distance(spec, off, truth), 0.1 + 0.1 + 0.0 + 0.1, 1e-12);
}

TEST(StudyKinds, NamesRoundTrip) {
  for (auto k : {StudyKind::TypeOneError, StudyKind::Power, StudyKind::MleConvergence,
                 StudyKind::CdfApproximation}) {
    EXPECT_EQ(parse_study_kind(study_kind_name(k)), k);
  }
  EXPECT_THROW(parse_study_kind("nonsense"), Error);
}

TEST(StudyPresets, AllValidate) {
  for (const auto& name : study_preset_names()) {
    EXPECT_NO_THROW(validate(study_preset(name))) << name;
  }
  EXPECT_THROW(study_preset("table99-desk"), Error);
  const auto t3 = study_preset("table3-desk");
  EXPECT_EQ(t3.kind, StudyKind::TypeOneError);
  EXPECT_EQ(t3.truth, ModelSpec::zero_inflated(Family::Poisson));
  EXPECT_EQ(t3.truth_params.phi, 0.3);
}

TEST(StudyConfig, ValidationRejectsBadConfigs) {
  auto c = small_rejection_study();
  c.replications = 0;
  EXPECT_THROW(validate(c), Error);
  c = small_rejection_study();
  c.sample_sizes = {9};
  EXPECT_THROW(validate(c), Error);
  c = small_rejection_study();
  c.test_specs = {ModelSpec::zero_inflated(Family::NegBinomial)};
  EXPECT_THROW(validate(c), Error);
  c = small_rejection_study();
  c.kind = StudyKind::Power;
  c.test_specs = {c.truth};
  EXPECT_THROW(validate(c), Error);
  c = small_rejection_study();
  c.kind = StudyKind::MleConvergence;
  c.sample_sizes = {100, 50};
  EXPECT_THROW(validate(c), Error);
}

TEST(TypeOneErrorStudy, CellsAndBookkeeping) {
  const auto r = type_one_error_study(small_rejection_study());
  ASSERT_EQ(r.cells.size(), 4u);  // two sizes times two algorithms
  for (const auto& cell : r.cells) {
    EXPECT_EQ(cell.raw.size() + cell.failures, 4u);
    EXPECT_GE(cell.value, 0.0);
    EXPECT_LE(cell.value, 1.0);
    EXPECT_EQ(cell.value, static_cast<double>(cell.rejections) / static_cast<double>(cell.raw.size()));
  }
}

TEST(TypeOneErrorStudy, SingleReplicationGivesZeroOrOne) {
  auto c = small_rejection_study();
  c.replications = 1;
  for (const auto& cell : type_one_error_study(c).cells) {
    EXPECT_TRUE(cell.value == 0.0 || cell.value == 1.0);
  }
}

// Property: results do not depend on the thread count.
TEST(Studies, ReproducibleAcrossThreadCounts) {
  auto c = small_rejection_study();
  c.kind = StudyKind::Power;
  c.test_specs = {ModelSpec::zero_inflated(Family::Geometric)};
  const auto a = run_study(c);
  c.threads = 3;
  const auto b = run_study(c);
  ASSERT_EQ(a.cells.size(), b.cells.size());
  for (std::size_t i = 0; i < a.cells.size(); ++i) EXPECT_EQ(a.cells[i].raw, b.cells[i].raw);
  std::ostringstream sa, sb;
  write_csv(sa, a);
  write_csv(sb, b);
  EXPECT_EQ(sa.str(), sb.str());
}

TEST(Studies, CsvHeaderAndRowCount) {
  const auto r = run_study(small_rejection_study());
  std::ostringstream out;
  write_csv(out, r);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "study,label,n,value,median,rejections,failures,replications");
  std::size_t rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, r.cells.size());
}

TEST(MleConvergenceStudy, ShrinksWithSampleSize) {
  StudyConfig c;
  c.kind = StudyKind::MleConvergence;
  c.truth = ModelSpec::hurdle(Family::Geometric);
  c.truth_params = {0.3, ParameterSet::geometric(0.3)};
  c.test_specs = {c.truth};
  c.sample_sizes = {100, 100000};
  c.replications = 3;
  c.seed = 6;
  const auto r = mle_convergence_study(c);
  ASSERT_FALSE(r.cells.empty());
  double small = 0.0, large = 0.0;
  for (const auto& cell : r.cells) (cell.sample_size == 100 ? small : large) = cell.value;
  EXPECT_LT(large, small);
  EXPECT_LT(large, 0.05);
}

TEST(CdfApproximationStudy, EquivalentApproximationIsClose) {
  StudyConfig c;
  c.kind = StudyKind::CdfApproximation;
  c.truth = ModelSpec::zero_inflated(Family::Poisson);
  c.truth_params = {0.3, ParameterSet::poisson(4)};
  c.test_specs = {ModelSpec::hurdle(Family::Poisson)};
  c.sample_sizes = {5000};
  c.replications = 3;
  c.seed = 7;
  const auto r = cdf_approximation_study(c);
  ASSERT_EQ(r.cells.size(), 1u);
  EXPECT_EQ(r.cells[0].raw.size(), 3u);
  EXPECT_LT(r.cells[0].value, 0.03);
}

}  // namespace
