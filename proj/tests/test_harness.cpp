#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cenlad/csv_io.hpp"
#include "cenlad/harness.hpp"

namespace cenlad {
namespace {

std::vector<DesignConfig> small_designs() {
  DesignConfig a;
  a.n = 30;
  a.p = 10;
  a.s = 2;
  DesignConfig b = a;
  b.snr = 2.0;
  return {a, b};
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    std::vector<std::string> fields;
    std::istringstream ls(line);
    for (std::string f; std::getline(ls, f, ',');) fields.push_back(f);
    rows.push_back(fields);
  }
  return rows;
}

TEST(SimulationLambda, Rule) {
  EXPECT_NEAR(simulation_lambda(70, 100), 0.24 * std::sqrt(std::log(100.0) / 70.0), 1e-15);
  EXPECT_EQ(simulation_lambda(10, 1), 0.0);
  EXPECT_THROW(simulation_lambda(0, 10), Error);
}

TEST(RunReplicate, DeterministicAndConsistent) {
  const DesignConfig cfg = small_designs()[0];
  const auto a = run_replicate(cfg, 1, 0, 5, ExperimentOptions{});
  const auto b = run_replicate(cfg, 1, 0, 5, ExperimentOptions{});
  ASSERT_EQ(a.size(), 3U);
  for (std::size_t k = 0; k < a.size(); ++k) {
    EXPECT_EQ(a[k].estimator, kEstimators[k]);
    EXPECT_EQ(a[k].pred_err, b[k].pred_err);
    EXPECT_EQ(a[k].est_err, b[k].est_err);
    EXPECT_EQ(a[k].objective, b[k].objective);
    EXPECT_EQ(a[k].seed, replicate_seed(5, 1, 0));
  }
  // CL minimizes the censored objective, so it is no worse than NL or RL there.
  EXPECT_LE(a[0].objective, a[1].objective + 1e-12);
  EXPECT_LE(a[0].objective, a[2].objective + 1e-12);
  EXPECT_NE(run_replicate(cfg, 1, 1, 5, ExperimentOptions{})[0].seed, a[0].seed);
}

TEST(RunReplicate, UncensoredObjectivesAgree) {
  const DesignConfig cfg = DesignConfig::constant_censoring(30, 10, 2, 4.0, -1e9);
  const auto recs = run_replicate(cfg, 1, 0, 2, ExperimentOptions{});
  EXPECT_NEAR(recs[0].objective, recs[1].objective, 1e-6);
  EXPECT_NEAR(recs[1].objective, recs[2].objective, 1e-6);
  EXPECT_EQ(recs[0].censored_frac, 0.0);
}

TEST(RunReplicate, RlWithoutUncensoredRowsIsNull) {
  const DesignConfig cfg = DesignConfig::constant_censoring(30, 10, 2, 4.0, 100.0);
  const auto recs = run_replicate(cfg, 1, 0, 2, ExperimentOptions{});
  EXPECT_FALSE(recs[0].is_null);
  EXPECT_FALSE(recs[1].is_null);
  EXPECT_TRUE(recs[2].is_null);
  const AggregateRow row = aggregate(cfg, 1, 0.1, recs);
  EXPECT_EQ(row[Estimator::kRL].nulls, 1);
  EXPECT_EQ(row[Estimator::kRL].count, 0);
  EXPECT_TRUE(std::isnan(row[Estimator::kRL].est_mean));
}

TEST(Aggregate, MeanAndSampleSd) {
  DesignConfig cfg;
  std::vector<RunRecord> recs(2);
  recs[0].design_id = recs[1].design_id = 4;
  recs[0].est_err = 1.0;
  recs[1].est_err = 3.0;
  recs[0].pred_err = 2.0;
  recs[1].pred_err = 2.0;
  const AggregateRow row = aggregate(cfg, 4, 0.2, recs);
  EXPECT_EQ(row[Estimator::kCL].count, 2);
  EXPECT_DOUBLE_EQ(row[Estimator::kCL].est_mean, 2.0);
  EXPECT_DOUBLE_EQ(row[Estimator::kCL].est_sd, std::sqrt(2.0));
  EXPECT_DOUBLE_EQ(row[Estimator::kCL].pred_sd, 0.0);
  EXPECT_EQ(row[Estimator::kNL].count, 0);
  EXPECT_EQ(row.lambda, 0.2);
}

TEST(RunStudy, IndependentOfThreadCount) {
  ExperimentOptions one, three;
  one.threads = 1;
  three.threads = 3;
  const StudyResult a = run_study(small_designs(), 3, 7, one);
  const StudyResult b = run_study(small_designs(), 3, 7, three);
  ASSERT_EQ(a.records.size(), 2U * 3U * 3U);
  ASSERT_EQ(a.records.size(), b.records.size());
  for (std::size_t k = 0; k < a.records.size(); ++k) {
    EXPECT_EQ(a.records[k].design_id, b.records[k].design_id);
    EXPECT_EQ(a.records[k].replicate, b.records[k].replicate);
    EXPECT_EQ(a.records[k].est_err, b.records[k].est_err);
    EXPECT_EQ(a.records[k].pred_err, b.records[k].pred_err);
  }
  ASSERT_EQ(a.rows.size(), 2U);
  EXPECT_EQ(a.rows[1].design_id, 2);
  EXPECT_EQ(a.rows[0].lambda, simulation_lambda(30, 10));
}

TEST(RunStudy, ExplicitLambdaIsUsed) {
  ExperimentOptions opts;
  opts.lambda = 0.05;
  const StudyResult r = run_study({small_designs()[0]}, 2, 1, opts);
  EXPECT_EQ(r.rows[0].lambda, 0.05);
  EXPECT_THROW(run_study(small_designs(), 0, 1, opts), Error);
}

TEST(RunDesign, RequiresTwoReplicates) {
  EXPECT_THROW(run_design(small_designs()[0], 1, 1, 1, ExperimentOptions{}), Error);
  const AggregateRow row = run_design(small_designs()[0], 1, 2, 1, ExperimentOptions{});
  EXPECT_EQ(row[Estimator::kCL].count, 2);
}

class EmitReportTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = std::filesystem::temp_directory_path() /
           ("cenlad_report_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    std::filesystem::remove_all(dir_);
  }
  void TearDown() override { std::filesystem::remove_all(dir_); }
  std::filesystem::path dir_;
};

TEST_F(EmitReportTest, FilesAndContents) {
  ReportMeta meta;
  meta.base_seed = 3;
  meta.n_reps = 2;
  const StudyResult result = run_study(small_designs(), 2, 3, ExperimentOptions{});
  const auto written = emit_report(result, meta, dir_ / "a");
  EXPECT_EQ(written.size(), 5U);
  for (const char* name : {"table1.md", "aggregates.csv", "records.csv", "timings.csv", "meta.json"}) {
    const auto path = dir_ / "a" / name;
    ASSERT_TRUE(std::filesystem::exists(path)) << name;
    EXPECT_EQ(slurp(path).find('\r'), std::string::npos) << name;
  }

  const auto records = csv_rows(slurp(dir_ / "a" / "records.csv"));
  ASSERT_EQ(records.size(), 1U + 2U * 2U * 3U);
  EXPECT_EQ(records[0][0], "design_id");
  // Recomputing each design's CL mean from records.csv reproduces the aggregate.
  for (const auto& row : result.rows) {
    double total = 0.0;
    int count = 0;
    for (std::size_t k = 1; k < records.size(); ++k) {
      if (std::stoi(records[k][0]) == row.design_id && records[k][2] == "CL") {
        total += std::stod(records[k][5]);
        ++count;
      }
    }
    ASSERT_EQ(count, 2);
    EXPECT_NEAR(total / count, row[Estimator::kCL].est_mean, 1e-12);
  }
  EXPECT_EQ(csv_rows(slurp(dir_ / "a" / "aggregates.csv")).size(), 1U + 2U);
  EXPECT_NE(slurp(dir_ / "a" / "meta.json").find("\"base_seed\": 3"), std::string::npos);
}

TEST_F(EmitReportTest, RerunIsByteIdentical) {
  ReportMeta meta;
  meta.base_seed = 9;
  meta.n_reps = 2;
  emit_report(run_study(small_designs(), 2, 9, ExperimentOptions{}), meta, dir_ / "a");
  emit_report(run_study(small_designs(), 2, 9, ExperimentOptions{}), meta, dir_ / "b");
  for (const char* name : {"table1.md", "aggregates.csv", "records.csv", "meta.json"}) {
    EXPECT_EQ(slurp(dir_ / "a" / name), slurp(dir_ / "b" / name)) << name;
  }
  EXPECT_THROW(emit_report(StudyResult{}, meta, dir_ / "c"), Error);
}

}  // namespace
}  // namespace cenlad
