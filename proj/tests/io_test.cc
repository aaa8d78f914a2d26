#include "portdecomp/io.h"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <random>
#include <string>

#include <gtest/gtest.h>

#include "oracles.h"

namespace portdecomp {
namespace {

std::string TempPath(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("portdecomp_io_" + name)).string();
}

TEST(ProblemJsonTest, CardinalityRoundTrip) {
  std::mt19937_64 rng(1);
  const CardinalityProblem p{testing::RandomPd(5, rng), testing::RandomVector(5, rng), 2.0, 0.4};
  const Json doc = ProblemToJson(p, 250);
  EXPECT_EQ(doc.at("kind"), "cardinality");
  EXPECT_EQ(doc.at("sigma").size(), 25u);
  const PipelineInput back = ProblemFromJson(Json::parse(doc.dump()));
  EXPECT_EQ(back.observations, 250);
  const auto& q = std::get<CardinalityProblem>(back.problem);
  EXPECT_EQ(q.sigma, p.sigma);
  EXPECT_EQ(q.mu, p.mu);
  EXPECT_EQ(q.q, 2.0);
  EXPECT_EQ(q.d, 0.4);
}

TEST(ProblemJsonTest, QuadraticRoundTrip) {
  std::mt19937_64 rng(2);
  const QuadraticProblem p{testing::RandomPd(4, rng), Eigen::Vector4i(1, 0, 2, 3), 0.5, 3};
  const PipelineInput back = ProblemFromJson(ProblemToJson(p));
  EXPECT_EQ(back.observations, 0);
  const auto& q = std::get<QuadraticProblem>(back.problem);
  EXPECT_EQ(q.baseline, p.baseline);
  EXPECT_EQ(q.budget, 0.5);
  EXPECT_EQ(q.upper, 3);
}

TEST(ProblemJsonTest, RejectsMalformedDocuments) {
  Json doc = ProblemToJson(CardinalityProblem{Eigen::MatrixXd::Identity(2, 2),
                                              Eigen::Vector2d(1, 2), 1.0, 0.5});
  Json bad_kind = doc;
  bad_kind["kind"] = "portfolio";
  EXPECT_THROW(ProblemFromJson(bad_kind), std::invalid_argument);
  Json short_mu = doc;
  short_mu["mu"] = Json::array({1.0});
  EXPECT_THROW(ProblemFromJson(short_mu), std::invalid_argument);
  Json short_sigma = doc;
  short_sigma["sigma"] = Json::array({1.0, 0.0, 0.0});
  EXPECT_THROW(ProblemFromJson(short_sigma), std::invalid_argument);
  Json missing = doc;
  missing.erase("q");
  EXPECT_THROW(ProblemFromJson(missing), Json::exception);
}

TEST(CovarianceJsonTest, RoundTripKeepsObservations) {
  std::mt19937_64 rng(3);
  const Eigen::MatrixXd s = testing::RandomPd(6, rng);
  const CovarianceModel c = CovarianceFromJson(CovarianceToJson(s, 300));
  EXPECT_TRUE(c.sigma.isApprox(s, 1e-15));
  EXPECT_EQ(c.observations, 300);
}

TEST(NumberOrNullTest, NonFiniteBecomesNull) {
  EXPECT_TRUE(NumberOrNull(std::numeric_limits<double>::infinity()).is_null());
  EXPECT_TRUE(NumberOrNull(std::nan("")).is_null());
  EXPECT_EQ(NumberOrNull(1.5), 1.5);
}

TEST(SolveReportJsonTest, TimingsAreOptional) {
  SolveReport r;
  r.x = Eigen::Vector2i(1, 0);
  r.objective = -1.0;
  r.best_bound = -1.0;
  r.mip_gap = 0.0;
  r.status = SolveStatus::kOptimal;
  r.wall_time_s = 0.25;
  EXPECT_TRUE(SolveReportToJson(r).contains("wall_time_s"));
  const Json j = SolveReportToJson(r, false);
  EXPECT_FALSE(j.contains("wall_time_s"));
  EXPECT_EQ(j.at("status"), "optimal");
  EXPECT_EQ(j.at("x"), Json::array({1, 0}));
}

TEST(SolveReportJsonTest, InfeasibleReportSerializesNulls) {
  const Json j = SolveReportToJson(SolveReport{});
  EXPECT_TRUE(j.at("objective").is_null());
  EXPECT_EQ(j.at("x"), Json::array());
}

TEST(FileTest, WriteThenRead) {
  const std::string path = TempPath("roundtrip.json");
  WriteTextFile(path, "{\"a\": [1, 2]}");
  EXPECT_EQ(ReadJsonFile(path).at("a"), Json::array({1, 2}));
  std::remove(path.c_str());
}

TEST(FileTest, MissingAndMalformedFilesRaiseIoError) {
  EXPECT_THROW(ReadJsonFile(TempPath("does_not_exist.json")), IoError);
  const std::string path = TempPath("malformed.json");
  WriteTextFile(path, "{not json");
  EXPECT_THROW(ReadJsonFile(path), IoError);
  std::remove(path.c_str());
  EXPECT_THROW(WriteTextFile("/nonexistent_dir/x/y.json", "{}"), IoError);
}

}  // namespace
}  // namespace portdecomp
