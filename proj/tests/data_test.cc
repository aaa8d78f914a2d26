#include "portdecomp/data.h"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <stdexcept>
#include <string>

#include <gtest/gtest.h>

#include "oracles.h"
#include "portdecomp/linalg.h"

namespace portdecomp {
namespace {

class TempFile {
 public:
  explicit TempFile(const std::string& name)
      : path_((std::filesystem::temp_directory_path() /
               ("portdecomp_" + std::to_string(::getpid()) + "_" + name))
                  .string()) {}
  ~TempFile() { std::remove(path_.c_str()); }
  const std::string& path() const { return path_; }
  void Write(const std::string& text) const { std::ofstream(path_) << text; }

 private:
  std::string path_;
};

TEST(LoadReturnsCsvTest, ZeroFileGivesZeroMatrix) {
  TempFile f("zeros.csv");
  f.Write("date,A,B,C\nd1,0,0,0\nd2,0,0,0\nd3,0,0,0\nd4,0,0,0\nd5,0,0,0\n");
  const LoadedReturns r = LoadReturnsCsv(f.path());
  EXPECT_EQ(r.returns.num_assets(), 3);
  EXPECT_EQ(r.returns.num_days(), 5);
  EXPECT_TRUE(r.returns.values.isZero());
  EXPECT_TRUE(r.dropped.empty());
}

TEST(LoadReturnsCsvTest, AssetWithMissingCellIsDropped) {
  TempFile f("missing.csv");
  f.Write("date,A,B,C\nd1,0.1,0.2,0.3\nd2,0.1,,0.3\nd3,0.4,0.5,0.6\n");
  const LoadedReturns r = LoadReturnsCsv(f.path());
  EXPECT_EQ(r.returns.num_assets(), 2);
  EXPECT_EQ(r.returns.tickers, (std::vector<std::string>{"A", "C"}));
  EXPECT_EQ(r.dropped, (std::vector<std::string>{"B"}));
  EXPECT_DOUBLE_EQ(r.returns.values(1, 2), 0.6);
}

TEST(LoadReturnsCsvTest, RaggedAndNonNumericRowsRejected) {
  TempFile ragged("ragged.csv");
  ragged.Write("date,A,B\nd1,0.1,0.2\nd2,0.1\nd3,0.1,0.2\n");
  EXPECT_THROW(LoadReturnsCsv(ragged.path()), std::runtime_error);
  TempFile text("text.csv");
  text.Write("date,A,B\nd1,0.1,abc\nd2,0.1,0.2\n");
  EXPECT_THROW(LoadReturnsCsv(text.path()), std::runtime_error);
}

TEST(WriteReturnsCsvTest, RoundTripIsIdentity) {
  const ReturnsMatrix original = GenerateReturns(Eigen::MatrixXd::Identity(4, 4), 30, 9);
  TempFile f("roundtrip.csv");
  WriteReturnsCsv(f.path(), original);
  const LoadedReturns loaded = LoadReturnsCsv(f.path());
  EXPECT_EQ(loaded.returns.values, original.values);
  EXPECT_EQ(loaded.returns.num_assets(), 4);
}

TEST(SampleCovarianceTest, ConstantAssetIsRejected) {
  ReturnsMatrix r;
  r.values = Eigen::MatrixXd::Random(3, 20);
  r.values.row(1).setConstant(0.01);
  r.tickers = {"A", "B", "C"};
  try {
    SampleCovariance(r);
    FAIL() << "expected an exception";
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("B"), std::string::npos);
  }
}

TEST(SampleCovarianceTest, PerfectlyCorrelatedRowsHaveUnitCorrelation) {
  ReturnsMatrix r;
  r.values = Eigen::MatrixXd::Random(2, 50);
  r.values.row(1) = 3.0 * r.values.row(0).array() + 0.2;
  const CovarianceModel c = SampleCovariance(r);
  EXPECT_NEAR(c.corr(0, 1), 1.0, 1e-12);
}

TEST(SampleCovarianceTest, MatchesTwoPassOracle) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> normal;
  ReturnsMatrix r;
  r.values.resize(5, 200);
  for (int i = 0; i < 5; ++i) {
    for (int t = 0; t < 200; ++t) r.values(i, t) = 0.01 * normal(rng) + 0.002 * i;
  }
  const CovarianceModel c = SampleCovariance(r);
  EXPECT_LT((c.sigma - testing::TwoPassCovariance(r.values)).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_EQ(c.observations, 200);
  for (int i = 0; i < 5; ++i) EXPECT_NEAR(c.corr(i, i), 1.0, 1e-14);
}

TEST(SampleCovarianceTest, NoDemeanUsesRawSecondMoment) {
  ReturnsMatrix r;
  r.values = Eigen::MatrixXd::Random(3, 40).array() + 1.0;
  const CovarianceModel c = SampleCovariance(r, false);
  EXPECT_TRUE(c.sigma.isApprox(r.values * r.values.transpose() / 40.0, 1e-12));
}

TEST(GenerateWishartTest, ApproachesIdentityForLongSamples) {
  const CovarianceModel c = GenerateWishart(2, 100000, 1);
  EXPECT_LT((c.sigma - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff(), 0.02);
}

TEST(GenerateWishartTest, SameSeedSameMatrix) {
  EXPECT_EQ(GenerateWishart(10, 40, 3).sigma, GenerateWishart(10, 40, 3).sigma);
  EXPECT_NE(GenerateWishart(10, 40, 3).sigma, GenerateWishart(10, 40, 4).sigma);
}

TEST(GenerateWishartTest, CorrelationSpectrumWithinNoiseEdges) {
  const CovarianceModel c = GenerateWishart(200, 800, 2);
  const SymmetricEigen e = SymEig(c.corr);
  EXPECT_LT(e.values(0), 2.25 + 0.15);
  EXPECT_GT(e.values(199), 0.25 - 0.15);
}

TEST(BlockModelTest, ZeroCorrelationGivesIdentity) {
  EXPECT_EQ(BlockCorrelation(12, 3, 0.0, 0.0), Eigen::MatrixXd::Identity(12, 12));
}

TEST(BlockModelTest, LabelsAreContiguousBlocks) {
  EXPECT_EQ(BlockLabels(7, 3), (std::vector<int>{0, 0, 1, 1, 2, 2, 2}));
}

TEST(BlockModelTest, PopulationEigenvaluesMatchClosedForm) {
  const int n = 60;
  const int k = 3;
  const double rin = 0.6;
  const double rout = 0.1;
  const int s = n / k;
  const SymmetricEigen e = SymEig(BlockCorrelation(n, k, rin, rout));
  // All-ones direction, block contrasts, and within-block contrasts.
  const double top = 1 + (s - 1) * rin + (n - s) * rout;
  const double contrast = 1 + (s - 1) * rin - s * rout;
  const double within = 1 - rin;
  EXPECT_NEAR(e.values(0), top, 1e-10);
  for (int i = 1; i < k; ++i) EXPECT_NEAR(e.values(i), contrast, 1e-10);
  for (int i = k; i < n; ++i) EXPECT_NEAR(e.values(i), within, 1e-10);
}

TEST(BlockModelTest, NonPsdPopulationRejected) {
  EXPECT_THROW(GenerateBlockModel(20, 2, 0.1, 0.9, 100, 1), std::invalid_argument);
}

TEST(BlockModelTest, SampleIsDeterministicAndLabelled) {
  const BlockModel a = GenerateBlockModel(30, 3, 0.6, 0.0, 1500, 8);
  const BlockModel b = GenerateBlockModel(30, 3, 0.6, 0.0, 1500, 8);
  EXPECT_EQ(a.covariance.sigma, b.covariance.sigma);
  EXPECT_EQ(a.planted_labels, BlockLabels(30, 3));
  EXPECT_EQ(a.covariance.observations, 1500);
}

TEST(GenerateReturnsTest, ZeroCovarianceGivesZeroReturns) {
  EXPECT_TRUE(GenerateReturns(Eigen::MatrixXd::Zero(3, 3), 10, 1).values.isZero());
}

TEST(GenerateReturnsTest, IdentitySampleCovarianceConverges) {
  const ReturnsMatrix r = GenerateReturns(Eigen::MatrixXd::Identity(3, 3), 100000, 4);
  const CovarianceModel c = SampleCovariance(r);
  EXPECT_LT((c.sigma - Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff(), 0.02);
}

TEST(GenerateReturnsTest, SingularPsdAccepted) {
  const Eigen::MatrixXd sigma = Eigen::MatrixXd::Ones(3, 3);
  const ReturnsMatrix r = GenerateReturns(sigma, 100, 2);
  EXPECT_NEAR((r.values.row(0) - r.values.row(1)).cwiseAbs().maxCoeff(), 0.0, 1e-10);
}

TEST(GenerateExpectedReturnsTest, BoundedDeterministicAndScaled) {
  const Eigen::VectorXd mu = GenerateExpectedReturns(50, 3, 0.2);
  EXPECT_GE(mu.minCoeff(), 0.0);
  EXPECT_LE(mu.maxCoeff(), 0.2);
  EXPECT_EQ(mu, GenerateExpectedReturns(50, 3, 0.2));
  EXPECT_TRUE(GenerateExpectedReturns(5, 3, 0.0).isZero());
}

TEST(CovarianceFromSigmaTest, CorrelationHasUnitDiagonal) {
  std::mt19937_64 rng(6);
  const Eigen::MatrixXd sigma = testing::RandomPd(6, rng);
  const CovarianceModel c = CovarianceFromSigma(sigma, 50);
  for (int i = 0; i < 6; ++i) {
    EXPECT_NEAR(c.corr(i, i), 1.0, 1e-14);
    for (int j = 0; j < 6; ++j) {
      EXPECT_NEAR(c.corr(i, j), sigma(i, j) / std::sqrt(sigma(i, i) * sigma(j, j)), 1e-14);
    }
  }
}

}  // namespace
}  // namespace portdecomp
