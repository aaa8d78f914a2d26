#include "portdecomp/problem.h"

#include <random>
#include <stdexcept>

#include <gtest/gtest.h>

#include "oracles.h"
#include "portdecomp/solver.h"

namespace portdecomp {
namespace {

using testing::NaiveQuadratic;
using testing::RandomPd;
using testing::RandomVector;

TEST(CardinalityMiqcqpTest, TwoAssetIdentityMatchesHandExpansion) {
  const CardinalityProblem p{Eigen::MatrixXd::Identity(2, 2), Eigen::Vector2d(1, 1), 1.0, 0.5};
  const Miqcqp m = CardinalityToMiqcqp(p);
  EXPECT_TRUE(m.objective().A.isApprox(Eigen::MatrixXd::Identity(2, 2)));
  EXPECT_TRUE(m.objective().b.isApprox(Eigen::Vector2d(-0.5, -0.5)));
  ASSERT_EQ(m.constraints().size(), 2u);
  // 1ᵀx − 1 ≤ 0 and −1ᵀx + 1 ≤ 0.
  EXPECT_DOUBLE_EQ(m.constraints()[0].Evaluate(Eigen::Vector2d(1, 0)), 0.0);
  EXPECT_DOUBLE_EQ(m.constraints()[0].Evaluate(Eigen::Vector2d(1, 1)), 1.0);
  EXPECT_DOUBLE_EQ(m.constraints()[1].Evaluate(Eigen::Vector2d(0, 0)), 1.0);
  EXPECT_DOUBLE_EQ(m.objective().Evaluate(Eigen::Vector2d(1, 0)), 0.0);
  EXPECT_TRUE(m.constraints()[0].IsLinear());
}

TEST(CardinalityMiqcqpTest, FullCardinalityForcesAllOnes) {
  std::mt19937_64 rng(1);
  const CardinalityProblem p{RandomPd(4, rng), RandomVector(4, rng), 1.0, 1.0};
  const Miqcqp m = CardinalityToMiqcqp(p);
  int feasible = 0;
  testing::EnumerateIntegers({1, 1, 1, 1}, [&](const Eigen::VectorXi& x) {
    if (Evaluate(m, x).feasible()) {
      ++feasible;
      EXPECT_EQ(x.sum(), 4);
    }
  });
  EXPECT_EQ(feasible, 1);
}

TEST(CardinalityMiqcqpTest, TargetRoundsHalfUp) {
  EXPECT_EQ(CardinalityTarget(0.5, 5), 3);
  EXPECT_EQ(CardinalityTarget(0.5, 4), 2);
  EXPECT_EQ(CardinalityTarget(0.3, 10), 3);
  EXPECT_EQ(CardinalityTarget(0.25, 10), 3);
}

TEST(CardinalityMiqcqpTest, ValidateRejectsBadParameters) {
  CardinalityProblem p{Eigen::MatrixXd::Identity(2, 2), Eigen::Vector2d(1, 1), 1.0, 1.5};
  EXPECT_THROW(p.Validate(), std::invalid_argument);
  p.d = 0.5;
  p.q = 0.0;
  EXPECT_THROW(p.Validate(), std::invalid_argument);
  p.q = 1.0;
  p.sigma(0, 0) = -1.0;
  EXPECT_THROW(p.Validate(), std::invalid_argument);
}

TEST(CardinalityMiqcqpTest, BruteForceMatchesSupportEnumeration) {
  std::mt19937_64 rng(2);
  const int n = 10;
  const CardinalityProblem p{RandomPd(n, rng), RandomVector(n, rng), 1.0, 0.5};
  const SolveReport r = BruteForce(CardinalityToMiqcqp(p), SolverConfig{});
  EXPECT_NEAR(r.objective, testing::CardinalityOptimum(p.sigma, p.mu, 1.0, 5), 1e-10);
  EXPECT_EQ(r.x.sum(), 5);
}

TEST(QuadraticMiqcqpTest, IdentityExampleExpandsTheSquare) {
  const QuadraticProblem p{Eigen::MatrixXd::Identity(2, 2), Eigen::Vector2i(2, 0), 1.0, 2};
  const Miqcqp m = QuadraticToMiqcqp(p);
  for (int a = 0; a <= 2; ++a) {
    for (int b = 0; b <= 2; ++b) {
      const Eigen::Vector2d x(a, b);
      EXPECT_DOUBLE_EQ(m.objective().Evaluate(x), (x - Eigen::Vector2d(2, 0)).squaredNorm());
      EXPECT_DOUBLE_EQ(m.constraints()[0].Evaluate(x), x.squaredNorm() - 1.0);
    }
  }
  EXPECT_EQ(m.kind(), VarKind::kBoundedInteger);
  EXPECT_EQ(m.upper_bounds(), Eigen::Vector2i(2, 2));
}

TEST(QuadraticMiqcqpTest, RejectsBudgetAtOrAboveBaselineRisk) {
  const QuadraticProblem p{Eigen::MatrixXd::Identity(2, 2), Eigen::Vector2i(2, 0), 4.0, 2};
  EXPECT_THROW(QuadraticToMiqcqp(p), std::invalid_argument);
  try {
    QuadraticToMiqcqp(p);
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("trivial baseline feasible"), std::string::npos);
  }
}

TEST(QuadraticMiqcqpTest, BaselineOutsideBoundsRejected) {
  const QuadraticProblem p{Eigen::MatrixXd::Identity(2, 2), Eigen::Vector2i(3, 0), 1.0, 2};
  EXPECT_THROW(p.Validate(), std::invalid_argument);
}

TEST(EvaluateTest, ZeroProblemHasZeroObjective) {
  const int n = 3;
  const Miqcqp m = Miqcqp::Binary({Eigen::MatrixXd::Zero(n, n), Eigen::VectorXd::Zero(n), 0.0}, {});
  const Evaluation e = Evaluate(m, Eigen::Vector3i(1, 0, 1));
  EXPECT_EQ(e.objective, 0.0);
  EXPECT_TRUE(e.feasible());
}

TEST(EvaluateTest, WrongCardinalityViolatesExactlyOneSide) {
  std::mt19937_64 rng(3);
  const CardinalityProblem p{RandomPd(4, rng), RandomVector(4, rng), 1.0, 0.5};
  const Miqcqp m = CardinalityToMiqcqp(p);
  const Evaluation over = Evaluate(m, Eigen::Vector4i(1, 1, 1, 0));
  ASSERT_EQ(over.violations.size(), 1u);
  EXPECT_EQ(over.violations[0].constraint, 0);
  EXPECT_DOUBLE_EQ(over.violations[0].slack, 1.0);
  const Evaluation under = Evaluate(m, Eigen::Vector4i(1, 0, 0, 0));
  ASSERT_EQ(under.violations.size(), 1u);
  EXPECT_EQ(under.violations[0].constraint, 1);
}

TEST(EvaluateTest, MatchesNaiveLoopOnRandomInstances) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + trial % 7;
    const Eigen::MatrixXd a = testing::RandomSymmetric(n, rng);
    const Eigen::VectorXd b = RandomVector(n, rng);
    const double kappa = RandomVector(1, rng)(0);
    const Eigen::MatrixXd c = testing::RandomSymmetric(n, rng);
    const Miqcqp m(QuadraticForm{a, b, kappa}, {QuadraticForm{c, b, -1.0}},
                   VarKind::kBoundedInteger, Eigen::VectorXi::Constant(n, 3));
    std::uniform_int_distribution<int> digit(0, 3);
    Eigen::VectorXi x(n);
    for (int i = 0; i < n; ++i) x(i) = digit(rng);
    const Evaluation e = Evaluate(m, x);
    EXPECT_NEAR(e.objective, NaiveQuadratic(a, b, kappa, x), 1e-10 * (1 + std::abs(e.objective)));
    const double g = NaiveQuadratic(c, b, -1.0, x);
    EXPECT_EQ(e.feasible(), g <= kFeasibilityTolerance);
  }
}

TEST(EvaluateTest, RejectsOutOfBoundsAndWrongSize) {
  const Miqcqp m = Miqcqp::Binary({Eigen::MatrixXd::Zero(2, 2), Eigen::VectorXd::Zero(2), 0.0}, {});
  EXPECT_THROW(Evaluate(m, Eigen::Vector2i(2, 0)), std::invalid_argument);
  EXPECT_THROW(Evaluate(m, Eigen::Vector3i(0, 0, 0)), std::invalid_argument);
}

TEST(MiqcqpTest, SymmetrizesInputMatrices) {
  Eigen::MatrixXd a(2, 2);
  a << 1, 2, 0, 1;
  const Miqcqp m = Miqcqp::Binary({a, Eigen::VectorXd::Zero(2), 0.0}, {});
  EXPECT_DOUBLE_EQ(m.objective().A(0, 1), 1.0);
  EXPECT_DOUBLE_EQ(m.objective().A(1, 0), 1.0);
}

TEST(MiqcqpTest, RejectsMismatchedDimensions) {
  EXPECT_THROW(Miqcqp::Binary({Eigen::MatrixXd::Zero(2, 2), Eigen::VectorXd::Zero(3), 0.0}, {}),
               std::invalid_argument);
  EXPECT_THROW(Miqcqp({Eigen::MatrixXd::Zero(2, 2), Eigen::VectorXd::Zero(2), 0.0}, {},
                      VarKind::kBoundedInteger, Eigen::VectorXi::Constant(2, -1)),
               std::invalid_argument);
}

}  // namespace
}  // namespace portdecomp
