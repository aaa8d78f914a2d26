#pragma once

#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace portdecomp {

/// Absolute slack a constraint may exceed zero by and still count as met.
inline constexpr double kFeasibilityTolerance = 1e-9;

/// xᵀAx + 2bᵀx + κ. A is kept symmetric.
struct QuadraticForm {
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  double kappa = 0.0;

  double Evaluate(const Eigen::VectorXd& x) const;
  bool IsLinear() const;
};

enum class VarKind { kBinary, kBoundedInteger };

/// Minimize objective(x) subject to constraint_i(x) ≤ 0 over integer x with
/// 0 ≤ x_j ≤ upper_bounds(j). Binary problems have every bound equal to 1.
///
/// Matrices are symmetrized on construction, so callers may pass any square
/// matrix whose symmetric part is the intended quadratic form.
class Miqcqp {
 public:
  Miqcqp(QuadraticForm objective, std::vector<QuadraticForm> constraints,
         VarKind kind, Eigen::VectorXi upper_bounds);

  static Miqcqp Binary(QuadraticForm objective,
                       std::vector<QuadraticForm> constraints);

  int num_vars() const { return static_cast<int>(objective_.b.size()); }
  const QuadraticForm& objective() const { return objective_; }
  const std::vector<QuadraticForm>& constraints() const { return constraints_; }
  VarKind kind() const { return kind_; }
  const Eigen::VectorXi& upper_bounds() const { return upper_bounds_; }

 private:
  QuadraticForm objective_;
  std::vector<QuadraticForm> constraints_;
  VarKind kind_;
  Eigen::VectorXi upper_bounds_;
};

struct Violation {
  int constraint = 0;
  double slack = 0.0;  // constraint value, > kFeasibilityTolerance
};

struct Evaluation {
  double objective = 0.0;
  std::vector<Violation> violations;

  bool feasible() const { return violations.empty(); }
};

/// Throws std::invalid_argument on a dimension mismatch or when x leaves the
/// variable bounds.
Evaluation Evaluate(const Miqcqp& problem, const Eigen::VectorXi& x);

/// Mean-variance selection with a fixed number of holdings:
///   min q·xᵀΣx − μᵀx  s.t. 1ᵀx = round(d·n), x ∈ {0,1}ⁿ.
struct CardinalityProblem {
  Eigen::MatrixXd sigma;
  Eigen::VectorXd mu;  // raw daily mean returns
  double q = 1.0;
  double d = 0.5;

  int num_assets() const { return static_cast<int>(mu.size()); }
  int Target() const;
  void Validate() const;
};

/// Risk reduction around an integer baseline portfolio:
///   min (x−x_b)ᵀΣ(x−x_b)  s.t. xᵀΣx ≤ a, x ∈ {0..m}ⁿ.
struct QuadraticProblem {
  Eigen::MatrixXd sigma;
  Eigen::VectorXi baseline;
  double budget = 0.0;  // a
  int upper = 1;        // m

  int num_assets() const { return static_cast<int>(baseline.size()); }
  double BaselineRisk() const;
  void Validate() const;
};

using Problem = std::variant<CardinalityProblem, QuadraticProblem>;

/// round(d·n) with ties rounded up.
int CardinalityTarget(double d, int n);

/// Binary problem min q·xᵀΣx − μᵀx with 1ᵀx = target stored as the pair
/// 1ᵀx − target ≤ 0 and −1ᵀx + target ≤ 0.
Miqcqp CardinalityMiqcqp(const Eigen::MatrixXd& sigma, const Eigen::VectorXd& mu,
                         double q, int target);

Miqcqp CardinalityToMiqcqp(const CardinalityProblem& problem);

/// Bounded-integer problem with objective (x−x_b)ᵀΣ(x−x_b) expanded as
/// A0 = Σ, b0 = −Σx_b, κ0 = x_bᵀΣx_b and one constraint xᵀΣx − a ≤ 0.
/// Throws std::invalid_argument("trivial baseline feasible") when
/// a ≥ x_bᵀΣx_b.
Miqcqp QuadraticToMiqcqp(const QuadraticProblem& problem);

/// Same construction for an explicit budget (used for subproblems).
Miqcqp QuadraticMiqcqp(const Eigen::MatrixXd& sigma,
                       const Eigen::VectorXi& baseline, double budget,
                       int upper);

}  // namespace portdecomp
