#include "portdecomp/problem.h"

#include <cmath>
#include <stdexcept>
#include <string>

#include "portdecomp/linalg.h"

namespace portdecomp {
namespace {

void CheckForm(const QuadraticForm& form, Eigen::Index n, const char* what) {
  if (form.A.rows() != n || form.A.cols() != n || form.b.size() != n) {
    throw std::invalid_argument(std::string("dimension mismatch in ") + what);
  }
}

QuadraticForm SymmetrizedForm(QuadraticForm form) {
  form.A = Symmetrize(form.A);
  return form;
}

void CheckSquare(const Eigen::MatrixXd& sigma, Eigen::Index n) {
  if (sigma.rows() != n || sigma.cols() != n) {
    throw std::invalid_argument("covariance dimension mismatch");
  }
}

void CheckPsd(const Eigen::MatrixXd& sigma) {
  if ((sigma - sigma.transpose()).cwiseAbs().maxCoeff() >
      1e-10 * std::max(1.0, sigma.cwiseAbs().maxCoeff())) {
    throw std::invalid_argument("covariance is not symmetric");
  }
  if (MinEigenvalue(Symmetrize(sigma)) < -1e-10) {
    throw std::invalid_argument("covariance is not positive semidefinite");
  }
}

}  // namespace

double QuadraticForm::Evaluate(const Eigen::VectorXd& x) const {
  return x.dot(A * x) + 2.0 * b.dot(x) + kappa;
}

bool QuadraticForm::IsLinear() const {
  return A.size() == 0 || A.cwiseAbs().maxCoeff() == 0.0;
}

Miqcqp::Miqcqp(QuadraticForm objective, std::vector<QuadraticForm> constraints,
               VarKind kind, Eigen::VectorXi upper_bounds)
    : objective_(SymmetrizedForm(std::move(objective))), kind_(kind),
      upper_bounds_(std::move(upper_bounds)) {
  const Eigen::Index n = objective_.b.size();
  CheckForm(objective_, n, "objective");
  constraints_.reserve(constraints.size());
  for (auto& c : constraints) {
    CheckForm(c, n, "constraint");
    constraints_.push_back(SymmetrizedForm(std::move(c)));
  }
  if (upper_bounds_.size() != n) {
    throw std::invalid_argument("dimension mismatch in variable bounds");
  }
  for (Eigen::Index j = 0; j < n; ++j) {
    if (upper_bounds_(j) < 1) {
      throw std::invalid_argument("variable upper bound must be at least 1");
    }
    if (kind_ == VarKind::kBinary && upper_bounds_(j) != 1) {
      throw std::invalid_argument("binary variables must have upper bound 1");
    }
  }
}

Miqcqp Miqcqp::Binary(QuadraticForm objective,
                      std::vector<QuadraticForm> constraints) {
  const Eigen::Index n = objective.b.size();
  return Miqcqp(std::move(objective), std::move(constraints), VarKind::kBinary,
                Eigen::VectorXi::Ones(n));
}

Evaluation Evaluate(const Miqcqp& problem, const Eigen::VectorXi& x) {
  if (x.size() != problem.num_vars()) {
    throw std::invalid_argument("dimension mismatch: x has " +
                                std::to_string(x.size()) + " entries, expected " +
                                std::to_string(problem.num_vars()));
  }
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    if (x(j) < 0 || x(j) > problem.upper_bounds()(j)) {
      throw std::invalid_argument("x leaves the variable bounds at index " +
                                  std::to_string(j));
    }
  }
  const Eigen::VectorXd xd = x.cast<double>();
  Evaluation out;
  out.objective = problem.objective().Evaluate(xd);
  for (size_t i = 0; i < problem.constraints().size(); ++i) {
    const double value = problem.constraints()[i].Evaluate(xd);
    if (value > kFeasibilityTolerance) {
      out.violations.push_back({static_cast<int>(i), value});
    }
  }
  return out;
}

int CardinalityTarget(double d, int n) {
  return static_cast<int>(std::floor(d * n + 0.5 + 1e-9));
}

int CardinalityProblem::Target() const { return CardinalityTarget(d, num_assets()); }

void CardinalityProblem::Validate() const {
  CheckSquare(sigma, mu.size());
  CheckPsd(sigma);
  if (!(q > 0)) throw std::invalid_argument("risk aversion q must be positive");
  if (!(d >= 0 && d <= 1)) throw std::invalid_argument("d must lie in [0, 1]");
}

double QuadraticProblem::BaselineRisk() const {
  const Eigen::VectorXd xb = baseline.cast<double>();
  return xb.dot(sigma * xb);
}

void QuadraticProblem::Validate() const {
  CheckSquare(sigma, baseline.size());
  CheckPsd(sigma);
  if (upper < 1) throw std::invalid_argument("upper bound m must be at least 1");
  for (Eigen::Index i = 0; i < baseline.size(); ++i) {
    if (baseline(i) < 0 || baseline(i) > upper) {
      throw std::invalid_argument("baseline holding outside [0, m] at index " +
                                  std::to_string(i));
    }
  }
  if (!(budget > 0)) throw std::invalid_argument("risk budget a must be positive");
  if (budget >= BaselineRisk()) {
    throw std::invalid_argument("trivial baseline feasible");
  }
}

Miqcqp CardinalityMiqcqp(const Eigen::MatrixXd& sigma, const Eigen::VectorXd& mu,
                         double q, int target) {
  const Eigen::Index n = mu.size();
  CheckSquare(sigma, n);
  QuadraticForm objective{q * sigma, -0.5 * mu, 0.0};
  const Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(n, n);
  const Eigen::VectorXd half = Eigen::VectorXd::Constant(n, 0.5);
  std::vector<QuadraticForm> constraints{
      {zero, half, -static_cast<double>(target)},
      {zero, -half, static_cast<double>(target)}};
  return Miqcqp::Binary(std::move(objective), std::move(constraints));
}

Miqcqp CardinalityToMiqcqp(const CardinalityProblem& problem) {
  problem.Validate();
  return CardinalityMiqcqp(problem.sigma, problem.mu, problem.q, problem.Target());
}

Miqcqp QuadraticMiqcqp(const Eigen::MatrixXd& sigma,
                       const Eigen::VectorXi& baseline, double budget,
                       int upper) {
  const Eigen::Index n = baseline.size();
  CheckSquare(sigma, n);
  const Eigen::VectorXd xb = baseline.cast<double>();
  const Eigen::VectorXd sxb = sigma * xb;
  QuadraticForm objective{sigma, -sxb, xb.dot(sxb)};
  std::vector<QuadraticForm> constraints{
      {sigma, Eigen::VectorXd::Zero(n), -budget}};
  return Miqcqp(std::move(objective), std::move(constraints),
                VarKind::kBoundedInteger, Eigen::VectorXi::Constant(n, upper));
}

Miqcqp QuadraticToMiqcqp(const QuadraticProblem& problem) {
  problem.Validate();
  return QuadraticMiqcqp(problem.sigma, problem.baseline, problem.budget,
                         problem.upper);
}

}  // namespace portdecomp
