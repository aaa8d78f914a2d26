#pragma once

#include <limits>
#include <optional>

#include <Eigen/Dense>

namespace portdecomp::internal {

// min f(y) = yᵀQy + 2cᵀy over y ∈ [0,1]^f, optionally with 1ᵀy = sum.
// Q must be positive semidefinite.
struct BoxQpProblem {
  const Eigen::MatrixXd* q = nullptr;
  const Eigen::VectorXd* c = nullptr;
  std::optional<int> sum;
  double lipschitz = 0.0;  // upper bound on 2·λmax(Q)
};

struct BoxQpOptions {
  int max_iterations = 400;
  double tolerance = 1e-9;  // on f(ŷ) − lower_bound, relative to max(1, |f|)
  // Stop as soon as the lower bound reaches this value.
  double cutoff = std::numeric_limits<double>::infinity();
};

struct BoxQpResult {
  Eigen::VectorXd y;
  double value = 0.0;        // f(y)
  double lower_bound = 0.0;  // valid lower bound on the minimum
  int iterations = 0;
};

// Accelerated projected gradient with restarts, periodic active-set
// polishing and a Frank-Wolfe lower bound. The bound is valid for any
// returned iterate because f is convex.
BoxQpResult SolveBoxQp(const BoxQpProblem& problem, const Eigen::VectorXd& start,
                       const BoxQpOptions& options);

// Euclidean projection onto the box, or onto the box ∩ {1ᵀy = sum}.
Eigen::VectorXd ProjectBox(const Eigen::VectorXd& v, std::optional<int> sum);

// min over the feasible set of gᵀy (attained at a vertex).
double LinearMinimum(const Eigen::VectorXd& g, std::optional<int> sum);

}  // namespace portdecomp::internal
