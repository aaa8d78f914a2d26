#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "portdecomp/problem.h"

namespace portdecomp {

enum class SolveStatus { kOptimal, kGapReached, kTimeout, kInfeasible };
enum class BranchOrder { kMostFractional, kIndex };

std::string ToString(SolveStatus status);
std::string ToString(BranchOrder order);
BranchOrder ParseBranchOrder(const std::string& name);

/// State after one branch-and-bound node.
struct NodeEvent {
  std::int64_t node = 0;
  double incumbent = std::numeric_limits<double>::infinity();
  double best_bound = -std::numeric_limits<double>::infinity();
};

struct SolverConfig {
  double mip_gap_target = 1e-4;
  double timeout_s = std::numeric_limits<double>::infinity();
  double brute_force_cutoff = 1e6;
  BranchOrder branch_order = BranchOrder::kMostFractional;
  std::function<void(const NodeEvent&)> observer;  // optional
};

struct SolveReport {
  Eigen::VectorXi x;  // empty when infeasible
  double objective = std::numeric_limits<double>::infinity();     // H_I
  double best_bound = -std::numeric_limits<double>::infinity();   // H_B
  double mip_gap = std::numeric_limits<double>::infinity();
  std::int64_t nodes_explored = 0;
  double wall_time_s = 0.0;
  SolveStatus status = SolveStatus::kInfeasible;
};

/// |H_B − H_I| / |H_I|, or the absolute difference when |H_I| < 1e-12.
double MipGap(double best_bound, double incumbent);

/// Integer → binary substitution x_j = Σ_k 2^k y_jk with l_j bits, where
/// 2^{l_j−1} ≤ m_j < 2^{l_j}, plus the constraint Σ_k 2^k y_jk ≤ m_j for every
/// variable.
struct BinaryEncoding {
  std::vector<int> offsets;  // first bit of variable j
  std::vector<int> bits;     // l_j
  Eigen::MatrixXd expand;    // E with x = E·y

  Eigen::VectorXi Decode(const Eigen::VectorXi& y) const;
  Eigen::VectorXi Encode(const Eigen::VectorXi& x) const;
};

struct BinarizedProblem {
  Miqcqp binary;
  BinaryEncoding encoding;
};

BinarizedProblem Binarize(const Miqcqp& problem);

/// Exhaustive minimum. Problems whose constraints pin 1ᵀx to one value
/// enumerate only supports of that size. Among optima (objective within
/// 1e-9 relative) the lexicographically largest x is returned, which for a
/// fixed-size support is the one with the smallest indices. Throws
/// std::invalid_argument when the enumeration exceeds brute_force_cutoff.
SolveReport BruteForce(const Miqcqp& problem, const SolverConfig& config);

/// Best-first branch and bound on a binary problem. warm_start, when
/// nonempty and feasible, seeds the incumbent.
SolveReport BranchAndBound(const Miqcqp& binary, const SolverConfig& config,
                           const Eigen::VectorXi& warm_start = {});

/// Binarizes bounded-integer problems, runs branch and bound and maps the
/// result back to the original variables.
SolveReport Solve(const Miqcqp& problem, const SolverConfig& config,
                  const Eigen::VectorXi& warm_start = {});

/// Lower bound on the best completion of a binary problem. fixed[j] is 0 or
/// 1 for fixed variables and −1 for free ones, which are relaxed to [0, 1].
/// Returns +∞ for a provably infeasible assignment and −∞ if no bound could
/// be computed.
double RelaxLowerBound(const Miqcqp& binary, std::span<const std::int8_t> fixed);

struct KktSolution {
  Eigen::VectorXd x;
  double lambda = 0.0;
};

/// Continuous optimum of min (x−x_b)ᵀΣ(x−x_b) s.t. xᵀΣx ≤ a:
/// λ = max(0, √(x_bᵀΣx_b/a) − 1), x = x_b/(1+λ).
KktSolution KktContinuous(const Eigen::MatrixXd& sigma,
                          const Eigen::VectorXd& baseline, double budget);

/// x* = Σ⁻¹μ/(2q), the unconstrained minimizer of q·xᵀΣx − μᵀx. Throws
/// std::invalid_argument if Σ is singular.
Eigen::VectorXd MarkowitzContinuous(const Eigen::MatrixXd& sigma,
                                    const Eigen::VectorXd& mu, double q);

}  // namespace portdecomp
