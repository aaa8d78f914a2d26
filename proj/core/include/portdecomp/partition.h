#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "portdecomp/clustering.h"
#include "portdecomp/problem.h"

namespace portdecomp {

enum class ProblemKind { kCardinality, kQuadratic };

struct SubproblemMeta {
  // Cardinality plans.
  double q_prime = 0.0;
  int target = 0;
  // Quadratic plans.
  double weight = 0.0;
  double suppression = 1.0;
  double local_budget = 0.0;
};

struct SubproblemSpec {
  int community_id = 0;
  std::vector<int> index_map;  // local position → global asset index
  Miqcqp miqcqp;
  SubproblemMeta meta;
};

struct DecompositionPlan {
  ProblemKind kind = ProblemKind::kCardinality;
  int num_assets = 0;
  Partition partition;
  std::vector<SubproblemSpec> subproblems;  // ordered by community id
  // Cardinality plans.
  int cardinality_target = 0;
  double q_prime = 0.0;
  // Quadratic plans.
  double r = 0.0;
  double suppression = 1.0;
  double budget = 0.0;         // r·Σ_k (x_b)_kᵀΣ_k(x_b)_k
  double applied_budget = 0.0;  // min(budget, problem's a); split over communities
};

/// Σ′: Σ with every entry between different communities set to zero.
Eigen::MatrixXd BlockDiagonal(const Eigen::MatrixXd& sigma,
                              const Partition& partition);

/// q′ = q·(Σ_k‖μ_k‖₂/‖μ‖₂) / (Σ_k‖Σ_k‖_F/‖Σ‖_F). Throws std::invalid_argument
/// when ‖μ‖₂ or ‖Σ‖_F is zero.
double RebalanceRiskAversion(double q, const Eigen::VectorXd& mu,
                             const Eigen::MatrixXd& sigma,
                             const Partition& partition);

/// Per-community cardinality targets, indexed by community id, summing to
/// round(d·n). Every community but the largest gets ⌊d·n_k⌋; the largest
/// takes the remainder. A remainder outside [0, n_k] is clamped and the
/// excess moved one unit at a time to communities (largest first) with room.
std::vector<int> SplitCardinalityTargets(const Partition& partition, double d,
                                         int n);

DecompositionPlan BuildCardinalitySubproblems(const CardinalityProblem& problem,
                                              const Partition& partition);

/// s = max(1, λmax(Σ)/min_k λmin(Σ_k)). Throws std::invalid_argument if some
/// block is not positive definite.
double ComputeSuppression(const Eigen::MatrixXd& sigma,
                          const Partition& partition);

enum class WeightRule { kQuadraticForm, kNodeRatio };

struct QuadraticPlanOptions {
  double r = 0.9;
  WeightRule weight_rule = WeightRule::kQuadraticForm;
  std::optional<double> suppression_override;
};

/// Community k minimizes (x_k − (x_b)_k)ᵀΣ_k(x_k − (x_b)_k) subject to
/// x_kᵀΣ_k x_k ≤ w_k·a/s, with Σ_k w_k = 1. Because sΣ′ − Σ ⪰ 0, any set of
/// locally feasible solutions aggregates to xᵀΣx ≤ a.
DecompositionPlan BuildQuadraticSubproblems(const QuadraticProblem& problem,
                                            const Partition& partition,
                                            const QuadraticPlanOptions& options);

/// Scatters local solutions (one per subproblem, in plan order) into the
/// global vector. Throws std::invalid_argument on a missing solution, a size
/// mismatch or an index written twice or never.
Eigen::VectorXi Aggregate(const DecompositionPlan& plan,
                          const std::vector<Eigen::VectorXi>& local_solutions);

}  // namespace portdecomp
