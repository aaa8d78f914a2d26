#include "portdecomp/partition.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "portdecomp/linalg.h"

namespace portdecomp {
namespace {

void CheckPartition(const Partition& partition, Eigen::Index n) {
  if (partition.num_nodes() != n) {
    throw std::invalid_argument("partition size does not match the problem");
  }
}

// Community ids sorted by size, largest first (ties by id).
std::vector<int> BySizeDescending(const Partition& partition) {
  std::vector<int> order(partition.num_communities());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return partition.communities[a].size() > partition.communities[b].size();
  });
  return order;
}

}  // namespace

Eigen::MatrixXd BlockDiagonal(const Eigen::MatrixXd& sigma,
                              const Partition& partition) {
  CheckPartition(partition, sigma.rows());
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(sigma.rows(), sigma.cols());
  for (const auto& c : partition.communities) {
    for (int j : c) {
      for (int i : c) out(i, j) = sigma(i, j);
    }
  }
  return out;
}

double RebalanceRiskAversion(double q, const Eigen::VectorXd& mu,
                             const Eigen::MatrixXd& sigma,
                             const Partition& partition) {
  CheckPartition(partition, mu.size());
  const double mu_norm = mu.norm();
  const double sigma_norm = sigma.norm();
  if (mu_norm == 0.0) throw std::invalid_argument("expected returns are all zero");
  if (sigma_norm == 0.0) throw std::invalid_argument("covariance is zero");
  double mu_parts = 0.0;
  double sigma_parts = 0.0;
  for (const auto& c : partition.communities) {
    mu_parts += Subvector(mu, c).norm();
    sigma_parts += PrincipalSubmatrix(sigma, c).norm();
  }
  return q * (mu_parts / mu_norm) / (sigma_parts / sigma_norm);
}

std::vector<int> SplitCardinalityTargets(const Partition& partition, double d,
                                         int n) {
  CheckPartition(partition, n);
  const int total = CardinalityTarget(d, n);
  if (total > n || total < 0) throw std::invalid_argument("cardinality target out of range");
  const int k = partition.num_communities();
  const std::vector<int> order = BySizeDescending(partition);
  std::vector<int> size(k);
  for (int c = 0; c < k; ++c) size[c] = static_cast<int>(partition.communities[c].size());

  std::vector<int> targets(k, 0);
  const int residual = order[0];
  int assigned = 0;
  for (int c = 0; c < k; ++c) {
    if (c == residual) continue;
    targets[c] = static_cast<int>(std::floor(d * size[c] + 1e-9));
    assigned += targets[c];
  }
  int rest = total - assigned;
  targets[residual] = std::clamp(rest, 0, size[residual]);
  int excess = rest - targets[residual];  // > 0: add elsewhere; < 0: remove
  while (excess != 0) {
    bool moved = false;
    for (int c : order) {
      if (excess > 0 && targets[c] < size[c]) {
        ++targets[c];
        --excess;
        moved = true;
      } else if (excess < 0 && targets[c] > 0) {
        --targets[c];
        ++excess;
        moved = true;
      }
      if (excess == 0) break;
    }
    if (!moved) throw std::invalid_argument("cardinality targets cannot be met");
  }
  return targets;
}

DecompositionPlan BuildCardinalitySubproblems(const CardinalityProblem& problem,
                                              const Partition& partition) {
  problem.Validate();
  const int n = problem.num_assets();
  CheckPartition(partition, n);
  DecompositionPlan plan;
  plan.kind = ProblemKind::kCardinality;
  plan.num_assets = n;
  plan.partition = partition;
  plan.cardinality_target = problem.Target();
  plan.q_prime = partition.num_communities() == 1
                     ? problem.q
                     : RebalanceRiskAversion(problem.q, problem.mu, problem.sigma,
                                             partition);
  const std::vector<int> targets = SplitCardinalityTargets(partition, problem.d, n);
  for (int c = 0; c < partition.num_communities(); ++c) {
    const auto& index = partition.communities[c];
    SubproblemMeta meta;
    meta.q_prime = plan.q_prime;
    meta.target = targets[c];
    plan.subproblems.push_back(
        {c, index,
         CardinalityMiqcqp(PrincipalSubmatrix(problem.sigma, index),
                           Subvector(problem.mu, index), plan.q_prime, targets[c]),
         meta});
  }
  return plan;
}

double ComputeSuppression(const Eigen::MatrixXd& sigma,
                          const Partition& partition) {
  CheckPartition(partition, sigma.rows());
  double min_block = std::numeric_limits<double>::infinity();
  for (const auto& c : partition.communities) {
    min_block = std::min(min_block, MinEigenvalue(PrincipalSubmatrix(sigma, c)));
  }
  if (!(min_block > 0)) {
    throw std::invalid_argument("block-diagonal covariance is not positive definite");
  }
  return std::max(1.0, MaxEigenvalue(sigma) / min_block);
}

DecompositionPlan BuildQuadraticSubproblems(const QuadraticProblem& problem,
                                            const Partition& partition,
                                            const QuadraticPlanOptions& options) {
  problem.Validate();
  if (!(options.r > 0 && options.r < 1)) {
    throw std::invalid_argument("rescaling factor r must lie in (0, 1)");
  }
  const int n = problem.num_assets();
  CheckPartition(partition, n);
  const int k = partition.num_communities();
  const Eigen::VectorXd xb = problem.baseline.cast<double>();

  std::vector<double> local_risk(k);
  double total_risk = 0.0;
  for (int c = 0; c < k; ++c) {
    const auto& index = partition.communities[c];
    const Eigen::VectorXd xk = Subvector(xb, index);
    local_risk[c] = xk.dot(PrincipalSubmatrix(problem.sigma, index) * xk);
    total_risk += local_risk[c];
  }

  DecompositionPlan plan;
  plan.kind = ProblemKind::kQuadratic;
  plan.num_assets = n;
  plan.partition = partition;
  plan.r = options.r;
  plan.budget = options.r * total_risk;
  // Σ′ can carry more baseline risk than Σ; never promise more than a.
  plan.applied_budget = std::min(plan.budget, problem.budget);
  plan.suppression = options.suppression_override
                         ? *options.suppression_override
                         : ComputeSuppression(problem.sigma, partition);
  if (!(plan.suppression >= 1.0)) throw std::invalid_argument("suppression must be >= 1");

  const bool node_ratio =
      options.weight_rule == WeightRule::kNodeRatio || !(total_risk > 0);
  for (int c = 0; c < k; ++c) {
    const auto& index = partition.communities[c];
    SubproblemMeta meta;
    meta.weight = node_ratio ? static_cast<double>(index.size()) / n
                             : local_risk[c] / total_risk;
    meta.suppression = plan.suppression;
    meta.local_budget = meta.weight * plan.applied_budget / plan.suppression;
    Eigen::VectorXi local_baseline(index.size());
    for (size_t i = 0; i < index.size(); ++i) local_baseline(i) = problem.baseline(index[i]);
    plan.subproblems.push_back(
        {c, index,
         QuadraticMiqcqp(PrincipalSubmatrix(problem.sigma, index), local_baseline,
                         meta.local_budget, problem.upper),
         meta});
  }
  return plan;
}

Eigen::VectorXi Aggregate(const DecompositionPlan& plan,
                          const std::vector<Eigen::VectorXi>& local_solutions) {
  if (local_solutions.size() != plan.subproblems.size()) {
    throw std::invalid_argument("expected one local solution per community");
  }
  Eigen::VectorXi x = Eigen::VectorXi::Zero(plan.num_assets);
  std::vector<int> written(plan.num_assets, 0);
  for (size_t c = 0; c < plan.subproblems.size(); ++c) {
    const auto& index = plan.subproblems[c].index_map;
    const Eigen::VectorXi& local = local_solutions[c];
    if (local.size() != static_cast<Eigen::Index>(index.size())) {
      throw std::invalid_argument("missing solution for community " +
                                  std::to_string(plan.subproblems[c].community_id));
    }
    for (size_t i = 0; i < index.size(); ++i) {
      const int g = index[i];
      if (g < 0 || g >= plan.num_assets || written[g]++ > 0) {
        throw std::invalid_argument("asset " + std::to_string(g) +
                                    " assigned to more than one community");
      }
      x(g) = local(static_cast<Eigen::Index>(i));
    }
  }
  for (int g = 0; g < plan.num_assets; ++g) {
    if (written[g] == 0) {
      throw std::invalid_argument("asset " + std::to_string(g) + " is in no community");
    }
  }
  return x;
}

}  // namespace portdecomp
