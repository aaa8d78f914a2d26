#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "portdecomp/clustering.h"
#include "portdecomp/data.h"
#include "portdecomp/partition.h"
#include "portdecomp/problem.h"
#include "portdecomp/rmt.h"
#include "portdecomp/solver.h"

namespace portdecomp {

/// Problem instance plus the sample length behind its covariance (T feeds
/// the noise model; 0 means unknown, in which case T = n is assumed).
struct PipelineInput {
  Problem problem;
  int observations = 0;
};

struct PipelineConfig {
  MpFitMode mp_mode = MpFitMode::kFixed;
  ClusterConfig cluster;
  SolverConfig solver;  // subproblems always use a 1e-4 gap target
  QuadraticPlanOptions quadratic;
  bool parallel_subproblems = false;
  int threads = 1;
  bool run_direct = false;
  SolverConfig direct_solver;
};

/// Thrown when a stage fails; stage() names it (preprocess, fit, split,
/// cluster, build, solve, aggregate, evaluate).
class PipelineError : public std::runtime_error {
 public:
  PipelineError(std::string stage, const std::string& message);
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

/// Correlation, noise fit and spectral split of a covariance matrix.
struct Preprocessed {
  CovarianceModel covariance;
  MpFit fit;
  SpectralSplit split;
};

/// days ≤ 0 means unknown; T = n is assumed.
Preprocessed Preprocess(const Eigen::MatrixXd& sigma, int days, MpFitMode mode);

struct StageTimes {
  double preprocess = 0.0;
  double cluster = 0.0;
  double build = 0.0;
  double solve = 0.0;
  double aggregate = 0.0;
  double total = 0.0;
};

struct PipelineReport {
  ProblemKind kind = ProblemKind::kCardinality;
  Eigen::VectorXi x;
  double objective = 0.0;
  bool feasible = false;
  std::vector<Violation> violations;
  StageTimes times;
  double solve_time_sequential = 0.0;  // Σ of subproblem wall times
  std::vector<SolveReport> subproblems;
  MpParams mp;
  double lambda_plus = 0.0;
  int num_signal = 0;
  std::vector<int> labels;
  int num_communities = 0;
  int largest_community = 0;
  double size_reduction = 0.0;  // largest / n
  int forced_splits = 0;
  std::optional<double> suppression;        // quadratic plans
  std::optional<double> psd_certificate;    // λmin(sΣ′ − Σ)
  std::optional<SolveReport> direct;
  std::optional<double> relative_drop;
  std::optional<double> gap_bound;          // cardinality plans
  DecompositionPlan plan;
};

/// Decomposes, solves every community and aggregates. Subproblems are
/// solved independently, so the result does not depend on threading.
PipelineReport RunDecomposed(const PipelineInput& input,
                             const PipelineConfig& config);

/// Whole-problem branch and bound.
SolveReport RunDirect(const Problem& problem, const SolverConfig& config);

/// (‖Σ⁻¹‖·‖μ‖²/(4q))·(K·‖Σ − Σ′‖/Γ)² in spectral norms.
double DecompositionGapBound(const Eigen::MatrixXd& sigma,
                     const Eigen::MatrixXd& sigma_prime,
                     const Eigen::VectorXd& mu, double q, int num_blocks,
                     double gamma);

/// Γ = min_k ‖Σ_kk‖ over the diagonal blocks.
double MinBlockNorm(const Eigen::MatrixXd& sigma, const Partition& partition);

/// (H_dec − H_dir)/|H_dir|; the plain difference when H_dir is zero.
double RelativeDrop(double h_direct, double h_decomposed);

}  // namespace portdecomp
