#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace portdecomp {

/// Order in which undecided subgraphs leave the work list.
enum class PopStrategy { kFifo, kUniform, kSizeProportional, kLargest };

PopStrategy ParsePopStrategy(const std::string& name);
std::string ToString(PopStrategy strategy);

struct ClusterConfig {
  std::optional<int> threshold_phi;  // maximum community size, ≥ 2
  PopStrategy pop_strategy = PopStrategy::kFifo;
  double gain_tolerance = 1e-12;
  std::uint64_t seed = 0;  // used by the randomized pop strategies
};

/// Community assignment. Labels are 0..K−1 and communities[k] lists the
/// members of community k in increasing order.
struct Partition {
  std::vector<int> labels;
  std::vector<std::vector<int>> communities;
  double gamma = 1.0;

  /// Builds the index lists; throws std::invalid_argument if the labels are
  /// not exactly 0..K−1 with every community nonempty.
  static Partition FromLabels(std::vector<int> labels, double gamma = 1.0);

  int num_nodes() const { return static_cast<int>(labels.size()); }
  int num_communities() const { return static_cast<int>(communities.size()); }
  int LargestSize() const;
  std::vector<int> Sizes() const;
};

/// γ = Σ_ij |C*_ij|. Zero for an all-zero matrix.
double ModularityNormalizer(const Eigen::MatrixXd& c_star);

/// Q_c = (1/γ) Σ_ij C*_ij [g_i = g_j].
double Modularity(const Eigen::MatrixXd& c_star, const std::vector<int>& labels,
                  double gamma);

/// ±1 assignment from the sign of the leading eigenvector (≥ 0 maps to +1).
std::vector<int> Bisect(const Eigen::MatrixXd& c_star_sub);

/// ΔQ_c = (zᵀC*_G z − Σ_{ij∈G} C*_ij) / (2γ).
double ModularityGain(const Eigen::MatrixXd& c_star_sub,
                      const std::vector<int>& z, double gamma);

struct SplitDecision {
  bool valid = false;
  double gain = 0.0;
  std::vector<int> positive;  // positions within the subgraph
  std::vector<int> negative;
};

/// A split is valid when both sides are nonempty and ΔQ_c > gain_tolerance.
SplitDecision ValidSplit(const Eigen::MatrixXd& c_star_sub, double gamma,
                         double gain_tolerance);

/// One work-list pop.
struct SplitTraceEntry {
  int size = 0;
  double gain = 0.0;
  bool accepted = false;
  bool threshold_phase = false;  // split forced by the size threshold
  double modularity_after = 0.0;
};

struct ClusterResult {
  Partition partition;
  std::vector<SplitTraceEntry> trace;
  int forced_splits = 0;  // threshold splits that needed the median fallback
};

/// Recursive bisection with a work list of undecided subgraphs. Labels are
/// compacted in order of first appearance over nodes 0..n−1. An all-zero
/// input yields a single community.
ClusterResult DetectCommunities(const Eigen::MatrixXd& c_star,
                                const ClusterConfig& config);

/// C̃*_ij = C*_ij − k_i k_j / γ' with k_i = Σ_j C*_ij and γ' = Σ_i k_i, so
/// every row of the result sums to zero. Throws std::invalid_argument
/// ("degenerate null model") when γ' vanishes or nothing but round-off remains.
Eigen::MatrixXd NormalizedModularityMatrix(const Eigen::MatrixXd& c_star);

/// DetectCommunities followed by splitting every community larger than φ by
/// the sign of the leading eigenvector of its normalized modularity matrix.
/// A community whose eigenvector has uniform sign is split at the median
/// eigenvector component instead (counted in forced_splits).
ClusterResult DetectCommunitiesThreshold(const Eigen::MatrixXd& c_star,
                                         const ClusterConfig& config);

/// Dispatches on config.threshold_phi.
ClusterResult Cluster(const Eigen::MatrixXd& c_star, const ClusterConfig& config);

double AdjustedRandIndex(const std::vector<int>& a, const std::vector<int>& b);

}  // namespace portdecomp
