#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

namespace portdecomp {

/// Marchenko-Pastur parameters: effective variance σ² and ratio β = n/T*.
struct MpParams {
  double sigma2 = 1.0;
  double beta = 0.0;
};

struct MpEdges {
  double lower = 0.0;
  double upper = 0.0;
};

/// λ± = σ²(1 ± √β)².
MpEdges MpSupport(const MpParams& p);

/// √((λ₊−λ)(λ−λ₋)) / (2πλβσ²) on [λ₋, λ₊], zero elsewhere. When β ≥ 1 the
/// lower edge is 0 and the density diverges there; λ = 0 returns +∞.
double MpDensity(double lambda, const MpParams& p);

/// Mass of the distribution on (−∞, λ], including the point mass 1 − 1/β at
/// zero when β > 1.
double MpCdf(double lambda, const MpParams& p);

enum class MpFitMode { kFixed, kFit };

struct MpFit {
  MpParams params;
  int bulk_count = 0;
  bool fell_back = false;  // kFit requested but the bulk was too small
};

/// kFixed returns σ² = 1, β = n/T. kFit identifies the bulk twice (below
/// the current upper edge) and least-squares fits the MP CDF to the bulk's
/// empirical CDF over a (σ², β) grid, then refines each axis by golden
/// section. Falls back to kFixed when fewer than 10 bulk eigenvalues remain.
MpFit FitMarchenkoPastur(std::span<const double> eigenvalues_desc, int n,
                         int days, MpFitMode mode);

/// C = C_noise + C_global + C*. Eigenvalues ≤ λ₊ are noise; the largest
/// eigenvalue above λ₊ is the market mode; the remaining ones form C*.
struct SpectralSplit {
  Eigen::VectorXd eigenvalues;  // descending
  Eigen::MatrixXd eigenvectors;
  double lambda_minus = 0.0;
  double lambda_plus = 0.0;
  Eigen::MatrixXd c_noise;
  Eigen::MatrixXd c_global;
  Eigen::MatrixXd c_star;
  std::vector<int> signal_indices;  // λ_i > λ₊, excluding the market mode
};

SpectralSplit SplitSpectrum(const Eigen::MatrixXd& corr, const MpParams& p);

}  // namespace portdecomp
