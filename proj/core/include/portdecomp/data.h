#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace portdecomp {

/// n assets × T days of daily returns (decimal fractions).
struct ReturnsMatrix {
  Eigen::MatrixXd values;
  std::vector<std::string> tickers;
  std::vector<std::string> dates;  // may be empty for synthetic data

  int num_assets() const { return static_cast<int>(values.rows()); }
  int num_days() const { return static_cast<int>(values.cols()); }
};

struct LoadedReturns {
  ReturnsMatrix returns;
  std::vector<std::string> dropped;  // tickers with missing cells
};

/// Reads `date,T1,T2,...` CSV (one row per day) and transposes to n×T.
/// Empty, "NA" and "NaN" cells count as missing; an asset with any missing
/// cell is dropped. Throws std::runtime_error on ragged rows, non-numeric
/// cells, fewer than 2 days or fewer than 2 surviving assets.
LoadedReturns LoadReturnsCsv(const std::string& path);

/// Inverse of LoadReturnsCsv. Values are written with 17 significant digits
/// so a load after a write reproduces them exactly. Missing dates are
/// synthesized as consecutive calendar days from 2000-01-01.
void WriteReturnsCsv(const std::string& path, const ReturnsMatrix& returns);

struct CovarianceModel {
  Eigen::MatrixXd sigma;
  Eigen::MatrixXd corr;
  Eigen::VectorXd diag;
  int observations = 0;  // T behind the estimate; 0 when unknown

  int num_assets() const { return static_cast<int>(diag.size()); }
};

/// corr = D^{-1/2} Σ D^{-1/2}. Throws std::invalid_argument on a
/// non-positive variance (naming the asset index).
CovarianceModel CovarianceFromSigma(const Eigen::MatrixXd& sigma,
                                    int observations);

/// Σ = (1/T)·X̃X̃ᵀ where X̃ is X with each row's mean removed (or X itself
/// when demean is false). Throws on a zero-variance asset, naming it.
CovarianceModel SampleCovariance(const ReturnsMatrix& returns,
                                 bool demean = true);

/// Σ = (1/T)·GGᵀ with G an n×T standard normal matrix.
CovarianceModel GenerateWishart(int n, int days, std::uint64_t seed);

/// Block-constant correlation: 1 on the diagonal, rho_in inside a block,
/// rho_out across blocks. Blocks have n/K members, the last absorbing the
/// remainder.
Eigen::MatrixXd BlockCorrelation(int n, int blocks, double rho_in,
                                 double rho_out);
std::vector<int> BlockLabels(int n, int blocks);

struct BlockModel {
  CovarianceModel covariance;  // sample estimate from simulated returns
  Eigen::MatrixXd population;
  std::vector<int> planted_labels;
};

/// Plants K communities and returns the sample covariance of noise_days
/// simulated Gaussian return days drawn from the block correlation.
/// Throws std::invalid_argument if the population matrix is not PSD.
BlockModel GenerateBlockModel(int n, int blocks, double rho_in, double rho_out,
                              int noise_days, std::uint64_t seed);

/// T i.i.d. N(0, Σ) columns using the symmetric factor V·diag(√λ), so PSD
/// matrices with zero eigenvalues are accepted.
ReturnsMatrix GenerateReturns(const Eigen::MatrixXd& sigma, int days,
                              std::uint64_t seed);

/// i.i.d. uniform[0, scale] expected daily returns.
Eigen::VectorXd GenerateExpectedReturns(int n, std::uint64_t seed,
                                        double scale);

}  // namespace portdecomp
