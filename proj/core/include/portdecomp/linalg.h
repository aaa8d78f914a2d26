#pragma once

#include <span>

#include <Eigen/Dense>

namespace portdecomp {

/// Eigenpairs of a real symmetric matrix.
///
/// `values` is sorted in descending order and column i of `vectors` is the
/// unit eigenvector for values(i). Each eigenvector is oriented so that its
/// entry of largest magnitude is positive (first such index on ties), which
/// makes every downstream sign-based decision deterministic.
struct SymmetricEigen {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
};

/// Throws std::invalid_argument if `m` is not square or not symmetric within
/// 1e-10 (relative to its largest entry), and std::runtime_error if any pair
/// misses the residual contract ‖Mv − λv‖₂ ≤ 1e-8·‖M‖_F.
SymmetricEigen SymEig(const Eigen::MatrixXd& m);

/// Extreme eigenvalues of a symmetric matrix; 0 for an empty matrix.
double MinEigenvalue(const Eigen::MatrixXd& m);
double MaxEigenvalue(const Eigen::MatrixXd& m);

/// Spectral norm (largest singular value) of a symmetric matrix.
double SymmetricSpectralNorm(const Eigen::MatrixXd& m);

Eigen::MatrixXd Symmetrize(const Eigen::MatrixXd& m);

Eigen::MatrixXd PrincipalSubmatrix(const Eigen::MatrixXd& m,
                                   std::span<const int> index);
Eigen::VectorXd Subvector(const Eigen::VectorXd& v, std::span<const int> index);

}  // namespace portdecomp
