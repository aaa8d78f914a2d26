#include "portdecomp/linalg.h"

#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace portdecomp {
namespace {

void CheckSymmetric(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) {
    throw std::invalid_argument("matrix is not square");
  }
  if (m.size() == 0) return;
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw std::invalid_argument("matrix is not symmetric");
  }
}

}  // namespace

SymmetricEigen SymEig(const Eigen::MatrixXd& m) {
  CheckSymmetric(m);
  const Eigen::Index n = m.rows();
  SymmetricEigen result;
  if (n == 0) return result;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(Symmetrize(m));
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("symmetric eigensolver did not converge");
  }
  // Eigen returns ascending order.
  result.values = solver.eigenvalues().reverse();
  result.vectors = solver.eigenvectors().rowwise().reverse();
  const double tolerance = 1e-8 * std::max(m.norm(), 1e-300);
  for (Eigen::Index j = 0; j < n; ++j) {
    auto v = result.vectors.col(j);
    Eigen::Index arg = 0;
    double best = -1.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      // Strict comparison keeps the lowest index on ties.
      if (std::abs(v(i)) > best + 1e-14) {
        best = std::abs(v(i));
        arg = i;
      }
    }
    if (v(arg) < 0) v = -v;
    const double residual = (m * v - result.values(j) * v).norm();
    if (residual > tolerance && m.norm() > 0) {
      throw std::runtime_error("symmetric eigensolver residual too large");
    }
  }
  return result;
}

double MinEigenvalue(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m,
                                                       Eigen::EigenvaluesOnly);
  return solver.eigenvalues()(0);
}

double MaxEigenvalue(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m,
                                                       Eigen::EigenvaluesOnly);
  return solver.eigenvalues()(m.rows() - 1);
}

double SymmetricSpectralNorm(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m,
                                                       Eigen::EigenvaluesOnly);
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

Eigen::MatrixXd Symmetrize(const Eigen::MatrixXd& m) {
  return 0.5 * (m + m.transpose());
}

Eigen::MatrixXd PrincipalSubmatrix(const Eigen::MatrixXd& m,
                                   std::span<const int> index) {
  const int k = static_cast<int>(index.size());
  Eigen::MatrixXd out(k, k);
  for (int j = 0; j < k; ++j) {
    for (int i = 0; i < k; ++i) out(i, j) = m(index[i], index[j]);
  }
  return out;
}

Eigen::VectorXd Subvector(const Eigen::VectorXd& v, std::span<const int> index) {
  Eigen::VectorXd out(index.size());
  for (size_t i = 0; i < index.size(); ++i) out(i) = v(index[i]);
  return out;
}

}  // namespace portdecomp
