#include "portdecomp/rmt.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "portdecomp/linalg.h"
#include "portdecomp/logging.h"

namespace portdecomp {
namespace {

constexpr int kQuadratureOrder = 48;
constexpr int kMinBulk = 10;

struct GaussLegendre {
  std::array<double, kQuadratureOrder> nodes;
  std::array<double, kQuadratureOrder> weights;
};

// Nodes and weights on [−1, 1] by Newton iteration on P_n.
GaussLegendre MakeGaussLegendre() {
  GaussLegendre gl;
  const int n = kQuadratureOrder;
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double step = p1 / dp;
      x -= step;
      if (std::abs(step) < 1e-16) break;
    }
    gl.nodes[i] = x;
    gl.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return gl;
}

const GaussLegendre& Quadrature() {
  static const GaussLegendre gl = MakeGaussLegendre();
  return gl;
}

// Continuous mass on [λ₋, λ]. With λ = λ₋ + (λ₊−λ₋)(1−cos θ)/2 the
// integrand becomes w² sin²θ / (2πβσ² λ(θ)) with w = (λ₊−λ₋)/2, which stays
// bounded even when λ₋ = 0.
double ContinuousMass(double lambda, const MpParams& p, const MpEdges& e) {
  const double w = 0.5 * (e.upper - e.lower);
  const double c = std::clamp(1.0 - (lambda - e.lower) / w, -1.0, 1.0);
  const double theta_max = std::acos(c);
  const GaussLegendre& gl = Quadrature();
  double sum = 0.0;
  for (int i = 0; i < kQuadratureOrder; ++i) {
    const double theta = 0.5 * theta_max * (gl.nodes[i] + 1.0);
    const double s = std::sin(theta);
    const double lam = e.lower + w * (1.0 - std::cos(theta));
    if (lam <= 0.0) continue;  // θ = 0 with λ₋ = 0: integrand limit is finite
    sum += gl.weights[i] * w * w * s * s / lam;
  }
  return 0.5 * theta_max * sum / (2.0 * std::numbers::pi * p.beta * p.sigma2);
}

double CdfLoss(const std::vector<double>& bulk_asc, const MpParams& p) {
  const double m = static_cast<double>(bulk_asc.size());
  double loss = 0.0;
  for (size_t i = 0; i < bulk_asc.size(); ++i) {
    const double diff = MpCdf(bulk_asc[i], p) - (i + 0.5) / m;
    loss += diff * diff;
  }
  return loss;
}

template <typename F>
double GoldenSection(F f, double lo, double hi, int iterations) {
  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo;
  double b = hi;
  double x1 = b - ratio * (b - a);
  double x2 = a + ratio * (b - a);
  double f1 = f(x1);
  double f2 = f(x2);
  for (int i = 0; i < iterations; ++i) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - ratio * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + ratio * (b - a);
      f2 = f(x2);
    }
  }
  return f1 <= f2 ? x1 : x2;
}

std::vector<double> BulkAscending(std::span<const double> eig_desc,
                                  double lambda_plus) {
  std::vector<double> bulk;
  for (double v : eig_desc) {
    if (v <= lambda_plus) bulk.push_back(v);
  }
  std::sort(bulk.begin(), bulk.end());
  return bulk;
}

MpParams FitToBulk(const std::vector<double>& bulk, double beta0) {
  MpParams best{1.0, beta0};
  double best_loss = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= 36; ++i) {
    const double sigma2 = 0.2 + 0.05 * i;
    for (int j = 0; j <= 50; ++j) {
      const MpParams p{sigma2, beta0 * (0.5 + 0.05 * j)};
      const double loss = CdfLoss(bulk, p);
      if (loss < best_loss) {
        best_loss = loss;
        best = p;
      }
    }
  }
  const double s_lo = std::max(1e-6, best.sigma2 - 0.05);
  best.sigma2 = GoldenSection(
      [&](double s) { return CdfLoss(bulk, {s, best.beta}); }, s_lo,
      best.sigma2 + 0.05, 40);
  const double b_lo = std::max(1e-9, best.beta - 0.05 * beta0);
  best.beta = GoldenSection(
      [&](double b) { return CdfLoss(bulk, {best.sigma2, b}); }, b_lo,
      best.beta + 0.05 * beta0, 40);
  return best;
}

}  // namespace

MpEdges MpSupport(const MpParams& p) {
  const double r = std::sqrt(p.beta);
  return {p.sigma2 * (1.0 - r) * (1.0 - r), p.sigma2 * (1.0 + r) * (1.0 + r)};
}

double MpDensity(double lambda, const MpParams& p) {
  const MpEdges e = MpSupport(p);
  if (p.beta <= 0.0 || lambda < e.lower || lambda > e.upper) return 0.0;
  if (lambda <= 0.0) return std::numeric_limits<double>::infinity();
  const double num = std::sqrt((e.upper - lambda) * (lambda - e.lower));
  return num / (2.0 * std::numbers::pi * lambda * p.beta * p.sigma2);
}

double MpCdf(double lambda, const MpParams& p) {
  if (lambda < 0.0) return 0.0;
  const MpEdges e = MpSupport(p);
  const double atom = p.beta > 1.0 ? 1.0 - 1.0 / p.beta : 0.0;
  if (lambda >= e.upper) return 1.0;
  if (lambda <= e.lower) return p.beta <= 0.0 ? 0.0 : atom;
  return atom + ContinuousMass(lambda, p, e);
}

MpFit FitMarchenkoPastur(std::span<const double> eigenvalues_desc, int n,
                         int days, MpFitMode mode) {
  if (n < 1 || days < 1) throw std::invalid_argument("fit needs n >= 1 and T >= 1");
  const double beta0 = static_cast<double>(n) / days;
  MpFit fit;
  fit.params = {1.0, beta0};
  auto count_bulk = [&](const MpParams& p) {
    return static_cast<int>(BulkAscending(eigenvalues_desc, MpSupport(p).upper).size());
  };
  fit.bulk_count = count_bulk(fit.params);
  if (mode == MpFitMode::kFixed) return fit;

  MpParams p = fit.params;
  for (int pass = 0; pass < 2; ++pass) {
    const std::vector<double> bulk = BulkAscending(eigenvalues_desc, MpSupport(p).upper);
    if (static_cast<int>(bulk.size()) < kMinBulk) {
      LogWarn("fewer than 10 bulk eigenvalues; using sigma2 = 1, beta = n/T");
      fit.fell_back = true;
      return fit;
    }
    p = FitToBulk(bulk, beta0);
  }
  fit.params = p;
  fit.bulk_count = count_bulk(p);
  return fit;
}

SpectralSplit SplitSpectrum(const Eigen::MatrixXd& corr, const MpParams& p) {
  const Eigen::Index n = corr.rows();
  if (corr.cols() != n) throw std::invalid_argument("correlation matrix is not square");
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::abs(corr(i, i) - 1.0) > 1e-8) {
      throw std::invalid_argument("correlation matrix needs a unit diagonal");
    }
  }
  SpectralSplit split;
  const SymmetricEigen eig = SymEig(corr);
  split.eigenvalues = eig.values;
  split.eigenvectors = eig.vectors;
  const MpEdges edges = MpSupport(p);
  split.lambda_minus = edges.lower;
  split.lambda_plus = edges.upper;
  split.c_noise = Eigen::MatrixXd::Zero(n, n);
  split.c_global = Eigen::MatrixXd::Zero(n, n);
  split.c_star = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto v = eig.vectors.col(i);
    const Eigen::MatrixXd term = eig.values(i) * v * v.transpose();
    if (eig.values(i) <= edges.upper) {
      split.c_noise += term;
    } else if (i == 0) {
      split.c_global += term;
    } else {
      split.c_star += term;
      split.signal_indices.push_back(static_cast<int>(i));
    }
  }
  return split;
}

}  // namespace portdecomp
