#include "box_qp.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace portdecomp::internal {
namespace {

double Objective(const BoxQpProblem& p, const Eigen::VectorXd& y,
                 Eigen::VectorXd* grad) {
  const Eigen::VectorXd qy = (*p.q) * y;
  if (grad != nullptr) *grad = 2.0 * (qy + *p.c);
  return y.dot(qy) + 2.0 * p.c->dot(y);
}

double FrankWolfeBound(const BoxQpProblem& p, const Eigen::VectorXd& y,
                       double value, const Eigen::VectorXd& grad) {
  return value + LinearMinimum(grad, p.sum) - grad.dot(y);
}

// Solves the equality-constrained QP on the variables strictly inside the
// box, keeping the others at their bounds. Returns nullopt when the system
// is singular or the solution leaves the box.
std::optional<Eigen::VectorXd> Polish(const BoxQpProblem& p,
                                      const Eigen::VectorXd& y) {
  const Eigen::Index n = y.size();
  constexpr double kEdge = 1e-7;
  std::vector<int> free;
  Eigen::VectorXd out = y;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (y(i) <= kEdge) {
      out(i) = 0.0;
    } else if (y(i) >= 1.0 - kEdge) {
      out(i) = 1.0;
    } else {
      free.push_back(static_cast<int>(i));
    }
  }
  const int f = static_cast<int>(free.size());
  if (f == 0) {
    if (p.sum && std::abs(out.sum() - *p.sum) > 1e-9) return std::nullopt;
    return out;
  }
  for (int i : free) out(i) = 0.0;
  const Eigen::VectorXd rhs_full = -((*p.q) * out + *p.c);
  const int m = f + (p.sum ? 1 : 0);
  Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(m, m);
  Eigen::VectorXd rhs(m);
  for (int a = 0; a < f; ++a) {
    for (int b = 0; b < f; ++b) kkt(a, b) = (*p.q)(free[a], free[b]);
    rhs(a) = rhs_full(free[a]);
  }
  if (p.sum) {
    for (int a = 0; a < f; ++a) {
      kkt(a, f) = 0.5;
      kkt(f, a) = 1.0;
    }
    rhs(f) = *p.sum - out.sum();
  }
  auto consistent = [&](const Eigen::VectorXd& sol) {
    return sol.allFinite() && (kkt * sol - rhs).norm() <= 1e-9 * (1.0 + rhs.norm());
  };
  Eigen::VectorXd sol = Eigen::PartialPivLU<Eigen::MatrixXd>(kkt).solve(rhs);
  if (!consistent(sol)) {
    // Singular faces (e.g. binary expansions of one integer) have many
    // minimizers; take the minimum-norm one.
    sol = Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd>(kkt).solve(rhs);
    if (!consistent(sol)) return std::nullopt;
  }
  for (int a = 0; a < f; ++a) {
    if (sol(a) < -1e-12 || sol(a) > 1.0 + 1e-12) return std::nullopt;
    out(free[a]) = std::clamp(sol(a), 0.0, 1.0);
  }
  return out;
}

}  // namespace

Eigen::VectorXd ProjectBox(const Eigen::VectorXd& v, std::optional<int> sum) {
  if (!sum) return v.cwiseMax(0.0).cwiseMin(1.0);
  // Find τ with Σ clamp(v − τ, 0, 1) = sum by bisection.
  const double target = *sum;
  if (target <= 0) return Eigen::VectorXd::Zero(v.size());
  if (target >= v.size()) return Eigen::VectorXd::Ones(v.size());
  double lo = v.minCoeff() - 1.0;
  double hi = v.maxCoeff();
  auto mass = [&](double tau) {
    return (v.array() - tau).max(0.0).min(1.0).sum();
  };
  for (int iter = 0; iter < 100 && hi - lo > 1e-15 * (1.0 + std::abs(hi)); ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mass(mid) > target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return (v.array() - 0.5 * (lo + hi)).max(0.0).min(1.0).matrix();
}

double LinearMinimum(const Eigen::VectorXd& g, std::optional<int> sum) {
  if (!sum) return g.cwiseMin(0.0).sum();
  const int r = *sum;
  if (r <= 0) return 0.0;
  std::vector<double> values(g.data(), g.data() + g.size());
  if (r >= static_cast<int>(values.size())) {
    return std::accumulate(values.begin(), values.end(), 0.0);
  }
  std::nth_element(values.begin(), values.begin() + r, values.end());
  return std::accumulate(values.begin(), values.begin() + r, 0.0);
}

BoxQpResult SolveBoxQp(const BoxQpProblem& p, const Eigen::VectorXd& start,
                       const BoxQpOptions& options) {
  const Eigen::Index n = p.c->size();
  BoxQpResult best;
  best.lower_bound = -std::numeric_limits<double>::infinity();
  best.value = std::numeric_limits<double>::infinity();
  if (n == 0) {
    best.y = Eigen::VectorXd();
    best.value = 0.0;
    best.lower_bound = 0.0;
    return best;
  }

  Eigen::VectorXd grad;
  auto consider = [&](const Eigen::VectorXd& y) {
    const double value = Objective(p, y, &grad);
    const double bound = FrankWolfeBound(p, y, value, grad);
    if (value < best.value) {
      best.value = value;
      best.y = y;
    }
    best.lower_bound = std::max(best.lower_bound, bound);
  };
  auto done = [&] {
    if (best.lower_bound >= options.cutoff) return true;
    return best.value - best.lower_bound <=
           options.tolerance * std::max(1.0, std::abs(best.value));
  };

  const double step = 1.0 / std::max(p.lipschitz, 1e-12);
  Eigen::VectorXd x = ProjectBox(start, p.sum);
  consider(x);
  if (auto polished = Polish(p, x)) consider(*polished);
  if (done()) return best;

  Eigen::VectorXd z = x;
  double t = 1.0;
  double fx = Objective(p, x, nullptr);
  int next_polish = 8;
  for (int k = 1; k <= options.max_iterations; ++k) {
    best.iterations = k;
    Objective(p, z, &grad);
    const Eigen::VectorXd x_next = ProjectBox(z - step * grad, p.sum);
    const double f_next = Objective(p, x_next, nullptr);
    if (f_next > fx) {
      // Restart momentum.
      t = 1.0;
      z = x;
      continue;
    }
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    z = x_next + ((t - 1.0) / t_next) * (x_next - x);
    x = x_next;
    fx = f_next;
    t = t_next;
    if (k % 4 == 0 || k == next_polish) {
      consider(x);
      if (k >= next_polish) {
        if (auto polished = Polish(p, x)) consider(*polished);
        next_polish *= 2;
      }
      if (done()) return best;
    }
  }
  consider(x);
  if (auto polished = Polish(p, x)) consider(*polished);
  return best;
}

}  // namespace portdecomp::internal
