#include "portdecomp/solver.h"

#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "structure.h"

namespace portdecomp {
namespace internal {

std::optional<int> FixedCardinality(const Miqcqp& problem) {
  const int n = problem.num_vars();
  if (problem.constraints().empty() || n == 0) return std::nullopt;
  double lo = 0.0;
  double hi = n;
  for (const QuadraticForm& c : problem.constraints()) {
    if (!c.IsLinear()) return std::nullopt;
    const double beta = c.b(0);
    if (beta == 0.0 || (c.b.array() != beta).any()) return std::nullopt;
    const double limit = -c.kappa / (2.0 * beta);
    if (beta > 0) {
      hi = std::min(hi, std::floor(limit + 1e-9));
    } else {
      lo = std::max(lo, std::ceil(limit - 1e-9));
    }
  }
  if (lo != hi) return std::nullopt;
  return static_cast<int>(lo);
}

}  // namespace internal

namespace {

double Seconds(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

double ObjectiveTolerance(double value) {
  return 1e-9 * std::max(1.0, std::abs(value));
}

// Visits every candidate in decreasing lexicographic order of x until the
// visitor returns false.
template <typename Visitor>
// A negative cardinality enumerates every assignment within the bounds.
void Enumerate(const Miqcqp& problem, int cardinality, Visitor visit) {
  const int n = problem.num_vars();
  Eigen::VectorXi x(n);
  if (cardinality >= 0) {
    const int k = cardinality;
    if (k < 0 || k > n) return;
    std::vector<int> support(k);
    std::iota(support.begin(), support.end(), 0);
    while (true) {
      x.setZero();
      for (int i : support) x(i) = 1;
      if (!visit(x)) return;
      int i = k - 1;
      while (i >= 0 && support[i] == n - k + i) --i;
      if (i < 0) return;
      ++support[i];
      for (int j = i + 1; j < k; ++j) support[j] = support[j - 1] + 1;
    }
  }
  x = problem.upper_bounds();
  while (true) {
    if (!visit(x)) return;
    int j = n - 1;
    while (j >= 0 && x(j) == 0) {
      x(j) = problem.upper_bounds()(j);
      --j;
    }
    if (j < 0) return;
    --x(j);
  }
}

}  // namespace

std::string ToString(SolveStatus status) {
  switch (status) {
    case SolveStatus::kOptimal: return "optimal";
    case SolveStatus::kGapReached: return "gap_reached";
    case SolveStatus::kTimeout: return "timeout";
    case SolveStatus::kInfeasible: return "infeasible";
  }
  return "infeasible";
}

std::string ToString(BranchOrder order) {
  return order == BranchOrder::kIndex ? "index" : "most_fractional";
}

BranchOrder ParseBranchOrder(const std::string& name) {
  if (name == "index") return BranchOrder::kIndex;
  if (name == "most_fractional" || name == "most-fractional") {
    return BranchOrder::kMostFractional;
  }
  throw std::invalid_argument("unknown branch order: " + name);
}

double MipGap(double best_bound, double incumbent) {
  if (!std::isfinite(incumbent) || !std::isfinite(best_bound)) {
    return std::numeric_limits<double>::infinity();
  }
  const double diff = std::abs(best_bound - incumbent);
  return std::abs(incumbent) < 1e-12 ? diff : diff / std::abs(incumbent);
}

Eigen::VectorXi BinaryEncoding::Decode(const Eigen::VectorXi& y) const {
  if (y.size() != expand.cols()) throw std::invalid_argument("encoded vector has the wrong size");
  Eigen::VectorXi x(offsets.size());
  for (size_t j = 0; j < offsets.size(); ++j) {
    int value = 0;
    for (int k = 0; k < bits[j]; ++k) value += y(offsets[j] + k) << k;
    x(static_cast<Eigen::Index>(j)) = value;
  }
  return x;
}

Eigen::VectorXi BinaryEncoding::Encode(const Eigen::VectorXi& x) const {
  if (x.size() != static_cast<Eigen::Index>(offsets.size())) {
    throw std::invalid_argument("integer vector has the wrong size");
  }
  Eigen::VectorXi y = Eigen::VectorXi::Zero(expand.cols());
  for (size_t j = 0; j < offsets.size(); ++j) {
    const int v = x(static_cast<Eigen::Index>(j));
    if (v < 0 || v >= (1 << bits[j])) throw std::invalid_argument("value does not fit the encoding");
    for (int k = 0; k < bits[j]; ++k) y(offsets[j] + k) = (v >> k) & 1;
  }
  return y;
}

BinarizedProblem Binarize(const Miqcqp& problem) {
  const int n = problem.num_vars();
  BinaryEncoding enc;
  int total = 0;
  for (int j = 0; j < n; ++j) {
    const int m = problem.upper_bounds()(j);
    int l = 1;
    while ((1 << l) <= m) ++l;
    enc.offsets.push_back(total);
    enc.bits.push_back(problem.kind() == VarKind::kBinary ? 1 : l);
    total += enc.bits.back();
  }
  enc.expand = Eigen::MatrixXd::Zero(n, total);
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < enc.bits[j]; ++k) enc.expand(j, enc.offsets[j] + k) = 1 << k;
  }
  if (problem.kind() == VarKind::kBinary) return {problem, std::move(enc)};

  const Eigen::MatrixXd& e = enc.expand;
  auto transform = [&](const QuadraticForm& f) {
    return QuadraticForm{e.transpose() * f.A * e, e.transpose() * f.b, f.kappa};
  };
  std::vector<QuadraticForm> constraints;
  for (const QuadraticForm& c : problem.constraints()) constraints.push_back(transform(c));
  for (int j = 0; j < n; ++j) {
    constraints.push_back({Eigen::MatrixXd::Zero(total, total),
                           0.5 * e.row(j).transpose(),
                           -static_cast<double>(problem.upper_bounds()(j))});
  }
  return {Miqcqp::Binary(transform(problem.objective()), std::move(constraints)),
          std::move(enc)};
}

SolveReport BruteForce(const Miqcqp& problem, const SolverConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  const int n = problem.num_vars();
  const int cardinality = problem.kind() == VarKind::kBinary
                              ? internal::FixedCardinality(problem).value_or(-1)
                              : -1;
  double count = 1.0;
  if (cardinality >= 0) {
    const int k = cardinality;
    for (int i = 0; i < k; ++i) count = count * (n - i) / (i + 1);
  } else {
    for (int j = 0; j < n; ++j) count *= problem.upper_bounds()(j) + 1.0;
  }
  if (count > config.brute_force_cutoff) {
    throw std::invalid_argument("brute force would enumerate " +
                                std::to_string(count) +
                                " points, above the cutoff; use branch and bound");
  }

  SolveReport report;
  double best = std::numeric_limits<double>::infinity();
  Enumerate(problem, cardinality, [&](const Eigen::VectorXi& x) {
    ++report.nodes_explored;
    const Evaluation e = Evaluate(problem, x);
    if (e.feasible()) best = std::min(best, e.objective);
    return true;
  });
  if (std::isfinite(best)) {
    Enumerate(problem, cardinality, [&](const Eigen::VectorXi& x) {
      const Evaluation e = Evaluate(problem, x);
      if (e.feasible() && e.objective <= best + ObjectiveTolerance(best)) {
        report.x = x;
        report.objective = e.objective;
        return false;
      }
      return true;
    });
    report.best_bound = report.objective;
    report.mip_gap = 0.0;
    report.status = SolveStatus::kOptimal;
  }
  report.wall_time_s = Seconds(start);
  return report;
}

SolveReport Solve(const Miqcqp& problem, const SolverConfig& config,
                  const Eigen::VectorXi& warm_start) {
  if (problem.kind() == VarKind::kBinary) {
    return BranchAndBound(problem, config, warm_start);
  }
  const BinarizedProblem bin = Binarize(problem);
  Eigen::VectorXi warm;
  if (warm_start.size() > 0) warm = bin.encoding.Encode(warm_start);
  SolveReport report = BranchAndBound(bin.binary, config, warm);
  if (report.x.size() > 0) report.x = bin.encoding.Decode(report.x);
  return report;
}

KktSolution KktContinuous(const Eigen::MatrixXd& sigma,
                          const Eigen::VectorXd& baseline, double budget) {
  if (!(budget > 0)) throw std::invalid_argument("risk budget must be positive");
  const double risk = baseline.dot(sigma * baseline);
  KktSolution s;
  s.lambda = std::max(0.0, std::sqrt(risk / budget) - 1.0);
  s.x = baseline / (1.0 + s.lambda);
  return s;
}

Eigen::VectorXd MarkowitzContinuous(const Eigen::MatrixXd& sigma,
                                    const Eigen::VectorXd& mu, double q) {
  if (!(q > 0)) throw std::invalid_argument("risk aversion q must be positive");
  Eigen::LLT<Eigen::MatrixXd> llt(sigma);
  if (llt.info() != Eigen::Success) {
    throw std::invalid_argument("covariance is singular or not positive definite");
  }
  return llt.solve(mu) / (2.0 * q);
}

}  // namespace portdecomp
