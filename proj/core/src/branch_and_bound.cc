#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>
#include <vector>

#include "box_qp.h"
#include "portdecomp/linalg.h"
#include "portdecomp/logging.h"
#include "portdecomp/solver.h"
#include "structure.h"

namespace portdecomp {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double ShiftMargin(const Eigen::MatrixXd& a) {
  return 1e-10 * std::max(1.0, a.cwiseAbs().maxCoeff() * a.rows()) + 1e-12;
}

struct RelaxationResult {
  double bound = -kInf;
  Eigen::VectorXd y;  // full relaxed point, fixed entries included
  double lambda = 0.0;
};

// Convex relaxations of a binary problem at a partial assignment.
//
// For binary y, yᵀAy = yᵀ(A − sI)y + s·1ᵀy. With s the smallest eigenvalue
// of A the shifted form is convex on every principal submatrix, so relaxing
// the free variables to [0, 1] gives a convex bound that is at least as
// tight as relaxing yᵀAy directly.
class Relaxation {
 public:
  Relaxation(const Miqcqp& p, double tolerance) : p_(p), tolerance_(tolerance) {
    const int n = p.num_vars();
    cardinality_ = internal::FixedCardinality(p);
    a0_ = p.objective().A;
    b0_ = p.objective().b;
    kappa0_ = p.objective().kappa;
    const double lo0 = MinEigenvalue(a0_);
    shift0_ = lo0 - ShiftMargin(a0_);
    lip0_ = 2.0 * (MaxEigenvalue(a0_) - shift0_);
    if (!cardinality_) {
      a1_ = Eigen::MatrixXd::Zero(n, n);
      b1_ = Eigen::VectorXd::Zero(n);
      for (const QuadraticForm& c : p.constraints()) {
        if (c.IsLinear()) {
          linear_.push_back(&c);
        } else {
          has_quadratic_ = true;
          a1_ += c.A;
          b1_ += c.b;
          kappa1_ += c.kappa;
        }
      }
      if (has_quadratic_) {
        shift1_ = MinEigenvalue(a1_) - ShiftMargin(a1_);
        lip1_ = 2.0 * (MaxEigenvalue(a1_) - shift1_);
      }
    }
  }

  const std::optional<int>& cardinality() const { return cardinality_; }

  RelaxationResult Evaluate(std::span<const std::int8_t> fixed,
                            const Eigen::VectorXd* warm, double cutoff,
                            double lambda_hint) const {
    const int n = p_.num_vars();
    std::vector<int> free;
    std::vector<int> ones;
    for (int j = 0; j < n; ++j) {
      if (fixed[j] < 0) {
        free.push_back(j);
      } else if (fixed[j] == 1) {
        ones.push_back(j);
      }
    }
    RelaxationResult out;
    out.y = Eigen::VectorXd::Zero(n);
    for (int j : ones) out.y(j) = 1.0;

    std::optional<int> residual;
    if (cardinality_) {
      const int r = *cardinality_ - static_cast<int>(ones.size());
      if (r < 0 || r > static_cast<int>(free.size())) {
        out.bound = kInf;
        return out;
      }
      residual = r;
    } else if (LinearInfeasible(free, ones)) {
      out.bound = kInf;
      return out;
    }

    const int f = static_cast<int>(free.size());
    Eigen::VectorXd start(f);
    for (int a = 0; a < f; ++a) {
      start(a) = warm != nullptr ? (*warm)(free[a])
                                 : (residual ? double(*residual) / f : 0.5);
    }
    NodeForm obj = Restrict(a0_, b0_, kappa0_, free, ones);
    if (cardinality_ || !has_quadratic_) {
      const internal::BoxQpResult r =
          SolveShifted(obj, nullptr, 0.0, shift0_, lip0_, residual, start, cutoff);
      out.bound = r.lower_bound;
      for (int a = 0; a < f; ++a) out.y(free[a]) = r.y(a);
      if (std::isnan(out.bound)) out.bound = -kInf;
      return out;
    }
    NodeForm con = Restrict(a1_, b1_, kappa1_, free, ones);
    return Dual(obj, con, free, start, cutoff, lambda_hint, out);
  }

 private:
  struct NodeForm {
    Eigen::MatrixXd q;  // A_FF
    Eigen::VectorXd c;  // b_F + A_FO·1
    double constant = 0.0;
  };

  NodeForm Restrict(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                    double kappa, const std::vector<int>& free,
                    const std::vector<int>& ones) const {
    NodeForm form;
    form.q = PrincipalSubmatrix(a, free);
    form.c.resize(free.size());
    for (size_t i = 0; i < free.size(); ++i) {
      double s = b(free[i]);
      for (int o : ones) s += a(free[i], o);
      form.c(static_cast<Eigen::Index>(i)) = s;
    }
    double constant = kappa;
    for (int o : ones) {
      constant += 2.0 * b(o);
      for (int o2 : ones) constant += a(o, o2);
    }
    form.constant = constant;
    return form;
  }

  bool LinearInfeasible(const std::vector<int>& free,
                        const std::vector<int>& ones) const {
    for (const QuadraticForm* c : linear_) {
      double least = c->kappa;
      for (int o : ones) least += 2.0 * c->b(o);
      for (int j : free) least += std::min(0.0, 2.0 * c->b(j));
      if (least > kFeasibilityTolerance) return true;
    }
    return false;
  }

  // Box QP for obj + λ·con with the combined shift.
  internal::BoxQpResult SolveShifted(const NodeForm& obj, const NodeForm* con,
                                     double lambda, double shift, double lip,
                                     std::optional<int> residual,
                                     const Eigen::VectorXd& start,
                                     double cutoff) const {
    const int f = static_cast<int>(obj.c.size());
    Eigen::MatrixXd q = obj.q;
    Eigen::VectorXd c = obj.c;
    double constant = obj.constant;
    if (con != nullptr) {
      q += lambda * con->q;
      c += lambda * con->c;
      constant += lambda * con->constant;
    }
    q.diagonal().array() -= shift;
    c.array() += 0.5 * shift;
    internal::BoxQpProblem problem{&q, &c, residual, lip};
    internal::BoxQpOptions options;
    options.cutoff = cutoff - constant;
    options.tolerance = tolerance_;
    internal::BoxQpResult r = internal::SolveBoxQp(problem, start, options);
    r.value += constant;
    r.lower_bound += constant;
    if (f == 0) r.y = Eigen::VectorXd();
    return r;
  }

  // Value of the shifted constraint relaxation at y (the dual gradient).
  double ConstraintAt(const NodeForm& con, const Eigen::VectorXd& y) const {
    return y.dot(con.q * y) + 2.0 * con.c.dot(y) + con.constant +
           shift1_ * (y.sum() - y.squaredNorm());
  }

  // Maximizes the Lagrangian dual g(λ) over λ ≥ 0. g is concave with
  // derivative equal to the relaxed constraint value at the inner minimizer,
  // so the root of that derivative is bracketed by doubling and then located
  // by false position (Illinois variant). Every evaluated g(λ) is a valid
  // bound; the largest one is returned.
  RelaxationResult Dual(const NodeForm& obj, const NodeForm& con,
                        const std::vector<int>& free, Eigen::VectorXd start,
                        double cutoff, double lambda_hint,
                        RelaxationResult out) const {
    const int f = static_cast<int>(free.size());
    double best = -kInf;
    double best_lambda = 0.0;
    Eigen::VectorXd best_y = start;
    auto eval = [&](double lambda) {
      const internal::BoxQpResult r = SolveShifted(
          obj, &con, lambda, shift0_ + lambda * shift1_, lip0_ + lambda * lip1_,
          std::nullopt, start, cutoff);
      const double value = std::isnan(r.lower_bound) ? -kInf : r.lower_bound;
      if (value > best) {
        best = value;
        best_lambda = lambda;
        best_y = r.y;
      }
      if (f > 0) start = r.y;
      return f > 0 ? ConstraintAt(con, r.y) : con.constant;
    };

    double g_lo = eval(0.0);
    if (g_lo > 0 && best < cutoff) {
      double lo = 0.0;
      double hi = std::max(1.0, lambda_hint);
      double g_hi = eval(hi);
      while (g_hi > 0 && hi < 1e8 && best < cutoff) {
        lo = hi;
        g_lo = g_hi;
        hi *= 4.0;
        g_hi = eval(hi);
      }
      int side = 0;
      for (int iter = 0; iter < 60 && g_hi <= 0 && best < cutoff &&
                         hi - lo > 1e-6 * (1.0 + std::abs(hi));
           ++iter) {
        double mid = (lo * g_hi - hi * g_lo) / (g_hi - g_lo);
        if (!(mid > lo && mid < hi)) mid = 0.5 * (lo + hi);
        const double g_mid = eval(mid);
        if (g_mid > 0) {
          lo = mid;
          g_lo = g_mid;
          if (side == -1) g_hi *= 0.5;
          side = -1;
        } else {
          hi = mid;
          g_hi = g_mid;
          if (side == 1) g_lo *= 0.5;
          side = 1;
        }
        if (std::abs(g_mid) <= 1e-12 * (1.0 + std::abs(con.constant))) break;
      }
    }
    out.bound = best;
    out.lambda = best_lambda;
    for (int a = 0; a < f; ++a) out.y(free[a]) = best_y(a);
    return out;
  }

  const Miqcqp& p_;
  double tolerance_;
  std::optional<int> cardinality_;
  Eigen::MatrixXd a0_;
  Eigen::VectorXd b0_;
  double kappa0_ = 0.0;
  double shift0_ = 0.0;
  double lip0_ = 0.0;
  bool has_quadratic_ = false;
  Eigen::MatrixXd a1_;
  Eigen::VectorXd b1_;
  double kappa1_ = 0.0;
  double shift1_ = 0.0;
  double lip1_ = 0.0;
  std::vector<const QuadraticForm*> linear_;
};

struct Node {
  double bound = -kInf;
  int depth = 0;
  std::int64_t id = 0;
  double lambda = 0.0;
  std::vector<std::int8_t> fixed;
  std::vector<float> warm;
};

struct NodeOrder {
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;
    if (a.depth != b.depth) return a.depth < b.depth;
    return a.id > b.id;
  }
};

class Incumbent {
 public:
  explicit Incumbent(const Miqcqp& p) : p_(p) {}

  // Returns true if x is feasible and strictly improves the incumbent.
  bool Offer(const Eigen::VectorXi& x) {
    const Evaluation e = Evaluate(p_, x);
    if (!e.feasible()) return false;
    if (e.objective < value_ - 1e-12 * std::max(1.0, std::abs(value_)) ||
        !has_) {
      value_ = e.objective;
      x_ = x;
      has_ = true;
      return true;
    }
    return false;
  }

  bool has() const { return has_; }
  double value() const { return has_ ? value_ : kInf; }
  const Eigen::VectorXi& x() const { return x_; }

 private:
  const Miqcqp& p_;
  bool has_ = false;
  double value_ = kInf;
  Eigen::VectorXi x_;
};

// Pairwise-swap descent for fixed-cardinality problems.
Eigen::VectorXi SwapDescent(const Miqcqp& p, Eigen::VectorXi x) {
  const Eigen::MatrixXd& a = p.objective().A;
  const Eigen::Index n = x.size();
  Eigen::VectorXd g = a * x.cast<double>() + p.objective().b;
  for (int pass = 0; pass < 10 * static_cast<int>(n) + 10; ++pass) {
    double best = -1e-12;
    Eigen::Index best_in = -1;
    Eigen::Index best_out = -1;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (x(i) != 1) continue;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (x(j) != 0) continue;
        const double delta = 2.0 * (g(j) - g(i)) + a(i, i) + a(j, j) - 2.0 * a(i, j);
        if (delta < best) {
          best = delta;
          best_in = i;
          best_out = j;
        }
      }
    }
    if (best_in < 0) break;
    x(best_in) = 0;
    x(best_out) = 1;
    g += a.col(best_out) - a.col(best_in);
  }
  return x;
}

Eigen::VectorXi RoundCardinality(const Eigen::VectorXd& y,
                                 std::span<const std::int8_t> fixed, int target) {
  const Eigen::Index n = y.size();
  Eigen::VectorXi x = Eigen::VectorXi::Zero(n);
  std::vector<int> free;
  int ones = 0;
  for (Eigen::Index j = 0; j < n; ++j) {
    if (fixed[j] == 1) {
      x(j) = 1;
      ++ones;
    } else if (fixed[j] < 0) {
      free.push_back(static_cast<int>(j));
    }
  }
  std::stable_sort(free.begin(), free.end(), [&](int a, int b) { return y(a) > y(b); });
  for (int i = 0; i < target - ones && i < static_cast<int>(free.size()); ++i) {
    x(free[i]) = 1;
  }
  return x;
}

}  // namespace

double RelaxLowerBound(const Miqcqp& binary, std::span<const std::int8_t> fixed) {
  if (binary.kind() != VarKind::kBinary) {
    throw std::invalid_argument("relaxation bounds need a binary problem");
  }
  if (static_cast<int>(fixed.size()) != binary.num_vars()) {
    throw std::invalid_argument("assignment has the wrong size");
  }
  const Relaxation relaxation(binary, 1e-9);
  const RelaxationResult r = relaxation.Evaluate(fixed, nullptr, kInf, 0.0);
  bool complete = true;
  for (std::int8_t v : fixed) complete = complete && v >= 0;
  if (complete && std::isfinite(r.bound)) {
    Eigen::VectorXi x(fixed.size());
    for (size_t j = 0; j < fixed.size(); ++j) x(static_cast<Eigen::Index>(j)) = fixed[j];
    const Evaluation e = Evaluate(binary, x);
    return e.feasible() ? e.objective : kInf;
  }
  return r.bound;
}

SolveReport BranchAndBound(const Miqcqp& binary, const SolverConfig& config,
                           const Eigen::VectorXi& warm_start) {
  if (binary.kind() != VarKind::kBinary) {
    throw std::invalid_argument("branch and bound needs a binary problem; binarize first");
  }
  if (!(config.mip_gap_target > 0)) throw std::invalid_argument("mip gap target must be positive");
  const auto start = std::chrono::steady_clock::now();
  const int n = binary.num_vars();
  // Inner solves only need to be accurate relative to the gap target.
  const Relaxation relaxation(
      binary, std::clamp(0.01 * config.mip_gap_target, 1e-10, 1e-6));
  Incumbent incumbent(binary);
  const std::optional<int>& card = relaxation.cardinality();

  if (warm_start.size() == n) incumbent.Offer(warm_start);
  if (!card) incumbent.Offer(Eigen::VectorXi::Zero(n));

  auto cutoff = [&] {
    if (!incumbent.has()) return kInf;
    const double h = incumbent.value();
    return h - config.mip_gap_target * (std::abs(h) < 1e-12 ? 1.0 : std::abs(h));
  };

  std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
  Node root;
  root.fixed.assign(n, -1);
  open.push(std::move(root));
  std::int64_t next_id = 1;
  double pruned_floor = kInf;
  SolveReport report;
  bool timed_out = false;

  auto global_bound = [&] {
    double b = pruned_floor;
    if (!open.empty()) b = std::min(b, open.top().bound);
    return std::min(b, incumbent.value());
  };

  while (!open.empty()) {
    if (incumbent.has() &&
        MipGap(global_bound(), incumbent.value()) <= config.mip_gap_target) {
      break;
    }
    if (std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count() > config.timeout_s) {
      timed_out = true;
      break;
    }
    Node node = open.top();
    open.pop();
    if (node.bound >= cutoff()) {
      pruned_floor = std::min(pruned_floor, node.bound);
      continue;
    }
    ++report.nodes_explored;

    Eigen::VectorXd warm;
    if (!node.warm.empty()) {
      warm = Eigen::Map<const Eigen::VectorXf>(node.warm.data(), n).cast<double>();
    }
    RelaxationResult r = relaxation.Evaluate(node.fixed, node.warm.empty() ? nullptr : &warm,
                                             cutoff(), node.lambda);
    double bound = std::max(r.bound, node.bound);

    std::vector<int> free;
    for (int j = 0; j < n; ++j) {
      if (node.fixed[j] < 0) free.push_back(j);
    }
    if (free.empty()) {
      Eigen::VectorXi x(n);
      for (int j = 0; j < n; ++j) x(j) = node.fixed[j];
      incumbent.Offer(x);
    } else if (std::isfinite(bound)) {
      if (card) {
        Eigen::VectorXi x = RoundCardinality(r.y, node.fixed, *card);
        if (incumbent.Offer(x) || report.nodes_explored == 1) {
          incumbent.Offer(SwapDescent(binary, x));
        }
      } else {
        Eigen::VectorXi nearest(n);
        Eigen::VectorXi floor(n);
        for (int j = 0; j < n; ++j) {
          nearest(j) = r.y(j) >= 0.5 ? 1 : 0;
          floor(j) = r.y(j) >= 1.0 - 1e-9 ? 1 : 0;
        }
        incumbent.Offer(nearest);
        incumbent.Offer(floor);
      }
    }

    if (config.observer) {
      double b = std::min(bound, pruned_floor);
      if (!open.empty()) b = std::min(b, open.top().bound);
      config.observer({report.nodes_explored, incumbent.value(),
                       std::min(b, incumbent.value())});
    }
    if (free.empty()) continue;
    if (bound >= cutoff()) {
      pruned_floor = std::min(pruned_floor, bound);
      continue;
    }

    int var = free.front();
    if (config.branch_order == BranchOrder::kMostFractional) {
      double closest = kInf;
      for (int j : free) {
        const double dist = std::abs(r.y(j) - 0.5);
        if (dist < closest - 1e-12) {
          closest = dist;
          var = j;
        }
      }
    }
    const std::int8_t first = r.y(var) >= 0.5 ? 1 : 0;
    std::vector<float> child_warm(r.y.data(), r.y.data() + n);
    for (std::int8_t v : {first, static_cast<std::int8_t>(1 - first)}) {
      Node child;
      child.bound = bound;
      child.depth = node.depth + 1;
      child.id = next_id++;
      child.lambda = r.lambda;
      child.fixed = node.fixed;
      child.fixed[var] = v;
      child.warm = child_warm;
      child.warm[var] = v;
      open.push(std::move(child));
    }
  }

  report.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!incumbent.has()) {
    report.status = timed_out ? SolveStatus::kTimeout : SolveStatus::kInfeasible;
    report.best_bound = open.empty() ? kInf : global_bound();
    return report;
  }
  report.x = incumbent.x();
  report.objective = incumbent.value();
  report.best_bound = global_bound();
  report.mip_gap = MipGap(report.best_bound, report.objective);
  if (timed_out) {
    report.status = SolveStatus::kTimeout;
  } else if (report.best_bound >=
             report.objective - 1e-9 * std::max(1.0, std::abs(report.objective))) {
    report.status = SolveStatus::kOptimal;
  } else {
    report.status = SolveStatus::kGapReached;
  }
  return report;
}

}  // namespace portdecomp
