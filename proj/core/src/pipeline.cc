#include "portdecomp/pipeline.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <mutex>
#include <thread>

#include "portdecomp/linalg.h"
#include "portdecomp/logging.h"

namespace portdecomp {
namespace {

using Clock = std::chrono::steady_clock;

double Since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

template <typename F>
auto Stage(const char* name, F&& body) -> decltype(body()) {
  try {
    return body();
  } catch (const PipelineError&) {
    throw;
  } catch (const std::exception& e) {
    throw PipelineError(name, e.what());
  }
}

const Eigen::MatrixXd& SigmaOf(const Problem& problem) {
  return std::visit([](const auto& p) -> const Eigen::MatrixXd& { return p.sigma; },
                    problem);
}

// Rounded-down continuous optimum; feasible whenever Σ has nonnegative
// entries and always a cheap first incumbent to try.
Eigen::VectorXi KktWarmStart(const Eigen::MatrixXd& sigma,
                             const Eigen::VectorXi& baseline, double budget,
                             int upper) {
  if (!(budget > 0)) return Eigen::VectorXi::Zero(baseline.size());
  const KktSolution kkt = KktContinuous(sigma, baseline.cast<double>(), budget);
  Eigen::VectorXi x(baseline.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    x(i) = std::clamp(static_cast<int>(std::floor(kkt.x(i) + 1e-12)), 0, upper);
  }
  return x;
}

std::vector<SolveReport> SolveAll(const DecompositionPlan& plan,
                                  const QuadraticProblem* quad,
                                  const SolverConfig& solver, bool parallel,
                                  int threads) {
  const size_t k = plan.subproblems.size();
  std::vector<SolveReport> reports(k);
  auto solve_one = [&](size_t c) {
    const SubproblemSpec& spec = plan.subproblems[c];
    Eigen::VectorXi warm;
    if (quad != nullptr) {
      Eigen::VectorXi baseline(spec.index_map.size());
      for (size_t i = 0; i < spec.index_map.size(); ++i) {
        baseline(static_cast<Eigen::Index>(i)) = quad->baseline(spec.index_map[i]);
      }
      warm = KktWarmStart(PrincipalSubmatrix(quad->sigma, spec.index_map), baseline,
                          spec.meta.local_budget, quad->upper);
    }
    reports[c] = Solve(spec.miqcqp, solver, warm);
  };
  const int workers = parallel ? std::max(1, std::min<int>(threads, static_cast<int>(k))) : 1;
  if (workers == 1) {
    for (size_t c = 0; c < k; ++c) solve_one(c);
    return reports;
  }
  std::atomic<size_t> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr failure;
  std::mutex failure_mutex;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (size_t c = next++; c < k; c = next++) {
        try {
          solve_one(c);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return reports;
}

}  // namespace

PipelineError::PipelineError(std::string stage, const std::string& message)
    : std::runtime_error(stage + ": " + message), stage_(std::move(stage)) {}

double RelativeDrop(double h_direct, double h_decomposed) {
  const double diff = h_decomposed - h_direct;
  return h_direct == 0.0 ? diff : diff / std::abs(h_direct);
}

double MinBlockNorm(const Eigen::MatrixXd& sigma, const Partition& partition) {
  double gamma = std::numeric_limits<double>::infinity();
  for (const auto& c : partition.communities) {
    gamma = std::min(gamma, SymmetricSpectralNorm(PrincipalSubmatrix(sigma, c)));
  }
  return gamma;
}

double DecompositionGapBound(const Eigen::MatrixXd& sigma,
                     const Eigen::MatrixXd& sigma_prime,
                     const Eigen::VectorXd& mu, double q, int num_blocks,
                     double gamma) {
  const double lo = MinEigenvalue(sigma);
  if (!(lo > 0)) throw std::invalid_argument("covariance is singular");
  if (!(gamma > 0)) throw std::invalid_argument("block norm must be positive");
  const double inv_norm = 1.0 / lo;
  const double ratio = num_blocks * SymmetricSpectralNorm(sigma - sigma_prime) / gamma;
  return inv_norm * mu.squaredNorm() / (4.0 * q) * ratio * ratio;
}

Preprocessed Preprocess(const Eigen::MatrixXd& sigma, int days, MpFitMode mode) {
  const int n = static_cast<int>(sigma.rows());
  if (days <= 0) days = n;
  Preprocessed out;
  out.covariance = Stage("preprocess", [&] { return CovarianceFromSigma(sigma, days); });
  out.fit = Stage("fit", [&] {
    const SymmetricEigen eig = SymEig(out.covariance.corr);
    std::vector<double> values(eig.values.data(), eig.values.data() + n);
    return FitMarchenkoPastur(values, n, days, mode);
  });
  out.split = Stage("split", [&] { return SplitSpectrum(out.covariance.corr, out.fit.params); });
  return out;
}

SolveReport RunDirect(const Problem& problem, const SolverConfig& config) {
  if (const auto* card = std::get_if<CardinalityProblem>(&problem)) {
    return Solve(CardinalityToMiqcqp(*card), config);
  }
  const auto& quad = std::get<QuadraticProblem>(problem);
  return Solve(QuadraticToMiqcqp(quad), config,
               KktWarmStart(quad.sigma, quad.baseline, quad.budget, quad.upper));
}

PipelineReport RunDecomposed(const PipelineInput& input,
                             const PipelineConfig& config) {
  const auto start = Clock::now();
  PipelineReport report;
  const Problem& problem = input.problem;
  report.kind = std::holds_alternative<CardinalityProblem>(problem)
                    ? ProblemKind::kCardinality
                    : ProblemKind::kQuadratic;
  const Eigen::MatrixXd& sigma = SigmaOf(problem);
  const int n = static_cast<int>(sigma.rows());

  // Preprocess: correlation, noise model and spectral split.
  auto t = Clock::now();
  Stage("preprocess", [&] {
    std::visit([](const auto& p) { p.Validate(); }, problem);
    return 0;
  });
  const Preprocessed pre = Preprocess(sigma, input.observations, config.mp_mode);
  const SpectralSplit& split = pre.split;
  report.mp = pre.fit.params;
  report.lambda_plus = split.lambda_plus;
  report.num_signal = static_cast<int>(split.signal_indices.size()) +
                      (split.eigenvalues.size() > 0 &&
                               split.eigenvalues(0) > split.lambda_plus
                           ? 1
                           : 0);
  report.times.preprocess = Since(t);

  t = Clock::now();
  const ClusterResult clusters =
      Stage("cluster", [&] { return Cluster(split.c_star, config.cluster); });
  const Partition& partition = clusters.partition;
  report.labels = partition.labels;
  report.num_communities = partition.num_communities();
  report.largest_community = partition.LargestSize();
  report.size_reduction = n > 0 ? static_cast<double>(report.largest_community) / n : 0.0;
  report.forced_splits = clusters.forced_splits;
  report.times.cluster = Since(t);

  t = Clock::now();
  const DecompositionPlan plan = Stage("build", [&] {
    if (report.kind == ProblemKind::kCardinality) {
      return BuildCardinalitySubproblems(std::get<CardinalityProblem>(problem),
                                         partition);
    }
    return BuildQuadraticSubproblems(std::get<QuadraticProblem>(problem), partition,
                                     config.quadratic);
  });
  report.plan = plan;
  report.times.build = Since(t);

  t = Clock::now();
  SolverConfig sub_config = config.solver;
  sub_config.mip_gap_target = 1e-4;
  sub_config.observer = nullptr;
  report.subproblems = Stage("solve", [&] {
    return SolveAll(plan, std::get_if<QuadraticProblem>(&problem), sub_config,
                    config.parallel_subproblems, config.threads);
  });
  report.times.solve = Since(t);
  for (const SolveReport& r : report.subproblems) report.solve_time_sequential += r.wall_time_s;

  t = Clock::now();
  report.x = Stage("aggregate", [&] {
    std::vector<Eigen::VectorXi> local;
    for (size_t c = 0; c < report.subproblems.size(); ++c) {
      if (report.subproblems[c].x.size() == 0) {
        throw std::runtime_error("community " + std::to_string(c) +
                                 " has no feasible solution");
      }
      local.push_back(report.subproblems[c].x);
    }
    return Aggregate(plan, local);
  });
  report.times.aggregate = Since(t);

  Stage("evaluate", [&] {
    const Miqcqp global = report.kind == ProblemKind::kCardinality
                              ? CardinalityToMiqcqp(std::get<CardinalityProblem>(problem))
                              : QuadraticToMiqcqp(std::get<QuadraticProblem>(problem));
    const Evaluation e = Evaluate(global, report.x);
    report.objective = e.objective;
    report.violations = e.violations;
    report.feasible = e.feasible();
    const Eigen::MatrixXd sigma_prime = BlockDiagonal(sigma, partition);
    if (report.kind == ProblemKind::kQuadratic) {
      report.suppression = plan.suppression;
      report.psd_certificate = MinEigenvalue(plan.suppression * sigma_prime - sigma);
    } else {
      const auto& card = std::get<CardinalityProblem>(problem);
      if (MinEigenvalue(sigma) > 0) {
        report.gap_bound =
            DecompositionGapBound(sigma, sigma_prime, card.mu, card.q,
                          partition.num_communities(), MinBlockNorm(sigma, partition));
      }
    }
    return 0;
  });
  if (!report.feasible) LogWarn("aggregated solution violates a global constraint");

  if (config.run_direct) {
    report.direct = Stage("direct", [&] { return RunDirect(problem, config.direct_solver); });
    report.relative_drop = RelativeDrop(report.direct->objective, report.objective);
  }
  report.times.total = Since(start);
  return report;
}

}  // namespace portdecomp
