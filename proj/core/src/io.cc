#include "portdecomp/io.h"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace portdecomp {
namespace {

Json MatrixRowMajor(const Eigen::MatrixXd& m) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) out.push_back(m(i, j));
  }
  return out;
}

Eigen::MatrixXd ReadMatrix(const Json& doc, int n) {
  const Json& s = doc.at("sigma");
  Eigen::MatrixXd m(n, n);
  if (s.is_array() && static_cast<int>(s.size()) == n * n && (n == 0 || !s[0].is_array())) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) m(i, j) = s[i * n + j].get<double>();
    }
    return m;
  }
  if (s.is_array() && static_cast<int>(s.size()) == n) {
    for (int i = 0; i < n; ++i) {
      if (!s[i].is_array() || static_cast<int>(s[i].size()) != n) {
        throw std::invalid_argument("sigma rows must have n entries");
      }
      for (int j = 0; j < n; ++j) m(i, j) = s[i][j].get<double>();
    }
    return m;
  }
  throw std::invalid_argument("sigma must hold n*n numbers in row-major order");
}

template <typename Vec>
Json VectorJson(const Vec& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Json IntVector(const std::vector<int>& v) { return Json(v); }

Json Timings(const StageTimes& t) {
  return Json{{"preprocess", t.preprocess}, {"cluster", t.cluster},
              {"build", t.build},           {"solve", t.solve},
              {"aggregate", t.aggregate},   {"total", t.total}};
}

}  // namespace

Json NumberOrNull(double value) {
  if (!std::isfinite(value)) return nullptr;
  return value;
}

Json ProblemToJson(const Problem& problem, int observations) {
  Json out;
  if (const auto* c = std::get_if<CardinalityProblem>(&problem)) {
    out["n"] = c->num_assets();
    out["kind"] = "cardinality";
    out["sigma"] = MatrixRowMajor(c->sigma);
    out["mu"] = VectorJson(c->mu);
    out["q"] = c->q;
    out["d"] = c->d;
  } else {
    const auto& q = std::get<QuadraticProblem>(problem);
    out["n"] = q.num_assets();
    out["kind"] = "quadratic";
    out["sigma"] = MatrixRowMajor(q.sigma);
    out["x_b"] = VectorJson(q.baseline);
    out["a"] = q.budget;
    out["m"] = q.upper;
  }
  if (observations > 0) out["T"] = observations;
  return out;
}

PipelineInput ProblemFromJson(const Json& doc) {
  const int n = doc.at("n").get<int>();
  if (n < 1) throw std::invalid_argument("n must be positive");
  const std::string kind = doc.at("kind").get<std::string>();
  PipelineInput input;
  input.observations = doc.contains("T") ? doc.at("T").get<int>() : 0;
  const Eigen::MatrixXd sigma = ReadMatrix(doc, n);
  if (kind == "cardinality") {
    const auto mu = doc.at("mu").get<std::vector<double>>();
    if (static_cast<int>(mu.size()) != n) throw std::invalid_argument("mu must have n entries");
    CardinalityProblem p;
    p.sigma = sigma;
    p.mu = Eigen::Map<const Eigen::VectorXd>(mu.data(), n);
    p.q = doc.at("q").get<double>();
    p.d = doc.at("d").get<double>();
    p.Validate();
    input.problem = p;
  } else if (kind == "quadratic") {
    const auto xb = doc.at("x_b").get<std::vector<int>>();
    if (static_cast<int>(xb.size()) != n) throw std::invalid_argument("x_b must have n entries");
    QuadraticProblem p;
    p.sigma = sigma;
    p.baseline = Eigen::Map<const Eigen::VectorXi>(xb.data(), n);
    p.budget = doc.at("a").get<double>();
    p.upper = doc.at("m").get<int>();
    p.Validate();
    input.problem = p;
  } else {
    throw std::invalid_argument("unknown problem kind: " + kind);
  }
  return input;
}

Json CovarianceToJson(const Eigen::MatrixXd& sigma, int observations) {
  return Json{{"n", sigma.rows()},
              {"kind", "covariance"},
              {"sigma", MatrixRowMajor(sigma)},
              {"T", observations}};
}

CovarianceModel CovarianceFromJson(const Json& doc) {
  const int n = doc.at("n").get<int>();
  const int days = doc.contains("T") ? doc.at("T").get<int>() : 0;
  return CovarianceFromSigma(ReadMatrix(doc, n), days);
}

Json SolveReportToJson(const SolveReport& r, bool include_timings) {
  Json out;
  out["status"] = ToString(r.status);
  out["x"] = VectorJson(r.x);
  out["objective"] = NumberOrNull(r.objective);
  out["best_bound"] = NumberOrNull(r.best_bound);
  out["mip_gap"] = NumberOrNull(r.mip_gap);
  out["nodes_explored"] = r.nodes_explored;
  if (include_timings) out["wall_time_s"] = r.wall_time_s;
  return out;
}

Json PartitionToJson(const ClusterResult& result, double modularity,
                     bool include_trace) {
  Json out;
  out["labels"] = IntVector(result.partition.labels);
  out["sizes"] = IntVector(result.partition.Sizes());
  out["Qc"] = modularity;
  if (result.forced_splits > 0) out["forced_splits"] = result.forced_splits;
  if (include_trace) {
    Json trace = Json::array();
    for (const SplitTraceEntry& e : result.trace) {
      trace.push_back(Json{{"size", e.size},
                           {"gain", e.gain},
                           {"accepted", e.accepted},
                           {"threshold", e.threshold_phase},
                           {"Qc", e.modularity_after}});
    }
    out["trace"] = trace;
  }
  return out;
}

Json PlanToJson(const DecompositionPlan& plan) {
  Json out;
  out["kind"] = plan.kind == ProblemKind::kCardinality ? "cardinality" : "quadratic";
  out["n"] = plan.num_assets;
  out["labels"] = IntVector(plan.partition.labels);
  if (plan.kind == ProblemKind::kCardinality) {
    out["target"] = plan.cardinality_target;
    out["q_prime"] = plan.q_prime;
  } else {
    out["r"] = plan.r;
    out["suppression"] = plan.suppression;
    out["budget"] = plan.budget;
    out["applied_budget"] = plan.applied_budget;
  }
  Json subs = Json::array();
  for (const SubproblemSpec& s : plan.subproblems) {
    Json sub;
    sub["community"] = s.community_id;
    sub["index_map"] = IntVector(s.index_map);
    if (plan.kind == ProblemKind::kCardinality) {
      sub["target"] = s.meta.target;
      sub["q_prime"] = s.meta.q_prime;
    } else {
      sub["weight"] = s.meta.weight;
      sub["local_budget"] = s.meta.local_budget;
    }
    sub["objective"] = Json{{"A", MatrixRowMajor(s.miqcqp.objective().A)},
                            {"b", VectorJson(s.miqcqp.objective().b)},
                            {"kappa", s.miqcqp.objective().kappa}};
    Json cons = Json::array();
    for (const QuadraticForm& c : s.miqcqp.constraints()) {
      cons.push_back(Json{{"A", MatrixRowMajor(c.A)}, {"b", VectorJson(c.b)}, {"kappa", c.kappa}});
    }
    sub["constraints"] = cons;
    sub["upper_bounds"] = VectorJson(s.miqcqp.upper_bounds());
    subs.push_back(sub);
  }
  out["subproblems"] = subs;
  return out;
}

Json PipelineReportToJson(const PipelineReport& r, bool include_timings) {
  Json out;
  out["kind"] = r.kind == ProblemKind::kCardinality ? "cardinality" : "quadratic";
  out["x"] = VectorJson(r.x);
  out["objective"] = NumberOrNull(r.objective);
  out["feasible"] = r.feasible;
  Json violations = Json::array();
  for (const Violation& v : r.violations) {
    violations.push_back(Json{{"constraint", v.constraint}, {"slack", v.slack}});
  }
  out["violations"] = violations;
  out["mp"] = Json{{"sigma2", r.mp.sigma2}, {"beta", r.mp.beta},
                   {"lambda_plus", r.lambda_plus}};
  out["num_signal"] = r.num_signal;
  out["num_communities"] = r.num_communities;
  out["largest_community"] = r.largest_community;
  out["size_reduction"] = r.size_reduction;
  out["labels"] = IntVector(r.labels);
  if (r.forced_splits > 0) out["forced_splits"] = r.forced_splits;
  if (r.suppression) out["suppression"] = *r.suppression;
  if (r.psd_certificate) out["psd_certificate"] = *r.psd_certificate;
  if (r.gap_bound) out["gap_bound"] = NumberOrNull(*r.gap_bound);
  Json subs = Json::array();
  for (const SolveReport& s : r.subproblems) subs.push_back(SolveReportToJson(s, include_timings));
  out["subproblems"] = subs;
  if (r.direct) out["direct"] = SolveReportToJson(*r.direct, include_timings);
  if (r.relative_drop) out["relative_drop"] = NumberOrNull(*r.relative_drop);
  if (include_timings) {
    out["times"] = Timings(r.times);
    out["tts_sequential_s"] = r.solve_time_sequential;
    out["tts_wall_s"] = r.times.solve;
  }
  return out;
}

Json BenchSummaryToJson(const std::vector<BenchSummaryEntry>& summary) {
  Json out = Json::array();
  for (const BenchSummaryEntry& e : summary) {
    out.push_back(Json{{"n", e.n},
                       {"method", e.method},
                       {"count", e.count},
                       {"median_H", NumberOrNull(e.median_objective)},
                       {"median_tts_s", NumberOrNull(e.median_tts_s)},
                       {"mad_tts_s", NumberOrNull(e.mad_tts_s)},
                       {"median_drop", NumberOrNull(e.median_drop)},
                       {"median_largest_fraction", NumberOrNull(e.median_largest_fraction)},
                       {"timeouts", e.timeouts}});
  }
  return out;
}

Json ReadJsonFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw IoError("malformed JSON in " + path + ": " + e.what());
  }
}

void WriteTextFile(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << text;
  if (!out) throw IoError("failed writing " + path);
}

}  // namespace portdecomp
