// Command-line front end: instance generation, spectrum export, clustering,
// solving, pipeline runs and benchmark sweeps.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "portdecomp/bench.h"
#include "portdecomp/clustering.h"
#include "portdecomp/data.h"
#include "portdecomp/io.h"
#include "portdecomp/linalg.h"
#include "portdecomp/logging.h"
#include "portdecomp/pipeline.h"
#include "portdecomp/random.h"
#include "portdecomp/rmt.h"
#include "portdecomp/solver.h"

namespace portdecomp {
namespace {

constexpr int kExitInfeasible = 2;
constexpr int kExitTimeout = 3;
constexpr int kExitUsage = 64;
constexpr int kExitIo = 74;

// Reads option defaults from a JSON object. Nested objects address
// subcommands, e.g. {"seed": 3, "pipeline": {"run": {"phi": 30}}}.
class JsonConfig : public CLI::Config {
 public:
  std::string to_config(const CLI::App*, bool, bool, std::string) const override {
    return {};
  }

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    Json doc;
    try {
      doc = Json::parse(input);
    } catch (const Json::parse_error& e) {
      throw CLI::ConversionError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw CLI::ConversionError("config must be a JSON object");
    std::vector<CLI::ConfigItem> items;
    Flatten(doc, {}, items);
    return items;
  }

 private:
  static std::string Scalar(const Json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    return v.dump();
  }

  static void Flatten(const Json& obj, const std::vector<std::string>& parents,
                      std::vector<CLI::ConfigItem>& items) {
    for (const auto& [key, value] : obj.items()) {
      if (value.is_object()) {
        std::vector<std::string> next = parents;
        next.push_back(key);
        Flatten(value, next, items);
        continue;
      }
      CLI::ConfigItem item;
      item.parents = parents;
      item.name = key;
      if (value.is_array()) {
        for (const Json& e : value) item.inputs.push_back(Scalar(e));
      } else {
        item.inputs.push_back(Scalar(value));
      }
      items.push_back(item);
    }
  }
};

struct GlobalOptions {
  std::uint64_t seed = 0;
  int threads = 1;
  std::string output;
};

// Machine output goes to --output when given, otherwise to stdout. The
// human summary is printed only when stdout is not carrying machine output.
void Emit(const GlobalOptions& g, const std::string& text) {
  if (g.output.empty()) {
    std::cout << text;
    std::cout.flush();
  } else {
    WriteTextFile(g.output, text);
  }
}

void Summary(const GlobalOptions& g, const std::string& line) {
  if (!g.output.empty()) std::cout << line << "\n";
}

std::string Dump(const Json& doc) { return doc.dump(2) + "\n"; }

std::string Fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

// A covariance matrix loaded from a covariance/problem JSON or a returns CSV.
struct MatrixInput {
  Eigen::MatrixXd sigma;
  int days = 0;
};

MatrixInput LoadMatrix(const std::string& json_path, const std::string& returns_path,
                       bool demean) {
  if (json_path.empty() == returns_path.empty()) {
    throw std::invalid_argument("give exactly one of --input and --returns");
  }
  MatrixInput out;
  if (!returns_path.empty()) {
    if (!std::ifstream(returns_path)) throw IoError("cannot open " + returns_path);
    const LoadedReturns loaded = LoadReturnsCsv(returns_path);
    if (!loaded.dropped.empty()) {
      LogWarn("dropped " + std::to_string(loaded.dropped.size()) +
              " assets with missing cells");
    }
    const CovarianceModel cov = SampleCovariance(loaded.returns, demean);
    out.sigma = cov.sigma;
    out.days = cov.observations;
    return out;
  }
  const Json doc = ReadJsonFile(json_path);
  if (doc.value("kind", "") == "covariance") {
    const CovarianceModel cov = CovarianceFromJson(doc);
    out.sigma = cov.sigma;
    out.days = cov.observations;
  } else {
    const PipelineInput input = ProblemFromJson(doc);
    out.sigma = std::visit([](const auto& p) { return p.sigma; }, input.problem);
    out.days = input.observations;
  }
  return out;
}

PipelineInput LoadProblem(const std::string& path) {
  return ProblemFromJson(ReadJsonFile(path));
}

MpFitMode ParseMpMode(const std::string& name) {
  if (name == "fixed") return MpFitMode::kFixed;
  if (name == "fit") return MpFitMode::kFit;
  throw std::invalid_argument("unknown mp mode: " + name);
}

// ---------------------------------------------------------------- generate

struct GenerateOptions {
  std::string kind = "block";
  int n = 0;
  int k = 0;
  double rho_in = 0.6;
  double rho_out = 0.1;
  int days = 0;
  std::string problem = "none";
  double mu_scale = 3.0;
  double q = 1.0;
  double d = 0.5;
  double r = 0.9;
  int m = 1;
  std::string labels;
};

int RunGenerate(const GlobalOptions& g, const GenerateOptions& o) {
  const int n = o.n;
  Eigen::MatrixXd sigma;
  std::vector<int> labels;
  int days = o.days;
  int blocks = 1;
  if (o.kind == "block") {
    blocks = o.k > 0 ? o.k : std::max(1, n / 30);
    if (days <= 0) days = 50 * n;
    const BlockModel model = GenerateBlockModel(n, blocks, o.rho_in, o.rho_out, days,
                                                DeriveSeed(g.seed, "generate.covariance"));
    sigma = model.covariance.sigma;
    labels = model.planted_labels;
  } else if (o.kind == "wishart") {
    if (days <= 0) days = 4 * n;
    sigma = GenerateWishart(n, days, DeriveSeed(g.seed, "generate.covariance")).sigma;
  } else {
    throw std::invalid_argument("unknown covariance kind: " + o.kind);
  }

  Json doc;
  if (o.problem == "none") {
    doc = CovarianceToJson(sigma, days);
  } else if (o.problem == "cardinality") {
    const Eigen::VectorXd mu =
        GenerateExpectedReturns(n, DeriveSeed(g.seed, "generate.mu"), o.mu_scale);
    CardinalityProblem p{sigma, mu, o.q, o.d};
    p.Validate();
    doc = ProblemToJson(p, days);
  } else if (o.problem == "quadratic") {
    Rng rng = MakeRng(DeriveSeed(g.seed, "generate.baseline"));
    std::uniform_int_distribution<int> holding(0, o.m);
    Eigen::VectorXi baseline(n);
    for (int i = 0; i < n; ++i) baseline(i) = holding(rng);
    if (baseline.sum() == 0) baseline(0) = o.m;
    QuadraticProblem p{sigma, baseline, 0.0, o.m};
    p.budget = o.r * p.BaselineRisk();
    p.Validate();
    doc = ProblemToJson(p, days);
  } else {
    throw std::invalid_argument("unknown problem kind: " + o.problem);
  }
  Emit(g, Dump(doc));

  std::string labels_path = o.labels;
  if (labels_path.empty() && !g.output.empty() && !labels.empty()) {
    labels_path = g.output + ".labels.json";
  }
  if (!labels_path.empty()) {
    if (labels.empty()) labels.assign(n, 0);
    WriteTextFile(labels_path, Dump(Json{{"labels", labels}, {"k", blocks}}));
  }
  Summary(g, "generated " + o.kind + " covariance n=" + std::to_string(n) +
                 " T=" + std::to_string(days) +
                 (o.kind == "block" ? " K=" + std::to_string(blocks) : std::string()));
  return 0;
}

// ---------------------------------------------------------------- spectrum

struct InputOptions {
  std::string input;
  std::string returns;
  bool no_demean = false;
  std::string mp_mode = "fixed";
};

void AddInputOptions(CLI::App* cmd, InputOptions& o) {
  cmd->add_option("--input", o.input, "Covariance or problem JSON");
  cmd->add_option("--returns", o.returns, "Returns CSV (rows = dates, one column per asset)");
  cmd->add_flag("--no-demean", o.no_demean, "Do not subtract per-asset means from returns");
  cmd->add_option("--mp-mode", o.mp_mode, "Noise model: fixed (sigma2=1, beta=n/T) or fit")
      ->check(CLI::IsMember({"fixed", "fit"}));
}

struct SpectrumOptions {
  InputOptions in;
  int bins = 40;
  std::string fit_output;
};

int RunSpectrum(const GlobalOptions& g, const SpectrumOptions& o) {
  const MatrixInput m = LoadMatrix(o.in.input, o.in.returns, !o.in.no_demean);
  const int n = static_cast<int>(m.sigma.rows());
  const int days = m.days > 0 ? m.days : n;
  const CovarianceModel cov = CovarianceFromSigma(m.sigma, days);
  const SymmetricEigen eig = SymEig(cov.corr);
  std::vector<double> values(eig.values.data(), eig.values.data() + n);
  const MpFit fit = FitMarchenkoPastur(values, n, days, ParseMpMode(o.in.mp_mode));
  const MpEdges edges = MpSupport(fit.params);

  const double lo = values.back();
  const double hi = values.front();
  const double width = hi > lo ? (hi - lo) / o.bins : 1.0;
  std::vector<int> counts(o.bins, 0);
  for (double v : values) {
    const int b = std::min(o.bins - 1, static_cast<int>((v - lo) / width));
    ++counts[b];
  }
  std::ostringstream csv;
  csv << "lambda,count\n";
  char buf[64];
  for (int b = 0; b < o.bins; ++b) {
    std::snprintf(buf, sizeof(buf), "%.10g,%d\n", lo + (b + 0.5) * width, counts[b]);
    csv << buf;
  }
  Emit(g, csv.str());

  if (!o.fit_output.empty()) {
    const Json doc{{"n", n},
                   {"T", days},
                   {"sigma2", fit.params.sigma2},
                   {"beta", fit.params.beta},
                   {"lambda_minus", edges.lower},
                   {"lambda_plus", edges.upper},
                   {"bulk_count", fit.bulk_count},
                   {"fell_back", fit.fell_back},
                   {"eigenvalues", values}};
    WriteTextFile(o.fit_output, Dump(doc));
  }
  int above = 0;
  for (double v : values) above += v > edges.upper ? 1 : 0;
  Summary(g, "sigma2=" + Fmt(fit.params.sigma2) + " beta=" + Fmt(fit.params.beta) +
                 " support=[" + Fmt(edges.lower) + ", " + Fmt(edges.upper) + "] " +
                 std::to_string(above) + " eigenvalues above the bulk");
  return 0;
}

// ----------------------------------------------------------------- cluster

struct ClusterOptions {
  int phi = 0;
  std::string pop = "fifo";
  double gain_tolerance = 1e-12;
};

void AddClusterOptions(CLI::App* cmd, ClusterOptions& o) {
  cmd->add_option("--phi", o.phi, "Size threshold; 0 disables the thresholded variant")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--pop", o.pop, "Work-list order")
      ->check(CLI::IsMember({"fifo", "uniform", "size_proportional", "largest"}));
  cmd->add_option("--gain-tol", o.gain_tolerance, "Minimum modularity gain for a split");
}

ClusterConfig MakeClusterConfig(const GlobalOptions& g, const ClusterOptions& o) {
  ClusterConfig c;
  if (o.phi > 0) c.threshold_phi = o.phi;
  c.pop_strategy = ParsePopStrategy(o.pop);
  c.gain_tolerance = o.gain_tolerance;
  c.seed = g.seed;
  return c;
}

struct ClusterCommand {
  InputOptions in;
  ClusterOptions cluster;
  bool trace = false;
};

int RunCluster(const GlobalOptions& g, const ClusterCommand& o) {
  const MatrixInput m = LoadMatrix(o.in.input, o.in.returns, !o.in.no_demean);
  const Preprocessed pre = Preprocess(m.sigma, m.days, ParseMpMode(o.in.mp_mode));
  const ClusterResult result = Cluster(pre.split.c_star, MakeClusterConfig(g, o.cluster));
  const double qc =
      Modularity(pre.split.c_star, result.partition.labels, result.partition.gamma);
  Emit(g, Dump(PartitionToJson(result, qc, o.trace)));
  Summary(g, std::to_string(result.partition.num_communities()) +
                 " communities, largest " + std::to_string(result.partition.LargestSize()) +
                 ", Qc=" + Fmt(qc));
  return 0;
}

// ------------------------------------------------------------ solve / run

struct SolveOptions {
  std::string input;
  std::string mode = "direct";
  double mip_gap = 1e-4;
  double timeout = 0.0;
  std::string branch_order = "most_fractional";
  bool timings = false;
  std::string emit_plan;
};

SolverConfig MakeSolverConfig(const SolveOptions& o) {
  SolverConfig c;
  c.mip_gap_target = o.mip_gap;
  if (o.timeout > 0) c.timeout_s = o.timeout;
  c.branch_order = ParseBranchOrder(o.branch_order);
  return c;
}

void AddSolveOptions(CLI::App* cmd, SolveOptions& o) {
  cmd->add_option("--input", o.input, "Problem JSON")->required();
  cmd->add_option("--mip-gap", o.mip_gap, "Relative MIP gap target")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--timeout", o.timeout, "Solver time limit in seconds (0 = none)")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--branch-order", o.branch_order, "Branching variable rule")
      ->check(CLI::IsMember({"most_fractional", "index"}));
  cmd->add_flag("--timings", o.timings, "Include wall-clock fields in the report");
  cmd->add_option("--emit-plan", o.emit_plan, "Write the decomposition plan JSON here");
}

int DirectExitCode(const SolveReport& r) {
  if (r.status == SolveStatus::kInfeasible) return kExitInfeasible;
  if (r.status == SolveStatus::kTimeout) return kExitTimeout;
  return 0;
}

int PipelineExitCode(const PipelineReport& r) {
  if (!r.feasible) return kExitInfeasible;
  for (const SolveReport& s : r.subproblems) {
    if (s.status == SolveStatus::kTimeout) return kExitTimeout;
  }
  return 0;
}

struct RunOptions {
  SolveOptions solve;
  InputOptions in;  // only mp_mode is used
  ClusterOptions cluster;
  double r = 0.9;
  std::string weights = "quadratic_form";
  double suppression = 0.0;
  bool parallel = false;
  bool direct = false;
};

int RunPipeline(const GlobalOptions& g, const RunOptions& o) {
  const PipelineInput input = LoadProblem(o.solve.input);
  PipelineConfig config;
  config.mp_mode = ParseMpMode(o.in.mp_mode);
  config.cluster = MakeClusterConfig(g, o.cluster);
  config.solver = MakeSolverConfig(o.solve);
  config.quadratic.r = o.r;
  config.quadratic.weight_rule =
      o.weights == "node_ratio" ? WeightRule::kNodeRatio : WeightRule::kQuadraticForm;
  if (o.suppression > 0) config.quadratic.suppression_override = o.suppression;
  config.threads = g.threads;
  config.parallel_subproblems = o.parallel || g.threads > 1;
  config.run_direct = o.direct;
  config.direct_solver = MakeSolverConfig(o.solve);

  const PipelineReport report = RunDecomposed(input, config);
  if (!o.solve.emit_plan.empty()) WriteTextFile(o.solve.emit_plan, Dump(PlanToJson(report.plan)));
  Emit(g, Dump(PipelineReportToJson(report, o.solve.timings)));
  std::string line = "H=" + Fmt(report.objective) +
                     (report.feasible ? " feasible" : " INFEASIBLE") + ", K=" +
                     std::to_string(report.num_communities) + ", largest " +
                     std::to_string(report.largest_community);
  if (report.relative_drop) line += ", drop vs direct " + Fmt(*report.relative_drop);
  Summary(g, line);
  return PipelineExitCode(report);
}

int RunSolve(const GlobalOptions& g, const RunOptions& o) {
  if (o.solve.mode == "decomposed") return RunPipeline(g, o);
  if (!o.solve.emit_plan.empty()) {
    throw std::invalid_argument("--emit-plan needs --mode decomposed");
  }
  const PipelineInput input = LoadProblem(o.solve.input);
  const SolveReport report = RunDirect(input.problem, MakeSolverConfig(o.solve));
  Emit(g, Dump(SolveReportToJson(report, o.solve.timings)));
  Summary(g, "status=" + ToString(report.status) + " H=" + Fmt(report.objective) +
                 " gap=" + Fmt(report.mip_gap) + " nodes=" +
                 std::to_string(report.nodes_explored));
  return DirectExitCode(report);
}

// ------------------------------------------------------------------- bench

struct BenchOptions {
  std::string kind = "cardinality";
  std::string source = "block";
  std::string sizes;
  BenchSpec spec;
  std::string summary;
  bool no_timings = false;
};

void AddBenchOptions(CLI::App* cmd, BenchOptions& o) {
  BenchSpec& s = o.spec;
  cmd->add_option("--kind", o.kind, "Problem class")
      ->check(CLI::IsMember({"cardinality", "quadratic"}));
  cmd->add_option("--source", o.source, "Covariance family")
      ->check(CLI::IsMember({"block", "wishart"}));
  cmd->add_option("--sizes", o.sizes, "start:stop:step or a single size")->required();
  cmd->add_option("--seeds", s.num_seeds, "Seeds 0..S-1 per size")->check(CLI::PositiveNumber);
  cmd->add_option("--block-size", s.block_size, "Assets per planted block")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--rho-in", s.rho_in, "Within-block correlation");
  cmd->add_option("--rho-out", s.rho_out, "Between-block correlation");
  cmd->add_option("--days-per-asset", s.days_per_asset, "Sample length per asset")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--mu-scale", s.mu_scale, "Scale of the expected returns");
  cmd->add_option("--q", s.q, "Risk aversion");
  cmd->add_option("--d", s.d, "Cardinality fraction");
  cmd->add_option("--r", s.r, "Budget fraction of the baseline risk");
  cmd->add_option("--m", s.upper, "Upper bound on integer holdings")->check(CLI::PositiveNumber);
  cmd->add_option("--phi", s.threshold_phi, "Threshold for the thresholded variant")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--loose-gap", s.loose_gap, "Gap target of the second direct run")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--cell-timeout", s.cell_timeout_s, "Per-solve time limit in seconds")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--summary", o.summary, "Write per-size medians as JSON here");
  cmd->add_flag("--no-timings", o.no_timings, "Write 0 in the tts_s column");
}

int RunBench(const GlobalOptions& g, BenchOptions o) {
  BenchSpec spec = o.spec;
  spec.kind = o.kind == "quadratic" ? ProblemKind::kQuadratic : ProblemKind::kCardinality;
  spec.source = o.source == "wishart" ? CovarianceSource::kWishart : CovarianceSource::kBlock;
  spec.sizes = ParseSizeRange(o.sizes);
  spec.root_seed = g.seed;
  spec.threads = g.threads;

  std::vector<BenchRow> rows = RunBenchSweep(spec);
  if (o.no_timings) {
    for (BenchRow& row : rows) row.tts_s = row.wall_s = 0.0;
  }
  std::string csv = BenchCsvHeader() + "\n";
  int timeouts = 0;
  bool infeasible = false;
  for (const BenchRow& row : rows) {
    csv += BenchCsvLine(row) + "\n";
    timeouts += row.timeout ? 1 : 0;
    if (row.method.rfind("decomposed", 0) == 0 && !row.feasible) infeasible = true;
  }
  Emit(g, csv);
  const std::vector<BenchSummaryEntry> summary = SummarizeBench(rows);
  if (!o.summary.empty()) WriteTextFile(o.summary, Dump(BenchSummaryToJson(summary)));
  for (const BenchSummaryEntry& e : summary) {
    Summary(g, "n=" + std::to_string(e.n) + " " + e.method + ": median H " +
                   Fmt(e.median_objective) + ", median tts " + Fmt(e.median_tts_s) +
                   " s, median drop " + Fmt(e.median_drop) + ", timeouts " +
                   std::to_string(e.timeouts));
  }
  if (infeasible) return kExitInfeasible;
  if (2 * timeouts > static_cast<int>(rows.size())) return kExitTimeout;
  return 0;
}

int Main(int argc, char** argv) {
  InitLoggingFromEnv();
  CLI::App app{"Portfolio optimization by noise filtering, community detection and "
               "decomposed branch and bound."};
  app.name("portdecomp");
  app.require_subcommand(1);
  app.fallthrough();
  app.config_formatter(std::make_shared<JsonConfig>());
  app.set_config("--config", "", "JSON file with option defaults");

  GlobalOptions g;
  app.add_option("--seed", g.seed, "Root seed for every random stream");
  app.add_option("--threads", g.threads, "Worker threads for subproblem solves")
      ->check(CLI::PositiveNumber);
  app.add_option("--output", g.output, "Write machine output here instead of stdout");

  GenerateOptions gen;
  CLI::App* generate = app.add_subcommand("generate", "Generate a synthetic covariance or problem");
  generate->add_option("--kind", gen.kind, "Covariance family")
      ->check(CLI::IsMember({"block", "wishart"}));
  generate->add_option("--n", gen.n, "Number of assets")->required()->check(CLI::Range(2, 1 << 20));
  generate->add_option("--k", gen.k, "Planted blocks (default n/30)")->check(CLI::NonNegativeNumber);
  generate->add_option("--rho-in", gen.rho_in, "Within-block correlation");
  generate->add_option("--rho-out", gen.rho_out, "Between-block correlation");
  generate->add_option("--days", gen.days, "Sample length T (default 50n block, 4n wishart)")
      ->check(CLI::NonNegativeNumber);
  generate->add_option("--problem", gen.problem, "Wrap the covariance in a problem")
      ->check(CLI::IsMember({"none", "cardinality", "quadratic"}));
  generate->add_option("--mu-scale", gen.mu_scale, "Scale of the expected returns");
  generate->add_option("--q", gen.q, "Risk aversion");
  generate->add_option("--d", gen.d, "Cardinality fraction");
  generate->add_option("--m", gen.m, "Upper bound on integer holdings")->check(CLI::PositiveNumber);
  generate->add_option("--r", gen.r, "Budget fraction of the baseline risk");
  generate->add_option("--labels", gen.labels,
                       "Planted labels JSON (default <output>.labels.json)");

  SpectrumOptions spec_opts;
  CLI::App* spectrum = app.add_subcommand("spectrum", "Eigenvalue histogram and noise fit");
  AddInputOptions(spectrum, spec_opts.in);
  spectrum->add_option("--bins", spec_opts.bins, "Histogram bins")->check(CLI::PositiveNumber);
  spectrum->add_option("--fit-output", spec_opts.fit_output, "Write the fit JSON here");

  ClusterCommand cluster_opts;
  CLI::App* cluster = app.add_subcommand("cluster", "Community detection on the filtered correlation");
  AddInputOptions(cluster, cluster_opts.in);
  AddClusterOptions(cluster, cluster_opts.cluster);
  cluster->add_flag("--trace", cluster_opts.trace, "Include the split trace");

  RunOptions solve_opts;
  CLI::App* solve = app.add_subcommand("solve", "Solve a problem directly or by decomposition");
  AddSolveOptions(solve, solve_opts.solve);
  solve->add_option("--mode", solve_opts.solve.mode, "direct or decomposed")
      ->check(CLI::IsMember({"direct", "decomposed"}));

  RunOptions run_opts;
  CLI::App* pipeline = app.add_subcommand("pipeline", "Decomposition pipeline");
  pipeline->require_subcommand(1);
  CLI::App* run = pipeline->add_subcommand("run", "Run the pipeline on one problem");
  AddSolveOptions(run, run_opts.solve);
  run->add_option("--mp-mode", run_opts.in.mp_mode, "Noise model: fixed or fit")
      ->check(CLI::IsMember({"fixed", "fit"}));
  AddClusterOptions(run, run_opts.cluster);
  run->add_option("--r", run_opts.r, "Budget fraction for quadratic plans");
  run->add_option("--weights", run_opts.weights, "Budget weights")
      ->check(CLI::IsMember({"quadratic_form", "node_ratio"}));
  run->add_option("--suppression", run_opts.suppression, "Override the suppression factor")
      ->check(CLI::NonNegativeNumber);
  run->add_flag("--parallel", run_opts.parallel, "Solve subproblems concurrently");
  run->add_flag("--direct", run_opts.direct, "Also solve the full problem and report the drop");

  BenchOptions pipeline_bench_opts;
  CLI::App* pipeline_bench = pipeline->add_subcommand("bench", "Benchmark sweep (same as bench)");
  AddBenchOptions(pipeline_bench, pipeline_bench_opts);

  BenchOptions bench_opts;
  CLI::App* bench = app.add_subcommand("bench", "Benchmark sweep of direct and decomposed solves");
  AddBenchOptions(bench, bench_opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::FileError& e) {
    std::cerr << e.what() << "\n";
    return kExitIo;
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*generate) return RunGenerate(g, gen);
    if (*spectrum) return RunSpectrum(g, spec_opts);
    if (*cluster) return RunCluster(g, cluster_opts);
    if (*solve) return RunSolve(g, solve_opts);
    if (*run) return RunPipeline(g, run_opts);
    if (*pipeline_bench) return RunBench(g, pipeline_bench_opts);
    if (*bench) return RunBench(g, bench_opts);
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const Json::exception& e) {
    std::cerr << "error: unreadable input: " << e.what() << "\n";
    return kExitIo;
  } catch (const PipelineError& e) {
    std::cerr << "error in stage " << e.stage() << ": " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kExitUsage;
}

}  // namespace
}  // namespace portdecomp

int main(int argc, char** argv) { return portdecomp::Main(argc, argv); }
