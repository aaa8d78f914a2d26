#include "portdecomp/bench.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <stdexcept>

#include "portdecomp/data.h"
#include "portdecomp/linalg.h"
#include "portdecomp/logging.h"
#include "portdecomp/random.h"

namespace portdecomp {
namespace {

std::string Number(double v) {
  if (!std::isfinite(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

BenchRow FailedRow(int n, int seed, const std::string& method, bool timeout) {
  BenchRow row;
  row.n = n;
  row.seed = seed;
  row.method = method;
  row.objective = std::numeric_limits<double>::quiet_NaN();
  row.drop = std::numeric_limits<double>::quiet_NaN();
  row.timeout = timeout;
  row.feasible = false;
  return row;
}

}  // namespace

double Median(std::vector<double> values) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  const size_t m = values.size() / 2;
  return values.size() % 2 == 1 ? values[m] : 0.5 * (values[m - 1] + values[m]);
}

std::vector<int> ParseSizeRange(const std::string& text) {
  std::vector<int> parts;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ':')) {
    size_t used = 0;
    int value = 0;
    try {
      value = std::stoi(item, &used);
    } catch (const std::exception&) {
      throw std::invalid_argument("bad size range: " + text);
    }
    if (used != item.size()) throw std::invalid_argument("bad size range: " + text);
    parts.push_back(value);
  }
  if (parts.size() == 1) parts = {parts[0], parts[0], 1};
  if (parts.size() != 3 || parts[2] <= 0 || parts[0] > parts[1] || parts[0] < 2) {
    throw std::invalid_argument("size range must be start:stop:step with 2 <= start <= stop: " + text);
  }
  std::vector<int> sizes;
  for (int n = parts[0]; n <= parts[1]; n += parts[2]) sizes.push_back(n);
  return sizes;
}

BenchInstance MakeBenchInstance(const BenchSpec& spec, int n, int seed) {
  if (spec.sizes.empty()) throw std::invalid_argument("bench needs at least one size");
  const int pool = std::max(n, *std::max_element(spec.sizes.begin(), spec.sizes.end()));
  const int days = spec.days_per_asset * pool;
  const std::uint64_t s = static_cast<std::uint64_t>(seed);
  Eigen::MatrixXd universe;
  std::vector<int> labels;
  if (spec.source == CovarianceSource::kBlock) {
    const int blocks = std::max(1, pool / spec.block_size);
    const BlockModel model =
        GenerateBlockModel(pool, blocks, spec.rho_in, spec.rho_out, days,
                           DeriveSeed(spec.root_seed, "bench.covariance", s));
    universe = model.covariance.sigma;
    labels = model.planted_labels;
  } else {
    universe = GenerateWishart(pool, days, DeriveSeed(spec.root_seed, "bench.covariance", s))
                   .sigma;
    labels.assign(pool, 0);
  }
  const Eigen::MatrixXd sigma = universe.topLeftCorner(n, n);
  BenchInstance instance;
  instance.planted_labels.assign(labels.begin(), labels.begin() + n);
  instance.input.observations = days;
  if (spec.kind == ProblemKind::kCardinality) {
    const Eigen::VectorXd mu = GenerateExpectedReturns(
        pool, DeriveSeed(spec.root_seed, "bench.mu", s), spec.mu_scale);
    instance.input.problem = CardinalityProblem{sigma, mu.head(n), spec.q, spec.d};
  } else {
    Rng rng = MakeRng(DeriveSeed(spec.root_seed, "bench.baseline", s));
    std::uniform_int_distribution<int> holding(0, spec.upper);
    Eigen::VectorXi pool_baseline(pool);
    for (int i = 0; i < pool; ++i) pool_baseline(i) = holding(rng);
    Eigen::VectorXi baseline = pool_baseline.head(n);
    if (baseline.sum() == 0) baseline(0) = spec.upper;
    QuadraticProblem q{sigma, baseline, 0.0, spec.upper};
    q.budget = spec.r * q.BaselineRisk();
    instance.input.problem = q;
  }
  return instance;
}

std::vector<BenchRow> RunBenchSweep(const BenchSpec& spec) {
  std::vector<BenchRow> rows;
  for (int n : spec.sizes) {
    for (int seed = 0; seed < spec.num_seeds; ++seed) {
      const BenchInstance instance = MakeBenchInstance(spec, n, seed);
      SolverConfig tight;
      tight.timeout_s = spec.cell_timeout_s;
      SolverConfig loose = tight;
      loose.mip_gap_target = spec.loose_gap;

      double h_direct = std::numeric_limits<double>::quiet_NaN();
      for (const auto& [method, config] :
           {std::pair<std::string, SolverConfig>{"direct", tight},
            std::pair<std::string, SolverConfig>{"direct_loose", loose}}) {
        try {
          const SolveReport r = RunDirect(instance.input.problem, config);
          BenchRow row;
          row.n = n;
          row.seed = seed;
          row.method = method;
          row.objective = r.objective;
          row.tts_s = r.wall_time_s;
          row.wall_s = r.wall_time_s;
          row.num_communities = 1;
          row.largest = n;
          row.timeout = r.status == SolveStatus::kTimeout;
          row.feasible = r.x.size() > 0;
          row.nodes = r.nodes_explored;
          if (method == "direct") h_direct = r.objective;
          row.drop = RelativeDrop(h_direct, r.objective);
          rows.push_back(row);
        } catch (const std::exception& e) {
          LogWarn("bench cell failed: " + std::string(e.what()));
          rows.push_back(FailedRow(n, seed, method, false));
        }
      }
      for (const bool thresholded : {false, true}) {
        const std::string method = thresholded ? "decomposed_threshold" : "decomposed";
        PipelineConfig config;
        config.solver.timeout_s = spec.cell_timeout_s;
        config.quadratic.r = spec.r;
        config.threads = spec.threads;
        config.parallel_subproblems = spec.threads > 1;
        if (thresholded) config.cluster.threshold_phi = static_cast<int>(spec.threshold_phi);
        try {
          const PipelineReport r = RunDecomposed(instance.input, config);
          BenchRow row;
          row.n = n;
          row.seed = seed;
          row.method = method;
          row.objective = r.objective;
          row.tts_s = r.solve_time_sequential;
          row.wall_s = r.times.total;
          row.num_communities = r.num_communities;
          row.largest = r.largest_community;
          row.drop = RelativeDrop(h_direct, r.objective);
          row.feasible = r.feasible;
          for (const SolveReport& s : r.subproblems) {
            row.timeout = row.timeout || s.status == SolveStatus::kTimeout;
            row.nodes += s.nodes_explored;
          }
          rows.push_back(row);
        } catch (const std::exception& e) {
          LogWarn("bench cell failed: " + std::string(e.what()));
          rows.push_back(FailedRow(n, seed, method, false));
        }
      }
      LogInfo("bench n=" + std::to_string(n) + " seed=" + std::to_string(seed) + " done");
    }
  }
  return rows;
}

std::vector<BenchSummaryEntry> SummarizeBench(const std::vector<BenchRow>& rows) {
  std::vector<std::pair<int, std::string>> keys;
  std::map<std::pair<int, std::string>, std::vector<const BenchRow*>> groups;
  for (const BenchRow& row : rows) {
    const auto key = std::make_pair(row.n, row.method);
    if (groups.find(key) == groups.end()) keys.push_back(key);
    groups[key].push_back(&row);
  }
  std::vector<BenchSummaryEntry> out;
  for (const auto& key : keys) {
    BenchSummaryEntry e;
    e.n = key.first;
    e.method = key.second;
    std::vector<double> h, tts, drop, frac;
    for (const BenchRow* row : groups[key]) {
      ++e.count;
      if (row->timeout) ++e.timeouts;
      if (!std::isfinite(row->objective)) continue;
      h.push_back(row->objective);
      tts.push_back(row->tts_s);
      drop.push_back(row->drop);
      frac.push_back(static_cast<double>(row->largest) / row->n);
    }
    e.median_objective = Median(h);
    e.median_tts_s = Median(tts);
    std::vector<double> dev;
    for (double v : tts) dev.push_back(std::abs(v - e.median_tts_s));
    e.mad_tts_s = Median(dev);
    e.median_drop = Median(drop);
    e.median_largest_fraction = Median(frac);
    out.push_back(e);
  }
  return out;
}

std::string BenchCsvHeader() { return "n,seed,method,H,tts_s,K,largest,drop"; }

std::string BenchCsvLine(const BenchRow& row) {
  return std::to_string(row.n) + "," + std::to_string(row.seed) + "," + row.method +
         "," + Number(row.objective) + "," + Number(row.tts_s) + "," +
         std::to_string(row.num_communities) + "," + std::to_string(row.largest) +
         "," + Number(row.drop);
}

}  // namespace portdecomp
