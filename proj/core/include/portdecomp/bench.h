#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "portdecomp/partition.h"
#include "portdecomp/pipeline.h"

namespace portdecomp {

enum class CovarianceSource { kBlock, kWishart };

/// Synthetic instance family. Each seed draws one universe of max(sizes)
/// assets; the instance of size n uses its first n assets, so larger sizes
/// extend the pool of smaller ones.
struct BenchSpec {
  ProblemKind kind = ProblemKind::kCardinality;
  CovarianceSource source = CovarianceSource::kBlock;
  std::vector<int> sizes;
  int num_seeds = 1;
  std::uint64_t root_seed = 0;
  int block_size = 30;  // planted communities have this many assets
  double rho_in = 0.6;
  double rho_out = 0.1;
  int days_per_asset = 50;  // T = days_per_asset · n
  double mu_scale = 3.0;
  double q = 1.0;
  double d = 0.5;
  double r = 0.9;
  int upper = 1;
  double threshold_phi = 30;
  double loose_gap = 5e-2;
  double cell_timeout_s = 120.0;
  int threads = 1;
};

/// A benchmark instance together with its planted labels and sample length.
struct BenchInstance {
  PipelineInput input;
  std::vector<int> planted_labels;
};

BenchInstance MakeBenchInstance(const BenchSpec& spec, int n, int seed);

struct BenchRow {
  int n = 0;
  int seed = 0;
  std::string method;  // direct_gap1e-4, direct_gap5e-2, decomposed, decomposed_phi
  double objective = 0.0;
  double tts_s = 0.0;  // sequential subproblem sum for decomposed methods
  double wall_s = 0.0;
  int num_communities = 1;
  int largest = 0;
  double drop = 0.0;  // relative to direct at the tight gap
  bool timeout = false;
  bool feasible = true;
  std::int64_t nodes = 0;
};

/// Four rows per (size, seed). A failing cell is recorded as a timeout or
/// infeasible row; the sweep carries on.
std::vector<BenchRow> RunBenchSweep(const BenchSpec& spec);

struct BenchSummaryEntry {
  int n = 0;
  std::string method;
  int count = 0;
  double median_objective = 0.0;
  double median_tts_s = 0.0;
  double mad_tts_s = 0.0;  // median absolute deviation
  double median_drop = 0.0;
  double median_largest_fraction = 0.0;
  int timeouts = 0;
};

std::vector<BenchSummaryEntry> SummarizeBench(const std::vector<BenchRow>& rows);

std::string BenchCsvHeader();
std::string BenchCsvLine(const BenchRow& row);

double Median(std::vector<double> values);

/// Parses "start:stop:step" (inclusive stop) or a single integer.
std::vector<int> ParseSizeRange(const std::string& text);

}  // namespace portdecomp
