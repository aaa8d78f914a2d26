#pragma once

#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "portdecomp/bench.h"
#include "portdecomp/clustering.h"
#include "portdecomp/data.h"
#include "portdecomp/partition.h"
#include "portdecomp/pipeline.h"
#include "portdecomp/problem.h"
#include "portdecomp/solver.h"

namespace portdecomp {

using Json = nlohmann::ordered_json;

// Problem documents: {"n", "kind": "cardinality"|"quadratic", "sigma"
// (row-major), "mu"|"x_b", "q"|"a", "d"|"m"} with an optional "T".
Json ProblemToJson(const Problem& problem, int observations = 0);
PipelineInput ProblemFromJson(const Json& doc);

// Covariance documents: {"n", "kind": "covariance", "sigma", "T"}.
Json CovarianceToJson(const Eigen::MatrixXd& sigma, int observations);
CovarianceModel CovarianceFromJson(const Json& doc);

Json SolveReportToJson(const SolveReport& report, bool include_timings = true);
Json PartitionToJson(const ClusterResult& result, double modularity,
                     bool include_trace);
Json PlanToJson(const DecompositionPlan& plan);
Json PipelineReportToJson(const PipelineReport& report,
                          bool include_timings = true);
Json BenchSummaryToJson(const std::vector<BenchSummaryEntry>& summary);

/// Non-finite numbers become null.
Json NumberOrNull(double value);

/// Failure to open, read, parse or write a file.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Throws IoError on a missing, unreadable or malformed file.
Json ReadJsonFile(const std::string& path);
void WriteTextFile(const std::string& path, const std::string& text);

}  // namespace portdecomp
