#include <vector>

#include <benchmark/benchmark.h>

#include "portdecomp/bench.h"
#include "portdecomp/clustering.h"
#include "portdecomp/data.h"
#include "portdecomp/linalg.h"
#include "portdecomp/pipeline.h"
#include "portdecomp/rmt.h"
#include "portdecomp/solver.h"

namespace portdecomp {
namespace {

BenchSpec CardinalitySpec(int n) {
  BenchSpec spec;
  spec.sizes = {n};
  return spec;
}

void BM_SymmetricEigen(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const CovarianceModel cov = GenerateWishart(n, 4 * n, 7);
  for (auto _ : state) benchmark::DoNotOptimize(SymEig(cov.corr));
  state.SetComplexityN(n);
}
BENCHMARK(BM_SymmetricEigen)->RangeMultiplier(2)->Range(32, 256)->Complexity();

void BM_FitMarchenkoPastur(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const CovarianceModel cov = GenerateWishart(n, 4 * n, 11);
  const SymmetricEigen eig = SymEig(cov.corr);
  const std::vector<double> values(eig.values.data(), eig.values.data() + n);
  for (auto _ : state) {
    benchmark::DoNotOptimize(FitMarchenkoPastur(values, n, 4 * n, MpFitMode::kFit));
  }
}
BENCHMARK(BM_FitMarchenkoPastur)->Arg(100)->Arg(200);

void BM_DetectCommunities(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const BlockModel model = GenerateBlockModel(n, n / 30, 0.6, 0.1, 50 * n, 3);
  const Preprocessed pre = Preprocess(model.covariance.sigma, 50 * n, MpFitMode::kFixed);
  for (auto _ : state) benchmark::DoNotOptimize(Cluster(pre.split.c_star, ClusterConfig{}));
}
BENCHMARK(BM_DetectCommunities)->Arg(60)->Arg(120)->Arg(240);

void BM_BranchAndBoundCardinality(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const BenchInstance inst = MakeBenchInstance(CardinalitySpec(n), n, 0);
  const Miqcqp problem =
      CardinalityToMiqcqp(std::get<CardinalityProblem>(inst.input.problem));
  for (auto _ : state) benchmark::DoNotOptimize(Solve(problem, SolverConfig{}));
}
BENCHMARK(BM_BranchAndBoundCardinality)->Arg(16)->Arg(30)->Arg(60)->Unit(benchmark::kMillisecond);

void BM_DecomposedPipeline(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const BenchInstance inst = MakeBenchInstance(CardinalitySpec(n), n, 0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(RunDecomposed(inst.input, PipelineConfig{}));
  }
}
BENCHMARK(BM_DecomposedPipeline)->Arg(60)->Arg(120)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace portdecomp

BENCHMARK_MAIN();
