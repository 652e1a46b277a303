#include <benchmark/benchmark.h>

#include <array>

#include "fbst/convolution.hpp"
#include "fbst/posterior.hpp"
#include "fbst/truth_function.hpp"

namespace {

void BM_ConvolveCondense(benchmark::State& state, fbst::AxisMode mode) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const std::array ws = {fbst::lognormal_reference(0.0, 1.0, n, mode),
                         fbst::lognormal_reference(0.5, 2.0, n, mode)};
  for (auto _ : state) {
    benchmark::DoNotOptimize(fbst::composite_truth_function(ws, n));
  }
}
BENCHMARK_CAPTURE(BM_ConvolveCondense, horizontal, fbst::AxisMode::horizontal)->Arg(100);
BENCHMARK_CAPTURE(BM_ConvolveCondense, vertical, fbst::AxisMode::vertical)->Arg(100);

void BM_EstimateTruthFunction(benchmark::State& state) {
  const auto table = fbst::ContingencyTable::from_rows({{241, 187, 44}, {139, 130, 30}, {364, 302, 70}});
  const auto post = fbst::DirichletPosterior::from_table(table, fbst::DirichletPrior(1.0));
  fbst::TruthOptions opts;
  opts.n_samples = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(fbst::estimate_truth_function(post, opts, fbst::AxisMode::vertical));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_EstimateTruthFunction)->Arg(10'000)->Arg(100'000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
