#include <benchmark/benchmark.h>

#include "bench_data.hpp"
#include "frameplan/changeset.hpp"
#include "frameplan/scene.hpp"

namespace frameplan {
namespace {

void BM_RenderPlain(benchmark::State& state) {
  const Bundle& b = bench::bundle("cooking-stirfry");
  for (auto _ : state) benchmark::DoNotOptimize(render_vector(compose_scene(*b.environment, b.initialState)));
}
BENCHMARK(BM_RenderPlain);

void BM_RenderDiffThumbnail(benchmark::State& state) {
  const Bundle& b = bench::bundle("faucet-wash");
  const Environment& env = *b.environment;
  const EnvState next = apply_fixture_toggle(env, b.initialState, "faucet");
  const ChangeSet cs = diff(b.initialState, next);
  for (auto _ : state) {
    benchmark::DoNotOptimize(render_vector(compose_diff_scene(env, next, cs), RenderOptions{160}));
  }
}
BENCHMARK(BM_RenderDiffThumbnail);

}  // namespace
}  // namespace frameplan
