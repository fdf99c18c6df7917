#include <benchmark/benchmark.h>

#include "normsim/engine.hpp"
#include "normsim/frame.hpp"
#include "normsim/scripted.hpp"

namespace {

using namespace normsim;

// Full 16-agent Allelopathic Harvest step including all 16 rendered 88x88
// observations (the performance budget for the engine).
void BM_AhFullStep(benchmark::State& state) {
  EnvParams params;
  params.n_agents = 16;
  params.episode_length = 1 << 30;
  Engine engine(map_asset("ah"), params, 7);
  const auto roster = ScriptedPolicy::parse_roster("random-walk,zap-gray-in-view,plant-color-red",
                                                   16);
  RngStream rng(11);
  std::vector<int> actions(16);
  for (auto _ : state) {
    for (int i = 0; i < 16; ++i) actions[i] = roster[i].act(engine, i, rng);
    benchmark::DoNotOptimize(engine.step(actions));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_AhFullStep);

void BM_CspFullStep(benchmark::State& state) {
  EnvParams params;
  params.n_agents = 7;
  params.episode_length = 1 << 30;
  Engine engine(map_asset("csp"), params, 7);
  const auto roster =
      ScriptedPolicy::parse_roster("random-walk,zap-gray-in-view,clean-type-1", 7);
  RngStream rng(11);
  std::vector<int> actions(7);
  for (auto _ : state) {
    for (int i = 0; i < 7; ++i) actions[i] = roster[i].act(engine, i, rng);
    benchmark::DoNotOptimize(engine.step(actions));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_CspFullStep);

void BM_RenderObservation(benchmark::State& state) {
  EnvParams params;
  params.n_agents = 16;
  Engine engine(map_asset("ah"), params, 7);
  const auto cells = build_cell_render(engine.state());
  Frame frame(kObsPixels, kObsPixels);
  int agent = 0;
  for (auto _ : state) {
    render_observation_into(engine.state(), agent, cells, frame);
    benchmark::DoNotOptimize(frame.rgb.data());
    agent = (agent + 1) & 15;
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_RenderObservation);

void BM_Downsample24(benchmark::State& state) {
  EnvParams params;
  params.n_agents = 16;
  Engine engine(map_asset("ah"), params, 7);
  const Frame frame = render_observation(engine.state(), 0);
  for (auto _ : state) benchmark::DoNotOptimize(downsample(frame, 24));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_Downsample24);

}  // namespace

BENCHMARK_MAIN();
