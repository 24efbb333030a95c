#include <benchmark/benchmark.h>

#include <map>
#include <random>

#include "litter/kernels.hpp"
#include "litter/synth.hpp"

using namespace litter;

namespace {

struct LocateInput {
  SyntheticScene scene;
  std::vector<LocateTask> tasks;
  CategoryMapping mapping;
};

LocateInput make_locate(std::size_t n) {
  LocateInput in;
  in.scene = generate_scene(11, n, default_scene_area(), PipelineConfig{});
  in.mapping = consolidate(in.scene.detections.taxonomy);
  std::map<Id, std::size_t> fix_of;
  for (std::size_t i = 0; i < in.scene.fixes.size(); ++i) fix_of[in.scene.fixes[i].image_id] = i;
  for (std::size_t i = 0; i < in.scene.detections.detections.size(); ++i)
    in.tasks.push_back({fix_of.at(in.scene.detections.detections[i].image_id), i});
  return in;
}

std::vector<ImageGroup> make_groups(std::size_t n) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> pos(0, 1000), ext(10, 120), sc(0, 1);
  std::vector<ImageGroup> groups(n);
  std::int64_t id = 0;
  for (std::size_t g = 0; g < n; ++g) {
    groups[g].image_id = Id(static_cast<std::int64_t>(g));
    for (int k = 0; k < 40; ++k) {
      Detection d;
      d.annotation_id = Id(++id);
      d.image_id = groups[g].image_id;
      d.bbox = {pos(rng), pos(rng), ext(rng), ext(rng)};
      d.score = sc(rng);
      (k % 2 ? groups[g].truths : groups[g].predictions).push_back(d);
    }
  }
  return groups;
}

std::vector<SyntheticScene> make_scenes(std::size_t n) {
  std::vector<SyntheticScene> scenes;
  for (std::size_t s = 0; s < n; ++s) scenes.push_back(generate_scene(s, 20, default_scene_area(), PipelineConfig{}));
  return scenes;
}

template <bool Parallel>
void BM_Locate(benchmark::State& state) {
  const auto in = make_locate(static_cast<std::size_t>(state.range(0)));
  const PipelineConfig cfg;
  for (auto _ : state) {
    auto out = Parallel ? parallel::locate_batch(in.scene.fixes, in.scene.detections.detections, in.tasks, in.mapping, cfg)
                        : serial::locate_batch(in.scene.fixes, in.scene.detections.detections, in.tasks, in.mapping, cfg);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <bool Parallel>
void BM_Match(benchmark::State& state) {
  const auto groups = make_groups(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    auto out = Parallel ? parallel::match_batch(groups, 0.5) : serial::match_batch(groups, 0.5);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <bool Parallel>
void BM_Roundtrip(benchmark::State& state) {
  const auto scenes = make_scenes(static_cast<std::size_t>(state.range(0)));
  const PipelineConfig cfg;
  for (auto _ : state) {
    auto out = Parallel ? parallel::roundtrip_batch(scenes, cfg) : serial::roundtrip_batch(scenes, cfg);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_Locate<false>)->Arg(1000)->Arg(20000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Locate<true>)->Arg(1000)->Arg(20000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Match<false>)->Arg(200)->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Match<true>)->Arg(200)->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Roundtrip<false>)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Roundtrip<true>)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
