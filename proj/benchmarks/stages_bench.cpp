#include <benchmark/benchmark.h>

#include "threadtrace/curve_search.hpp"
#include "threadtrace/pipeline.hpp"
#include "threadtrace/ridge.hpp"
#include "threadtrace/segment_link.hpp"
#include "threadtrace/spline.hpp"
#include "threadtrace/synthetic.hpp"

namespace {

using namespace threadtrace;

struct Fixture {
  SceneGroundTruth gt;
  GradientMap conj;
  PipelineConfig cfg;
  FusedMaps fused;
  LinePointSet points;
  std::vector<CurveSegment> segments;
  OrderedThreadPoints ordered;

  Fixture() {
    SceneConfig scene;
    scene.seed = 12345;
    gt = generate_scene(scene);
    conj = conjugate_ground_truth(gt, cfg.w);
    fused = fuse_conjugate(gt.gradient, conj, cfg);
    points = thread_line_points(gt.gradient, conj, cfg);
    segments = extract_segments(points, {cfg.t_d, cfg.t_v});
    ordered = link_segments(segments, {cfg.t_c});
  }
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

void BM_GenerateScene(benchmark::State& state) {
  std::uint64_t seed = 0;
  for (auto _ : state) {
    SceneConfig cfg;
    cfg.seed = ++seed;
    benchmark::DoNotOptimize(generate_scene(cfg));
  }
}
BENCHMARK(BM_GenerateScene)->Unit(benchmark::kMillisecond);

void BM_Fuse(benchmark::State& state) {
  const Fixture& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(fuse_conjugate(f.gt.gradient, f.conj, f.cfg));
}
BENCHMARK(BM_Fuse)->Unit(benchmark::kMillisecond);

void BM_Ridge(benchmark::State& state) {
  const Fixture& f = fixture();
  const StegerParams params{sigma_from_width(f.cfg.w), f.cfg.t_l, f.cfg.t_u};
  for (auto _ : state) benchmark::DoNotOptimize(extract_line_points(f.fused.gray, params));
}
BENCHMARK(BM_Ridge)->Unit(benchmark::kMillisecond);

void BM_CurveSearch(benchmark::State& state) {
  const Fixture& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(extract_segments(f.points, {f.cfg.t_d, f.cfg.t_v}));
  state.counters["points"] = static_cast<double>(f.points.points.size());
}
BENCHMARK(BM_CurveSearch)->Unit(benchmark::kMillisecond);

void BM_Link(benchmark::State& state) {
  const Fixture& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(link_segments(f.segments, {f.cfg.t_c}));
}
BENCHMARK(BM_Link)->Unit(benchmark::kMicrosecond);

void BM_SplineFit(benchmark::State& state) {
  const Fixture& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(fit_spline(f.ordered, f.cfg.smoothing));
}
BENCHMARK(BM_SplineFit)->Unit(benchmark::kMillisecond);

void BM_ReconstructConjugate(benchmark::State& state) {
  const Fixture& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(reconstruct(f.gt.gradient, f.conj, f.cfg));
}
BENCHMARK(BM_ReconstructConjugate)->Unit(benchmark::kMillisecond);

void BM_ReconstructSingle(benchmark::State& state) {
  const Fixture& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(reconstruct(f.gt.gradient, f.cfg));
}
BENCHMARK(BM_ReconstructSingle)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
