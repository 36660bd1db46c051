#include <benchmark/benchmark.h>

#include "lurbench/citygen.hpp"
#include "lurbench/oracle.hpp"
#include "lurbench/raster.hpp"

namespace {

const lur::Scene& test_scene() {
  static const lur::Scene scene = [] {
    lur::CityConfig cfg;
    cfg.width_m = 2000.0;
    cfg.height_m = 2000.0;
    return lur::generate_city(cfg, 42);
  }();
  return scene;
}

void BM_Rasterize(benchmark::State& state) {
  const int px = static_cast<int>(state.range(0));
  const lur::Scene& scene = test_scene();
  const lur::Palette palette = lur::Palette::map_default();
  lur::GeoWindow window{lur::GeoPoint{1000.0, 1000.0, 51.5, "local"}, 80.0,
                        17};
  for (auto _ : state) {
    benchmark::DoNotOptimize(lur::rasterize(scene, window, px, palette));
  }
}
BENCHMARK(BM_Rasterize)->Arg(64)->Arg(224)->Unit(benchmark::kMillisecond);

void BM_Oracle(benchmark::State& state) {
  const lur::Scene& scene = test_scene();
  const lur::OracleParams params;
  double x = 0.0;
  for (auto _ : state) {
    x += 13.7;
    if (x > 1900.0) x = 0.0;
    benchmark::DoNotOptimize(
        lur::oracle_concentration(scene, {x, 1000.0}, params));
  }
}
BENCHMARK(BM_Oracle)->Unit(benchmark::kMicrosecond);

}  // namespace
