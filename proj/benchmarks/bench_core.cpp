#include <random>

#include <benchmark/benchmark.h>

#include "rgbn/chromaticity.hpp"
#include "rgbn/entropy.hpp"
#include "rgbn/render.hpp"
#include "rgbn/synth.hpp"

namespace {

rgbn::MultiChannelImage random_image(int size, int channels) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> d(0.01, 1.0);
  rgbn::MultiChannelImage img(size, size, channels);
  for (double& v : img.values()) v = d(rng);
  return img;
}

void BM_LogChromaticity(benchmark::State& state) {
  const auto img = random_image(static_cast<int>(state.range(0)), 4);
  for (auto _ : state) benchmark::DoNotOptimize(rgbn::log_chromaticity(img));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(img.pixel_count()));
}
BENCHMARK(BM_LogChromaticity)->Arg(64)->Arg(256);

void BM_TrimmedEntropy(benchmark::State& state) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> n;
  std::vector<double> samples(static_cast<std::size_t>(state.range(0)));
  for (double& v : samples) v = n(rng);
  for (auto _ : state) benchmark::DoNotOptimize(rgbn::trimmed_entropy(samples));
}
BENCHMARK(BM_TrimmedEntropy)->Arg(4096)->Arg(65536);

rgbn::ReducedChromaticityField scene_reduced(int size, bool nir) {
  rgbn::SceneSpec spec;
  spec.width = size;
  spec.height = size;
  spec.surfaces = {{0, {0.85, 0.30, 0.15, 0.40}}, {1, {0.20, 0.70, 0.25, 0.80}},
                   {2, {0.15, 0.25, 0.80, 0.30}}, {3, {0.60, 0.60, 0.60, 0.20}}};
  spec.illuminants = {{2800.0, 80.0}, {4500.0, 7.0}, {6500.0, 1.1}};
  auto img = rgbn::generate_scene(spec).image;
  if (!nir) img = rgbn::drop_nir(img);
  return rgbn::reduce(rgbn::log_chromaticity(rgbn::clamp_intensities(img)),
                      rgbn::make_basis(img.channels()));
}

void BM_FindDirection2D(benchmark::State& state) {
  const auto red = scene_reduced(64, false);
  for (auto _ : state) benchmark::DoNotOptimize(rgbn::find_optimal_direction(red, 1.0));
}
BENCHMARK(BM_FindDirection2D)->Unit(benchmark::kMillisecond);

void BM_FindDirection3D(benchmark::State& state) {
  const auto red = scene_reduced(64, true);
  for (auto _ : state) {
    benchmark::DoNotOptimize(rgbn::find_optimal_direction(red, static_cast<double>(state.range(0))));
  }
}
BENCHMARK(BM_FindDirection3D)->Arg(5)->Arg(2)->Unit(benchmark::kMillisecond);

void BM_FitL1(benchmark::State& state) {
  const auto img = random_image(static_cast<int>(state.range(0)), 4);
  const auto red = rgbn::reduce(rgbn::log_chromaticity(img), rgbn::make_basis(4));
  const auto sf = rgbn::shadow_free_chromaticity(
      red, rgbn::ProjectionDirection::from_azimuth_elevation(30.0, 10.0));
  for (auto _ : state) benchmark::DoNotOptimize(rgbn::fit_l1_mapping(sf, img));
}
BENCHMARK(BM_FitL1)->Arg(128)->Arg(512)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
