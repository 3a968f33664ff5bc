#include <benchmark/benchmark.h>

#include <gridcast/evaluation.hpp>
#include <gridcast/selection.hpp>

namespace {

using namespace gridcast;

PanelDataset bench_panel() {
	SyntheticSpec spec;
	spec.counties = 4;
	spec.hours = 500;
	spec.weather_beta = {2.0, -1.0};
	spec.noise_features = 60;
	spec.seed = 7;
	return gen_panel(spec);
}

void BM_CorrelationMatrix(benchmark::State& state) {
	const PanelDataset panel = bench_panel();
	std::vector<std::string> features;
	for (const auto& meta : panel.features()) features.push_back(meta.name);
	for (auto _ : state) {
		benchmark::DoNotOptimize(correlation_matrix(panel, features));
	}
	state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
	                        static_cast<std::int64_t>(features.size() * features.size()));
}
BENCHMARK(BM_CorrelationMatrix)->Unit(benchmark::kMillisecond);

void BM_SelectFeatures(benchmark::State& state) {
	const PanelDataset panel = bench_panel();
	SelectionConfig config;
	config.k = 20;
	config.pca_components = 10;
	for (auto _ : state) {
		benchmark::DoNotOptimize(select_features(panel, config));
	}
}
BENCHMARK(BM_SelectFeatures)->Unit(benchmark::kMillisecond);

} // namespace
