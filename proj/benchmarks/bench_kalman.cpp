#include <benchmark/benchmark.h>

#include <gridcast/evaluation.hpp>
#include <gridcast/sarimax.hpp>

namespace {

using namespace gridcast;

SarimaxParams params_for(double phi, double theta) {
	SarimaxParams p;
	p.phi = Eigen::VectorXd::Constant(1, phi);
	p.theta = Eigen::VectorXd::Constant(1, theta);
	p.sigma2 = 1.0;
	return p;
}

void BM_KalmanLoglik(benchmark::State& state) {
	const auto n = static_cast<std::size_t>(state.range(0));
	const Eigen::VectorXd y = gen_arma(0.6, -0.3, 1.0, n, 42);
	DesignMatrix x;
	x.values = Eigen::MatrixXd(y.size(), 0);
	const auto rep = to_state_space(ModelOrder{1, 0, 1, {}}, params_for(0.6, -0.3));
	for (auto _ : state) {
		benchmark::DoNotOptimize(kalman_loglik(rep, y, x, Eigen::VectorXd(), 1.0));
	}
	state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * state.range(0));
}
BENCHMARK(BM_KalmanLoglik)->Arg(500)->Arg(2000)->Arg(8000);

void BM_SarimaxFit(benchmark::State& state) {
	const auto n = static_cast<std::size_t>(state.range(0));
	const Eigen::VectorXd y = gen_arma(0.6, -0.3, 1.0, n, 42);
	DesignMatrix x;
	x.values = Eigen::MatrixXd(y.size(), 0);
	OptimOptions opts;
	for (auto _ : state) {
		benchmark::DoNotOptimize(fit(y, x, ModelOrder{1, 0, 1, {}}, opts));
	}
}
BENCHMARK(BM_SarimaxFit)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
