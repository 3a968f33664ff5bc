#include <benchmark/benchmark.h>

#include <gridcast/optimize.hpp>

namespace {

using namespace gridcast;

double rosenbrock(const Eigen::VectorXd& x) {
	const double a = 1.0 - x(0);
	const double b = x(1) - x(0) * x(0);
	return a * a + 100.0 * b * b;
}

void BM_LbfgsbRosenbrock(benchmark::State& state) {
	const Objective obj{rosenbrock};
	OptimOptions opts;
	opts.max_iter = 500;
	const Eigen::Vector2d x0(-1.2, 1.0);
	for (auto _ : state) {
		benchmark::DoNotOptimize(lbfgsb(obj, x0, Bounds::unbounded(2), opts));
	}
}
BENCHMARK(BM_LbfgsbRosenbrock);

void BM_NelderMeadRosenbrock(benchmark::State& state) {
	const Objective obj{rosenbrock};
	OptimOptions opts;
	opts.max_iter = 2000;
	opts.tol = 1e-10;
	const Eigen::Vector2d x0(-1.2, 1.0);
	for (auto _ : state) {
		benchmark::DoNotOptimize(nelder_mead(obj, x0, opts));
	}
}
BENCHMARK(BM_NelderMeadRosenbrock);

} // namespace
