#include <doctest.h>

#include <gridcast/optimize.hpp>
#include <gridcast/random.hpp>

#include "support/oracles.hpp"

using namespace gridcast;
using gridcast::testing::Quadratic;
using gridcast::testing::rosenbrock;

namespace {

Objective wrap(std::function<double(const Eigen::VectorXd&)> f) { return Objective{std::move(f)}; }

Quadratic random_quadratic(Eigen::Index n, std::uint64_t seed) {
	Rng rng(seed);
	Eigen::MatrixXd m(n, n);
	for (Eigen::Index i = 0; i < n; ++i) {
		for (Eigen::Index j = 0; j < n; ++j) m(i, j) = rng.normal();
	}
	Quadratic q;
	q.a = m.transpose() * m + 0.5 * Eigen::MatrixXd::Identity(n, n);
	q.b.resize(n);
	for (Eigen::Index i = 0; i < n; ++i) q.b(i) = rng.normal();
	return q;
}

} // namespace

TEST_SUITE_BEGIN("optimize");

TEST_CASE("fd_gradient matches analytic gradients on a smooth battery") {
	const OptimOptions opts;
	SUBCASE("quadratic with linear term at (1,1)") {
		const auto obj = wrap([](const Eigen::VectorXd& x) { return x(0) * x(0) + 3.0 * x(1); });
		const Eigen::VectorXd g = fd_gradient(obj, Eigen::Vector2d(1.0, 1.0), opts.gradient_step);
		CHECK(std::abs(g(0) - 2.0) < 1e-6);
		CHECK(std::abs(g(1) - 3.0) < 1e-6);
	}
	SUBCASE("trigonometric and exponential terms") {
		const auto obj = wrap([](const Eigen::VectorXd& x) {
			return std::sin(x(0)) + std::cos(x(1)) + std::exp(0.3 * x(0) - 0.2 * x(1));
		});
		const Eigen::VectorXd at = Eigen::Vector2d(0.7, -0.4);
		const double e = std::exp(0.3 * at(0) - 0.2 * at(1));
		const Eigen::Vector2d analytic(std::cos(at(0)) + 0.3 * e, -std::sin(at(1)) - 0.2 * e);
		const Eigen::VectorXd g = fd_gradient(obj, at, opts.gradient_step);
		for (int i = 0; i < 2; ++i) {
			CHECK(std::abs(g(i) - analytic(i)) / std::max(1.0, std::abs(analytic(i))) < 1e-5);
		}
	}
	SUBCASE("random quadratics up to n = 10") {
		for (const Eigen::Index n : {2, 5, 10}) {
			const Quadratic q = random_quadratic(n, 17 + static_cast<std::uint64_t>(n));
			const auto obj = wrap([q](const Eigen::VectorXd& x) { return q(x); });
			Eigen::VectorXd at = Eigen::VectorXd::LinSpaced(n, -1.0, 1.3);
			const Eigen::VectorXd g = fd_gradient(obj, at, opts.gradient_step);
			const Eigen::VectorXd analytic = q.gradient(at);
			CHECK((g - analytic).lpNorm<Eigen::Infinity>() / std::max(1.0, analytic.lpNorm<Eigen::Infinity>()) <
			      1e-5);
		}
	}
}

TEST_CASE("nelder_mead finds simple minima") {
	OptimOptions opts;
	opts.tol = 1e-10;
	opts.max_iter = 500;

	SUBCASE("1-D parabola from 0") {
		const auto obj = wrap([](const Eigen::VectorXd& x) { return (x(0) - 3.0) * (x(0) - 3.0); });
		const auto out = nelder_mead(obj, Eigen::VectorXd::Zero(1), opts);
		CHECK(out.converged);
		CHECK(std::abs(out.x_star(0) - 3.0) < 1e-4);
	}
	SUBCASE("Rosenbrock from (-1.2, 1)") {
		opts.max_iter = 2000;
		const auto obj = wrap(rosenbrock);
		const auto out = nelder_mead(obj, Eigen::Vector2d(-1.2, 1.0), opts);
		CHECK(std::abs(out.x_star(0) - 1.0) < 1e-3);
		CHECK(std::abs(out.x_star(1) - 1.0) < 1e-3);
	}
	SUBCASE("non-finite region away from the start is treated as +inf") {
		const auto obj = wrap([](const Eigen::VectorXd& x) {
			if (x(0) > 2.0) return std::numeric_limits<double>::quiet_NaN();
			return (x(0) - 1.5) * (x(0) - 1.5);
		});
		const auto out = nelder_mead(obj, Eigen::VectorXd::Ones(1), opts);
		CHECK(std::isfinite(out.f_star));
		CHECK(std::abs(out.x_star(0) - 1.5) < 1e-3);
	}
	SUBCASE("non-finite start is an error") {
		const auto obj = wrap([](const Eigen::VectorXd&) { return std::numeric_limits<double>::infinity(); });
		CHECK_THROWS_AS(nelder_mead(obj, Eigen::VectorXd::Zero(1), opts), std::invalid_argument);
	}
}

TEST_CASE("bfgs reaches quadratic and Rosenbrock minima") {
	OptimOptions opts;
	opts.max_iter = 500;

	SUBCASE("shifted quadratic lands on the center") {
		const Eigen::Vector3d center(2.0, -1.0, 0.5);
		const auto obj = wrap([center](const Eigen::VectorXd& x) { return (x - center).squaredNorm(); });
		const auto out = bfgs(obj, Eigen::VectorXd::Zero(3), opts);
		CHECK(out.converged);
		CHECK((out.x_star - center).lpNorm<Eigen::Infinity>() < 1e-6);
	}
	SUBCASE("Rosenbrock reaches f < 1e-8 within 500 iterations") {
		const auto out = bfgs(wrap(rosenbrock), Eigen::Vector2d(-1.2, 1.0), opts);
		CHECK(out.f_star < 1e-8);
		CHECK(out.iterations <= 500);
	}
}

TEST_CASE("lbfgsb respects bounds and matches the active-set oracle") {
	OptimOptions opts;
	opts.max_iter = 500;

	SUBCASE("active bound is hit exactly") {
		const auto obj = wrap([](const Eigen::VectorXd& x) { return (x(0) - 5.0) * (x(0) - 5.0); });
		Bounds bounds;
		bounds.lower = Eigen::VectorXd::Constant(1, 0.0);
		bounds.upper = Eigen::VectorXd::Constant(1, 3.0);
		const auto out = lbfgsb(obj, Eigen::VectorXd::Zero(1), bounds, opts);
		CHECK(out.converged);
		CHECK(out.x_star(0) == doctest::Approx(3.0).epsilon(1e-9));
	}
	SUBCASE("unbounded box reduces to bfgs on a quadratic") {
		const Quadratic q = random_quadratic(4, 99);
		const auto obj = wrap([q](const Eigen::VectorXd& x) { return q(x); });
		opts.tol = 1e-9;
		const auto unb = lbfgsb(obj, Eigen::VectorXd::Zero(4), Bounds::unbounded(4), opts);
		const auto dense = bfgs(obj, Eigen::VectorXd::Zero(4), opts);
		CHECK(unb.converged);
		CHECK(dense.converged);
		CHECK((unb.x_star - dense.x_star).lpNorm<Eigen::Infinity>() < 1e-6);
	}
	SUBCASE("10-D bounded quadratic matches exhaustive enumeration") {
		const Quadratic q = random_quadratic(10, 4242);
		const Eigen::VectorXd lo = Eigen::VectorXd::Constant(10, -1.0);
		const Eigen::VectorXd hi = Eigen::VectorXd::Constant(10, 1.0);
		const Eigen::VectorXd expected = gridcast::testing::box_quadratic_oracle(q, lo, hi);
		const auto obj = wrap([q](const Eigen::VectorXd& x) { return q(x); });
		Bounds bounds{lo, hi};
		opts.tol = 1e-8;
		opts.max_iter = 2000;
		const auto out = lbfgsb(obj, Eigen::VectorXd::Zero(10), bounds, opts);
		CHECK((out.x_star - expected).lpNorm<Eigen::Infinity>() < 1e-5);
	}
	SUBCASE("infeasible start is an error") {
		const auto obj = wrap([](const Eigen::VectorXd& x) { return x.squaredNorm(); });
		Bounds bounds;
		bounds.lower = Eigen::VectorXd::Constant(1, 1.0);
		bounds.upper = Eigen::VectorXd::Constant(1, 2.0);
		CHECK_THROWS_AS(lbfgsb(obj, Eigen::VectorXd::Zero(1), bounds, opts), std::invalid_argument);
	}
	SUBCASE("Rosenbrock reaches f < 1e-8 within 500 iterations") {
		const auto out = lbfgsb(wrap(rosenbrock), Eigen::Vector2d(-1.2, 1.0), Bounds::unbounded(2), opts);
		CHECK(out.f_star < 1e-8);
		CHECK(out.iterations <= 500);
	}
}

TEST_CASE("all three methods minimize convex quadratics to 1e-6") {
	for (const Eigen::Index n : {2, 6, 10}) {
		const Quadratic q = random_quadratic(n, 600 + static_cast<std::uint64_t>(n));
		const double f_min = q(q.minimizer());
		const auto obj = wrap([q](const Eigen::VectorXd& x) { return q(x); });
		const Eigen::VectorXd x0 = Eigen::VectorXd::Constant(n, 0.7);

		OptimOptions quasi;
		quasi.max_iter = 1000;
		quasi.tol = 1e-8;
		CHECK(lbfgsb(obj, x0, Bounds::unbounded(n), quasi).f_star - f_min < 1e-6);
		CHECK(bfgs(obj, x0, quasi).f_star - f_min < 1e-6);

		OptimOptions simplex;
		simplex.max_iter = 20000;
		simplex.tol = 1e-12;
		CHECK(nelder_mead(obj, x0, simplex).f_star - f_min < 1e-6);
	}
}

TEST_CASE("sequential_optimize walks the cascade in order") {
	OptimOptions opts;
	opts.max_iter = 200;

	SUBCASE("smooth convex objective ends at lbfgsb") {
		const auto obj = wrap([](const Eigen::VectorXd& x) { return (x(0) - 2.0) * (x(0) - 2.0); });
		const auto out = sequential_optimize(obj, Eigen::VectorXd::Zero(1), std::nullopt, opts);
		CHECK(out.converged);
		CHECK(out.method == OptimMethod::lbfgsb);
	}
	SUBCASE("a cliff next to the start defeats gradients but not the simplex") {
		// Finite at x0, +inf within the finite-difference probe radius.
		const double cliff = 0.5;
		const auto obj = wrap([cliff](const Eigen::VectorXd& x) {
			if (x(0) < cliff) return std::numeric_limits<double>::infinity();
			return (x(0) - 1.0) * (x(0) - 1.0);
		});
		Eigen::VectorXd x0(1);
		x0(0) = cliff + 1e-8;
		const auto out = sequential_optimize(obj, x0, std::nullopt, opts);
		CHECK(out.converged);
		CHECK(out.method == OptimMethod::nelder_mead);
		CHECK(std::abs(out.x_star(0) - 1.0) < 1e-3);
	}
	SUBCASE("an objective that is +inf everywhere is a total failure") {
		const auto obj = wrap([](const Eigen::VectorXd&) { return std::numeric_limits<double>::infinity(); });
		CHECK_THROWS_AS(sequential_optimize(obj, Eigen::VectorXd::Zero(2), std::nullopt, opts),
		                std::runtime_error);
	}
}

TEST_CASE("outcomes are monotone and bit-deterministic") {
	const auto obj = wrap(rosenbrock);
	const Eigen::Vector2d x0(-1.2, 1.0);
	OptimOptions opts;
	opts.max_iter = 300;

	for (int method = 0; method < 3; ++method) {
		const auto run = [&] {
			switch (method) {
			case 0:
				return lbfgsb(obj, x0, Bounds::unbounded(2), opts);
			case 1:
				return bfgs(obj, x0, opts);
			default:
				return nelder_mead(obj, x0, opts);
			}
		};
		const auto first = run();
		const auto second = run();
		CHECK(first.f_star <= rosenbrock(x0));
		CHECK(first.f_star == second.f_star);
		CHECK(first.x_star == second.x_star);
		CHECK(first.iterations == second.iterations);
	}
}

TEST_SUITE_END();
