#include <doctest.h>

#include <gridcast/evaluation.hpp>
#include <gridcast/random.hpp>
#include <gridcast/sarimax.hpp>

#include "support/oracles.hpp"

using namespace gridcast;
using gridcast::testing::arma11_mvn_loglik;

namespace {

SarimaxParams arma11_params(double phi, double theta, double sigma2) {
	SarimaxParams p;
	p.phi = Eigen::VectorXd::Constant(1, phi);
	p.theta = Eigen::VectorXd::Constant(1, theta);
	p.sigma2 = sigma2;
	return p;
}

DesignMatrix named_design(const Eigen::MatrixXd& values) {
	DesignMatrix x;
	x.values = values;
	for (Eigen::Index j = 0; j < values.cols(); ++j) x.columns.push_back("x" + std::to_string(j));
	return x;
}

DesignMatrix empty_design(Eigen::Index rows) { return named_design(Eigen::MatrixXd(rows, 0)); }

FitResult fixed_fit(const ModelOrder& order, const SarimaxParams& params, const Eigen::VectorXd& y,
                    const DesignMatrix& x) {
	FitResult f;
	f.order = order;
	f.params = params;
	f.exog_columns = x.columns;
	f.fitted_series = y;
	const KalmanRun run = run_kalman(to_state_space(order, params), y, x.values, params.beta, params.sigma2);
	REQUIRE(run.ok);
	f.loglik = run.loglik;
	f.converged = true;
	f.residuals = run.innovations;
	f.terminal_state = run.terminal_state;
	return f;
}

} // namespace

TEST_SUITE_BEGIN("sarimax");

TEST_CASE("to_state_space builds the companion form") {
	SUBCASE("ARMA(1,1) lands on the documented matrices") {
		const ModelOrder order{1, 0, 1, {}};
		const auto rep = to_state_space(order, arma11_params(0.5, 0.2, 1.0));
		REQUIRE(rep.state_dim() == 2);
		CHECK(rep.transition(0, 0) == 0.5);
		CHECK(rep.transition(0, 1) == 1.0);
		CHECK(rep.transition(1, 0) == 0.0);
		CHECK(rep.transition(1, 1) == 0.0);
		CHECK(rep.innovation_map(0) == 1.0);
		CHECK(rep.innovation_map(1) == 0.2);
		CHECK(rep.loading(0) == 1.0);
	}
	SUBCASE("AR(1) degenerates to a scalar transition") {
		const ModelOrder order{1, 0, 0, {}};
		SarimaxParams p;
		p.phi = Eigen::VectorXd::Constant(1, 0.5);
		const auto rep = to_state_space(order, p);
		CHECK(rep.state_dim() == 1);
		CHECK(rep.transition(0, 0) == 0.5);
	}
	SUBCASE("a unit AR root is rejected") {
		const ModelOrder order{1, 0, 1, {}};
		CHECK_THROWS_AS(to_state_space(order, arma11_params(1.0, 0.2, 1.0)), std::invalid_argument);
	}
	SUBCASE("seasonal factors expand by polynomial multiplication") {
		ModelOrder order{1, 0, 0, {1, 0, 0, 4}};
		SarimaxParams p;
		p.phi = Eigen::VectorXd::Constant(1, 0.5);
		p.seasonal_phi = Eigen::VectorXd::Constant(1, 0.3);
		const auto rep = to_state_space(order, p);
		// (1 - 0.5B)(1 - 0.3B^4) = 1 - 0.5B - 0.3B^4 + 0.15B^5
		REQUIRE(rep.state_dim() == 5);
		CHECK(rep.transition(0, 0) == doctest::Approx(0.5));
		CHECK(rep.transition(3, 0) == doctest::Approx(0.3));
		CHECK(rep.transition(4, 0) == doctest::Approx(-0.15));
	}
}

TEST_CASE("kalman_loglik matches closed forms") {
	SUBCASE("iid standard normal zeros") {
		const ModelOrder order{0, 0, 0, {}};
		SarimaxParams p;
		p.sigma2 = 1.0;
		const auto rep = to_state_space(order, p);
		const Eigen::VectorXd y = Eigen::VectorXd::Zero(2);
		const double ll = kalman_loglik(rep, y, empty_design(2), Eigen::VectorXd(), 1.0);
		CHECK(ll == doctest::Approx(-1.8378770664093454836).epsilon(1e-12));
	}
	SUBCASE("ARMA(1,1) at T=2 against the autocovariance density") {
		const ModelOrder order{1, 0, 1, {}};
		const auto rep = to_state_space(order, arma11_params(0.5, 0.2, 1.0));
		Eigen::VectorXd y(2);
		y << 1.0, 0.5;
		const double ll = kalman_loglik(rep, y, empty_design(2), Eigen::VectorXd(), 1.0);
		CHECK(std::abs(ll - arma11_mvn_loglik(y, 0.5, 0.2, 1.0)) < 1e-10);
	}
	SUBCASE("random stationary configurations at T <= 8, with regression effects") {
		Rng rng(2024);
		for (int trial = 0; trial < 100; ++trial) {
			const double phi = rng.uniform(-0.9, 0.9);
			const double theta = rng.uniform(-0.9, 0.9);
			const double sigma2 = rng.uniform(0.3, 2.5);
			const auto n = static_cast<Eigen::Index>(2 + rng.below(7));

			Eigen::VectorXd noise(n);
			for (Eigen::Index i = 0; i < n; ++i) noise(i) = rng.normal();
			Eigen::MatrixXd exog(n, 2);
			for (Eigen::Index i = 0; i < n; ++i) {
				exog(i, 0) = rng.normal();
				exog(i, 1) = rng.uniform(-1.0, 1.0);
			}
			Eigen::Vector2d beta(rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0));
			const Eigen::VectorXd y = noise + exog * beta;

			const ModelOrder order{1, 0, 1, {}};
			const auto rep = to_state_space(order, arma11_params(phi, theta, sigma2));
			const double ll = kalman_loglik(rep, y, named_design(exog), beta, sigma2);
			const double expected = arma11_mvn_loglik(noise, phi, theta, sigma2);
			CHECK(std::abs(ll - expected) < 1e-8);
		}
	}
	SUBCASE("shifting y by beta'X and zeroing beta leaves the likelihood unchanged") {
		Rng rng(5);
		const auto n = Eigen::Index{32};
		Eigen::VectorXd y(n);
		Eigen::MatrixXd exog(n, 2);
		for (Eigen::Index i = 0; i < n; ++i) {
			y(i) = rng.normal();
			exog(i, 0) = rng.normal();
			exog(i, 1) = rng.normal();
		}
		const Eigen::Vector2d beta(1.5, -0.7);
		const ModelOrder order{1, 0, 1, {}};
		const auto rep = to_state_space(order, arma11_params(0.4, -0.3, 1.2));
		const double with_exog = kalman_loglik(rep, y, named_design(exog), beta, 1.2);
		const double shifted =
		    kalman_loglik(rep, (y - exog * beta).eval(), empty_design(n), Eigen::VectorXd(), 1.2);
		CHECK(std::abs(with_exog - shifted) < 1e-10);
	}
	SUBCASE("a non-stationary representation signals -inf instead of throwing") {
		StateSpaceRep rep;
		rep.transition = Eigen::MatrixXd::Constant(1, 1, 1.0);
		rep.loading = Eigen::RowVectorXd::Constant(1, 1.0);
		rep.innovation_map = Eigen::VectorXd::Constant(1, 1.0);
		const Eigen::VectorXd y = Eigen::VectorXd::Ones(4);
		const double ll = kalman_loglik(rep, y, empty_design(4), Eigen::VectorXd(), 1.0);
		CHECK(std::isinf(ll));
		CHECK(ll < 0);
	}
}

TEST_CASE("transform_params is total with an exact inverse") {
	const ModelOrder order{1, 0, 1, {}};

	SUBCASE("zero maps to zero") {
		Eigen::VectorXd u = Eigen::VectorXd::Zero(3);
		const auto p = transform_params(u, order, 0);
		CHECK(p.phi(0) == 0.0);
		CHECK(p.theta(0) == 0.0);
		CHECK(p.sigma2 == doctest::Approx(1.0));
	}
	SUBCASE("huge entries stay strictly inside the unit disc") {
		Eigen::VectorXd u(3);
		u << 50.0, -50.0, 0.0;
		const auto p = transform_params(u, order, 0);
		CHECK(std::abs(p.phi(0)) < 1.0);
		CHECK(std::abs(p.theta(0)) < 1.0);
		CHECK(p.phi(0) > 0.99);
	}
	SUBCASE("round trip is exact for valid parameters") {
		Rng rng(77);
		for (int trial = 0; trial < 50; ++trial) {
			Eigen::VectorXd u(5);
			for (Eigen::Index i = 0; i < u.size(); ++i) u(i) = rng.uniform(-3.0, 3.0);
			const auto params = transform_params(u, order, 2);
			const Eigen::VectorXd back = untransform_params(params, order);
			CHECK((back - u).lpNorm<Eigen::Infinity>() < 1e-12);
		}
	}
	SUBCASE("higher orders stay stationary") {
		const ModelOrder big{3, 0, 2, {}};
		Rng rng(78);
		for (int trial = 0; trial < 30; ++trial) {
			Eigen::VectorXd u(6);
			for (Eigen::Index i = 0; i < u.size(); ++i) u(i) = rng.uniform(-4.0, 4.0);
			const auto params = transform_params(u, big, 0);
			CHECK_NOTHROW(to_state_space(big, params));
			const Eigen::VectorXd back = untransform_params(params, big);
			CHECK((back - u).lpNorm<Eigen::Infinity>() < 1e-9);
		}
	}
}

TEST_CASE("difference and integrate are exact inverses") {
	SUBCASE("first difference of a short series") {
		Eigen::VectorXd y(3);
		y << 3, 5, 9;
		const auto diff = difference(y, 1, 0, 0);
		REQUIRE(diff.series.size() == 2);
		CHECK(diff.series(0) == 2);
		CHECK(diff.series(1) == 4);
	}
	SUBCASE("d = 0 is the identity") {
		Eigen::VectorXd y(4);
		y << 1, 2, 4, 8;
		const auto diff = difference(y, 0, 0, 0);
		CHECK(diff.series == y);
		CHECK(diff.anchors.empty());
	}
	SUBCASE("difference then integrate reproduces the input exactly") {
		Rng rng(9);
		Eigen::VectorXd y(40);
		for (Eigen::Index i = 0; i < y.size(); ++i) y(i) = rng.uniform(-5.0, 5.0);
		for (const auto& [d, D, s] : std::vector<std::tuple<int, int, int>>{{1, 0, 0}, {2, 0, 0}, {1, 1, 7}}) {
			const auto diff = difference(y, d, D, s);
			const Eigen::VectorXd back = integrate(diff.series, diff.anchors, d, D, s);
			REQUIRE(back.size() == y.size());
			CHECK((back - y).lpNorm<Eigen::Infinity>() < 1e-12);
		}
	}
	SUBCASE("insufficient length is an error") {
		Eigen::VectorXd y(3);
		y << 1, 2, 3;
		CHECK_THROWS_AS(difference(y, 0, 1, 7), std::invalid_argument);
	}
}

TEST_CASE("forecast propagates the filtered state") {
	SUBCASE("pure AR(1) decays geometrically from the terminal state") {
		const ModelOrder order{1, 0, 0, {}};
		SarimaxParams p;
		p.phi = Eigen::VectorXd::Constant(1, 0.5);
		FitResult fit;
		fit.order = order;
		fit.params = p;
		fit.terminal_state = Eigen::VectorXd::Constant(1, 4.0);
		const Eigen::VectorXd out = forecast(fit, 2, empty_design(0));
		CHECK(out(0) == doctest::Approx(2.0));
		CHECK(out(1) == doctest::Approx(1.0));
	}
	SUBCASE("pure regression repeats beta' x") {
		const ModelOrder order{0, 0, 0, {}};
		SarimaxParams p;
		p.beta = Eigen::VectorXd::Constant(1, 3.0);
		FitResult fit;
		fit.order = order;
		fit.params = p;
		fit.exog_columns = {"x0"};
		fit.terminal_state = Eigen::VectorXd::Zero(1);
		const Eigen::VectorXd out = forecast(fit, 2, named_design(Eigen::MatrixXd::Ones(2, 1)));
		CHECK(out(0) == doctest::Approx(3.0));
		CHECK(out(1) == doctest::Approx(3.0));
	}
	SUBCASE("one-step forecast equals the conditional-Gaussian mean at T <= 8") {
		Rng rng(31);
		for (int trial = 0; trial < 25; ++trial) {
			const double phi = rng.uniform(-0.85, 0.85);
			const double theta = rng.uniform(-0.85, 0.85);
			const double sigma2 = rng.uniform(0.5, 2.0);
			const auto n = static_cast<Eigen::Index>(3 + rng.below(6));
			Eigen::VectorXd y(n);
			for (Eigen::Index i = 0; i < n; ++i) y(i) = rng.normal();

			const ModelOrder order{1, 0, 1, {}};
			const auto params = arma11_params(phi, theta, sigma2);
			const auto fit = fixed_fit(order, params, y, empty_design(n));
			const double predicted = forecast(fit, 1, empty_design(0))(0);

			// E[y_{n+1} | y] from the joint (n+1)-dimensional Gaussian.
			Eigen::MatrixXd cov(n, n);
			Eigen::VectorXd cross(n);
			for (Eigen::Index i = 0; i < n; ++i) {
				cross(i) = gridcast::testing::arma11_autocov(phi, theta, sigma2, static_cast<int>(n - i));
				for (Eigen::Index j = 0; j < n; ++j) {
					cov(i, j) =
					    gridcast::testing::arma11_autocov(phi, theta, sigma2, static_cast<int>(std::abs(i - j)));
				}
			}
			const double expected = cross.dot(cov.llt().solve(y));
			CHECK(std::abs(predicted - expected) < 1e-8);
		}
	}
	SUBCASE("column mismatch is an error") {
		const ModelOrder order{0, 0, 0, {}};
		SarimaxParams p;
		p.beta = Eigen::VectorXd::Constant(1, 1.0);
		FitResult fit;
		fit.order = order;
		fit.params = p;
		fit.exog_columns = {"x0"};
		fit.terminal_state = Eigen::VectorXd::Zero(1);
		DesignMatrix wrong = named_design(Eigen::MatrixXd::Ones(1, 1));
		wrong.columns = {"other"};
		CHECK_THROWS_AS(forecast(fit, 1, wrong), std::invalid_argument);
	}
}

TEST_CASE("fit recovers planted parameters" * doctest::timeout(120)) {
	OptimOptions opts; // paper defaults: 100 iterations, tol 1e-5

	SUBCASE("ARMA(1,1) without exog") {
		const Eigen::VectorXd y = gen_arma(0.6, -0.3, 1.0, 4000, 101);
		const auto result = fit(y, empty_design(y.size()), ModelOrder{1, 0, 1, {}}, opts);
		REQUIRE(result.converged);
		CHECK(std::abs(result.params.phi(0) - 0.6) < 0.08);
		CHECK(std::abs(result.params.theta(0) + 0.3) < 0.1);
		CHECK(std::abs(result.params.sigma2 - 1.0) < 0.1);

		// Innovations behave like white noise.
		const auto& resid = result.residuals;
		REQUIRE(resid.size() == y.size());
		const double mean = resid.mean();
		double num = 0.0, den = 0.0;
		for (Eigen::Index t = 0; t + 1 < resid.size(); ++t) {
			num += (resid(t) - mean) * (resid(t + 1) - mean);
			den += (resid(t) - mean) * (resid(t) - mean);
		}
		CHECK(std::abs(num / den) < 0.1);
	}

	SUBCASE("planted regression coefficients") {
		Rng rng(55);
		const Eigen::Index n = 4000;
		Eigen::MatrixXd exog(n, 2);
		for (Eigen::Index i = 0; i < n; ++i) {
			exog(i, 0) = rng.normal();
			exog(i, 1) = rng.normal();
		}
		const Eigen::Vector2d beta(2.0, -1.0);
		const Eigen::VectorXd y = gen_arma(0.6, -0.3, 1.0, n, 77) + exog * beta;
		const auto result = fit(y, named_design(exog), ModelOrder{1, 0, 1, {}}, opts);
		REQUIRE(result.converged);
		CHECK(std::abs(result.params.beta(0) - 2.0) < 0.1);
		CHECK(std::abs(result.params.beta(1) + 1.0) < 0.1);
	}

	SUBCASE("constant series with a zero exog column never aborts") {
		const Eigen::VectorXd y = Eigen::VectorXd::Zero(64);
		const DesignMatrix x = named_design(Eigen::MatrixXd::Zero(64, 1));
		const auto result = fit(y, x, ModelOrder{1, 0, 1, {}}, opts);
		CHECK(std::isfinite(result.params.sigma2));
	}
}

TEST_CASE("fit result serializes order, parameters, and convergence") {
	const Eigen::VectorXd y = gen_arma(0.5, 0.2, 1.0, 300, 3);
	OptimOptions opts;
	const auto result = fit(y, named_design(Eigen::MatrixXd(y.size(), 0)), ModelOrder{1, 0, 1, {}}, opts);
	const std::string json = to_json(result);
	CHECK(json.find("\"phi\"") != std::string::npos);
	CHECK(json.find("\"loglik\"") != std::string::npos);
	CHECK(json.find("\"method\"") != std::string::npos);
}

TEST_SUITE_END();
