#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace gridcast::testing {

/// Quadratic 0.5 x'Ax + b'x with A positive definite.
struct Quadratic {
	Eigen::MatrixXd a;
	Eigen::VectorXd b;

	double operator()(const Eigen::VectorXd& x) const { return 0.5 * x.dot(a * x) + b.dot(x); }
	Eigen::VectorXd gradient(const Eigen::VectorXd& x) const { return a * x + b; }
	Eigen::VectorXd minimizer() const { return a.llt().solve(-b); }
};

/// Exhaustive active-set solution of min 0.5 x'Ax + b'x s.t. lo <= x <= hi:
/// every {lower, free, upper} assignment is tried and the best feasible
/// stationary candidate wins. Exponential in n; intended for n <= 10.
inline Eigen::VectorXd box_quadratic_oracle(const Quadratic& q, const Eigen::VectorXd& lo,
                                            const Eigen::VectorXd& hi) {
	const auto n = q.b.size();
	std::vector<int> state(static_cast<std::size_t>(n), 0); // 0 lower, 1 free, 2 upper
	Eigen::VectorXd best;
	double best_value = std::numeric_limits<double>::infinity();

	const auto total = static_cast<std::size_t>(std::pow(3.0, static_cast<double>(n)));
	for (std::size_t code = 0; code < total; ++code) {
		std::size_t rem = code;
		std::vector<Eigen::Index> free_idx;
		Eigen::VectorXd x(n);
		for (Eigen::Index i = 0; i < n; ++i) {
			const int s = static_cast<int>(rem % 3);
			rem /= 3;
			state[static_cast<std::size_t>(i)] = s;
			if (s == 0) x(i) = lo(i);
			else if (s == 2) x(i) = hi(i);
			else free_idx.push_back(i);
		}
		if (!free_idx.empty()) {
			const auto m = static_cast<Eigen::Index>(free_idx.size());
			Eigen::MatrixXd aff(m, m);
			Eigen::VectorXd rhs(m);
			for (Eigen::Index r = 0; r < m; ++r) {
				rhs(r) = -q.b(free_idx[static_cast<std::size_t>(r)]);
				for (Eigen::Index c = 0; c < m; ++c) {
					aff(r, c) = q.a(free_idx[static_cast<std::size_t>(r)], free_idx[static_cast<std::size_t>(c)]);
				}
				for (Eigen::Index i = 0; i < n; ++i) {
					if (state[static_cast<std::size_t>(i)] != 1) {
						rhs(r) -= q.a(free_idx[static_cast<std::size_t>(r)], i) * x(i);
					}
				}
			}
			const Eigen::VectorXd xf = aff.ldlt().solve(rhs);
			bool feasible = true;
			for (Eigen::Index r = 0; r < m; ++r) {
				const auto i = free_idx[static_cast<std::size_t>(r)];
				if (xf(r) < lo(i) || xf(r) > hi(i)) {
					feasible = false;
					break;
				}
				x(i) = xf(r);
			}
			if (!feasible) continue;
		}
		const double value = q(x);
		if (value < best_value) {
			best_value = value;
			best = x;
		}
	}
	if (best.size() == 0) throw std::runtime_error("box_quadratic_oracle: no feasible candidate");
	return best;
}

inline double rosenbrock(const Eigen::VectorXd& x) {
	const double a = 1.0 - x(0);
	const double b = x(1) - x(0) * x(0);
	return a * a + 100.0 * b * b;
}

/// ARMA(1,1) autocovariances for y_t = phi y_{t-1} + eps_t + theta eps_{t-1}.
inline double arma11_autocov(double phi, double theta, double sigma2, int lag) {
	const double denom = 1.0 - phi * phi;
	const double gamma0 = sigma2 * (1.0 + 2.0 * phi * theta + theta * theta) / denom;
	if (lag == 0) return gamma0;
	const double gamma1 = sigma2 * (1.0 + phi * theta) * (phi + theta) / denom;
	double gamma = gamma1;
	for (int k = 2; k <= lag; ++k) gamma *= phi;
	return gamma;
}

/// Direct multivariate-normal log-density of a zero-mean ARMA(1,1) sample,
/// assembled from the analytic autocovariances. The module's master oracle
/// for the Kalman likelihood at small T.
inline double arma11_mvn_loglik(const Eigen::VectorXd& y, double phi, double theta, double sigma2) {
	const auto n = y.size();
	Eigen::MatrixXd cov(n, n);
	for (Eigen::Index i = 0; i < n; ++i) {
		for (Eigen::Index j = 0; j < n; ++j) {
			cov(i, j) = arma11_autocov(phi, theta, sigma2, static_cast<int>(std::abs(i - j)));
		}
	}
	const Eigen::LLT<Eigen::MatrixXd> llt(cov);
	if (llt.info() != Eigen::Success) throw std::runtime_error("oracle: covariance not PD");
	const Eigen::VectorXd alpha = llt.solve(y);
	double log_det = 0.0;
	for (Eigen::Index i = 0; i < n; ++i) log_det += 2.0 * std::log(llt.matrixL()(i, i));
	constexpr double log_two_pi = 1.8378770664093454836;
	return -0.5 * (static_cast<double>(n) * log_two_pi + log_det + y.dot(alpha));
}

} // namespace gridcast::testing
