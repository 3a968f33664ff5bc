#include "gridcast/sarimax.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "gridcast/csv.hpp"

namespace gridcast {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Polynomials are stored as coefficient vectors c with c[0] = 1, i.e.
// c(B) = 1 + c_1 B + ... + c_n B^n.
Eigen::VectorXd poly_from_ar(const Eigen::VectorXd& phi) {
	Eigen::VectorXd c = Eigen::VectorXd::Zero(phi.size() + 1);
	c(0) = 1.0;
	c.tail(phi.size()) = -phi;
	return c;
}

Eigen::VectorXd poly_from_ma(const Eigen::VectorXd& theta) {
	Eigen::VectorXd c = Eigen::VectorXd::Zero(theta.size() + 1);
	c(0) = 1.0;
	c.tail(theta.size()) = theta;
	return c;
}

Eigen::VectorXd poly_seasonal(const Eigen::VectorXd& coeffs, int s, bool ar) {
	Eigen::VectorXd c = Eigen::VectorXd::Zero(coeffs.size() * s + 1);
	c(0) = 1.0;
	for (Eigen::Index j = 0; j < coeffs.size(); ++j) {
		c((j + 1) * s) = ar ? -coeffs(j) : coeffs(j);
	}
	return c;
}

Eigen::VectorXd poly_multiply(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
	Eigen::VectorXd out = Eigen::VectorXd::Zero(a.size() + b.size() - 1);
	for (Eigen::Index i = 0; i < a.size(); ++i) {
		for (Eigen::Index j = 0; j < b.size(); ++j) {
			out(i + j) += a(i) * b(j);
		}
	}
	return out;
}

// Spectral radius of the companion matrix of the monic polynomial
// w^n + c_1 w^{n-1} + ... + c_n.
double companion_spectral_radius(const Eigen::VectorXd& monic_tail) {
	const auto n = monic_tail.size();
	if (n == 0) return 0.0;
	Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(n, n);
	companion.row(0) = -monic_tail.transpose();
	for (Eigen::Index i = 1; i < n; ++i) companion(i, i - 1) = 1.0;
	const Eigen::VectorXcd eigs = Eigen::EigenSolver<Eigen::MatrixXd>(companion, false).eigenvalues();
	double radius = 0.0;
	for (Eigen::Index i = 0; i < n; ++i) radius = std::max(radius, std::abs(eigs(i)));
	return radius;
}

// phi as in phi(B) = 1 - sum phi_k B^k; roots outside the unit circle
// iff the companion matrix built from phi has spectral radius < 1.
bool ar_stationary(const Eigen::VectorXd& phi) {
	return companion_spectral_radius(-phi) < 1.0 - 1e-10;
}

// theta as in theta(B) = 1 + sum theta_k B^k.
bool ma_invertible(const Eigen::VectorXd& theta) {
	return companion_spectral_radius(theta) < 1.0 - 1e-10;
}

// Durbin-Levinson map from partial autocorrelations in (-1, 1) to the
// coefficients of a stationary AR polynomial.
Eigen::VectorXd pacf_to_ar(const Eigen::VectorXd& pacf) {
	const auto k = pacf.size();
	Eigen::VectorXd params = pacf;
	Eigen::VectorXd work = pacf;
	for (Eigen::Index j = 1; j < k; ++j) {
		const double a = params(j);
		for (Eigen::Index i = 0; i < j; ++i) {
			work(i) = params(i) - a * params(j - i - 1);
		}
		params.head(j) = work.head(j);
	}
	return params;
}

Eigen::VectorXd ar_to_pacf(const Eigen::VectorXd& ar) {
	const auto k = ar.size();
	Eigen::VectorXd params = ar;
	Eigen::VectorXd work(k);
	for (Eigen::Index j = k - 1; j > 0; --j) {
		const double a = params(j);
		const double denom = 1.0 - a * a;
		if (denom <= 0.0) {
			throw std::invalid_argument("untransform: parameters are not strictly stationary/invertible");
		}
		for (Eigen::Index i = 0; i < j; ++i) {
			work(i) = (params(i) + a * params(j - i - 1)) / denom;
		}
		params.head(j) = work.head(j);
	}
	return params;
}

double squash(double u) { return u / std::sqrt(1.0 + u * u); }

double unsquash(double r) {
	const double denom = 1.0 - r * r;
	if (denom <= 0.0) {
		throw std::invalid_argument("untransform: partial autocorrelation at the unit boundary");
	}
	return r / std::sqrt(denom);
}

Eigen::VectorXd constrain_block(const Eigen::VectorXd& u) {
	Eigen::VectorXd pacf(u.size());
	for (Eigen::Index i = 0; i < u.size(); ++i) pacf(i) = squash(u(i));
	return pacf_to_ar(pacf);
}

Eigen::VectorXd unconstrain_block(const Eigen::VectorXd& coeffs) {
	const Eigen::VectorXd pacf = ar_to_pacf(coeffs);
	Eigen::VectorXd u(pacf.size());
	for (Eigen::Index i = 0; i < pacf.size(); ++i) u(i) = unsquash(pacf(i));
	return u;
}

// Solves P = T P T' + Q by the vectorized linear system; fails (returns
// false) when the transition has a unit root.
bool solve_lyapunov(const Eigen::MatrixXd& transition, const Eigen::MatrixXd& q, Eigen::MatrixXd& out) {
	const auto r = transition.rows();
	const auto n = r * r;
	Eigen::MatrixXd system = Eigen::MatrixXd::Identity(n, n);
	for (Eigen::Index i = 0; i < r; ++i) {
		for (Eigen::Index j = 0; j < r; ++j) {
			for (Eigen::Index k = 0; k < r; ++k) {
				for (Eigen::Index l = 0; l < r; ++l) {
					// vec index: column-major, (row k, col l) entry of P
					system(i + j * r, k + l * r) -= transition(i, k) * transition(j, l);
				}
			}
		}
	}
	Eigen::VectorXd rhs(n);
	for (Eigen::Index l = 0; l < r; ++l) {
		for (Eigen::Index k = 0; k < r; ++k) rhs(k + l * r) = q(k, l);
	}
	const Eigen::FullPivLU<Eigen::MatrixXd> lu(system);
	if (!lu.isInvertible()) return false;
	const Eigen::VectorXd solution = lu.solve(rhs);
	if (!solution.allFinite()) return false;
	out.resize(r, r);
	for (Eigen::Index l = 0; l < r; ++l) {
		for (Eigen::Index k = 0; k < r; ++k) out(k, l) = solution(k + l * r);
	}
	out = 0.5 * (out + out.transpose()).eval();
	return true;
}

} // namespace

void ModelOrder::validate() const {
	if (p < 0 || d < 0 || q < 0) throw std::invalid_argument("model order: p, d, q must be non-negative");
	if (seasonal.P < 0 || seasonal.D < 0 || seasonal.Q < 0 || seasonal.s < 0) {
		throw std::invalid_argument("model order: seasonal orders must be non-negative");
	}
	const bool seasonal_terms = seasonal.P != 0 || seasonal.D != 0 || seasonal.Q != 0;
	if (seasonal_terms && seasonal.s == 0) {
		throw std::invalid_argument("model order: seasonal terms need a nonzero period");
	}
	if (!seasonal_terms && seasonal.s != 0) {
		throw std::invalid_argument("model order: seasonal period without seasonal terms");
	}
}

StateSpaceRep to_state_space(const ModelOrder& order, const SarimaxParams& params) {
	order.validate();
	if (params.phi.size() != order.p || params.theta.size() != order.q ||
	    params.seasonal_phi.size() != order.seasonal.P || params.seasonal_theta.size() != order.seasonal.Q) {
		throw std::invalid_argument("state space: coefficient sizes do not match the model order");
	}
	if (!(params.sigma2 > 0.0) || !std::isfinite(params.sigma2)) {
		throw std::invalid_argument("state space: sigma2 must be positive and finite");
	}

	// Expand seasonal factors by polynomial multiplication.
	Eigen::VectorXd ar_poly = poly_from_ar(params.phi);
	Eigen::VectorXd ma_poly = poly_from_ma(params.theta);
	if (order.seasonal.P > 0) {
		ar_poly = poly_multiply(ar_poly, poly_seasonal(params.seasonal_phi, order.seasonal.s, true));
	}
	if (order.seasonal.Q > 0) {
		ma_poly = poly_multiply(ma_poly, poly_seasonal(params.seasonal_theta, order.seasonal.s, false));
	}
	const Eigen::VectorXd phi_full = -ar_poly.tail(ar_poly.size() - 1);
	const Eigen::VectorXd theta_full = ma_poly.tail(ma_poly.size() - 1);

	if (!ar_stationary(phi_full)) {
		throw std::invalid_argument("state space: AR polynomial is not stationary");
	}
	if (!ma_invertible(theta_full)) {
		throw std::invalid_argument("state space: MA polynomial is not invertible");
	}

	const auto pf = phi_full.size();
	const auto qf = theta_full.size();
	const Eigen::Index r = std::max<Eigen::Index>(std::max(pf, qf + 1), 1);

	StateSpaceRep rep;
	rep.transition = Eigen::MatrixXd::Zero(r, r);
	rep.transition.col(0).head(pf) = phi_full;
	for (Eigen::Index i = 0; i + 1 < r; ++i) rep.transition(i, i + 1) = 1.0;
	rep.loading = Eigen::RowVectorXd::Zero(r);
	rep.loading(0) = 1.0;
	rep.innovation_map = Eigen::VectorXd::Zero(r);
	rep.innovation_map(0) = 1.0;
	rep.innovation_map.tail(r - 1).head(qf) = theta_full;
	return rep;
}

KalmanRun run_kalman(const StateSpaceRep& rep, const Eigen::VectorXd& y, const Eigen::MatrixXd& exog,
                     const Eigen::VectorXd& beta, double sigma2) {
	KalmanRun run;
	run.loglik = kNegInf;

	const auto n = y.size();
	const auto r = rep.state_dim();
	if (exog.cols() != beta.size()) return run;
	if (exog.cols() > 0 && exog.rows() != n) return run;
	if (!y.allFinite() || !exog.allFinite() || !beta.allFinite() || !(sigma2 > 0.0) ||
	    !std::isfinite(sigma2)) {
		return run;
	}

	Eigen::VectorXd ystar = y;
	if (beta.size() > 0) ystar -= exog * beta;

	const Eigen::MatrixXd innovation_cov =
	    sigma2 * rep.innovation_map * rep.innovation_map.transpose();
	Eigen::MatrixXd cov;
	if (!solve_lyapunov(rep.transition, innovation_cov, cov)) return run;

	Eigen::VectorXd state = Eigen::VectorXd::Zero(r);
	run.innovations.resize(n);

	double loglik = 0.0;
	constexpr double log_two_pi = 1.8378770664093454836; // ln(2*pi)
	for (Eigen::Index t = 0; t < n; ++t) {
		const double innovation = ystar(t) - state(0);
		const double variance = cov(0, 0);
		if (!(variance > 1e-300) || !std::isfinite(variance) || !std::isfinite(innovation)) {
			return run;
		}
		loglik -= 0.5 * (log_two_pi + std::log(variance) + innovation * innovation / variance);
		run.innovations(t) = innovation;

		// Filter update, then one-step prediction.
		const Eigen::VectorXd gain = cov.col(0) / variance;
		const Eigen::VectorXd filtered = state + gain * innovation;
		const Eigen::MatrixXd filtered_cov = cov - gain * cov.row(0);
		if (t + 1 == n) run.terminal_state = filtered;
		state = rep.transition * filtered;
		cov = rep.transition * filtered_cov * rep.transition.transpose() + innovation_cov;
		cov = 0.5 * (cov + cov.transpose()).eval();
	}
	if (!std::isfinite(loglik)) return run;
	run.loglik = loglik;
	run.ok = true;
	return run;
}

double kalman_loglik(const StateSpaceRep& rep, const Eigen::VectorXd& y, const DesignMatrix& X,
                     const Eigen::VectorXd& beta, double sigma2) {
	if (X.cols() > 0 && X.rows() != y.size()) {
		throw std::invalid_argument("kalman_loglik: design matrix rows do not align with y");
	}
	return run_kalman(rep, y, X.values, beta, sigma2).loglik;
}

SarimaxParams transform_params(const Eigen::VectorXd& unconstrained, const ModelOrder& order,
                               Eigen::Index n_exog) {
	order.validate();
	const Eigen::Index expected =
	    order.p + order.q + order.seasonal.P + order.seasonal.Q + n_exog + 1;
	if (unconstrained.size() != expected) {
		throw std::invalid_argument("transform_params: expected vector of length " + std::to_string(expected));
	}
	SarimaxParams params;
	Eigen::Index at = 0;
	params.phi = constrain_block(unconstrained.segment(at, order.p));
	at += order.p;
	// theta = -constrain(-u) keeps invertibility and maps 0 to 0.
	params.theta = -constrain_block(-unconstrained.segment(at, order.q));
	at += order.q;
	params.seasonal_phi = constrain_block(unconstrained.segment(at, order.seasonal.P));
	at += order.seasonal.P;
	params.seasonal_theta = -constrain_block(-unconstrained.segment(at, order.seasonal.Q));
	at += order.seasonal.Q;
	params.beta = unconstrained.segment(at, n_exog);
	at += n_exog;
	params.sigma2 = std::exp(unconstrained(at));
	return params;
}

Eigen::VectorXd untransform_params(const SarimaxParams& params, const ModelOrder& order) {
	order.validate();
	if (params.phi.size() != order.p || params.theta.size() != order.q ||
	    params.seasonal_phi.size() != order.seasonal.P || params.seasonal_theta.size() != order.seasonal.Q) {
		throw std::invalid_argument("untransform_params: coefficient sizes do not match the order");
	}
	if (!(params.sigma2 > 0.0)) throw std::invalid_argument("untransform_params: sigma2 must be positive");
	Eigen::VectorXd u(order.p + order.q + order.seasonal.P + order.seasonal.Q + params.beta.size() + 1);
	Eigen::Index at = 0;
	u.segment(at, order.p) = unconstrain_block(params.phi);
	at += order.p;
	u.segment(at, order.q) = -unconstrain_block(-params.theta);
	at += order.q;
	u.segment(at, order.seasonal.P) = unconstrain_block(params.seasonal_phi);
	at += order.seasonal.P;
	u.segment(at, order.seasonal.Q) = -unconstrain_block(-params.seasonal_theta);
	at += order.seasonal.Q;
	u.segment(at, params.beta.size()) = params.beta;
	at += params.beta.size();
	u(at) = std::log(params.sigma2);
	return u;
}

Differenced difference(const Eigen::VectorXd& y, int d, int D, int s) {
	if (d < 0 || D < 0) throw std::invalid_argument("difference: orders must be non-negative");
	if (D > 0 && s <= 0) throw std::invalid_argument("difference: seasonal differencing needs a period");
	const Eigen::Index consumed = d + D * std::max(s, 0);
	if (y.size() <= consumed) {
		throw std::invalid_argument("difference: series too short for the differencing orders");
	}
	Differenced out;
	out.series = y;
	for (int k = 0; k < d; ++k) {
		out.anchors.push_back(out.series.head(1));
		out.series = (out.series.tail(out.series.size() - 1) - out.series.head(out.series.size() - 1)).eval();
	}
	for (int k = 0; k < D; ++k) {
		out.anchors.push_back(out.series.head(s));
		out.series = (out.series.tail(out.series.size() - s) - out.series.head(out.series.size() - s)).eval();
	}
	return out;
}

Eigen::VectorXd integrate(const Eigen::VectorXd& series, const std::vector<Eigen::VectorXd>& anchors,
                          int d, int D, int s) {
	if (anchors.size() != static_cast<std::size_t>(d + D)) {
		throw std::invalid_argument("integrate: anchor count does not match the differencing orders");
	}
	Eigen::VectorXd out = series;
	// Invert stages in reverse application order: seasonal first.
	for (int k = D; k-- > 0;) {
		const auto& anchor = anchors[static_cast<std::size_t>(d + k)];
		if (anchor.size() != s) throw std::invalid_argument("integrate: seasonal anchor length mismatch");
		Eigen::VectorXd next(out.size() + s);
		next.head(s) = anchor;
		for (Eigen::Index t = 0; t < out.size(); ++t) next(t + s) = out(t) + next(t);
		out = std::move(next);
	}
	for (int k = d; k-- > 0;) {
		const auto& anchor = anchors[static_cast<std::size_t>(k)];
		if (anchor.size() != 1) throw std::invalid_argument("integrate: anchor length mismatch");
		Eigen::VectorXd next(out.size() + 1);
		next(0) = anchor(0);
		for (Eigen::Index t = 0; t < out.size(); ++t) next(t + 1) = out(t) + next(t);
		out = std::move(next);
	}
	return out;
}

std::string to_json(const FitResult& fit) {
	nlohmann::ordered_json j;
	j["order"] = {{"p", fit.order.p},
	              {"d", fit.order.d},
	              {"q", fit.order.q},
	              {"seasonal",
	               {{"P", fit.order.seasonal.P},
	                {"D", fit.order.seasonal.D},
	                {"Q", fit.order.seasonal.Q},
	                {"s", fit.order.seasonal.s}}}};
	auto vec = [](const Eigen::VectorXd& v) {
		nlohmann::ordered_json out = nlohmann::ordered_json::array();
		for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
		return out;
	};
	j["params"] = {{"phi", vec(fit.params.phi)},
	               {"theta", vec(fit.params.theta)},
	               {"seasonal_phi", vec(fit.params.seasonal_phi)},
	               {"seasonal_theta", vec(fit.params.seasonal_theta)},
	               {"beta", vec(fit.params.beta)},
	               {"sigma2", fit.params.sigma2}};
	j["loglik"] = std::isfinite(fit.loglik) ? nlohmann::ordered_json(fit.loglik)
	                                        : nlohmann::ordered_json(nullptr);
	j["converged"] = fit.converged;
	j["method"] = fit.method;
	if (!fit.failure.empty()) j["failure"] = fit.failure;
	return j.dump(2);
}

FitResult fit(const Eigen::VectorXd& y, const DesignMatrix& X, const ModelOrder& order,
              const OptimOptions& opts) {
	order.validate();
	const Eigen::Index n_exog = X.cols();
	if (n_exog > 0 && X.rows() != y.size()) {
		throw std::invalid_argument("fit: design matrix rows do not align with y");
	}
	const Eigen::Index consumed = order.d + order.seasonal.D * order.seasonal.s;
	if (y.size() <= order.p + order.q + 1 + consumed) {
		throw std::invalid_argument("fit: series too short for the model order");
	}

	FitResult result;
	result.order = order;
	result.exog_columns = X.columns;
	result.method = "none";

	// Work on the differenced scale; exog rows are trimmed to stay aligned.
	Eigen::VectorXd y_work = y;
	Eigen::MatrixXd exog_work = X.values;
	if (order.d > 0 || order.seasonal.D > 0) {
		Differenced diff = difference(y, order.d, order.seasonal.D, order.seasonal.s);
		y_work = std::move(diff.series);
		result.diff_anchors = std::move(diff.anchors);
		if (n_exog > 0) exog_work = X.values.bottomRows(y_work.size());
	}
	result.fitted_series = y_work;

	// OLS start values.
	Eigen::VectorXd beta0 = Eigen::VectorXd::Zero(n_exog);
	Eigen::VectorXd resid = y_work;
	if (n_exog > 0 && y_work.allFinite() && exog_work.allFinite()) {
		beta0 = exog_work.colPivHouseholderQr().solve(y_work);
		if (!beta0.allFinite()) beta0.setZero();
		resid = y_work - exog_work * beta0;
	}
	double sigma0 = resid.allFinite() ? resid.squaredNorm() / static_cast<double>(resid.size()) : 1.0;
	if (!(sigma0 > 1e-12) || !std::isfinite(sigma0)) sigma0 = 1e-12;

	const Eigen::Index n_arma = order.p + order.q + order.seasonal.P + order.seasonal.Q;
	Eigen::VectorXd u0 = Eigen::VectorXd::Zero(n_arma + n_exog + 1);
	u0.segment(n_arma, n_exog) = beta0;
	u0(n_arma + n_exog) = std::log(sigma0);

	const Eigen::VectorXd y_obj = y_work;
	const Eigen::MatrixXd exog_obj = exog_work;
	Objective objective;
	objective.evaluate = [&order, n_exog, y_obj, exog_obj](const Eigen::VectorXd& u) -> double {
		try {
			const SarimaxParams params = transform_params(u, order, n_exog);
			const StateSpaceRep rep = to_state_space(order, params);
			const KalmanRun run = run_kalman(rep, y_obj, exog_obj, params.beta, params.sigma2);
			return run.ok ? -run.loglik : std::numeric_limits<double>::infinity();
		} catch (const std::exception&) {
			return std::numeric_limits<double>::infinity();
		}
	};

	Eigen::VectorXd u_star = u0;
	try {
		const OptimOutcome outcome = sequential_optimize(objective, u0, std::nullopt, opts);
		u_star = outcome.x_star;
		result.converged = outcome.converged && std::isfinite(outcome.f_star);
		result.method = method_name(outcome.method);
	} catch (const std::exception& e) {
		result.failure = e.what();
		result.converged = false;
	}

	result.params = transform_params(u_star, order, n_exog);
	const KalmanRun final_run =
	    run_kalman(to_state_space(order, result.params), y_work, exog_work, result.params.beta,
	               result.params.sigma2);
	result.loglik = final_run.loglik;
	if (final_run.ok) {
		result.residuals = final_run.innovations;
		result.terminal_state = final_run.terminal_state;
	} else {
		result.converged = false;
		if (result.failure.empty()) result.failure = "likelihood not finite at the returned parameters";
		result.terminal_state = Eigen::VectorXd::Zero(to_state_space(order, result.params).state_dim());
	}
	return result;
}

Eigen::VectorXd forecast(const FitResult& fit, int h, const DesignMatrix& X_future) {
	if (h < 1) throw std::invalid_argument("forecast: horizon must be positive");
	if (X_future.columns != fit.exog_columns) {
		throw std::invalid_argument("forecast: future exogenous columns do not match the fit");
	}
	const Eigen::Index n_exog = static_cast<Eigen::Index>(fit.exog_columns.size());
	if (n_exog > 0 && X_future.rows() != h) {
		throw std::invalid_argument("forecast: expected " + std::to_string(h) + " future rows");
	}

	const StateSpaceRep rep = to_state_space(fit.order, fit.params);
	Eigen::VectorXd state = fit.terminal_state;
	if (state.size() != rep.state_dim()) state = Eigen::VectorXd::Zero(rep.state_dim());

	Eigen::VectorXd raw(h);
	for (int k = 0; k < h; ++k) {
		state = rep.transition * state;
		double value = state(0);
		if (n_exog > 0) value += fit.params.beta.dot(X_future.values.row(k));
		raw(k) = value;
	}

	if (fit.order.d == 0 && fit.order.seasonal.D == 0) return raw;

	// Integrate back to the original scale through the stored anchors.
	Eigen::VectorXd joined(fit.fitted_series.size() + h);
	joined.head(fit.fitted_series.size()) = fit.fitted_series;
	joined.tail(h) = raw;
	const Eigen::VectorXd full =
	    integrate(joined, fit.diff_anchors, fit.order.d, fit.order.seasonal.D, fit.order.seasonal.s);
	return full.tail(h);
}

} // namespace gridcast
