#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "gridcast/augmentation.hpp"
#include "gridcast/optimize.hpp"

namespace gridcast {

struct SeasonalOrder {
	int P = 0, D = 0, Q = 0, s = 0;
	bool operator==(const SeasonalOrder&) const = default;
};

struct ModelOrder {
	int p = 1;
	int d = 0;
	int q = 1;
	SeasonalOrder seasonal;

	void validate() const;
	bool operator==(const ModelOrder&) const = default;
};

/// Estimated coefficients of phi(B) y_t = theta(B) eps_t + beta' X_t.
/// phi/theta must keep their polynomial roots outside the unit circle
/// (stationarity / invertibility), sigma2 must be positive.
struct SarimaxParams {
	Eigen::VectorXd phi;
	Eigen::VectorXd theta;
	Eigen::VectorXd seasonal_phi;
	Eigen::VectorXd seasonal_theta;
	Eigen::VectorXd beta;
	double sigma2 = 1.0;
};

/// Harvey companion form of the ARMA part: state dim r = max(p, q+1),
/// transition's first column holds phi padded with zeros, ones on the
/// superdiagonal, innovation map (1, theta_1..theta_q) padded.
struct StateSpaceRep {
	Eigen::MatrixXd transition;    // r x r
	Eigen::RowVectorXd loading;    // 1 x r, e_1
	Eigen::VectorXd innovation_map; // r x 1

	Eigen::Index state_dim() const { return transition.rows(); }
};

/// Builds the companion form; seasonal orders are expanded by polynomial
/// multiplication before embedding. Throws on non-stationary phi,
/// non-invertible theta, or sigma2 <= 0.
StateSpaceRep to_state_space(const ModelOrder& order, const SarimaxParams& params);

struct KalmanRun {
	double loglik = 0.0;
	Eigen::VectorXd innovations;    // one-step prediction errors
	Eigen::VectorXd terminal_state; // filtered state after the last observation
	bool ok = false;
};

/// Exact Gaussian log-likelihood via the Kalman recursion with stationary
/// initialization (discrete Lyapunov solve). The regression effect
/// beta' X_t is subtracted from the observations. Returns -inf (ok=false)
/// instead of throwing when the recursion degenerates.
KalmanRun run_kalman(const StateSpaceRep& rep, const Eigen::VectorXd& y, const Eigen::MatrixXd& exog,
                     const Eigen::VectorXd& beta, double sigma2);

double kalman_loglik(const StateSpaceRep& rep, const Eigen::VectorXd& y, const DesignMatrix& X,
                     const Eigen::VectorXd& beta, double sigma2);

/// Unconstrained parameter vector layout:
///   [ar (p), ma (q), seasonal ar (P), seasonal ma (Q), beta (D), log sigma2].
/// AR/MA blocks pass through the partial-autocorrelation squashing
/// transform, so every real vector maps to a valid SarimaxParams; the
/// inverse is exact on valid parameters.
SarimaxParams transform_params(const Eigen::VectorXd& unconstrained, const ModelOrder& order,
                               Eigen::Index n_exog);
Eigen::VectorXd untransform_params(const SarimaxParams& params, const ModelOrder& order);

/// Iterated differencing (1-B)^d (1-B^s)^D. Anchors hold the leading
/// values consumed by each stage, which integrate() uses to reconstruct
/// the original series exactly.
struct Differenced {
	Eigen::VectorXd series;
	std::vector<Eigen::VectorXd> anchors;
};

Differenced difference(const Eigen::VectorXd& y, int d, int D, int s);
Eigen::VectorXd integrate(const Eigen::VectorXd& series, const std::vector<Eigen::VectorXd>& anchors,
                          int d, int D, int s);

struct FitResult {
	ModelOrder order;
	SarimaxParams params;
	double loglik = 0.0;
	bool converged = false;
	std::string method;      // optimizer that produced the estimate
	Eigen::VectorXd residuals;
	std::string failure;     // set when optimization failed outright

	// Forecasting state (not serialized).
	Eigen::VectorXd terminal_state;
	std::vector<std::string> exog_columns;
	Eigen::VectorXd fitted_series;            // differenced series the filter saw
	std::vector<Eigen::VectorXd> diff_anchors;
};

std::string to_json(const FitResult& fit);

/// Maximum-likelihood fit via the sequential optimizer cascade. Start
/// values: beta from OLS, AR/MA blocks at zero, sigma2 from the OLS
/// residual variance. Never throws for degenerate data; inspect
/// converged/failure instead.
FitResult fit(const Eigen::VectorXd& y, const DesignMatrix& X, const ModelOrder& order,
              const OptimOptions& opts);

/// Iterated h-step mean prediction: the filtered terminal state is
/// propagated through the transition matrix, beta' X_future added per
/// step, and (when d or D are nonzero) the differencing integrated back.
/// Raw values; clamping is the pipeline's job.
Eigen::VectorXd forecast(const FitResult& fit, int h, const DesignMatrix& X_future);

} // namespace gridcast
