#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <string>

namespace gridcast {

/// Scalar loss to minimize. May return NaN or +/-inf for invalid regions;
/// every method treats those as +inf. Must be deterministic.
struct Objective {
	std::function<double(const Eigen::VectorXd&)> evaluate;
};

struct OptimOptions {
	int max_iter = 100;
	double tol = 1e-5;
	double gradient_step = 1e-6; // relative central-difference step
};

enum class OptimMethod { lbfgsb, bfgs, nelder_mead };

std::string method_name(OptimMethod method);

struct OptimOutcome {
	Eigen::VectorXd x_star;
	double f_star = 0.0;
	bool converged = false;
	int iterations = 0;
	OptimMethod method = OptimMethod::lbfgsb;
};

/// Per-coordinate box; +/-inf entries disable a side.
struct Bounds {
	Eigen::VectorXd lower;
	Eigen::VectorXd upper;

	static Bounds unbounded(Eigen::Index n);
	bool contains(const Eigen::VectorXd& x) const;
	Eigen::VectorXd clamp(const Eigen::VectorXd& x) const;
};

/// Central finite-difference gradient with per-coordinate step
/// rel_step * max(1, |x_i|). Non-finite samples yield non-finite entries.
Eigen::VectorXd fd_gradient(const Objective& obj, const Eigen::VectorXd& x, double rel_step);

/// Nelder-Mead simplex (reflection 1, expansion 2, contraction 0.5, shrink
/// 0.5). Converged when the simplex function-value spread drops below tol
/// and the simplex itself has collapsed to sqrt(tol) scale.
OptimOutcome nelder_mead(const Objective& obj, const Eigen::VectorXd& x0, const OptimOptions& opts);

/// Dense BFGS with finite-difference gradients and Armijo backtracking
/// (c = 1e-4, step halving). Converged when the gradient infinity norm
/// drops below tol.
OptimOutcome bfgs(const Objective& obj, const Eigen::VectorXd& x0, const OptimOptions& opts);

/// Limited-memory (m = 10) quasi-Newton with gradient projection onto the
/// box; iterates stay feasible. Convergence on the projected gradient.
OptimOutcome lbfgsb(const Objective& obj, const Eigen::VectorXd& x0, const Bounds& bounds,
                    const OptimOptions& opts);

/// The sequential strategy: L-BFGS-B, then BFGS, then Nelder-Mead. Returns
/// the first converged outcome; otherwise the best finite attempt flagged
/// non-converged. Throws std::runtime_error when every method produced
/// only non-finite losses.
OptimOutcome sequential_optimize(const Objective& obj, const Eigen::VectorXd& x0,
                                 const std::optional<Bounds>& bounds, const OptimOptions& opts);

} // namespace gridcast
