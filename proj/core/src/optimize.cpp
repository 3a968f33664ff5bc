#include "gridcast/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace gridcast {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kArmijoC = 1e-4;
constexpr double kMinStep = 1e-20;
constexpr int kLbfgsMemory = 10;

double sanitize(double f) { return std::isfinite(f) ? f : kInf; }

void require_finite_start(const Objective& obj, const Eigen::VectorXd& x0, double& f0) {
	f0 = obj.evaluate(x0);
	if (!std::isfinite(f0)) {
		throw std::invalid_argument("optimizer: objective is non-finite at the start point");
	}
}

} // namespace

std::string method_name(OptimMethod method) {
	switch (method) {
	case OptimMethod::lbfgsb:
		return "lbfgsb";
	case OptimMethod::bfgs:
		return "bfgs";
	case OptimMethod::nelder_mead:
		return "nelder_mead";
	}
	return {};
}

Bounds Bounds::unbounded(Eigen::Index n) {
	Bounds b;
	b.lower = Eigen::VectorXd::Constant(n, -kInf);
	b.upper = Eigen::VectorXd::Constant(n, kInf);
	return b;
}

bool Bounds::contains(const Eigen::VectorXd& x) const {
	return (x.array() >= lower.array()).all() && (x.array() <= upper.array()).all();
}

Eigen::VectorXd Bounds::clamp(const Eigen::VectorXd& x) const {
	return x.cwiseMax(lower).cwiseMin(upper);
}

Eigen::VectorXd fd_gradient(const Objective& obj, const Eigen::VectorXd& x, double rel_step) {
	const auto n = x.size();
	Eigen::VectorXd grad(n);
	Eigen::VectorXd probe = x;
	for (Eigen::Index i = 0; i < n; ++i) {
		const double h = rel_step * std::max(1.0, std::abs(x(i)));
		probe(i) = x(i) + h;
		const double fp = obj.evaluate(probe);
		probe(i) = x(i) - h;
		const double fm = obj.evaluate(probe);
		probe(i) = x(i);
		grad(i) = (fp - fm) / (2.0 * h);
	}
	return grad;
}

OptimOutcome nelder_mead(const Objective& obj, const Eigen::VectorXd& x0, const OptimOptions& opts) {
	constexpr double alpha = 1.0; // reflection
	constexpr double gamma = 2.0; // expansion
	constexpr double rho = 0.5;   // contraction
	constexpr double sigma = 0.5; // shrink

	double f0 = 0.0;
	require_finite_start(obj, x0, f0);

	const auto n = x0.size();
	const auto m = static_cast<std::size_t>(n) + 1;
	std::vector<Eigen::VectorXd> vertex(m, x0);
	std::vector<double> value(m);
	value[0] = f0;
	for (Eigen::Index i = 0; i < n; ++i) {
		auto& v = vertex[static_cast<std::size_t>(i) + 1];
		v(i) += v(i) != 0.0 ? 0.05 * std::abs(v(i)) : 0.00025;
		value[static_cast<std::size_t>(i) + 1] = sanitize(obj.evaluate(v));
	}

	std::vector<std::size_t> order(m);
	OptimOutcome out;
	out.method = OptimMethod::nelder_mead;

	int iter = 0;
	for (; iter < opts.max_iter; ++iter) {
		std::iota(order.begin(), order.end(), 0);
		std::stable_sort(order.begin(), order.end(),
		                 [&](std::size_t a, std::size_t b) { return value[a] < value[b]; });

		const double best = value[order.front()];
		const double worst = value[order.back()];
		// Value spread below tol alone can fire while wide vertices straddle
		// the minimum symmetrically; require the simplex to have collapsed too.
		double diameter = 0.0;
		for (std::size_t k = 1; k < m; ++k) {
			diameter = std::max(diameter,
			            (vertex[order[k]] - vertex[order.front()]).lpNorm<Eigen::Infinity>());
		}
		const double x_scale = std::max(1.0, vertex[order.front()].lpNorm<Eigen::Infinity>());
		if (worst - best < opts.tol && diameter <= std::sqrt(opts.tol) * x_scale) {
			out.converged = true;
			break;
		}

		Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
		for (std::size_t k = 0; k + 1 < m; ++k) centroid += vertex[order[k]];
		centroid /= static_cast<double>(m - 1);

		const auto worst_idx = order.back();
		const double second_worst = value[order[m - 2]];

		const Eigen::VectorXd reflected = centroid + alpha * (centroid - vertex[worst_idx]);
		const double fr = sanitize(obj.evaluate(reflected));

		if (fr < best) {
			const Eigen::VectorXd expanded = centroid + gamma * (centroid - vertex[worst_idx]);
			const double fe = sanitize(obj.evaluate(expanded));
			if (fe < fr) {
				vertex[worst_idx] = expanded;
				value[worst_idx] = fe;
			} else {
				vertex[worst_idx] = reflected;
				value[worst_idx] = fr;
			}
			continue;
		}
		if (fr < second_worst) {
			vertex[worst_idx] = reflected;
			value[worst_idx] = fr;
			continue;
		}

		// Contract toward the better of the reflected and worst points.
		const bool outside = fr < value[worst_idx];
		const Eigen::VectorXd contracted =
		    outside ? centroid + rho * (reflected - centroid) : centroid + rho * (vertex[worst_idx] - centroid);
		const double fc = sanitize(obj.evaluate(contracted));
		if (fc < std::min(fr, value[worst_idx])) {
			vertex[worst_idx] = contracted;
			value[worst_idx] = fc;
			continue;
		}

		const auto best_idx = order.front();
		for (std::size_t k = 0; k < m; ++k) {
			if (k == best_idx) continue;
			vertex[k] = vertex[best_idx] + sigma * (vertex[k] - vertex[best_idx]);
			value[k] = sanitize(obj.evaluate(vertex[k]));
		}
	}

	const auto best_it = std::min_element(value.begin(), value.end());
	out.x_star = vertex[static_cast<std::size_t>(best_it - value.begin())];
	out.f_star = *best_it;
	out.iterations = iter;
	return out;
}

namespace {

// Backtracking Armijo search along d from (x, f, g). On success updates
// x/f in place and returns true. target_box, when set, projects trial
// points onto the box before evaluating.
bool armijo_search(const Objective& obj, const Bounds* box, Eigen::VectorXd& x, double& f,
                   const Eigen::VectorXd& g, const Eigen::VectorXd& d) {
	double t = 1.0;
	while (t >= kMinStep) {
		Eigen::VectorXd trial = x + t * d;
		if (box) trial = box->clamp(trial);
		const Eigen::VectorXd step = trial - x;
		const double slope = g.dot(step);
		const double ft = obj.evaluate(trial);
		if (std::isfinite(ft) && ft <= f + kArmijoC * slope && slope < 0.0) {
			x = std::move(trial);
			f = ft;
			return true;
		}
		t *= 0.5;
	}
	return false;
}

} // namespace

OptimOutcome bfgs(const Objective& obj, const Eigen::VectorXd& x0, const OptimOptions& opts) {
	double f = 0.0;
	require_finite_start(obj, x0, f);

	const auto n = x0.size();
	Eigen::VectorXd x = x0;
	Eigen::VectorXd g = fd_gradient(obj, x, opts.gradient_step);
	Eigen::MatrixXd h_inv = Eigen::MatrixXd::Identity(n, n);

	OptimOutcome out;
	out.method = OptimMethod::bfgs;

	int iter = 0;
	for (; iter < opts.max_iter; ++iter) {
		if (!g.allFinite()) break; // entered a non-smooth region
		if (g.lpNorm<Eigen::Infinity>() < opts.tol) {
			out.converged = true;
			break;
		}

		Eigen::VectorXd d = -(h_inv * g);
		bool steepest = false;
		if (!d.allFinite() || g.dot(d) >= 0.0) {
			h_inv.setIdentity();
			d = -g;
			steepest = true;
		}

		const Eigen::VectorXd x_prev = x;
		if (!armijo_search(obj, nullptr, x, f, g, d)) {
			if (steepest) break;
			h_inv.setIdentity();
			d = -g;
			if (!armijo_search(obj, nullptr, x, f, g, d)) break;
		}

		const Eigen::VectorXd g_new = fd_gradient(obj, x, opts.gradient_step);
		if (!g_new.allFinite()) {
			g = g_new;
			continue;
		}
		const Eigen::VectorXd s = x - x_prev;
		const Eigen::VectorXd y = g_new - g;
		const double sy = s.dot(y);
		if (sy > 1e-10 * s.norm() * y.norm()) {
			const double rho = 1.0 / sy;
			const Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(n, n);
			h_inv = (identity - rho * s * y.transpose()) * h_inv * (identity - rho * y * s.transpose()) +
			        rho * s * s.transpose();
		}
		g = g_new;
	}

	out.x_star = x;
	out.f_star = f;
	out.iterations = iter;
	return out;
}

OptimOutcome lbfgsb(const Objective& obj, const Eigen::VectorXd& x0, const Bounds& bounds,
                    const OptimOptions& opts) {
	if (bounds.lower.size() != x0.size() || bounds.upper.size() != x0.size()) {
		throw std::invalid_argument("lbfgsb: bounds dimension mismatch");
	}
	if (!bounds.contains(x0)) {
		throw std::invalid_argument("lbfgsb: start point violates the bounds");
	}
	double f = 0.0;
	require_finite_start(obj, x0, f);

	Eigen::VectorXd x = x0;
	Eigen::VectorXd g = fd_gradient(obj, x, opts.gradient_step);

	struct Pair {
		Eigen::VectorXd s, y;
		double rho;
	};
	std::deque<Pair> history;

	OptimOutcome out;
	out.method = OptimMethod::lbfgsb;

	auto projected_gradient_norm = [&](const Eigen::VectorXd& xx, const Eigen::VectorXd& gg) {
		return (xx - bounds.clamp(xx - gg)).lpNorm<Eigen::Infinity>();
	};

	// Weak-Wolfe bisection along the projected path. Plain Armijo lets the
	// limited-memory model accept degenerate tiny steps whose s'y sits at
	// finite-difference noise, stalling progress; interior steps therefore
	// also require the curvature condition. Steps clipped by the box accept
	// on Armijo alone. Returns the new gradient when it already computed it.
	auto line_search = [&](const Eigen::VectorXd& d, Eigen::VectorXd& g_next, bool& g_ready) -> bool {
		constexpr double kCurvature = 0.9;
		const double slope0 = g.dot(d);
		if (!(slope0 < 0.0)) return false;
		double lo = 0.0;
		double hi = std::numeric_limits<double>::infinity();
		double t = 1.0;
		g_ready = false;
		for (int round = 0; round < 60; ++round) {
			const Eigen::VectorXd raw = x + t * d;
			const Eigen::VectorXd trial = bounds.clamp(raw);
			const Eigen::VectorXd step = trial - x;
			const double armijo_slope = g.dot(step);
			const double ft = obj.evaluate(trial);
			const bool armijo_ok = std::isfinite(ft) && armijo_slope < 0.0 &&
			                       ft <= f + kArmijoC * armijo_slope;
			if (!armijo_ok) {
				hi = t;
				t = 0.5 * (lo + hi);
				if (t < kMinStep) return false;
				continue;
			}
			const bool clipped = (trial.array() != raw.array()).any();
			if (!clipped) {
				const Eigen::VectorXd gt = fd_gradient(obj, trial, opts.gradient_step);
				if (gt.allFinite() && gt.dot(d) < kCurvature * slope0) {
					lo = t;
					t = std::isinf(hi) ? 2.0 * t : 0.5 * (lo + hi);
					continue;
				}
				g_next = gt;
				g_ready = true;
			}
			x = trial;
			f = ft;
			return true;
		}
		return false;
	};

	int iter = 0;
	for (; iter < opts.max_iter; ++iter) {
		if (!g.allFinite()) break;
		if (projected_gradient_norm(x, g) < opts.tol) {
			out.converged = true;
			break;
		}

		// Two-loop recursion with the usual gamma scaling.
		Eigen::VectorXd q = g;
		std::vector<double> alpha(history.size());
		for (std::size_t k = history.size(); k-- > 0;) {
			alpha[k] = history[k].rho * history[k].s.dot(q);
			q -= alpha[k] * history[k].y;
		}
		if (!history.empty()) {
			const auto& last = history.back();
			q *= last.s.dot(last.y) / last.y.dot(last.y);
		}
		for (std::size_t k = 0; k < history.size(); ++k) {
			const double beta = history[k].rho * history[k].y.dot(q);
			q += (alpha[k] - beta) * history[k].s;
		}
		Eigen::VectorXd d = -q;
		if (!d.allFinite() || g.dot(d) >= 0.0) d = -g;

		const Eigen::VectorXd x_prev = x;
		Eigen::VectorXd g_next;
		bool g_ready = false;
		if (!line_search(d, g_next, g_ready)) {
			history.clear();
			d = -g;
			if (!line_search(d, g_next, g_ready)) break;
		}

		const Eigen::VectorXd g_new = g_ready ? g_next : fd_gradient(obj, x, opts.gradient_step);
		if (!g_new.allFinite()) {
			g = g_new;
			continue;
		}
		const Eigen::VectorXd s = x - x_prev;
		const Eigen::VectorXd y = g_new - g;
		const double sy = s.dot(y);
		if (sy > 1e-10 * s.norm() * y.norm()) {
			history.push_back({s, y, 1.0 / sy});
			if (history.size() > static_cast<std::size_t>(kLbfgsMemory)) history.pop_front();
		}
		g = g_new;
	}

	out.x_star = x;
	out.f_star = f;
	out.iterations = iter;
	return out;
}

OptimOutcome sequential_optimize(const Objective& obj, const Eigen::VectorXd& x0,
                                 const std::optional<Bounds>& bounds, const OptimOptions& opts) {
	const double f0 = obj.evaluate(x0);
	if (!std::isfinite(f0)) {
		throw std::runtime_error("sequential_optimize: objective is non-finite at the start point");
	}

	const Bounds box = bounds ? *bounds : Bounds::unbounded(x0.size());
	const bool finite_box =
	    bounds && (box.lower.array().isFinite().any() || box.upper.array().isFinite().any());

	// Later methods are unconstrained; a finite box is enforced through the
	// objective so their iterates cannot wander outside it.
	Objective boxed = obj;
	if (finite_box) {
		const Objective inner = obj;
		boxed.evaluate = [inner, box](const Eigen::VectorXd& x) {
			return box.contains(x) ? inner.evaluate(x) : kInf;
		};
	}

	std::vector<OptimOutcome> attempts;
	attempts.push_back(lbfgsb(obj, x0, box, opts));
	if (attempts.back().converged) return attempts.back();
	attempts.push_back(bfgs(boxed, x0, opts));
	if (attempts.back().converged) return attempts.back();
	attempts.push_back(nelder_mead(boxed, x0, opts));
	if (attempts.back().converged) return attempts.back();

	const OptimOutcome* best = nullptr;
	for (const auto& a : attempts) {
		if (!std::isfinite(a.f_star)) continue;
		if (best == nullptr || a.f_star < best->f_star) best = &a;
	}
	if (best == nullptr) {
		throw std::runtime_error("sequential_optimize: every method produced only non-finite losses");
	}
	OptimOutcome out = *best;
	out.converged = false;
	return out;
}

} // namespace gridcast
