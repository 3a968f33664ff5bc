#include "gridcast/selection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "gridcast/random.hpp"

namespace gridcast {

namespace {

// Pooled (county, hour) observations, one column per requested feature.
Eigen::MatrixXd pooled_matrix(const PanelDataset& panel, const std::vector<std::string>& features) {
	const auto cells = static_cast<Eigen::Index>(panel.n_hours() * panel.n_counties());
	Eigen::MatrixXd out(cells, static_cast<Eigen::Index>(features.size()));
	for (std::size_t j = 0; j < features.size(); ++j) {
		const auto f = panel.feature_index(features[j]);
		if (f < 0) throw std::invalid_argument("selection: unknown weather feature '" + features[j] + "'");
		const auto& m = panel.weather(static_cast<std::size_t>(f));
		Eigen::Index row = 0;
		for (std::size_t c = 0; c < panel.n_counties(); ++c) {
			out.col(static_cast<Eigen::Index>(j)).segment(row, m.rows()) = m.col(static_cast<Eigen::Index>(c));
			row += m.rows();
		}
	}
	return out;
}

double pearson(const Eigen::VectorXd& x, const Eigen::VectorXd& y, const std::string& fx,
               const std::string& fy) {
	// Pairwise-complete observations.
	double sx = 0, sy = 0;
	Eigen::Index n = 0;
	for (Eigen::Index i = 0; i < x.size(); ++i) {
		if (is_missing(x(i)) || is_missing(y(i))) continue;
		sx += x(i);
		sy += y(i);
		++n;
	}
	if (n < 3) {
		throw std::runtime_error("correlation: fewer than 3 complete observations for (" + fx + ", " + fy + ")");
	}
	const double mx = sx / static_cast<double>(n);
	const double my = sy / static_cast<double>(n);
	double sxx = 0, syy = 0, sxy = 0;
	for (Eigen::Index i = 0; i < x.size(); ++i) {
		if (is_missing(x(i)) || is_missing(y(i))) continue;
		const double dx = x(i) - mx;
		const double dy = y(i) - my;
		sxx += dx * dx;
		syy += dy * dy;
		sxy += dx * dy;
	}
	if (sxx <= 0.0 || syy <= 0.0) {
		throw std::runtime_error("correlation: zero variance over complete observations for (" + fx + ", " +
		                         fy + ")");
	}
	return sxy / std::sqrt(sxx * syy);
}

// Feature order sorted by name; distance-based algorithms run in this
// space so their output does not depend on input column order.
std::vector<std::size_t> canonical_order(const std::vector<std::string>& names) {
	std::vector<std::size_t> order(names.size());
	std::iota(order.begin(), order.end(), 0);
	std::sort(order.begin(), order.end(),
	          [&](std::size_t a, std::size_t b) { return names[a] < names[b]; });
	return order;
}

// Relabels cluster ids by first appearance in input feature order.
void relabel_by_input_order(std::vector<int>& assignment, std::size_t k) {
	std::vector<int> remap(k, -1);
	int next = 0;
	for (auto& a : assignment) {
		if (remap[static_cast<std::size_t>(a)] < 0) remap[static_cast<std::size_t>(a)] = next++;
		a = remap[static_cast<std::size_t>(a)];
	}
}

} // namespace

std::string drop_reason_name(DropReason reason) {
	return reason == DropReason::cluster_redundant ? "cluster-redundant" : "correlation-pruned";
}

std::string provenance_name(Provenance provenance) {
	switch (provenance) {
	case Provenance::clustering_consensus:
		return "clustering-consensus";
	case Provenance::pca_pick:
		return "pca-pick";
	case Provenance::both:
		return "both";
	}
	return {};
}

std::string to_json(const SelectionReport& report) {
	nlohmann::ordered_json j;
	j["kept"] = report.kept;
	j["dropped"] = nlohmann::ordered_json::array();
	for (const auto& [feature, reason] : report.dropped) {
		j["dropped"].push_back({{"feature", feature}, {"reason", drop_reason_name(reason)}});
	}
	j["provenance"] = nlohmann::ordered_json::object();
	for (const auto& name : report.kept) {
		j["provenance"][name] = provenance_name(report.provenance.at(name));
	}
	return j.dump(2);
}

SelectionReport selection_report_from_json(const std::string& text) {
	const auto j = nlohmann::json::parse(text);
	SelectionReport report;
	for (const auto& name : j.at("kept")) report.kept.push_back(name.get<std::string>());
	for (const auto& entry : j.at("dropped")) {
		const auto reason = entry.at("reason").get<std::string>();
		report.dropped.emplace_back(entry.at("feature").get<std::string>(),
		                            reason == "cluster-redundant" ? DropReason::cluster_redundant
		                                                          : DropReason::correlation_pruned);
	}
	for (const auto& [name, prov] : j.at("provenance").items()) {
		const auto p = prov.get<std::string>();
		report.provenance[name] = p == "both"       ? Provenance::both
		                          : p == "pca-pick" ? Provenance::pca_pick
		                                            : Provenance::clustering_consensus;
	}
	return report;
}

CorrelationMatrix correlation_matrix(const PanelDataset& panel, const std::vector<std::string>& features) {
	if (features.empty()) throw std::invalid_argument("correlation_matrix: empty feature list");
	const Eigen::MatrixXd pooled = pooled_matrix(panel, features);
	const auto f = static_cast<Eigen::Index>(features.size());

	// Per-feature variance guard over present cells.
	for (Eigen::Index j = 0; j < f; ++j) {
		bool seen = false, varies = false;
		double first = 0.0;
		for (Eigen::Index i = 0; i < pooled.rows() && !varies; ++i) {
			const double v = pooled(i, j);
			if (is_missing(v)) continue;
			if (!seen) {
				first = v;
				seen = true;
			} else if (v != first) {
				varies = true;
			}
		}
		if (!varies) {
			throw std::runtime_error("correlation_matrix: feature '" + features[static_cast<std::size_t>(j)] +
			                         "' has zero variance");
		}
	}

	CorrelationMatrix out;
	out.feature_names = features;
	out.entries = Eigen::MatrixXd::Identity(f, f);

	if (pooled.allFinite()) {
		// Complete data: one centered cross-product.
		const Eigen::RowVectorXd mean = pooled.colwise().mean();
		const Eigen::MatrixXd centered = pooled.rowwise() - mean;
		const Eigen::MatrixXd cross = centered.transpose() * centered;
		for (Eigen::Index a = 0; a < f; ++a) {
			for (Eigen::Index b = a + 1; b < f; ++b) {
				const double r = cross(a, b) / std::sqrt(cross(a, a) * cross(b, b));
				out.entries(a, b) = r;
				out.entries(b, a) = r;
			}
		}
	} else {
		for (Eigen::Index a = 0; a < f; ++a) {
			for (Eigen::Index b = a + 1; b < f; ++b) {
				const double r = pearson(pooled.col(a), pooled.col(b), features[static_cast<std::size_t>(a)],
				                         features[static_cast<std::size_t>(b)]);
				out.entries(a, b) = r;
				out.entries(b, a) = r;
			}
		}
	}
	return out;
}

DistanceMatrix correlation_distance(const CorrelationMatrix& correlation) {
	DistanceMatrix out;
	out.feature_names = correlation.feature_names;
	out.entries = (1.0 - correlation.entries.array().abs()).cwiseMax(0.0).cwiseMin(1.0);
	out.entries.diagonal().setZero();
	return out;
}

ClusterModel hierarchical_clusters(const DistanceMatrix& distance, std::size_t k) {
	const auto n = static_cast<std::size_t>(distance.entries.rows());
	if (k < 1 || k > n) throw std::invalid_argument("hierarchical_clusters: k out of range");

	const auto canon = canonical_order(distance.feature_names);
	Eigen::MatrixXd work(n, n);
	for (std::size_t a = 0; a < n; ++a) {
		for (std::size_t b = 0; b < n; ++b) {
			work(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
			    distance.entries(static_cast<Eigen::Index>(canon[a]), static_cast<Eigen::Index>(canon[b]));
		}
	}

	std::vector<std::vector<std::size_t>> members(n); // canonical indices
	std::vector<std::size_t> active(n);
	for (std::size_t i = 0; i < n; ++i) {
		members[i] = {i};
		active[i] = i;
	}

	while (active.size() > k) {
		// Closest active pair; average linkage via Lance-Williams updates.
		std::size_t best_a = 0, best_b = 1;
		double best = std::numeric_limits<double>::infinity();
		for (std::size_t i = 0; i + 1 < active.size(); ++i) {
			for (std::size_t j = i + 1; j < active.size(); ++j) {
				const double d = work(static_cast<Eigen::Index>(active[i]), static_cast<Eigen::Index>(active[j]));
				if (d < best) {
					best = d;
					best_a = i;
					best_b = j;
				}
			}
		}
		const std::size_t a = active[best_a];
		const std::size_t b = active[best_b];
		const auto na = static_cast<double>(members[a].size());
		const auto nb = static_cast<double>(members[b].size());
		for (const std::size_t x : active) {
			if (x == a || x == b) continue;
			const double merged = (na * work(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(x)) +
			                       nb * work(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(x))) /
			                      (na + nb);
			work(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(x)) = merged;
			work(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(a)) = merged;
		}
		members[a].insert(members[a].end(), members[b].begin(), members[b].end());
		members[b].clear();
		active.erase(active.begin() + static_cast<std::ptrdiff_t>(best_b));
	}

	ClusterModel model;
	model.method = ClusterModel::Method::hierarchical;
	model.k = k;
	model.assignment.assign(n, -1);
	int id = 0;
	for (const std::size_t a : active) {
		for (const std::size_t canon_idx : members[a]) {
			model.assignment[canon[canon_idx]] = id;
		}
		++id;
	}
	relabel_by_input_order(model.assignment, k);
	return model;
}

ClusterModel kmeans_clusters(const DistanceMatrix& distance, std::size_t k, std::uint64_t seed) {
	const auto n = static_cast<std::size_t>(distance.entries.rows());
	if (k < 1 || k > n) throw std::invalid_argument("kmeans_clusters: k out of range");

	const auto canon = canonical_order(distance.feature_names);
	// Embed feature i as its distance-matrix row, columns in canonical order.
	Eigen::MatrixXd points(n, n);
	for (std::size_t a = 0; a < n; ++a) {
		for (std::size_t b = 0; b < n; ++b) {
			points(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
			    distance.entries(static_cast<Eigen::Index>(canon[a]), static_cast<Eigen::Index>(canon[b]));
		}
	}

	Rng rng(seed);
	std::vector<std::size_t> center_idx;
	center_idx.push_back(rng.below(n));
	Eigen::VectorXd dist2 = (points.rowwise() - points.row(static_cast<Eigen::Index>(center_idx[0])))
	                            .rowwise()
	                            .squaredNorm();
	while (center_idx.size() < k) {
		const double total = dist2.sum();
		std::size_t chosen = 0;
		if (total > 0.0) {
			const double target = rng.uniform() * total;
			double acc = 0.0;
			chosen = n - 1;
			for (std::size_t i = 0; i < n; ++i) {
				acc += dist2(static_cast<Eigen::Index>(i));
				if (acc >= target) {
					chosen = i;
					break;
				}
			}
		} else {
			// All points coincide with a center; take the first unused.
			std::set<std::size_t> used(center_idx.begin(), center_idx.end());
			while (used.count(chosen)) ++chosen;
		}
		center_idx.push_back(chosen);
		const Eigen::VectorXd d =
		    (points.rowwise() - points.row(static_cast<Eigen::Index>(chosen))).rowwise().squaredNorm();
		dist2 = dist2.cwiseMin(d);
	}

	Eigen::MatrixXd centers(static_cast<Eigen::Index>(k), n);
	for (std::size_t c = 0; c < k; ++c) {
		centers.row(static_cast<Eigen::Index>(c)) = points.row(static_cast<Eigen::Index>(center_idx[c]));
	}

	std::vector<int> assign(n, -1);
	bool converged = false;
	constexpr int kMaxLloyd = 300;
	for (int iter = 0; iter < kMaxLloyd; ++iter) {
		bool changed = false;
		for (std::size_t i = 0; i < n; ++i) {
			int best = 0;
			double best_d = std::numeric_limits<double>::infinity();
			for (std::size_t c = 0; c < k; ++c) {
				const double d = (points.row(static_cast<Eigen::Index>(i)) -
				                  centers.row(static_cast<Eigen::Index>(c)))
				                     .squaredNorm();
				if (d < best_d) {
					best_d = d;
					best = static_cast<int>(c);
				}
			}
			if (assign[i] != best) {
				assign[i] = best;
				changed = true;
			}
		}

		// Re-seat any empty cluster on the point farthest from its center.
		std::vector<std::size_t> count(k, 0);
		for (const int a : assign) ++count[static_cast<std::size_t>(a)];
		for (std::size_t c = 0; c < k; ++c) {
			if (count[c] > 0) continue;
			double worst = -1.0;
			std::size_t worst_i = 0;
			for (std::size_t i = 0; i < n; ++i) {
				if (count[static_cast<std::size_t>(assign[i])] <= 1) continue;
				const double d = (points.row(static_cast<Eigen::Index>(i)) -
				                  centers.row(static_cast<Eigen::Index>(assign[i])))
				                     .squaredNorm();
				if (d > worst) {
					worst = d;
					worst_i = i;
				}
			}
			--count[static_cast<std::size_t>(assign[worst_i])];
			assign[worst_i] = static_cast<int>(c);
			count[c] = 1;
			changed = true;
		}

		if (!changed) {
			converged = true;
			break;
		}
		centers.setZero();
		for (std::size_t i = 0; i < n; ++i) {
			centers.row(assign[i]) += points.row(static_cast<Eigen::Index>(i));
		}
		for (std::size_t c = 0; c < k; ++c) {
			centers.row(static_cast<Eigen::Index>(c)) /= static_cast<double>(count[c]);
		}
	}

	ClusterModel model;
	model.method = ClusterModel::Method::kmeans;
	model.k = k;
	model.seed = seed;
	model.converged = converged;
	model.assignment.assign(n, -1);
	for (std::size_t i = 0; i < n; ++i) model.assignment[canon[i]] = assign[i];
	relabel_by_input_order(model.assignment, k);
	return model;
}

std::vector<std::string> cluster_representatives(const ClusterModel& model, const DistanceMatrix& distance) {
	if (model.assignment.size() != distance.feature_names.size()) {
		throw std::invalid_argument("cluster_representatives: model and distance matrix disagree");
	}
	std::vector<std::vector<std::size_t>> members(model.k);
	for (std::size_t i = 0; i < model.assignment.size(); ++i) {
		members[static_cast<std::size_t>(model.assignment[i])].push_back(i);
	}
	std::vector<std::string> reps;
	reps.reserve(model.k);
	for (const auto& cluster : members) {
		std::size_t best = cluster.front();
		double best_mean = std::numeric_limits<double>::infinity();
		for (const std::size_t candidate : cluster) {
			double sum = 0.0;
			for (const std::size_t other : cluster) {
				if (other == candidate) continue;
				sum += distance.entries(static_cast<Eigen::Index>(candidate), static_cast<Eigen::Index>(other));
			}
			const double mean = cluster.size() > 1 ? sum / static_cast<double>(cluster.size() - 1) : 0.0;
			if (mean < best_mean) {
				best_mean = mean;
				best = candidate;
			}
		}
		reps.push_back(distance.feature_names[best]);
	}
	return reps;
}

PcaResult pca_fit(const PanelDataset& panel, const std::vector<std::string>& features,
                  std::size_t n_components) {
	if (features.empty()) throw std::invalid_argument("pca_fit: empty feature list");
	const Eigen::MatrixXd pooled = pooled_matrix(panel, features);

	// Complete rows only.
	std::vector<Eigen::Index> complete;
	for (Eigen::Index i = 0; i < pooled.rows(); ++i) {
		if (pooled.row(i).allFinite()) complete.push_back(i);
	}
	if (complete.size() < 2) throw std::invalid_argument("pca_fit: fewer than 2 complete rows");
	const auto rows = static_cast<Eigen::Index>(complete.size());
	const auto f = static_cast<Eigen::Index>(features.size());
	if (n_components < 1 || n_components > std::min<std::size_t>(complete.size(), features.size())) {
		throw std::invalid_argument("pca_fit: n_components out of range");
	}

	Eigen::MatrixXd data(rows, f);
	for (Eigen::Index i = 0; i < rows; ++i) data.row(i) = pooled.row(complete[static_cast<std::size_t>(i)]);

	PcaResult result;
	result.feature_names = features;
	result.n_components = n_components;
	result.means = data.colwise().mean();
	result.sds.resize(f);
	for (Eigen::Index j = 0; j < f; ++j) {
		const double ss = (data.col(j).array() - result.means(j)).square().sum();
		const double var = ss / static_cast<double>(rows - 1);
		if (!(var > 0.0)) {
			throw std::runtime_error("pca_fit: feature '" + features[static_cast<std::size_t>(j)] +
			                         "' has zero variance");
		}
		result.sds(j) = std::sqrt(var);
	}

	Eigen::MatrixXd z = data;
	for (Eigen::Index j = 0; j < f; ++j) {
		z.col(j) = (data.col(j).array() - result.means(j)) / result.sds(j);
	}
	const Eigen::MatrixXd cov = z.transpose() * z / static_cast<double>(rows - 1);

	const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
	if (solver.info() != Eigen::Success) throw std::runtime_error("pca_fit: eigendecomposition failed");
	const Eigen::VectorXd eigenvalues = solver.eigenvalues();   // ascending
	const Eigen::MatrixXd eigenvectors = solver.eigenvectors(); // columns

	const double total = cov.trace();
	result.loadings.resize(static_cast<Eigen::Index>(n_components), f);
	result.explained_variance_ratio.resize(static_cast<Eigen::Index>(n_components));
	for (std::size_t c = 0; c < n_components; ++c) {
		const Eigen::Index src = f - 1 - static_cast<Eigen::Index>(c);
		Eigen::VectorXd component = eigenvectors.col(src);
		// Sign convention: the largest-magnitude loading is positive.
		Eigen::Index arg_max = 0;
		component.cwiseAbs().maxCoeff(&arg_max);
		if (component(arg_max) < 0.0) component = -component;
		result.loadings.row(static_cast<Eigen::Index>(c)) = component.transpose();
		result.explained_variance_ratio(static_cast<Eigen::Index>(c)) =
		    std::max(eigenvalues(src), 0.0) / total;
	}
	return result;
}

std::vector<std::string> pca_top_features(const PcaResult& pca, std::size_t n_pcs, std::size_t per_pc) {
	if (n_pcs > pca.n_components) throw std::invalid_argument("pca_top_features: n_pcs exceeds components");
	std::vector<std::string> picks;
	std::set<std::string> seen;
	for (std::size_t c = 0; c < n_pcs; ++c) {
		const Eigen::RowVectorXd row = pca.loadings.row(static_cast<Eigen::Index>(c));
		std::vector<Eigen::Index> order(static_cast<std::size_t>(row.size()));
		std::iota(order.begin(), order.end(), 0);
		std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
			return std::abs(row(a)) > std::abs(row(b));
		});
		for (std::size_t j = 0; j < per_pc && j < order.size(); ++j) {
			const auto& name = pca.feature_names[static_cast<std::size_t>(order[j])];
			if (seen.insert(name).second) picks.push_back(name);
		}
	}
	return picks;
}

PruneResult correlation_prune(const PanelDataset& panel, const std::vector<std::string>& features,
                              double threshold, const std::vector<std::string>& keep_priority) {
	if (!(threshold > 0.0) || threshold > 1.0) {
		throw std::invalid_argument("correlation_prune: threshold must lie in (0, 1]");
	}
	const CorrelationMatrix correlation = correlation_matrix(panel, features);

	auto index_of = [&](const std::string& name) -> std::ptrdiff_t {
		const auto it = std::find(features.begin(), features.end(), name);
		return it == features.end() ? -1 : it - features.begin();
	};

	std::vector<std::size_t> scan;
	std::vector<char> queued(features.size(), 0);
	for (const auto& name : keep_priority) {
		const auto idx = index_of(name);
		if (idx < 0 || queued[static_cast<std::size_t>(idx)]) continue;
		queued[static_cast<std::size_t>(idx)] = 1;
		scan.push_back(static_cast<std::size_t>(idx));
	}
	for (std::size_t i = 0; i < features.size(); ++i) {
		if (!queued[i]) scan.push_back(i);
	}

	PruneResult result;
	std::vector<std::size_t> kept_idx;
	for (const std::size_t candidate : scan) {
		bool redundant = false;
		for (const std::size_t kept : kept_idx) {
			if (std::abs(correlation.entries(static_cast<Eigen::Index>(candidate),
			                                 static_cast<Eigen::Index>(kept))) > threshold) {
				redundant = true;
				break;
			}
		}
		if (redundant) {
			result.dropped.push_back(features[candidate]);
		} else {
			kept_idx.push_back(candidate);
			result.kept.push_back(features[candidate]);
		}
	}
	return result;
}

SelectionReport assemble_selection(const PanelDataset& panel, const std::vector<std::string>& hier_reps,
                                   const std::vector<std::string>& kmeans_reps,
                                   const std::vector<std::string>& pca_picks, double prune_threshold) {
	const std::set<std::string> kmeans_set(kmeans_reps.begin(), kmeans_reps.end());
	std::vector<std::string> consensus;
	for (const auto& name : hier_reps) {
		if (kmeans_set.count(name)) consensus.push_back(name);
	}
	if (consensus.empty() && pca_picks.empty()) {
		throw std::runtime_error("select_features: clustering consensus is empty and PCA is disabled");
	}

	// Candidates with picks first so pruning prefers them.
	std::vector<std::string> candidates;
	std::set<std::string> in_candidates;
	for (const auto& name : pca_picks) {
		if (in_candidates.insert(name).second) candidates.push_back(name);
	}
	for (const auto& name : consensus) {
		if (in_candidates.insert(name).second) candidates.push_back(name);
	}

	const PruneResult pruned = correlation_prune(panel, candidates, prune_threshold, candidates);

	const std::set<std::string> consensus_set(consensus.begin(), consensus.end());
	const std::set<std::string> picks_set(pca_picks.begin(), pca_picks.end());
	const std::set<std::string> kept_set(pruned.kept.begin(), pruned.kept.end());
	const std::set<std::string> pruned_set(pruned.dropped.begin(), pruned.dropped.end());

	SelectionReport report;
	report.kept = pruned.kept;
	for (const auto& name : report.kept) {
		const bool pick = picks_set.count(name) > 0;
		const bool cons = consensus_set.count(name) > 0;
		report.provenance[name] = pick && cons ? Provenance::both
		                          : pick       ? Provenance::pca_pick
		                                       : Provenance::clustering_consensus;
	}
	for (const auto& meta : panel.features()) {
		if (kept_set.count(meta.name)) continue;
		report.dropped.emplace_back(meta.name, pruned_set.count(meta.name)
		                                           ? DropReason::correlation_pruned
		                                           : DropReason::cluster_redundant);
	}
	return report;
}

SelectionReport select_features(const PanelDataset& panel, const SelectionConfig& config) {
	std::vector<std::string> features;
	features.reserve(panel.n_features());
	for (const auto& meta : panel.features()) features.push_back(meta.name);
	if (config.k < 1 || config.k > features.size()) {
		throw std::invalid_argument("select_features: k out of range for " + std::to_string(features.size()) +
		                            " features");
	}

	const CorrelationMatrix correlation = correlation_matrix(panel, features);
	const DistanceMatrix distance = correlation_distance(correlation);

	const ClusterModel hier = hierarchical_clusters(distance, config.k);
	const std::vector<std::string> hier_reps = cluster_representatives(hier, distance);
	const ClusterModel kmeans = kmeans_clusters(distance, config.k, config.seed);
	const std::vector<std::string> kmeans_reps = cluster_representatives(kmeans, distance);

	std::vector<std::string> picks;
	if (config.pca_picks > 0) {
		const PcaResult pca = pca_fit(panel, features, config.pca_components);
		picks = pca_top_features(pca, std::min<std::size_t>(config.pca_picks, pca.n_components), 1);
	}

	return assemble_selection(panel, hier_reps, kmeans_reps, picks, config.prune_threshold);
}

} // namespace gridcast
