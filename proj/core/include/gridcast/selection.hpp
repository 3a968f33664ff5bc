#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "gridcast/panel.hpp"

namespace gridcast {

/// Pearson correlations over pooled (county, hour) observations.
struct CorrelationMatrix {
	std::vector<std::string> feature_names;
	Eigen::MatrixXd entries;
};

/// d(f,g) = 1 - |R_fg|, entries in [0, 1] with a zero diagonal.
struct DistanceMatrix {
	std::vector<std::string> feature_names;
	Eigen::MatrixXd entries;
};

struct ClusterModel {
	enum class Method { hierarchical, kmeans };

	Method method = Method::hierarchical;
	std::size_t k = 0;
	std::vector<int> assignment; // feature index -> cluster id (0..k-1)
	std::uint64_t seed = 0;      // kmeans only
	bool converged = true;       // kmeans Lloyd loop
};

struct PcaResult {
	Eigen::MatrixXd loadings; // components x features
	Eigen::VectorXd explained_variance_ratio;
	std::size_t n_components = 0;
	std::vector<std::string> feature_names;
	Eigen::VectorXd means;
	Eigen::VectorXd sds;
};

enum class DropReason { cluster_redundant, correlation_pruned };
enum class Provenance { clustering_consensus, pca_pick, both };

std::string drop_reason_name(DropReason reason);
std::string provenance_name(Provenance provenance);

struct SelectionReport {
	std::vector<std::string> kept;
	std::vector<std::pair<std::string, DropReason>> dropped;
	std::map<std::string, Provenance> provenance;
};

std::string to_json(const SelectionReport& report);
SelectionReport selection_report_from_json(const std::string& text);

/// Pairwise-complete Pearson correlation. Throws when a feature has no
/// variance or a pair has fewer than 3 complete observations.
CorrelationMatrix correlation_matrix(const PanelDataset& panel, const std::vector<std::string>& features);

DistanceMatrix correlation_distance(const CorrelationMatrix& correlation);

/// Agglomerative average-linkage clustering cut to exactly k clusters.
/// Deterministic; ties resolve by feature name so the result is
/// equivariant under input permutations.
ClusterModel hierarchical_clusters(const DistanceMatrix& distance, std::size_t k);

/// Lloyd's algorithm on each feature's distance-matrix row (the
/// correlation-profile embedding), k-means++ seeding from the given seed,
/// at most 300 iterations. Deterministic given (distance, k, seed).
ClusterModel kmeans_clusters(const DistanceMatrix& distance, std::size_t k, std::uint64_t seed);

/// Per-cluster medoid (member minimizing mean distance to the rest), in
/// cluster order; ties break toward the earlier input feature.
std::vector<std::string> cluster_representatives(const ClusterModel& model, const DistanceMatrix& distance);

/// PCA of the z-scored pooled observations via eigendecomposition of the
/// sample covariance. Components sorted by descending eigenvalue; each
/// component's largest-magnitude loading is made positive.
PcaResult pca_fit(const PanelDataset& panel, const std::vector<std::string>& features,
                  std::size_t n_components);

/// For each of the first n_pcs components, the per_pc features with the
/// largest absolute loadings, de-duplicated preserving component order.
std::vector<std::string> pca_top_features(const PcaResult& pca, std::size_t n_pcs, std::size_t per_pc);

struct PruneResult {
	std::vector<std::string> kept;    // scan order
	std::vector<std::string> dropped; // |R| above the threshold with a kept feature
};

/// Greedy scan in keep_priority order (features missing from the priority
/// list follow in input order); a candidate is dropped when its |R| with
/// any already-kept feature strictly exceeds the threshold.
PruneResult correlation_prune(const PanelDataset& panel, const std::vector<std::string>& features,
                              double threshold, const std::vector<std::string>& keep_priority);

struct SelectionConfig {
	std::size_t k = 40;
	std::size_t pca_components = 20;
	std::size_t pca_picks = 3;
	double prune_threshold = 0.95;
	std::uint64_t seed = 0;
};

/// Consensus + PCA assembly: representatives of both clusterings are
/// intersected, PCA picks unioned in, and the correlation prune applied
/// last with picks at the head of the keep priority.
SelectionReport assemble_selection(const PanelDataset& panel, const std::vector<std::string>& hier_reps,
                                   const std::vector<std::string>& kmeans_reps,
                                   const std::vector<std::string>& pca_picks, double prune_threshold);

/// The full Stage-2 strategy on a Stage-1-cleaned panel.
SelectionReport select_features(const PanelDataset& panel, const SelectionConfig& config);

} // namespace gridcast
