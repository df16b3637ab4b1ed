#pragma once

#include <vector>

#include "qclab/rng.hpp"
#include "qclab/sample.hpp"
#include "qclab/tap.hpp"

namespace qclab::baselines {

// Reference clustering routes for the method comparison. All of them feed
// the same category-uniform selection step as the landmark pipeline.

// Plain k-means on the raw feature vectors.
std::vector<int> kmeans_labels(const std::vector<Sample>& dataset, int k, RngState rng,
                               int max_iter = 100);

// DBSCAN over the fused similarity converted to distance 1 - A. Noise
// points join the cluster of their most similar clustered neighbor; if
// nothing clusters, everything lands in one cluster.
std::vector<int> dbscan_labels(const std::vector<Sample>& dataset, double alpha, double eps,
                               int min_pts, bool normalize_time_gap = true);

// Agglomerative clustering with average linkage over the same 1 - A
// distance, cut at k clusters (nearest-neighbor-chain merge order).
std::vector<int> agglomerative_labels(const std::vector<Sample>& dataset, double alpha, int k,
                                      bool normalize_time_gap = true);

}  // namespace qclab::baselines
