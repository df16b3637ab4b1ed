#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qclab/matrix.hpp"
#include "qclab/numerics.hpp"
#include "qclab/rng.hpp"
#include "qclab/sample.hpp"
#include "qclab/warnings.hpp"

namespace qclab::tap {

// Temporal-aware parallel clustering over m landmark subsamples: fused
// spatial/temporal similarity against each landmark set, a rectangular
// normalized affinity, spectral embedding via top-k left singular vectors,
// k-means, and column-concatenation aggregation.
struct TapConfig {
    int m = 3;                          // parallel subsamples
    int n = 0;                          // landmarks per subsample; 0 -> fraction of N
    double subsample_fraction = 0.05;   // 1/20
    double alpha = 0.5;                 // spatial weight in the fusion
    int k = 100;                        // cluster count
    int per_cluster_min = 3;
    int per_cluster_max = 10;
    int target_size = 800;
    std::uint64_t seed = 0;
    bool normalize_time_gap = true;     // exp(-|dt| / span) instead of exp(-|dt|)
    double laplacian_exponent = -0.5;   // +0.5 reproduces the positive-exponent variant
    double svd_tol = 1e-9;
    int svd_max_iter = 1000;
    int kmeans_max_iter = 100;

    int landmarks_for(std::size_t dataset_size) const;
    void validate(std::size_t dataset_size) const;
};

enum class SimilarityKind { spatial, temporal, fused };

struct SimilarityMatrix {
    Matrix values;  // N x n, rows = all samples, cols = landmarks
    SimilarityKind kind = SimilarityKind::fused;
};

// Exactly n distinct indices, uniform without replacement, sorted.
std::vector<std::size_t> subsample_indices(std::size_t dataset_size, std::size_t n,
                                           RngState& rng);

// Cosine similarity of every sample against the landmark set.
SimilarityMatrix spatial_similarity(const std::vector<Sample>& dataset,
                                    const std::vector<std::size_t>& landmarks,
                                    WarningLog* warnings = nullptr);

// exp(-|t_k - t_h| * tau); tau = 1/(max step gap) when normalized, else 1.
SimilarityMatrix temporal_similarity(const std::vector<Sample>& dataset,
                                     const std::vector<std::size_t>& landmarks,
                                     bool normalize_gap = true);

// Elementwise convex combination alpha*spatial + (1-alpha)*temporal;
// alpha = 1 or 0 returns the respective input bitwise.
SimilarityMatrix fuse(const SimilarityMatrix& spatial, const SimilarityMatrix& temporal,
                      double alpha);

// (a+1)/2 on a spatial matrix, mapping cosine values into [0, 1] before
// degree computation.
SimilarityMatrix shift_spatial_nonneg(const SimilarityMatrix& spatial);

// L_kh = A_kh * d_r(k)^e * d_c(h)^e with row/column degrees of the
// rectangular affinity; e = -1/2 by default. Zero-degree rows or columns
// are zeroed with a warning. Requires nonnegative entries.
Matrix normalized_laplacian(const SimilarityMatrix& fused, double exponent = -0.5,
                            WarningLog* warnings = nullptr);

// Full similarity -> Laplacian -> top-k left singular vectors for one
// landmark set; embedding rows are unit-normalized.
Matrix cluster_one_subsample(const std::vector<Sample>& dataset,
                             const std::vector<std::size_t>& landmarks, const TapConfig& config,
                             WarningLog* warnings = nullptr);

// One k-means over the column-concatenated embeddings.
std::vector<int> aggregate(const std::vector<Matrix>& embeddings, const TapConfig& config,
                           RngState rng);

struct TapResult {
    std::vector<int> labels;
    std::vector<std::vector<std::size_t>> landmark_sets;
};

// The full clustering driver: m subsample pipelines on streams seed+i,
// aggregation on stream seed+m.
TapResult tap_cluster(const std::vector<Sample>& dataset, const TapConfig& config,
                      WarningLog* warnings = nullptr);

struct SelectionReport {
    std::vector<int> cluster_ids;            // distinct labels, ascending
    std::vector<std::size_t> cluster_sizes;
    std::vector<std::size_t> cluster_take;
};

// Category-uniform draw: per-cluster counts clamped to the configured
// bounds, shortfall redistributed round-robin; clusters smaller than the
// minimum contribute all members with a warning.
std::vector<std::size_t> select_calibration(const std::vector<Sample>& dataset,
                                            const std::vector<int>& labels,
                                            const TapConfig& config, RngState& rng,
                                            WarningLog* warnings = nullptr,
                                            SelectionReport* report = nullptr);

// Dense reference route: square fused affinity over all pairs, full O(N^3)
// eigendecomposition, k-means on the top-k eigenvector rows. Used by the
// clustering comparisons and the complexity benchmark.
std::vector<int> dense_spectral_labels(const std::vector<Sample>& dataset,
                                       const TapConfig& config, RngState rng,
                                       WarningLog* warnings = nullptr);

// Synthetic spatiotemporal testbed: `clusters` separated feature groups,
// each confined to its own timestep band of [0, T).
std::vector<Sample> make_spatiotemporal_testbed(std::size_t n, int clusters, int dim, int T,
                                                RngState& rng, std::vector<int>* truth = nullptr,
                                                double noise = 0.05);

struct ComplexityRow {
    std::string impl;  // "tap" | "dense"
    std::size_t dataset_size = 0;
    int run = 0;
    double seconds = 0.0;
};

struct ComplexityReport {
    std::vector<ComplexityRow> rows;
    double median_seconds(const std::string& impl, std::size_t dataset_size) const;
};

// Times the landmark pipeline against the dense route over a range of
// dataset sizes at a fixed landmark count.
ComplexityReport complexity_benchmark(const std::vector<std::size_t>& sizes,
                                      std::size_t landmarks, int k, int tap_runs,
                                      int dense_runs, std::uint64_t seed);

}  // namespace qclab::tap
