#include "qclab/tap.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace qclab::tap {

int TapConfig::landmarks_for(std::size_t dataset_size) const {
    if (n > 0)
        return n;
    const auto frac = static_cast<std::size_t>(subsample_fraction * dataset_size);
    return static_cast<int>(std::max<std::size_t>(1, std::min(frac, dataset_size)));
}

void TapConfig::validate(std::size_t dataset_size) const {
    if (dataset_size == 0)
        throw std::invalid_argument("TapConfig: empty dataset");
    if (m < 1)
        throw std::invalid_argument("TapConfig: m must be >= 1");
    if (!(alpha >= 0.0 && alpha <= 1.0))
        throw std::invalid_argument("TapConfig: alpha must be in [0, 1]");
    const int lm = landmarks_for(dataset_size);
    if (lm < 1 || static_cast<std::size_t>(lm) > dataset_size)
        throw std::invalid_argument("TapConfig: landmark count out of [1, N]");
    if (k < 1 || k > lm)
        throw std::invalid_argument("TapConfig: k must be in [1, landmarks]");
    if (per_cluster_min < 1 || per_cluster_max < per_cluster_min)
        throw std::invalid_argument("TapConfig: bad per-cluster bounds");
    if (target_size < 1)
        throw std::invalid_argument("TapConfig: target_size must be >= 1");
}

std::vector<std::size_t> subsample_indices(std::size_t dataset_size, std::size_t n,
                                           RngState& rng) {
    if (n < 1 || n > dataset_size)
        throw std::invalid_argument("subsample_indices: n out of [1, N]");
    std::vector<std::size_t> idx(dataset_size);
    std::iota(idx.begin(), idx.end(), 0);
    // Partial Fisher-Yates: the first n slots become the draw.
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = i + rng.bounded(dataset_size - i);
        std::swap(idx[i], idx[j]);
    }
    idx.resize(n);
    std::sort(idx.begin(), idx.end());
    return idx;
}

namespace {

void check_landmarks(const std::vector<Sample>& dataset,
                     const std::vector<std::size_t>& landmarks) {
    if (dataset.empty() || landmarks.empty())
        throw std::invalid_argument("tap: empty dataset or landmark set");
    for (std::size_t l : landmarks)
        if (l >= dataset.size())
            throw std::invalid_argument("tap: landmark index out of range");
}

}  // namespace

SimilarityMatrix spatial_similarity(const std::vector<Sample>& dataset,
                                    const std::vector<std::size_t>& landmarks,
                                    WarningLog* warnings) {
    check_landmarks(dataset, landmarks);
    const std::size_t n_all = dataset.size();
    const std::size_t n_land = landmarks.size();
    const std::size_t d = dataset[0].features.size();

    Matrix feats(n_all, d);
    for (std::size_t i = 0; i < n_all; ++i) {
        if (dataset[i].features.size() != d)
            throw std::invalid_argument("tap: inconsistent feature dimensions");
        for (std::size_t j = 0; j < d; ++j)
            feats(i, j) = dataset[i].features[j];
    }
    std::vector<std::uint8_t> zero;
    const Matrix norm = num::normalize_rows(feats, &zero);
    for (std::size_t i = 0; i < n_all; ++i)
        if (zero[i])
            warn(warnings, "spatial_similarity: sample " + std::to_string(i) +
                               " has zero norm; similarity set to 0");

    SimilarityMatrix out;
    out.kind = SimilarityKind::spatial;
    out.values = Matrix(n_all, n_land);
    for (std::size_t i = 0; i < n_all; ++i) {
        const double* a = norm.row(i);
        for (std::size_t h = 0; h < n_land; ++h) {
            const std::size_t l = landmarks[h];
            if (i == l) {
                out.values(i, h) = 1.0;  // a sample against itself
                continue;
            }
            const double* b = norm.row(l);
            double s = 0.0;
            for (std::size_t j = 0; j < d; ++j)
                s += a[j] * b[j];
            out.values(i, h) = std::clamp(s, -1.0, 1.0);
        }
    }
    out.values.ensure_finite("spatial_similarity");
    return out;
}

SimilarityMatrix temporal_similarity(const std::vector<Sample>& dataset,
                                     const std::vector<std::size_t>& landmarks,
                                     bool normalize_gap) {
    check_landmarks(dataset, landmarks);
    double span = 0.0;
    if (normalize_gap) {
        int lo = dataset[0].timestep, hi = dataset[0].timestep;
        for (const Sample& s : dataset) {
            lo = std::min(lo, s.timestep);
            hi = std::max(hi, s.timestep);
        }
        span = static_cast<double>(hi - lo);
    }
    const double tau = (normalize_gap && span > 0.0) ? 1.0 / span : 1.0;

    SimilarityMatrix out;
    out.kind = SimilarityKind::temporal;
    out.values = Matrix(dataset.size(), landmarks.size());
    for (std::size_t i = 0; i < dataset.size(); ++i)
        for (std::size_t h = 0; h < landmarks.size(); ++h) {
            const double gap = std::abs(dataset[i].timestep - dataset[landmarks[h]].timestep);
            out.values(i, h) = std::exp(-gap * tau);
        }
    return out;
}

SimilarityMatrix fuse(const SimilarityMatrix& spatial, const SimilarityMatrix& temporal,
                      double alpha) {
    if (spatial.values.rows() != temporal.values.rows() ||
        spatial.values.cols() != temporal.values.cols())
        throw std::invalid_argument("fuse: shape mismatch");
    if (!(alpha >= 0.0 && alpha <= 1.0))
        throw std::invalid_argument("fuse: alpha must be in [0, 1]");
    if (alpha == 1.0)
        return spatial;
    if (alpha == 0.0)
        return temporal;
    SimilarityMatrix out;
    out.kind = SimilarityKind::fused;
    out.values = Matrix(spatial.values.rows(), spatial.values.cols());
    for (std::size_t i = 0; i < spatial.values.rows(); ++i)
        for (std::size_t j = 0; j < spatial.values.cols(); ++j)
            out.values(i, j) =
                alpha * spatial.values(i, j) + (1.0 - alpha) * temporal.values(i, j);
    return out;
}

SimilarityMatrix shift_spatial_nonneg(const SimilarityMatrix& spatial) {
    SimilarityMatrix out = spatial;
    for (std::size_t i = 0; i < out.values.rows(); ++i)
        for (std::size_t j = 0; j < out.values.cols(); ++j)
            out.values(i, j) = 0.5 * (out.values(i, j) + 1.0);
    return out;
}

Matrix normalized_laplacian(const SimilarityMatrix& fused, double exponent,
                            WarningLog* warnings) {
    const Matrix& a = fused.values;
    if (a.rows() == 0 || a.cols() == 0)
        throw std::invalid_argument("normalized_laplacian: empty affinity");
    std::vector<double> d_row(a.rows(), 0.0), d_col(a.cols(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) {
            const double v = a(i, j);
            if (v < 0.0)
                throw std::invalid_argument(
                    "normalized_laplacian: negative affinity entry (shift the spatial part first)");
            d_row[i] += v;
            d_col[j] += v;
        }
    std::vector<double> row_f(a.rows()), col_f(a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        if (d_row[i] == 0.0) {
            warn(warnings, "normalized_laplacian: zero row degree at row " + std::to_string(i));
            row_f[i] = 0.0;
        } else {
            row_f[i] = std::pow(d_row[i], exponent);
        }
    }
    for (std::size_t j = 0; j < a.cols(); ++j) {
        if (d_col[j] == 0.0) {
            warn(warnings,
                 "normalized_laplacian: zero column degree at column " + std::to_string(j));
            col_f[j] = 0.0;
        } else {
            col_f[j] = std::pow(d_col[j], exponent);
        }
    }
    Matrix l(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            l(i, j) = a(i, j) * row_f[i] * col_f[j];
    l.ensure_finite("normalized_laplacian");
    return l;
}

Matrix cluster_one_subsample(const std::vector<Sample>& dataset,
                             const std::vector<std::size_t>& landmarks, const TapConfig& config,
                             WarningLog* warnings) {
    if (config.k > static_cast<int>(landmarks.size()))
        throw std::invalid_argument("cluster_one_subsample: k exceeds landmark count");
    const SimilarityMatrix spatial =
        shift_spatial_nonneg(spatial_similarity(dataset, landmarks, warnings));
    const SimilarityMatrix temporal =
        temporal_similarity(dataset, landmarks, config.normalize_time_gap);
    const SimilarityMatrix fused = fuse(spatial, temporal, config.alpha);
    const Matrix lap = normalized_laplacian(fused, config.laplacian_exponent, warnings);
    Matrix embed =
        num::top_k_singular_vectors(lap, config.k, config.svd_tol, config.svd_max_iter);
    return num::normalize_rows(embed);
}

std::vector<int> aggregate(const std::vector<Matrix>& embeddings, const TapConfig& config,
                           RngState rng) {
    if (embeddings.empty())
        throw std::invalid_argument("aggregate: no embeddings");
    const std::size_t n = embeddings[0].rows();
    std::size_t total_cols = 0;
    for (const Matrix& e : embeddings) {
        if (e.rows() != n)
            throw std::invalid_argument("aggregate: row counts differ");
        total_cols += e.cols();
    }
    Matrix joined(n, total_cols);
    std::size_t off = 0;
    for (const Matrix& e : embeddings) {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < e.cols(); ++j)
                joined(i, off + j) = e(i, j);
        off += e.cols();
    }
    return num::kmeans(joined, config.k, rng, config.kmeans_max_iter).labels;
}

TapResult tap_cluster(const std::vector<Sample>& dataset, const TapConfig& config,
                      WarningLog* warnings) {
    config.validate(dataset.size());
    const int n_land = config.landmarks_for(dataset.size());
    TapResult res;
    std::vector<Matrix> embeddings;
    for (int i = 0; i < config.m; ++i) {
        RngState rng = RngState::derive(config.seed, i);
        auto landmarks = subsample_indices(dataset.size(), n_land, rng);
        embeddings.push_back(cluster_one_subsample(dataset, landmarks, config, warnings));
        res.landmark_sets.push_back(std::move(landmarks));
    }
    res.labels = aggregate(embeddings, config, RngState::derive(config.seed, config.m));
    return res;
}

std::vector<std::size_t> select_calibration(const std::vector<Sample>& dataset,
                                            const std::vector<int>& labels,
                                            const TapConfig& config, RngState& rng,
                                            WarningLog* warnings, SelectionReport* report) {
    if (labels.size() != dataset.size())
        throw std::invalid_argument("select_calibration: labels do not cover the dataset");
    if (dataset.empty())
        throw std::invalid_argument("select_calibration: empty dataset");

    // Distinct non-empty clusters, ascending label order.
    std::vector<int> ids;
    for (int l : labels) {
        if (l < 0)
            throw std::invalid_argument("select_calibration: negative label");
        if (std::find(ids.begin(), ids.end(), l) == ids.end())
            ids.push_back(l);
    }
    std::sort(ids.begin(), ids.end());
    const std::size_t n_clusters = ids.size();
    std::vector<std::vector<std::size_t>> members(n_clusters);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const std::size_t c =
            std::lower_bound(ids.begin(), ids.end(), labels[i]) - ids.begin();
        members[c].push_back(i);
    }

    const std::size_t target = static_cast<std::size_t>(config.target_size);
    const std::size_t lo = static_cast<std::size_t>(config.per_cluster_min);
    const std::size_t hi = static_cast<std::size_t>(config.per_cluster_max);
    if (n_clusters * hi < target || n_clusters * lo > target)
        throw std::invalid_argument(
            "select_calibration: per-cluster bounds cannot reach the target size");

    // Equal share clamped to the bounds and to each cluster's size; never
    // overshoots the target, so only the round-robin top-up follows.
    const std::size_t base = std::clamp(target / n_clusters, lo, hi);
    std::vector<std::size_t> take(n_clusters);
    std::size_t total = 0;
    for (std::size_t c = 0; c < n_clusters; ++c) {
        if (members[c].size() < lo)
            warn(warnings, "select_calibration: cluster " + std::to_string(ids[c]) +
                               " smaller than per-cluster minimum (" +
                               std::to_string(members[c].size()) + " < " + std::to_string(lo) +
                               "); taking all members");
        take[c] = std::min(base, members[c].size());
        total += take[c];
    }
    bool any_capacity = true;
    while (total < target && any_capacity) {
        any_capacity = false;
        for (std::size_t c = 0; c < n_clusters && total < target; ++c) {
            if (take[c] < std::min(hi, members[c].size())) {
                ++take[c];
                ++total;
                any_capacity = true;
            }
        }
    }
    if (total < target)
        warn(warnings, "select_calibration: only " + std::to_string(total) + " of " +
                           std::to_string(target) + " requested samples available");

    std::vector<std::size_t> selected;
    selected.reserve(total);
    for (std::size_t c = 0; c < n_clusters; ++c) {
        if (take[c] == members[c].size()) {
            selected.insert(selected.end(), members[c].begin(), members[c].end());
        } else {
            const auto pick = subsample_indices(members[c].size(), take[c], rng);
            for (std::size_t p : pick)
                selected.push_back(members[c][p]);
        }
    }
    std::sort(selected.begin(), selected.end());

    if (report) {
        report->cluster_ids = ids;
        report->cluster_sizes.clear();
        for (const auto& m : members)
            report->cluster_sizes.push_back(m.size());
        report->cluster_take = take;
    }
    return selected;
}

std::vector<int> dense_spectral_labels(const std::vector<Sample>& dataset,
                                       const TapConfig& config, RngState rng,
                                       WarningLog* warnings) {
    if (dataset.empty())
        throw std::invalid_argument("dense_spectral_labels: empty dataset");
    // Square fused affinity over all pairs: landmark set = everything.
    std::vector<std::size_t> all(dataset.size());
    std::iota(all.begin(), all.end(), 0);
    const SimilarityMatrix spatial =
        shift_spatial_nonneg(spatial_similarity(dataset, all, warnings));
    const SimilarityMatrix temporal =
        temporal_similarity(dataset, all, config.normalize_time_gap);
    const SimilarityMatrix fused = fuse(spatial, temporal, config.alpha);
    const Matrix lap = normalized_laplacian(fused, config.laplacian_exponent, warnings);

    const auto eig = num::symmetric_eigen(lap);
    const std::size_t n = dataset.size();
    Matrix embed(n, config.k);
    for (int j = 0; j < config.k; ++j)
        for (std::size_t i = 0; i < n; ++i)
            embed(i, j) = eig.vectors(i, n - 1 - j);  // largest eigenvalues first
    embed = num::normalize_rows(embed);
    return num::kmeans(embed, config.k, rng, config.kmeans_max_iter).labels;
}

std::vector<Sample> make_spatiotemporal_testbed(std::size_t n, int clusters, int dim, int T,
                                                RngState& rng, std::vector<int>* truth,
                                                double noise) {
    if (clusters < 1 || dim < 1 || T < clusters)
        throw std::invalid_argument("make_spatiotemporal_testbed: bad shape");
    std::vector<Sample> out;
    out.reserve(n);
    if (truth)
        truth->clear();
    for (std::size_t i = 0; i < n; ++i) {
        const int c = static_cast<int>(i % clusters);
        Sample s;
        s.traj_id = static_cast<int>(i);
        s.features.assign(dim, 0.0);
        // Cluster centers sit on separated coordinate axes.
        for (int j = 0; j < dim; ++j)
            s.features[j] = (j % clusters == c ? 2.0 : 0.0) + noise * rng.normal();
        // Each cluster owns a contiguous band of timesteps.
        const int band = T / clusters;
        const int lo = c * band;
        const int hi = (c == clusters - 1) ? T - 1 : (c + 1) * band - 1;
        s.timestep = lo + static_cast<int>(rng.bounded(hi - lo + 1));
        out.push_back(std::move(s));
        if (truth)
            truth->push_back(c);
    }
    return out;
}

double ComplexityReport::median_seconds(const std::string& impl,
                                        std::size_t dataset_size) const {
    std::vector<double> vals;
    for (const ComplexityRow& r : rows)
        if (r.impl == impl && r.dataset_size == dataset_size)
            vals.push_back(r.seconds);
    if (vals.empty())
        throw std::out_of_range("ComplexityReport: no rows for " + impl);
    std::sort(vals.begin(), vals.end());
    return vals[vals.size() / 2];
}

ComplexityReport complexity_benchmark(const std::vector<std::size_t>& sizes,
                                      std::size_t landmarks, int k, int tap_runs,
                                      int dense_runs, std::uint64_t seed) {
    using clock = std::chrono::steady_clock;
    ComplexityReport report;
    for (const std::size_t n : sizes) {
        RngState data_rng = RngState::from_seed(seed + n);
        const auto dataset =
            make_spatiotemporal_testbed(n, 3, 16, 50, data_rng, nullptr);

        TapConfig cfg;
        cfg.m = 1;
        cfg.n = static_cast<int>(landmarks);
        cfg.k = k;
        cfg.seed = seed;
        cfg.target_size = 1;
        cfg.per_cluster_min = 1;
        cfg.per_cluster_max = 1;

        for (int run = 0; run < tap_runs; ++run) {
            const auto t0 = clock::now();
            (void)tap_cluster(dataset, cfg);
            const auto t1 = clock::now();
            report.rows.push_back(
                {"tap", n, run, std::chrono::duration<double>(t1 - t0).count()});
        }
        for (int run = 0; run < dense_runs; ++run) {
            const auto t0 = clock::now();
            (void)dense_spectral_labels(dataset, cfg, RngState::derive(seed, cfg.m));
            const auto t1 = clock::now();
            report.rows.push_back(
                {"dense", n, run, std::chrono::duration<double>(t1 - t0).count()});
        }
    }
    return report;
}

}  // namespace qclab::tap
