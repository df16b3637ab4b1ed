#include "qclab/baselines.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "qclab/numerics.hpp"

namespace qclab::baselines {

namespace {

// Square fused-similarity distance 1 - A over all pairs.
Matrix fused_distance(const std::vector<Sample>& dataset, double alpha,
                      bool normalize_time_gap) {
    std::vector<std::size_t> all(dataset.size());
    std::iota(all.begin(), all.end(), 0);
    const auto spatial = tap::shift_spatial_nonneg(tap::spatial_similarity(dataset, all));
    const auto temporal = tap::temporal_similarity(dataset, all, normalize_time_gap);
    const auto fused = tap::fuse(spatial, temporal, alpha);
    Matrix dist(dataset.size(), dataset.size());
    for (std::size_t i = 0; i < dataset.size(); ++i)
        for (std::size_t j = 0; j < dataset.size(); ++j)
            dist(i, j) = 1.0 - fused.values(i, j);
    return dist;
}

}  // namespace

std::vector<int> kmeans_labels(const std::vector<Sample>& dataset, int k, RngState rng,
                               int max_iter) {
    if (dataset.empty())
        throw std::invalid_argument("kmeans_labels: empty dataset");
    const std::size_t d = dataset[0].features.size();
    Matrix pts(dataset.size(), d);
    for (std::size_t i = 0; i < dataset.size(); ++i)
        for (std::size_t j = 0; j < d; ++j)
            pts(i, j) = dataset[i].features[j];
    return num::kmeans(pts, k, rng, max_iter).labels;
}

std::vector<int> dbscan_labels(const std::vector<Sample>& dataset, double alpha, double eps,
                               int min_pts, bool normalize_time_gap) {
    if (dataset.empty())
        throw std::invalid_argument("dbscan_labels: empty dataset");
    const std::size_t n = dataset.size();
    const Matrix dist = fused_distance(dataset, alpha, normalize_time_gap);

    std::vector<std::vector<std::size_t>> neighbors(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (dist(i, j) <= eps)
                neighbors[i].push_back(j);

    constexpr int kUnvisited = -2, kNoise = -1;
    std::vector<int> labels(n, kUnvisited);
    int next = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (labels[i] != kUnvisited)
            continue;
        if (static_cast<int>(neighbors[i].size()) < min_pts) {
            labels[i] = kNoise;
            continue;
        }
        const int cluster = next++;
        labels[i] = cluster;
        std::vector<std::size_t> frontier = neighbors[i];
        for (std::size_t f = 0; f < frontier.size(); ++f) {
            const std::size_t p = frontier[f];
            if (labels[p] == kNoise)
                labels[p] = cluster;
            if (labels[p] != kUnvisited)
                continue;
            labels[p] = cluster;
            if (static_cast<int>(neighbors[p].size()) >= min_pts)
                frontier.insert(frontier.end(), neighbors[p].begin(), neighbors[p].end());
        }
    }

    if (next == 0) {
        std::fill(labels.begin(), labels.end(), 0);
        return labels;
    }
    // Noise joins the nearest clustered point's cluster.
    for (std::size_t i = 0; i < n; ++i) {
        if (labels[i] != kNoise)
            continue;
        double best = std::numeric_limits<double>::infinity();
        int pick = 0;
        for (std::size_t j = 0; j < n; ++j)
            if (labels[j] >= 0 && dist(i, j) < best) {
                best = dist(i, j);
                pick = labels[j];
            }
        labels[i] = pick;
    }
    return labels;
}

std::vector<int> agglomerative_labels(const std::vector<Sample>& dataset, double alpha, int k,
                                      bool normalize_time_gap) {
    const std::size_t n = dataset.size();
    if (n == 0)
        throw std::invalid_argument("agglomerative_labels: empty dataset");
    if (k < 1 || static_cast<std::size_t>(k) > n)
        throw std::invalid_argument("agglomerative_labels: k out of [1, N]");
    Matrix dist = fused_distance(dataset, alpha, normalize_time_gap);

    std::vector<std::size_t> size(n, 1);
    std::vector<bool> active(n, true);
    std::vector<int> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    std::size_t clusters = n;

    // Nearest-neighbor-chain merging; average linkage is reducible, so the
    // chain order gives the exact dendrogram in O(N^2).
    std::vector<std::size_t> chain;
    while (clusters > static_cast<std::size_t>(k)) {
        if (chain.empty()) {
            for (std::size_t i = 0; i < n; ++i)
                if (active[i]) {
                    chain.push_back(i);
                    break;
                }
        }
        const std::size_t top = chain.back();
        std::size_t nearest = top;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < n; ++j) {
            if (!active[j] || j == top)
                continue;
            if (dist(top, j) < best) {
                best = dist(top, j);
                nearest = j;
            }
        }
        if (chain.size() >= 2 && chain[chain.size() - 2] == nearest) {
            // Reciprocal nearest neighbors: merge nearest into top.
            chain.pop_back();
            chain.pop_back();
            const std::size_t a = std::min(top, nearest), b = std::max(top, nearest);
            const double wa = static_cast<double>(size[a]), wb = static_cast<double>(size[b]);
            for (std::size_t j = 0; j < n; ++j) {
                if (!active[j] || j == a || j == b)
                    continue;
                const double v = (wa * dist(a, j) + wb * dist(b, j)) / (wa + wb);
                dist(a, j) = v;
                dist(j, a) = v;
            }
            size[a] += size[b];
            active[b] = false;
            parent[b] = static_cast<int>(a);
            --clusters;
        } else {
            chain.push_back(nearest);
        }
    }

    auto root_of = [&](std::size_t i) {
        while (parent[i] != static_cast<int>(i))
            i = static_cast<std::size_t>(parent[i]);
        return i;
    };
    // Compact the surviving roots into labels 0..k-1 in index order.
    std::vector<int> root_label(n, -1);
    int next = 0;
    std::vector<int> labels(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t r = root_of(i);
        if (root_label[r] < 0)
            root_label[r] = next++;
        labels[i] = root_label[r];
    }
    return labels;
}

}  // namespace qclab::baselines
