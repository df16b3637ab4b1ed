#pragma once

#include <cstdint>
#include <vector>

#include "qclab/matrix.hpp"
#include "qclab/rng.hpp"
#include "qclab/warnings.hpp"

namespace qclab::num {

// Row-wise L2 normalization. Zero-norm rows are left as zeros and flagged.
Matrix normalize_rows(const Matrix& x, std::vector<std::uint8_t>* zero_rows = nullptr);

// Symmetric pairwise cosine similarity between the rows of x.
// Diagonal is exactly 1, entries clamped to [-1, 1]. A zero-norm row is
// assigned similarity 0 to every other row (1 to itself) and reported.
Matrix pairwise_cosine(const Matrix& x, WarningLog* warnings = nullptr);

// Top-k left singular vectors of a rectangular matrix, computed by block
// subspace iteration (with a small guard subspace) on the Gram matrix of
// the shorter side. Columns are orthonormal, ordered by decreasing
// singular value, and sign-fixed so the largest-magnitude component of
// each vector is positive. Throws on non-convergence instead of
// returning a truncated answer.
Matrix top_k_singular_vectors(const Matrix& m, int k, double tol = 1e-10, int max_iter = 500);

struct KMeansResult {
    std::vector<int> labels;
    Matrix centroids;                      // k x d
    std::vector<double> objective_history; // WCSS after each assignment pass
    int iterations = 0;
};

// Lloyd k-means with greedy farthest-point seeding. The rng picks the
// first centroid; every later choice is deterministic (ties broken by
// lowest index). Empty clusters are reseeded at the point farthest from
// its own centroid. The recorded objective is non-increasing.
KMeansResult kmeans(const Matrix& points, int k, RngState rng, int max_iter = 100);

struct SymmetricEigen {
    std::vector<double> values; // ascending
    Matrix vectors;             // column j pairs with values[j]
};

// Full eigendecomposition of a real symmetric matrix via Householder
// tridiagonalization followed by implicit-shift QL, O(n^3). This is the
// dense route used by the square spectral-clustering reference and the
// complexity comparison; the landmark path never calls it.
SymmetricEigen symmetric_eigen(Matrix a);

// Solves gram * X = rhs in place via Cholesky; returns false if gram is
// not positive definite (rhs is then left unspecified).
bool cholesky_solve(Matrix gram, Matrix& rhs);

// Chance-corrected agreement between two clusterings; 1 means identical
// partitions up to label renaming.
double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b);

}  // namespace qclab::num
