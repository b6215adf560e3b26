#pragma once
// Test fixtures shared by the unit and acceptance suites: the d=10 synthetic
// subset-recovery task and an independent least-squares oracle (modified
// Gram-Schmidt QR, no normal equations) used to score feature subsets.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

#include "cae/dataio.hpp"
#include "cae/matrix.hpp"
#include "cae/rng.hpp"

namespace cae::testing {

/// n rows: 3 standard-normal generators in columns 0..2, then 7 random linear
/// combinations of them plus N(0, sigma^2) noise.
inline io::Dataset make_synthetic(std::size_t n, std::uint64_t seed, double sigma = 0.01) {
  num::Rng rng(1000 + seed);
  num::Matrix coef(3, 7);
  for (double& c : coef.values()) c = rng.normal();
  io::Dataset ds;
  ds.features = num::Matrix(n, 10);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t g = 0; g < 3; ++g) ds.features(r, g) = rng.normal();
    for (std::size_t j = 0; j < 7; ++j) {
      double v = 0.0;
      for (std::size_t g = 0; g < 3; ++g) v += coef(g, j) * ds.features(r, g);
      ds.features(r, 3 + j) = v + sigma * rng.normal();
    }
  }
  for (std::size_t j = 0; j < 10; ++j) ds.feature_names.push_back("f" + std::to_string(j));
  return ds;
}

/// Affine least squares by modified Gram-Schmidt on [1 S]; returns test
/// per-entry MSE of predicting every column of x_test from the chosen columns.
inline double oracle_subset_mse(const num::Matrix& x_train, const num::Matrix& x_test,
                                const std::vector<std::size_t>& subset) {
  const std::size_t n = x_train.rows();
  const std::size_t p = subset.size() + 1;
  // Q (n x p) and R (p x p) with [1 S] = Q R.
  std::vector<std::vector<double>> q(p, std::vector<double>(n));
  std::vector<std::vector<double>> r(p, std::vector<double>(p, 0.0));
  for (std::size_t i = 0; i < n; ++i) q[0][i] = 1.0;
  for (std::size_t c = 0; c < subset.size(); ++c) {
    for (std::size_t i = 0; i < n; ++i) q[c + 1][i] = x_train(i, subset[c]);
  }
  for (std::size_t c = 0; c < p; ++c) {
    for (std::size_t prev = 0; prev < c; ++prev) {
      double dot = 0.0;
      for (std::size_t i = 0; i < n; ++i) dot += q[prev][i] * q[c][i];
      r[prev][c] = dot;
      for (std::size_t i = 0; i < n; ++i) q[c][i] -= dot * q[prev][i];
    }
    double norm = 0.0;
    for (double v : q[c]) norm += v * v;
    norm = std::sqrt(norm);
    r[c][c] = norm;
    // Rank deficient subsets (duplicate columns) cannot beat the full-rank best.
    if (norm < 1e-12) return std::numeric_limits<double>::infinity();
    for (double& v : q[c]) v /= norm;
  }
  const std::size_t d = x_train.cols();
  // Coefficients B (p x d): R B = Q^T Y.
  std::vector<std::vector<double>> b(p, std::vector<double>(d, 0.0));
  for (std::size_t j = 0; j < d; ++j) {
    std::vector<double> qty(p, 0.0);
    for (std::size_t c = 0; c < p; ++c) {
      for (std::size_t i = 0; i < n; ++i) qty[c] += q[c][i] * x_train(i, j);
    }
    for (std::size_t c = p; c-- > 0;) {
      double v = qty[c];
      for (std::size_t c2 = c + 1; c2 < p; ++c2) v -= r[c][c2] * b[c2][j];
      b[c][j] = v / r[c][c];
    }
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < x_test.rows(); ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      double pred = b[0][j];
      for (std::size_t c = 0; c < subset.size(); ++c) pred += b[c + 1][j] * x_test(i, subset[c]);
      const double e = pred - x_test(i, j);
      sum += e * e;
    }
  }
  return sum / static_cast<double>(x_test.rows() * d);
}

struct BestSubset {
  std::vector<std::size_t> indices;
  double mse = std::numeric_limits<double>::infinity();
};

/// Exhaustive search over all size-3 subsets of the columns.
inline BestSubset oracle_best_triple(const num::Matrix& x_train, const num::Matrix& x_test) {
  BestSubset best;
  const std::size_t d = x_train.cols();
  for (std::size_t a = 0; a < d; ++a) {
    for (std::size_t b = a + 1; b < d; ++b) {
      for (std::size_t c = b + 1; c < d; ++c) {
        const double m = oracle_subset_mse(x_train, x_test, {a, b, c});
        if (m < best.mse) best = {{a, b, c}, m};
      }
    }
  }
  return best;
}

}  // namespace cae::testing
