#include <algorithm>
#include <cmath>

#include "cae/errors.hpp"
#include "cae/eval.hpp"
#include "cae/kernels.hpp"
#include "cae/parallel.hpp"

namespace cae::eval {

using num::Matrix;

namespace {

Matrix centred(const Matrix& x, const std::vector<double>& mean) {
  Matrix c = x;
  for (std::size_t r = 0; r < c.rows(); ++r) {
    auto row = c.row(r);
    for (std::size_t j = 0; j < row.size(); ++j) row[j] -= mean[j];
  }
  return c;
}

void symmetric_matvec(const Matrix& a, const std::vector<double>& v, std::vector<double>& out) {
  const auto& k = kernels::active();
  num::parallel_for(a.rows(), 64, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) out[i] = k.dot(a.data() + i * a.cols(), v.data(), v.size());
  });
}

double normalise(std::vector<double>& v) {
  const auto& k = kernels::active();
  const double norm = std::sqrt(k.dot(v.data(), v.data(), v.size()));
  if (norm > 0.0) {
    for (double& x : v) x /= norm;
  }
  return norm;
}

// Removes the span of the found vectors (applied twice for numerical safety).
void orthogonalise(std::vector<double>& v, const std::vector<std::vector<double>>& basis) {
  const auto& k = kernels::active();
  for (int pass = 0; pass < 2; ++pass) {
    for (const auto& b : basis) k.axpy(-k.dot(b.data(), v.data(), v.size()), b.data(), v.data(), v.size());
  }
}

struct Eigen {
  std::vector<std::vector<double>> vectors;
  std::vector<double> values;
};

// Top-`count` eigenpairs of a symmetric PSD matrix by power iteration; each new
// iterate is kept orthogonal to the pairs already found (deflation).
Eigen top_eigenpairs(const Matrix& a, std::size_t count, const PcaOptions& opts) {
  const std::size_t p = a.rows();
  num::Rng rng = num::Rng(opts.seed).child(0x9ca);
  Eigen out;
  std::vector<double> w(p);
  double trace = 0.0;
  for (std::size_t i = 0; i < p; ++i) trace += a(i, i);
  const double rank_floor = 1e-12 * std::max(trace, 1e-300);

  for (std::size_t c = 0; c < count; ++c) {
    std::vector<double> v(p);
    for (double& x : v) x = rng.normal();
    orthogonalise(v, out.vectors);
    normalise(v);
    double lambda = 0.0;
    for (std::size_t it = 0; it < opts.max_iterations; ++it) {
      symmetric_matvec(a, v, w);
      orthogonalise(w, out.vectors);
      const double next = normalise(w);
      v.swap(w);
      const bool done = std::abs(next - lambda) <= opts.tolerance * std::max(next, 1e-300);
      lambda = next;
      if (done || lambda <= rank_floor) break;
    }
    if (lambda <= rank_floor) {
      throw RankError("k=" + std::to_string(count) + " exceeds the numerical rank of the centred data (" +
                      std::to_string(c) + ")");
    }
    out.vectors.push_back(std::move(v));
    out.values.push_back(lambda);
  }
  return out;
}

}  // namespace

PcaModel pca_fit(const Matrix& x_train, std::size_t k, const PcaOptions& options) {
  const std::size_t n = x_train.rows();
  const std::size_t d = x_train.cols();
  if (k == 0) throw ParameterError("pca_fit: k must be at least 1");
  if (k > std::min(n, d)) {
    throw RankError("pca_fit: k=" + std::to_string(k) + " exceeds min(n, d) for data " + x_train.shape_string());
  }
  PcaModel model;
  model.mean = num::column_means(x_train);
  const Matrix xc = centred(x_train, model.mean);
  const double inv_n = 1.0 / static_cast<double>(n);
  model.components = Matrix(k, d);

  if (d <= n) {
    Matrix cov = num::matmul_tn(xc, xc);
    for (double& v : cov.values()) v *= inv_n;
    const Eigen eig = top_eigenpairs(cov, k, options);
    for (std::size_t c = 0; c < k; ++c) {
      std::copy(eig.vectors[c].begin(), eig.vectors[c].end(), model.components.row(c).begin());
    }
    model.eigenvalues = eig.values;
  } else {
    // Same non-zero spectrum via the n x n Gram matrix; map u -> Xc^T u.
    Matrix gram = num::matmul_nt(xc, xc);
    for (double& v : gram.values()) v *= inv_n;
    const Eigen eig = top_eigenpairs(gram, k, options);
    Matrix u(k, n);
    for (std::size_t c = 0; c < k; ++c) std::copy(eig.vectors[c].begin(), eig.vectors[c].end(), u.row(c).begin());
    const Matrix raw = num::matmul(u, xc);
    std::vector<std::vector<double>> basis;
    for (std::size_t c = 0; c < k; ++c) {
      std::vector<double> row(raw.row(c).begin(), raw.row(c).end());
      orthogonalise(row, basis);
      normalise(row);
      std::copy(row.begin(), row.end(), model.components.row(c).begin());
      basis.push_back(std::move(row));
    }
    model.eigenvalues = eig.values;
  }
  return model;
}

Matrix pca_transform(const PcaModel& model, const Matrix& x) {
  if (x.cols() != model.mean.size()) {
    throw ShapeError("pca_transform: model has d=" + std::to_string(model.mean.size()) + ", data is " +
                     x.shape_string());
  }
  return num::matmul_nt(centred(x, model.mean), model.components);
}

Matrix pca_reconstruct(const PcaModel& model, const Matrix& x) {
  Matrix out = num::matmul(pca_transform(model, x), model.components);
  for (std::size_t r = 0; r < out.rows(); ++r) {
    auto row = out.row(r);
    for (std::size_t j = 0; j < row.size(); ++j) row[j] += model.mean[j];
  }
  return out;
}

}  // namespace cae::eval
