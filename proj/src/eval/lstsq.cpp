#include <algorithm>
#include <cmath>

#include "cae/errors.hpp"
#include "cae/eval.hpp"

namespace cae::eval {

using num::Matrix;

namespace {

Matrix with_intercept(const Matrix& s) {
  Matrix a(s.rows(), s.cols() + 1);
  for (std::size_t r = 0; r < s.rows(); ++r) {
    const auto src = s.row(r);
    auto dst = a.row(r);
    std::copy(src.begin(), src.end(), dst.begin());
    dst[s.cols()] = 1.0;
  }
  return a;
}

// In-place lower Cholesky factor. Returns false when a pivot is not safely
// positive relative to the largest diagonal entry.
bool cholesky(Matrix& g) {
  const std::size_t p = g.rows();
  double max_diag = 0.0;
  for (std::size_t i = 0; i < p; ++i) max_diag = std::max(max_diag, g(i, i));
  const double floor = 1e-13 * std::max(1.0, max_diag);
  for (std::size_t j = 0; j < p; ++j) {
    double diag = g(j, j);
    for (std::size_t t = 0; t < j; ++t) diag -= g(j, t) * g(j, t);
    if (!(diag > floor)) return false;
    const double l = std::sqrt(diag);
    g(j, j) = l;
    for (std::size_t i = j + 1; i < p; ++i) {
      double v = g(i, j);
      for (std::size_t t = 0; t < j; ++t) v -= g(i, t) * g(j, t);
      g(i, j) = v / l;
    }
  }
  return true;
}

// Solves L L^T X = B for every column of B, in place.
void cholesky_solve(const Matrix& l, Matrix& b) {
  const std::size_t p = l.rows();
  for (std::size_t c = 0; c < b.cols(); ++c) {
    for (std::size_t i = 0; i < p; ++i) {
      double v = b(i, c);
      for (std::size_t t = 0; t < i; ++t) v -= l(i, t) * b(t, c);
      b(i, c) = v / l(i, i);
    }
    for (std::size_t i = p; i-- > 0;) {
      double v = b(i, c);
      for (std::size_t t = i + 1; t < p; ++t) v -= l(t, i) * b(t, c);
      b(i, c) = v / l(i, i);
    }
  }
}

}  // namespace

Matrix LinearFit::predict(const Matrix& selected) const {
  if (selected.cols() + 1 != weights.rows()) {
    throw ShapeError("linear fit expects " + std::to_string(weights.rows() - 1) + " columns, got " +
                     selected.shape_string());
  }
  return num::matmul(with_intercept(selected), weights);
}

LinearFit fit_least_squares(const Matrix& selected, const Matrix& targets, double lambda) {
  if (selected.rows() != targets.rows()) {
    throw ShapeError("fit_least_squares: " + selected.shape_string() + " inputs vs " + targets.shape_string() +
                     " targets");
  }
  if (selected.rows() == 0) throw SizeError("fit_least_squares: no rows");
  const Matrix a = with_intercept(selected);
  const Matrix gram = num::matmul_tn(a, a);
  const Matrix rhs = num::matmul_tn(a, targets);

  LinearFit fit;
  Matrix l = gram;
  if (!cholesky(l)) {
    // Ridge on the slopes only, scaled by n so lambda acts on the mean loss.
    // The intercept stays unpenalised.
    fit.ridge_fallback = true;
    l = gram;
    for (std::size_t i = 0; i + 1 < l.rows(); ++i) l(i, i) += lambda * static_cast<double>(selected.rows());
    if (!cholesky(l)) throw DegenerateError("least-squares system is singular even with ridge regularisation");
  }
  fit.weights = rhs;
  cholesky_solve(l, fit.weights);
  return fit;
}

}  // namespace cae::eval
