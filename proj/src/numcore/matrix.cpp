#include "cae/matrix.hpp"

#include <algorithm>
#include <cmath>

#include "cae/errors.hpp"
#include "cae/kernels.hpp"
#include "cae/parallel.hpp"

namespace cae::num {

namespace {

// Below this many multiply-adds a product is not worth spreading over threads.
constexpr std::size_t kParallelWork = 1u << 20;

std::size_t row_grain(std::size_t work_per_row) {
  return work_per_row == 0 ? 1 : std::max<std::size_t>(1, kParallelWork / work_per_row);
}

[[noreturn]] void shape_mismatch(const char* op, const Matrix& a, const Matrix& b) {
  throw ShapeError(std::string(op) + ": incompatible shapes " + a.shape_string() + " and " + b.shape_string());
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill) : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows * cols) {
    throw ShapeError("matrix data length " + std::to_string(data_.size()) + " does not match shape " +
                     std::to_string(rows) + "x" + std::to_string(cols));
  }
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw ShapeError("ragged initializer list for Matrix");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

bool Matrix::all_finite() const noexcept {
  for (double v : data_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

std::string Matrix::shape_string() const { return std::to_string(rows_) + "x" + std::to_string(cols_); }

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) shape_mismatch("matmul", a, b);
  Matrix c(a.rows(), b.cols());
  const auto& k = kernels::active();
  parallel_for(a.rows(), row_grain(a.cols() * b.cols()), [&](std::size_t begin, std::size_t end) {
    k.gemm_nn(end - begin, b.cols(), a.cols(), a.data() + begin * a.cols(), a.cols(), b.data(), b.cols(),
              c.data() + begin * c.cols(), c.cols());
  });
  return c;
}

Matrix matmul_nt(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols()) shape_mismatch("matmul_nt", a, b);
  Matrix c(a.rows(), b.rows());
  const auto& k = kernels::active();
  parallel_for(a.rows(), row_grain(a.cols() * b.rows()), [&](std::size_t begin, std::size_t end) {
    k.gemm_nt(end - begin, b.rows(), a.cols(), a.data() + begin * a.cols(), a.cols(), b.data(), b.cols(),
              c.data() + begin * c.cols(), c.cols());
  });
  return c;
}

Matrix matmul_tn(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) shape_mismatch("matmul_tn", a, b);
  Matrix c(a.cols(), b.cols());
  const auto& k = kernels::active();
  // Partition over output rows (columns of a) so every output entry is summed
  // over the sample axis in the same order regardless of the thread count.
  parallel_for(a.cols(), row_grain(a.rows() * b.cols()), [&](std::size_t begin, std::size_t end) {
    k.gemm_tn(end - begin, b.cols(), a.rows(), a.data() + begin, a.cols(), b.data(), b.cols(),
              c.data() + begin * c.cols(), c.cols());
  });
  return c;
}

Matrix transpose(const Matrix& a) {
  Matrix t(a.cols(), a.rows());
  for (std::size_t r = 0; r < a.rows(); ++r) {
    for (std::size_t c = 0; c < a.cols(); ++c) t(c, r) = a(r, c);
  }
  return t;
}

Matrix select_rows(const Matrix& a, std::span<const std::size_t> rows) {
  Matrix out(rows.size(), a.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] >= a.rows()) {
      throw ShapeError("select_rows: row " + std::to_string(rows[i]) + " out of range for " + a.shape_string());
    }
    const auto src = a.row(rows[i]);
    std::copy(src.begin(), src.end(), out.row(i).begin());
  }
  return out;
}

Matrix select_columns(const Matrix& a, std::span<const std::size_t> cols) {
  for (std::size_t c : cols) {
    if (c >= a.cols()) {
      throw ShapeError("select_columns: column " + std::to_string(c) + " out of range for " + a.shape_string());
    }
  }
  Matrix out(a.rows(), cols.size());
  for (std::size_t r = 0; r < a.rows(); ++r) {
    for (std::size_t j = 0; j < cols.size(); ++j) out(r, j) = a(r, cols[j]);
  }
  return out;
}

Matrix vstack(const Matrix& top, const Matrix& bottom) {
  if (top.empty()) return bottom;
  if (bottom.empty()) return top;
  if (top.cols() != bottom.cols()) shape_mismatch("vstack", top, bottom);
  std::vector<double> data(top.values().begin(), top.values().end());
  data.insert(data.end(), bottom.values().begin(), bottom.values().end());
  return Matrix(top.rows() + bottom.rows(), top.cols(), std::move(data));
}

std::vector<double> column_sums(const Matrix& a) {
  std::vector<double> s(a.cols(), 0.0);
  const auto& k = kernels::active();
  for (std::size_t r = 0; r < a.rows(); ++r) k.axpy(1.0, a.row(r).data(), s.data(), a.cols());
  return s;
}

std::vector<double> column_means(const Matrix& a) {
  auto s = column_sums(a);
  if (a.rows() > 0) {
    for (double& v : s) v /= static_cast<double>(a.rows());
  }
  return s;
}

void require_same_shape(const Matrix& a, const Matrix& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) shape_mismatch(what, a, b);
}

double frobenius_sq_diff(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "frobenius_sq_diff");
  return kernels::active().sum_sq_diff(a.data(), b.data(), a.size());
}

}  // namespace cae::num
