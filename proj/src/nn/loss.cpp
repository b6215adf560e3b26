#include <algorithm>
#include <cmath>
#include <string>

#include "cae/errors.hpp"
#include "cae/nn.hpp"

namespace cae::nn {

using num::Matrix;

LossResult mse_loss(const Matrix& predicted, const Matrix& target) {
  num::require_same_shape(predicted, target, "mse_loss");
  LossResult out{0.0, Matrix(predicted.rows(), predicted.cols())};
  if (predicted.empty()) return out;
  const double inv_count = 1.0 / static_cast<double>(predicted.size());
  const auto p = predicted.values();
  const auto t = target.values();
  auto g = out.grad.values();
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double diff = p[i] - t[i];
    total += diff * diff;
    g[i] = 2.0 * diff * inv_count;
  }
  out.loss = total * inv_count;
  return out;
}

LossResult cross_entropy_loss(const Matrix& logits, std::span<const int> labels) {
  if (labels.size() != logits.rows()) {
    throw ShapeError("cross_entropy_loss: " + std::to_string(labels.size()) + " labels for logits " +
                     logits.shape_string());
  }
  LossResult out{0.0, Matrix(logits.rows(), logits.cols())};
  if (logits.rows() == 0) return out;
  const std::size_t classes = logits.cols();
  const double inv_n = 1.0 / static_cast<double>(logits.rows());
  double total = 0.0;
  for (std::size_t r = 0; r < logits.rows(); ++r) {
    const int label = labels[r];
    if (label < 0 || static_cast<std::size_t>(label) >= classes) {
      throw DataError("cross_entropy_loss: label " + std::to_string(label) + " at row " + std::to_string(r) +
                      " outside [0, " + std::to_string(classes) + ")");
    }
    const auto z = logits.row(r);
    auto g = out.grad.row(r);
    const double top = *std::max_element(z.begin(), z.end());
    double sum = 0.0;
    for (std::size_t c = 0; c < classes; ++c) {
      g[c] = std::exp(z[c] - top);
      sum += g[c];
    }
    const double log_sum = std::log(sum) + top;
    total += log_sum - z[static_cast<std::size_t>(label)];
    for (std::size_t c = 0; c < classes; ++c) g[c] = g[c] / sum * inv_n;
    g[static_cast<std::size_t>(label)] -= inv_n;
  }
  out.loss = total * inv_n;
  return out;
}

}  // namespace cae::nn
