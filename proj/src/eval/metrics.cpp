#include <algorithm>
#include <numeric>

#include "cae/errors.hpp"
#include "cae/eval.hpp"

namespace cae::eval {

double reconstruction_error(const num::Matrix& x_true, const num::Matrix& x_hat) {
  num::require_same_shape(x_true, x_hat, "reconstruction_error");
  if (x_true.empty()) return 0.0;
  return num::frobenius_sq_diff(x_true, x_hat) / static_cast<double>(x_true.size());
}

std::vector<std::size_t> hidden_size_candidates(std::size_t k) {
  const auto at_least_one = [](std::size_t v) { return std::max<std::size_t>(1, v); };
  return {at_least_one(4 * k / 9), at_least_one(2 * k / 3), at_least_one(k), at_least_one(3 * k / 2)};
}

std::vector<std::size_t> variance_filter(const num::Matrix& x, std::size_t k) {
  if (k == 0 || k > x.cols()) {
    throw ParameterError("variance_filter: k=" + std::to_string(k) + " outside [1, " + std::to_string(x.cols()) + "]");
  }
  const auto mean = num::column_means(x);
  std::vector<double> var(x.cols(), 0.0);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const auto row = x.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) var[c] += (row[c] - mean[c]) * (row[c] - mean[c]);
  }
  std::vector<std::size_t> order(x.cols());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return var[a] > var[b]; });
  order.resize(k);
  return order;
}

std::vector<std::size_t> random_selection(std::size_t d, std::size_t k, num::Rng& rng) {
  if (k == 0 || k > d) {
    throw ParameterError("random_selection: k=" + std::to_string(k) + " outside [1, " + std::to_string(d) + "]");
  }
  std::vector<std::size_t> all(d);
  std::iota(all.begin(), all.end(), std::size_t{0});
  rng.shuffle(std::span<std::size_t>(all));
  all.resize(k);
  return all;
}

}  // namespace cae::eval
