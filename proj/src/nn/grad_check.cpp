#include <algorithm>
#include <cmath>

#include "cae/errors.hpp"
#include "cae/nn.hpp"

namespace cae::nn {

GradCheckResult grad_check(const LossWithGradient& fn, std::span<const double> params, double h,
                           const std::function<bool(std::size_t)>& skip) {
  if (!(h > 0.0)) throw ParameterError("grad_check: step must be positive");
  std::vector<double> analytic;
  std::vector<double> point(params.begin(), params.end());
  fn(point, &analytic);
  if (analytic.size() != point.size()) {
    throw ShapeError("grad_check: loss returned " + std::to_string(analytic.size()) + " gradients for " +
                     std::to_string(point.size()) + " parameters");
  }
  GradCheckResult result;
  for (std::size_t i = 0; i < point.size(); ++i) {
    if (skip && skip(i)) {
      ++result.skipped;
      continue;
    }
    const double saved = point[i];
    point[i] = saved + h;
    const double up = fn(point, nullptr);
    point[i] = saved - h;
    const double down = fn(point, nullptr);
    point[i] = saved;
    const double numeric = (up - down) / (2.0 * h);
    const double err = std::abs(analytic[i] - numeric) / std::max(1.0, std::abs(analytic[i]));
    if (result.checked == 0 || err > result.max_rel_error) {
      result.max_rel_error = err;
      result.worst_index = i;
    }
    ++result.checked;
  }
  return result;
}

}  // namespace cae::nn
