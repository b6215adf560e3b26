#include "cae/stochastic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "cae/errors.hpp"

namespace cae::num {

double softmax_into(std::span<const double> logits, double temperature, std::span<double> out) {
  if (!(temperature > 0.0) || !std::isfinite(temperature)) {
    throw ParameterError("softmax: temperature must be positive and finite, got " + std::to_string(temperature));
  }
  if (out.size() != logits.size()) throw ShapeError("softmax: output length differs from logits length");
  if (logits.empty()) return 0.0;
  double top = -std::numeric_limits<double>::infinity();
  for (double v : logits) {
    if (!std::isfinite(v)) throw ParameterError("softmax: non-finite logit");
    top = std::max(top, v);
  }
  const double inv_t = 1.0 / temperature;
  double total = 0.0;
  for (std::size_t j = 0; j < logits.size(); ++j) {
    out[j] = std::exp((logits[j] - top) * inv_t);
    total += out[j];
  }
  const double inv_total = 1.0 / total;
  double largest = 0.0;
  for (double& v : out) {
    v *= inv_total;
    largest = std::max(largest, v);
  }
  return largest;
}

std::vector<double> softmax(std::span<const double> logits, double temperature) {
  std::vector<double> out(logits.size());
  softmax_into(logits, temperature, out);
  return out;
}

}  // namespace cae::num
