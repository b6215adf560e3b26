#include <cmath>
#include <string>

#include "cae/errors.hpp"
#include "cae/nn.hpp"

namespace cae::nn {

AdamState::AdamState(std::span<const std::size_t> block_sizes, AdamConfig cfg) : config(cfg) {
  if (!(cfg.learning_rate > 0.0) || !(cfg.beta1 > 0.0 && cfg.beta1 < 1.0) || !(cfg.beta2 > 0.0 && cfg.beta2 < 1.0) ||
      !(cfg.epsilon > 0.0)) {
    throw ParameterError("Adam: learning rate and epsilon must be positive, betas in (0, 1)");
  }
  first_moment.reserve(block_sizes.size());
  second_moment.reserve(block_sizes.size());
  for (std::size_t n : block_sizes) {
    first_moment.emplace_back(n, 0.0);
    second_moment.emplace_back(n, 0.0);
  }
}

AdamState AdamState::for_blocks(std::span<const std::span<double>> params, AdamConfig cfg) {
  std::vector<std::size_t> sizes;
  sizes.reserve(params.size());
  for (const auto& p : params) sizes.push_back(p.size());
  return AdamState(sizes, cfg);
}

void adam_step(AdamState& state, std::span<const std::span<double>> params, const Gradients& grads) {
  if (params.size() != grads.blocks.size() || params.size() != state.first_moment.size()) {
    throw ShapeError("adam_step: " + std::to_string(params.size()) + " parameter blocks, " +
                     std::to_string(grads.blocks.size()) + " gradient blocks, " +
                     std::to_string(state.first_moment.size()) + " moment blocks");
  }
  for (std::size_t b = 0; b < params.size(); ++b) {
    if (params[b].size() != grads.blocks[b].size() || params[b].size() != state.first_moment[b].size()) {
      throw ShapeError("adam_step: block " + std::to_string(b) + " has " + std::to_string(params[b].size()) +
                       " parameters but " + std::to_string(grads.blocks[b].size()) + " gradients");
    }
  }
  const auto& c = state.config;
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double correction1 = 1.0 - std::pow(c.beta1, t);
  const double correction2 = 1.0 - std::pow(c.beta2, t);
  for (std::size_t b = 0; b < params.size(); ++b) {
    auto p = params[b];
    const auto& g = grads.blocks[b];
    auto& m = state.first_moment[b];
    auto& v = state.second_moment[b];
    for (std::size_t i = 0; i < p.size(); ++i) {
      m[i] = c.beta1 * m[i] + (1.0 - c.beta1) * g[i];
      v[i] = c.beta2 * v[i] + (1.0 - c.beta2) * g[i] * g[i];
      const double m_hat = m[i] / correction1;
      const double v_hat = v[i] / correction2;
      p[i] -= c.learning_rate * m_hat / (std::sqrt(v_hat) + c.epsilon);
    }
  }
}

}  // namespace cae::nn
