#pragma once
// Frozen-noise gradient check of the full selector + decoder loss against
// central finite differences, over every alpha and decoder parameter.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "cae/matrix.hpp"
#include "cae/nn.hpp"
#include "cae/rng.hpp"
#include "cae/selector.hpp"

namespace cae::testing {

struct CaeGradCase {
  std::size_t n = 8;
  std::size_t d = 6;
  std::size_t k = 2;
  std::vector<std::size_t> hidden;  // empty = linear decoder
  double temperature = 1.0;
  std::uint64_t seed = 0;
};

inline nn::GradCheckResult check_cae_gradients(const CaeGradCase& c) {
  num::Rng rng(c.seed);
  num::Matrix x(c.n, c.d);
  for (double& v : x.values()) v = rng.uniform(0.0, 1.0);
  sel::SelectorParams selector{num::Matrix(c.k, c.d)};
  for (double& a : selector.alpha.values()) a = rng.uniform(0.5, 2.0);
  num::Matrix gumbel(c.k, c.d);
  for (double& g : gumbel.values()) g = rng.gumbel();

  nn::DecoderSpec spec;
  spec.hidden_sizes = c.hidden;
  spec.output_dim = c.d;
  num::Rng init(c.seed + 1);
  std::vector<nn::DenseLayer> layers = nn::init_decoder(spec, c.k, init);
  // Non-zero biases so their gradients are exercised away from the init point.
  for (auto& layer : layers)
    for (double& b : layer.bias) b = rng.uniform(-0.3, 0.3);

  std::vector<double> flat(selector.alpha.values().begin(), selector.alpha.values().end());
  for (auto block : nn::parameter_blocks(layers)) flat.insert(flat.end(), block.begin(), block.end());

  auto unpack = [&](std::span<const double> p) {
    std::size_t at = 0;
    for (double& a : selector.alpha.values()) a = p[at++];
    for (auto block : nn::parameter_blocks(layers))
      for (double& v : block) v = p[at++];
  };

  nn::LossWithGradient fn = [&](std::span<const double> p, std::vector<double>* grad) {
    unpack(p);
    const auto sample = sel::concrete_sample_with_noise(selector, c.temperature, gumbel);
    const num::Matrix xs = sel::selector_forward_train(x, sample);
    nn::ForwardTrace trace;
    const num::Matrix out = nn::decoder_forward(spec, layers, xs, trace);
    const nn::LossResult loss = nn::mse_loss(out, x);
    if (grad != nullptr) {
      nn::Gradients g;
      const num::Matrix grad_xs = nn::decoder_backward(layers, trace, loss.grad, g, true);
      const auto sg = sel::selector_backward(x, sample, selector, grad_xs);
      grad->assign(sg.alpha.values().begin(), sg.alpha.values().end());
      for (const auto& block : g.blocks) grad->insert(grad->end(), block.begin(), block.end());
    }
    return loss.loss;
  };
  return nn::grad_check(fn, flat, 1e-5);
}

}  // namespace cae::testing
