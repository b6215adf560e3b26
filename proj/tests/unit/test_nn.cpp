#include <doctest.h>

#include <cmath>
#include <vector>

#include "cae/errors.hpp"
#include "cae/nn.hpp"

using cae::num::Matrix;
using cae::num::Rng;
namespace nn = cae::nn;

TEST_CASE("dense init: Glorot bounds, zero bias, leaky hidden / identity output") {
  Rng rng(1);
  nn::DecoderSpec spec;
  spec.hidden_sizes = {7, 5};
  spec.output_dim = 3;
  const auto layers = nn::init_decoder(spec, 4, rng);
  REQUIRE(layers.size() == 3);
  CHECK(layers[0].in_dim() == 4);
  CHECK(layers[0].out_dim() == 7);
  CHECK(layers[2].out_dim() == 3);
  CHECK(layers[0].activation == nn::Activation::leaky_relu);
  CHECK(layers[2].activation == nn::Activation::identity);
  const double bound = std::sqrt(6.0 / (4 + 7));
  for (double w : layers[0].weights.values()) CHECK(std::abs(w) <= bound);
  for (double b : layers[1].bias) CHECK(b == 0.0);
  CHECK(nn::parameter_count(layers) == 4 * 7 + 7 + 7 * 5 + 5 + 5 * 3 + 3);
}

TEST_CASE("forward pass: affine map and leaky-relu slope") {
  nn::DecoderSpec spec;
  spec.hidden_sizes = {1};
  spec.output_dim = 1;
  std::vector<nn::DenseLayer> layers(2);
  layers[0] = {Matrix{{1.0}}, {0.0}, nn::Activation::leaky_relu};
  layers[1] = {Matrix{{2.0}}, {1.0}, nn::Activation::identity};
  const Matrix out = nn::decoder_forward(spec, layers, Matrix{{3.0}, {-3.0}});
  CHECK(out(0, 0) == doctest::Approx(7.0));
  CHECK(out(1, 0) == doctest::Approx(2.0 * (-3.0 * nn::kLeakySlope) + 1.0));
  CHECK_THROWS_AS(nn::decoder_forward(spec, layers, Matrix(2, 2)), cae::ShapeError);
}

TEST_CASE("mse and cross-entropy values and gradients by hand") {
  const auto mse = nn::mse_loss(Matrix{{1, 2}, {3, 4}}, Matrix{{0, 2}, {3, 6}});
  CHECK(mse.loss == doctest::Approx((1.0 + 4.0) / 4.0));
  CHECK(mse.grad(0, 0) == doctest::Approx(2.0 * 1.0 / 4.0));
  CHECK(mse.grad(1, 1) == doctest::Approx(2.0 * -2.0 / 4.0));

  const std::vector<int> labels{0, 1};
  const auto ce = nn::cross_entropy_loss(Matrix{{0, 0}, {0, std::log(3.0)}}, labels);
  CHECK(ce.loss == doctest::Approx((std::log(2.0) + std::log(4.0 / 3.0)) / 2.0));
  CHECK(ce.grad(0, 0) == doctest::Approx((0.5 - 1.0) / 2.0));
  CHECK(ce.grad(1, 0) == doctest::Approx(0.25 / 2.0));
  CHECK_THROWS_AS(nn::cross_entropy_loss(Matrix(2, 2), std::vector<int>{0, 2}), cae::DataError);
  CHECK_THROWS_AS(nn::cross_entropy_loss(Matrix(2, 2), std::vector<int>{0}), cae::ShapeError);
  // Large logits stay finite.
  CHECK(std::isfinite(nn::cross_entropy_loss(Matrix{{1000, -1000}}, std::vector<int>{1}).loss));
}

TEST_CASE("decoder backward matches finite differences for both losses") {
  for (bool classify : {false, true}) {
    Rng rng(classify ? 4 : 3);
    nn::DecoderSpec spec;
    spec.hidden_sizes = {5};
    spec.output_dim = 3;
    auto layers = nn::init_decoder(spec, 4, rng);
    Matrix x(6, 4);
    for (double& v : x.values()) v = rng.uniform(-1, 1);
    Matrix target(6, 3);
    for (double& v : target.values()) v = rng.uniform(-1, 1);
    const std::vector<int> labels{0, 1, 2, 2, 1, 0};
    std::vector<double> flat;
    for (auto b : nn::parameter_blocks(layers)) flat.insert(flat.end(), b.begin(), b.end());
    nn::LossWithGradient fn = [&](std::span<const double> p, std::vector<double>* grad) {
      std::size_t at = 0;
      for (auto b : nn::parameter_blocks(layers))
        for (double& v : b) v = p[at++];
      nn::ForwardTrace trace;
      const Matrix out = nn::decoder_forward(spec, layers, x, trace);
      const auto loss = classify ? nn::cross_entropy_loss(out, labels) : nn::mse_loss(out, target);
      if (grad) {
        nn::Gradients g;
        nn::decoder_backward(layers, trace, loss.grad, g, false);
        grad->clear();
        for (const auto& b : g.blocks) grad->insert(grad->end(), b.begin(), b.end());
      }
      return loss.loss;
    };
    const auto r = nn::grad_check(fn, flat);
    CAPTURE(classify);
    CHECK(r.checked == flat.size());
    CHECK(r.max_rel_error < 1e-6);
  }
}

TEST_CASE("decoder input gradient matches finite differences") {
  Rng rng(8);
  nn::DecoderSpec spec;
  spec.hidden_sizes = {4};
  spec.output_dim = 2;
  const auto layers = nn::init_decoder(spec, 3, rng);
  Matrix x(5, 3);
  for (double& v : x.values()) v = rng.uniform(-1, 1);
  const Matrix target(5, 2, 0.5);
  std::vector<double> flat(x.values().begin(), x.values().end());
  nn::LossWithGradient fn = [&](std::span<const double> p, std::vector<double>* grad) {
    Matrix in(5, 3, std::vector<double>(p.begin(), p.end()));
    nn::ForwardTrace trace;
    const auto loss = nn::mse_loss(nn::decoder_forward(spec, layers, in, trace), target);
    if (grad) {
      nn::Gradients g;
      const Matrix gi = nn::decoder_backward(layers, trace, loss.grad, g, true);
      grad->assign(gi.values().begin(), gi.values().end());
    }
    return loss.loss;
  };
  CHECK(nn::grad_check(fn, flat).max_rel_error < 1e-6);
}

TEST_CASE("grad_check flags a wrong gradient and honours skip") {
  nn::LossWithGradient fn = [](std::span<const double> p, std::vector<double>* grad) {
    if (grad) *grad = {2 * p[0], 0.0};  // second entry deliberately wrong
    return p[0] * p[0] + 3 * p[1];
  };
  const std::vector<double> p{1.0, 1.0};
  const auto bad = nn::grad_check(fn, p);
  CHECK(bad.max_rel_error > 1.0);
  CHECK(bad.worst_index == 1);
  const auto skipped = nn::grad_check(fn, p, 1e-5, [](std::size_t i) { return i == 1; });
  CHECK(skipped.skipped == 1);
  CHECK(skipped.max_rel_error < 1e-8);
}

TEST_CASE("adam: first step moves each parameter by lr against the gradient sign") {
  std::vector<double> a{1.0, -2.0, 0.5};
  std::vector<std::span<double>> params{a};
  nn::AdamConfig cfg;
  cfg.learning_rate = 0.1;
  auto state = nn::AdamState::for_blocks(params, cfg);
  nn::Gradients g;
  g.blocks = {{0.3, -4.0, 0.0}};
  nn::adam_step(state, params, g);
  CHECK(a[0] == doctest::Approx(0.9).epsilon(1e-6));
  CHECK(a[1] == doctest::Approx(-1.9).epsilon(1e-6));
  CHECK(a[2] == 0.5);
  CHECK(state.step == 1);
  // Second step with the same gradient: bias-corrected moments still give lr.
  nn::adam_step(state, params, g);
  CHECK(a[0] == doctest::Approx(0.8).epsilon(1e-6));
  g.blocks = {{1.0}};
  CHECK_THROWS_AS(nn::adam_step(state, params, g), cae::ShapeError);
}

TEST_CASE("adam minimises a quadratic") {
  std::vector<double> w{5.0, -3.0};
  std::vector<std::span<double>> params{w};
  nn::AdamConfig cfg;
  cfg.learning_rate = 0.05;
  auto state = nn::AdamState::for_blocks(params, cfg);
  for (int i = 0; i < 2000; ++i) {
    nn::Gradients g;
    g.blocks = {{2 * (w[0] - 1.0), 2 * (w[1] + 2.0)}};
    nn::adam_step(state, params, g);
  }
  CHECK(w[0] == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(w[1] == doctest::Approx(-2.0).epsilon(1e-3));
}

TEST_CASE("dropout: only in training mode with a generator, inverted scaling") {
  Rng rng(2);
  nn::DecoderSpec spec;
  spec.hidden_sizes = {200};
  spec.output_dim = 1;
  spec.dropout = 0.5;
  std::vector<nn::DenseLayer> layers(2);
  layers[0] = {Matrix(1, 200, 1.0), std::vector<double>(200, 0.0), nn::Activation::leaky_relu};
  layers[1] = {Matrix(200, 1, 1.0), {0.0}, nn::Activation::identity};
  const Matrix x{{1.0}};
  CHECK(nn::decoder_forward(spec, layers, x)(0, 0) == doctest::Approx(200.0));
  nn::ForwardTrace trace;
  CHECK(nn::decoder_forward(spec, layers, x, trace)(0, 0) == doctest::Approx(200.0));
  Rng drop(3);
  const double noisy = nn::decoder_forward(spec, layers, x, trace, &drop)(0, 0);
  CHECK(noisy != doctest::Approx(200.0));
  // Survivors are scaled by 1 / (1 - p) = 2, so the output is an even integer.
  CHECK(std::fmod(noisy, 2.0) == doctest::Approx(0.0));
  CHECK(std::abs(noisy - 200.0) < 60.0);
}

TEST_CASE("spec and activation validation") {
  nn::DecoderSpec spec;
  CHECK_THROWS_AS(spec.validate(), cae::ParameterError);
  spec.output_dim = 2;
  spec.hidden_sizes = {0};
  CHECK_THROWS_AS(spec.validate(), cae::ParameterError);
  spec.hidden_sizes = {};
  spec.dropout = 1.0;
  CHECK_THROWS_AS(spec.validate(), cae::ParameterError);
  CHECK(nn::activation_from_name(nn::activation_name(nn::Activation::leaky_relu)) == nn::Activation::leaky_relu);
  CHECK_THROWS_AS(nn::activation_from_name("tanh"), cae::FormatError);
}
