#include <cmath>
#include <string>

#include "cae/errors.hpp"
#include "cae/kernels.hpp"
#include "cae/nn.hpp"

namespace cae::nn {

using num::Matrix;

std::string_view activation_name(Activation a) noexcept {
  return a == Activation::leaky_relu ? "leaky_relu" : "identity";
}

Activation activation_from_name(std::string_view name) {
  if (name == "identity") return Activation::identity;
  if (name == "leaky_relu") return Activation::leaky_relu;
  throw FormatError("unknown activation '" + std::string(name) + "'");
}

void DenseLayer::validate() const {
  if (weights.rows() == 0 || weights.cols() == 0) throw ShapeError("dense layer with empty weight matrix");
  if (bias.size() != weights.cols()) {
    throw ShapeError("dense layer bias length " + std::to_string(bias.size()) + " does not match weights " +
                     weights.shape_string());
  }
}

void DecoderSpec::validate() const {
  if (output_dim == 0) throw ParameterError("decoder output_dim must be >= 1");
  for (std::size_t h : hidden_sizes) {
    if (h == 0) throw ParameterError("decoder hidden sizes must be >= 1");
  }
  if (!(dropout >= 0.0 && dropout < 1.0)) throw ParameterError("decoder dropout must lie in [0, 1)");
}

DenseLayer make_dense(std::size_t in_dim, std::size_t out_dim, Activation act, num::Rng& rng) {
  DenseLayer layer{Matrix(in_dim, out_dim), std::vector<double>(out_dim, 0.0), act};
  const double limit = std::sqrt(6.0 / static_cast<double>(in_dim + out_dim));
  for (double& w : layer.weights.values()) w = rng.uniform(-limit, limit);
  return layer;
}

std::vector<DenseLayer> init_decoder(const DecoderSpec& spec, std::size_t input_dim, num::Rng& rng) {
  spec.validate();
  if (input_dim == 0) throw ParameterError("decoder input width must be >= 1");
  std::vector<DenseLayer> layers;
  std::size_t in = input_dim;
  for (std::size_t h : spec.hidden_sizes) {
    layers.push_back(make_dense(in, h, Activation::leaky_relu, rng));
    in = h;
  }
  layers.push_back(make_dense(in, spec.output_dim, Activation::identity, rng));
  return layers;
}

namespace {

void check_stack(std::span<const DenseLayer> layers, const Matrix& input) {
  if (layers.empty()) throw ShapeError("decoder has no layers");
  std::size_t width = input.cols();
  for (const auto& layer : layers) {
    layer.validate();
    if (layer.in_dim() != width) {
      throw ShapeError("decoder layer expects width " + std::to_string(layer.in_dim()) + " but receives " +
                       std::to_string(width) + " (input " + input.shape_string() + ")");
    }
    width = layer.out_dim();
  }
}

Matrix affine(const DenseLayer& layer, const Matrix& h) {
  Matrix z = num::matmul(h, layer.weights);
  const auto& k = kernels::active();
  for (std::size_t r = 0; r < z.rows(); ++r) k.axpy(1.0, layer.bias.data(), z.row(r).data(), z.cols());
  return z;
}

void activate(Activation act, Matrix& z) {
  if (act == Activation::leaky_relu) {
    for (double& v : z.values()) v = v > 0.0 ? v : kLeakySlope * v;
  }
}

}  // namespace

Matrix decoder_forward(const DecoderSpec& /*spec*/, std::span<const DenseLayer> layers, const Matrix& input) {
  check_stack(layers, input);
  Matrix h = input;
  for (const auto& layer : layers) {
    Matrix z = affine(layer, h);
    activate(layer.activation, z);
    h = std::move(z);
  }
  return h;
}

Matrix decoder_forward(const DecoderSpec& spec, std::span<const DenseLayer> layers, const Matrix& input,
                       ForwardTrace& trace, num::Rng* dropout_rng) {
  check_stack(layers, input);
  trace.inputs.clear();
  trace.pre_activations.clear();
  trace.dropout_masks.clear();
  const bool use_dropout = spec.dropout > 0.0 && dropout_rng != nullptr;
  const double keep_scale = use_dropout ? 1.0 / (1.0 - spec.dropout) : 1.0;
  Matrix h = input;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const auto& layer = layers[l];
    Matrix z = affine(layer, h);
    trace.inputs.push_back(std::move(h));
    Matrix out = z;
    activate(layer.activation, out);
    trace.pre_activations.push_back(std::move(z));
    const bool hidden = l + 1 < layers.size();
    if (use_dropout && hidden) {
      Matrix mask(out.rows(), out.cols());
      for (double& m : mask.values()) m = dropout_rng->uniform() < spec.dropout ? 0.0 : keep_scale;
      for (std::size_t i = 0; i < out.size(); ++i) out.values()[i] *= mask.values()[i];
      trace.dropout_masks.push_back(std::move(mask));
    } else {
      trace.dropout_masks.emplace_back();
    }
    h = std::move(out);
  }
  return h;
}

Matrix decoder_backward(std::span<const DenseLayer> layers, const ForwardTrace& trace, const Matrix& grad_output,
                        Gradients& grads, bool want_input_grad) {
  if (trace.inputs.size() != layers.size()) throw ShapeError("forward trace does not match decoder depth");
  const std::size_t first_block = grads.blocks.size();
  grads.blocks.resize(first_block + 2 * layers.size());
  Matrix g = grad_output;
  for (std::size_t l = layers.size(); l-- > 0;) {
    const auto& layer = layers[l];
    const Matrix& z = trace.pre_activations[l];
    num::require_same_shape(g, z, "decoder_backward");
    if (!trace.dropout_masks[l].empty()) {
      const auto mask = trace.dropout_masks[l].values();
      for (std::size_t i = 0; i < g.size(); ++i) g.values()[i] *= mask[i];
    }
    if (layer.activation == Activation::leaky_relu) {
      for (std::size_t i = 0; i < g.size(); ++i) {
        if (!(z.values()[i] > 0.0)) g.values()[i] *= kLeakySlope;
      }
    }
    const Matrix dw = num::matmul_tn(trace.inputs[l], g);
    grads.blocks[first_block + 2 * l].assign(dw.values().begin(), dw.values().end());
    grads.blocks[first_block + 2 * l + 1] = num::column_sums(g);
    if (l > 0 || want_input_grad) {
      g = num::matmul_nt(g, layer.weights);
    }
  }
  return want_input_grad ? g : Matrix();
}

std::vector<std::span<double>> parameter_blocks(std::vector<DenseLayer>& layers) {
  std::vector<std::span<double>> blocks;
  blocks.reserve(2 * layers.size());
  for (auto& layer : layers) {
    blocks.emplace_back(layer.weights.values());
    blocks.emplace_back(layer.bias);
  }
  return blocks;
}

std::size_t parameter_count(std::span<const DenseLayer> layers) noexcept {
  std::size_t n = 0;
  for (const auto& layer : layers) n += layer.weights.size() + layer.bias.size();
  return n;
}

}  // namespace cae::nn
