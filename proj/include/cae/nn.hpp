#pragma once
// Feed-forward decoder machinery: dense layers, losses, Adam and a
// finite-difference gradient checker. Everything is exact first-order
// backpropagation over row-major batches; no autodiff graph.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "cae/matrix.hpp"
#include "cae/rng.hpp"

namespace cae::nn {

enum class Activation { identity, leaky_relu };

inline constexpr double kLeakySlope = 0.2;

std::string_view activation_name(Activation a) noexcept;
Activation activation_from_name(std::string_view name);

struct DenseLayer {
  num::Matrix weights;  // in_dim x out_dim
  std::vector<double> bias;
  Activation activation = Activation::identity;

  std::size_t in_dim() const noexcept { return weights.rows(); }
  std::size_t out_dim() const noexcept { return weights.cols(); }
  void validate() const;
};

/// Decoder architecture. An empty hidden list is a linear (affine) decoder.
struct DecoderSpec {
  std::vector<std::size_t> hidden_sizes;
  std::size_t output_dim = 0;
  /// Inverted dropout on hidden activations during training only.
  double dropout = 0.0;

  void validate() const;
};

/// Glorot-uniform weights in +-sqrt(6 / (fan_in + fan_out)), zero bias.
DenseLayer make_dense(std::size_t in_dim, std::size_t out_dim, Activation act, num::Rng& rng);

/// Hidden layers use leaky-relu, the output layer is identity.
std::vector<DenseLayer> init_decoder(const DecoderSpec& spec, std::size_t input_dim, num::Rng& rng);

/// What backward needs from a training-mode forward pass.
struct ForwardTrace {
  std::vector<num::Matrix> inputs;           // input to each layer
  std::vector<num::Matrix> pre_activations;  // z = h W + b of each layer
  std::vector<num::Matrix> dropout_masks;    // per layer; empty matrix = no dropout
};

num::Matrix decoder_forward(const DecoderSpec& spec, std::span<const DenseLayer> layers, const num::Matrix& input);

/// Training-mode forward. Dropout is applied only when spec.dropout > 0 and a
/// dropout generator is supplied.
num::Matrix decoder_forward(const DecoderSpec& spec, std::span<const DenseLayer> layers, const num::Matrix& input,
                            ForwardTrace& trace, num::Rng* dropout_rng = nullptr);

/// Parameter gradients in the layout of parameter_blocks(): W0, b0, W1, b1, ...
struct Gradients {
  std::vector<std::vector<double>> blocks;
};

/// Backpropagates grad_output through the layers recorded in trace. Appends the
/// per-layer (weights, bias) gradients to grads and returns d loss / d input
/// (an empty matrix when want_input_grad is false).
num::Matrix decoder_backward(std::span<const DenseLayer> layers, const ForwardTrace& trace,
                             const num::Matrix& grad_output, Gradients& grads, bool want_input_grad = true);

std::vector<std::span<double>> parameter_blocks(std::vector<DenseLayer>& layers);
std::size_t parameter_count(std::span<const DenseLayer> layers) noexcept;

struct LossResult {
  double loss = 0.0;
  num::Matrix grad;  // d loss / d input, same shape as the prediction
};

/// Per-entry mean squared error (1 / (n d)) * sum (p - t)^2.
LossResult mse_loss(const num::Matrix& predicted, const num::Matrix& target);

/// Mean over rows of -log softmax(logits)[label]. Throws DataError for labels
/// outside [0, logits.cols()).
LossResult cross_entropy_loss(const num::Matrix& logits, std::span<const int> labels);

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  AdamConfig config;
  std::uint64_t step = 0;
  std::vector<std::vector<double>> first_moment;
  std::vector<std::vector<double>> second_moment;

  AdamState() = default;
  AdamState(std::span<const std::size_t> block_sizes, AdamConfig cfg);
  static AdamState for_blocks(std::span<const std::span<double>> params, AdamConfig cfg);
};

/// One bias-corrected Adam update of every block. Throws ShapeError when the
/// gradient layout does not match the parameters or the state.
void adam_step(AdamState& state, std::span<const std::span<double>> params, const Gradients& grads);

/// Loss evaluated at params; when grad is non-null it receives the analytic gradient.
using LossWithGradient = std::function<double(std::span<const double> params, std::vector<double>* grad)>;

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::size_t worst_index = 0;
  std::size_t checked = 0;
  std::size_t skipped = 0;
};

/// Compares the analytic gradient with central differences of step h and
/// reports max |analytic - numeric| / max(1, |analytic|). Indices for which
/// skip(i) is true are left out (kinks of piecewise-linear activations).
GradCheckResult grad_check(const LossWithGradient& fn, std::span<const double> params, double h = 1e-5,
                           const std::function<bool(std::size_t)>& skip = {});

}  // namespace cae::nn
