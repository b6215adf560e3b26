#include <algorithm>
#include <numeric>

#include "cae/errors.hpp"
#include "cae/eval.hpp"

namespace cae::eval {

using num::Matrix;

double probe_accuracy(const Matrix& train_features, std::span<const int> train_labels, const Matrix& test_features,
                      std::span<const int> test_labels, const ProbeOptions& options) {
  if (train_features.rows() != train_labels.size() || test_features.rows() != test_labels.size()) {
    throw ShapeError("probe_accuracy: labels do not align with feature rows");
  }
  if (train_features.cols() != test_features.cols()) throw ShapeError("probe_accuracy: train/test widths differ");
  if (train_labels.empty() || test_labels.empty()) throw SizeError("probe_accuracy: empty split");
  if (options.epochs == 0 || options.batch_size == 0) throw ParameterError("probe_accuracy: epochs and batch size must be >= 1");

  int top = 0;
  for (int y : train_labels) {
    if (y < 0) throw DataError("probe_accuracy: negative class label");
    top = std::max(top, y);
  }
  for (int y : test_labels) {
    if (y < 0) throw DataError("probe_accuracy: negative class label");
    top = std::max(top, y);
  }
  if (std::all_of(train_labels.begin(), train_labels.end(), [&](int y) { return y == train_labels[0]; })) {
    throw DegenerateError("probe_accuracy: training labels contain a single class");
  }
  const std::size_t classes = static_cast<std::size_t>(top) + 1;

  const num::Rng root(options.seed);
  num::Rng init_rng = root.child(0);
  num::Rng shuffle_rng = root.child(1);
  nn::DecoderSpec spec;
  spec.output_dim = classes;
  auto layers = nn::init_decoder(spec, train_features.cols(), init_rng);
  auto params = nn::parameter_blocks(layers);
  nn::AdamConfig cfg;
  cfg.learning_rate = options.learning_rate;
  nn::AdamState adam = nn::AdamState::for_blocks(params, cfg);

  std::vector<std::size_t> order(train_labels.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  nn::ForwardTrace trace;
  nn::Gradients grads;
  std::vector<int> batch_labels;
  for (std::size_t epoch = 0; epoch < options.epochs; ++epoch) {
    shuffle_rng.shuffle(std::span<std::size_t>(order));
    for (std::size_t start = 0; start < order.size(); start += options.batch_size) {
      const std::span<const std::size_t> rows(order.data() + start,
                                              std::min(order.size(), start + options.batch_size) - start);
      batch_labels.clear();
      for (std::size_t r : rows) batch_labels.push_back(train_labels[r]);
      const Matrix logits = nn::decoder_forward(spec, layers, num::select_rows(train_features, rows), trace);
      const auto loss = nn::cross_entropy_loss(logits, batch_labels);
      grads.blocks.clear();
      nn::decoder_backward(layers, trace, loss.grad, grads, false);
      nn::adam_step(adam, params, grads);
    }
  }

  const Matrix logits = nn::decoder_forward(spec, layers, test_features);
  std::size_t correct = 0;
  for (std::size_t r = 0; r < logits.rows(); ++r) {
    const auto row = logits.row(r);
    const auto pred = static_cast<int>(std::max_element(row.begin(), row.end()) - row.begin());
    if (pred == test_labels[r]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(test_labels.size());
}

}  // namespace cae::eval
