#include <algorithm>
#include <limits>
#include <numeric>

#include "cae/errors.hpp"
#include "cae/eval.hpp"

namespace cae::eval {

using num::Matrix;

namespace {

struct TrainedDecoder {
  std::vector<nn::DenseLayer> layers;
  double val_mse = 0.0;
};

TrainedDecoder train_hidden_decoder(const nn::DecoderSpec& spec, const Matrix& train_s, const Matrix& train_x,
                                    const Matrix& val_s, const Matrix& val_x, const RefitOptions& opts,
                                    num::Rng rng) {
  num::Rng init_rng = rng.child(0);
  num::Rng shuffle_rng = rng.child(1);
  TrainedDecoder out;
  out.layers = nn::init_decoder(spec, train_s.cols(), init_rng);
  auto params = nn::parameter_blocks(out.layers);
  nn::AdamConfig cfg;
  cfg.learning_rate = opts.learning_rate;
  nn::AdamState adam = nn::AdamState::for_blocks(params, cfg);

  std::vector<std::size_t> order(train_s.rows());
  std::iota(order.begin(), order.end(), std::size_t{0});
  nn::ForwardTrace trace;
  nn::Gradients grads;
  double best = std::numeric_limits<double>::infinity();
  std::vector<nn::DenseLayer> best_layers = out.layers;
  std::size_t since_best = 0;

  for (std::size_t epoch = 0; epoch < opts.epochs; ++epoch) {
    shuffle_rng.shuffle(std::span<std::size_t>(order));
    for (std::size_t start = 0; start < order.size(); start += opts.batch_size) {
      const std::span<const std::size_t> rows(order.data() + start, std::min(order.size(), start + opts.batch_size) - start);
      const Matrix pred = nn::decoder_forward(spec, out.layers, num::select_rows(train_s, rows), trace);
      const auto loss = nn::mse_loss(pred, num::select_rows(train_x, rows));
      grads.blocks.clear();
      nn::decoder_backward(out.layers, trace, loss.grad, grads, false);
      nn::adam_step(adam, params, grads);
    }
    if (opts.patience > 0) {
      const double v = reconstruction_error(val_x, nn::decoder_forward(spec, out.layers, val_s));
      if (v < best) {
        best = v;
        best_layers = out.layers;
        since_best = 0;
      } else if (++since_best >= opts.patience) {
        break;
      }
    }
  }
  if (opts.patience > 0) out.layers = std::move(best_layers);
  out.val_mse = reconstruction_error(val_x, nn::decoder_forward(spec, out.layers, val_s));
  return out;
}

}  // namespace

Matrix RefitResult::predict(const Matrix& selected) const {
  if (linear) return linear->predict(selected);
  return nn::decoder_forward(spec, layers, selected);
}

RefitResult refit_decoder(const Matrix& train_selected, const Matrix& train_x, const Matrix& val_selected,
                          const Matrix& val_x, std::span<const std::size_t> hidden_candidates,
                          const RefitOptions& options) {
  if (hidden_candidates.empty()) throw ParameterError("refit_decoder: candidate list is empty");
  if (train_selected.rows() != train_x.rows() || val_selected.rows() != val_x.rows() ||
      train_selected.cols() != val_selected.cols() || train_x.cols() != val_x.cols()) {
    throw ShapeError("refit_decoder: inconsistent train/validation shapes");
  }
  if (options.epochs == 0 || options.batch_size == 0) throw ParameterError("refit_decoder: epochs and batch size must be >= 1");

  std::vector<std::size_t> sizes(hidden_candidates.begin(), hidden_candidates.end());
  std::sort(sizes.begin(), sizes.end());
  sizes.erase(std::unique(sizes.begin(), sizes.end()), sizes.end());

  const num::Rng root(options.seed);
  RefitResult best;
  bool have_best = false;
  // Ascending sizes plus a strict comparison: ties keep the smaller network.
  for (std::size_t h : sizes) {
    RefitResult candidate;
    candidate.hidden_size = h;
    if (h == 0) {
      LinearFit fit = fit_least_squares(train_selected, train_x);
      candidate.val_mse = reconstruction_error(val_x, fit.predict(val_selected));
      candidate.ridge_fallback = fit.ridge_fallback;
      candidate.linear = std::move(fit);
    } else {
      candidate.spec.hidden_sizes = {h};
      candidate.spec.output_dim = train_x.cols();
      auto trained = train_hidden_decoder(candidate.spec, train_selected, train_x, val_selected, val_x, options,
                                          root.child(h));
      candidate.layers = std::move(trained.layers);
      candidate.val_mse = trained.val_mse;
    }
    best.scores.emplace_back(h, candidate.val_mse);
    if (!have_best || candidate.val_mse < best.val_mse) {
      auto scores = std::move(best.scores);
      best = std::move(candidate);
      best.scores = std::move(scores);
      have_best = true;
    }
  }
  return best;
}

}  // namespace cae::eval
