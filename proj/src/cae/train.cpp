#include <algorithm>
#include <cmath>
#include <numeric>

#include "cae/errors.hpp"
#include "cae/eval.hpp"
#include "cae/model.hpp"

namespace cae {

using num::Matrix;

namespace {

// Independent streams derived from the run seed. Keeping them separate means
// two runs that differ only in schedule share the same initial weights.
enum Stream : std::uint64_t { kAlphaInit = 0, kDecoderInit = 1, kTraining = 2, kDropout = 3 };

struct Task {
  const Matrix* x_train = nullptr;
  const Matrix* t_train = nullptr;  // regression targets (unsupervised)
  std::span<const int> y_train;     // class labels (supervised)
  const Matrix* x_val = nullptr;
  const Matrix* t_val = nullptr;
  std::span<const int> y_val;
  bool supervised = false;
};

std::size_t class_count(std::span<const int> a, std::span<const int> b) {
  int top = -1;
  for (int v : a) top = std::max(top, v);
  for (int v : b) top = std::max(top, v);
  return static_cast<std::size_t>(top + 1);
}

std::vector<int> gather(std::span<const int> labels, std::span<const std::size_t> rows) {
  std::vector<int> out;
  out.reserve(rows.size());
  for (std::size_t r : rows) out.push_back(labels[r]);
  return out;
}

double evaluate_test_mode(const CaeModel& model, const Task& task, bool refit) {
  // With no validation rows the training data stands in.
  const bool have_val = task.x_val != nullptr && task.x_val->rows() > 0;
  const Matrix& x = have_val ? *task.x_val : *task.x_train;
  const auto sel = sel::selector_forward_test(x, model.selector);
  if (task.supervised) {
    const auto logits = nn::decoder_forward(model.decoder_spec, model.decoder, sel.selected);
    return nn::cross_entropy_loss(logits, have_val ? task.y_val : task.y_train).loss;
  }
  const Matrix& target = have_val ? *task.t_val : *task.t_train;
  if (refit) {
    const auto fit = eval::fit_least_squares(num::select_columns(*task.x_train, sel.indices), *task.t_train);
    return eval::reconstruction_error(target, fit.predict(sel.selected));
  }
  return eval::reconstruction_error(target, nn::decoder_forward(model.decoder_spec, model.decoder, sel.selected));
}

TrainResult run_training(const Task& task, const TrainConfig& cfg, const EpochCallback& on_epoch) {
  const Matrix& x = *task.x_train;
  const std::size_t n = x.rows();
  const std::size_t d = x.cols();
  cfg.validate(d);
  if (n == 0) throw SizeError("training split is empty");
  if (!x.all_finite()) throw DataError("training data contains non-finite values");
  if (task.supervised) {
    if (cfg.mode != Mode::supervised) throw ModeError("supervised training requires mode = supervised");
    if (task.y_train.size() != n) throw ShapeError("training labels do not align with training rows");
    if (task.x_val != nullptr && task.y_val.size() != task.x_val->rows()) {
      throw ShapeError("validation labels do not align with validation rows");
    }
  } else {
    if (cfg.mode != Mode::unsupervised) throw ModeError("reconstruction training requires mode = unsupervised");
    if (task.t_train->rows() != n) throw ShapeError("training targets do not align with training rows");
    if (task.x_val != nullptr && task.x_val->rows() > 0 &&
        (task.t_val->rows() != task.x_val->rows() || task.t_val->cols() != task.t_train->cols())) {
      throw ShapeError("validation targets do not align with validation rows");
    }
  }

  const num::Rng root(cfg.seed);
  num::Rng init_rng = root.child(kAlphaInit);
  num::Rng decoder_rng = root.child(kDecoderInit);
  num::Rng rng = root.child(kTraining);
  num::Rng dropout_rng = root.child(kDropout);

  TrainResult result;
  CaeModel& model = result.model;
  model.mode = cfg.mode;
  model.d = d;
  model.k = cfg.k;
  model.selector = sel::init_alpha(cfg.k, d, init_rng);
  model.decoder_spec.hidden_sizes = cfg.effective_hidden_sizes();
  model.decoder_spec.dropout = cfg.dropout;
  if (task.supervised) {
    model.num_classes = class_count(task.y_train, task.y_val);
    const bool one_class = std::all_of(task.y_train.begin(), task.y_train.end(),
                                       [&](int y) { return y == task.y_train.front(); });
    if (one_class) throw DegenerateError("supervised training labels contain a single class");
    model.decoder_spec.output_dim = model.num_classes;
  } else {
    model.decoder_spec.output_dim = task.t_train->cols();
  }
  model.decoder = nn::init_decoder(model.decoder_spec, cfg.k, decoder_rng);

  std::vector<std::span<double>> params;
  params.emplace_back(model.selector.alpha.values());
  for (auto block : nn::parameter_blocks(model.decoder)) params.push_back(block);
  nn::AdamConfig adam_cfg;
  adam_cfg.learning_rate = cfg.learning_rate;
  nn::AdamState adam = nn::AdamState::for_blocks(params, adam_cfg);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  const std::size_t max_epochs = cfg.effective_max_epochs();
  nn::ForwardTrace trace;
  nn::Gradients grads;

  for (std::size_t epoch = 1; epoch <= max_epochs; ++epoch) {
    const double temp = sel::temperature(cfg.schedule, epoch);
    rng.shuffle(std::span<std::size_t>(order));
    double loss_sum = 0.0;
    double max_prob_sum = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < n; start += cfg.batch_size) {
      const std::size_t stop = std::min(n, start + cfg.batch_size);
      const std::span<const std::size_t> rows(order.data() + start, stop - start);
      const Matrix xb = num::select_rows(x, rows);

      const auto sample = sel::concrete_sample(model.selector, temp, rng);
      const Matrix xs = sel::selector_forward_train(xb, sample);
      const Matrix out = nn::decoder_forward(model.decoder_spec, model.decoder, xs, trace,
                                             cfg.dropout > 0.0 ? &dropout_rng : nullptr);
      const nn::LossResult loss =
          task.supervised ? nn::cross_entropy_loss(out, gather(task.y_train, rows))
                          : nn::mse_loss(out, task.t_train == task.x_train ? xb : num::select_rows(*task.t_train, rows));
      if (!std::isfinite(loss.loss)) throw DivergenceError(epoch, "non-finite training loss");

      grads.blocks.assign(1, {});
      const Matrix grad_xs = nn::decoder_backward(model.decoder, trace, loss.grad, grads, true);
      auto sel_grad = sel::selector_backward(xb, sample, model.selector, grad_xs);
      grads.blocks[0].assign(sel_grad.alpha.values().begin(), sel_grad.alpha.values().end());
      nn::adam_step(adam, params, grads);
      sel::project_positive(model.selector);

      loss_sum += loss.loss * static_cast<double>(rows.size());
      max_prob_sum += sample.mean_max();
      ++batches;
    }
    if (!model.selector.alpha.all_finite()) throw DivergenceError(epoch, "non-finite selector weights");

    EpochRecord rec;
    rec.epoch = epoch;
    rec.temperature = temp;
    rec.mean_max_prob = max_prob_sum / static_cast<double>(batches);
    rec.train_loss = loss_sum / static_cast<double>(n);
    rec.val_loss = evaluate_test_mode(model, task, cfg.refit_validation && !task.supervised);
    if (!std::isfinite(rec.val_loss)) throw DivergenceError(epoch, "non-finite validation loss");
    result.report.epochs.push_back(rec);
    if (on_epoch) on_epoch(rec);
    if (cfg.early_stop && rec.mean_max_prob > cfg.stop_threshold) {
      result.report.stop_reason = StopReason::threshold_reached;
      break;
    }
  }

  result.report.selected = sel::argmax_indices(model.selector);
  result.report.duplicates = sel::duplicate_selections(result.report.selected);
  return result;
}

}  // namespace

TrainResult train(const Matrix& x_train, const Matrix& x_val, const TrainConfig& config,
                  const EpochCallback& on_epoch) {
  Task task;
  task.x_train = &x_train;
  task.t_train = &x_train;
  task.x_val = &x_val;
  task.t_val = &x_val;
  return run_training(task, config, on_epoch);
}

TrainResult train_with_targets(const Matrix& x_train, const Matrix& t_train, const Matrix& x_val,
                               const Matrix& t_val, const TrainConfig& config, const EpochCallback& on_epoch) {
  Task task;
  task.x_train = &x_train;
  task.t_train = &t_train;
  task.x_val = &x_val;
  task.t_val = &t_val;
  return run_training(task, config, on_epoch);
}

TrainResult train_supervised(const Matrix& x_train, std::span<const int> y_train, const Matrix& x_val,
                             std::span<const int> y_val, const TrainConfig& config, const EpochCallback& on_epoch) {
  Task task;
  task.supervised = true;
  task.x_train = &x_train;
  task.y_train = y_train;
  task.x_val = &x_val;
  task.y_val = y_val;
  return run_training(task, config, on_epoch);
}

std::vector<AblationRun> schedule_ablation(const Matrix& x_train, const Matrix& x_val, const TrainConfig& config,
                                           const EpochCallback& on_epoch) {
  std::vector<AblationRun> runs;
  for (auto kind : {sel::ScheduleKind::constant_high, sel::ScheduleKind::constant_low, sel::ScheduleKind::exponential,
                    sel::ScheduleKind::abrupt}) {
    TrainConfig cfg = config;
    cfg.schedule.kind = kind;
    cfg.early_stop = false;
    cfg.max_epochs = cfg.schedule.total_epochs;
    runs.push_back({kind, train(x_train, x_val, cfg, on_epoch)});
  }
  return runs;
}

}  // namespace cae
