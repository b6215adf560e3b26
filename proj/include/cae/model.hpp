#pragma once
// The concrete autoencoder: selector layer + decoder, trained end to end with
// an annealed Concrete relaxation, then used for feature selection (argmax
// selector) and imputation (decoder on the selected columns).

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cae/dataio.hpp"
#include "cae/matrix.hpp"
#include "cae/nn.hpp"
#include "cae/selector.hpp"

namespace cae {

enum class Mode { unsupervised, supervised };

std::string mode_name(Mode mode);
Mode mode_from_name(const std::string& name);

struct TrainConfig {
  std::size_t k = 0;
  sel::AnnealSchedule schedule{};
  double learning_rate = 1e-3;
  std::size_t batch_size = 256;
  /// 0 means 3 * schedule.total_epochs.
  std::size_t max_epochs = 0;
  double stop_threshold = 0.99;
  /// Stop as soon as the epoch's mean max-probability exceeds stop_threshold.
  bool early_stop = true;
  /// Decoder hidden layers. Unset: linear for unsupervised, one hidden layer of
  /// 3k/2 units for supervised.
  std::optional<std::vector<std::size_t>> hidden_sizes;
  double dropout = 0.0;
  Mode mode = Mode::unsupervised;
  std::uint64_t seed = 0;
  /// Report validation error of a closed-form least-squares decoder refitted on
  /// the selected training columns each epoch, instead of the model's own decoder.
  bool refit_validation = false;

  std::size_t effective_max_epochs() const noexcept;
  std::vector<std::size_t> effective_hidden_sizes() const;
  void validate(std::size_t d) const;
};

struct CaeModel {
  Mode mode = Mode::unsupervised;
  std::size_t d = 0;
  std::size_t k = 0;
  std::size_t num_classes = 0;  // supervised only
  sel::SelectorParams selector;
  nn::DecoderSpec decoder_spec;
  std::vector<nn::DenseLayer> decoder;
  std::vector<std::string> feature_names;
  std::optional<io::Normalization> normalization;

  /// Checks the cross-field invariants (decoder input width = k, ...).
  void validate() const;
};

struct EpochRecord {
  std::size_t epoch = 0;
  double temperature = 0.0;
  double mean_max_prob = 0.0;
  double train_loss = 0.0;
  double val_loss = 0.0;
};

enum class StopReason { threshold_reached, max_epochs };

struct TrainReport {
  std::vector<EpochRecord> epochs;
  StopReason stop_reason = StopReason::max_epochs;
  std::vector<std::size_t> selected;    // argmax indices of the final model
  std::vector<std::size_t> duplicates;  // features chosen by more than one node

  /// `epoch,temperature,mean_max_prob,train_loss,val_loss`, 6 significant digits.
  std::string to_csv() const;
};

struct TrainResult {
  CaeModel model;
  TrainReport report;
};

using EpochCallback = std::function<void(const EpochRecord&)>;

/// Unsupervised training: reconstruct every column of x from the k selected ones.
TrainResult train(const num::Matrix& x_train, const num::Matrix& x_val, const TrainConfig& config,
                  const EpochCallback& on_epoch = {});

/// Supervised training (cross-entropy on class labels). config.mode must be supervised.
TrainResult train_supervised(const num::Matrix& x_train, std::span<const int> y_train, const num::Matrix& x_val,
                             std::span<const int> y_val, const TrainConfig& config,
                             const EpochCallback& on_epoch = {});

/// Unsupervised training against explicit regression targets instead of x itself.
TrainResult train_with_targets(const num::Matrix& x_train, const num::Matrix& t_train, const num::Matrix& x_val,
                               const num::Matrix& t_val, const TrainConfig& config,
                               const EpochCallback& on_epoch = {});

/// Test-mode selection: the n x k argmax columns of x and their indices.
sel::TestSelection select_features(const CaeModel& model, const num::Matrix& x);

/// Decoder forward pass on selected columns. Throws ModeError for supervised
/// models and ShapeError when x_selected does not have k columns.
num::Matrix impute(const CaeModel& model, const num::Matrix& x_selected);

/// Supervised models: class scores for x (full d columns).
num::Matrix predict_logits(const CaeModel& model, const num::Matrix& x);
std::vector<int> predict_labels(const CaeModel& model, const num::Matrix& x);

struct AblationRun {
  sel::ScheduleKind kind;
  TrainResult result;
};

/// Trains the same configuration under the four annealing schedules
/// (exponential, constant t0, constant tb, abrupt drop at B/2) for exactly
/// schedule.total_epochs epochs each, without early stopping.
std::vector<AblationRun> schedule_ablation(const num::Matrix& x_train, const num::Matrix& x_val,
                                           const TrainConfig& config, const EpochCallback& on_epoch = {});

}  // namespace cae
