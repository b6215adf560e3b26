#pragma once
// Metrics and baselines: per-entry reconstruction error, closed-form linear
// refits, the decoder-refit protocol, PCA (the linear upper bound on any
// k-feature selection) and a softmax linear probe for downstream accuracy.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cae/dataio.hpp"
#include "cae/matrix.hpp"
#include "cae/model.hpp"
#include "cae/nn.hpp"
#include "cae/rng.hpp"

namespace cae::eval {

/// sum (x_true - x_hat)^2 / (n * d).
double reconstruction_error(const num::Matrix& x_true, const num::Matrix& x_hat);

/// Affine least-squares map from selected columns to targets.
struct LinearFit {
  num::Matrix weights;  // (k + 1) x d, last row is the intercept
  bool ridge_fallback = false;

  num::Matrix predict(const num::Matrix& selected) const;
};

/// Solves the normal equations [S 1]^T [S 1] W = [S 1]^T Y by Cholesky. If the
/// system is singular it is re-solved with ridge `lambda` and flagged.
LinearFit fit_least_squares(const num::Matrix& selected, const num::Matrix& targets, double lambda = 1e-8);

/// floor(4k/9), floor(2k/3), k, floor(3k/2), each at least 1.
std::vector<std::size_t> hidden_size_candidates(std::size_t k);

struct RefitOptions {
  std::size_t epochs = 200;
  double learning_rate = 1e-3;
  std::size_t batch_size = 256;
  std::uint64_t seed = 0;
  /// 0 trains for exactly `epochs`; otherwise stop after this many epochs
  /// without validation improvement and keep the best weights.
  std::size_t patience = 0;
};

struct RefitResult {
  std::size_t hidden_size = 0;  // 0 = linear least squares
  double val_mse = 0.0;
  bool ridge_fallback = false;
  std::optional<LinearFit> linear;
  nn::DecoderSpec spec;
  std::vector<nn::DenseLayer> layers;
  std::vector<std::pair<std::size_t, double>> scores;  // (hidden size, val mse) per candidate

  num::Matrix predict(const num::Matrix& selected) const;
};

/// Trains a fresh decoder per hidden-size candidate (0 = closed-form linear)
/// and keeps the one with the lowest validation error; ties go to the smaller network.
RefitResult refit_decoder(const num::Matrix& train_selected, const num::Matrix& train_x,
                          const num::Matrix& val_selected, const num::Matrix& val_x,
                          std::span<const std::size_t> hidden_candidates, const RefitOptions& options = {});

struct PcaModel {
  std::vector<double> mean;         // d
  num::Matrix components;           // k x d, orthonormal rows
  std::vector<double> eigenvalues;  // k, descending
};

struct PcaOptions {
  double tolerance = 1e-10;
  std::size_t max_iterations = 1000;
  std::uint64_t seed = 0;
};

/// Top-k principal directions by power iteration with deflation on the
/// smaller of the d x d covariance or the n x n Gram matrix. Throws RankError
/// when k exceeds the numerical rank of the centred data.
PcaModel pca_fit(const num::Matrix& x_train, std::size_t k, const PcaOptions& options = {});
num::Matrix pca_transform(const PcaModel& model, const num::Matrix& x);
num::Matrix pca_reconstruct(const PcaModel& model, const num::Matrix& x);

struct ProbeOptions {
  std::size_t epochs = 200;
  double learning_rate = 1e-2;
  std::size_t batch_size = 256;
  std::uint64_t seed = 0;
};

/// Test accuracy of a multinomial softmax linear classifier trained on the
/// given features. Throws DegenerateError when training labels have one class.
double probe_accuracy(const num::Matrix& train_features, std::span<const int> train_labels,
                      const num::Matrix& test_features, std::span<const int> test_labels,
                      const ProbeOptions& options = {});

/// k highest-variance columns of x (lowest index on ties).
std::vector<std::size_t> variance_filter(const num::Matrix& x, std::size_t k);
/// k distinct column indices drawn uniformly.
std::vector<std::size_t> random_selection(std::size_t d, std::size_t k, num::Rng& rng);

struct EvalResult {
  std::string method;
  std::size_t k = 0;
  double reconstruction_mse = 0.0;
  std::optional<double> probe_accuracy;
  std::vector<std::size_t> selected;
  double runtime_seconds = 0.0;
};

struct CompareOptions {
  TrainConfig cae;                 // k is overridden by compare()'s argument
  std::size_t random_repeats = 10;  // random-selection MSE is the mean over this many draws
  std::uint64_t seed = 0;
  bool probe = true;
  ProbeOptions probe_options;
};

/// Methods from {cae, pca, variance-filter, random-selection}. Every
/// feature-selecting method is scored by a closed-form linear decoder fitted
/// on the training split and evaluated on the test split. Rows are sorted by
/// reconstruction error, ascending.
std::vector<EvalResult> compare(const std::vector<std::string>& methods, const io::SplitResult& data, std::size_t k,
                                const CompareOptions& options);

/// `method,k,recon_mse,probe_accuracy,runtime_s,indices` with ';'-joined indices.
std::string results_to_csv(const std::vector<EvalResult>& results);

}  // namespace cae::eval
