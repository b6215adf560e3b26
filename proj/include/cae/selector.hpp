#pragma once
// The concrete selector layer. Each of the k nodes owns a strictly positive
// weight row alpha^(i) over the d input features. In training mode a node emits
// x . m^(i) where m^(i) is a Concrete (Gumbel-softmax) sample; in test mode it
// emits the single feature argmax_j alpha^(i)_j.

#include <cstddef>
#include <string_view>
#include <vector>

#include "cae/matrix.hpp"
#include "cae/rng.hpp"

namespace cae::sel {

inline constexpr double kAlphaFloor = 1e-12;
inline constexpr double kAlphaInitLow = 1e-3;
inline constexpr double kAlphaInitHigh = 1e-2;

struct SelectorParams {
  num::Matrix alpha;  // k x d, every entry > 0

  std::size_t k() const noexcept { return alpha.rows(); }
  std::size_t d() const noexcept { return alpha.cols(); }
  void validate() const;
};

enum class ScheduleKind { exponential, constant_high, constant_low, abrupt };

std::string_view schedule_name(ScheduleKind kind) noexcept;
ScheduleKind schedule_from_name(std::string_view name);

struct AnnealSchedule {
  double t0 = 10.0;
  double tb = 0.01;
  std::size_t total_epochs = 100;
  ScheduleKind kind = ScheduleKind::exponential;

  void validate() const;
};

/// Temperature for epoch b. Exponential: t0 * (tb / t0)^(min(b, B) / B), held
/// at tb past B. The other kinds exist for the annealing ablation: constant t0,
/// constant tb, and t0 switching to tb at B / 2.
double temperature(const AnnealSchedule& schedule, std::size_t epoch);

/// One Concrete draw per node, plus the Gumbel noise that produced it so the
/// backward pass (and frozen-noise gradient checks) can replay it.
struct ConcreteSampleBatch {
  num::Matrix m;       // k x d, rows on the probability simplex
  num::Matrix gumbel;  // k x d
  double temperature = 1.0;

  /// Mean over nodes of max_j m_ij.
  double mean_max() const noexcept;
};

/// Entries i.i.d. uniform in [1e-3, 1e-2]. Throws ParameterError unless 1 <= k <= d.
SelectorParams init_alpha(std::size_t k, std::size_t d, num::Rng& rng);

ConcreteSampleBatch concrete_sample(const SelectorParams& params, double temperature, num::Rng& rng);
/// Same as concrete_sample with caller-provided (k x d) Gumbel noise.
ConcreteSampleBatch concrete_sample_with_noise(const SelectorParams& params, double temperature, num::Matrix gumbel);

/// X (n x d) -> X m^T (n x k).
num::Matrix selector_forward_train(const num::Matrix& x, const ConcreteSampleBatch& sample);

struct TestSelection {
  num::Matrix selected;              // n x k
  std::vector<std::size_t> indices;  // one feature per node, duplicates allowed
};

/// Argmax per node, lowest index on ties.
std::vector<std::size_t> argmax_indices(const SelectorParams& params);
TestSelection selector_forward_test(const num::Matrix& x, const SelectorParams& params);
/// Features chosen by more than one node, ascending.
std::vector<std::size_t> duplicate_selections(const std::vector<std::size_t>& indices);

struct SelectorGradients {
  num::Matrix alpha;  // k x d
  num::Matrix x;      // n x d, empty unless requested
};

/// Chain rule from d loss / d (X m^T) back through the dot products and the
/// tempered softmax of (log alpha + g) to alpha (and optionally X).
SelectorGradients selector_backward(const num::Matrix& x, const ConcreteSampleBatch& sample,
                                    const SelectorParams& params, const num::Matrix& upstream,
                                    bool want_x_grad = false);

/// Average over n_samples fresh draws of ConcreteSampleBatch::mean_max().
double mean_max_probability(const SelectorParams& params, double temperature, num::Rng& rng, std::size_t n_samples);

/// For each node the top_t feature indices by alpha, descending, lowest index on ties.
std::vector<std::vector<std::size_t>> feature_groups(const SelectorParams& params, std::size_t top_t);

/// Clamp every alpha to at least kAlphaFloor (after an optimiser step).
void project_positive(SelectorParams& params) noexcept;

}  // namespace cae::sel
