#include "cae/selector.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "cae/errors.hpp"
#include "cae/stochastic.hpp"

namespace cae::sel {

using num::Matrix;

void SelectorParams::validate() const {
  if (k() == 0) throw ParameterError("selector needs at least one node");
  if (k() > d()) {
    throw ParameterError("selector has k=" + std::to_string(k()) + " nodes but only d=" + std::to_string(d()) +
                         " features");
  }
  for (double a : alpha.values()) {
    if (!(a > 0.0) || !std::isfinite(a)) throw ParameterError("selector weights must be finite and > 0");
  }
}

std::string_view schedule_name(ScheduleKind kind) noexcept {
  switch (kind) {
    case ScheduleKind::exponential:
      return "exp";
    case ScheduleKind::constant_high:
      return "const_high";
    case ScheduleKind::constant_low:
      return "const_low";
    case ScheduleKind::abrupt:
      return "abrupt";
  }
  return "exp";
}

ScheduleKind schedule_from_name(std::string_view name) {
  if (name == "exp") return ScheduleKind::exponential;
  if (name == "const_high") return ScheduleKind::constant_high;
  if (name == "const_low") return ScheduleKind::constant_low;
  if (name == "abrupt") return ScheduleKind::abrupt;
  throw ParameterError("unknown annealing schedule '" + std::string(name) + "'");
}

void AnnealSchedule::validate() const {
  if (!(tb > 0.0) || !(t0 >= tb) || !std::isfinite(t0)) {
    throw ParameterError("annealing schedule needs t0 >= tb > 0 (got t0=" + std::to_string(t0) +
                         ", tb=" + std::to_string(tb) + ")");
  }
  if (total_epochs < 1) throw ParameterError("annealing schedule needs at least one epoch");
}

double temperature(const AnnealSchedule& s, std::size_t epoch) {
  switch (s.kind) {
    case ScheduleKind::constant_high:
      return s.t0;
    case ScheduleKind::constant_low:
      return s.tb;
    case ScheduleKind::abrupt:
      return 2 * epoch < s.total_epochs ? s.t0 : s.tb;
    case ScheduleKind::exponential:
      break;
  }
  if (epoch >= s.total_epochs) return s.tb;
  const double frac = static_cast<double>(epoch) / static_cast<double>(s.total_epochs);
  return s.t0 * std::pow(s.tb / s.t0, frac);
}

double ConcreteSampleBatch::mean_max() const noexcept {
  if (m.rows() == 0) return 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const auto row = m.row(i);
    total += *std::max_element(row.begin(), row.end());
  }
  return total / static_cast<double>(m.rows());
}

SelectorParams init_alpha(std::size_t k, std::size_t d, num::Rng& rng) {
  if (k == 0 || k > d) {
    throw ParameterError("cannot select k=" + std::to_string(k) + " of d=" + std::to_string(d) + " features");
  }
  SelectorParams p{Matrix(k, d)};
  for (double& a : p.alpha.values()) a = rng.uniform(kAlphaInitLow, kAlphaInitHigh);
  return p;
}

ConcreteSampleBatch concrete_sample_with_noise(const SelectorParams& params, double temperature, Matrix gumbel) {
  num::require_same_shape(params.alpha, gumbel, "concrete_sample");
  ConcreteSampleBatch out{Matrix(params.k(), params.d()), std::move(gumbel), temperature};
  std::vector<double> logits(params.d());
  for (std::size_t i = 0; i < params.k(); ++i) {
    const auto a = params.alpha.row(i);
    const auto g = out.gumbel.row(i);
    for (std::size_t j = 0; j < logits.size(); ++j) logits[j] = std::log(a[j]) + g[j];
    num::softmax_into(logits, temperature, out.m.row(i));
  }
  return out;
}

ConcreteSampleBatch concrete_sample(const SelectorParams& params, double temperature, num::Rng& rng) {
  Matrix g(params.k(), params.d());
  for (double& v : g.values()) v = rng.gumbel();
  return concrete_sample_with_noise(params, temperature, std::move(g));
}

Matrix selector_forward_train(const Matrix& x, const ConcreteSampleBatch& sample) {
  if (x.cols() != sample.m.cols()) {
    throw ShapeError("selector_forward_train: data " + x.shape_string() + " vs selector " + sample.m.shape_string());
  }
  return num::matmul_nt(x, sample.m);
}

std::vector<std::size_t> argmax_indices(const SelectorParams& params) {
  std::vector<std::size_t> idx(params.k());
  for (std::size_t i = 0; i < params.k(); ++i) {
    const auto row = params.alpha.row(i);
    // max_element returns the first maximum, i.e. the lowest index on ties.
    idx[i] = static_cast<std::size_t>(std::max_element(row.begin(), row.end()) - row.begin());
  }
  return idx;
}

TestSelection selector_forward_test(const Matrix& x, const SelectorParams& params) {
  if (x.cols() != params.d()) {
    throw ShapeError("selector_forward_test: data " + x.shape_string() + " vs selector " + params.alpha.shape_string());
  }
  TestSelection out;
  out.indices = argmax_indices(params);
  out.selected = num::select_columns(x, out.indices);
  return out;
}

std::vector<std::size_t> duplicate_selections(const std::vector<std::size_t>& indices) {
  std::vector<std::size_t> sorted = indices;
  std::sort(sorted.begin(), sorted.end());
  std::vector<std::size_t> dups;
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i] == sorted[i - 1] && (dups.empty() || dups.back() != sorted[i])) dups.push_back(sorted[i]);
  }
  return dups;
}

SelectorGradients selector_backward(const Matrix& x, const ConcreteSampleBatch& sample, const SelectorParams& params,
                                    const Matrix& upstream, bool want_x_grad) {
  num::require_same_shape(params.alpha, sample.m, "selector_backward");
  if (x.cols() != params.d() || upstream.rows() != x.rows() || upstream.cols() != params.k()) {
    throw ShapeError("selector_backward: data " + x.shape_string() + ", upstream " + upstream.shape_string() +
                     ", selector " + params.alpha.shape_string());
  }
  SelectorGradients out;
  // d loss / d m = upstream^T X, then through the softmax Jacobian
  // dm_j/dz_l = m_j (delta_jl - m_l) with z = (log alpha + g) / T.
  Matrix gm = num::matmul_tn(upstream, x);
  const double inv_t = 1.0 / sample.temperature;
  for (std::size_t i = 0; i < params.k(); ++i) {
    const auto m = sample.m.row(i);
    const auto a = params.alpha.row(i);
    auto g = gm.row(i);
    double inner = 0.0;
    for (std::size_t j = 0; j < m.size(); ++j) inner += m[j] * g[j];
    for (std::size_t j = 0; j < m.size(); ++j) g[j] = m[j] * (g[j] - inner) * inv_t / a[j];
  }
  out.alpha = std::move(gm);
  if (want_x_grad) out.x = num::matmul(upstream, sample.m);
  return out;
}

double mean_max_probability(const SelectorParams& params, double temperature, num::Rng& rng, std::size_t n_samples) {
  if (n_samples == 0) throw ParameterError("mean_max_probability needs at least one sample");
  double total = 0.0;
  for (std::size_t s = 0; s < n_samples; ++s) total += concrete_sample(params, temperature, rng).mean_max();
  return total / static_cast<double>(n_samples);
}

std::vector<std::vector<std::size_t>> feature_groups(const SelectorParams& params, std::size_t top_t) {
  if (top_t > params.d()) {
    throw ParameterError("feature_groups: top " + std::to_string(top_t) + " exceeds d=" + std::to_string(params.d()));
  }
  std::vector<std::vector<std::size_t>> groups(params.k());
  std::vector<std::size_t> order(params.d());
  for (std::size_t i = 0; i < params.k(); ++i) {
    const auto row = params.alpha.row(i);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) { return row[l] > row[r]; });
    groups[i].assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(top_t));
  }
  return groups;
}

void project_positive(SelectorParams& params) noexcept {
  for (double& a : params.alpha.values()) a = std::max(a, kAlphaFloor);
}

}  // namespace cae::sel
