#pragma once

#include <span>
#include <vector>

namespace cae::num {

/// Tempered softmax: out_j = exp(logits_j / T) / sum_k exp(logits_k / T).
/// Uses max-subtraction, so it is safe for very small T. Throws ParameterError
/// for T <= 0 or non-finite logits.
std::vector<double> softmax(std::span<const double> logits, double temperature);

/// In-place variant writing into `out` (same length as logits). Returns the
/// largest output entry, which the selector needs for its convergence statistic.
double softmax_into(std::span<const double> logits, double temperature, std::span<double> out);

}  // namespace cae::num
