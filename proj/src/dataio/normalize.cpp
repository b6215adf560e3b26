#include <algorithm>
#include <cmath>

#include "cae/dataio.hpp"
#include "cae/errors.hpp"

namespace cae::io {

std::string norm_kind_name(NormKind kind) {
  switch (kind) {
    case NormKind::none:
      return "none";
    case NormKind::minmax:
      return "minmax";
    case NormKind::zscore:
      return "zscore";
  }
  return "none";
}

NormKind norm_kind_from_name(const std::string& name) {
  if (name == "none") return NormKind::none;
  if (name == "minmax") return NormKind::minmax;
  if (name == "zscore") return NormKind::zscore;
  throw ParameterError("unknown normalization '" + name + "' (expected minmax, zscore or none)");
}

Normalization fit_normalization(const num::Matrix& train, NormKind kind) {
  Normalization norm;
  norm.kind = kind;
  if (kind == NormKind::none) return norm;
  if (train.rows() == 0) throw SizeError("cannot fit normalization on an empty training split");
  const std::size_t d = train.cols();
  norm.shift.assign(d, 0.0);
  norm.scale.assign(d, 0.0);
  if (kind == NormKind::minmax) {
    for (std::size_t c = 0; c < d; ++c) {
      double lo = train(0, c), hi = train(0, c);
      for (std::size_t r = 1; r < train.rows(); ++r) {
        lo = std::min(lo, train(r, c));
        hi = std::max(hi, train(r, c));
      }
      norm.shift[c] = lo;
      norm.scale[c] = hi - lo;
    }
  } else {
    const auto mean = num::column_means(train);
    for (std::size_t c = 0; c < d; ++c) {
      double ss = 0.0;
      for (std::size_t r = 0; r < train.rows(); ++r) {
        const double diff = train(r, c) - mean[c];
        ss += diff * diff;
      }
      norm.shift[c] = mean[c];
      norm.scale[c] = std::sqrt(ss / static_cast<double>(train.rows()));
    }
  }
  return norm;
}

void Normalization::apply(num::Matrix& x) const {
  if (kind == NormKind::none) return;
  if (x.cols() != shift.size()) {
    throw ShapeError("normalization fitted on " + std::to_string(shift.size()) + " features applied to " +
                     x.shape_string());
  }
  for (std::size_t r = 0; r < x.rows(); ++r) {
    auto row = x.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (scale[c] == 0.0) {
        row[c] = 0.0;
        continue;
      }
      const double v = (row[c] - shift[c]) / scale[c];
      row[c] = kind == NormKind::minmax ? std::clamp(v, 0.0, 1.0) : v;
    }
  }
}

void Normalization::invert(num::Matrix& x) const {
  if (kind == NormKind::none) return;
  if (x.cols() != shift.size()) {
    throw ShapeError("normalization fitted on " + std::to_string(shift.size()) + " features inverted on " +
                     x.shape_string());
  }
  for (std::size_t r = 0; r < x.rows(); ++r) {
    auto row = x.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) row[c] = row[c] * scale[c] + shift[c];
  }
}

Normalization normalize_fit_apply(num::Matrix& train, std::span<num::Matrix* const> others, NormKind kind) {
  Normalization norm = fit_normalization(train, kind);
  norm.apply(train);
  for (num::Matrix* m : others) {
    if (m != nullptr && !m->empty()) norm.apply(*m);
  }
  return norm;
}

}  // namespace cae::io
