#include <cmath>
#include <fstream>
#include <numeric>

#include "cae/dataio.hpp"
#include "cae/errors.hpp"
#include "cae/rng.hpp"

namespace cae::io {

namespace {

std::vector<std::size_t> permutation(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  num::Rng rng(seed);
  rng.shuffle(std::span<std::size_t>(order));
  return order;
}

// floor with a little slack so 0.29 * 100 counts as 29.
std::size_t portion(std::size_t n, double fraction) {
  return static_cast<std::size_t>(std::floor(static_cast<double>(n) * fraction + 1e-9));
}

}  // namespace

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
  Dataset out;
  out.features = num::select_rows(features, rows);
  out.feature_names = feature_names;
  if (labels) {
    std::vector<int> l;
    l.reserve(rows.size());
    for (std::size_t r : rows) l.push_back((*labels)[r]);
    out.labels = std::move(l);
  }
  return out;
}

Dataset Dataset::subsample(std::size_t n, std::uint64_t seed) const {
  if (n >= rows()) return *this;
  auto order = permutation(rows(), seed);
  order.resize(n);
  return subset(order);
}

void SplitSpec::validate() const {
  if (train < 0 || val < 0 || test < 0) throw ParameterError("split fractions must be non-negative");
  if (std::abs(train + val + test - 1.0) > 1e-9) {
    throw ParameterError("split fractions must sum to 1 (got " + std::to_string(train + val + test) + ")");
  }
}

SplitResult split(const Dataset& data, const SplitSpec& spec) {
  spec.validate();
  const std::size_t n = data.rows();
  const auto order = permutation(n, spec.seed);

  std::size_t n_train = 0, n_val = 0, n_test = 0;
  if (spec.subsample > 0) {
    if (spec.subsample > n) {
      throw SizeError("subsample of " + std::to_string(spec.subsample) + " rows requested from " + std::to_string(n));
    }
    const double pool = spec.train + spec.val;
    n_val = pool > 0 ? portion(spec.subsample, spec.val / pool) : 0;
    n_train = spec.subsample - n_val;
    n_test = n - spec.subsample;
  } else {
    n_val = portion(n, spec.val);
    n_test = portion(n, spec.test);
    if (n_val + n_test > n) throw SizeError("split leaves no room for the training rows");
    n_train = n - n_val - n_test;
  }
  auto check = [&](const char* name, double frac, std::size_t count) {
    if (frac > 0 && count == 0) {
      throw SizeError(std::string("split: ") + name + " part is empty for n=" + std::to_string(n));
    }
  };
  check("train", spec.train, n_train);
  check("val", spec.val, n_val);
  check("test", spec.test, n_test);

  SplitResult out;
  out.train_rows.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  out.val_rows.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train),
                      order.begin() + static_cast<std::ptrdiff_t>(n_train + n_val));
  out.test_rows.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train + n_val), order.end());
  out.train = data.subset(out.train_rows);
  out.val = data.subset(out.val_rows);
  out.test = data.subset(out.test_rows);
  return out;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  const auto dir = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
  const auto tmp = dir / ("." + path.filename().string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw Error("write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw Error("cannot move " + tmp.string() + " to " + path.string() + ": " + ec.message());
  }
}

}  // namespace cae::io
