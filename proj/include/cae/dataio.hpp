#pragma once
// Dataset ingestion (CSV, IDX), deterministic splitting and per-feature
// normalisation. Model files live in model_io.hpp.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cae/matrix.hpp"

namespace cae::io {

struct Dataset {
  num::Matrix features;  // n x d
  std::optional<std::vector<int>> labels;
  std::vector<std::string> feature_names;

  std::size_t rows() const noexcept { return features.rows(); }
  std::size_t cols() const noexcept { return features.cols(); }
  Dataset subset(std::span<const std::size_t> rows) const;
  /// Keep the first n rows of a seeded permutation (desk-scale subsampling).
  Dataset subsample(std::size_t n, std::uint64_t seed) const;
};

// ---------------------------------------------------------------------------
// CSV: comma separated, '.' decimal point, optional single header row.

struct CsvOptions {
  bool has_header = false;
  /// Column holding integer class labels: a header name, or a 0-based index
  /// when the file has no header.
  std::optional<std::string> label_column;
  /// Drop rows with empty / NA / NaN cells instead of failing.
  bool drop_missing = false;
};

Dataset load_csv(const std::filesystem::path& path, const CsvOptions& options);
Dataset parse_csv(std::istream& in, const CsvOptions& options, const std::string& source = "<stream>");

/// True when the first non-empty line contains a cell that is not a number.
bool csv_looks_like_header(const std::filesystem::path& path);

/// Writes values with 17 significant digits (exact round trip). Header is
/// written when names is non-empty. Atomic: temp file + rename.
void save_csv(const std::filesystem::path& path, const num::Matrix& values, const std::vector<std::string>& names = {});

/// Shortest-exact / fixed-significance formatting helpers shared by the writers.
std::string format_double(double v, int significant_digits = 17);

// ---------------------------------------------------------------------------
// IDX (MNIST distribution format). Big-endian magic 0x00000803 for images,
// 0x00000801 for labels. Pixels are flattened row-major and scaled by 1/255.

inline constexpr std::uint32_t kIdxImagesMagic = 0x00000803;
inline constexpr std::uint32_t kIdxLabelsMagic = 0x00000801;

Dataset load_idx(const std::filesystem::path& images, const std::optional<std::filesystem::path>& labels = {});
void write_idx_images(const std::filesystem::path& path, std::size_t count, std::size_t rows, std::size_t cols,
                      std::span<const std::uint8_t> pixels);
void write_idx_labels(const std::filesystem::path& path, std::span<const std::uint8_t> labels);

// ---------------------------------------------------------------------------
// Splitting.

struct SplitSpec {
  double train = 0.72;
  double val = 0.08;
  double test = 0.20;
  std::uint64_t seed = 0;
  /// When non-zero: only the first `subsample` rows of the permutation are
  /// used for train + val (divided train:val), every remaining row is test.
  std::size_t subsample = 0;

  void validate() const;
};

struct SplitResult {
  Dataset train;
  Dataset val;
  Dataset test;
  std::vector<std::size_t> train_rows;
  std::vector<std::size_t> val_rows;
  std::vector<std::size_t> test_rows;
};

/// Seeded permutation, then contiguous slices: val = floor(n * val),
/// test = floor(n * test), the remainder goes to train. Throws SizeError when
/// a part with positive fraction would be empty.
SplitResult split(const Dataset& data, const SplitSpec& spec);

// ---------------------------------------------------------------------------
// Normalisation fitted on the training split.

enum class NormKind { none, minmax, zscore };

std::string norm_kind_name(NormKind kind);
NormKind norm_kind_from_name(const std::string& name);

struct Normalization {
  NormKind kind = NormKind::none;
  std::vector<double> shift;  // min (minmax) or mean (zscore)
  std::vector<double> scale;  // range or standard deviation; 0 marks a constant feature

  /// minmax: (x - min) / range clamped to [0, 1]; zscore: (x - mean) / sd;
  /// constant features map to 0 in both.
  void apply(num::Matrix& x) const;
  /// Inverse map (the clamp is not undone).
  void invert(num::Matrix& x) const;
};

Normalization fit_normalization(const num::Matrix& train, NormKind kind);

/// Fits on train, applies to train and to every matrix in others.
Normalization normalize_fit_apply(num::Matrix& train, std::span<num::Matrix* const> others,
                                  NormKind kind = NormKind::minmax);

/// Write `contents` to path atomically (temp file in the same directory + rename).
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

}  // namespace cae::io
