#include <fstream>
#include <iterator>
#include <sstream>

#include "cae/dataio.hpp"
#include "cae/errors.hpp"

namespace cae::io {

namespace {

std::vector<std::uint8_t> read_all(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open IDX file " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::uint32_t be32(const std::vector<std::uint8_t>& bytes, std::size_t offset) {
  return (std::uint32_t{bytes[offset]} << 24) | (std::uint32_t{bytes[offset + 1]} << 16) |
         (std::uint32_t{bytes[offset + 2]} << 8) | std::uint32_t{bytes[offset + 3]};
}

void put_be32(std::string& out, std::uint32_t v) {
  out.push_back(static_cast<char>((v >> 24) & 0xff));
  out.push_back(static_cast<char>((v >> 16) & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
  out.push_back(static_cast<char>(v & 0xff));
}

}  // namespace

Dataset load_idx(const std::filesystem::path& images, const std::optional<std::filesystem::path>& labels) {
  const auto img = read_all(images);
  if (img.size() < 16) throw FormatError(images.string() + ": truncated IDX header");
  if (be32(img, 0) != kIdxImagesMagic) {
    std::ostringstream msg;
    msg << images.string() << ": bad IDX image magic 0x" << std::hex << be32(img, 0);
    throw FormatError(msg.str());
  }
  const std::size_t count = be32(img, 4);
  const std::size_t h = be32(img, 8);
  const std::size_t w = be32(img, 12);
  const std::size_t d = h * w;
  if (img.size() - 16 != count * d) {
    throw FormatError(images.string() + ": header declares " + std::to_string(count) + " images of " +
                      std::to_string(h) + "x" + std::to_string(w) + " but payload has " +
                      std::to_string(img.size() - 16) + " bytes");
  }
  Dataset ds;
  ds.features = num::Matrix(count, d);
  auto out = ds.features.values();
  for (std::size_t i = 0; i < count * d; ++i) out[i] = static_cast<double>(img[16 + i]) / 255.0;
  ds.feature_names.reserve(d);
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t c = 0; c < w; ++c) ds.feature_names.push_back("px_" + std::to_string(r) + "_" + std::to_string(c));
  }

  if (labels) {
    const auto lab = read_all(*labels);
    if (lab.size() < 8) throw FormatError(labels->string() + ": truncated IDX header");
    if (be32(lab, 0) != kIdxLabelsMagic) {
      std::ostringstream msg;
      msg << labels->string() << ": bad IDX label magic 0x" << std::hex << be32(lab, 0);
      throw FormatError(msg.str());
    }
    const std::size_t n_labels = be32(lab, 4);
    if (lab.size() - 8 != n_labels) {
      throw FormatError(labels->string() + ": header declares " + std::to_string(n_labels) + " labels but payload has " +
                        std::to_string(lab.size() - 8) + " bytes");
    }
    if (n_labels != count) {
      throw FormatError("IDX image/label count mismatch: " + std::to_string(count) + " images, " +
                        std::to_string(n_labels) + " labels");
    }
    ds.labels = std::vector<int>(lab.begin() + 8, lab.end());
  }
  return ds;
}

void write_idx_images(const std::filesystem::path& path, std::size_t count, std::size_t rows, std::size_t cols,
                      std::span<const std::uint8_t> pixels) {
  if (pixels.size() != count * rows * cols) throw ShapeError("write_idx_images: pixel count does not match shape");
  std::string out;
  out.reserve(16 + pixels.size());
  put_be32(out, kIdxImagesMagic);
  put_be32(out, static_cast<std::uint32_t>(count));
  put_be32(out, static_cast<std::uint32_t>(rows));
  put_be32(out, static_cast<std::uint32_t>(cols));
  out.append(reinterpret_cast<const char*>(pixels.data()), pixels.size());
  write_file_atomic(path, out);
}

void write_idx_labels(const std::filesystem::path& path, std::span<const std::uint8_t> labels) {
  std::string out;
  put_be32(out, kIdxLabelsMagic);
  put_be32(out, static_cast<std::uint32_t>(labels.size()));
  out.append(reinterpret_cast<const char*>(labels.data()), labels.size());
  write_file_atomic(path, out);
}

}  // namespace cae::io
