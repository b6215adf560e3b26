#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "cae/errors.hpp"
#include "cae/model.hpp"
#include "cae/model_io.hpp"

namespace fs = std::filesystem;
using cae::num::Matrix;
namespace io = cae::io;

namespace {

fs::path temp_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("cae_unit_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

io::Dataset parse(const std::string& text, io::CsvOptions opts) {
  std::istringstream in(text);
  return io::parse_csv(in, opts);
}

cae::CaeModel small_model() {
  cae::TrainConfig cfg;
  cfg.k = 2;
  cfg.schedule.total_epochs = 3;
  cfg.batch_size = 8;
  cae::num::Rng rng(1);
  Matrix x(40, 4);
  for (double& v : x.values()) v = rng.uniform();
  auto model = cae::train(x, Matrix(0, 4), cfg).model;
  model.feature_names = {"a", "b", "c", "d"};
  io::Normalization norm;
  norm.kind = io::NormKind::minmax;
  norm.shift = {0.1, 0.2, 0.3, 1.0 / 3.0};
  norm.scale = {1.0, 2.0, 0.0, 0.7};
  model.normalization = norm;
  return model;
}

}  // namespace

TEST_CASE("csv: header, label column by name, quoting and whitespace") {
  io::CsvOptions opts;
  opts.has_header = true;
  opts.label_column = "y";
  const auto ds = parse("a, \"b\",y\n1,2.5,0\n-3e-1 , +4,2\n\n", opts);
  CHECK(ds.feature_names == std::vector<std::string>{"a", "b"});
  CHECK(ds.features == Matrix{{1, 2.5}, {-0.3, 4}});
  REQUIRE(ds.labels);
  CHECK(*ds.labels == std::vector<int>{0, 2});
}

TEST_CASE("csv: headerless files get generated names and index label columns") {
  io::CsvOptions opts;
  opts.label_column = "0";
  const auto ds = parse("1,5,6\r\n0,7,8\r\n", opts);
  CHECK(ds.feature_names == std::vector<std::string>{"f0", "f1"});
  CHECK(ds.features == Matrix{{5, 6}, {7, 8}});
  CHECK(*ds.labels == std::vector<int>{1, 0});
  opts.label_column = "y";
  CHECK_THROWS_AS(parse("1,2\n", opts), cae::ParseError);
}

TEST_CASE("csv: errors and missing values") {
  io::CsvOptions opts;
  CHECK_THROWS_AS(parse("1,2\n3\n", opts), cae::ParseError);
  CHECK_THROWS_AS(parse("1,abc\n", opts), cae::ParseError);
  CHECK_THROWS_AS(parse("1,NA\n", opts), cae::ParseError);
  CHECK_THROWS_AS(parse("", opts), cae::ParseError);
  opts.label_column = "1";
  CHECK_THROWS_AS(parse("1,0.5\n", opts), cae::ParseError);  // non-integer label
  opts.label_column.reset();
  opts.drop_missing = true;
  const auto ds = parse("1,2\nNA,3\n4,\n5,6\n", opts);
  CHECK(ds.features == Matrix{{1, 2}, {5, 6}});
  CHECK_THROWS_AS(io::load_csv("/nonexistent/file.csv", {}), cae::ParseError);
}

TEST_CASE("csv: save/load round trip is exact and header sniffing works") {
  const fs::path dir = temp_dir("csv");
  const Matrix m{{0.1, 1.0 / 3.0}, {-2e-300, 12345.678901234567}};
  io::save_csv(dir / "m.csv", m, {"x", "y"});
  CHECK(io::csv_looks_like_header(dir / "m.csv"));
  io::CsvOptions opts;
  opts.has_header = true;
  const auto back = io::load_csv(dir / "m.csv", opts);
  CHECK(back.features == m);
  io::save_csv(dir / "n.csv", m);
  CHECK_FALSE(io::csv_looks_like_header(dir / "n.csv"));
  CHECK_THROWS_AS(io::save_csv(dir / "bad.csv", m, {"x"}), cae::ShapeError);
  CHECK(io::format_double(0.1) == "0.10000000000000001");
  CHECK(io::format_double(0.125, 6) == "0.125");
}

TEST_CASE("idx: write/read round trip with labels; header validation") {
  const fs::path dir = temp_dir("idx");
  std::vector<std::uint8_t> pixels(3 * 2 * 2);
  for (std::size_t i = 0; i < pixels.size(); ++i) pixels[i] = static_cast<std::uint8_t>(i * 20);
  io::write_idx_images(dir / "img", 3, 2, 2, pixels);
  io::write_idx_labels(dir / "lab", std::vector<std::uint8_t>{7, 0, 9});
  const auto ds = io::load_idx(dir / "img", dir / "lab");
  CHECK(ds.rows() == 3);
  CHECK(ds.cols() == 4);
  CHECK(ds.features(1, 2) == doctest::Approx(120.0 / 255.0));
  CHECK(*ds.labels == std::vector<int>{7, 0, 9});
  CHECK(ds.feature_names[3] == "px_1_1");

  // Swapped files: magic numbers reject them.
  CHECK_THROWS_AS(io::load_idx(dir / "lab"), cae::FormatError);
  CHECK_THROWS_AS(io::load_idx(dir / "img", dir / "img"), cae::FormatError);
  // Truncated payload.
  const std::string full = read_text(dir / "img");
  write_text(dir / "short", full.substr(0, full.size() - 1));
  CHECK_THROWS_AS(io::load_idx(dir / "short"), cae::FormatError);
  io::write_idx_labels(dir / "lab2", std::vector<std::uint8_t>{1, 2});
  CHECK_THROWS_AS(io::load_idx(dir / "img", dir / "lab2"), cae::FormatError);
  CHECK_THROWS_AS(io::load_idx(dir / "missing"), cae::FormatError);
}

TEST_CASE("split: sizes, disjoint cover, determinism, subsample") {
  io::Dataset ds;
  ds.features = Matrix(100, 2);
  for (std::size_t r = 0; r < 100; ++r) ds.features(r, 0) = static_cast<double>(r);
  ds.labels = std::vector<int>(100, 1);
  io::SplitSpec spec;
  spec.seed = 3;
  const auto s = io::split(ds, spec);
  CHECK(s.train.rows() == 72);
  CHECK(s.val.rows() == 8);
  CHECK(s.test.rows() == 20);
  std::set<std::size_t> all(s.train_rows.begin(), s.train_rows.end());
  all.insert(s.val_rows.begin(), s.val_rows.end());
  all.insert(s.test_rows.begin(), s.test_rows.end());
  CHECK(all.size() == 100);
  CHECK(s.val.features(0, 0) == static_cast<double>(s.val_rows[0]));
  CHECK(s.train.labels->size() == 72);
  CHECK(io::split(ds, spec).train_rows == s.train_rows);
  spec.seed = 4;
  CHECK(io::split(ds, spec).train_rows != s.train_rows);

  spec.subsample = 50;
  const auto sub = io::split(ds, spec);
  CHECK(sub.train.rows() == 45);
  CHECK(sub.val.rows() == 5);
  CHECK(sub.test.rows() == 50);
  spec.subsample = 101;
  CHECK_THROWS_AS(io::split(ds, spec), cae::SizeError);
  spec.subsample = 0;
  spec.train = 0.5;
  CHECK_THROWS_AS(io::split(ds, spec), cae::ParameterError);
  io::Dataset tiny;
  tiny.features = Matrix(5, 1);
  CHECK_THROWS_AS(io::split(tiny, io::SplitSpec{}), cae::SizeError);
}

TEST_CASE("normalisation: minmax clamps, zscore, constant columns, inverse") {
  Matrix train{{0, 10, 5}, {2, 30, 5}, {4, 20, 5}};
  Matrix other{{5, 0, 7}};
  std::vector<Matrix*> others{&other};
  const auto norm = io::normalize_fit_apply(train, others, io::NormKind::minmax);
  CHECK(train == Matrix{{0, 0, 0}, {0.5, 1, 0}, {1, 0.5, 0}});
  CHECK(other == Matrix{{1, 0, 0}});  // clamped to [0, 1]; constant column -> 0
  Matrix back{{0.5, 0.5, 0.0}};
  norm.invert(back);
  CHECK(back == Matrix{{2, 20, 5}});

  Matrix z{{1, 4}, {3, 4}};
  const auto zn = io::fit_normalization(z, io::NormKind::zscore);
  zn.apply(z);
  CHECK(z == Matrix{{-1, 0}, {1, 0}});
  CHECK_THROWS_AS(zn.apply(train), cae::ShapeError);
  CHECK(io::norm_kind_from_name(io::norm_kind_name(io::NormKind::zscore)) == io::NormKind::zscore);
  CHECK_THROWS_AS(io::norm_kind_from_name("robust"), cae::ParameterError);
  Matrix none{{7}};
  io::fit_normalization(none, io::NormKind::none).apply(none);
  CHECK(none(0, 0) == 7);
}

TEST_CASE("model files: byte-identical round trip") {
  const fs::path dir = temp_dir("model");
  const auto model = small_model();
  const std::string text = io::model_to_json(model);
  const auto back = io::model_from_json(text);
  CHECK(io::model_to_json(back) == text);
  CHECK(back.selector.alpha == model.selector.alpha);
  CHECK(back.decoder[0].weights == model.decoder[0].weights);
  CHECK(back.normalization->shift == model.normalization->shift);
  io::save_model(model, dir / "m.json");
  CHECK(read_text(dir / "m.json") == text);
  io::save_model(io::load_model(dir / "m.json"), dir / "m2.json");
  CHECK(read_text(dir / "m2.json") == text);
  CHECK_THROWS_AS(io::load_model(dir / "nope.json"), cae::DataError);
}

TEST_CASE("model files: truncated, wrong version and inconsistent content are rejected") {
  const std::string text = io::model_to_json(small_model());
  CHECK_THROWS_AS(io::model_from_json(text.substr(0, text.size() / 2)), cae::ParseError);
  CHECK_THROWS_AS(io::model_from_json("[1,2]"), cae::FormatError);

  std::string wrong_version = text;
  const auto pos = wrong_version.find("\"version\": 1");
  REQUIRE(pos != std::string::npos);
  wrong_version.replace(pos, 12, "\"version\": 2");
  CHECK_THROWS_AS(io::model_from_json(wrong_version), cae::FormatError);

  std::string wrong_k = text;
  const auto kpos = wrong_k.find("\"k\": 2");
  REQUIRE(kpos != std::string::npos);
  wrong_k.replace(kpos, 6, "\"k\": 3");
  CHECK_THROWS_AS(io::model_from_json(wrong_k), cae::FormatError);

  std::string missing = text;
  const auto mpos = missing.find("\"mode\"");
  missing.replace(mpos, 6, "\"mood\"");
  CHECK_THROWS_AS(io::model_from_json(missing), cae::FormatError);
}

TEST_CASE("atomic writes leave no temp files behind") {
  const fs::path dir = temp_dir("atomic");
  io::write_file_atomic(dir / "a.txt", "one");
  io::write_file_atomic(dir / "a.txt", "two");
  CHECK(read_text(dir / "a.txt") == "two");
  CHECK(std::distance(fs::directory_iterator(dir), fs::directory_iterator()) == 1);
}
