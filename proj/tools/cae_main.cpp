// cae: command-line front end for training concrete autoencoders, selecting
// and imputing features with a saved model, and running the evaluation,
// annealing-ablation and feature-group reports.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cae/dataio.hpp"
#include "cae/errors.hpp"
#include "cae/eval.hpp"
#include "cae/model.hpp"
#include "cae/model_io.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitDiverged = 2;

// ---------------------------------------------------------------------------
// Option bundles shared by several subcommands.

struct DataArgs {
  std::string csv;
  std::string header = "auto";
  std::string label_column;
  bool drop_missing = false;
  std::string idx_images;
  std::string idx_labels;
  std::string split = "0.72,0.08,0.20";
  std::size_t subsample = 0;
  std::string normalize = "minmax";
};

struct TrainArgs {
  std::size_t k = 0;
  std::uint64_t seed = 0;
  std::string decoder = "auto";
  std::string mode = "unsup";
  std::size_t epochs = cae::sel::AnnealSchedule{}.total_epochs;
  std::size_t max_epochs = 0;
  double t0 = cae::sel::AnnealSchedule{}.t0;
  double tb = cae::sel::AnnealSchedule{}.tb;
  double stop_threshold = 0.99;
  double learning_rate = 1e-3;
  std::size_t batch_size = 256;
  double dropout = 0.0;
  std::string val_metric = "decoder";
};

struct OutArgs {
  std::string dir;
  bool force = false;
};

void add_data_options(CLI::App& app, DataArgs& a) {
  app.add_option("--data", a.csv, "CSV data file (rows = samples)");
  app.add_option("--header", a.header, "Whether the CSV has a header row")
      ->check(CLI::IsMember({"auto", "yes", "no"}))
      ->capture_default_str();
  app.add_option("--labels-col", a.label_column, "CSV column holding integer class labels (name, or index without header)");
  app.add_flag("--drop-missing", a.drop_missing, "Drop CSV rows with empty/NA/NaN cells instead of failing");
  app.add_option("--idx-images", a.idx_images, "IDX image file (MNIST format)");
  app.add_option("--idx-labels", a.idx_labels, "IDX label file (MNIST format)");
  app.add_option("--split", a.split, "train,val,test fractions")->capture_default_str();
  app.add_option("--subsample", a.subsample,
                 "Use only N rows for train+val (divided train:val), the rest as test; 0 = off")
      ->capture_default_str();
  app.add_option("--normalize", a.normalize, "Per-feature normalisation fitted on the training split")
      ->check(CLI::IsMember({"minmax", "zscore", "none"}))
      ->capture_default_str();
}

void add_train_options(CLI::App& app, TrainArgs& a, bool with_k = true) {
  if (with_k) app.add_option("--k", a.k, "Number of features to select")->required()->check(CLI::PositiveNumber);
  app.add_option("--seed", a.seed, "Seed for every random stream")->capture_default_str();
  app.add_option("--decoder", a.decoder,
                 "auto | linear | hidden:<n>[,<n>...] (auto: linear unsupervised, hidden:3k/2 supervised)")
      ->capture_default_str();
  app.add_option("--mode", a.mode, "unsup (reconstruction) or sup (classification)")
      ->check(CLI::IsMember({"unsup", "sup", "unsupervised", "supervised"}))
      ->capture_default_str();
  app.add_option("--epochs", a.epochs, "Annealing length B in epochs")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--max-epochs", a.max_epochs, "Hard epoch cap; 0 = 3B")->capture_default_str();
  app.add_option("--t0", a.t0, "Initial temperature")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--tb", a.tb, "Final temperature")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--stop-threshold", a.stop_threshold, "Stop when the epoch's mean max-probability exceeds this")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  app.add_option("--lr", a.learning_rate, "Adam learning rate")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--batch-size", a.batch_size, "Minibatch size")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--dropout", a.dropout, "Dropout on decoder hidden layers")->check(CLI::Range(0.0, 0.99))->capture_default_str();
  app.add_option("--val-metric", a.val_metric,
                 "Per-epoch validation error: the model's decoder, or a least-squares refit on the selected columns")
      ->check(CLI::IsMember({"decoder", "refit"}))
      ->capture_default_str();
}

void add_out_options(CLI::App& app, OutArgs& a) {
  app.add_option("--out", a.dir, "Output directory")->required();
  app.add_flag("--force", a.force, "Allow writing into an existing non-empty output directory");
}

void add_config_option(CLI::App& app) {
  // Consumed before parsing (see inject_config); registered so it shows in --help.
  app.add_option("--config", "Flat `key = value` file; keys are long option names, flags override it");
}

// ---------------------------------------------------------------------------

std::vector<double> parse_fractions(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(part, &used));
      if (used != part.size()) throw std::invalid_argument(part);
    } catch (const std::exception&) {
      throw cae::ParameterError("--split expects three comma-separated numbers, got '" + text + "'");
    }
  }
  if (out.size() != 3) throw cae::ParameterError("--split expects three comma-separated numbers, got '" + text + "'");
  return out;
}

std::optional<std::vector<std::size_t>> parse_decoder(const std::string& text) {
  if (text == "auto") return std::nullopt;
  if (text == "linear") return std::vector<std::size_t>{};
  const std::string prefix = "hidden:";
  if (text.rfind(prefix, 0) != 0) {
    throw cae::ParameterError("--decoder expects auto, linear or hidden:<n>[,<n>...], got '" + text + "'");
  }
  std::vector<std::size_t> sizes;
  std::stringstream ss(text.substr(prefix.size()));
  std::string part;
  while (std::getline(ss, part, ',')) {
    try {
      std::size_t used = 0;
      const long long v = std::stoll(part, &used);
      if (used != part.size() || v <= 0) throw std::invalid_argument(part);
      sizes.push_back(static_cast<std::size_t>(v));
    } catch (const std::exception&) {
      throw cae::ParameterError("invalid hidden layer size '" + part + "' in --decoder");
    }
  }
  if (sizes.empty()) throw cae::ParameterError("--decoder hidden: needs at least one size");
  return sizes;
}

cae::TrainConfig make_config(const TrainArgs& a) {
  cae::TrainConfig cfg;
  cfg.k = a.k;
  cfg.seed = a.seed;
  cfg.mode = cae::mode_from_name(a.mode);
  cfg.hidden_sizes = parse_decoder(a.decoder);
  cfg.schedule.t0 = a.t0;
  cfg.schedule.tb = a.tb;
  cfg.schedule.total_epochs = a.epochs;
  cfg.max_epochs = a.max_epochs;
  cfg.stop_threshold = a.stop_threshold;
  cfg.learning_rate = a.learning_rate;
  cfg.batch_size = a.batch_size;
  cfg.dropout = a.dropout;
  cfg.refit_validation = a.val_metric == "refit";
  return cfg;
}

cae::io::Dataset load_dataset(const DataArgs& a) {
  const bool have_csv = !a.csv.empty();
  const bool have_idx = !a.idx_images.empty();
  if (have_csv == have_idx) throw cae::ParameterError("give exactly one of --data or --idx-images");
  if (have_idx) {
    std::optional<fs::path> labels;
    if (!a.idx_labels.empty()) labels = a.idx_labels;
    return cae::io::load_idx(a.idx_images, labels);
  }
  if (!a.idx_labels.empty()) throw cae::ParameterError("--idx-labels needs --idx-images");
  cae::io::CsvOptions opts;
  opts.has_header = a.header == "yes" || (a.header == "auto" && cae::io::csv_looks_like_header(a.csv));
  if (!a.label_column.empty()) opts.label_column = a.label_column;
  opts.drop_missing = a.drop_missing;
  return cae::io::load_csv(a.csv, opts);
}

struct PreparedData {
  cae::io::SplitResult split;
  cae::io::Normalization norm;
  std::vector<std::string> feature_names;
};

PreparedData prepare(const DataArgs& a, std::uint64_t seed) {
  const cae::io::Dataset data = load_dataset(a);
  const auto fractions = parse_fractions(a.split);
  cae::io::SplitSpec spec;
  spec.train = fractions[0];
  spec.val = fractions[1];
  spec.test = fractions[2];
  spec.seed = seed;
  spec.subsample = a.subsample;
  PreparedData out;
  out.split = cae::io::split(data, spec);
  std::vector<cae::num::Matrix*> others{&out.split.val.features, &out.split.test.features};
  out.norm = cae::io::normalize_fit_apply(out.split.train.features, others, cae::io::norm_kind_from_name(a.normalize));
  out.feature_names = data.feature_names;
  std::cerr << "data: " << data.rows() << " rows x " << data.cols() << " features; split " << out.split.train.rows()
            << '/' << out.split.val.rows() << '/' << out.split.test.rows() << '\n';
  return out;
}

void prepare_out_dir(const OutArgs& a) {
  const fs::path dir(a.dir);
  if (fs::exists(dir)) {
    if (!fs::is_directory(dir)) throw cae::ParameterError("--out " + a.dir + " exists and is not a directory");
    if (!fs::is_empty(dir) && !a.force) {
      throw cae::ParameterError("output directory " + a.dir + " is not empty (pass --force to write into it)");
    }
  }
  fs::create_directories(dir);
}

const std::vector<int>& require_labels(const cae::io::Dataset& d, const char* split_name) {
  if (!d.labels) {
    throw cae::ParameterError(std::string("supervised mode needs class labels (--labels-col or --idx-labels); the ") +
                              split_name + " split has none");
  }
  return *d.labels;
}

void log_epoch(const cae::EpochRecord& e) {
  if (e.epoch == 1 || e.epoch % 10 == 0) {
    std::cerr << "epoch " << e.epoch << "  T=" << cae::io::format_double(e.temperature, 4)
              << "  mean_max=" << cae::io::format_double(e.mean_max_prob, 4)
              << "  train=" << cae::io::format_double(e.train_loss, 6) << "  val=" << cae::io::format_double(e.val_loss, 6)
              << '\n';
  }
}

std::string split_rows_csv(const cae::io::SplitResult& s) {
  std::vector<std::pair<std::size_t, const char*>> rows;
  for (std::size_t r : s.train_rows) rows.emplace_back(r, "train");
  for (std::size_t r : s.val_rows) rows.emplace_back(r, "val");
  for (std::size_t r : s.test_rows) rows.emplace_back(r, "test");
  std::sort(rows.begin(), rows.end());
  std::ostringstream out;
  out << "row,part\n";
  for (const auto& [r, part] : rows) out << r << ',' << part << '\n';
  return out.str();
}

// ---------------------------------------------------------------------------
// Subcommands.

int cmd_train(const DataArgs& data_args, const TrainArgs& train_args, const OutArgs& out_args) {
  const cae::TrainConfig cfg = make_config(train_args);
  prepare_out_dir(out_args);
  PreparedData data = prepare(data_args, train_args.seed);
  const auto& sp = data.split;

  cae::TrainResult result =
      cfg.mode == cae::Mode::supervised
          ? cae::train_supervised(sp.train.features, require_labels(sp.train, "training"), sp.val.features,
                                  sp.val.labels ? std::span<const int>(*sp.val.labels) : std::span<const int>{}, cfg,
                                  log_epoch)
          : cae::train(sp.train.features, sp.val.features, cfg, log_epoch);
  result.model.feature_names = data.feature_names;
  result.model.normalization = data.norm;

  const fs::path dir(out_args.dir);
  cae::io::save_model(result.model, dir / "model.json");
  cae::io::write_file_atomic(dir / "train_report.csv", result.report.to_csv());
  std::ostringstream sel;
  sel << "node,feature_index,feature_name\n";
  for (std::size_t i = 0; i < result.report.selected.size(); ++i) {
    const std::size_t f = result.report.selected[i];
    sel << i << ',' << f << ',' << data.feature_names[f] << '\n';
  }
  cae::io::write_file_atomic(dir / "selected_features.csv", sel.str());
  cae::io::write_file_atomic(dir / "split.csv", split_rows_csv(sp));

  const auto& last = result.report.epochs.back();
  std::cout << "epochs: " << result.report.epochs.size() << " ("
            << (result.report.stop_reason == cae::StopReason::threshold_reached ? "mean max-probability threshold reached"
                                                                                : "epoch limit reached")
            << ")\nfinal validation loss: " << cae::io::format_double(last.val_loss, 6) << '\n';
  if (!result.report.duplicates.empty()) {
    std::cout << "warning: " << result.report.duplicates.size() << " feature(s) chosen by more than one node\n";
  }
  std::cout << "wrote " << (dir / "model.json").string() << ", train_report.csv, selected_features.csv, split.csv\n";
  return kExitOk;
}

cae::num::Matrix read_matrix_csv(const std::string& path, const std::string& header) {
  cae::io::CsvOptions opts;
  opts.has_header = header == "yes" || (header == "auto" && cae::io::csv_looks_like_header(path));
  return cae::io::load_csv(path, opts).features;
}

int cmd_select(const std::string& model_path, const std::string& data_path, const std::string& header,
               const std::string& out_path) {
  const cae::CaeModel model = cae::io::load_model(model_path);
  cae::num::Matrix x = read_matrix_csv(data_path, header);
  if (x.cols() != model.d) {
    throw cae::ShapeError("model expects " + std::to_string(model.d) + " columns, " + data_path + " has " +
                          std::to_string(x.cols()));
  }
  const auto indices = cae::sel::argmax_indices(model.selector);
  std::vector<std::string> names;
  for (std::size_t f : indices) names.push_back(model.feature_names.empty() ? "f" + std::to_string(f) : model.feature_names[f]);
  cae::io::save_csv(out_path, cae::num::select_columns(x, indices), names);
  std::cout << "wrote " << x.rows() << " x " << indices.size() << " selected columns to " << out_path << '\n';
  return kExitOk;
}

// Applies the model's stored normalisation to columns that correspond to the
// given feature indices.
void normalize_columns(const cae::CaeModel& model, std::span<const std::size_t> features, cae::num::Matrix& x,
                       bool invert) {
  if (!model.normalization || model.normalization->kind == cae::io::NormKind::none) return;
  cae::io::Normalization sub;
  sub.kind = model.normalization->kind;
  for (std::size_t f : features) {
    sub.shift.push_back(model.normalization->shift[f]);
    sub.scale.push_back(model.normalization->scale[f]);
  }
  if (invert) {
    sub.invert(x);
  } else {
    sub.apply(x);
  }
}

int cmd_impute(const std::string& model_path, const std::string& data_path, const std::string& header,
               const std::string& out_path) {
  const cae::CaeModel model = cae::io::load_model(model_path);
  if (model.mode != cae::Mode::unsupervised) throw cae::ModeError("impute needs an unsupervised (reconstruction) model");
  cae::num::Matrix xs = read_matrix_csv(data_path, header);
  if (xs.cols() != model.k) {
    throw cae::ShapeError("model selects " + std::to_string(model.k) + " features, " + data_path + " has " +
                          std::to_string(xs.cols()) + " columns");
  }
  const auto indices = cae::sel::argmax_indices(model.selector);
  normalize_columns(model, indices, xs, false);
  cae::num::Matrix x_hat = cae::impute(model, xs);
  std::vector<std::size_t> all(model.d);
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  normalize_columns(model, all, x_hat, true);
  cae::io::save_csv(out_path, x_hat, model.feature_names);
  std::cout << "wrote " << x_hat.rows() << " x " << x_hat.cols() << " reconstruction to " << out_path << '\n';
  return kExitOk;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    if (!part.empty()) out.push_back(part);
  }
  return out;
}

int cmd_eval(const DataArgs& data_args, const TrainArgs& train_args, const OutArgs& out_args, const std::string& methods,
             std::size_t random_repeats, bool probe) {
  cae::eval::CompareOptions opts;
  opts.cae = make_config(train_args);
  if (opts.cae.mode != cae::Mode::unsupervised) throw cae::ParameterError("eval compares reconstruction; use --mode unsup");
  opts.seed = train_args.seed;
  opts.random_repeats = random_repeats;
  opts.probe = probe;
  opts.probe_options.seed = train_args.seed;
  prepare_out_dir(out_args);
  const PreparedData data = prepare(data_args, train_args.seed);
  const auto results = cae::eval::compare(split_list(methods), data.split, train_args.k, opts);
  const std::string csv = cae::eval::results_to_csv(results);
  cae::io::write_file_atomic(fs::path(out_args.dir) / "eval_results.csv", csv);
  for (const auto& r : results) {
    std::cout << r.method << "  k=" << r.k << "  recon_mse=" << cae::io::format_double(r.reconstruction_mse, 6);
    if (r.probe_accuracy) std::cout << "  probe_accuracy=" << cae::io::format_double(*r.probe_accuracy, 4);
    std::cout << "  (" << cae::io::format_double(r.runtime_seconds, 3) << " s)\n";
  }
  return kExitOk;
}

int cmd_ablate(const DataArgs& data_args, const TrainArgs& train_args, const OutArgs& out_args) {
  const cae::TrainConfig cfg = make_config(train_args);
  if (cfg.mode != cae::Mode::unsupervised) throw cae::ParameterError("ablate runs reconstruction training; use --mode unsup");
  prepare_out_dir(out_args);
  const PreparedData data = prepare(data_args, train_args.seed);
  const auto runs = cae::schedule_ablation(data.split.train.features, data.split.val.features, cfg);
  for (const auto& run : runs) {
    const std::string name = "report_" + std::string(cae::sel::schedule_name(run.kind)) + ".csv";
    cae::io::write_file_atomic(fs::path(out_args.dir) / name, run.result.report.to_csv());
    const auto& last = run.result.report.epochs.back();
    std::cout << cae::sel::schedule_name(run.kind) << ": mean_max=" << cae::io::format_double(last.mean_max_prob, 4)
              << "  val=" << cae::io::format_double(last.val_loss, 6) << "  -> " << name << '\n';
  }
  return kExitOk;
}

int cmd_groups(const std::string& model_path, std::size_t top, const OutArgs& out_args) {
  const cae::CaeModel model = cae::io::load_model(model_path);
  if (top == 0 || top > model.d) throw cae::ParameterError("--top must lie in [1, d=" + std::to_string(model.d) + "]");
  prepare_out_dir(out_args);
  const auto groups = cae::sel::feature_groups(model.selector, top);
  std::ostringstream out;
  out << "node,rank,feature_index,alpha\n";
  for (std::size_t node = 0; node < groups.size(); ++node) {
    for (std::size_t rank = 0; rank < groups[node].size(); ++rank) {
      const std::size_t f = groups[node][rank];
      out << node << ',' << rank << ',' << f << ',' << cae::io::format_double(model.selector.alpha(node, f)) << '\n';
    }
  }
  cae::io::write_file_atomic(fs::path(out_args.dir) / "groups.csv", out.str());
  std::cout << "wrote " << groups.size() * top << " rows to " << (fs::path(out_args.dir) / "groups.csv").string() << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------
// Config files: every `key = value` line becomes `--key=value`, inserted right
// after the subcommand name so that later command-line flags win.

std::vector<std::string> read_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw cae::ParameterError("cannot open config file " + path.string());
  std::vector<std::string> args;
  std::string line;
  std::size_t line_no = 0;
  const auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw cae::ParseError(path.string() + ":" + std::to_string(line_no) + ": expected `key = value`");
    }
    std::string key = trim(t.substr(0, eq));
    std::string value = trim(t.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
    std::replace(key.begin(), key.end(), '_', '-');
    if (key.empty() || key == "config") {
      throw cae::ParseError(path.string() + ":" + std::to_string(line_no) + ": invalid key");
    }
    args.push_back("--" + key + "=" + value);
  }
  return args;
}

std::vector<std::string> inject_config(std::vector<std::string> args) {
  std::optional<std::string> config;
  for (std::size_t i = 1; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      config = args[i + 1];
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i), args.begin() + static_cast<std::ptrdiff_t>(i + 2));
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      config = args[i].substr(9);
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
      break;
    }
  }
  if (!config || args.size() < 2) return args;
  const auto extra = read_config(*config);
  args.insert(args.begin() + 2, extra.begin(), extra.end());
  return args;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Concrete autoencoder: differentiable selection of k input features"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.set_version_flag("--version", "cae 1.0");

  DataArgs data_args;
  TrainArgs train_args;
  OutArgs out_args;

  auto* train = app.add_subcommand("train", "Train a concrete autoencoder and write model, report and selection");
  add_data_options(*train, data_args);
  add_train_options(*train, train_args);
  add_out_options(*train, out_args);
  add_config_option(*train);

  std::string model_path, input_path, output_path, header = "auto";
  auto* select = app.add_subcommand("select", "Write the k selected columns of a data file");
  select->add_option("--model", model_path, "model.json from train")->required();
  select->add_option("--data", input_path, "CSV with the model's d columns")->required();
  select->add_option("--header", header, "Whether the CSV has a header row")
      ->check(CLI::IsMember({"auto", "yes", "no"}))
      ->capture_default_str();
  select->add_option("--output", output_path, "Output CSV")->capture_default_str()->default_str("selected.csv");
  add_config_option(*select);

  auto* impute = app.add_subcommand("impute", "Reconstruct all d features from a k-column CSV");
  impute->add_option("--model", model_path, "model.json from train")->required();
  impute->add_option("--data", input_path, "CSV with the k selected columns, in selection order")->required();
  impute->add_option("--header", header, "Whether the CSV has a header row")
      ->check(CLI::IsMember({"auto", "yes", "no"}))
      ->capture_default_str();
  impute->add_option("--output", output_path, "Output CSV")->default_str("imputed.csv");
  add_config_option(*impute);

  std::string methods = "cae,pca,variance-filter,random-selection";
  std::size_t random_repeats = 10;
  bool no_probe = false;
  auto* eval = app.add_subcommand("eval", "Compare feature selection methods by linear reconstruction error");
  add_data_options(*eval, data_args);
  add_train_options(*eval, train_args);
  add_out_options(*eval, out_args);
  eval->add_option("--methods", methods, "Comma list from cae, pca, variance-filter (variance), random-selection (random)")
      ->capture_default_str();
  eval->add_option("--random-repeats", random_repeats, "Draws averaged for random-selection")->capture_default_str();
  eval->add_flag("--no-probe", no_probe, "Skip the linear-probe accuracy even when labels are present");
  add_config_option(*eval);

  auto* ablate = app.add_subcommand("ablate", "Train under four annealing schedules for exactly B epochs each");
  add_data_options(*ablate, data_args);
  add_train_options(*ablate, train_args);
  add_out_options(*ablate, out_args);
  add_config_option(*ablate);

  std::size_t top = 3;
  auto* groups = app.add_subcommand("groups", "Per-node top-t features by selector weight");
  groups->add_option("--model", model_path, "model.json from train")->required();
  groups->add_option("--top", top, "Features listed per node")->capture_default_str();
  add_out_options(*groups, out_args);
  add_config_option(*groups);

  try {
    std::vector<std::string> args(argv, argv + argc);
    args = inject_config(std::move(args));
    std::vector<std::string> reversed(args.rbegin(), args.rend() - 1);
    // The ablation judges schedules by a least-squares refit unless told otherwise.
    if (args.size() > 1 && args[1] == "ablate") train_args.val_metric = "refit";
    app.parse(std::move(reversed));
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitError;
  } catch (const cae::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }

  try {
    if (*train) return cmd_train(data_args, train_args, out_args);
    if (*select) return cmd_select(model_path, input_path, header, output_path);
    if (*impute) return cmd_impute(model_path, input_path, header, output_path);
    if (*eval) return cmd_eval(data_args, train_args, out_args, methods, random_repeats, !no_probe);
    if (*ablate) return cmd_ablate(data_args, train_args, out_args);
    if (*groups) return cmd_groups(model_path, top, out_args);
  } catch (const cae::DivergenceError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitDiverged;
  } catch (const cae::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}
