#include <algorithm>
#include <chrono>
#include <sstream>

#include "cae/errors.hpp"
#include "cae/eval.hpp"

namespace cae::eval {

using num::Matrix;

namespace {

std::string canonical_method(const std::string& name) {
  if (name == "cae") return "cae";
  if (name == "pca") return "pca";
  if (name == "variance-filter" || name == "variance") return "variance-filter";
  if (name == "random-selection" || name == "random") return "random-selection";
  throw ParameterError("unknown method '" + name + "' (expected cae, pca, variance-filter or random-selection)");
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

double linear_refit_mse(const io::SplitResult& data, std::span<const std::size_t> indices) {
  const LinearFit fit = fit_least_squares(num::select_columns(data.train.features, indices), data.train.features);
  return reconstruction_error(data.test.features, fit.predict(num::select_columns(data.test.features, indices)));
}

bool can_probe(const io::SplitResult& data) {
  return data.train.labels.has_value() && data.test.labels.has_value() && !data.train.labels->empty();
}

std::optional<double> probe(const CompareOptions& opts, const io::SplitResult& data, const Matrix& train_f,
                            const Matrix& test_f) {
  if (!opts.probe || !can_probe(data)) return std::nullopt;
  return probe_accuracy(train_f, *data.train.labels, test_f, *data.test.labels, opts.probe_options);
}

EvalResult run_selection(const std::string& method, std::vector<std::size_t> indices, const io::SplitResult& data,
                         const CompareOptions& opts) {
  EvalResult r;
  r.method = method;
  r.k = indices.size();
  r.reconstruction_mse = linear_refit_mse(data, indices);
  r.probe_accuracy = probe(opts, data, num::select_columns(data.train.features, indices),
                           num::select_columns(data.test.features, indices));
  r.selected = std::move(indices);
  return r;
}

}  // namespace

std::vector<EvalResult> compare(const std::vector<std::string>& methods, const io::SplitResult& data, std::size_t k,
                                const CompareOptions& options) {
  if (methods.empty()) throw ParameterError("compare: no methods given");
  const std::size_t d = data.train.cols();
  if (k == 0 || k > d) throw ParameterError("compare: k=" + std::to_string(k) + " outside [1, " + std::to_string(d) + "]");
  if (data.test.rows() == 0) throw SizeError("compare: test split is empty");

  const num::Rng root(options.seed);
  std::vector<EvalResult> results;
  for (const auto& raw : methods) {
    const std::string method = canonical_method(raw);
    const auto start = std::chrono::steady_clock::now();
    EvalResult r;
    if (method == "cae") {
      TrainConfig cfg = options.cae;
      cfg.k = k;
      const auto trained = train(data.train.features, data.val.features, cfg);
      r = run_selection(method, trained.report.selected, data, options);
    } else if (method == "pca") {
      PcaOptions pca_opts;
      pca_opts.seed = options.seed;
      const PcaModel pca = pca_fit(data.train.features, k, pca_opts);
      r.method = method;
      r.k = k;
      r.reconstruction_mse = reconstruction_error(data.test.features, pca_reconstruct(pca, data.test.features));
      r.probe_accuracy =
          probe(options, data, pca_transform(pca, data.train.features), pca_transform(pca, data.test.features));
    } else if (method == "variance-filter") {
      r = run_selection(method, variance_filter(data.train.features, k), data, options);
    } else {
      // Mean over independent draws; the reported indices and probe use the first.
      const std::size_t repeats = std::max<std::size_t>(1, options.random_repeats);
      num::Rng rng = root.child(0x5e1ec7);
      double total = 0.0;
      for (std::size_t i = 0; i < repeats; ++i) {
        auto indices = random_selection(d, k, rng);
        if (i == 0) {
          r = run_selection(method, std::move(indices), data, options);
          total += r.reconstruction_mse;
        } else {
          total += linear_refit_mse(data, indices);
        }
      }
      r.reconstruction_mse = total / static_cast<double>(repeats);
    }
    r.runtime_seconds = seconds_since(start);
    results.push_back(std::move(r));
  }
  std::stable_sort(results.begin(), results.end(), [](const EvalResult& a, const EvalResult& b) {
    return a.reconstruction_mse < b.reconstruction_mse;
  });
  return results;
}

std::string results_to_csv(const std::vector<EvalResult>& results) {
  std::ostringstream out;
  out << "method,k,recon_mse,probe_accuracy,runtime_s,indices\n";
  for (const auto& r : results) {
    out << r.method << ',' << r.k << ',' << io::format_double(r.reconstruction_mse) << ',';
    if (r.probe_accuracy) out << io::format_double(*r.probe_accuracy);
    out << ',' << io::format_double(r.runtime_seconds, 6) << ',';
    for (std::size_t i = 0; i < r.selected.size(); ++i) out << (i ? ";" : "") << r.selected[i];
    out << '\n';
  }
  return out.str();
}

}  // namespace cae::eval
