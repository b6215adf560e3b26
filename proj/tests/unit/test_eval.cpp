#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "cae/errors.hpp"
#include "cae/eval.hpp"
#include "support/synthetic.hpp"

using cae::num::Matrix;
using cae::num::Rng;
namespace ev = cae::eval;

namespace {

Matrix random_matrix(std::size_t r, std::size_t c, Rng& rng) {
  Matrix m(r, c);
  for (double& v : m.values()) v = rng.normal();
  return m;
}

// n x d data of exact rank `rank` plus a constant offset.
Matrix low_rank(std::size_t n, std::size_t d, std::size_t rank, Rng& rng) {
  const Matrix a = random_matrix(n, rank, rng);
  const Matrix b = random_matrix(rank, d, rng);
  Matrix x = cae::num::matmul(a, b);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < d; ++c) x(r, c) += 0.1 * static_cast<double>(c);
  return x;
}

cae::io::SplitResult synthetic_split(std::uint64_t seed, bool labels = false) {
  auto ds = cae::testing::make_synthetic(1000, seed);
  if (labels) {
    ds.labels = std::vector<int>(ds.rows());
    for (std::size_t r = 0; r < ds.rows(); ++r) (*ds.labels)[r] = ds.features(r, 0) > 0 ? 1 : 0;
  }
  cae::io::SplitSpec spec;
  spec.seed = seed;
  return cae::io::split(ds, spec);
}

}  // namespace

TEST_CASE("reconstruction error is per-entry MSE") {
  CHECK(ev::reconstruction_error(Matrix{{1, 2}, {3, 4}}, Matrix{{1, 0}, {3, 5}}) == doctest::Approx(5.0 / 4.0));
  CHECK(ev::reconstruction_error(Matrix(0, 3), Matrix(0, 3)) == 0.0);
  CHECK_THROWS_AS(ev::reconstruction_error(Matrix(2, 2), Matrix(2, 3)), cae::ShapeError);
}

TEST_CASE("least squares recovers an exact affine map") {
  Rng rng(1);
  const Matrix s = random_matrix(50, 3, rng);
  const Matrix w = random_matrix(3, 4, rng);
  Matrix y = cae::num::matmul(s, w);
  for (std::size_t r = 0; r < y.rows(); ++r)
    for (std::size_t c = 0; c < 4; ++c) y(r, c) += static_cast<double>(c) - 1.5;
  const auto fit = ev::fit_least_squares(s, y);
  CHECK_FALSE(fit.ridge_fallback);
  REQUIRE(fit.weights.rows() == 4);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t c = 0; c < 4; ++c) CHECK(fit.weights(i, c) == doctest::Approx(w(i, c)).epsilon(1e-9));
  CHECK(fit.weights(3, 0) == doctest::Approx(-1.5));
  CHECK(ev::reconstruction_error(y, fit.predict(s)) < 1e-20);
}

TEST_CASE("least squares matches the independent QR oracle") {
  const auto s = synthetic_split(2);
  for (const std::vector<std::size_t>& subset : {std::vector<std::size_t>{0, 1, 2}, {3, 5, 9}, {1, 4, 8}}) {
    const auto fit = ev::fit_least_squares(cae::num::select_columns(s.train.features, subset), s.train.features);
    const double mine =
        ev::reconstruction_error(s.test.features, fit.predict(cae::num::select_columns(s.test.features, subset)));
    CHECK(mine == doctest::Approx(cae::testing::oracle_subset_mse(s.train.features, s.test.features, subset))
                      .epsilon(1e-6));
  }
}

TEST_CASE("least squares falls back to ridge on duplicate columns") {
  Rng rng(3);
  const Matrix base = random_matrix(30, 2, rng);
  const Matrix s = cae::num::select_columns(base, std::vector<std::size_t>{0, 0, 1});
  const auto fit = ev::fit_least_squares(s, base);
  CHECK(fit.ridge_fallback);
  CHECK(ev::reconstruction_error(base, fit.predict(s)) < 1e-6);
  CHECK_THROWS_AS(ev::fit_least_squares(Matrix(3, 2), Matrix(4, 1)), cae::ShapeError);
}

TEST_CASE("hidden-size candidates") {
  CHECK(ev::hidden_size_candidates(18) == std::vector<std::size_t>{8, 12, 18, 27});
  CHECK(ev::hidden_size_candidates(1) == std::vector<std::size_t>{1, 1, 1, 1});
}

TEST_CASE("decoder refit: linear candidate, tie rule and score table") {
  Rng rng(4);
  const Matrix s_train = random_matrix(80, 2, rng), s_val = random_matrix(20, 2, rng);
  const Matrix map = random_matrix(2, 3, rng);
  const Matrix x_train = cae::num::matmul(s_train, map), x_val = cae::num::matmul(s_val, map);
  const auto lin = ev::refit_decoder(s_train, x_train, s_val, x_val, std::vector<std::size_t>{0});
  CHECK(lin.hidden_size == 0);
  CHECK(lin.val_mse < 1e-6);
  CHECK(ev::reconstruction_error(x_val, lin.predict(s_val)) == doctest::Approx(lin.val_mse));

  ev::RefitOptions opts;
  opts.epochs = 5;
  const auto many = ev::refit_decoder(s_train, x_train, s_val, x_val, std::vector<std::size_t>{3, 0, 3, 2}, opts);
  CHECK(many.scores.size() == 3);
  CHECK(many.scores[0].first == 0);
  CHECK(many.hidden_size == 0);

  // The winner is the argmin of the score table.
  const auto tie = ev::refit_decoder(s_train, x_train, s_val, x_val, std::vector<std::size_t>{4, 2}, opts);
  const auto best = std::min_element(tie.scores.begin(), tie.scores.end(),
                                     [](const auto& a, const auto& b) { return a.second < b.second; });
  CHECK(tie.hidden_size == best->first);
  CHECK_THROWS_AS(ev::refit_decoder(s_train, x_train, s_val, x_val, std::vector<std::size_t>{}),
                  cae::ParameterError);
}

TEST_CASE("pca: orthonormal components, exact-rank recovery, k = d, monotone error") {
  Rng rng(5);
  const Matrix x = low_rank(60, 8, 3, rng);
  const auto model = ev::pca_fit(x, 3);
  const Matrix gram = cae::num::matmul_nt(model.components, model.components);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) CHECK(std::abs(gram(i, j) - (i == j ? 1.0 : 0.0)) < 1e-8);
  CHECK(std::is_sorted(model.eigenvalues.rbegin(), model.eigenvalues.rend()));
  CHECK(ev::reconstruction_error(x, ev::pca_reconstruct(model, x)) < 1e-10);
  CHECK(ev::pca_transform(model, x).cols() == 3);
  CHECK_THROWS_AS(ev::pca_fit(x, 4), cae::RankError);

  const Matrix full = random_matrix(40, 6, rng);
  CHECK(ev::reconstruction_error(full, ev::pca_reconstruct(ev::pca_fit(full, 6), full)) < 1e-10);
  double prev = INFINITY;
  for (std::size_t k = 1; k <= 6; ++k) {
    const double e = ev::reconstruction_error(full, ev::pca_reconstruct(ev::pca_fit(full, k), full));
    CHECK(e <= prev + 1e-12);
    prev = e;
  }
  // Wide data goes through the n x n Gram matrix.
  const Matrix wide = low_rank(10, 40, 4, rng);
  CHECK(ev::reconstruction_error(wide, ev::pca_reconstruct(ev::pca_fit(wide, 4), wide)) < 1e-10);
  CHECK_THROWS_AS(ev::pca_fit(wide, 11), cae::RankError);
}

TEST_CASE("pca eigenvalues agree with an explicit covariance Rayleigh quotient") {
  Rng rng(6);
  const Matrix x = random_matrix(200, 5, rng);
  const auto model = ev::pca_fit(x, 2);
  const auto mean = cae::num::column_means(x);
  for (std::size_t c = 0; c < 2; ++c) {
    double q = 0.0;
    for (std::size_t r = 0; r < x.rows(); ++r) {
      double proj = 0.0;
      for (std::size_t j = 0; j < 5; ++j) proj += (x(r, j) - mean[j]) * model.components(c, j);
      q += proj * proj;
    }
    CHECK(q / static_cast<double>(x.rows()) == doctest::Approx(model.eigenvalues[c]).epsilon(1e-6));
  }
}

TEST_CASE("probe: separable data is learned perfectly; shuffled labels sit at chance") {
  Rng rng(7);
  Matrix x(400, 2);
  std::vector<int> y(400);
  for (std::size_t r = 0; r < 400; ++r) {
    y[r] = static_cast<int>(r % 2);
    x(r, 0) = (y[r] ? 2.0 : -2.0) + 0.3 * rng.normal();
    x(r, 1) = rng.normal();
  }
  std::vector<std::size_t> tr(300), te(100);
  std::iota(tr.begin(), tr.end(), std::size_t{0});
  std::iota(te.begin(), te.end(), std::size_t{300});
  const std::vector<int> ytr(y.begin(), y.begin() + 300), yte(y.begin() + 300, y.end());
  CHECK(ev::probe_accuracy(cae::num::select_rows(x, tr), ytr, cae::num::select_rows(x, te), yte) == 1.0);

  // 10 classes, labels independent of the features: expected accuracy 0.1.
  const std::size_t n_tr = 2000, n_te = 1000;
  const Matrix f_tr = random_matrix(n_tr, 5, rng), f_te = random_matrix(n_te, 5, rng);
  std::vector<int> l_tr(n_tr), l_te(n_te);
  for (int& l : l_tr) l = static_cast<int>(rng.below(10));
  for (int& l : l_te) l = static_cast<int>(rng.below(10));
  const double acc = ev::probe_accuracy(f_tr, l_tr, f_te, l_te);
  const double se = std::sqrt(0.1 * 0.9 / static_cast<double>(n_te));
  CHECK(std::abs(acc - 0.1) < 3 * se);

  CHECK_THROWS_AS(ev::probe_accuracy(f_tr, std::vector<int>(n_tr, 3), f_te, l_te), cae::DegenerateError);
  CHECK_THROWS_AS(ev::probe_accuracy(f_tr, l_te, f_te, l_te), cae::ShapeError);
}

TEST_CASE("variance filter and random selection") {
  const Matrix x{{0, 5, 1, 0}, {0, -5, 2, 3}, {0, 5, 3, -3}};
  CHECK(ev::variance_filter(x, 2) == std::vector<std::size_t>{1, 3});
  CHECK(ev::variance_filter(Matrix(3, 3, 1.0), 2) == std::vector<std::size_t>{0, 1});
  Rng rng(8);
  for (int rep = 0; rep < 20; ++rep) {
    const auto idx = ev::random_selection(10, 4, rng);
    CHECK(idx.size() == 4);
    CHECK(std::set<std::size_t>(idx.begin(), idx.end()).size() == 4);
    for (auto i : idx) CHECK(i < 10);
  }
  CHECK_THROWS_AS(ev::random_selection(3, 4, rng), cae::ParameterError);
}

TEST_CASE("compare: ordering, PCA bound, aliases and csv") {
  const auto s = synthetic_split(9, true);
  ev::CompareOptions opts;
  opts.cae.schedule.total_epochs = 30;
  opts.cae.batch_size = 64;
  opts.probe_options.epochs = 20;
  const auto results = ev::compare({"cae", "pca", "variance", "random"}, s, 3, opts);
  REQUIRE(results.size() == 4);
  for (std::size_t i = 1; i < results.size(); ++i)
    CHECK(results[i - 1].reconstruction_mse <= results[i].reconstruction_mse);
  const auto pca = std::find_if(results.begin(), results.end(), [](const auto& r) { return r.method == "pca"; });
  REQUIRE(pca != results.end());
  for (const auto& r : results) {
    CHECK(pca->reconstruction_mse <= r.reconstruction_mse);
    CHECK(r.probe_accuracy.has_value());
    if (r.method != "pca") CHECK(r.selected.size() == 3);
  }
  const std::string csv = ev::results_to_csv(results);
  CHECK(csv.rfind("method,k,recon_mse,probe_accuracy,runtime_s,indices\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);
  CHECK_THROWS_AS(ev::compare({"lasso"}, s, 3, opts), cae::ParameterError);
  CHECK_THROWS_AS(ev::compare({"pca"}, s, 11, opts), cae::ParameterError);
}
