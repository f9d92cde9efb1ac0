#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include <divolt/bootstrap.hpp>
#include <divolt/mathutil.hpp>
#include <divolt/rng.hpp>
#include <divolt/teststat.hpp>

using namespace divolt;

namespace {

std::vector<double> random_vec(std::size_t n, std::uint64_t stream, double scale = 1.0) {
  Rng r(0xb007ull, stream);
  std::vector<double> out(n);
  for (auto& v : out) v = scale * r.next_normal();
  return out;
}

std::vector<double> random_products(std::size_t n, std::uint64_t stream) {
  Rng r(0xb008ull, stream);
  std::vector<double> out(n);
  for (auto& v : out) {
    const double z = r.next_normal();
    v = z * z;
  }
  return out;
}

}  // namespace

TEST_CASE("external kind parsing round-trips") {
  CHECK(external_kind_from_string("gaussian") == ExternalKind::gaussian);
  CHECK(external_kind_from_string("mammen") == ExternalKind::mammen);
  CHECK(std::string(to_string(ExternalKind::gaussian)) == "gaussian");
  CHECK(std::string(to_string(ExternalKind::mammen)) == "mammen");
  CHECK_THROWS_AS(external_kind_from_string("cauchy"), std::invalid_argument);
}

TEST_CASE("external draws have mean 0 and variance 1/2") {
  CHECK(external_mean(ExternalKind::gaussian) == 0.0);
  CHECK(external_mean(ExternalKind::mammen) == 0.0);
  CHECK(external_variance(ExternalKind::gaussian) == 0.5);
  CHECK(external_second_moment(ExternalKind::mammen) == 0.5);

  const double lo = (1.0 - std::sqrt(5.0)) / (2.0 * std::sqrt(2.0));
  const double hi = (1.0 + std::sqrt(5.0)) / (2.0 * std::sqrt(2.0));
  const double p_lo = (std::sqrt(5.0) + 1.0) / (2.0 * std::sqrt(5.0));
  // Exact two-point checks: p*lo + (1-p)*hi = 0, p*lo^2 + (1-p)*hi^2 = 1/2.
  CHECK(p_lo * lo + (1.0 - p_lo) * hi == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(p_lo * lo * lo + (1.0 - p_lo) * hi * hi ==
        doctest::Approx(0.5).epsilon(1e-14));

  for (ExternalKind kind : {ExternalKind::gaussian, ExternalKind::mammen}) {
    Rng rng(0xe71ull, kind == ExternalKind::gaussian ? 1u : 2u);
    double s1 = 0.0, s2 = 0.0;
    int n_lo = 0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
      const double u = external_draw(rng, kind);
      if (kind == ExternalKind::mammen) {
        const bool is_lo = std::fabs(u - lo) < 1e-12;
        const bool is_hi = std::fabs(u - hi) < 1e-12;
        REQUIRE((is_lo || is_hi));
        n_lo += is_lo ? 1 : 0;
      }
      s1 += u;
      s2 += u * u;
    }
    CHECK(std::fabs(s1 / n) < 0.005);
    CHECK(std::fabs(s2 / n - 0.5) < 0.005);
    if (kind == ExternalKind::mammen) {
      CHECK(std::fabs(static_cast<double>(n_lo) / n - p_lo) < 0.005);
    }
  }
}

TEST_CASE("block means slide correctly") {
  const std::vector<double> y = {1.0, 2.0, 3.0, 4.0, 5.0};
  const auto m2 = block_means(y, 2);
  REQUIRE(m2.size() == 4);
  CHECK(m2[0] == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(m2[1] == doctest::Approx(2.5).epsilon(1e-15));
  CHECK(m2[2] == doctest::Approx(3.5).epsilon(1e-15));
  CHECK(m2[3] == doctest::Approx(4.5).epsilon(1e-15));
  const auto m5 = block_means(y, 5);
  REQUIRE(m5.size() == 1);
  CHECK(m5[0] == doctest::Approx(3.0).epsilon(1e-15));
  CHECK_THROWS_AS(block_means(y, 0), std::invalid_argument);
  CHECK_THROWS_AS(block_means(y, 6), std::invalid_argument);
}

TEST_CASE("block differences match the brute-force definition") {
  const auto y = random_vec(40, 21);
  for (int b : {2, 5, 9}) {
    const double scale = 0.37;
    const auto d = block_diffs(y, b, scale);
    const int J = 40 - 2 * b + 1;
    REQUIRE(static_cast<int>(d.size()) == J);
    for (int j = 0; j < J; ++j) {
      double hi = 0.0, lo_s = 0.0;
      for (int i = 0; i < b; ++i) {
        lo_s += y[static_cast<std::size_t>(j + i)];
        hi += y[static_cast<std::size_t>(j + b + i)];
      }
      CHECK(d[static_cast<std::size_t>(j)] ==
            doctest::Approx(scale * (hi - lo_s)).epsilon(1e-12));
    }
  }
  CHECK_THROWS_AS(block_diffs(y, 21, 1.0), std::invalid_argument);
}

TEST_CASE("covariance estimate has the documented closed form on one pair") {
  // J = 1, b = 1: coverage 1/2, factor 0.5 * sqrt(16) / 2 = 1.
  const std::vector<double> d22 = {2.0};
  const std::vector<double> d11 = {3.0};
  const auto s = sigma_check(d22, d11, 16, 1);
  CHECK(s.a11 == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(s.a12 == doctest::Approx(6.0).epsilon(1e-15));
  CHECK(s.a22 == doctest::Approx(9.0).epsilon(1e-15));
  CHECK_THROWS_AS(sigma_check({}, {}, 16, 1), std::invalid_argument);
  CHECK_THROWS_AS(sigma_check(d22, {1.0, 2.0}, 16, 1), std::invalid_argument);
}

TEST_CASE("covariance estimate is symmetric positive semidefinite") {
  for (int rep = 0; rep < 50; ++rep) {
    const int b = 2 + rep % 5;
    const auto d22 = random_vec(30, 100 + static_cast<std::uint64_t>(rep));
    const auto d11 = random_vec(30, 200 + static_cast<std::uint64_t>(rep));
    const auto s = sigma_check(d22, d11, 400, b);
    CHECK(s.a11 >= 0.0);
    CHECK(s.a22 >= 0.0);
    const double det = s.a11 * s.a22 - s.a12 * s.a12;
    CHECK(det >= -1e-12 * (s.a11 * s.a22 + 1.0));
    // Swapping the component order transposes the matrix.
    const auto t = sigma_check(d11, d22, 400, b);
    CHECK(t.a11 == s.a22);
    CHECK(t.a22 == s.a11);
    CHECK(t.a12 == s.a12);
  }
}

TEST_CASE("block length selection matches a brute-force reimplementation") {
  const int N = 600, n = 900, k_n = 5;
  const auto y22 = random_products(static_cast<std::size_t>(N), 31);
  const auto y11 = random_products(static_cast<std::size_t>(N), 32);
  const double scale22 = bv_normalizer(n, N, 2, 2);
  const double scale11 = bv_normalizer(n, N, 1, 1);
  double bv11 = 0.0;
  for (double v : y11) bv11 += v;
  bv11 *= scale11;

  BlockDiagnostics diag;
  const int chosen =
      select_block_size(y22, y11, n, k_n, scale22, scale11, bv11, &diag);
  REQUIRE(!diag.degenerate);
  REQUIRE(diag.candidates.size() == 31);

  // Reproduce the candidate grid and V values independently.
  const double nd = std::pow(static_cast<double>(n), 2.0 / 3.0);
  int bmin = static_cast<int>(std::floor(2.0 * nd));
  if (bmin < 2 * k_n) bmin = 2 * k_n;
  const int bmax = static_cast<int>(std::floor(std::min(3.0 * nd, N / 2.0)));
  REQUIRE(bmin < bmax);
  std::vector<double> v(31);
  for (int i = 0; i < 31; ++i) {
    const int cand = static_cast<int>(std::lround(bmin + i * (bmax - bmin) / 30.0));
    CHECK(diag.candidates[static_cast<std::size_t>(i)] == cand);
    const auto d22 = block_diffs(y22, cand, scale22);
    const auto d11 = block_diffs(y11, cand, scale11);
    v[static_cast<std::size_t>(i)] =
        v_check_form(sigma_check(d22, d11, n, cand), bv11, 2, 2, 1, 1);
    CHECK(v[static_cast<std::size_t>(i)] ==
          doctest::Approx(diag.v_candidates[static_cast<std::size_t>(i)]).epsilon(1e-12));
  }

  // Minimum-variance window of half-width 2, first index winning ties.
  int best = 0;
  double best_var = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 31; ++i) {
    const int lo = std::max(0, i - 2), hi = std::min(30, i + 2);
    double mean = 0.0;
    for (int j = lo; j <= hi; ++j) mean += v[static_cast<std::size_t>(j)];
    mean /= hi - lo + 1;
    double var = 0.0;
    for (int j = lo; j <= hi; ++j) {
      const double e = v[static_cast<std::size_t>(j)] - mean;
      var += e * e;
    }
    var /= hi - lo + 1;
    if (var < best_var) {
      best_var = var;
      best = i;
    }
  }
  CHECK(diag.chosen_index == best);
  CHECK(chosen == diag.candidates[static_cast<std::size_t>(best)]);
}

TEST_CASE("block length selection falls back for short series") {
  const auto y22 = random_products(20, 41);
  const auto y11 = random_products(20, 42);
  BlockDiagnostics diag;
  const int b = select_block_size(y22, y11, 16, 2, 1.0, 1.0, 1.0, &diag);
  CHECK(diag.degenerate);
  REQUIRE(diag.candidates.size() == 1);
  CHECK(diag.candidates[0] == b);
  CHECK(b == 10);  // clamped to half the series length
}

TEST_CASE("percentile rank uses the ceil((1-alpha)(B+1)) convention") {
  CHECK(percentile_rank(199, 0.05) == 190);
  CHECK(percentile_rank(999, 0.05) == 950);
  CHECK(percentile_rank(19, 0.05) == 19);
  CHECK(percentile_rank(1, 0.5) == 1);
  CHECK_THROWS_AS(percentile_rank(0, 0.05), std::invalid_argument);
  CHECK_THROWS_AS(percentile_rank(199, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(percentile_rank(199, 1.0), std::invalid_argument);
}

TEST_CASE("resampled covariance matrix has the documented closed form") {
  // J = 1, b = 1, n = 16: coverage 1/2, factor 0.5 * 4 / 1 * (0.5/0.5) = 2.
  const std::vector<double> d22 = {2.0};
  const std::vector<double> d11 = {3.0};
  const std::vector<double> u = {0.5};
  const auto s = sigma_star(d22, d11, u, 16, 1, ExternalKind::mammen);
  CHECK(s.a11 == doctest::Approx(2.0 * 0.25 * 4.0).epsilon(1e-15));
  CHECK(s.a12 == doctest::Approx(2.0 * 0.25 * 6.0).epsilon(1e-15));
  CHECK(s.a22 == doctest::Approx(2.0 * 0.25 * 9.0).epsilon(1e-15));
  CHECK_THROWS_AS(sigma_star(d22, d11, {0.5, 0.5}, 16, 1, ExternalKind::mammen),
                  std::invalid_argument);
}

TEST_CASE("resampled pairs center on the sample pair with the advertised spread") {
  const int N = 200, b = 10, n = 4000;
  const int J = N - 2 * b + 1;
  const auto y22 = random_products(static_cast<std::size_t>(N), 51);
  const auto y11 = random_products(static_cast<std::size_t>(N), 52);
  const double scale22 = bv_normalizer(n, N, 2, 2);
  const double scale11 = bv_normalizer(n, N, 1, 1);
  double bv22 = 0.0, bv11 = 0.0;
  for (double v : y22) bv22 += v;
  for (double v : y11) bv11 += v;
  bv22 *= scale22;
  bv11 *= scale11;
  const auto d22 = block_diffs(y22, b, scale22);
  const auto d11 = block_diffs(y11, b, scale11);
  const auto sig = sigma_check(d22, d11, n, b);
  DayResampleInput day{n, b, bv22, bv11, &d22, &d11};

  BootstrapConfig cfg;
  cfg.B = 20000;
  for (ExternalKind kind : {ExternalKind::gaussian, ExternalKind::mammen}) {
    cfg.kind = kind;
    const auto draws = bootstrap_pairs(day, cfg, 0x77ull, 1234);
    REQUIRE(static_cast<int>(draws.size()) == cfg.B);
    std::vector<double> dev22(draws.size()), dev11(draws.size());
    for (std::size_t i = 0; i < draws.size(); ++i) {
      dev22[i] = draws[i].bv22_star - bv22;
      dev11[i] = draws[i].bv11_star - bv11;
    }
    // Centering: E*[bv*] = bv, to Monte Carlo error.
    const double se22 = std::sqrt(pop_variance(dev22) / cfg.B);
    const double se11 = std::sqrt(pop_variance(dev11) / cfg.B);
    CHECK(std::fabs(mean_of(dev22)) < 4.0 * se22);
    CHECK(std::fabs(mean_of(dev11)) < 4.0 * se11);
    // Spread: var*(n^{1/4} bv*) = (N/J)^2 * sigma_check diagonal.
    const double ratio = static_cast<double>(N) / J;
    const double sn = std::sqrt(static_cast<double>(n));
    CHECK(pop_variance(dev22) * sn ==
          doctest::Approx(ratio * ratio * sig.a11).epsilon(0.06));
    CHECK(pop_variance(dev11) * sn ==
          doctest::Approx(ratio * ratio * sig.a22).epsilon(0.06));
  }
}

TEST_CASE("regime-by-regime resampling aggregates to the fast path") {
  Rng rng(0x4321ull, 9);
  for (auto [N, b] : {std::pair<int, int>{12, 2}, {40, 5}, {9, 3}, {30, 10}}) {
    const int J = N - 2 * b + 1;
    const auto y = random_products(static_cast<std::size_t>(N),
                                   1000 + static_cast<std::uint64_t>(N));
    std::vector<double> u(static_cast<std::size_t>(J + 1));
    for (auto& x : u) x = external_draw(rng, ExternalKind::mammen);

    const auto centered = resample_centered_products(y, b, u);
    REQUIRE(static_cast<int>(centered.size()) == N);
    double agg = 0.0;
    for (double v : centered) agg += v;

    const auto d = block_diffs(y, b, 1.0);
    const double kappa = std::sqrt(static_cast<double>(N) / J);
    double fast = 0.0;
    for (int j = 0; j < J; ++j) fast += u[static_cast<std::size_t>(j)] * d[static_cast<std::size_t>(j)];
    fast *= -kappa / std::sqrt(static_cast<double>(b));

    CHECK(std::fabs(agg - fast) <= 1e-10 * std::max(1.0, std::fabs(fast)));
  }
  CHECK_THROWS_AS(resample_centered_products({1.0, 2.0}, 1, {0.5}),
                  std::invalid_argument);
}

TEST_CASE("bootstrap runs are reproducible and consistent with their draws") {
  const int N = 120, b = 8, n = 1200;
  const auto y22 = random_products(static_cast<std::size_t>(N), 61);
  const auto y11 = random_products(static_cast<std::size_t>(N), 62);
  const double scale22 = bv_normalizer(n, N, 2, 2);
  const double scale11 = bv_normalizer(n, N, 1, 1);
  double bv22 = 0.0, bv11 = 0.0;
  for (double v : y22) bv22 += v;
  for (double v : y11) bv11 += v;
  bv22 *= scale22;
  bv11 *= scale11;
  const auto d22 = block_diffs(y22, b, scale22);
  const auto d11 = block_diffs(y11, b, scale11);
  DayResampleInput day{n, b, bv22, bv11, &d22, &d11};

  BootstrapConfig cfg;
  cfg.B = 199;
  const auto run1 = run_bootstrap(day, cfg, 0xabcull, 99);
  const auto run2 = run_bootstrap(day, cfg, 0xabcull, 99);
  REQUIRE(run1.z_star.size() == run2.z_star.size());
  for (std::size_t i = 0; i < run1.z_star.size(); ++i) {
    CHECK(run1.z_star[i] == run2.z_star[i]);
  }
  CHECK(run1.z_quantile == run2.z_quantile);
  CHECK(run1.t_quantile == run2.t_quantile);

  const auto run3 = run_bootstrap(day, cfg, 0xabcull, 100);
  bool differ = false;
  for (std::size_t i = 0; i < run1.z_star.size(); ++i) {
    if (run1.z_star[i] != run3.z_star[i]) differ = true;
  }
  CHECK(differ);

  CHECK(static_cast<int>(run1.t_star.size()) + run1.dropped == cfg.B);
  CHECK(run1.z_quantile ==
        order_statistic(run1.z_star,
                        static_cast<std::size_t>(percentile_rank(cfg.B, cfg.alpha))));

  // The published draws use the same streams as the quantile run.
  const auto draws = bootstrap_pairs(day, cfg, 0xabcull, 99);
  const double n4 = std::pow(static_cast<double>(n), 0.25);
  const double center = bv22 - bv11 * bv11;
  for (int r = 0; r < cfg.B; ++r) {
    const double z = n4 * (draws[static_cast<std::size_t>(r)].bv22_star -
                           draws[static_cast<std::size_t>(r)].bv11_star *
                               draws[static_cast<std::size_t>(r)].bv11_star -
                           center);
    CHECK(z == run1.z_star[static_cast<std::size_t>(r)]);
  }

  BootstrapConfig bad = cfg;
  bad.B = 0;
  CHECK_THROWS_AS(run_bootstrap(day, bad, 1, 1), std::invalid_argument);
  DayResampleInput hollow{n, b, bv22, bv11, nullptr, nullptr};
  CHECK_THROWS_AS(run_bootstrap(hollow, cfg, 1, 1), std::invalid_argument);
}
