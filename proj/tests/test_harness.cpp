#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <divolt/errors.hpp>
#include <divolt/harness.hpp>
#include <divolt/sim.hpp>

using namespace divolt;

namespace {

void write_file(const std::string& path, const std::string& body) {
  std::ofstream f(path);
  f << body;
}

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("tick ingestion groups by day and keeps file order") {
  const std::string path = "tmp_ticks_ok.csv";
  write_file(path,
             "date,timestamp_seconds,price\n"
             "2024-01-03,0,100\n"
             "2024-01-03,60,101\n"
             "2024-01-03,120,99.5\n"
             "2024-01-02,0,50\n"
             "2024-01-02,30,50.5\n"
             "lonely,0,10\n");
  const auto days = ingest_ticks(path);
  REQUIRE(days.size() == 2);  // the single-tick day is dropped with a warning
  CHECK(days[0].date == "2024-01-03");
  CHECK(days[1].date == "2024-01-02");
  REQUIRE(days[0].ts.size() == 3);
  CHECK(days[0].ts[1] == 60.0);
  CHECK(days[0].logp[1] == doctest::Approx(std::log(101.0)).epsilon(1e-15));
  std::remove(path.c_str());
}

TEST_CASE("tick ingestion rejects malformed input") {
  const std::string path = "tmp_ticks_bad.csv";
  CHECK_THROWS_AS(ingest_ticks("definitely_missing.csv"), data_error);

  write_file(path, "time,price\n");
  CHECK_THROWS_AS(ingest_ticks(path), data_error);

  write_file(path, "date,timestamp_seconds,price\nd,0\n");
  CHECK_THROWS_AS(ingest_ticks(path), data_error);

  write_file(path, "date,timestamp_seconds,price\nd,zero,100\n");
  CHECK_THROWS_AS(ingest_ticks(path), data_error);

  write_file(path, "date,timestamp_seconds,price\nd,0,-3\n");
  CHECK_THROWS_AS(ingest_ticks(path), data_error);

  write_file(path,
             "date,timestamp_seconds,price\n"
             "d,60,100\n"
             "d,0,100\n");
  CHECK_THROWS_AS(ingest_ticks(path), data_error);

  write_file(path, "date,timestamp_seconds,price\nd,0,100\n");
  CHECK_THROWS_AS(ingest_ticks(path), data_error);  // no day with two ticks
  std::remove(path.c_str());
}

TEST_CASE("grid snapping uses previous-tick interpolation") {
  TickDay day;
  day.date = "d";
  day.ts = {0.0, 1.0, 2.0, 3.0, 4.0};
  day.logp = {1.0, 1.5, 1.2, 2.0, 1.8};

  const auto grid = snap_to_grid(day, 4);
  REQUIRE(grid.n() == 4);
  CHECK(grid.r[0] == 0.5);
  CHECK(grid.r[1] == doctest::Approx(-0.3).epsilon(1e-12));
  CHECK(grid.r[2] == 0.8);
  CHECK(grid.r[3] == doctest::Approx(-0.2).epsilon(1e-12));

  // Coarser grid: n = 2 samples at t = {0, 2, 4}.
  const auto coarse = snap_to_grid(day, 2);
  CHECK(coarse.r[0] == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(coarse.r[1] == doctest::Approx(0.6).epsilon(1e-12));

  // Session override: points before the first tick back-fill with it.
  TickDay two;
  two.date = "d2";
  two.ts = {0.0, 4.0};
  two.logp = {1.0, 3.0};
  const auto padded = snap_to_grid(two, 2, -2.0, 4.0);
  CHECK(padded.r[0] == 0.0);
  CHECK(padded.r[1] == 2.0);

  CHECK_THROWS_AS(snap_to_grid(day, 1), config_error);
  CHECK_THROWS_AS(snap_to_grid(day, 4, 3.0, 3.0), data_error);
  TickDay one;
  one.date = "d3";
  one.ts = {0.0};
  one.logp = {1.0};
  CHECK_THROWS_AS(snap_to_grid(one, 4), data_error);
}

TEST_CASE("a constant-price day snaps to all-zero returns") {
  TickDay day;
  day.date = "flat";
  day.ts = {0.0, 10.0, 20.0};
  day.logp = {2.5, 2.5, 2.5};
  const auto grid = snap_to_grid(day, 78);
  for (double r : grid.r) CHECK(r == 0.0);
}

TEST_CASE("17-digit formatting round-trips doubles exactly") {
  for (double v : {1.0 / 3.0, 0.1, -123456.789, 1e-300, 4.9406564584124654e-324,
                   2.2250738585072014e-308, 0.0, 6.02214076e23}) {
    const std::string s = fmt17(v);
    const double back = std::strtod(s.c_str(), nullptr);
    CHECK(back == v);
  }
}

TEST_CASE("parallel for covers every index exactly once and propagates errors") {
  for (int threads : {1, 2, 3}) {
    std::vector<int> hits(100, 0);
    parallel_for(100, threads, [&](int i) { hits[static_cast<std::size_t>(i)] += i; });
    for (int i = 0; i < 100; ++i) CHECK(hits[static_cast<std::size_t>(i)] == i);
  }
  parallel_for(0, 2, [](int) { REQUIRE(false); });
  CHECK_THROWS_AS(
      parallel_for(10, 3,
                   [](int i) {
                     if (i == 5) throw data_error("boom");
                   }),
      data_error);
}

TEST_CASE("per-purpose stream trees never collide") {
  CHECK(simulate_day_stream(7, 0) == simulate_day_stream(7, 0));
  CHECK(simulate_day_stream(7, 0) != simulate_day_stream(7, 1));
  CHECK(simulate_day_stream(7, 0) != test_day_stream(7, 0));
  CHECK(simulate_day_stream(7, 0) != simulate_day_stream(8, 0));
}

TEST_CASE("simulated ticks round-trip through csv ingestion and snapping") {
  SimConfig scfg;
  scfg.n = 390;
  const Simulator sim(scfg);
  const auto path_bundle = sim.simulate_day(17);
  const auto direct = path_bundle.observed_returns("2024-02-05");

  const std::string path = "tmp_ticks_roundtrip.csv";
  {
    std::ofstream f(path);
    f << "date,timestamp_seconds,price\n";
    const double span = 23400.0;
    for (int j = 0; j <= scfg.n; ++j) {
      f << "2024-02-05," << fmt17(span * j / scfg.n) << ','
        << fmt17(std::exp(path_bundle.y[static_cast<std::size_t>(j)])) << '\n';
    }
  }
  const auto days = ingest_ticks(path);
  REQUIRE(days.size() == 1);
  const auto grid = snap_to_grid(days[0], scfg.n);
  REQUIRE(grid.n() == direct.n());
  for (int i = 0; i < grid.n(); ++i) {
    CHECK(grid.r[static_cast<std::size_t>(i)] ==
          doctest::Approx(direct.r[static_cast<std::size_t>(i)]).epsilon(1e-12));
  }
  std::remove(path.c_str());
}

TEST_CASE("single-day pipeline produces internally consistent outcomes") {
  SimConfig scfg;
  scfg.n = 390;
  scfg.under_null = true;
  const Simulator sim(scfg);
  const auto grid = sim.simulate_day(3).observed_returns("d0");

  RunConfig cfg;
  cfg.n = 390;
  cfg.bootstrap_b = 19;
  const auto profile = flat_profile(cfg.m);
  const auto o = run_day_test(grid, profile, cfg, cfg.alpha, test_day_stream(cfg.seed, 0));
  CHECK(o.n == 390);
  CHECK(o.k_n == 7);
  CHECK(std::isfinite(o.z_n));
  CHECK(o.z_reject == (o.z_n > o.z_quantile));
  if (!o.v_degenerate) {
    CHECK(o.clt_reject == (o.t_n > 1.6448536269514722));
  }
  CHECK(o.omega2_hat >= 0.0);
  CHECK(o.noise_prop >= 0.0);
  CHECK(o.noise_prop <= 1.0);

  // Identical stream, identical outcome.
  const auto o2 = run_day_test(grid, profile, cfg, cfg.alpha, test_day_stream(cfg.seed, 0));
  CHECK(o2.z_quantile == o.z_quantile);
  CHECK(o2.t_quantile == o.t_quantile);
}

TEST_CASE("monte carlo cells are invariant to the thread count") {
  CellSpec cell;
  cell.n = 390;
  cell.under_null = true;

  RunConfig cfg;
  cfg.n = 390;
  cfg.replications = 6;
  cfg.bootstrap_b = 19;

  cfg.threads = 1;
  const auto serial = run_monte_carlo_cell(cell, cfg, 0);
  cfg.threads = 2;
  const auto parallel = run_monte_carlo_cell(cell, cfg, 0);

  REQUIRE(serial.reps.size() == parallel.reps.size());
  for (std::size_t i = 0; i < serial.reps.size(); ++i) {
    CHECK(serial.reps[i].z_n == parallel.reps[i].z_n);
    CHECK(serial.reps[i].t_n == parallel.reps[i].t_n);
    CHECK(serial.reps[i].h_hat == parallel.reps[i].h_hat);
    CHECK(serial.reps[i].h_true == parallel.reps[i].h_true);
    CHECK(serial.reps[i].b_n == parallel.reps[i].b_n);
    CHECK(serial.reps[i].z_mammen_reject == parallel.reps[i].z_mammen_reject);
    CHECK(serial.reps[i].t_gaussian_reject == parallel.reps[i].t_gaussian_reject);
  }
  CHECK(serial.rate_clt == parallel.rate_clt);
  CHECK(serial.rate_z_mammen == parallel.rate_z_mammen);

  // Byte-identical reports regardless of threading.
  write_cell_reports_csv({serial}, "tmp_report_serial.csv");
  write_cell_reports_csv({parallel}, "tmp_report_parallel.csv");
  write_scatter_csv({serial}, "tmp_scatter_serial.csv");
  write_scatter_csv({parallel}, "tmp_scatter_parallel.csv");
  CHECK(slurp("tmp_report_serial.csv") == slurp("tmp_report_parallel.csv"));
  CHECK(slurp("tmp_scatter_serial.csv") == slurp("tmp_scatter_parallel.csv"));

  // The summary recomputed from the scatter matches the in-memory rates.
  const auto rows = summarize_scatter("tmp_scatter_serial.csv");
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].replications == serial.replications);
  CHECK(rows[0].rate_clt == doctest::Approx(serial.rate_clt).epsilon(1e-12));
  CHECK(rows[0].rate_z_mammen == doctest::Approx(serial.rate_z_mammen).epsilon(1e-12));
  CHECK(rows[0].rate_t_gaussian == doctest::Approx(serial.rate_t_gaussian).epsilon(1e-12));
  CHECK(rows[0].avg_block == doctest::Approx(serial.avg_block).epsilon(1e-12));

  for (const char* p : {"tmp_report_serial.csv", "tmp_report_parallel.csv",
                        "tmp_scatter_serial.csv", "tmp_scatter_parallel.csv"}) {
    std::remove(p);
  }
}
