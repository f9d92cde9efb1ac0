// divolt: tests whether intraday volatility variation beyond a deterministic
// diurnal pattern is present in noisy high-frequency prices.
//
// Subcommands:
//   simulate    write synthetic tick data with known ground truth
//   diurnal     estimate the diurnal variance profile from tick data
//   test        run the day-by-day heterogeneity tests on tick data
//   montecarlo  size/power study over simulated cells
//   report      recompute summary tables from a stored scatter file

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "divolt/errors.hpp"
#include "divolt/harness.hpp"

using namespace divolt;

namespace {

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  std::string cur;
  auto flush = [&]() {
    if (cur.empty()) throw config_error("empty entry in list '" + s + "'");
    std::size_t pos = 0;
    int v = std::stoi(cur, &pos);
    if (pos != cur.size() || v <= 0) throw config_error("bad positive integer '" + cur + "'");
    out.push_back(v);
    cur.clear();
  };
  for (char c : s) {
    if (c == ',') {
      flush();
    } else if (c != ' ') {
      cur.push_back(c);
    }
  }
  flush();
  return out;
}

std::vector<bool> parse_hypothesis_list(const std::string& s) {
  std::vector<bool> out;
  std::string cur;
  auto flush = [&]() {
    if (cur == "null") {
      out.push_back(true);
    } else if (cur == "alt") {
      out.push_back(false);
    } else {
      throw config_error("hypothesis entries must be 'null' or 'alt', got '" + cur + "'");
    }
    cur.clear();
  };
  for (char c : s) {
    if (c == ',') {
      flush();
    } else if (c != ' ') {
      cur.push_back(c);
    }
  }
  flush();
  return out;
}

void ensure_out_dir(const std::string& out) {
  std::error_code ec;
  std::filesystem::create_directories(out, ec);
  if (ec) throw data_error("cannot create output directory " + out + ": " + ec.message());
}

int require_single_n(const std::vector<int>& ns) {
  if (ns.size() != 1)
    throw config_error("this subcommand takes a single --n value");
  return ns[0];
}

void cmd_simulate(const RunConfig& cfg, int n, bool flat_diurnal) {
  SimConfig sc;
  sc.n = n;
  sc.under_null = cfg.under_null;
  sc.with_jumps = cfg.with_jumps;
  sc.flat_diurnal = flat_diurnal;
  sc.xi2 = cfg.xi2;
  sc.phi_ma = cfg.phi_ma;
  sc.seed = cfg.seed;
  Simulator sim(sc);

  ensure_out_dir(cfg.out);
  const std::string tick_path = cfg.out + "/ticks.csv";
  const std::string truth_path = cfg.out + "/truth.csv";
  const std::string profile_path = cfg.out + "/true_profile.csv";

  std::ofstream ticks(tick_path);
  if (!ticks) throw data_error("cannot open " + tick_path + " for writing");
  std::ofstream truth(truth_path);
  if (!truth) throw data_error("cannot open " + truth_path + " for writing");

  ticks << "date,timestamp_seconds,price\n";
  truth << "date,true_iv,true_iq,qv_jump,omega2,true_h\n";
  const double span = static_cast<double>(sc.seconds_per_day);
  for (int d = 0; d < cfg.days; ++d) {
    PathBundle p = sim.simulate_day(simulate_day_stream(cfg.seed, d));
    char label[16];
    std::snprintf(label, sizeof(label), "d%05d", d + 1);
    for (int j = 0; j <= n; ++j) {
      double t = span * static_cast<double>(j) / n;
      ticks << label << ',' << fmt17(t) << ','
            << fmt17(std::exp(p.y[static_cast<std::size_t>(j)])) << '\n';
    }
    truth << label << ',' << fmt17(p.true_iv) << ',' << fmt17(p.true_iq) << ','
          << fmt17(p.qv_jump) << ',' << fmt17(p.omega2) << ',' << fmt17(p.true_h) << '\n';
  }
  write_profile_csv(sim.true_profile(cfg.m), profile_path);
  std::printf("wrote %s, %s, %s (%d day(s), n=%d, %s)\n", tick_path.c_str(),
              truth_path.c_str(), profile_path.c_str(), cfg.days, n,
              cfg.under_null ? "null" : "alt");
}

std::vector<ReturnGrid> load_grids(const RunConfig& cfg, const std::string& ticks, int n) {
  if (ticks.empty()) throw config_error("--ticks is required");
  std::vector<TickDay> days = ingest_ticks(ticks);
  std::vector<ReturnGrid> grids;
  grids.reserve(days.size());
  for (const auto& d : days)
    grids.push_back(snap_to_grid(d, n, cfg.session_open, cfg.session_close));
  return grids;
}

void cmd_diurnal(const RunConfig& cfg, const std::string& ticks, int n) {
  std::vector<ReturnGrid> grids = load_grids(cfg, ticks, n);
  DiurnalOptions opt;
  opt.m = cfg.m;
  opt.q = cfg.q;
  opt.drop_outliers = cfg.drop_outliers;
  DiurnalProfile prof = estimate_profile(grids, opt);
  ensure_out_dir(cfg.out);
  const std::string path = cfg.out + "/profile.csv";
  write_profile_csv(prof, path);
  std::printf("wrote %s (%d bins from %zu day(s) at n=%d)\n", path.c_str(), prof.m,
              grids.size(), n);
}

void cmd_test(const RunConfig& cfg, const std::string& ticks, int n) {
  std::vector<ReturnGrid> grids = load_grids(cfg, ticks, n);
  DiurnalProfile prof;
  if (!cfg.deflate) {
    prof = flat_profile(cfg.m);
  } else if (!cfg.true_profile.empty()) {
    prof = read_profile_csv(cfg.true_profile);
  } else {
    DiurnalOptions opt;
    opt.m = cfg.m;
    opt.q = cfg.q;
    opt.drop_outliers = cfg.drop_outliers;
    prof = estimate_profile(grids, opt);
  }

  const int D = static_cast<int>(grids.size());
  double alpha_eff = cfg.bonferroni ? cfg.alpha / D : cfg.alpha;
  std::vector<DayOutcome> rows(static_cast<std::size_t>(D));
  parallel_for(D, cfg.threads, [&](int i) {
    rows[static_cast<std::size_t>(i)] = run_day_test(
        grids[static_cast<std::size_t>(i)], prof, cfg, alpha_eff,
        test_day_stream(cfg.seed, i));
  });

  ensure_out_dir(cfg.out);
  const std::string path = cfg.out + "/day_tests.csv";
  write_day_outcomes_csv(rows, path);

  int z_rej = 0, t_rej = 0, clt_rej = 0;
  for (const auto& o : rows) {
    z_rej += o.z_reject ? 1 : 0;
    t_rej += o.t_reject ? 1 : 0;
    clt_rej += o.clt_reject ? 1 : 0;
    std::printf("%s  z=%9.4f  t=%9.4f  b=%5d  %s%s\n", o.date.c_str(), o.z_n, o.t_n, o.b_n,
                o.z_reject ? "REJECT" : "keep  ", o.t_unreliable ? " (t unreliable)" : "");
  }
  std::printf("days=%d  reject[boot-z]=%d  reject[boot-t]=%d  reject[clt]=%d  alpha=%g%s\n",
              D, z_rej, t_rej, clt_rej, alpha_eff,
              cfg.bonferroni ? " (bonferroni)" : "");
  std::printf("wrote %s\n", path.c_str());
}

void cmd_montecarlo(const RunConfig& cfg, const std::vector<int>& ns,
                    const std::vector<bool>& hypotheses) {
  std::vector<CellResult> cells;
  int cell_index = 0;
  for (bool under_null : hypotheses) {
    for (int n : ns) {
      CellSpec cell;
      cell.n = n;
      cell.theta = cfg.theta;
      cell.xi2 = cfg.xi2;
      cell.phi_ma = cfg.phi_ma;
      cell.under_null = under_null;
      cell.with_jumps = cfg.with_jumps;
      std::printf("cell %d: n=%d theta=%g %s ...\n", cell_index + 1, n, cfg.theta,
                  under_null ? "null" : "alt");
      std::fflush(stdout);
      cells.push_back(run_monte_carlo_cell(cell, cfg, cell_index));
      const CellResult& c = cells.back();
      std::printf("  clt=%5.1f%%  z[g]=%5.1f%%  z[m]=%5.1f%%  t[g]=%5.1f%%  t[m]=%5.1f%%"
                  "  avg_b=%.1f\n",
                  c.rate_clt, c.rate_z_gaussian, c.rate_z_mammen, c.rate_t_gaussian,
                  c.rate_t_mammen, c.avg_block);
      std::fflush(stdout);
      ++cell_index;
    }
  }
  ensure_out_dir(cfg.out);
  write_cell_reports_csv(cells, cfg.out + "/report.csv");
  write_scatter_csv(cells, cfg.out + "/scatter.csv");
  std::printf("wrote %s/report.csv and %s/scatter.csv\n", cfg.out.c_str(), cfg.out.c_str());
}

void cmd_report(const RunConfig& cfg, const std::string& scatter) {
  if (scatter.empty()) throw config_error("--scatter is required");
  std::vector<SummaryRow> rows = summarize_scatter(scatter);
  ensure_out_dir(cfg.out);
  write_summary_csv(rows, cfg.out + "/summary.csv");
  for (const auto& r : rows) {
    std::printf("n=%6d theta=%6.4f %-4s  clt=%5.1f%%  z[g]=%5.1f%%  z[m]=%5.1f%%"
                "  t[g]=%5.1f%%  t[m]=%5.1f%%  avg_b=%.1f  h_med=%.4f\n",
                r.cell.n, r.cell.theta, r.cell.under_null ? "null" : "alt", r.rate_clt,
                r.rate_z_gaussian, r.rate_z_mammen, r.rate_t_gaussian, r.rate_t_mammen,
                r.avg_block, r.h_hat_median);
  }
  std::printf("wrote %s/summary.csv\n", cfg.out.c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Intraday volatility heterogeneity tests"};
  app.set_config("--config")->description("flat key = value configuration file");
  app.require_subcommand(1);
  app.fallthrough(false);

  RunConfig cfg;
  std::string n_list = "4680";
  std::string hypothesis_list = "null";
  std::string external_str = "mammen";
  std::string ticks;
  std::string scatter;
  bool flat_diurnal = false;
  std::vector<std::string> true_profile_args;

  app.add_option("--n", n_list,
                 "returns per day; montecarlo accepts a comma list")
      ->capture_default_str();
  app.add_option("--m", cfg.m, "diurnal bins per day")->capture_default_str();
  app.add_option("--theta", cfg.theta, "pre-averaging bandwidth constant")
      ->capture_default_str();
  app.add_option("--varpi", cfg.varpi, "truncation exponent in (0, 0.5)")
      ->capture_default_str();
  app.add_option("--q", cfg.q, "noise MA order bound")->capture_default_str();
  app.add_option("--alpha", cfg.alpha, "test level")->capture_default_str();
  app.add_option("--bootstrap-b", cfg.bootstrap_b, "bootstrap resamples")
      ->capture_default_str();
  app.add_option("--external", external_str, "external variable: gaussian or mammen")
      ->check(CLI::IsMember({"gaussian", "mammen"}))
      ->capture_default_str();
  app.add_option("--seed", cfg.seed, "master RNG seed")->capture_default_str();
  app.add_flag("--deflate,!--no-deflate", cfg.deflate,
               "divide out the diurnal profile before testing");
  app.add_option("--true-profile", true_profile_args,
                 "profile CSV to deflate by; bare flag in montecarlo uses the exact "
                 "simulated shape")
      ->expected(0, 1);
  app.add_option("--out", cfg.out, "output directory")->capture_default_str();
  app.add_option("--threads", cfg.threads, "worker threads (0 = hardware)")
      ->capture_default_str();
  app.add_option("--replications", cfg.replications, "montecarlo days per cell")
      ->capture_default_str();
  app.add_option("--trunc-quantile", cfg.trunc_quantile,
                 "normal quantile of the truncation threshold")
      ->capture_default_str();
  app.add_option("--xi2", cfg.xi2, "simulated noise-to-signal ratio")
      ->capture_default_str();
  app.add_option("--phi", cfg.phi_ma, "simulated noise MA(1) coefficient")
      ->capture_default_str();
  app.add_flag("--bonferroni", cfg.bonferroni, "divide alpha by the number of days");
  app.add_flag("--drop-outliers", cfg.drop_outliers,
               "drop the largest 1% of slow returns per bin when fitting the profile");
  app.add_option("--days", cfg.days, "days to simulate")->capture_default_str();
  app.add_flag("--null,!--alt", cfg.under_null,
               "simulate under the null (constant factor volatility)");
  app.add_flag("--jumps", cfg.with_jumps, "add tempered-stable jumps");
  app.add_flag("--flat-diurnal", flat_diurnal, "simulate without a diurnal shape");
  app.add_option("--hypothesis", hypothesis_list,
                 "montecarlo hypotheses: comma list of null/alt")
      ->capture_default_str();
  app.add_option("--ticks", ticks, "input tick CSV (date,timestamp_seconds,price)");
  app.add_option("--scatter", scatter, "scatter CSV produced by montecarlo");
  app.add_option("--session-open", cfg.session_open,
                 "session open in timestamp units (default: first tick per day)");
  app.add_option("--session-close", cfg.session_close,
                 "session close in timestamp units (default: last tick per day)");

  CLI::App* s_sim = app.add_subcommand("simulate", "write synthetic tick data");
  CLI::App* s_diu = app.add_subcommand("diurnal", "estimate the diurnal profile");
  CLI::App* s_test = app.add_subcommand("test", "run the day-by-day tests");
  CLI::App* s_mc = app.add_subcommand("montecarlo", "size/power study");
  CLI::App* s_rep = app.add_subcommand("report", "summarize a scatter file");
  for (CLI::App* s : {s_sim, s_diu, s_test, s_mc, s_rep}) s->fallthrough(true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return divolt::kExitConfig;
  }

  cfg.external = external_kind_from_string(external_str);
  if (!true_profile_args.empty()) {
    cfg.true_profile = true_profile_args.front();
  } else if (app.count("--true-profile") > 0) {
    cfg.use_oracle_profile = true;
  }

  try {
    std::vector<int> ns = parse_int_list(n_list);
    if (cfg.m < 1) throw config_error("m must be positive");
    if (cfg.bootstrap_b < 1) throw config_error("bootstrap-b must be positive");
    if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) throw config_error("alpha must be in (0,1)");
    for (int n : ns) {
      if (n % cfg.m != 0)
        throw config_error("n=" + std::to_string(n) + " must be divisible by m=" +
                           std::to_string(cfg.m));
    }
    if (s_sim->parsed()) {
      cmd_simulate(cfg, require_single_n(ns), flat_diurnal);
    } else if (s_diu->parsed()) {
      cmd_diurnal(cfg, ticks, require_single_n(ns));
    } else if (s_test->parsed()) {
      cmd_test(cfg, ticks, require_single_n(ns));
    } else if (s_mc->parsed()) {
      cmd_montecarlo(cfg, ns, parse_hypothesis_list(hypothesis_list));
    } else if (s_rep->parsed()) {
      cmd_report(cfg, scatter);
    }
  } catch (const divolt::config_error& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return divolt::kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return divolt::kExitConfig;
  } catch (const divolt::data_error& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return divolt::kExitData;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return divolt::kExitData;
  }
  return divolt::kExitOk;
}
