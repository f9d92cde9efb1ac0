#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "divolt/bootstrap.hpp"
#include "divolt/diurnal.hpp"
#include "divolt/sim.hpp"
#include "divolt/teststat.hpp"

namespace divolt {

// Flat configuration shared by all subcommands; each field has a same-named
// CLI flag and `key = value` config-file entry.
struct RunConfig {
  int n = 4680;
  int m = 78;
  double theta = 1.0 / 3.0;
  double varpi = 0.49;
  int q = 3;
  double alpha = 0.05;
  int bootstrap_b = 199;
  ExternalKind external = ExternalKind::mammen;
  std::uint64_t seed = 12345;
  bool deflate = true;
  std::string true_profile;        // profile CSV path; empty = estimate from the data
  bool use_oracle_profile = false;  // montecarlo: deflate by the simulator's exact shape
  std::string out = "out";
  int threads = 0;           // 0 = hardware concurrency
  int replications = 250;
  double trunc_quantile = 0.999;
  double xi2 = 0.001;
  double phi_ma = -0.5;
  bool bonferroni = false;
  bool drop_outliers = false;
  int days = 5;              // `simulate` day count
  bool under_null = false;   // `simulate` hypothesis
  bool with_jumps = false;
  std::vector<int> n_cells;               // `montecarlo` n values
  std::vector<std::string> hypothesis_cells;  // "null" / "alt"
  double session_open = std::numeric_limits<double>::quiet_NaN();
  double session_close = std::numeric_limits<double>::quiet_NaN();
};

// Run fn(0..count-1) across a worker pool. Results must be written to
// per-index slots; the split across threads then cannot affect the output.
void parallel_for(int count, int threads, const std::function<void(int)>& fn);

// Disjoint stream trees per subcommand, so sharing one seed across commands
// never reuses randomness.
std::uint64_t simulate_day_stream(std::uint64_t seed, int day_index);
std::uint64_t test_day_stream(std::uint64_t seed, int day_index);

struct TickDay {
  std::string date;
  std::vector<double> ts;
  std::vector<double> logp;
};

// Parse `date,timestamp_seconds,price` rows, grouped by date in file order.
// Malformed rows raise data_error with the line number; days with fewer than
// two ticks are dropped with a warning on stderr.
std::vector<TickDay> ingest_ticks(const std::string& path);

// Previous-tick interpolation onto the n+1 point grid over the session
// [open, close] (defaults: first and last tick of the day).
ReturnGrid snap_to_grid(const TickDay& day, int n,
                        double session_open = std::numeric_limits<double>::quiet_NaN(),
                        double session_close = std::numeric_limits<double>::quiet_NaN());

struct DayOutcome {
  std::string date;
  int n = 0;
  int k_n = 0;
  int b_n = 0;
  double theta_eff = 0.0;
  double bv11 = 0.0, bv22 = 0.0;
  int truncated_pairs = 0;
  double z_n = 0.0, v_check = 0.0, t_n = 0.0;
  bool v_degenerate = false;
  double clt_pvalue = 0.0;
  bool clt_reject = false;
  double z_quantile = 0.0;
  bool z_reject = false;
  double t_quantile = 0.0;
  bool t_reject = false;
  int dropped = 0;
  bool t_unreliable = false;
  double omega2_hat = 0.0;
  double noise_prop = 0.0;
  double h_hat = 0.0;
  bool h_degenerate = false;
};

// Deflate, compute day statistics, run the CLT test and one bootstrap at the
// configured external kind. alpha_eff allows a multiplicity-adjusted level.
DayOutcome run_day_test(const ReturnGrid& day, const DiurnalProfile& profile,
                        const RunConfig& cfg, double alpha_eff,
                        std::uint64_t test_stream);

struct CellSpec {
  int n = 4680;
  double theta = 1.0 / 3.0;
  double xi2 = 0.001;
  double phi_ma = -0.5;
  bool under_null = true;
  bool with_jumps = false;
};

struct RepRecord {
  int rep = 0;
  double h_true = 0.0;
  double h_hat = 0.0;
  int b_n = 0;
  int clt_reject = 0;
  int z_gaussian_reject = 0;
  int z_mammen_reject = 0;
  int t_gaussian_reject = 0;
  int t_mammen_reject = 0;
  double noise_prop = 0.0;
  double z_n = 0.0;
  double t_n = 0.0;
};

struct CellResult {
  CellSpec cell;
  int replications = 0;
  int bootstrap_b = 0;
  double rate_clt = 0.0;        // percent
  double rate_z_gaussian = 0.0;
  double rate_z_mammen = 0.0;
  double rate_t_gaussian = 0.0;
  double rate_t_mammen = 0.0;
  double avg_block = 0.0;
  double mean_h_true = 0.0;
  double mean_h_hat = 0.0;
  int v_degenerate_count = 0;
  std::vector<RepRecord> reps;
};

// Full cell: simulate R days, fit (or load) the diurnal profile, run the CLT
// and both wild bootstrap variants on every day. Deterministic for a given
// (cfg.seed, cell_index) regardless of thread count.
CellResult run_monte_carlo_cell(const CellSpec& cell, const RunConfig& cfg,
                                int cell_index = 0);

// 17-significant-digit formatting; round-trips doubles exactly.
std::string fmt17(double v);

void write_day_outcomes_csv(const std::vector<DayOutcome>& rows, const std::string& path);
void write_cell_reports_csv(const std::vector<CellResult>& cells, const std::string& path);
void write_scatter_csv(const std::vector<CellResult>& cells, const std::string& path);

// Recompute summary tables (rates, average block length, H quantiles) from a
// stored scatter file.
struct SummaryRow {
  CellSpec cell;
  int replications = 0;
  double rate_clt = 0.0, rate_z_gaussian = 0.0, rate_z_mammen = 0.0;
  double rate_t_gaussian = 0.0, rate_t_mammen = 0.0;
  double avg_block = 0.0;
  double h_hat_q25 = 0.0, h_hat_median = 0.0, h_hat_q75 = 0.0;
  double ratio_median = 0.0;  // median of h_hat / h_true where defined
};
std::vector<SummaryRow> summarize_scatter(const std::string& scatter_path);
void write_summary_csv(const std::vector<SummaryRow>& rows, const std::string& path);

}  // namespace divolt
