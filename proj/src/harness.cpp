#include "divolt/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>
#include <unordered_map>

#include "divolt/errors.hpp"
#include "divolt/mathutil.hpp"

namespace divolt {

namespace {

// Purpose tags keep the stream trees of the subcommands disjoint even when
// they share a seed.
constexpr std::uint64_t kStreamSimulate = 0x51AED001ull;
constexpr std::uint64_t kStreamMonteCarlo = 0x4D43A7E0ull;
constexpr std::uint64_t kStreamTest = 0x7E57DA70ull;

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

double parse_double(const std::string& field, const std::string& path, std::size_t line_no) {
  std::string t = trim(field);
  if (t.empty()) throw data_error(path + ":" + std::to_string(line_no) + ": empty numeric field");
  char* end = nullptr;
  double v = std::strtod(t.c_str(), &end);
  if (end != t.c_str() + t.size())
    throw data_error(path + ":" + std::to_string(line_no) + ": bad number '" + t + "'");
  return v;
}

long parse_long(const std::string& field, const std::string& path, std::size_t line_no) {
  std::string t = trim(field);
  if (t.empty()) throw data_error(path + ":" + std::to_string(line_no) + ": empty integer field");
  char* end = nullptr;
  long v = std::strtol(t.c_str(), &end, 10);
  if (end != t.c_str() + t.size())
    throw data_error(path + ":" + std::to_string(line_no) + ": bad integer '" + t + "'");
  return v;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw data_error("cannot open " + path + " for writing");
  return out;
}

double interp_quantile(std::vector<double> v, double p) {
  v.erase(std::remove_if(v.begin(), v.end(), [](double x) { return !std::isfinite(x); }),
          v.end());
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  double pos = p * static_cast<double>(v.size() - 1);
  std::size_t lo = static_cast<std::size_t>(pos);
  if (lo + 1 >= v.size()) return v.back();
  double frac = pos - static_cast<double>(lo);
  return v[lo] + frac * (v[lo + 1] - v[lo]);
}

}  // namespace

std::uint64_t simulate_day_stream(std::uint64_t seed, int day_index) {
  return substream(substream(seed, kStreamSimulate), static_cast<std::uint64_t>(day_index));
}

std::uint64_t test_day_stream(std::uint64_t seed, int day_index) {
  return substream(substream(seed, kStreamTest), static_cast<std::uint64_t>(day_index));
}

void parallel_for(int count, int threads, const std::function<void(int)>& fn) {
  if (count <= 0) return;
  if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
  if (threads < 1) threads = 1;
  threads = std::min(threads, count);
  if (threads == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::mutex err_mutex;
  auto worker = [&]() {
    for (;;) {
      int i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (!first_error) first_error = std::current_exception();
        next.store(count);  // stop handing out work
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

std::vector<TickDay> ingest_ticks(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw data_error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw data_error(path + ": empty file");
  if (trim(line) != "date,timestamp_seconds,price")
    throw data_error(path + ":1: expected header 'date,timestamp_seconds,price'");

  std::vector<TickDay> days;
  std::unordered_map<std::string, std::size_t> index;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::vector<std::string> f = split_fields(line);
    if (f.size() != 3)
      throw data_error(path + ":" + std::to_string(line_no) + ": expected 3 fields, got " +
                       std::to_string(f.size()));
    std::string date = trim(f[0]);
    if (date.empty()) throw data_error(path + ":" + std::to_string(line_no) + ": empty date");
    double ts = parse_double(f[1], path, line_no);
    double price = parse_double(f[2], path, line_no);
    if (!(price > 0.0) || !std::isfinite(price))
      throw data_error(path + ":" + std::to_string(line_no) + ": price must be positive");
    auto it = index.find(date);
    std::size_t di;
    if (it == index.end()) {
      di = days.size();
      index.emplace(date, di);
      days.push_back(TickDay{date, {}, {}});
    } else {
      di = it->second;
    }
    TickDay& d = days[di];
    if (!d.ts.empty() && ts < d.ts.back())
      throw data_error(path + ":" + std::to_string(line_no) +
                       ": timestamps must be nondecreasing within a day");
    d.ts.push_back(ts);
    d.logp.push_back(std::log(price));
  }

  std::vector<TickDay> kept;
  kept.reserve(days.size());
  for (auto& d : days) {
    if (d.ts.size() < 2) {
      std::fprintf(stderr, "warning: dropping day %s with %zu tick(s)\n", d.date.c_str(),
                   d.ts.size());
      continue;
    }
    kept.push_back(std::move(d));
  }
  if (kept.empty()) throw data_error(path + ": no usable days");
  return kept;
}

ReturnGrid snap_to_grid(const TickDay& day, int n, double session_open, double session_close) {
  if (n < 2) throw config_error("n must be at least 2");
  if (day.ts.size() < 2) throw data_error(day.date + ": fewer than two ticks");
  double open = std::isnan(session_open) ? day.ts.front() : session_open;
  double close = std::isnan(session_close) ? day.ts.back() : session_close;
  if (!(close > open))
    throw data_error(day.date + ": session close must exceed session open");

  std::vector<double> grid(static_cast<std::size_t>(n) + 1);
  std::size_t cur = 0;
  for (int i = 0; i <= n; ++i) {
    double g = open + (close - open) * (static_cast<double>(i) / n);
    double eps = 1e-9 * std::max(1.0, std::fabs(g));
    while (cur + 1 < day.ts.size() && day.ts[cur + 1] <= g + eps) ++cur;
    // Previous-tick value; before the first tick this back-fills with it.
    grid[static_cast<std::size_t>(i)] = day.logp[cur];
  }

  ReturnGrid out;
  out.date = day.date;
  out.r.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    out.r[static_cast<std::size_t>(i)] =
        grid[static_cast<std::size_t>(i) + 1] - grid[static_cast<std::size_t>(i)];
  return out;
}

DayOutcome run_day_test(const ReturnGrid& day, const DiurnalProfile& profile,
                        const RunConfig& cfg, double alpha_eff,
                        std::uint64_t test_stream) {
  DayOutcome o;
  o.date = day.date;
  o.n = static_cast<int>(day.r.size());

  ReturnGrid work = cfg.deflate ? deflate(day, profile) : day;
  DayStatistics st = day_statistics(work.r, cfg.theta, cfg.varpi, cfg.trunc_quantile);

  o.k_n = st.scheme.k_n;
  o.theta_eff = st.scheme.theta_effective;
  o.b_n = st.b_n;
  o.bv11 = st.bv11;
  o.bv22 = st.bv22;
  o.truncated_pairs = st.truncated_pairs;
  o.z_n = st.z_n;
  o.v_check = st.v_check;
  o.t_n = st.t_n;
  o.v_degenerate = st.v_degenerate;

  double z1ma = normal_quantile(1.0 - alpha_eff);
  o.clt_pvalue = st.v_degenerate ? std::numeric_limits<double>::quiet_NaN() : clt_pvalue(st.t_n);
  o.clt_reject = !st.v_degenerate && st.t_n > z1ma;

  BootstrapConfig bc;
  bc.B = cfg.bootstrap_b;
  bc.kind = cfg.external;
  bc.alpha = alpha_eff;
  std::uint64_t lane = substream(test_stream, cfg.external == ExternalKind::gaussian ? 0 : 1);
  BootstrapRun br = run_bootstrap(st.resample_input(), bc, cfg.seed, lane);
  o.z_quantile = br.z_quantile;
  o.z_reject = st.z_n > br.z_quantile;
  o.t_quantile = br.t_quantile;
  o.t_reject = !st.v_degenerate && !br.t_star.empty() && st.t_n > br.t_quantile;
  o.dropped = br.dropped;
  o.t_unreliable = br.t_unreliable;

  o.omega2_hat = robust_noise_variance(work.r, cfg.q);
  o.noise_prop = noise_proportion(st, o.omega2_hat);
  HIndexEstimate h = h_index_hat(st, work.r, cfg.q);
  o.h_hat = h.h_hat;
  o.h_degenerate = h.degenerate;
  return o;
}

CellResult run_monte_carlo_cell(const CellSpec& cell, const RunConfig& cfg, int cell_index) {
  if (cfg.replications < 1) throw config_error("replications must be positive");
  const int R = cfg.replications;

  SimConfig sc;
  sc.n = cell.n;
  sc.under_null = cell.under_null;
  sc.with_jumps = cell.with_jumps;
  sc.xi2 = cell.xi2;
  sc.phi_ma = cell.phi_ma;
  sc.seed = cfg.seed;
  Simulator sim(sc);

  std::uint64_t cell_stream =
      substream(substream(cfg.seed, kStreamMonteCarlo), static_cast<std::uint64_t>(cell_index));

  struct SimSlot {
    ReturnGrid day;
    double h_true = 0.0;
  };
  std::vector<SimSlot> sims(static_cast<std::size_t>(R));
  parallel_for(R, cfg.threads, [&](int rep) {
    PathBundle p = sim.simulate_day(substream(cell_stream, 2ull * static_cast<std::uint64_t>(rep)));
    char label[16];
    std::snprintf(label, sizeof(label), "d%05d", rep + 1);
    sims[static_cast<std::size_t>(rep)].day = p.observed_returns(label);
    sims[static_cast<std::size_t>(rep)].h_true = p.true_h;
  });

  DiurnalProfile prof;
  if (!cfg.deflate) {
    prof = flat_profile(cfg.m);
  } else if (cfg.use_oracle_profile) {
    prof = sim.true_profile(cfg.m);
  } else if (!cfg.true_profile.empty()) {
    prof = read_profile_csv(cfg.true_profile);
  } else {
    std::vector<ReturnGrid> all;
    all.reserve(sims.size());
    for (const auto& s : sims) all.push_back(s.day);
    DiurnalOptions opt;
    opt.m = cfg.m;
    opt.q = cfg.q;
    opt.drop_outliers = cfg.drop_outliers;
    prof = estimate_profile(all, opt);
  }

  double alpha_eff = cfg.bonferroni ? cfg.alpha / R : cfg.alpha;
  double z1ma = normal_quantile(1.0 - alpha_eff);

  std::vector<RepRecord> recs(static_cast<std::size_t>(R));
  std::vector<char> degen(static_cast<std::size_t>(R), 0);
  parallel_for(R, cfg.threads, [&](int rep) {
    const SimSlot& slot = sims[static_cast<std::size_t>(rep)];
    ReturnGrid work = cfg.deflate ? deflate(slot.day, prof) : slot.day;
    DayStatistics st = day_statistics(work.r, cell.theta, cfg.varpi, cfg.trunc_quantile);

    RepRecord& rr = recs[static_cast<std::size_t>(rep)];
    rr.rep = rep + 1;
    rr.h_true = slot.h_true;
    rr.b_n = st.b_n;
    rr.z_n = st.z_n;
    rr.t_n = st.t_n;
    rr.clt_reject = (!st.v_degenerate && st.t_n > z1ma) ? 1 : 0;
    degen[static_cast<std::size_t>(rep)] = st.v_degenerate ? 1 : 0;

    std::uint64_t test_stream =
        substream(cell_stream, 2ull * static_cast<std::uint64_t>(rep) + 1ull);
    DayResampleInput in = st.resample_input();

    BootstrapConfig bg;
    bg.B = cfg.bootstrap_b;
    bg.kind = ExternalKind::gaussian;
    bg.alpha = alpha_eff;
    BootstrapRun rg = run_bootstrap(in, bg, cfg.seed, substream(test_stream, 0));
    rr.z_gaussian_reject = st.z_n > rg.z_quantile ? 1 : 0;
    rr.t_gaussian_reject =
        (!st.v_degenerate && !rg.t_star.empty() && st.t_n > rg.t_quantile) ? 1 : 0;

    BootstrapConfig bm = bg;
    bm.kind = ExternalKind::mammen;
    BootstrapRun rm = run_bootstrap(in, bm, cfg.seed, substream(test_stream, 1));
    rr.z_mammen_reject = st.z_n > rm.z_quantile ? 1 : 0;
    rr.t_mammen_reject =
        (!st.v_degenerate && !rm.t_star.empty() && st.t_n > rm.t_quantile) ? 1 : 0;

    HIndexEstimate h = h_index_hat(st, work.r, cfg.q);
    rr.h_hat = h.h_hat;
    rr.noise_prop = noise_proportion(st, robust_noise_variance(work.r, cfg.q));
  });

  CellResult res;
  res.cell = cell;
  res.replications = R;
  res.bootstrap_b = cfg.bootstrap_b;
  double sum_clt = 0, sum_zg = 0, sum_zm = 0, sum_tg = 0, sum_tm = 0;
  double sum_b = 0, sum_ht = 0, sum_hh = 0;
  int n_hh = 0;
  for (int i = 0; i < R; ++i) {
    const RepRecord& rr = recs[static_cast<std::size_t>(i)];
    sum_clt += rr.clt_reject;
    sum_zg += rr.z_gaussian_reject;
    sum_zm += rr.z_mammen_reject;
    sum_tg += rr.t_gaussian_reject;
    sum_tm += rr.t_mammen_reject;
    sum_b += rr.b_n;
    sum_ht += rr.h_true;
    if (std::isfinite(rr.h_hat)) {
      sum_hh += rr.h_hat;
      ++n_hh;
    }
    res.v_degenerate_count += degen[static_cast<std::size_t>(i)];
  }
  res.rate_clt = 100.0 * sum_clt / R;
  res.rate_z_gaussian = 100.0 * sum_zg / R;
  res.rate_z_mammen = 100.0 * sum_zm / R;
  res.rate_t_gaussian = 100.0 * sum_tg / R;
  res.rate_t_mammen = 100.0 * sum_tm / R;
  res.avg_block = sum_b / R;
  res.mean_h_true = sum_ht / R;
  res.mean_h_hat = n_hh > 0 ? sum_hh / n_hh : std::numeric_limits<double>::quiet_NaN();
  res.reps = std::move(recs);
  return res;
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_day_outcomes_csv(const std::vector<DayOutcome>& rows, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "date,n,k_n,theta_eff,b_n,bv11,bv22,truncated_pairs,z_n,v_check,t_n,"
         "v_degenerate,clt_pvalue,clt_reject,z_quantile,z_reject,t_quantile,t_reject,"
         "dropped,t_unreliable,omega2_hat,noise_proportion,h_hat,h_degenerate\n";
  for (const auto& o : rows) {
    out << o.date << ',' << o.n << ',' << o.k_n << ',' << fmt17(o.theta_eff) << ',' << o.b_n
        << ',' << fmt17(o.bv11) << ',' << fmt17(o.bv22) << ',' << o.truncated_pairs << ','
        << fmt17(o.z_n) << ',' << fmt17(o.v_check) << ',' << fmt17(o.t_n) << ','
        << (o.v_degenerate ? 1 : 0) << ',' << fmt17(o.clt_pvalue) << ','
        << (o.clt_reject ? 1 : 0) << ',' << fmt17(o.z_quantile) << ',' << (o.z_reject ? 1 : 0)
        << ',' << fmt17(o.t_quantile) << ',' << (o.t_reject ? 1 : 0) << ',' << o.dropped << ','
        << (o.t_unreliable ? 1 : 0) << ',' << fmt17(o.omega2_hat) << ',' << fmt17(o.noise_prop)
        << ',' << fmt17(o.h_hat) << ',' << (o.h_degenerate ? 1 : 0) << '\n';
  }
}

namespace {

const char* hypothesis_name(bool under_null) { return under_null ? "null" : "alt"; }

}  // namespace

void write_cell_reports_csv(const std::vector<CellResult>& cells, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "n,theta,xi2,phi_ma,hypothesis,jumps,replications,bootstrap_b,"
         "clt_rate_pct,z_gaussian_rate_pct,z_mammen_rate_pct,t_gaussian_rate_pct,"
         "t_mammen_rate_pct,avg_block_length,mean_h_true,mean_h_hat,v_degenerate_count\n";
  for (const auto& c : cells) {
    out << c.cell.n << ',' << fmt17(c.cell.theta) << ',' << fmt17(c.cell.xi2) << ','
        << fmt17(c.cell.phi_ma) << ',' << hypothesis_name(c.cell.under_null) << ','
        << (c.cell.with_jumps ? 1 : 0) << ',' << c.replications << ',' << c.bootstrap_b << ','
        << fmt17(c.rate_clt) << ',' << fmt17(c.rate_z_gaussian) << ',' << fmt17(c.rate_z_mammen)
        << ',' << fmt17(c.rate_t_gaussian) << ',' << fmt17(c.rate_t_mammen) << ','
        << fmt17(c.avg_block) << ',' << fmt17(c.mean_h_true) << ',' << fmt17(c.mean_h_hat)
        << ',' << c.v_degenerate_count << '\n';
  }
}

void write_scatter_csv(const std::vector<CellResult>& cells, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "n,theta,xi2,phi_ma,hypothesis,rep,h_true,h_hat,b_n,clt_reject,"
         "z_gaussian_reject,z_mammen_reject,t_gaussian_reject,t_mammen_reject,"
         "noise_proportion,z_stat,t_stat\n";
  for (const auto& c : cells) {
    for (const auto& rr : c.reps) {
      out << c.cell.n << ',' << fmt17(c.cell.theta) << ',' << fmt17(c.cell.xi2) << ','
          << fmt17(c.cell.phi_ma) << ',' << hypothesis_name(c.cell.under_null) << ',' << rr.rep
          << ',' << fmt17(rr.h_true) << ',' << fmt17(rr.h_hat) << ',' << rr.b_n << ','
          << rr.clt_reject << ',' << rr.z_gaussian_reject << ',' << rr.z_mammen_reject << ','
          << rr.t_gaussian_reject << ',' << rr.t_mammen_reject << ',' << fmt17(rr.noise_prop)
          << ',' << fmt17(rr.z_n) << ',' << fmt17(rr.t_n) << '\n';
    }
  }
}

std::vector<SummaryRow> summarize_scatter(const std::string& scatter_path) {
  std::ifstream in(scatter_path);
  if (!in) throw data_error("cannot open " + scatter_path);
  std::string line;
  if (!std::getline(in, line)) throw data_error(scatter_path + ": empty file");
  std::vector<std::string> header = split_fields(trim(line));
  const std::vector<std::string> expected = {
      "n", "theta", "xi2", "phi_ma", "hypothesis", "rep", "h_true", "h_hat", "b_n",
      "clt_reject", "z_gaussian_reject", "z_mammen_reject", "t_gaussian_reject",
      "t_mammen_reject", "noise_proportion", "z_stat", "t_stat"};
  if (header != expected)
    throw data_error(scatter_path + ":1: unexpected header for a scatter file");

  struct Group {
    CellSpec cell;
    std::vector<double> h_hat, ratio;
    double sum_clt = 0, sum_zg = 0, sum_zm = 0, sum_tg = 0, sum_tm = 0, sum_b = 0;
    int count = 0;
  };
  std::vector<Group> groups;
  std::map<std::string, std::size_t> order;

  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::vector<std::string> f = split_fields(line);
    if (f.size() != expected.size())
      throw data_error(scatter_path + ":" + std::to_string(line_no) + ": expected " +
                       std::to_string(expected.size()) + " fields");
    CellSpec cell;
    cell.n = static_cast<int>(parse_long(f[0], scatter_path, line_no));
    cell.theta = parse_double(f[1], scatter_path, line_no);
    cell.xi2 = parse_double(f[2], scatter_path, line_no);
    cell.phi_ma = parse_double(f[3], scatter_path, line_no);
    std::string hyp = trim(f[4]);
    if (hyp != "null" && hyp != "alt")
      throw data_error(scatter_path + ":" + std::to_string(line_no) +
                       ": hypothesis must be 'null' or 'alt'");
    cell.under_null = hyp == "null";

    std::string key = f[0] + "|" + f[1] + "|" + f[2] + "|" + f[3] + "|" + hyp;
    auto it = order.find(key);
    std::size_t gi;
    if (it == order.end()) {
      gi = groups.size();
      order.emplace(key, gi);
      groups.push_back(Group{});
      groups.back().cell = cell;
    } else {
      gi = it->second;
    }
    Group& g = groups[gi];
    double h_true = parse_double(f[6], scatter_path, line_no);
    double h_hat = parse_double(f[7], scatter_path, line_no);
    g.h_hat.push_back(h_hat);
    if (h_true > 0.0 && std::isfinite(h_hat)) g.ratio.push_back(h_hat / h_true);
    g.sum_b += parse_double(f[8], scatter_path, line_no);
    g.sum_clt += parse_double(f[9], scatter_path, line_no);
    g.sum_zg += parse_double(f[10], scatter_path, line_no);
    g.sum_zm += parse_double(f[11], scatter_path, line_no);
    g.sum_tg += parse_double(f[12], scatter_path, line_no);
    g.sum_tm += parse_double(f[13], scatter_path, line_no);
    ++g.count;
  }

  std::vector<SummaryRow> rows;
  rows.reserve(groups.size());
  for (const auto& g : groups) {
    if (g.count == 0) continue;
    SummaryRow r;
    r.cell = g.cell;
    r.replications = g.count;
    r.rate_clt = 100.0 * g.sum_clt / g.count;
    r.rate_z_gaussian = 100.0 * g.sum_zg / g.count;
    r.rate_z_mammen = 100.0 * g.sum_zm / g.count;
    r.rate_t_gaussian = 100.0 * g.sum_tg / g.count;
    r.rate_t_mammen = 100.0 * g.sum_tm / g.count;
    r.avg_block = g.sum_b / g.count;
    r.h_hat_q25 = interp_quantile(g.h_hat, 0.25);
    r.h_hat_median = interp_quantile(g.h_hat, 0.5);
    r.h_hat_q75 = interp_quantile(g.h_hat, 0.75);
    r.ratio_median = interp_quantile(g.ratio, 0.5);
    rows.push_back(std::move(r));
  }
  return rows;
}

void write_summary_csv(const std::vector<SummaryRow>& rows, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "n,theta,xi2,phi_ma,hypothesis,replications,clt_rate_pct,z_gaussian_rate_pct,"
         "z_mammen_rate_pct,t_gaussian_rate_pct,t_mammen_rate_pct,avg_block_length,"
         "h_hat_q25,h_hat_median,h_hat_q75,ratio_median\n";
  for (const auto& r : rows) {
    out << r.cell.n << ',' << fmt17(r.cell.theta) << ',' << fmt17(r.cell.xi2) << ','
        << fmt17(r.cell.phi_ma) << ',' << hypothesis_name(r.cell.under_null) << ','
        << r.replications << ',' << fmt17(r.rate_clt) << ',' << fmt17(r.rate_z_gaussian) << ','
        << fmt17(r.rate_z_mammen) << ',' << fmt17(r.rate_t_gaussian) << ','
        << fmt17(r.rate_t_mammen) << ',' << fmt17(r.avg_block) << ',' << fmt17(r.h_hat_q25)
        << ',' << fmt17(r.h_hat_median) << ',' << fmt17(r.h_hat_q75) << ','
        << fmt17(r.ratio_median) << '\n';
  }
}

}  // namespace divolt
