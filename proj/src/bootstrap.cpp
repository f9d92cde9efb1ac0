#include "divolt/bootstrap.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "divolt/kernels.hpp"
#include "divolt/mathutil.hpp"
#include "divolt/teststat.hpp"

namespace divolt {

ExternalKind external_kind_from_string(const std::string& s) {
  if (s == "gaussian") return ExternalKind::gaussian;
  if (s == "mammen") return ExternalKind::mammen;
  throw std::invalid_argument("unknown external kind: " + s);
}

const char* to_string(ExternalKind kind) {
  return kind == ExternalKind::gaussian ? "gaussian" : "mammen";
}

namespace {

const double kMammenLo = (1.0 - std::sqrt(5.0)) / (2.0 * std::sqrt(2.0));
const double kMammenHi = (1.0 + std::sqrt(5.0)) / (2.0 * std::sqrt(2.0));
const double kMammenP = (std::sqrt(5.0) + 1.0) / (2.0 * std::sqrt(5.0));

}  // namespace

double external_draw(Rng& rng, ExternalKind kind) {
  if (kind == ExternalKind::gaussian) return rng.next_normal() * M_SQRT1_2;
  return rng.next_uniform() < kMammenP ? kMammenLo : kMammenHi;
}

double external_mean(ExternalKind) { return 0.0; }
double external_variance(ExternalKind) { return 0.5; }
double external_second_moment(ExternalKind) { return 0.5; }

std::vector<double> block_means(const std::vector<double>& y, int b) {
  const int N = static_cast<int>(y.size());
  if (b < 1 || b > N) throw std::invalid_argument("block_means: bad block length");
  std::vector<double> out(static_cast<std::size_t>(N - b + 1));
  double s = 0.0;
  for (int i = 0; i < b; ++i) s += y[static_cast<std::size_t>(i)];
  out[0] = s / b;
  for (int j = 1; j + b <= N; ++j) {
    s += y[static_cast<std::size_t>(j + b - 1)] - y[static_cast<std::size_t>(j - 1)];
    out[static_cast<std::size_t>(j)] = s / b;
  }
  return out;
}

std::vector<double> block_diffs(const std::vector<double>& y, int b, double scale) {
  const int N = static_cast<int>(y.size());
  if (b < 1 || 2 * b > N) throw std::invalid_argument("block_diffs: bad block length");
  std::vector<double> prefix(static_cast<std::size_t>(N + 1), 0.0);
  for (int i = 0; i < N; ++i) prefix[static_cast<std::size_t>(i + 1)] = prefix[static_cast<std::size_t>(i)] + y[static_cast<std::size_t>(i)];
  const int J = N - 2 * b + 1;
  std::vector<double> d(static_cast<std::size_t>(J));
  for (int j = 0; j < J; ++j) {
    d[static_cast<std::size_t>(j)] =
        scale * (prefix[static_cast<std::size_t>(j + 2 * b)] -
                 2.0 * prefix[static_cast<std::size_t>(j + b)] +
                 prefix[static_cast<std::size_t>(j)]);
  }
  return d;
}

Mat2Sym sigma_check(const std::vector<double>& d22, const std::vector<double>& d11,
                    int n, int b) {
  if (d22.size() != d11.size() || d22.empty()) {
    throw std::invalid_argument("sigma_check: mismatched block differences");
  }
  double acc[3];
  kern::active().outer2(d22.data(), d11.data(), d22.size(), acc);
  // Only J = N - 2b + 1 of the N block positions contribute a difference, so
  // the raw sum covers a J/N share of the series; keep that finite-sample
  // coverage factor (-> 1 as b/N -> 0) in the estimate instead of scaling it
  // away, so the variance matrix reflects the information actually used.
  const int J = static_cast<int>(d22.size());
  const int n_products = J + 2 * b - 1;
  const double coverage = static_cast<double>(J) / n_products;
  const double f = coverage * std::sqrt(static_cast<double>(n)) / (2.0 * b);
  return Mat2Sym{f * acc[0], f * acc[1], f * acc[2]};
}

int select_block_size(const std::vector<double>& y22, const std::vector<double>& y11,
                      int n, int k_n, double scale22, double scale11, double bv11,
                      BlockDiagnostics* diag) {
  const int N = static_cast<int>(y22.size());
  if (y11.size() != y22.size() || N < 4) {
    throw std::invalid_argument("select_block_size: bad product vectors");
  }
  const double nd = std::pow(static_cast<double>(n), 2.0 / 3.0);
  const int half = N / 2;
  int bmin = static_cast<int>(std::floor(2.0 * nd));
  const int bmax = static_cast<int>(std::floor(std::min(3.0 * nd, N / 2.0)));
  if (bmin < 2 * k_n) bmin = 2 * k_n;
  if (bmin < 2) bmin = 2;

  if (bmin >= bmax) {
    int b = static_cast<int>(std::floor(2.0 * nd));
    if (b < 2 * k_n) b = 2 * k_n;
    if (b > half) b = half;
    if (b < 1) b = 1;
    if (diag != nullptr) {
      diag->candidates = {b};
      diag->v_candidates = {0.0};
      diag->chosen_index = 0;
      diag->degenerate = true;
    }
    return b;
  }

  constexpr int kGridPoints = 31;
  std::vector<int> cand(kGridPoints);
  std::vector<double> v(kGridPoints);
  for (int i = 0; i < kGridPoints; ++i) {
    cand[static_cast<std::size_t>(i)] = static_cast<int>(
        std::lround(bmin + i * (bmax - bmin) / static_cast<double>(kGridPoints - 1)));
  }
  for (int i = 0; i < kGridPoints; ++i) {
    const int b = cand[static_cast<std::size_t>(i)];
    const std::vector<double> d22 = block_diffs(y22, b, scale22);
    const std::vector<double> d11 = block_diffs(y11, b, scale11);
    const Mat2Sym s = sigma_check(d22, d11, n, b);
    v[static_cast<std::size_t>(i)] = v_check_form(s, bv11, 2, 2, 1, 1);
  }

  int best = 0;
  double best_var = std::numeric_limits<double>::infinity();
  for (int i = 0; i < kGridPoints; ++i) {
    const int lo = i - 2 < 0 ? 0 : i - 2;
    const int hi = i + 2 > kGridPoints - 1 ? kGridPoints - 1 : i + 2;
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
  if (diag != nullptr) {
    diag->candidates = cand;
    diag->v_candidates = v;
    diag->chosen_index = best;
    diag->degenerate = false;
  }
  return cand[static_cast<std::size_t>(best)];
}

int percentile_rank(int B, double alpha) {
  if (B < 1 || !(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("percentile_rank: bad arguments");
  }
  int k = static_cast<int>(std::ceil((1.0 - alpha) * (B + 1) - 1e-9));
  if (k < 1) k = 1;
  if (k > B) k = B;
  return k;
}

Mat2Sym sigma_star(const std::vector<double>& d22, const std::vector<double>& d11,
                   const std::vector<double>& u, int n, int b, ExternalKind kind) {
  const std::size_t J = d22.size();
  if (d11.size() != J || u.size() != J || J == 0) {
    throw std::invalid_argument("sigma_star: mismatched inputs");
  }
  const int n_products = static_cast<int>(J) + 2 * b - 1;
  const double moment_ratio = external_variance(kind) / external_second_moment(kind);
  // Same J/N coverage factor as sigma_check, so the resampled variance matrix
  // stays conditionally unbiased for the sample one.
  const double f = (static_cast<double>(J) / n_products) *
                   std::sqrt(static_cast<double>(n)) / b * moment_ratio;
  double w[3];
  kern::active().weighted_outer2(u.data(), d22.data(), d11.data(), J, w);
  return Mat2Sym{f * w[0], f * w[1], f * w[2]};
}

namespace {

void check_resample_input(const DayResampleInput& day, const BootstrapConfig& cfg) {
  if (day.d22 == nullptr || day.d11 == nullptr || day.d22->size() != day.d11->size() ||
      day.d22->empty()) {
    throw std::invalid_argument("run_bootstrap: missing block differences");
  }
  if (cfg.B < 1) throw std::invalid_argument("run_bootstrap: need B >= 1");
  if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) {
    throw std::invalid_argument("run_bootstrap: need alpha in (0,1)");
  }
}

// Only J = N - 2b + 1 block differences exist for N products, so the raw
// perturbation sum underestimates the sampling variance by J/N in finite
// samples.  Rescale the draws by sqrt(N/J) (-> 1 as b/N -> 0) so that the
// resampled statistic reproduces the dispersion of the full series.
double draw_scale(std::size_t J, int b) {
  const int n_products = static_cast<int>(J) + 2 * b - 1;
  const double kappa = std::sqrt(static_cast<double>(n_products) / static_cast<double>(J));
  return kappa / std::sqrt(static_cast<double>(b));
}

ResampleDraw resample_once(const DayResampleInput& day, ExternalKind kind,
                           double inv_sqrt_b, std::uint64_t key,
                           std::uint64_t stream, std::vector<double>& u) {
  const std::vector<double>& d22 = *day.d22;
  const std::vector<double>& d11 = *day.d11;
  const std::size_t J = d22.size();
  Rng rng(key, stream);
  for (std::size_t j = 0; j < J; ++j) u[j] = external_draw(rng, kind);
  const double s22 = kern::active().dot(u.data(), d22.data(), J);
  const double s11 = kern::active().dot(u.data(), d11.data(), J);
  ResampleDraw draw;
  draw.bv22_star = day.bv22 - inv_sqrt_b * s22;
  draw.bv11_star = day.bv11 - inv_sqrt_b * s11;
  draw.sigma_star = sigma_star(d22, d11, u, day.n, day.b, kind);
  return draw;
}

}  // namespace

BootstrapRun run_bootstrap(const DayResampleInput& day, const BootstrapConfig& cfg,
                           std::uint64_t key, std::uint64_t stream_base) {
  check_resample_input(day, cfg);
  const std::size_t J = day.d22->size();
  const double inv_sqrt_b = draw_scale(J, day.b);
  const double n4 = std::pow(static_cast<double>(day.n), 0.25);
  const double center = day.bv22 - day.bv11 * day.bv11;

  BootstrapRun run;
  run.z_star.reserve(static_cast<std::size_t>(cfg.B));
  run.t_star.reserve(static_cast<std::size_t>(cfg.B));
  std::vector<double> u(J);
  for (int r = 0; r < cfg.B; ++r) {
    const ResampleDraw draw = resample_once(
        day, cfg.kind, inv_sqrt_b, key,
        substream(stream_base, static_cast<std::uint64_t>(r)), u);
    const double z =
        n4 * (draw.bv22_star - draw.bv11_star * draw.bv11_star - center);
    const double v_star = v_check_form(draw.sigma_star, day.bv11, 2, 2, 1, 1);
    run.z_star.push_back(z);
    if (v_star > 0.0) {
      run.t_star.push_back(z / std::sqrt(v_star));
    } else {
      ++run.dropped;
    }
  }

  run.z_quantile = order_statistic(run.z_star,
                                   static_cast<std::size_t>(percentile_rank(cfg.B, cfg.alpha)));
  const int kept = static_cast<int>(run.t_star.size());
  if (kept >= 1) {
    run.t_quantile = order_statistic(run.t_star,
                                     static_cast<std::size_t>(percentile_rank(kept, cfg.alpha)));
  } else {
    run.t_quantile = std::numeric_limits<double>::quiet_NaN();
  }
  run.t_unreliable = run.dropped > cfg.B / 10.0;
  return run;
}

std::vector<ResampleDraw> bootstrap_pairs(const DayResampleInput& day,
                                          const BootstrapConfig& cfg,
                                          std::uint64_t key, std::uint64_t stream_base) {
  check_resample_input(day, cfg);
  const std::size_t J = day.d22->size();
  const double inv_sqrt_b = draw_scale(J, day.b);
  std::vector<ResampleDraw> draws;
  draws.reserve(static_cast<std::size_t>(cfg.B));
  std::vector<double> u(J);
  for (int r = 0; r < cfg.B; ++r) {
    draws.push_back(resample_once(day, cfg.kind, inv_sqrt_b, key,
                                  substream(stream_base, static_cast<std::uint64_t>(r)),
                                  u));
  }
  return draws;
}

std::vector<double> resample_centered_products(const std::vector<double>& y, int b,
                                               const std::vector<double>& u) {
  const int N = static_cast<int>(y.size());
  const int J = N - 2 * b + 1;
  if (b < 1 || J < 1) throw std::invalid_argument("resample_centered_products: bad block length");
  if (3 * b > N + 2) {
    throw std::invalid_argument("resample_centered_products: blocks overlap both edges");
  }
  if (static_cast<int>(u.size()) != J + 1) {
    throw std::invalid_argument("resample_centered_products: need J+1 external draws");
  }
  const std::vector<double> bm = block_means(y, b);
  // Same finite-sample rescaling as the summed form in run_bootstrap.
  const double kappa = std::sqrt(static_cast<double>(N) / static_cast<double>(J));
  const double inv_sqrt_b = kappa / std::sqrt(static_cast<double>(b));
  std::vector<double> out(static_cast<std::size_t>(N));
  for (int m = 1; m <= N; ++m) {
    const double ym = y[static_cast<std::size_t>(m - 1)];
    double acc = 0.0;
    if (m <= b - 1) {
      for (int j = 1; j <= m; ++j) {
        acc += (ym - bm[static_cast<std::size_t>(b + j - 1)]) * u[static_cast<std::size_t>(j - 1)];
      }
    } else if (m <= J) {
      for (int j = 1; j <= b; ++j) {
        acc += (ym - bm[static_cast<std::size_t>(m + j - 1)]) *
               u[static_cast<std::size_t>(m + j - b - 1)];
      }
    } else if (m <= N - b) {
      for (int j = 1; j <= N - b + 1 - m; ++j) {
        acc += (ym - bm[static_cast<std::size_t>(J + b - j)]) *
               u[static_cast<std::size_t>(J - j)];
      }
    } else {
      acc = (ym - bm[static_cast<std::size_t>(N - b)]) * u[static_cast<std::size_t>(J)];
    }
    out[static_cast<std::size_t>(m - 1)] = inv_sqrt_b * acc;
  }
  return out;
}

}  // namespace divolt
