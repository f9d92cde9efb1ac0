#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "divolt/bipower.hpp"
#include "divolt/rng.hpp"

namespace divolt {

// External resampling variables; both have mean 0 and variance 1/2.
enum class ExternalKind { gaussian, mammen };

ExternalKind external_kind_from_string(const std::string& s);
const char* to_string(ExternalKind kind);

double external_draw(Rng& rng, ExternalKind kind);
double external_mean(ExternalKind kind);
double external_variance(ExternalKind kind);
double external_second_moment(ExternalKind kind);

struct Mat2Sym {
  double a11 = 0.0;  // (2,2)-(2,2) component
  double a12 = 0.0;  // (2,2)-(1,1) component
  double a22 = 0.0;  // (1,1)-(1,1) component
};

// Means of y over sliding windows of width b: out[j] = mean(y[j..j+b-1]).
std::vector<double> block_means(const std::vector<double>& y, int b);

// Scaled differences of non-adjacent block sums:
// d[j] = scale * (sum y[j+b..j+2b-1] - sum y[j..j+b-1]), j = 0..J-1 with
// J = N - 2b + 1. These are the increments the wild bootstrap perturbs.
std::vector<double> block_diffs(const std::vector<double>& y, int b, double scale);

// Asymptotic covariance estimate: (J/N) * (sqrt(n)/(2b)) * sum_j xi_j xi_j'
// with xi_j = (d22[j], d11[j]) and J/N the share of block positions that
// contribute a difference.
Mat2Sym sigma_check(const std::vector<double>& d22, const std::vector<double>& d11,
                    int n, int b);

// Diagnostics from block-length selection.
struct BlockDiagnostics {
  std::vector<int> candidates;
  std::vector<double> v_candidates;
  int chosen_index = -1;
  bool degenerate = false;
};

// Minimum-volatility rule over 31 candidates spanning
// [2 n^{2/3}, min(3 n^{2/3}, N/2)], lower-clamped at 2 k_n: pick the candidate
// whose +-2 neighborhood of V values has the smallest variance (ties to the
// smallest block). Returns the chosen block length.
int select_block_size(const std::vector<double>& y22, const std::vector<double>& y11,
                      int n, int k_n, double scale22, double scale11, double bv11,
                      BlockDiagnostics* diag = nullptr);

struct BootstrapConfig {
  int B = 199;
  ExternalKind kind = ExternalKind::mammen;
  double alpha = 0.05;
};

struct BootstrapRun {
  std::vector<double> z_star;       // B centered resample statistics
  std::vector<double> t_star;       // studentized values from kept resamples
  int dropped = 0;                  // resamples with non-positive variance
  bool t_unreliable = false;        // more than 10% dropped
  double z_quantile = 0.0;
  double t_quantile = 0.0;
};

// Inputs the resampler needs from a processed day.
struct DayResampleInput {
  int n = 0;
  int b = 0;
  double bv22 = 0.0;
  double bv11 = 0.0;
  const std::vector<double>* d22 = nullptr;
  const std::vector<double>* d11 = nullptr;
};

// Resampled covariance matrix from one u realization:
// (J/N) * (sqrt(n)/b) * (var*(u)/E*(u^2)) * sum_j u_j^2 xi_j xi_j^T.
// Conditionally unbiased for sigma_check's estimate since E*(u^2) cancels.
Mat2Sym sigma_star(const std::vector<double>& d22, const std::vector<double>& d11,
                   const std::vector<double>& u, int n, int b, ExternalKind kind);

// One joint resample: the perturbed bipower pair and the covariance matrix
// built from the same u draws.
struct ResampleDraw {
  double bv22_star = 0.0;
  double bv11_star = 0.0;
  Mat2Sym sigma_star;
};

// Wild blocks-of-blocks resampling with joint draws (one u vector perturbs
// both power pairs). Each resample r derives its own stream
// substream(stream_base, r) so the run is reproducible under any threading.
BootstrapRun run_bootstrap(const DayResampleInput& day, const BootstrapConfig& cfg,
                           std::uint64_t key, std::uint64_t stream_base);

// The B perturbed pairs behind run_bootstrap, same streams and arithmetic;
// exposes the raw draws for diagnostics and unbiasedness checks.
std::vector<ResampleDraw> bootstrap_pairs(const DayResampleInput& day,
                                          const BootstrapConfig& cfg,
                                          std::uint64_t key, std::uint64_t stream_base);

// Debug-fidelity generator: regime-by-regime centered resampled products
// y*_m - grand_mean for m = 1..N, given u with J+1 entries. The aggregate
// matches the fast path used by run_bootstrap exactly.
std::vector<double> resample_centered_products(const std::vector<double>& y, int b,
                                               const std::vector<double>& u);

// Order statistic index ceil((1-alpha)(B+1)) for upper percentile tests.
int percentile_rank(int B, double alpha);

}  // namespace divolt
