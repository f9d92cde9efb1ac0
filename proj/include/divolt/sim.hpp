#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "divolt/diurnal.hpp"
#include "divolt/preavg.hpp"
#include "divolt/rng.hpp"

namespace divolt {

struct SimConfig {
  int n = 4680;                 // observed returns per day
  int seconds_per_day = 23400;  // Euler steps per day (must be divisible by n)

  bool under_null = false;      // freeze the stochastic factor at its RMS level
  bool flat_diurnal = false;    // disable the deterministic intraday shape

  bool with_jumps = false;
  double jump_share = 0.25;     // E[jump QV] / E[diffusive IV]
  // Exponential tempering rate of the jump-size law, in log-price units.
  double lambda_temper = 3.0;
  double beta_stable = 0.5;     // stable index (one-sided, each side)

  double xi2 = 0.001;           // noise-to-signal ratio
  double phi_ma = -0.5;         // MA(1) coefficient of the observation noise
  bool noise_on_expected_iq = false;  // scale noise by expected, not realized, IQ

  // Deterministic U-shape sigma_u(t) = C + A exp(-a1 t) + B exp(-a2 (1-t)).
  double shape_a = 0.75;
  double shape_b = 0.25;
  double shape_c = 0.88929198;
  double shape_a1 = 10.0;
  double shape_a2 = 10.0;

  // Two-factor log-volatility, day-time dynamics, annual vol units.
  double beta0 = -1.2;
  double beta1 = 0.04;
  double beta2 = 1.5;
  double alpha1 = -0.00137;
  double alpha2 = -1.386;
  double phi_factor = 0.25;     // multiplicative noise in the fast factor
  double rho1 = -0.3;
  double rho2 = -0.3;
  double drift_per_year = 0.03;
  double days_per_year = 250.0;

  // Length of one trading session on the factor clock. 0.2 reproduces the
  // published heterogeneity statistics of this two-factor calibration
  // (mean H ~ 0.20, P(H < 0.1) ~ 20%, H < 0.05 rare); a session read as a
  // full factor-clock day would give mean H ~ 0.45 instead.
  double session_fraction = 0.2;

  std::uint64_t seed = 12345;
};

struct PathBundle {
  std::vector<double> x;          // efficient log price, seconds grid (S+1)
  std::vector<double> y;          // noisy log price at the n-grid (n+1)
  std::vector<double> sigma_sv2;  // spot factor variance per step (annual units)
  std::vector<double> sigma_u;    // diurnal factor per step
  double true_iv = 0.0;           // integrated diffusive variance (day units)
  double true_iq = 0.0;           // integrated quarticity (day units)
  double qv_jump = 0.0;           // sum of squared jump increments
  double omega2 = 0.0;            // realized noise variance level
  double true_h = 0.0;            // heterogeneity index of the factor path

  ReturnGrid observed_returns(const std::string& date) const;
};

// Spliced exponential: exp(x) below x0 = log(1.5), continuous square-root
// growth above, taming the lognormal tail.
double s_exp(double x);

// Unit one-sided stable draw with Laplace transform exp(-s^beta), 0<beta<1.
double kanter_stable(double beta, Rng& rng);

// Increment of a one-sided tempered stable subordinator whose stable part has
// scale `stable_scale`, via exponential-tilting acceptance sampling.
double tempered_stable_increment(double stable_scale, double beta, double lambda,
                                 Rng& rng);

class Simulator {
 public:
  explicit Simulator(const SimConfig& cfg);

  // One trading day; streams for factors, jumps, and noise are derived from
  // day_stream, so day i is reproducible in isolation.
  PathBundle simulate_day(std::uint64_t day_stream) const;

  double diurnal_factor(double t) const;
  double integral_sigma_u2() const;  // closed form, ~1 by calibration
  double integral_sigma_u4() const;
  DiurnalProfile true_profile(int m) const;

  double sigma2_bar() const { return sigma2_bar_; }
  double sigma4_bar() const { return sigma4_bar_; }
  double jump_c() const { return jump_c_; }
  double expected_iv_day() const;
  double expected_iq_day() const;
  const SimConfig& config() const { return cfg_; }

 private:
  void run_pilot();

  SimConfig cfg_;
  double sigma2_bar_ = 0.0;
  double sigma4_bar_ = 0.0;
  double int_su2_ = 1.0;
  double int_su4_ = 1.0;
  double jump_c_ = 0.0;
  double stable_scale_ = 0.0;  // per-step scale of the stable part
  double lambda_eff_ = 0.0;    // tempering rate in log-price units
};

}  // namespace divolt
