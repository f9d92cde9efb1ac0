#include "divolt/sim.hpp"

#include <cmath>
#include <stdexcept>

#include "divolt/mathutil.hpp"
#include "divolt/teststat.hpp"

namespace divolt {

ReturnGrid PathBundle::observed_returns(const std::string& date) const {
  ReturnGrid g;
  g.date = date;
  g.r.resize(y.size() - 1);
  for (std::size_t i = 0; i + 1 < y.size(); ++i) g.r[i] = y[i + 1] - y[i];
  return g;
}

double s_exp(double x) {
  static const double x0 = std::log(1.5);
  if (x <= x0) return std::exp(x);
  return std::exp(x0) * std::sqrt((x0 - x0 * x0 + x * x) / x0);
}

double kanter_stable(double beta, Rng& rng) {
  const double u = rng.next_uniform() * M_PI;
  const double e = -std::log(rng.next_uniform());
  const double a = std::pow(std::sin(beta * u), beta / (1.0 - beta)) *
                   std::sin((1.0 - beta) * u) /
                   std::pow(std::sin(u), 1.0 / (1.0 - beta));
  return std::pow(a / e, (1.0 - beta) / beta);
}

double tempered_stable_increment(double stable_scale, double beta, double lambda,
                                 Rng& rng) {
  if (stable_scale <= 0.0) return 0.0;
  for (;;) {
    const double s = stable_scale * kanter_stable(beta, rng);
    if (rng.next_uniform() <= std::exp(-lambda * s)) return s;
  }
}

namespace {

constexpr std::uint64_t kPilotTag = 0xD1A1ULL;
constexpr int kPilotDays = 2600;
constexpr int kPilotStepsPerDay = 390;

void validate(const SimConfig& c) {
  if (c.n < 1) throw std::invalid_argument("SimConfig: need n >= 1");
  if (c.seconds_per_day < c.n || c.seconds_per_day % c.n != 0) {
    throw std::invalid_argument("SimConfig: seconds_per_day must be a multiple of n");
  }
  if (!(c.beta_stable > 0.0 && c.beta_stable < 1.0)) {
    throw std::invalid_argument("SimConfig: need beta_stable in (0,1)");
  }
  if (!(c.lambda_temper > 0.0)) throw std::invalid_argument("SimConfig: need lambda_temper > 0");
  if (!(c.jump_share >= 0.0)) throw std::invalid_argument("SimConfig: need jump_share >= 0");
  if (!(c.xi2 >= 0.0)) throw std::invalid_argument("SimConfig: need xi2 >= 0");
  if (!(c.days_per_year > 0.0)) throw std::invalid_argument("SimConfig: need days_per_year > 0");
  if (!(c.alpha1 < 0.0 && c.alpha2 < 0.0)) {
    throw std::invalid_argument("SimConfig: factor mean reversion must be negative");
  }
  if (!(c.rho1 * c.rho1 + c.rho2 * c.rho2 <= 1.0)) {
    throw std::invalid_argument("SimConfig: leverage correlations exceed unit norm");
  }
  if (!(c.shape_a1 > 0.0 && c.shape_a2 > 0.0)) {
    throw std::invalid_argument("SimConfig: shape decay rates must be positive");
  }
  if (!(c.session_fraction > 0.0)) {
    throw std::invalid_argument("SimConfig: need session_fraction > 0");
  }
}

}  // namespace

Simulator::Simulator(const SimConfig& cfg) : cfg_(cfg) {
  validate(cfg_);
  if (!cfg_.flat_diurnal) {
    int_su2_ = integral_sigma_u2();
    int_su4_ = integral_sigma_u4();
  }
  run_pilot();
  if (cfg_.with_jumps) {
    const double b = cfg_.beta_stable;
    jump_c_ = cfg_.jump_share * expected_iv_day() *
              std::pow(cfg_.lambda_temper, 2.0 - b) / (2.0 * std::tgamma(2.0 - b));
    const double dt = 1.0 / cfg_.seconds_per_day;
    stable_scale_ = std::pow(dt * jump_c_ * std::tgamma(1.0 - b) / b, 1.0 / b);
  }
}

double Simulator::diurnal_factor(double t) const {
  if (cfg_.flat_diurnal) return 1.0;
  return cfg_.shape_c + cfg_.shape_a * std::exp(-cfg_.shape_a1 * t) +
         cfg_.shape_b * std::exp(-cfg_.shape_a2 * (1.0 - t));
}

double Simulator::integral_sigma_u2() const {
  if (cfg_.flat_diurnal) return 1.0;
  const double A = cfg_.shape_a, B = cfg_.shape_b, C = cfg_.shape_c;
  const double a1 = cfg_.shape_a1, a2 = cfg_.shape_a2;
  const auto single = [](double a) { return (1.0 - std::exp(-a)) / a; };
  const auto twice = [](double a) { return (1.0 - std::exp(-2.0 * a)) / (2.0 * a); };
  double cross;
  if (std::fabs(a1 - a2) < 1e-12) {
    cross = std::exp(-a1);
  } else {
    cross = std::exp(-a2) * (std::exp(a2 - a1) - 1.0) / (a2 - a1);
  }
  return C * C + A * A * twice(a1) + B * B * twice(a2) + 2.0 * C * A * single(a1) +
         2.0 * C * B * single(a2) + 2.0 * A * B * cross;
}

double Simulator::integral_sigma_u4() const {
  if (cfg_.flat_diurnal) return 1.0;
  // Simpson's rule on the smooth quartic integrand.
  const int segments = 20000;
  const double h = 1.0 / segments;
  double acc = 0.0;
  for (int i = 0; i <= segments; ++i) {
    const double su = diurnal_factor(i * h);
    const double f = su * su * su * su;
    const double w = (i == 0 || i == segments) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    acc += w * f;
  }
  return acc * h / 3.0;
}

DiurnalProfile Simulator::true_profile(int m) const {
  if (m < 1) throw std::invalid_argument("true_profile: need m >= 1");
  DiurnalProfile p;
  p.m = m;
  p.sigma2_u.resize(static_cast<std::size_t>(m));
  const int segments = 200;  // per-bin Simpson rule
  for (int j = 0; j < m; ++j) {
    const double lo = static_cast<double>(j) / m;
    const double h = 1.0 / (m * segments);
    double acc = 0.0;
    for (int i = 0; i <= segments; ++i) {
      const double su = diurnal_factor(lo + i * h);
      const double w = (i == 0 || i == segments) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
      acc += w * su * su;
    }
    p.sigma2_u[static_cast<std::size_t>(j)] = acc * h / 3.0 * m;
  }
  double mean = 0.0;
  for (double v : p.sigma2_u) mean += v;
  mean /= static_cast<double>(m);
  for (double& v : p.sigma2_u) v /= mean;
  return p;
}

double Simulator::expected_iv_day() const {
  return sigma2_bar_ * int_su2_ / cfg_.days_per_year;
}

double Simulator::expected_iq_day() const {
  return sigma4_bar_ * int_su4_ / (cfg_.days_per_year * cfg_.days_per_year);
}

void Simulator::run_pilot() {
  // Ensemble of pilot days with the day design's fresh slow-factor start.
  // The slow factor relaxes over hundreds of days, so its start dominates the
  // ensemble variance; stratifying the start draw (with uniform jitter to stay
  // unbiased) collapses that variance. Coarse steps are adequate here: the
  // weak Euler error at 1-minute resolution is far below the sampling noise.
  const double dt = cfg_.session_fraction / kPilotStepsPerDay;
  const double sqdt = std::sqrt(dt);
  const double sd1 = std::sqrt(-1.0 / (2.0 * cfg_.alpha1));
  const std::uint64_t base = substream(cfg_.seed, kPilotTag);
  double s2 = 0.0, s4 = 0.0;
  for (int d = 0; d < kPilotDays; ++d) {
    Rng rng(cfg_.seed, substream(base, static_cast<std::uint64_t>(d)));
    const double u = (d + rng.next_uniform()) / kPilotDays;
    double tau1 = sd1 * normal_quantile(u);
    double tau2 = 0.0;
    double day2 = 0.0, day4 = 0.0;
    for (int i = 0; i < kPilotStepsPerDay; ++i) {
      const double ssv = s_exp(cfg_.beta0 + cfg_.beta1 * tau1 + cfg_.beta2 * tau2);
      const double v = ssv * ssv;
      day2 += v;
      day4 += v * v;
      const double z1 = rng.next_normal();
      const double z2 = rng.next_normal();
      tau1 += cfg_.alpha1 * tau1 * dt + sqdt * z1;
      tau2 += cfg_.alpha2 * tau2 * dt + (1.0 + cfg_.phi_factor * tau2) * sqdt * z2;
    }
    s2 += day2 / kPilotStepsPerDay;
    s4 += day4 / kPilotStepsPerDay;
  }
  sigma2_bar_ = s2 / kPilotDays;
  sigma4_bar_ = s4 / kPilotDays;
}

PathBundle Simulator::simulate_day(std::uint64_t day_stream) const {
  const int S = cfg_.seconds_per_day;
  const int n = cfg_.n;
  Rng fac(cfg_.seed, substream(day_stream, 0));
  Rng jmp(cfg_.seed, substream(day_stream, 1));
  Rng noi(cfg_.seed, substream(day_stream, 2));

  const double dt = 1.0 / S;
  const double sqdt = std::sqrt(dt);
  const double dtf = cfg_.session_fraction / S;  // factor-clock step
  const double sqdtf = std::sqrt(dtf);
  const double rho_c = std::sqrt(1.0 - cfg_.rho1 * cfg_.rho1 - cfg_.rho2 * cfg_.rho2);
  const double drift_day = cfg_.drift_per_year / cfg_.days_per_year;
  const double sbar = std::sqrt(sigma2_bar_);

  PathBundle out;
  out.x.resize(static_cast<std::size_t>(S + 1));
  out.sigma_sv2.resize(static_cast<std::size_t>(S));
  out.sigma_u.resize(static_cast<std::size_t>(S));
  out.x[0] = 0.0;

  double tau1 = std::sqrt(-1.0 / (2.0 * cfg_.alpha1)) * fac.next_normal();
  double tau2 = 0.0;
  double iv = 0.0, iq = 0.0, qvj = 0.0;
  for (int i = 0; i < S; ++i) {
    const double ssv =
        cfg_.under_null ? sbar
                        : s_exp(cfg_.beta0 + cfg_.beta1 * tau1 + cfg_.beta2 * tau2);
    const double su = diurnal_factor(i * dt);
    out.sigma_sv2[static_cast<std::size_t>(i)] = ssv * ssv;
    out.sigma_u[static_cast<std::size_t>(i)] = su;
    const double sig2_day = ssv * ssv * su * su / cfg_.days_per_year;
    iv += sig2_day * dt;
    iq += sig2_day * sig2_day * dt;

    const double z1 = fac.next_normal();
    const double z2 = fac.next_normal();
    const double z3 = fac.next_normal();
    const double dw = sqdt * (cfg_.rho1 * z1 + cfg_.rho2 * z2 + rho_c * z3);

    double dj = 0.0;
    if (cfg_.with_jumps) {
      dj = tempered_stable_increment(stable_scale_, cfg_.beta_stable,
                                     cfg_.lambda_temper, jmp) -
           tempered_stable_increment(stable_scale_, cfg_.beta_stable,
                                     cfg_.lambda_temper, jmp);
      qvj += dj * dj;
    }

    out.x[static_cast<std::size_t>(i + 1)] =
        out.x[static_cast<std::size_t>(i)] + drift_day * dt + std::sqrt(sig2_day) * dw + dj;

    tau1 += cfg_.alpha1 * tau1 * dtf + sqdtf * z1;
    tau2 += cfg_.alpha2 * tau2 * dtf + (1.0 + cfg_.phi_factor * tau2) * sqdtf * z2;
  }
  out.true_iv = iv;
  out.true_iq = iq;
  out.qv_jump = qvj;
  out.true_h = cfg_.under_null ? 0.0 : h_index_true(out.sigma_sv2);

  const double iq_for_noise = cfg_.noise_on_expected_iq ? expected_iq_day() : iq;
  out.omega2 = cfg_.xi2 * std::sqrt(iq_for_noise);
  const double sd_eps = std::sqrt(out.omega2 / (1.0 + cfg_.phi_ma * cfg_.phi_ma));
  const int stride = S / n;
  out.y.resize(static_cast<std::size_t>(n + 1));
  double prev = sd_eps * noi.next_normal();
  for (int j = 0; j <= n; ++j) {
    const double cur = sd_eps * noi.next_normal();
    out.y[static_cast<std::size_t>(j)] =
        out.x[static_cast<std::size_t>(j * stride)] + cur + cfg_.phi_ma * prev;
    prev = cur;
  }
  return out;
}

}  // namespace divolt
