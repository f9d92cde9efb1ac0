#include "divolt/diurnal.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "divolt/errors.hpp"

namespace divolt {

DiurnalProfile flat_profile(int m) {
  if (m < 1) throw std::invalid_argument("flat_profile: need m >= 1");
  DiurnalProfile p;
  p.m = m;
  p.sigma2_u.assign(static_cast<std::size_t>(m), 1.0);
  return p;
}

double autocov(const std::vector<double>& x, int k) {
  const int len = static_cast<int>(x.size());
  if (k < 0 || k >= len) throw std::invalid_argument("autocov: lag out of range");
  double s = 0.0;
  for (int i = 0; i + k < len; ++i) s += x[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(i + k)];
  return s / static_cast<double>(len - k);
}

double robust_noise_variance(const std::vector<double>& x, int q) {
  if (q < 0) throw std::invalid_argument("robust_noise_variance: need q >= 0");
  double acc = 0.0;
  for (int k = 1; k <= q + 1; ++k) acc += k * autocov(x, k);
  return std::max(0.0, -acc);
}

double longrun_noise_variance(const std::vector<double>& x, int q) {
  if (q < 0) throw std::invalid_argument("longrun_noise_variance: need q >= 0");
  std::vector<double> gamma(static_cast<std::size_t>(q + 2), 0.0);
  for (int k = 1; k <= q + 1; ++k) gamma[static_cast<std::size_t>(k)] = autocov(x, k);
  double rho0 = 0.0;
  for (int k = 1; k <= q + 1; ++k) rho0 -= k * gamma[static_cast<std::size_t>(k)];
  double acc = rho0;
  for (int k = 1; k <= q; ++k) {
    double rho_k = 0.0;
    for (int j = 1; j <= q - k + 1; ++j) rho_k -= j * gamma[static_cast<std::size_t>(k + j)];
    acc += 2.0 * rho_k;
  }
  return acc;
}

DiurnalProfile estimate_profile(const std::vector<ReturnGrid>& days,
                                const DiurnalOptions& opt) {
  const int T = static_cast<int>(days.size());
  if (T < 2) throw std::invalid_argument("estimate_profile: need at least 2 days");
  if (opt.m < 1) throw std::invalid_argument("estimate_profile: need m >= 1");
  const int n = days[0].n();
  for (const auto& d : days) {
    if (d.n() != n) throw std::invalid_argument("estimate_profile: days have mixed lengths");
  }
  if (n % opt.m != 0) throw std::invalid_argument("estimate_profile: m must divide n");
  const int p = n / opt.m;
  if (p <= opt.q + 1) throw std::invalid_argument("estimate_profile: bin width must exceed q+1");

  DiurnalProfile prof;
  prof.m = opt.m;
  prof.sigma2_u.assign(static_cast<std::size_t>(opt.m), 0.0);

  std::vector<double> slow(static_cast<std::size_t>(T));
  std::vector<int> keep;
  for (int j = 0; j < opt.m; ++j) {
    const int base = j * p;
    for (int t = 0; t < T; ++t) {
      double s = 0.0;
      for (int i = 0; i < p; ++i) s += days[static_cast<std::size_t>(t)].r[static_cast<std::size_t>(base + i)];
      slow[static_cast<std::size_t>(t)] = s;
    }
    keep.resize(static_cast<std::size_t>(T));
    std::iota(keep.begin(), keep.end(), 0);
    if (opt.drop_outliers) {
      const int drop = static_cast<int>(std::floor(opt.outlier_fraction * T));
      if (drop > 0) {
        std::stable_sort(keep.begin(), keep.end(), [&](int a, int b) {
          return std::fabs(slow[static_cast<std::size_t>(a)]) > std::fabs(slow[static_cast<std::size_t>(b)]);
        });
        keep.erase(keep.begin(), keep.begin() + drop);
        std::sort(keep.begin(), keep.end());
      }
    }
    const double kept = static_cast<double>(keep.size());

    double raw = 0.0;
    for (int t : keep) {
      const double s = slow[static_cast<std::size_t>(t)];
      raw += opt.m * s * s;
    }
    raw /= kept;

    double bias = 0.0;
    for (int k = 1; k <= opt.q + 1; ++k) {
      double g = 0.0;
      for (int t : keep) {
        const auto& r = days[static_cast<std::size_t>(t)].r;
        double s = 0.0;
        for (int i = 0; i + k < p; ++i) {
          s += r[static_cast<std::size_t>(base + i)] * r[static_cast<std::size_t>(base + i + k)];
        }
        g += s / static_cast<double>(p - k);
      }
      bias += k * (g / kept);
    }
    const double omega2_bin = std::max(0.0, -bias);
    prof.sigma2_u[static_cast<std::size_t>(j)] = raw - 2.0 * opt.m * omega2_bin;
  }

  // Normalize before flooring: the bin estimates carry the (arbitrary) daily
  // variance units, while the floor guards against noise-correction driving a
  // relative bin weight to zero. The floor is enforced as a waterfall so both
  // properties hold exactly: floored bins pin at floor_value and the rest
  // rescale to keep the mean at one (rescaling can push further bins under the
  // floor, hence the loop; the pin set only grows, so it terminates).
  double mean = 0.0;
  for (double v : prof.sigma2_u) mean += v;
  mean /= static_cast<double>(opt.m);
  if (!(mean > 0.0)) throw data_error("estimate_profile: no variance in data");
  for (double& v : prof.sigma2_u) v /= mean;
  std::vector<bool> pinned(static_cast<std::size_t>(opt.m), false);
  for (;;) {
    int n_pinned = 0;
    double free_sum = 0.0;
    for (int j = 0; j < opt.m; ++j) {
      if (pinned[static_cast<std::size_t>(j)]) ++n_pinned;
      else free_sum += prof.sigma2_u[static_cast<std::size_t>(j)];
    }
    if (n_pinned == opt.m) break;
    const double scale =
        (opt.m - n_pinned * opt.floor_value) / free_sum;
    bool grew = false;
    for (int j = 0; j < opt.m; ++j) {
      if (!pinned[static_cast<std::size_t>(j)] &&
          prof.sigma2_u[static_cast<std::size_t>(j)] * scale < opt.floor_value) {
        pinned[static_cast<std::size_t>(j)] = true;
        grew = true;
      }
    }
    if (!grew) {
      for (int j = 0; j < opt.m; ++j) {
        auto& v = prof.sigma2_u[static_cast<std::size_t>(j)];
        v = pinned[static_cast<std::size_t>(j)] ? opt.floor_value : v * scale;
      }
      break;
    }
  }
  return prof;
}

std::vector<double> deflate(const std::vector<double>& returns, const DiurnalProfile& p) {
  const int n = static_cast<int>(returns.size());
  if (p.m < 1 || static_cast<int>(p.sigma2_u.size()) != p.m) {
    throw std::invalid_argument("deflate: malformed profile");
  }
  std::vector<double> out(returns.size());
  for (int i = 1; i <= n; ++i) {
    int bin = static_cast<int>(static_cast<long long>(i) * p.m / n);
    if (bin >= p.m) bin = p.m - 1;
    out[static_cast<std::size_t>(i - 1)] =
        returns[static_cast<std::size_t>(i - 1)] /
        std::sqrt(p.sigma2_u[static_cast<std::size_t>(bin)]);
  }
  return out;
}

ReturnGrid deflate(const ReturnGrid& day, const DiurnalProfile& p) {
  ReturnGrid out;
  out.date = day.date;
  out.r = deflate(day.r, p);
  return out;
}

void write_profile_csv(const DiurnalProfile& p, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw data_error("write_profile_csv: cannot open " + path);
  f << "bin_index,s_left,s_right,sigma2_u\n";
  char buf[64];
  for (int j = 1; j <= p.m; ++j) {
    std::snprintf(buf, sizeof buf, "%.17g", p.sigma2_u[static_cast<std::size_t>(j - 1)]);
    f << j << ',' << static_cast<double>(j - 1) / p.m << ','
      << static_cast<double>(j) / p.m << ',' << buf << '\n';
  }
  if (!f) throw data_error("write_profile_csv: write failed for " + path);
}

DiurnalProfile read_profile_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw data_error("read_profile_csv: cannot open " + path);
  std::string line;
  if (!std::getline(f, line)) throw data_error("read_profile_csv: empty file " + path);
  DiurnalProfile p;
  int lineno = 1;
  while (std::getline(f, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() != 4) {
      throw data_error("read_profile_csv: malformed row at line " + std::to_string(lineno));
    }
    char* end = nullptr;
    const double v = std::strtod(fields[3].c_str(), &end);
    if (end == fields[3].c_str() || !(v > 0.0)) {
      throw data_error("read_profile_csv: bad sigma2_u at line " + std::to_string(lineno));
    }
    p.sigma2_u.push_back(v);
  }
  p.m = static_cast<int>(p.sigma2_u.size());
  if (p.m < 1) throw data_error("read_profile_csv: no bins in " + path);
  double mean = 0.0;
  for (double v : p.sigma2_u) mean += v;
  mean /= static_cast<double>(p.m);
  for (double& v : p.sigma2_u) v /= mean;
  return p;
}

}  // namespace divolt
