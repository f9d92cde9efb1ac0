#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <set>
#include <stdexcept>
#include <vector>

#include <divolt/mathutil.hpp>
#include <divolt/rng.hpp>

using namespace divolt;

TEST_CASE("philox block matches reference vectors") {
  std::uint32_t out[4];

  philox4x32_block(0u, 0u, 0u, out);
  CHECK(out[0] == 0x6627e8d5u);
  CHECK(out[1] == 0xe169c58du);
  CHECK(out[2] == 0xbc57ac4cu);
  CHECK(out[3] == 0x9b00dbd8u);

  philox4x32_block(~0ull, ~0ull, ~0ull, out);
  CHECK(out[0] == 0x408f276du);
  CHECK(out[1] == 0x41c83b0eu);
  CHECK(out[2] == 0xa20bc7c6u);
  CHECK(out[3] == 0x6d5451fdu);

  philox4x32_block(0x299f31d0a4093822ull, 0x0370734413198a2eull,
                   0x85a308d3243f6a88ull, out);
  CHECK(out[0] == 0xd16cfe09u);
  CHECK(out[1] == 0x94fdccebu);
  CHECK(out[2] == 0x5001e420u);
  CHECK(out[3] == 0x24126ea1u);
}

TEST_CASE("rng streams are deterministic and distinct") {
  Rng a(42, 7), b(42, 7), c(42, 8);
  bool any_differ = false;
  for (int i = 0; i < 64; ++i) {
    const std::uint64_t va = a.next_u64();
    CHECK(va == b.next_u64());
    if (va != c.next_u64()) any_differ = true;
  }
  CHECK(any_differ);
}

TEST_CASE("substream derivation is deterministic and collision-free in practice") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t i = 0; i < 1000; ++i) {
    const std::uint64_t s = substream(0xABCDull, i);
    CHECK(s == substream(0xABCDull, i));
    seen.insert(s);
  }
  CHECK(seen.size() == 1000);
  CHECK(substream(1, 0) != substream(2, 0));
}

TEST_CASE("uniform draws live strictly inside (0,1) with sane mean") {
  Rng r(2024, 0);
  double sum = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double u = r.next_uniform();
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  CHECK(std::fabs(sum / n - 0.5) < 0.005);
}

TEST_CASE("normal draws match N(0,1) moments roughly") {
  Rng r(7, 3);
  double s1 = 0.0, s2 = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double z = r.next_normal();
    s1 += z;
    s2 += z * z;
  }
  CHECK(std::fabs(s1 / n) < 0.01);
  CHECK(std::fabs(s2 / n - 1.0) < 0.02);
}

TEST_CASE("normal quantile hits reference values") {
  CHECK(normal_quantile(0.5) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(normal_quantile(0.975) ==
        doctest::Approx(1.959963984540054).epsilon(1e-12));
  CHECK(normal_quantile(0.999) ==
        doctest::Approx(3.090232306167814).epsilon(1e-12));
  CHECK(normal_quantile(0.025) ==
        doctest::Approx(-1.959963984540054).epsilon(1e-12));
  CHECK_THROWS_AS(normal_quantile(0.0), std::invalid_argument);
  CHECK_THROWS_AS(normal_quantile(1.0), std::invalid_argument);
  CHECK_THROWS_AS(normal_quantile(-0.2), std::invalid_argument);
}

TEST_CASE("normal cdf and quantile invert each other") {
  for (double p : {1e-6, 0.001, 0.1, 0.31830989, 0.5, 0.8, 0.975, 0.9999}) {
    CHECK(normal_cdf(normal_quantile(p)) == doctest::Approx(p).epsilon(1e-10));
  }
  for (double x : {-5.0, -1.3, 0.0, 0.5, 2.7}) {
    CHECK(normal_quantile(normal_cdf(x)) == doctest::Approx(x).epsilon(1e-9));
  }
}

TEST_CASE("order statistic picks the k-th smallest") {
  std::vector<double> x = {5.0, 1.0, 4.0, 2.0, 3.0};
  CHECK(order_statistic(x, 1) == 1.0);
  CHECK(order_statistic(x, 3) == 3.0);
  CHECK(order_statistic(x, 5) == 5.0);
  CHECK_THROWS_AS(order_statistic(x, 0), std::invalid_argument);
  CHECK_THROWS_AS(order_statistic(x, 6), std::invalid_argument);
}
