#include <algorithm>
#include <cmath>
#include <random>

#include <doctest.h>

#include "oscillab/nevanlinna.hpp"

using namespace oscillab;

namespace {

double uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

Complex random_interior(std::mt19937_64& rng, double max_radius = 0.99) {
  return std::polar(max_radius * std::sqrt(uniform(rng)), kTwoPi * uniform(rng));
}

Symbol monomial(int n) {
  std::vector<Complex> c(n + 1, 0.0);
  c[n] = 1.0;
  return Symbol::polynomial(c);
}

void check_same(const std::vector<Complex>& got, const std::vector<Complex>& want) {
  REQUIRE(got.size() == want.size());
  for (std::size_t i = 0; i < got.size(); ++i) CHECK(std::abs(got[i] - want[i]) < 1e-15);
}

}  // namespace

TEST_CASE("to_rational examples") {
  const RationalForm id = to_rational(Symbol::identity());
  check_same(id.num, {0.0, 1.0});
  check_same(id.den, {1.0});
  const RationalForm m = to_rational(Symbol::moebius(0.5));
  check_same(m.num, {0.5, -1.0});
  check_same(m.den, {1.0, -0.5});
  const RationalForm c = to_rational(Symbol::compose(Symbol::moebius(0.5), monomial(2)));
  check_same(c.num, {0.5, 0.0, -1.0});
  check_same(c.den, {1.0, 0.0, -0.5});
}

TEST_CASE("to_rational agrees with eval") {
  const std::vector<Symbol> symbols = {
      Symbol::compose(Symbol::moebius(Complex(0.2, 0.6)), Symbol::polynomial({0.1, 0.5, 0.3})),
      Symbol::blaschke(std::polar(1.0, 1.1), {0.3, Complex(-0.4, 0.5)}),
      Symbol::scale(0.9, Symbol::compose(Symbol::blaschke(1.0, {0.0, 0.5}), Symbol::moebius(-0.3))),
      Symbol::sum({{1.0, Symbol::moebius(0.7)}}, -0.7),
      Symbol::power(Symbol::moebius(Complex(0.1, 0.1)), 4)};
  std::mt19937_64 rng(20);
  for (const Symbol& s : symbols) {
    const RationalForm r = to_rational(s);
    for (int i = 0; i < 1000; ++i) {
      const Complex z = random_interior(rng, 1.0);
      CHECK(std::abs(r(z) - s(z)) < 1e-10);
    }
  }
}

TEST_CASE("to_rational degree bound") {
  CHECK_NOTHROW(to_rational(monomial(64)));
  CHECK_THROWS_AS(to_rational(monomial(65)), DegreeBoundExceeded);
  CHECK_THROWS_AS(to_rational(Symbol::compose(monomial(9), monomial(8))), DegreeBoundExceeded);
}

TEST_CASE("preimages examples") {
  const auto sq = preimages(to_rational(monomial(2)), 0.25);
  REQUIRE(sq.roots.size() == 2);
  std::vector<double> re;
  for (const auto& p : sq.roots) {
    CHECK(std::abs(p.z.imag()) < 1e-12);
    CHECK(p.multiplicity == 1);
    re.push_back(p.z.real());
  }
  std::sort(re.begin(), re.end());
  CHECK(re[0] == doctest::Approx(-0.5));
  CHECK(re[1] == doctest::Approx(0.5));

  std::mt19937_64 rng(21);
  for (int i = 0; i < 100; ++i) {
    const Complex b = random_interior(rng, 0.95), w = random_interior(rng, 0.95);
    const auto pre = preimages(to_rational(Symbol::moebius(b)), w);
    REQUIRE(pre.roots.size() == 1);
    CHECK(std::abs(pre.roots[0].z - moebius(b, w)) < 1e-12);
  }
  CHECK(preimages(to_rational(Symbol::constant(0.3)), 0.5).roots.empty());
}

TEST_CASE("preimages cluster multiple roots and flag the boundary") {
  const auto zero = preimages(to_rational(monomial(3)), 1e-30);
  int total = 0;
  for (const auto& p : zero.roots) total += p.multiplicity;
  CHECK(total == 3);
  // (1 + z)/2 = w has its root at z = 2w - 1 on the circle when w = 1/2 + e^{it}/2
  const auto edge = preimages(to_rational(Symbol::polynomial({0.5, 0.5})), 0.5 + 0.5 * std::polar(1.0, 0.3));
  CHECK(edge.boundary_ambiguous);
}

TEST_CASE("counting_function examples") {
  const auto z2 = counting_function(to_rational(monomial(2)), 0.25);
  CHECK(z2.value == doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-12));
  CHECK(z2.value == doctest::Approx(1.386294).epsilon(1e-6));
  std::mt19937_64 rng(22);
  for (int i = 0; i < 50; ++i) {
    const Complex b = random_interior(rng, 0.95), w = random_interior(rng, 0.95);
    if (std::abs(w - b) < 1e-6) continue;
    const double oracle = -std::log(std::abs(preimages(to_rational(Symbol::moebius(b)), w).roots.at(0).z));
    CHECK(counting_function(to_rational(Symbol::moebius(b)), w).value == doctest::Approx(oracle).epsilon(1e-12));
    CHECK(oracle == doctest::Approx(-std::log(std::abs(moebius(b, w)))).epsilon(1e-10));
  }
  CHECK(counting_function(to_rational(Symbol::constant(0.3)), 0.5).value == 0.0);
  CHECK_THROWS(counting_function(to_rational(monomial(2)), 0.0));
  CHECK_THROWS(counting_function(to_rational(Symbol::constant(0.3)), 0.3));
}

TEST_CASE("counting function of z^n closed form") {
  std::mt19937_64 rng(23);
  for (int n = 1; n <= 8; ++n) {
    const RationalForm r = to_rational(monomial(n));
    for (int i = 0; i < 100; ++i) {
      Complex w = random_interior(rng, 0.999);
      if (std::abs(w) < 1e-3) w = 0.5;
      CHECK(std::abs(counting_function(r, w).value - std::log(1.0 / std::abs(w))) < 1e-10);
    }
  }
}

TEST_CASE("littlewood bound") {
  const std::vector<Symbol> symbols = {Symbol::polynomial({0.5, 0.5}), Symbol::polynomial({0.0, 0.5, 0.5}),
                                       Symbol::compose(Symbol::moebius(0.7), Symbol::scale(0.9, Symbol::identity())),
                                       Symbol::blaschke(1.0, {0.2, Complex(0, 0.6)})};
  std::mt19937_64 rng(24);
  for (const Symbol& s : symbols) {
    const RationalForm r = to_rational(s);
    const Complex p0 = r(0.0);
    for (int i = 0; i < 100; ++i) {
      const Complex w = random_interior(rng, 0.98);
      if (std::abs(w - p0) < 1e-3) continue;
      const double bound = std::log(std::abs(1.0 - std::conj(w) * p0)) - std::log(std::abs(p0 - w));
      CHECK(counting_function(r, w).value <= bound + 1e-9);
    }
  }
}

TEST_CASE("counting is stable under small perturbations") {
  const RationalForm r = to_rational(Symbol::polynomial({0.1, 0.5, 0.3}));
  std::mt19937_64 rng(25);
  for (int i = 0; i < 100; ++i) {
    const Complex w = random_interior(rng, 0.9);
    if (std::abs(w - 0.1) < 1e-2) continue;
    // critical value of 0.1 + 0.5 z + 0.3 z^2 at z = -5/6
    if (std::abs(w - r(-5.0 / 6.0)) < 1e-2) continue;
    const Complex dw = std::polar(1e-10, kTwoPi * uniform(rng));
    CHECK(std::abs(counting_function(r, w).value - counting_function(r, w + dw).value) < 1e-6);
  }
}

TEST_CASE("s1_statistic examples") {
  const auto grid = default_w_grid();
  CHECK(s1_statistic(SelfMap(Symbol::constant(0.3)), 0.4, grid).value == 0.0);
  const double peak = 0.5 * std::exp(-1.0);
  CHECK(peak == doctest::Approx(0.18394).epsilon(1e-5));
  const auto id = s1_statistic(SelfMap(Symbol::identity()), Complex(0.2, 0.3), grid);
  CHECK(id.value == doctest::Approx(peak).epsilon(1e-6));
  CHECK(std::abs(id.argmax) == doctest::Approx(std::exp(-0.5)).epsilon(1e-3));
  // dense oracle over |w|
  double dense = 0.0;
  for (int j = 1; j < 100000; ++j) {
    const double m = j / 100000.0;
    dense = std::max(dense, -m * m * std::log(m));
  }
  CHECK(id.value == doctest::Approx(dense).epsilon(1e-8));

  const SelfMap half(Symbol::polynomial({0.5, 0.5}));
  double prev = 1.0, lowest = 1.0;
  for (int k = 2; k <= 10; ++k) {
    const double v = s1_statistic(half, 1.0 - std::ldexp(1.0, -k), grid).value;
    lowest = std::min(lowest, v);
    prev = v;
  }
  CHECK(lowest > 0.05);
  CHECK(prev > 0.05);
}

TEST_CASE("series energy matches the H2 norm") {
  const RationalForm m = to_rational(Symbol::moebius(Complex(0.6, 0.3)));
  const auto e = series_energy(m);
  CHECK(e.value == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(e.tail < 1e-13);
  const RationalForm p = to_rational(Symbol::polynomial({0.5, 0.5}));
  CHECK(series_energy(p).value == doctest::Approx(0.5).epsilon(1e-15));
  const auto taylor = m.taylor(4);
  CHECK(std::abs(taylor[0] - Complex(0.6, 0.3)) < 1e-15);
}
