#include <cmath>
#include <random>

#include <doctest.h>

#include "oscillab/criteria.hpp"

using namespace oscillab;

namespace {

double uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

Complex random_interior(std::mt19937_64& rng, double max_radius = 0.95) {
  return std::polar(max_radius * std::sqrt(uniform(rng)), kTwoPi * uniform(rng));
}

const Symbol half_one_plus_z = Symbol::polynomial({0.5, 0.5});

SweepOptions small_options() {
  SweepOptions o;
  o.depth = 5;
  o.angles = 8;
  o.seminorm_depth = 4;
  o.seminorm_angles = 8;
  o.arc_nodes = 64;
  o.boundary_n = 1 << 12;
  o.s1_angles = 4;
  o.s1_w_angles = 8;
  return o;
}

Arc real_arc(int k) { return arc_of(DiscPoint::interior(1.0 - std::ldexp(1.0, -k))); }

}  // namespace

TEST_CASE("l_statistic examples") {
  std::mt19937_64 rng(50);
  for (int i = 0; i < 10; ++i) CHECK(l_statistic(Symbol::constant(0.3), random_interior(rng)) == 0.0);
  CHECK(l_statistic(Symbol::identity(), 0.5) == doctest::Approx(1.0).epsilon(1e-10));
  double prev = 0.0;
  for (int k = 4; k <= 12; ++k) {
    const auto v = l_statistic_routes(half_one_plus_z, 1.0 - std::ldexp(1.0, -k));
    CHECK(v.residual < 1e-8);
    CHECK(v.value > prev);
    CHECK(v.value < 1.0);
    prev = v.value;
  }
  CHECK(prev > 0.8);
}

TEST_CASE("l_statistic matches the three-route identity") {
  std::mt19937_64 rng(51);
  const Symbol phi = Symbol::polynomial({0.1, 0.4, Complex(0, 0.3)});
  for (int i = 0; i < 10; ++i) {
    const Complex a = random_interior(rng, 0.9);
    const Symbol composite =
        Symbol::compose(Symbol::moebius(phi(a)), Symbol::compose(phi, Symbol::moebius(a)));
    CHECK(l_statistic(phi, a) == doctest::Approx(h2_norm(composite)).epsilon(1e-8));
  }
}

TEST_CASE("criterion_profile examples") {
  const SweepOptions opt = small_options();
  const SelfMap constant(Symbol::constant(0.3));
  for (auto kind : {CriterionKind::L, CriterionKind::VMOA_iii, CriterionKind::S1, CriterionKind::A_double,
                    CriterionKind::A_prime, CriterionKind::A_rho_ladder, CriterionKind::A_hyp_double,
                    CriterionKind::A_hyp_center, CriterionKind::W1, CriterionKind::W2, CriterionKind::S2}) {
    const double parameter = kind == CriterionKind::S2 ? 0.5 : kind == CriterionKind::A_hyp_double ? 1.0 : 0.0;
    const CriterionProfile p = criterion_profile(constant, kind, opt, parameter);
    CAPTURE(p.label());
    REQUIRE_FALSE(p.points.empty());
    for (const auto& pt : p.points) CHECK(pt.value == 0.0);
  }
  const CriterionProfile id = criterion_profile(SelfMap(Symbol::identity()), CriterionKind::L, opt);
  REQUIRE(id.points.size() == 5);
  for (const auto& pt : id.points) CHECK(pt.value == doctest::Approx(1.0).epsilon(1e-9));
  for (std::size_t i = 1; i < id.points.size(); ++i) CHECK(id.points[i].approach > id.points[i - 1].approach);

  const CriterionProfile half = criterion_profile(SelfMap(Symbol::scale(0.5, Symbol::identity())), CriterionKind::L, opt);
  REQUIRE(half.points.size() == 5);
  for (std::size_t i = 1; i < half.points.size(); ++i) {
    CHECK(half.points[i].vacuous);
    CHECK(half.points[i].grid_size == 0);
    CHECK(half.points[i].value == 0.0);
  }
  CHECK(classify_profile(half, 0.15, 0.1) == SubVerdict::vanishing);
}

TEST_CASE("arc_mean examples") {
  CHECK(std::abs(arc_mean(Symbol::identity(), make_arc(0, 1))) < 1e-14);
  const Arc arc = make_arc(Rational(1, 3), Rational(1, 16));
  CHECK(std::abs(arc_mean(Symbol::constant(Complex(0.2, 0.4)), arc) - Complex(0.2, 0.4)) < 1e-14);
  double prev = 0.0;
  for (int k = 1; k <= 12; ++k) {
    const Complex m = arc_mean(half_one_plus_z, real_arc(k));
    CHECK(std::abs(m) <= 1.0);
    CHECK(m.real() > prev);
    prev = m.real();
  }
  CHECK(prev > 0.999);
  // closed form: mean of (1 + e^{it})/2 over |t| <= h is (1 + sin(h)/h)/2
  const double h = std::numbers::pi / 8.0;
  CHECK(arc_mean(half_one_plus_z, real_arc(3)).real() == doctest::Approx(0.5 * (1.0 + std::sin(h) / h)).epsilon(1e-5));
  CHECK_THROWS(arc_mean(half_one_plus_z, real_arc(3), 32));
}

TEST_CASE("arc_double_average examples") {
  const Arc arc = make_arc(Rational(1, 5), Rational(1, 8));
  CHECK(arc_double_average(Symbol::constant(0.4), arc, ArcMetric::rho2()).value == 0.0);
  CHECK(arc_double_average(Symbol::constant(0.4), arc, ArcMetric::tau(2.0)).value == 0.0);
  const Symbol z2 = Symbol::blaschke(1.0, {0.0, 0.0});
  const int nodes = 256;
  for (int k : {1, 2, 5, 9}) {
    const Arc a = make_arc(Rational(1, 7), Rational(1, 1 << k));
    CHECK(std::abs(arc_double_average(z2, a, ArcMetric::rho2(), nodes).value - 1.0) <= 1.0 / nodes + 1e-12);
  }
  // on the full circle antipodal nodes share a value, doubling the deficit
  CHECK(std::abs(arc_double_average(z2, make_arc(0, 1), ArcMetric::rho2(), nodes).value - 1.0) <= 2.0 / nodes + 1e-12);
  double lowest = 1.0;
  for (int k = 2; k <= 12; ++k) lowest = std::min(lowest, arc_double_average(half_one_plus_z, real_arc(k), ArcMetric::rho2()).value);
  CHECK(lowest > 0.1);
  const auto capped = arc_double_average(z2, make_arc(0, Rational(1, 4)), ArcMetric::tau(1.0));
  CHECK(capped.clipped > 0);
  CHECK(capped.evaluations == 256u * 256u);
}

TEST_CASE("arc_center_average examples") {
  const Arc arc = make_arc(Rational(1, 5), Rational(1, 8));
  CHECK(arc_center_average(Symbol::constant(0.4), arc, ArcMetric::rho2()).value == 0.0);
  const DiscPoint a = center_of(arc);
  double sum = 0.0;
  const int m = 20000;
  for (int j = 0; j < m; ++j) {
    const Complex zeta = std::polar(1.0, arc.angle_at(-0.5 + (j + 0.5) / m));
    const double r = pseudo_hyperbolic(zeta, a.value());
    sum += r * r;
  }
  const double value = arc_center_average(Symbol::identity(), arc, ArcMetric::rho2(), 1024).value;
  CHECK(value > 0.0);
  CHECK(value == doctest::Approx(sum / m).epsilon(1e-5));

  const std::vector<Symbol> maps = {half_one_plus_z, Symbol::polynomial({0.0, 0.5, 0.5}),
                                    Symbol::compose(Symbol::moebius(0.7), Symbol::scale(0.9, Symbol::identity()))};
  std::mt19937_64 rng(52);
  for (const Symbol& phi : maps)
    for (int i = 0; i < 10; ++i) {
      const DiscPoint b = DiscPoint::interior(random_interior(rng, 0.99));
      const double center = arc_center_average(phi, arc_of(b), ArcMetric::rho2()).value;
      const double l = l_statistic(phi, b.value());
      CHECK(center <= 4.0 * l * l + 1e-6);
    }
}

TEST_CASE("w1_statistic examples") {
  for (int n : {1, 2, 4}) CHECK(w1_statistic(Symbol::constant(0.0), n, 4, 8) == 0.0);
  const Symbol half = Symbol::scale(0.5, Symbol::identity());
  double prev = 1.0;
  for (int n : {1, 2, 4, 8}) {
    const double v = w1_statistic(half, n, 4, 8);
    CHECK(v < prev);
    CHECK(v <= std::pow(0.5, n) + 1e-12);
    prev = v;
  }
  for (int n : {1, 2, 4, 8}) CHECK(w1_statistic(Symbol::identity(), n, 4, 8) > 0.5);
}

TEST_CASE("w2_statistic examples") {
  CHECK(w2_statistic(Symbol::constant(0.3), 0.6, {}, 4, 8).value == 0.0);
  const std::vector<Symbol> maps = {half_one_plus_z, Symbol::polynomial({0.0, 0.5, 0.5}),
                                    Symbol::compose(Symbol::moebius(0.7), Symbol::scale(0.9, Symbol::identity()))};
  std::mt19937_64 rng(53);
  for (const Symbol& phi : maps)
    for (int i = 0; i < 4; ++i) {
      const Complex a = random_interior(rng, 0.9);
      CHECK(w2_statistic(phi, phi(a), {a}, 3, 8).value >= l_statistic(phi, a) - 1e-10);
    }
  CHECK(w2_statistic(Symbol::identity(), 0.9, {0.9}, 3, 8).value >= l_statistic(Symbol::identity(), 0.9) - 1e-10);
  CHECK(l_statistic(Symbol::identity(), 0.9) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("s2_statistic examples") {
  CHECK(s2_statistic(SelfMap(Symbol::constant(0.3)), 0.2, 0.5) == 0.0);
  CHECK(s2_statistic(SelfMap(Symbol::identity()), 0.0, 0.99) == 1.0);
  const SelfMap phi(half_one_plus_z);
  const BoundaryGrid grid = boundary_samples(phi, 1 << 14);
  // a with |phi(a)| <= 1/2 fill the disc of radius 1 about -1
  std::vector<Complex> as;
  for (int i = 1; i <= 16; ++i)
    for (int j = 0; j < 16; ++j) {
      const Complex a = -1.0 + std::polar(i / 16.0, kTwoPi * j / 16);
      if (std::abs(a) < 1.0 && std::abs(phi(a)) <= 0.5) as.push_back(a);
    }
  REQUIRE(as.size() > 10);
  double prev = 1.0;
  for (int k = 2; k <= 10; ++k) {
    double sup = 0.0;
    for (Complex a : as) sup = std::max(sup, s2_statistic(grid, a, 1.0 - std::ldexp(1.0, -k)));
    CHECK(sup <= prev);
    prev = sup;
  }
  CHECK(prev < 0.05);
}

TEST_CASE("verdict examples") {
  const SweepOptions opt = small_options();
  const auto kinds = std::vector<CriterionKind>{CriterionKind::L};
  const SelfMap half(Symbol::scale(0.5, Symbol::identity()));
  const VerdictReport h = verdict(half, all_profiles(half, kinds, opt));
  CHECK(h.classification == Classification::compact_evidence);
  CHECK(h.reason == "sup|phi|<1, (L) vacuous");

  const SelfMap id(Symbol::identity());
  const auto id_profiles = all_profiles(id, kinds, opt);
  CHECK(verdict(id, id_profiles).classification == Classification::non_compact_evidence);
  for (const auto& pt : id_profiles.at(0).points) CHECK(pt.value == doctest::Approx(1.0).epsilon(1e-9));

  CHECK_THROWS(all_profiles(id, {}, opt));
}

TEST_CASE("verdict on (1+z)/2 keeps S2 satisfied") {
  SweepOptions opt = small_options();
  opt.depth = 10;
  const SelfMap phi(half_one_plus_z);
  const auto profiles = all_profiles(phi, {CriterionKind::L, CriterionKind::S2}, opt);
  const VerdictReport r = verdict(phi, profiles);
  CHECK(r.classification == Classification::non_compact_evidence);
  REQUIRE(r.s2_satisfied.has_value());
  const auto s2_half = r.find("S2[R=0.5]");
  REQUIRE(s2_half.has_value());
  CHECK(*s2_half == SubVerdict::vanishing);
}

TEST_CASE("classification rules") {
  CriterionProfile p;
  p.kind = CriterionKind::L;
  auto set = [&](std::vector<double> values) {
    p.points.clear();
    for (std::size_t i = 0; i < values.size(); ++i) p.points.push_back({double(i), values[i], 1, 0});
  };
  set({0.9, 0.5, 0.3, 0.2, 0.1, 0.05});
  CHECK(classify_profile(p, 0.15, 0.1) == SubVerdict::vanishing);
  set({0.9, 0.5, 0.3, 0.05, 0.1, 0.05});
  CHECK(classify_profile(p, 0.15, 0.1) == SubVerdict::inconclusive);
  set({1.0, 1.0, 1.0, 1.0, 1.0});
  CHECK(classify_profile(p, 0.15, 0.1) == SubVerdict::failing);
  set({1.0, 0.9, 0.6, 0.4, 0.2});
  CHECK(classify_profile(p, 0.15, 0.1) == SubVerdict::inconclusive);
  p.evaluations = 1000;
  p.clipped = 100;
  set({0.2, 0.2, 0.2, 0.2});
  CHECK(classify_profile(p, 0.15, 0.1) == SubVerdict::failing);
  set({0.05, 0.04, 0.03, 0.02});
  CHECK(classify_profile(p, 0.15, 0.1) == SubVerdict::inconclusive);
}

TEST_CASE("arc means track phi(a)") {
  const std::vector<Symbol> maps = {half_one_plus_z, Symbol::polynomial({0.0, 0.5, 0.5}), Symbol::identity(),
                                    Symbol::compose(Symbol::moebius(0.7), Symbol::scale(0.9, Symbol::identity())),
                                    Symbol::moebius(0.5)};
  std::mt19937_64 rng(54);
  for (const Symbol& phi : maps)
    for (int i = 0; i < 30; ++i) {
      const DiscPoint a = DiscPoint::interior(random_interior(rng, 0.999));
      const Complex pa = phi(a.value());
      const Complex rot = std::abs(pa) > 0 ? std::conj(pa) / std::abs(pa) : 1.0;
      const Complex mean = rot * arc_mean(phi, arc_of(a), 1024);
      CHECK(1.0 - std::abs(pa) >= 0.25 * (1.0 - mean.real()) - 1e-9);
    }
}

TEST_CASE("profiles csv") {
  CriterionProfile a;
  a.kind = CriterionKind::W1;
  a.points = {{2.0, 0.5, 10, 0}, {1.0, 0.25, 10, 0}};
  CriterionProfile b;
  b.kind = CriterionKind::L;
  b.points = {{0.5, 1.0 / 3.0, 4, 0}};
  const std::string csv = profiles_csv({a, b});
  CHECK(csv ==
        "kind,approach,value,grid_size,tau_cap_hits\n"
        "L,0.5,0.33333333333333331,4,0\n"
        "W1,1,0.25,10,0\n"
        "W1,2,0.5,10,0\n");
  CHECK(kind_from_string("A-hyp-center") == CriterionKind::A_hyp_center);
  CHECK_THROWS(kind_from_string("nope"));
}

TEST_CASE("inner symbol has L-profile identically one") {
  const SelfMap z2(Symbol::blaschke(1.0, {0.0, 0.0}));
  const auto p = criterion_profile(z2, CriterionKind::L, small_options());
  for (const auto& pt : p.points) CHECK(pt.value == doctest::Approx(1.0).epsilon(1e-9));
  const auto prime = criterion_profile(z2, CriterionKind::A_prime, small_options());
  for (const auto& pt : prime.points) CHECK(pt.value == doctest::Approx(1.0).epsilon(1e-9));
}
