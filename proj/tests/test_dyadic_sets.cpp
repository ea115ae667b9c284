#include <random>

#include <doctest.h>

#include "oscillab/dyadic_sets.hpp"

using namespace oscillab;

namespace {

Rational q(long p, long d) { return Rational(p, d); }

ArcSet arcs(std::vector<Interval> pieces) { return ArcSet::from_intervals(std::move(pieces)); }

// Random union of at most eight arcs with endpoints on the 2^{-bits} grid.
ArcSet random_dyadic_set(std::mt19937_64& rng, int bits) {
  const long n = 1L << bits;
  std::vector<Interval> pieces;
  const int count = 1 + static_cast<int>(rng() % 8);
  for (int i = 0; i < count; ++i) {
    long lo = static_cast<long>(rng() % n), hi = static_cast<long>(rng() % n);
    if (lo == hi) continue;
    if (lo > hi) std::swap(lo, hi);
    pieces.push_back({q(lo, n), q(hi, n)});
  }
  return arcs(pieces);
}

}  // namespace

TEST_CASE("intersect_measure examples") {
  for (int level = 0; level < 6; ++level)
    for (std::uint64_t k = 0; k < (1u << level); ++k) {
      const DyadicArc d{level, k};
      CHECK(intersect_measure(ArcSet::full(), d) == d.length());
      CHECK(intersect_measure(ArcSet(), d) == 0);
    }
  CHECK(intersect_measure(arcs({{0, q(1, 4)}}), DyadicArc{1, 0}) == q(1, 4));
}

TEST_CASE("arc set normalization and algebra") {
  const ArcSet e = arcs({{q(1, 2), q(3, 4)}, {q(1, 4), q(1, 2)}, {q(7, 8), q(1, 8)}});
  REQUIRE(e.intervals().size() == 3);
  CHECK(e.intervals()[0] == Interval{0, q(1, 8)});
  CHECK(e.intervals()[1] == Interval{q(1, 4), q(3, 4)});
  CHECK(e.intervals()[2] == Interval{q(7, 8), 1});
  CHECK(e.measure() == q(3, 4));
  CHECK(e.complement().measure() == q(1, 4));
  CHECK(e.unite(e.complement()) == ArcSet::full());
  CHECK(e.intersect(e.complement()).empty());
  CHECK(e.subtract(arcs({{0, q(1, 2)}})).measure() == q(3, 8));
  CHECK(ArcSet::from_json(e.to_json()) == e);
  CHECK(ArcSet::centered(0, q(1, 4)).measure() == q(1, 4));
  CHECK(ArcSet::centered(0, q(1, 4)).intervals().size() == 2);
}

TEST_CASE("dyadic arcs nest or are interior-disjoint") {
  std::mt19937_64 rng(30);
  for (int i = 0; i < 2000; ++i) {
    const int la = static_cast<int>(rng() % 10), lb = static_cast<int>(rng() % 10);
    const DyadicArc a{la, rng() % (1u << la)}, b{lb, rng() % (1u << lb)};
    CHECK(nested_or_disjoint(a, b));
    const Rational overlap = to_arc_set({a}).intersect(to_arc_set({b})).measure();
    if (a.contains(b)) CHECK(overlap == b.length());
    else if (b.contains(a)) CHECK(overlap == a.length());
    else CHECK(overlap == 0);
  }
}

TEST_CASE("density_core examples") {
  const DensityCore full = density_core(ArcSet::full());
  CHECK(full.core == ArcSet::full());
  CHECK(full.stopping.empty());
  CHECK(full.bound_holds);

  const DensityCore half = density_core(arcs({{0, q(1, 2)}}), 16, 12);
  CHECK(half.lambda == q(3, 4));
  CHECK(half.core_positive);
  CHECK(half.core.measure() > 0);
  CHECK(half.bound == q(1, 16));
  CHECK(half.bound_holds);
  REQUIRE(!half.samples.empty());
  for (const auto& s : half.samples) CHECK(s.ratio >= q(1, 16));

  const DensityCore small = density_core(arcs({{0, q(1, 64)}}), 16, 12);
  CHECK(small.core_positive);
  CHECK(small.bound == q(1, 512));
  for (const auto& s : small.samples) CHECK(s.ratio >= q(1, 512));
  CHECK(small.bound_holds);

  CHECK_THROWS(density_core(ArcSet()));
}

TEST_CASE("density_core stopping arcs are maximal violators") {
  std::mt19937_64 rng(31);
  for (int i = 0; i < 100; ++i) {
    const ArcSet e = random_dyadic_set(rng, 6);
    if (e.empty()) continue;
    const DensityCore d = density_core(e);
    const ArcSet ec = e.complement();
    for (const auto& arc : d.stopping) {
      CHECK(intersect_measure(ec, arc) > d.lambda * arc.length());
      if (arc.level > 0) {
        const DyadicArc parent{arc.level - 1, arc.index / 2};
        CHECK(intersect_measure(ec, parent) <= d.lambda * parent.length());
      }
    }
    CHECK(d.core == e.subtract(to_arc_set(d.stopping)));
    CHECK(d.core_positive);
    CHECK(d.bound_holds);
  }
}

TEST_CASE("wik_decomposition examples") {
  CHECK(wik_decomposition(ArcSet(), q(1, 2)).empty());

  const ArcSet quarter = arcs({{0, q(1, 4)}});
  const auto family = wik_decomposition(quarter, q(1, 2));
  REQUIRE(family.size() == 1);
  CHECK(family[0] == DyadicArc{0, 0});
  CHECK(verify_wik(quarter, q(1, 2), family).ok());

  const ArcSet two = arcs({{0, q(1, 8)}, {q(1, 2), q(5, 8)}});
  const auto f2 = wik_decomposition(two, q(1, 2));
  const WikCheck c2 = verify_wik(two, q(1, 2), f2);
  CHECK(c2.sandwich);
  CHECK(c2.disjoint);
  CHECK(c2.residue == 0);

  CHECK_THROWS(wik_decomposition(arcs({{0, q(3, 4)}}), q(1, 2)));
  CHECK_THROWS(wik_decomposition(quarter, 0));
  CHECK_THROWS(wik_decomposition(quarter, 1));
}

TEST_CASE("wik_decomposition fuzz") {
  std::mt19937_64 rng(32);
  const Rational lambdas[] = {q(1, 2), q(3, 4), q(1, 3), q(7, 8)};
  for (int i = 0; i < 200; ++i) {
    const ArcSet e = random_dyadic_set(rng, 10);
    const Rational& lambda = lambdas[i % 4];
    if (e.measure() > lambda) {
      CHECK_THROWS(wik_decomposition(e, lambda));
      continue;
    }
    const auto family = wik_decomposition(e, lambda);
    CHECK(verify_wik(e, lambda, family).ok());
    for (std::size_t a = 0; a < family.size(); ++a)
      for (std::size_t b = a + 1; b < family.size(); ++b) CHECK(nested_or_disjoint(family[a], family[b]));
    CHECK(std::is_sorted(family.begin(), family.end()));
  }
}

TEST_CASE("verify_wik detects broken families") {
  const ArcSet quarter = arcs({{0, q(1, 4)}});
  CHECK_FALSE(verify_wik(quarter, q(1, 2), {}).ok());
  CHECK_FALSE(verify_wik(quarter, q(1, 2), {DyadicArc{0, 0}, DyadicArc{1, 0}}).disjoint);
  CHECK_FALSE(verify_wik(quarter, q(1, 2), {DyadicArc{2, 0}}).sandwich);
}

TEST_CASE("snapping and rational text") {
  const ArcSet e = arcs({{q(1, 3), q(2, 3)}});
  const SnapResult s = snap_to_dyadic(e);
  CHECK(s.snapped);
  const Rational grid = Rational(1, 1 << 20);
  for (const auto& iv : s.set.intervals()) {
    CHECK(denominator(Rational(iv.lo / grid)) == 1);
    CHECK(denominator(Rational(iv.hi / grid)) == 1);
  }
  CHECK(abs(s.set.measure() - q(1, 3)) <= grid);
  CHECK_FALSE(snap_to_dyadic(arcs({{0, q(1, 4)}})).snapped);
  CHECK(parse_rational("3/8") == q(3, 8));
  CHECK(parse_rational("2") == 2);
  CHECK(format_rational(q(6, 16)) == "3/8");
  CHECK_THROWS(parse_rational("x/2"));
  CHECK_THROWS(parse_rational("1/0"));
}
