#include "oscillab/criteria.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "oscillab/nevanlinna.hpp"
#include "oscillab/parallel.hpp"

namespace oscillab {

namespace {

constexpr std::array<std::pair<CriterionKind, const char*>, 11> kKindNames{{
    {CriterionKind::L, "L"},
    {CriterionKind::VMOA_iii, "VMOA-iii"},
    {CriterionKind::S1, "S1"},
    {CriterionKind::A_double, "A-double"},
    {CriterionKind::A_prime, "A-prime"},
    {CriterionKind::A_rho_ladder, "A-rho-ladder"},
    {CriterionKind::A_hyp_double, "A-hyp-double"},
    {CriterionKind::A_hyp_center, "A-hyp-center"},
    {CriterionKind::W1, "W1"},
    {CriterionKind::W2, "W2"},
    {CriterionKind::S2, "S2"},
}};

std::vector<double> midpoint_angles(const Arc& arc, int nodes) {
  if (nodes < 64) throw std::invalid_argument(fmt::format("arc under-resolved: {} nodes, need at least 64", nodes));
  std::vector<double> out(static_cast<std::size_t>(nodes));
  for (int j = 0; j < nodes; ++j) out[j] = arc.angle_at(-0.5 + (j + 0.5) / nodes);
  return out;
}

std::vector<Complex> arc_values(const Symbol& phi, const Arc& arc, int nodes) {
  std::vector<Complex> v;
  for (double t : midpoint_angles(arc, nodes)) v.push_back(phi(std::polar(1.0, t)));
  return v;
}

struct MetricValue {
  double value;
  bool clipped;
};

MetricValue apply_metric(const ArcMetric& m, Complex z, Complex w) {
  const double rho = pseudo_hyperbolic(z, w);
  if (m.kind == ArcMetric::Kind::rho_squared) return {rho * rho, false};
  const auto t = capped_hyperbolic(z, w, m.cap);
  return {std::pow(t.value, m.power), t.clipped};
}

}  // namespace

std::string to_string(CriterionKind kind) {
  for (const auto& [k, name] : kKindNames)
    if (k == kind) return name;
  throw std::invalid_argument("unknown criterion kind");
}

CriterionKind kind_from_string(const std::string& name) {
  for (const auto& [k, n] : kKindNames)
    if (name == n) return k;
  throw std::invalid_argument(fmt::format("unknown criterion \"{}\"", name));
}

std::string CriterionProfile::label() const {
  if (kind == CriterionKind::A_hyp_double) return fmt::format("A-hyp-double[p={}]", parameter);
  if (kind == CriterionKind::S2) return fmt::format("S2[R={}]", parameter);
  return to_string(kind);
}

LValue l_statistic_routes(const Symbol& phi, Complex a, const QuadratureOptions& opt) {
  if (!(std::abs(a) < 1.0)) throw std::invalid_argument("l_statistic requires |a| < 1");
  const Complex b = phi(a);
  const auto r = dual_route_mean([&](Complex z) { return std::norm(moebius(b, phi(moebius(a, z)))); },
                                 [&](Complex z) { return std::norm(moebius(b, phi(z))) * poisson_kernel(a, z); }, opt);
  if (!r.converged) throw QuadratureError(r.direct, r.poisson, r.n);
  return {std::min(1.0, std::sqrt(std::max(r.poisson, 0.0))), r.residual(), r.n};
}

double l_statistic(const Symbol& phi, Complex a, const QuadratureOptions& opt) {
  return l_statistic_routes(phi, a, opt).value;
}

Complex arc_mean(const Symbol& phi, const Arc& arc, int nodes) {
  const auto v = arc_values(phi, arc, nodes);
  return std::accumulate(v.begin(), v.end(), Complex(0.0)) / static_cast<double>(nodes);
}

ArcAverage arc_double_average(const Symbol& phi, const Arc& arc, const ArcMetric& metric, int nodes) {
  if (metric.kind == ArcMetric::Kind::tau_power && !(metric.power > 0.0))
    throw std::invalid_argument("tau power must be positive");
  const auto v = arc_values(phi, arc, nodes);
  ArcAverage out{0.0, 0, 0};
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j) {
      const auto m = apply_metric(metric, v[i], v[j]);
      out.value += m.value;
      out.clipped += m.clipped;
      ++out.evaluations;
    }
  out.value /= static_cast<double>(out.evaluations);
  return out;
}

ArcAverage arc_center_average(const Symbol& phi, const Arc& arc, const ArcMetric& metric, int nodes) {
  const Complex center = phi(center_of(arc).value());
  const auto v = arc_values(phi, arc, nodes);
  ArcAverage out{0.0, 0, 0};
  for (Complex z : v) {
    const auto m = apply_metric(metric, z, center);
    out.value += m.value;
    out.clipped += m.clipped;
    ++out.evaluations;
  }
  out.value /= static_cast<double>(out.evaluations);
  return out;
}

double w1_statistic(const Symbol& phi, int n, int depth, int angles, const QuadratureOptions& opt) {
  if (n < 1) throw std::invalid_argument("power must be at least 1");
  QuadratureOptions single = opt;
  single.require_agreement = false;
  return bmoa_seminorm(Symbol::power(phi, n), standard_a_grid(depth, angles), single).value;
}

SeminormEstimate w2_statistic(const Symbol& phi, Complex b, const std::vector<Complex>& extra, int depth, int angles,
                              const QuadratureOptions& opt) {
  if (!(std::abs(b) < 1.0)) throw std::invalid_argument("w2_statistic requires |b| < 1");
  // Coarse grid points use the Poisson route alone. b and the extra points keep
  // the caller's options, so a witness a with b = phi(a) reproduces l_statistic
  // bit for bit; where the direct route cannot resolve, fall back to Poisson.
  auto grid = standard_a_grid(depth, angles);
  const std::size_t coarse = grid.size();
  grid.push_back(b);
  grid.insert(grid.end(), extra.begin(), extra.end());
  QuadratureOptions single = opt;
  single.require_agreement = false;
  const Symbol f = Symbol::compose(Symbol::moebius(b), phi);
  const auto values = parallel_map(grid.size(), [&](std::size_t i) {
    if (i < coarse) return garsia_gamma(f, grid[i], single);
    try {
      return garsia_gamma(f, grid[i], opt);
    } catch (const QuadratureError&) {
      return garsia_gamma(f, grid[i], single);
    }
  });
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i)
    if (values[i] > values[best]) best = i;
  return {values[best], grid[best], grid.size(), fmt::format("{} points", grid.size()), true};
}

double s2_statistic(const BoundaryGrid& grid, Complex a, double t) {
  if (!(std::abs(a) < 1.0)) throw std::invalid_argument("s2_statistic requires |a| < 1");
  double s = 0.0;
  const std::size_t n = grid.size();
  for (std::size_t j = 0; j < n; ++j)
    if (std::abs(grid.values[j]) > t) s += poisson_kernel(a, detail::root_of_unity(j, n));
  return std::min(1.0, s / static_cast<double>(n));
}

double s2_statistic(const SelfMap& phi, Complex a, double t, std::size_t n) {
  return s2_statistic(boundary_samples(phi, n), a, t);
}

namespace {

double level(int k) { return 1.0 - std::ldexp(1.0, -k); }

CriterionProfile make_profile(CriterionKind kind, double parameter = 0.0) {
  CriterionProfile p;
  p.kind = kind;
  p.parameter = parameter;
  return p;
}

// a-points: the origin, then rings 1 - 2^{-j}, j = 1..rings, `angles` each.
struct PointGrid {
  std::vector<Complex> a;
  std::vector<int> ring;
  std::vector<int> slot;  // angular index within the ring
  std::vector<double> image_modulus;
};

PointGrid make_point_grid(const Symbol& phi, int rings, int angles) {
  PointGrid g;
  auto add = [&](Complex a, int j, int m) {
    g.a.push_back(a);
    g.ring.push_back(j);
    g.slot.push_back(m);
    g.image_modulus.push_back(std::abs(phi(a)));
  };
  add(0.0, 0, 0);
  for (int j = 1; j <= rings; ++j)
    for (int m = 0; m < angles; ++m) add(std::polar(level(j), kTwoPi * m / angles), j, m);
  return g;
}

// Profile over nested level sets {key >= s_k}, k = 1..depth. A level with no
// members is vacuous and reported as 0.
CriterionProfile level_profile(CriterionKind kind, int depth, const std::vector<double>& key,
                               const std::vector<double>& value, const std::vector<std::size_t>& hits = {}) {
  CriterionProfile p = make_profile(kind);
  for (int k = 1; k <= depth; ++k) {
    const double s = level(k);
    double best = 0.0;
    std::size_t count = 0, cap_hits = 0;
    for (std::size_t i = 0; i < key.size(); ++i) {
      if (!(key[i] >= s)) continue;
      best = std::max(best, value[i]);
      ++count;
      if (!hits.empty()) cap_hits += hits[i];
    }
    p.points.push_back({s, best, count, cap_hits, count == 0});
  }
  return p;
}

struct ArcStats {
  Complex mean;
  double rho2_double = 0.0, rho2_center = 0.0, tau_center = 0.0;
  std::array<double, 3> tau_double{};  // p = 1/2, 1, 2
  std::size_t pairs = 0, pair_clipped = 0, centers = 0, center_clipped = 0;
};

constexpr std::array<double, 3> kTauPowers{0.5, 1.0, 2.0};

ArcStats arc_stats(const Symbol& phi, const Arc& arc, Complex center, int nodes, double cap) {
  const auto v = arc_values(phi, arc, nodes);
  const Complex c = phi(center);
  ArcStats s;
  s.mean = std::accumulate(v.begin(), v.end(), Complex(0.0)) / static_cast<double>(nodes);
  for (std::size_t i = 0; i < v.size(); ++i) {
    for (std::size_t j = i + 1; j < v.size(); ++j) {
      const double rho = pseudo_hyperbolic(v[i], v[j]);
      s.rho2_double += 2.0 * rho * rho;
      double t = hyperbolic_from_rho(rho);
      if (t > cap) {
        t = cap;
        s.pair_clipped += 2;
      }
      s.tau_double[0] += 2.0 * std::sqrt(t);
      s.tau_double[1] += 2.0 * t;
      s.tau_double[2] += 2.0 * t * t;
    }
    const double rho = pseudo_hyperbolic(v[i], c);
    s.rho2_center += rho * rho;
    double t = hyperbolic_from_rho(rho);
    if (t > cap) {
      t = cap;
      ++s.center_clipped;
    }
    s.tau_center += t;
  }
  const double n = static_cast<double>(nodes);
  s.pairs = v.size() * v.size();
  s.centers = v.size();
  s.rho2_double /= n * n;
  for (auto& t : s.tau_double) t /= n * n;
  s.rho2_center /= n;
  s.tau_center /= n;
  return s;
}

struct ArcGrid {
  std::vector<int> ring;  // |I| = 2^{-ring}
  std::vector<ArcStats> stats;
};

ArcGrid make_arc_grid(const Symbol& phi, int rings, int angles, int nodes, double cap) {
  ArcGrid g;
  std::vector<std::pair<int, int>> index;
  for (int j = 1; j <= rings; ++j)
    for (int m = 0; m < angles; ++m) index.emplace_back(j, m);
  g.stats = parallel_map(index.size(), [&](std::size_t i) {
    const auto [j, m] = index[i];
    const Arc arc = make_arc(Rational(m, angles), Rational(boost::multiprecision::cpp_int(1),
                                                           boost::multiprecision::cpp_int(1) << j));
    return arc_stats(phi, arc, std::polar(level(j), kTwoPi * m / angles), nodes, cap);
  });
  for (const auto& [j, m] : index) g.ring.push_back(j);
  return g;
}

// Ladder |I| = 2^{-j}, j = 1..depth: max over the ring of `value`.
CriterionProfile arc_ladder(CriterionKind kind, double parameter, int depth, const ArcGrid& g,
                            double (*value)(const ArcStats&, double), bool double_average) {
  CriterionProfile p = make_profile(kind, parameter);
  for (int j = 1; j <= depth; ++j) {
    double best = 0.0;
    std::size_t count = 0, hits = 0;
    for (std::size_t i = 0; i < g.stats.size(); ++i) {
      if (g.ring[i] != j) continue;
      const auto& s = g.stats[i];
      best = std::max(best, value(s, parameter));
      ++count;
      hits += double_average ? s.pair_clipped : s.center_clipped;
      p.evaluations += double_average ? s.pairs : s.centers;
    }
    p.points.push_back({std::ldexp(1.0, -j), best, count, hits, false});
    p.clipped += hits;
  }
  return p;
}

double tau_double_of(const ArcStats& s, double p) {
  for (std::size_t i = 0; i < kTauPowers.size(); ++i)
    if (kTauPowers[i] == p) return s.tau_double[i];
  throw std::invalid_argument(fmt::format("tau power {} not in {{1/2, 1, 2}}", p));
}

bool contains(const std::vector<CriterionKind>& kinds, CriterionKind k) {
  return std::find(kinds.begin(), kinds.end(), k) != kinds.end();
}

}  // namespace

std::vector<CriterionProfile> all_profiles(const SelfMap& map, const std::vector<CriterionKind>& kinds,
                                           const SweepOptions& opt) {
  if (kinds.empty()) throw std::invalid_argument("no criteria selected");
  if (opt.depth < 4) throw std::invalid_argument("ladder depth must be at least 4");
  const Symbol& phi = map.symbol();
  const int K = opt.depth;
  std::vector<CriterionProfile> out;

  const bool need_l = contains(kinds, CriterionKind::L) || contains(kinds, CriterionKind::VMOA_iii) ||
                      contains(kinds, CriterionKind::W2);
  const PointGrid grid = make_point_grid(phi, K + 1, opt.angles);
  std::vector<double> lval;
  if (need_l)
    lval = parallel_map(grid.a.size(), [&](std::size_t i) { return l_statistic(phi, grid.a[i], opt.quadrature); });

  for (CriterionKind kind : kinds) {
    switch (kind) {
      case CriterionKind::L:
        out.push_back(level_profile(kind, K, grid.image_modulus, lval));
        break;
      case CriterionKind::VMOA_iii: {
        CriterionProfile p = make_profile(kind);
        for (int j = 1; j <= K; ++j) {
          double best = 0.0;
          std::size_t count = 0;
          for (std::size_t i = 0; i < grid.a.size(); ++i)
            if (grid.ring[i] == j) {
              best = std::max(best, lval[i]);
              ++count;
            }
          p.points.push_back({level(j), best, count, 0, false});
        }
        out.push_back(std::move(p));
        break;
      }
      case CriterionKind::S1: {
        const int stride = std::max(1, opt.angles / std::max(1, opt.s1_angles));
        const auto wgrid = default_w_grid(opt.s1_w_angles);
        std::vector<std::size_t> pick;
        for (std::size_t i = 0; i < grid.a.size(); ++i)
          if (grid.slot[i] % stride == 0 && grid.image_modulus[i] >= level(1)) pick.push_back(i);
        std::vector<double> key(pick.size()), val;
        try {
          val = parallel_map(pick.size(), [&](std::size_t i) { return s1_statistic(map, grid.a[pick[i]], wgrid).value; });
        } catch (const std::invalid_argument&) {
          out.push_back(make_profile(kind));  // not rational: no profile
          break;
        }
        for (std::size_t i = 0; i < pick.size(); ++i) key[i] = grid.image_modulus[pick[i]];
        out.push_back(level_profile(kind, K, key, val));
        break;
      }
      case CriterionKind::W1: {
        CriterionProfile p = make_profile(kind);
        for (int n = 1; n <= 128; n *= 2) {
          const double v = w1_statistic(phi, n, opt.seminorm_depth, opt.seminorm_angles, opt.quadrature);
          p.points.push_back({static_cast<double>(n), v, standard_a_grid(opt.seminorm_depth, opt.seminorm_angles).size(), 0,
                              false});
        }
        out.push_back(std::move(p));
        break;
      }
      case CriterionKind::W2: {
        // Per level, the witness is the deepest maximizer of the L statistic;
        // the seminorm grid also holds the 8 grid points whose images are
        // pseudo-hyperbolically closest to phi(witness).
        std::map<std::size_t, double> cache;
        std::vector<CriterionProfile::Point> pts;
        for (int k = 1; k <= K; ++k) {
          const double s = level(k);
          std::optional<std::size_t> witness;
          std::size_t count = 0;
          for (std::size_t i = 0; i < grid.a.size(); ++i) {
            if (!(grid.image_modulus[i] >= s)) continue;
            ++count;
            if (!witness || lval[i] >= lval[*witness] - 1e-12) witness = i;
          }
          if (!witness) {
            pts.push_back({s, 0.0, 0, 0, true});
            continue;
          }
          auto it = cache.find(*witness);
          if (it == cache.end()) {
            const Complex b = phi(grid.a[*witness]);
            std::vector<std::size_t> order(grid.a.size());
            std::iota(order.begin(), order.end(), std::size_t{0});
            std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
              return pseudo_hyperbolic(phi(grid.a[x]), b) < pseudo_hyperbolic(phi(grid.a[y]), b);
            });
            std::vector<Complex> extra{grid.a[*witness]};
            for (std::size_t i = 0; i < std::min<std::size_t>(8, order.size()); ++i) extra.push_back(grid.a[order[i]]);
            const auto est = w2_statistic(phi, b, extra, opt.seminorm_depth, opt.seminorm_angles, opt.quadrature);
            it = cache.emplace(*witness, est.value).first;
          }
          pts.push_back({s, it->second, count, 0, false});
        }
        // Level sets are nested, so the supremum cannot increase with k.
        double running = 0.0;
        for (auto p = pts.rbegin(); p != pts.rend(); ++p) {
          running = std::max(running, p->value);
          if (!p->vacuous) p->value = running;
        }
        CriterionProfile p = make_profile(kind);
        p.points = std::move(pts);
        out.push_back(std::move(p));
        break;
      }
      case CriterionKind::S2: {
        const BoundaryGrid bg = boundary_samples(map, opt.boundary_n);
        for (double R : {0.25, 0.5, 0.75}) {
          CriterionProfile p = make_profile(kind, R);
          std::vector<std::size_t> pick;
          for (std::size_t i = 0; i < grid.a.size(); ++i)
            if (grid.image_modulus[i] <= R) pick.push_back(i);
          const auto rows = parallel_map(pick.size(), [&](std::size_t i) {
            std::vector<double> row;
            for (int k = 1; k <= K; ++k) row.push_back(s2_statistic(bg, grid.a[pick[i]], level(k)));
            return row;
          });
          for (int k = 1; k <= K; ++k) {
            double best = 0.0;
            for (const auto& row : rows) best = std::max(best, row[k - 1]);
            p.points.push_back({level(k), best, pick.size(), 0, pick.empty()});
          }
          out.push_back(std::move(p));
        }
        break;
      }
      default:
        break;
    }
  }

  const bool need_arcs = contains(kinds, CriterionKind::A_double) || contains(kinds, CriterionKind::A_prime) ||
                         contains(kinds, CriterionKind::A_rho_ladder) || contains(kinds, CriterionKind::A_hyp_double) ||
                         contains(kinds, CriterionKind::A_hyp_center);
  if (need_arcs) {
    const ArcGrid arcs = make_arc_grid(phi, K + 1, opt.angles, opt.arc_nodes, opt.tau_cap);
    std::vector<double> key, dbl, ctr;
    for (const auto& s : arcs.stats) {
      key.push_back(std::abs(s.mean));
      dbl.push_back(s.rho2_double);
      ctr.push_back(s.rho2_center);
    }
    std::vector<CriterionProfile> arc_profiles;
    for (CriterionKind kind : kinds) {
      switch (kind) {
        case CriterionKind::A_double: {
          auto p = level_profile(kind, K, key, dbl);
          for (const auto& s : arcs.stats) p.evaluations += s.pairs;
          arc_profiles.push_back(std::move(p));
          break;
        }
        case CriterionKind::A_prime: {
          auto p = level_profile(kind, K, key, ctr);
          for (const auto& s : arcs.stats) p.evaluations += s.centers;
          arc_profiles.push_back(std::move(p));
          break;
        }
        case CriterionKind::A_rho_ladder:
          arc_profiles.push_back(arc_ladder(
              kind, 0.0, K, arcs, [](const ArcStats& s, double) { return s.rho2_double; }, true));
          break;
        case CriterionKind::A_hyp_double:
          for (double p : kTauPowers) arc_profiles.push_back(arc_ladder(kind, p, K, arcs, tau_double_of, true));
          break;
        case CriterionKind::A_hyp_center:
          arc_profiles.push_back(arc_ladder(
              kind, 0.0, K, arcs, [](const ArcStats& s, double) { return s.tau_center; }, false));
          break;
        default:
          break;
      }
    }
    out.insert(out.end(), arc_profiles.begin(), arc_profiles.end());
  }
  return out;
}

CriterionProfile criterion_profile(const SelfMap& phi, CriterionKind kind, const SweepOptions& opt, double parameter) {
  for (auto& p : all_profiles(phi, {kind}, opt))
    if ((kind != CriterionKind::A_hyp_double && kind != CriterionKind::S2) || p.parameter == parameter) return p;
  throw std::invalid_argument(fmt::format("no {} profile with parameter {}", to_string(kind), parameter));
}

std::string to_string(SubVerdict v) {
  switch (v) {
    case SubVerdict::vanishing:
      return "vanishing";
    case SubVerdict::failing:
      return "failing";
    default:
      return "inconclusive";
  }
}

std::string to_string(Classification c) {
  switch (c) {
    case Classification::compact_evidence:
      return "compact-evidence";
    case Classification::non_compact_evidence:
      return "non-compact-evidence";
    case Classification::inconsistent:
      return "inconsistent";
    default:
      return "inconclusive";
  }
}

SubVerdict classify_profile(const CriterionProfile& profile, double epsilon, double delta) {
  if (profile.points.empty()) return SubVerdict::inconclusive;
  const auto& pts = profile.points;
  const std::size_t tail_len = std::min<std::size_t>(4, pts.size());
  std::vector<double> tail;
  for (std::size_t i = pts.size() - tail_len; i < pts.size(); ++i) tail.push_back(pts[i].value);
  const double last = tail.back();
  const bool heavily_clipped =
      profile.evaluations > 0 && static_cast<double>(profile.clipped) > 0.01 * static_cast<double>(profile.evaluations);
  if (heavily_clipped) return last >= delta ? SubVerdict::failing : SubVerdict::inconclusive;
  bool decreasing = true;
  for (std::size_t i = 1; i < tail.size(); ++i)
    if (tail[i] > tail[i - 1] + 1e-12) decreasing = false;
  if (last < epsilon && decreasing) return SubVerdict::vanishing;
  const double low = *std::min_element(tail.begin(), tail.end());
  if (last >= delta && low >= delta && last >= 0.5 * tail.front()) return SubVerdict::failing;
  return SubVerdict::inconclusive;
}

std::vector<CriterionKind> consistency_kinds(bool vmoa) {
  std::vector<CriterionKind> k{CriterionKind::L,      CriterionKind::S1, CriterionKind::A_double,
                               CriterionKind::A_prime, CriterionKind::W1, CriterionKind::W2};
  if (vmoa) {
    k.insert(k.end(), {CriterionKind::VMOA_iii, CriterionKind::A_rho_ladder, CriterionKind::A_hyp_double,
                       CriterionKind::A_hyp_center});
  }
  return k;
}

std::optional<SubVerdict> VerdictReport::find(const std::string& label) const {
  for (const auto& e : sub_verdicts)
    if (e.label == label) return e.verdict;
  return std::nullopt;
}

nlohmann::json VerdictReport::to_json() const {
  nlohmann::json subs = nlohmann::json::array();
  for (const auto& e : sub_verdicts)
    subs.push_back({{"criterion", e.label}, {"verdict", to_string(e.verdict)}, {"final_value", e.final_value}});
  nlohmann::json j{{"classification", to_string(classification)},
                   {"reason", reason},
                   {"sub_verdicts", subs},
                   {"conflicts", conflicts}};
  j["s2_satisfied"] = s2_satisfied ? nlohmann::json(*s2_satisfied) : nlohmann::json(nullptr);
  return j;
}

VerdictReport verdict(const SelfMap& phi, const std::vector<CriterionProfile>& profiles, double epsilon,
                      double delta) {
  const CriterionProfile* l = nullptr;
  for (const auto& p : profiles)
    if (p.kind == CriterionKind::L) l = &p;
  if (!l) throw std::invalid_argument("verdict requires the L profile");

  // Rational symbols without poles on the closed disc lie in the disc algebra, hence in VMOA.
  bool vmoa = true;
  try {
    to_rational(phi.symbol());
  } catch (const std::exception&) {
    vmoa = false;
  }
  const auto kinds = consistency_kinds(vmoa);

  VerdictReport r;
  std::vector<std::string> vanish, fail;
  for (const auto& p : profiles) {
    const SubVerdict v = classify_profile(p, epsilon, delta);
    r.sub_verdicts.push_back({p.label(), v, p.points.empty() ? 0.0 : p.points.back().value});
    if (!contains(kinds, p.kind)) continue;
    if (v == SubVerdict::vanishing) vanish.push_back(p.label());
    if (v == SubVerdict::failing) fail.push_back(p.label());
  }
  bool any_s2 = false, s2_all = true;
  for (const auto& e : r.sub_verdicts)
    if (e.label.rfind("S2", 0) == 0) {
      any_s2 = true;
      s2_all = s2_all && e.verdict == SubVerdict::vanishing;
    }
  if (any_s2) r.s2_satisfied = s2_all;

  const SubVerdict lv = classify_profile(*l, epsilon, delta);
  const bool l_vacuous = !l->points.empty() && l->points.back().vacuous;
  if (!vanish.empty() && !fail.empty()) {
    r.classification = Classification::inconsistent;
    for (const auto& v : vanish)
      for (const auto& f : fail) r.conflicts.push_back(fmt::format("{} vanishes but {} fails", v, f));
    r.reason = fmt::format("equivalent criteria disagree ({} conflicts)", r.conflicts.size());
  } else if (lv == SubVerdict::vanishing) {
    r.classification = Classification::compact_evidence;
    r.reason = l_vacuous ? "sup|phi|<1, (L) vacuous"
                         : fmt::format("(L) profile decays to {:.6g}", l->points.back().value);
  } else if (lv == SubVerdict::failing) {
    r.classification = Classification::non_compact_evidence;
    r.reason = fmt::format("(L) profile bounded below, final value {:.6g}", l->points.back().value);
  } else {
    r.classification = Classification::inconclusive;
    r.reason = "(L) profile neither vanishes nor stays above delta";
  }
  return r;
}

std::string profiles_csv(const std::vector<CriterionProfile>& profiles) {
  struct Row {
    std::string kind;
    double approach;
    std::string line;
  };
  std::vector<Row> rows;
  for (const auto& p : profiles)
    for (const auto& pt : p.points)
      rows.push_back({p.label(), pt.approach,
                      fmt::format("{},{:.17g},{:.17g},{},{}\n", p.label(), pt.approach, pt.value, pt.grid_size,
                                  pt.tau_cap_hits)});
  std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    return a.kind != b.kind ? a.kind < b.kind : a.approach < b.approach;
  });
  std::string out = "kind,approach,value,grid_size,tau_cap_hits\n";
  for (const auto& r : rows) out += r.line;
  return out;
}

}  // namespace oscillab
