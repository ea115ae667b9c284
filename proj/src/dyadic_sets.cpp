#include "oscillab/dyadic_sets.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

#include <fmt/format.h>

namespace oscillab {

namespace {

using boost::multiprecision::cpp_int;

Rational pow2_inv(int level) { return Rational(cpp_int(1), cpp_int(1) << level); }

Rational floor_rational(const Rational& x) {
  cpp_int q = boost::multiprecision::numerator(x) / boost::multiprecision::denominator(x);
  if (Rational(q) > x) --q;
  return Rational(q);
}

bool is_dyadic(const Rational& x, int max_level) {
  const cpp_int d = boost::multiprecision::denominator(x);
  return (d & (d - 1)) == 0 && d <= (cpp_int(1) << max_level);
}

std::int64_t to_int64(const cpp_int& v) {
  if (v > std::numeric_limits<std::int64_t>::max() || v < std::numeric_limits<std::int64_t>::min())
    throw std::out_of_range("fraction component exceeds 64 bits");
  return v.convert_to<std::int64_t>();
}

}  // namespace

ArcSet ArcSet::from_intervals(std::vector<Interval> pieces) {
  std::vector<Interval> split;
  for (auto& p : pieces) {
    if (p.lo < 0 || p.lo > 1 || p.hi < 0 || p.hi > 1)
      throw std::invalid_argument("arc endpoints must lie in [0, 1]");
    if (p.lo == p.hi) continue;
    if (p.lo < p.hi) {
      split.push_back(std::move(p));
    } else {
      split.push_back({p.lo, Rational(1)});
      split.push_back({Rational(0), p.hi});
    }
  }
  std::sort(split.begin(), split.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  ArcSet out;
  for (auto& p : split) {
    if (p.lo == p.hi) continue;
    if (!out.pieces_.empty() && p.lo <= out.pieces_.back().hi) {
      if (p.hi > out.pieces_.back().hi) out.pieces_.back().hi = p.hi;
    } else {
      out.pieces_.push_back(std::move(p));
    }
  }
  return out;
}

ArcSet ArcSet::full() { return from_intervals({{Rational(0), Rational(1)}}); }

ArcSet ArcSet::centered(const Rational& center, const Rational& length) {
  if (length <= 0) return {};
  if (length >= 1) return full();
  Rational lo = center - length / 2;
  Rational hi = center + length / 2;
  lo -= floor_rational(lo);
  hi -= floor_rational(hi);
  if (lo < hi) return from_intervals({{lo, hi}});
  return from_intervals({{lo, Rational(1)}, {Rational(0), hi}});
}

Rational ArcSet::measure() const {
  Rational m = 0;
  for (const auto& p : pieces_) m += p.length();
  return m;
}

Rational ArcSet::measure_in(const Rational& lo, const Rational& hi) const {
  Rational m = 0;
  for (const auto& p : pieces_) {
    if (p.lo >= hi) break;
    const Rational a = std::max(p.lo, lo);
    const Rational b = std::min(p.hi, hi);
    if (a < b) m += b - a;
  }
  return m;
}

ArcSet ArcSet::complement() const {
  ArcSet out;
  Rational cursor = 0;
  for (const auto& p : pieces_) {
    if (cursor < p.lo) out.pieces_.push_back({cursor, p.lo});
    cursor = p.hi;
  }
  if (cursor < 1) out.pieces_.push_back({cursor, Rational(1)});
  return out;
}

ArcSet ArcSet::intersect(const ArcSet& other) const {
  ArcSet out;
  std::size_t i = 0, j = 0;
  while (i < pieces_.size() && j < other.pieces_.size()) {
    const auto& a = pieces_[i];
    const auto& b = other.pieces_[j];
    const Rational lo = std::max(a.lo, b.lo);
    const Rational hi = std::min(a.hi, b.hi);
    if (lo < hi) out.pieces_.push_back({lo, hi});
    if (a.hi < b.hi)
      ++i;
    else
      ++j;
  }
  return out;
}

ArcSet ArcSet::subtract(const ArcSet& other) const { return intersect(other.complement()); }

ArcSet ArcSet::unite(const ArcSet& other) const {
  auto all = pieces_;
  all.insert(all.end(), other.pieces_.begin(), other.pieces_.end());
  return from_intervals(std::move(all));
}

nlohmann::json ArcSet::to_json() const {
  auto out = nlohmann::json::array();
  for (const auto& p : pieces_) {
    using boost::multiprecision::denominator;
    using boost::multiprecision::numerator;
    out.push_back({to_int64(numerator(p.lo)), to_int64(denominator(p.lo)), to_int64(numerator(p.hi)),
                   to_int64(denominator(p.hi))});
  }
  return out;
}

ArcSet ArcSet::from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw std::invalid_argument("arc set must be a JSON array");
  std::vector<Interval> pieces;
  for (const auto& e : j) {
    if (!e.is_array() || e.size() != 4) throw std::invalid_argument("arc entries are [num_lo, den_lo, num_hi, den_hi]");
    const auto dl = e[1].get<std::int64_t>(), dh = e[3].get<std::int64_t>();
    if (dl <= 0 || dh <= 0) throw std::invalid_argument("denominators must be positive");
    pieces.push_back({Rational(cpp_int(e[0].get<std::int64_t>()), cpp_int(dl)),
                      Rational(cpp_int(e[2].get<std::int64_t>()), cpp_int(dh))});
  }
  return from_intervals(std::move(pieces));
}

Rational DyadicArc::lo() const { return Rational(cpp_int(index), cpp_int(1) << level); }
Rational DyadicArc::hi() const { return Rational(cpp_int(index + 1), cpp_int(1) << level); }
Rational DyadicArc::length() const { return pow2_inv(level); }

bool DyadicArc::contains(const DyadicArc& other) const {
  if (other.level < level) return false;
  return (other.index >> (other.level - level)) == index;
}

bool nested_or_disjoint(const DyadicArc& a, const DyadicArc& b) {
  if (a.contains(b) || b.contains(a)) return true;
  return a.hi() <= b.lo() || b.hi() <= a.lo();
}

Rational intersect_measure(const ArcSet& e, const DyadicArc& q) { return e.measure_in(q.lo(), q.hi()); }

ArcSet to_arc_set(const std::vector<DyadicArc>& arcs) {
  std::vector<Interval> pieces;
  for (const auto& q : arcs) pieces.push_back({q.lo(), q.hi()});
  return ArcSet::from_intervals(std::move(pieces));
}

SnapResult snap_to_dyadic(const ArcSet& e, int bits) {
  const cpp_int scale = cpp_int(1) << bits;
  bool moved = false;
  auto snap = [&](const Rational& x) {
    const Rational scaled = x * Rational(scale);
    Rational rounded = floor_rational(scaled + Rational(1, 2));
    const Rational y = rounded / Rational(scale);
    if (y != x) moved = true;
    return y;
  };
  std::vector<Interval> pieces;
  for (const auto& p : e.intervals()) pieces.push_back({snap(p.lo), snap(p.hi)});
  std::erase_if(pieces, [](const Interval& p) { return !(p.lo < p.hi); });
  return {ArcSet::from_intervals(std::move(pieces)), moved};
}

DepthCapReached::DepthCapReached(std::vector<DyadicArc> arcs)
    : std::runtime_error(fmt::format("dyadic depth cap reached with {} unresolved arcs", arcs.size())),
      unresolved(std::move(arcs)) {}

DensityCore density_core(const ArcSet& e, int sample_count, int k_max, int depth_cap) {
  const Rational measure = e.measure();
  if (measure <= 0) throw std::invalid_argument("density core requires |E| > 0");
  DensityCore out;
  out.lambda = Rational(1) - measure / 2;
  out.bound = measure / 8;
  const ArcSet ec = e.complement();

  std::vector<DyadicArc> stack{{0, 0}}, unresolved;
  while (!stack.empty()) {
    const DyadicArc q = stack.back();
    stack.pop_back();
    const Rational outside = intersect_measure(ec, q);
    if (outside > out.lambda * q.length()) {
      out.stopping.push_back(q);
      continue;
    }
    if (outside == 0) continue;  // no subarc can violate
    if (q.level >= depth_cap) {
      unresolved.push_back(q);
      continue;
    }
    stack.push_back(q.right());
    stack.push_back(q.left());
  }
  if (!unresolved.empty()) throw DepthCapReached(std::move(unresolved));
  std::sort(out.stopping.begin(), out.stopping.end());
  out.core = e.subtract(to_arc_set(out.stopping));
  const Rational core_measure = out.core.measure();
  out.core_positive = core_measure > 0;
  out.bound_holds = out.core_positive;
  if (!out.core_positive) return out;

  // Sample points at the midpoints of equal-measure slices of the core.
  for (int m = 0; m < sample_count; ++m) {
    Rational target = core_measure * Rational(2 * m + 1, 2 * sample_count);
    Rational zeta = 0;
    for (const auto& p : out.core.intervals()) {
      if (target < p.length()) {
        zeta = p.lo + target;
        break;
      }
      target -= p.length();
    }
    for (int k = 0; k <= k_max; ++k) {
      const Rational len = pow2_inv(k);
      const Rational ratio = ArcSet::centered(zeta, len).intersect(e).measure() / len;
      if (ratio < out.bound) out.bound_holds = false;
      out.samples.push_back({zeta, k, ratio});
    }
  }
  return out;
}

std::vector<DyadicArc> wik_decomposition(const ArcSet& e, const Rational& lambda, int depth_cap) {
  if (!(lambda > 0 && lambda < 1)) throw std::invalid_argument("lambda must lie in (0, 1)");
  if (e.measure() > lambda)
    throw std::invalid_argument(fmt::format("Wik decomposition requires |E| <= lambda ({} > {})",
                                            format_rational(e.measure()), format_rational(lambda)));
  for (const auto& p : e.intervals())
    if (!is_dyadic(p.lo, depth_cap) || !is_dyadic(p.hi, depth_cap))
      throw std::invalid_argument("Wik decomposition needs dyadic endpoints; snap the set first");
  std::vector<DyadicArc> family, stack{{0, 0}}, unresolved;
  const Rational half = lambda / 2;
  while (!stack.empty()) {
    const DyadicArc q = stack.back();
    stack.pop_back();
    const Rational inside = intersect_measure(e, q);
    if (inside == 0) continue;
    if (inside >= half * q.length()) {
      family.push_back(q);
      continue;
    }
    if (q.level >= depth_cap) {
      unresolved.push_back(q);
      continue;
    }
    stack.push_back(q.right());
    stack.push_back(q.left());
  }
  if (!unresolved.empty()) throw DepthCapReached(std::move(unresolved));
  std::sort(family.begin(), family.end());
  return family;
}

WikCheck verify_wik(const ArcSet& e, const Rational& lambda, const std::vector<DyadicArc>& family) {
  WikCheck c;
  c.sandwich = true;
  for (const auto& q : family) {
    const Rational inside = intersect_measure(e, q);
    if (inside < lambda / 2 * q.length() || inside > lambda * q.length()) c.sandwich = false;
  }
  c.disjoint = true;
  for (std::size_t i = 0; i < family.size(); ++i)
    for (std::size_t j = i + 1; j < family.size(); ++j)
      if (!(family[i].hi() <= family[j].lo() || family[j].hi() <= family[i].lo())) c.disjoint = false;
  c.residue = e.subtract(to_arc_set(family)).measure();
  return c;
}

Rational parse_rational(const std::string& text) {
  try {
    const auto slash = text.find('/');
    if (slash == std::string::npos) return Rational(cpp_int(text));
    const cpp_int den(text.substr(slash + 1));
    if (den == 0) throw std::invalid_argument("zero denominator");
    return Rational(cpp_int(text.substr(0, slash)), den);
  } catch (const std::runtime_error&) {
    throw std::invalid_argument(fmt::format("cannot parse rational \"{}\"", text));
  }
}

std::string format_rational(const Rational& r) {
  std::ostringstream os;
  os << r;
  return os.str();
}

}  // namespace oscillab
