// Exact-measure arc sets on the circle (angles in turns, [0, 1)) and the two
// dyadic stopping-time constructions: the density core and Wik's decomposition.
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "oscillab/disc_geometry.hpp"

namespace oscillab {

/// Half-open angle interval [lo, hi) with 0 <= lo < hi <= 1.
struct Interval {
  Rational lo, hi;
  Rational length() const { return hi - lo; }
  bool operator==(const Interval&) const = default;
};

class ArcSet {
 public:
  ArcSet() = default;
  /// Normalizes: sorts, merges overlapping or abutting pieces. An interval with
  /// lo > hi wraps through angle 0.
  static ArcSet from_intervals(std::vector<Interval> pieces);
  static ArcSet full();
  /// Arc of the given length centred at `center` (turns), wrapping as needed.
  static ArcSet centered(const Rational& center, const Rational& length);

  const std::vector<Interval>& intervals() const { return pieces_; }
  bool empty() const { return pieces_.empty(); }
  Rational measure() const;
  /// |E ∩ [lo, hi)| for 0 <= lo <= hi <= 1.
  Rational measure_in(const Rational& lo, const Rational& hi) const;

  ArcSet complement() const;
  ArcSet intersect(const ArcSet& other) const;
  ArcSet subtract(const ArcSet& other) const;
  ArcSet unite(const ArcSet& other) const;

  bool operator==(const ArcSet&) const = default;

  /// [[num_lo, den_lo, num_hi, den_hi], ...]
  nlohmann::json to_json() const;
  static ArcSet from_json(const nlohmann::json& j);

 private:
  std::vector<Interval> pieces_;
};

/// [k 2^{-n}, (k + 1) 2^{-n}).
struct DyadicArc {
  int level = 0;
  std::uint64_t index = 0;

  Rational lo() const;
  Rational hi() const;
  Rational length() const;
  DyadicArc left() const { return {level + 1, 2 * index}; }
  DyadicArc right() const { return {level + 1, 2 * index + 1}; }
  bool contains(const DyadicArc& other) const;
  auto operator<=>(const DyadicArc&) const = default;
};

/// True when one arc contains the other or their interiors are disjoint.
bool nested_or_disjoint(const DyadicArc& a, const DyadicArc& b);

Rational intersect_measure(const ArcSet& e, const DyadicArc& q);
ArcSet to_arc_set(const std::vector<DyadicArc>& arcs);

struct SnapResult {
  ArcSet set;
  bool snapped;  // some endpoint moved
};

/// Rounds every endpoint to the nearest multiple of 2^{-bits}.
SnapResult snap_to_dyadic(const ArcSet& e, int bits = 20);

inline constexpr int kDyadicDepthCap = 40;

class DepthCapReached : public std::runtime_error {
 public:
  explicit DepthCapReached(std::vector<DyadicArc> unresolved);
  std::vector<DyadicArc> unresolved;
};

struct DensitySample {
  Rational zeta;  // turns
  int k;          // arc I(r zeta) with r = 1 - 2^{-k}, length 2^{-k}
  Rational ratio;  // |I ∩ E| / |I|
};

struct DensityCore {
  Rational lambda;                 // 1 - |E|/2
  std::vector<DyadicArc> stopping;  // maximal arcs with |I ∩ E^c| > lambda |I|
  ArcSet core;                      // E minus the stopping arcs
  std::vector<DensitySample> samples;
  Rational bound;                   // |E|/8
  bool core_positive = false;
  bool bound_holds = false;
};

/// Requires |E| > 0. Samples `sample_count` points of the core against the arc
/// ladder k = 0..k_max.
DensityCore density_core(const ArcSet& e, int sample_count = 16, int k_max = 12, int depth_cap = kDyadicDepthCap);

struct WikCheck {
  bool sandwich = false;  // lambda/2 |Q| <= |Q ∩ E| <= lambda |Q| for every Q
  bool disjoint = false;  // pairwise disjoint interiors
  Rational residue;       // |E \ union Q|
  bool ok() const { return sandwich && disjoint && residue == 0; }
};

/// Maximal dyadic Q with |Q ∩ E| >= lambda/2 |Q|. Requires |E| <= lambda,
/// 0 < lambda < 1, and dyadic endpoints (snap first otherwise).
std::vector<DyadicArc> wik_decomposition(const ArcSet& e, const Rational& lambda, int depth_cap = kDyadicDepthCap);
WikCheck verify_wik(const ArcSet& e, const Rational& lambda, const std::vector<DyadicArc>& family);

/// Parses "p/q" or an integer.
Rational parse_rational(const std::string& text);
std::string format_rational(const Rational& r);

}  // namespace oscillab
