// Compactness statistics evaluated along boundary-approach ladders, and the
// verdict logic that combines them.
#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "oscillab/hardy_oscillation.hpp"
#include "oscillab/symbols.hpp"

namespace oscillab {

enum class CriterionKind {
  L,             // sup over |phi(a)| >= s of ||sigma_{phi(a)} o phi o sigma_a||
  VMOA_iii,      // the same quantity over |a| = r
  S1,            // counting-function ratio over |phi(a)| >= s
  A_double,      // rho^2 double arc average over |phi_I| >= s
  A_prime,       // rho^2 centre average over |phi_I| >= s
  A_rho_ladder,  // rho^2 double arc average over |I| = 2^{-j}
  A_hyp_double,  // capped tau^p double arc average over |I| = 2^{-j}
  A_hyp_center,  // capped tau centre average over |I| = 2^{-j}
  W1,            // seminorm of phi^n
  W2,            // seminorm of sigma_{phi(a)} o phi over |phi(a)| >= s
  S2,            // Poisson-weighted measure of {|phi o sigma_a| > t}, |phi(a)| <= R
};

std::string to_string(CriterionKind kind);
CriterionKind kind_from_string(const std::string& name);

struct SweepOptions {
  int depth = 12;             // ladder levels K
  int angles = 32;            // angular count per radius for L, S1 and arc grids
  int seminorm_angles = 8;    // angular count of the coarse grids inside W1 and W2
  int seminorm_depth = 6;     // radial depth of those grids
  int arc_nodes = 256;        // midpoint nodes per arc
  std::size_t boundary_n = 1 << 14;  // boundary grid for S2 counting
  int s1_angles = 8;          // a-points per radius for S1
  int s1_w_angles = 32;
  double tau_cap = kDefaultTauCap;
  double epsilon = 0.15;
  double delta = 0.1;
  QuadratureOptions quadrature;
};

struct CriterionProfile {
  CriterionKind kind;
  double parameter = 0.0;  // p for A-hyp-double, R for S2
  struct Point {
    double approach;
    double value;
    std::size_t grid_size;      // statistics behind this level (0 when vacuous)
    std::size_t tau_cap_hits;
    bool vacuous = false;
  };
  std::vector<Point> points;
  std::size_t evaluations = 0;  // metric evaluations across the profile
  std::size_t clipped = 0;      // of which the tau cap was active
  std::string label() const;    // kind plus parameter, e.g. "S2[R=0.75]"
};

struct LValue {
  double value;
  double residual;  // |direct - Poisson| on the square-root scale
  std::size_t n;
};

/// ||sigma_{phi(a)} o phi o sigma_a||_{H^2} through both quadrature routes; the
/// Poisson route is returned. Throws QuadratureError when the routes never agree.
LValue l_statistic_routes(const Symbol& phi, Complex a, const QuadratureOptions& opt = {});
double l_statistic(const Symbol& phi, Complex a, const QuadratureOptions& opt = {});

/// phi_I by the midpoint rule with `nodes` nodes inside I (>= 64).
Complex arc_mean(const Symbol& phi, const Arc& arc, int nodes = 256);

struct ArcMetric {
  enum class Kind { rho_squared, tau_power } kind = Kind::rho_squared;
  double power = 1.0;
  double cap = kDefaultTauCap;
  static ArcMetric rho2() { return {}; }
  static ArcMetric tau(double p = 1.0, double cap = kDefaultTauCap) { return {Kind::tau_power, p, cap}; }
};

struct ArcAverage {
  double value;
  std::size_t evaluations;
  std::size_t clipped;
};

ArcAverage arc_double_average(const Symbol& phi, const Arc& arc, const ArcMetric& metric, int nodes = 256);
ArcAverage arc_center_average(const Symbol& phi, const Arc& arc, const ArcMetric& metric, int nodes = 256);

/// Seminorm of phi^n over the standard grid of the given depth and angular count.
double w1_statistic(const Symbol& phi, int n, int depth = 12, int angles = 64, const QuadratureOptions& opt = {});

/// Seminorm of sigma_b o phi over a grid containing b, the extra points, and a
/// coarse standard grid.
SeminormEstimate w2_statistic(const Symbol& phi, Complex b, const std::vector<Complex>& extra = {}, int depth = 12,
                              int angles = 8, const QuadratureOptions& opt = {});

/// Poisson-weighted fraction of boundary samples with |phi(zeta)| > t, i.e. the
/// normalized measure of {|phi o sigma_a| > t}.
double s2_statistic(const BoundaryGrid& grid, Complex a, double t);
double s2_statistic(const SelfMap& phi, Complex a, double t, std::size_t n = 1 << 14);

/// One profile; A_hyp_double reads `parameter` as the power p and S2 as R.
CriterionProfile criterion_profile(const SelfMap& phi, CriterionKind kind, const SweepOptions& opt,
                                   double parameter = 0.0);

/// Every profile the verdict uses, sharing the expensive per-point statistics.
std::vector<CriterionProfile> all_profiles(const SelfMap& phi, const std::vector<CriterionKind>& kinds,
                                           const SweepOptions& opt);

enum class SubVerdict { vanishing, failing, inconclusive };
std::string to_string(SubVerdict v);

enum class Classification { compact_evidence, non_compact_evidence, inconclusive, inconsistent };
std::string to_string(Classification c);

SubVerdict classify_profile(const CriterionProfile& profile, double epsilon, double delta);

struct SubVerdictEntry {
  std::string label;
  SubVerdict verdict;
  double final_value;
};

struct VerdictReport {
  Classification classification;
  std::string reason;
  std::vector<SubVerdictEntry> sub_verdicts;  // in profile order
  std::optional<bool> s2_satisfied;                               // when S2 profiles were computed
  std::vector<std::string> conflicts;
  nlohmann::json to_json() const;
  std::optional<SubVerdict> find(const std::string& label) const;
};

/// Kinds whose sub-verdicts must agree. The VMOA-specific kinds join when
/// `vmoa` is set.
std::vector<CriterionKind> consistency_kinds(bool vmoa);

VerdictReport verdict(const SelfMap& phi, const std::vector<CriterionProfile>& profiles, double epsilon = 0.15,
                      double delta = 0.1);

/// Rows "kind,approach,value,grid_size,tau_cap_hits" sorted by (kind, approach).
std::string profiles_csv(const std::vector<CriterionProfile>& profiles);

}  // namespace oscillab
