#include "oscillab/lab.hpp"

#include <algorithm>
#include <array>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <random>
#include <set>

#include <fmt/format.h>

#include "oscillab/nevanlinna.hpp"
#include "oscillab/parallel.hpp"

namespace oscillab {

using nlohmann::json;

namespace {

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

void require_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(fmt::format("{} must be a JSON object", where));
  for (const auto& [key, value] : j.items())
    if (!allowed.count(key)) throw ConfigError(fmt::format("unknown key \"{}\" in {}", key, where));
}

template <class T>
void read(const json& j, const char* key, T& target) {
  if (!j.contains(key)) return;
  try {
    target = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(fmt::format("bad value for \"{}\": {}", key, e.what()));
  }
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(fmt::format("cannot write {}", path.string()));
  out << content;
  if (!out) throw std::runtime_error(fmt::format("cannot write {}", path.string()));
}

std::vector<CriterionKind> parse_kinds(const std::vector<std::string>& names) {
  std::vector<CriterionKind> kinds;
  for (const auto& n : names) {
    try {
      kinds.push_back(kind_from_string(n));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  return kinds;
}

std::string rational_text(const Rational& r) { return format_rational(r); }

json arcs_json(const std::vector<DyadicArc>& arcs) {
  json out = json::array();
  for (const auto& q : arcs)
    out.push_back({{"level", q.level}, {"index", q.index}, {"lo", rational_text(q.lo())}, {"hi", rational_text(q.hi())}});
  return out;
}

}  // namespace

SweepConfig SweepConfig::from_json(const json& j) {
  require_keys(j, {"symbol", "criteria", "depth", "grid", "thresholds", "tau_cap", "outputs", "workers", "seed"},
               "config");
  if (!j.contains("symbol")) throw ConfigError("config lacks \"symbol\"");
  if (!j.contains("criteria")) throw ConfigError("config lacks \"criteria\"");
  SweepConfig c;
  c.symbol = j.at("symbol");
  read(j, "criteria", c.criteria);
  read(j, "depth", c.options.depth);
  if (j.contains("grid")) {
    const json& g = j.at("grid");
    require_keys(g,
                 {"angles", "seminorm_angles", "seminorm_depth", "arc_nodes", "boundary_n", "s1_angles", "s1_w_angles",
                  "quadrature_n0", "quadrature_n_max", "quadrature_tol"},
                 "grid");
    read(g, "angles", c.options.angles);
    read(g, "seminorm_angles", c.options.seminorm_angles);
    read(g, "seminorm_depth", c.options.seminorm_depth);
    read(g, "arc_nodes", c.options.arc_nodes);
    read(g, "boundary_n", c.options.boundary_n);
    read(g, "s1_angles", c.options.s1_angles);
    read(g, "s1_w_angles", c.options.s1_w_angles);
    read(g, "quadrature_n0", c.options.quadrature.n0);
    read(g, "quadrature_n_max", c.options.quadrature.n_max);
    read(g, "quadrature_tol", c.options.quadrature.tol);
  }
  if (j.contains("thresholds")) {
    const json& t = j.at("thresholds");
    require_keys(t, {"epsilon", "delta"}, "thresholds");
    read(t, "epsilon", c.options.epsilon);
    read(t, "delta", c.options.delta);
  }
  read(j, "tau_cap", c.options.tau_cap);
  if (j.contains("outputs")) {
    const json& o = j.at("outputs");
    require_keys(o, {"csv", "json", "svg"}, "outputs");
    read(o, "csv", c.csv_path);
    read(o, "json", c.json_path);
    read(o, "svg", c.svg_path);
  }
  read(j, "workers", c.workers);
  read(j, "seed", c.seed);
  c.validate();
  return c;
}

json SweepConfig::to_json() const {
  const auto& o = options;
  return json{{"symbol", symbol},
              {"criteria", criteria},
              {"depth", o.depth},
              {"grid",
               {{"angles", o.angles},
                {"seminorm_angles", o.seminorm_angles},
                {"seminorm_depth", o.seminorm_depth},
                {"arc_nodes", o.arc_nodes},
                {"boundary_n", o.boundary_n},
                {"s1_angles", o.s1_angles},
                {"s1_w_angles", o.s1_w_angles},
                {"quadrature_n0", o.quadrature.n0},
                {"quadrature_n_max", o.quadrature.n_max},
                {"quadrature_tol", o.quadrature.tol}}},
              {"thresholds", {{"epsilon", o.epsilon}, {"delta", o.delta}}},
              {"tau_cap", o.tau_cap},
              {"outputs", {{"csv", csv_path}, {"json", json_path}, {"svg", svg_path}}},
              {"workers", workers},
              {"seed", seed}};
}

std::string SweepConfig::serialize() const { return to_json().dump(2) + "\n"; }

void SweepConfig::validate() const {
  const auto& o = options;
  auto check = [](bool ok, const std::string& what) {
    if (!ok) throw ConfigError(what);
  };
  check(!criteria.empty(), "no criteria selected");
  parse_kinds(criteria);
  try {
    Symbol::from_json(symbol);
  } catch (const std::exception& e) {
    throw ConfigError(fmt::format("invalid symbol: {}", e.what()));
  }
  check(o.depth >= 4 && o.depth <= 20, "depth must lie in [4, 20]");
  check(o.angles >= 1 && o.angles <= 1024, "angles must lie in [1, 1024]");
  check(o.seminorm_angles >= 1 && o.seminorm_angles <= 256, "seminorm_angles must lie in [1, 256]");
  check(o.seminorm_depth >= 1 && o.seminorm_depth <= 16, "seminorm_depth must lie in [1, 16]");
  check(o.arc_nodes >= 64 && o.arc_nodes <= 4096, "arc_nodes must lie in [64, 4096]");
  check(o.boundary_n >= 64 && is_power_of_two(o.boundary_n), "boundary_n must be a power of two >= 64");
  check(o.s1_angles >= 1 && o.s1_w_angles >= 1, "S1 grid counts must be positive");
  check(o.quadrature.n0 >= 64 && is_power_of_two(o.quadrature.n0), "quadrature_n0 must be a power of two >= 64");
  check(o.quadrature.n_max >= o.quadrature.n0 && o.quadrature.n_max <= (std::size_t{1} << 24),
        "quadrature_n_max must lie in [quadrature_n0, 2^24]");
  check(o.quadrature.tol > 0.0 && o.quadrature.tol < 1e-2, "quadrature_tol must lie in (0, 0.01)");
  check(o.epsilon > 0.0 && o.epsilon < 1.0, "epsilon must lie in (0, 1)");
  check(o.delta > 0.0 && o.delta < 1.0, "delta must lie in (0, 1)");
  check(o.tau_cap > 0.0, "tau_cap must be positive");
  check(workers >= 1 && workers <= 256, "workers must lie in [1, 256]");
}

SweepResult run_sweep(const SweepConfig& config) {
  config.validate();
  if (!std::getenv("OSCILLAB_WORKERS")) set_worker_count(config.workers);
  auto kinds = parse_kinds(config.criteria);
  if (std::find(kinds.begin(), kinds.end(), CriterionKind::L) == kinds.end()) kinds.insert(kinds.begin(), CriterionKind::L);
  std::optional<SelfMap> phi;
  try {
    phi.emplace(Symbol::from_json(config.symbol));
  } catch (const std::exception& e) {
    throw ConfigError(fmt::format("invalid symbol: {}", e.what()));
  }

  SweepResult r;
  r.profiles = all_profiles(*phi, kinds, config.options);
  r.report = verdict(*phi, r.profiles, config.options.epsilon, config.options.delta);
  r.csv = profiles_csv(r.profiles);
  json meta = config.to_json();
  meta.erase("workers");  // outputs must not depend on the worker count
  meta.erase("outputs");
  r.json = json{{"config", meta}, {"symbol", phi->symbol().describe()}, {"verdict", r.report.to_json()}}.dump(2) + "\n";
  if (!config.csv_path.empty()) write_file(config.csv_path, r.csv);
  if (!config.json_path.empty()) write_file(config.json_path, r.json);
  if (!config.svg_path.empty()) write_file(config.svg_path, profiles_svg(r.profiles, phi->symbol().describe()));
  return r;
}

std::string to_string(Expected e) { return e == Expected::compact ? "compact" : "non-compact"; }

std::vector<GalleryEntry> builtin_gallery() {
  const Symbol z = Symbol::identity();
  return {
      {"constant_0.3", Symbol::constant(0.3), Expected::compact, "constant symbols give rank-one operators"},
      {"half_z", Symbol::scale(0.5, z), Expected::compact, "sup|phi| = 1/2 < 1"},
      {"identity", z, Expected::non_compact, "the identity operator on an infinite-dimensional space"},
      {"z_squared", Symbol::blaschke(1.0, {0.0, 0.0}), Expected::non_compact,
       "inner symbol: every boundary value is unimodular"},
      {"sigma_0.5", Symbol::moebius(0.5), Expected::non_compact, "disc automorphism, C_phi is invertible"},
      {"one_plus_z_over_2", Symbol::polynomial({0.5, 0.5}), Expected::non_compact,
       "touches the circle at z = 1 with finite angular derivative; (S2) holds nevertheless"},
      {"sigma_0.7_of_0.9z", Symbol::compose(Symbol::moebius(0.7), Symbol::scale(0.9, z)), Expected::compact,
       "image closure is a compact subset of the disc (sup|phi| about 0.98)"},
      {"half_z_plus_half_z2", Symbol::polynomial({0.0, 0.5, 0.5}), Expected::non_compact,
       "touches the circle at z = 1 with angular derivative 3/2"},
  };
}

std::vector<CriterionKind> gallery_kinds() {
  return {CriterionKind::L,           CriterionKind::VMOA_iii,     CriterionKind::S1,
          CriterionKind::A_double,    CriterionKind::A_prime,      CriterionKind::A_rho_ladder,
          CriterionKind::A_hyp_double, CriterionKind::A_hyp_center, CriterionKind::W1,
          CriterionKind::W2,          CriterionKind::S2};
}

bool GalleryResult::all_match() const {
  return std::all_of(rows.begin(), rows.end(), [](const GalleryRow& r) { return r.matches; });
}

bool GalleryResult::any_inconsistent() const {
  return std::any_of(rows.begin(), rows.end(),
                     [](const GalleryRow& r) { return r.report.classification == Classification::inconsistent; });
}

int GalleryResult::exit_code() const {
  if (any_inconsistent()) return 3;
  return all_match() ? 0 : 2;
}

SweepOptions gallery_options(int depth) {
  SweepOptions o;
  o.depth = depth;
  return o;
}

GalleryResult run_gallery(int depth, const std::filesystem::path& out_dir) {
  return run_gallery(depth, out_dir, gallery_options(depth));
}

GalleryResult run_gallery(int depth, const std::filesystem::path& out_dir, const SweepOptions& options) {
  SweepOptions opt = options;
  opt.depth = depth;
  GalleryResult result;
  std::string summary = "name,expected,verdict,match,s2_satisfied,l_final,reason\n";
  for (const auto& entry : builtin_gallery()) {
    const SelfMap phi(entry.symbol);
    GalleryRow row{entry, all_profiles(phi, gallery_kinds(), opt), {}, false};
    row.report = verdict(phi, row.profiles, opt.epsilon, opt.delta);
    const auto want = entry.expected == Expected::compact ? Classification::compact_evidence
                                                          : Classification::non_compact_evidence;
    row.matches = row.report.classification == want;
    double l_final = 0.0;
    for (const auto& p : row.profiles)
      if (p.kind == CriterionKind::L && !p.points.empty()) l_final = p.points.back().value;
    const std::string s2 = row.report.s2_satisfied ? (*row.report.s2_satisfied ? "satisfied" : "not-satisfied") : "n/a";
    summary += fmt::format("{},{},{},{},{},{:.17g},\"{}\"\n", entry.name, to_string(entry.expected),
                           to_string(row.report.classification), row.matches ? "yes" : "no", s2, l_final,
                           row.report.reason);
    if (!out_dir.empty()) {
      std::filesystem::create_directories(out_dir);
      write_file(out_dir / (entry.name + ".csv"), profiles_csv(row.profiles));
      const json doc{{"name", entry.name},
                     {"symbol", entry.symbol.to_json()},
                     {"expected", to_string(entry.expected)},
                     {"note", entry.note},
                     {"depth", depth},
                     {"verdict", row.report.to_json()}};
      write_file(out_dir / (entry.name + ".json"), doc.dump(2) + "\n");
      write_file(out_dir / (entry.name + ".svg"), profiles_svg(row.profiles, entry.name));
    }
    result.rows.push_back(std::move(row));
  }
  result.summary_csv = summary;
  if (!out_dir.empty()) write_file(out_dir / "summary.csv", summary);
  return result;
}

json run_decompose(const json& arc_set, const std::string& mode, const std::string& lambda) {
  const ArcSet e = ArcSet::from_json(arc_set);
  if (mode == "density") {
    const DensityCore d = density_core(e);
    json samples = json::array();
    Rational min_ratio = 1;
    for (const auto& s : d.samples) {
      samples.push_back({{"zeta", rational_text(s.zeta)}, {"k", s.k}, {"ratio", rational_text(s.ratio)}});
      min_ratio = std::min(min_ratio, s.ratio);
    }
    // Re-check from scratch: stopping arcs are violating and pairwise nested or disjoint.
    const ArcSet ec = e.complement();
    bool stopping_ok = true;
    for (std::size_t i = 0; i < d.stopping.size(); ++i) {
      if (!(intersect_measure(ec, d.stopping[i]) > d.lambda * d.stopping[i].length())) stopping_ok = false;
      for (std::size_t j = i + 1; j < d.stopping.size(); ++j)
        if (!nested_or_disjoint(d.stopping[i], d.stopping[j])) stopping_ok = false;
    }
    const bool core_ok = d.core == e.subtract(to_arc_set(d.stopping));
    return json{{"mode", "density"},
                {"set", e.to_json()},
                {"measure", rational_text(e.measure())},
                {"lambda", rational_text(d.lambda)},
                {"stopping", arcs_json(d.stopping)},
                {"core", d.core.to_json()},
                {"core_measure", rational_text(d.core.measure())},
                {"samples", samples},
                {"verification",
                 {{"stopping_arcs_violate", stopping_ok},
                  {"core_is_complement_of_stopping", core_ok},
                  {"core_positive", d.core_positive},
                  {"bound", rational_text(d.bound)},
                  {"min_ratio", d.samples.empty() ? json(nullptr) : json(rational_text(min_ratio))},
                  {"ratio_bound_holds", d.bound_holds},
                  {"ok", stopping_ok && core_ok && d.core_positive && d.bound_holds}}}};
  }
  if (mode == "wik") {
    if (lambda.empty()) throw std::invalid_argument("wik mode requires --lambda");
    const Rational lam = parse_rational(lambda);
    const SnapResult snapped = snap_to_dyadic(e);
    const auto family = wik_decomposition(snapped.set, lam);
    const WikCheck c = verify_wik(snapped.set, lam, family);
    return json{{"mode", "wik"},
                {"set", snapped.set.to_json()},
                {"snapped", snapped.snapped},
                {"measure", rational_text(snapped.set.measure())},
                {"lambda", rational_text(lam)},
                {"family", arcs_json(family)},
                {"verification",
                 {{"sandwich", c.sandwich},
                  {"disjoint", c.disjoint},
                  {"residue", rational_text(c.residue)},
                  {"ok", c.ok()}}}};
  }
  throw std::invalid_argument(fmt::format("unknown mode \"{}\" (expected density or wik)", mode));
}

double IdentityRow::spread() const {
  return std::max({direct, poisson, taylor}) - std::min({direct, poisson, taylor});
}

bool IdentityReport::ok() const {
  return std::all_of(rows.begin(), rows.end(), [&](const IdentityRow& r) { return r.spread() <= tolerance; });
}

json IdentityReport::to_json() const {
  json arr = json::array();
  double worst = 0.0;
  for (const auto& r : rows) {
    worst = std::max(worst, r.spread());
    arr.push_back({{"symbol", r.symbol},
                   {"a", {r.a.real(), r.a.imag()}},
                   {"direct", r.direct},
                   {"poisson", r.poisson},
                   {"taylor", r.taylor},
                   {"spread", r.spread()},
                   {"n", r.n},
                   {"terms", r.terms}});
  }
  return json{{"tolerance", tolerance}, {"worst_spread", worst}, {"ok", ok()}, {"rows", arr}};
}

IdentityReport run_identities(std::size_t n0, int count, std::uint64_t seed, double tolerance) {
  if (n0 < 64 || !is_power_of_two(n0)) throw std::invalid_argument("grid must be a power of two >= 64");
  IdentityReport report{{}, tolerance};
  std::mt19937_64 rng(seed);
  struct Task {
    std::size_t entry;
    Complex a;
  };
  const auto gallery = builtin_gallery();
  std::vector<Task> tasks;
  for (std::size_t e = 0; e < gallery.size(); ++e)
    for (int i = 0; i < count; ++i) {
      const double depth = std::exp2(-10.0 * uniform01(rng));  // 1 - |a| in (2^{-10}, 1]
      const double theta = kTwoPi * uniform01(rng);
      tasks.push_back({e, std::polar(1.0 - depth, theta)});
    }
  std::vector<SelfMap> maps;
  for (const auto& g : gallery) maps.emplace_back(g.symbol);
  QuadratureOptions opt;
  opt.n0 = n0;
  opt.tol = 1e-10;
  report.rows = parallel_map(tasks.size(), [&](std::size_t t) {
    const Symbol& phi = maps[tasks[t].entry].symbol();
    const Complex a = tasks[t].a;
    const Complex b = phi(a);
    const auto routes =
        dual_route_mean([&](Complex z) { return std::norm(moebius(b, phi(moebius(a, z)))); },
                        [&](Complex z) { return std::norm(moebius(b, phi(z))) * poisson_kernel(a, z); }, opt);
    const auto series = series_energy(normalized_composite(maps[tasks[t].entry], a));
    return IdentityRow{gallery[tasks[t].entry].name, a, routes.direct, routes.poisson, series.value, routes.n,
                       series.terms};
  });
  return report;
}

std::string profiles_svg(const std::vector<CriterionProfile>& profiles, const std::string& title) {
  constexpr double W = 720, H = 420, L = 60, R = 200, T = 40, B = 40;
  constexpr std::array<const char*, 8> palette{"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                               "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};
  double vmax = 1.0;
  std::size_t levels = 1;
  for (const auto& p : profiles) {
    levels = std::max(levels, p.points.size());
    for (const auto& pt : p.points) vmax = std::max(vmax, pt.value);
  }
  auto x = [&](std::size_t i) { return L + (W - L - R) * (levels > 1 ? double(i) / double(levels - 1) : 0.0); };
  auto y = [&](double v) { return H - B - (H - T - B) * v / vmax; };
  std::string s = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" font-family=\"sans-serif\" "
      "font-size=\"11\">\n<text x=\"{}\" y=\"20\">{}</text>\n",
      W, H, L, title);
  s += fmt::format("<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n", L, H - B, W - R, H - B);
  s += fmt::format("<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n", L, T, L, H - B);
  s += fmt::format("<text x=\"{}\" y=\"{}\">{:.3g}</text>\n<text x=\"{}\" y=\"{}\">0</text>\n", 10, T + 4, vmax, 10,
                   H - B + 4);
  s += fmt::format("<text x=\"{}\" y=\"{}\">ladder level</text>\n", (W - R) / 2, H - 10);
  for (std::size_t k = 0; k < profiles.size(); ++k) {
    const auto& p = profiles[k];
    const char* color = palette[k % palette.size()];
    std::string pts;
    for (std::size_t i = 0; i < p.points.size(); ++i)
      pts += fmt::format("{}{:.2f},{:.2f}", i ? " " : "", x(i), y(p.points[i].value));
    s += fmt::format("<polyline fill=\"none\" stroke=\"{}\" points=\"{}\"/>\n", color, pts);
    s += fmt::format("<text x=\"{}\" y=\"{}\" fill=\"{}\">{}</text>\n", W - R + 10, T + 14 * double(k), color,
                     p.label());
  }
  s += "</svg>\n";
  return s;
}

}  // namespace oscillab
