// oscillab: sweeps, gallery runs, decompositions, subsequence certificates and
// the identity suite. Exit codes: 0 success, 2 verdict mismatch, 3 inconsistent
// equivalence, 4 configuration error, 1 anything else.
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "oscillab/lab.hpp"
#include "oscillab/leibov.hpp"
#include "oscillab/parallel.hpp"

namespace {

using namespace oscillab;
using nlohmann::json;

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open {}", path));
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(fmt::format("{}: {}", path, e.what()));
  }
}

int cmd_sweep(const std::string& path) {
  const SweepConfig config = SweepConfig::from_json(read_json_file(path));
  const SweepResult r = run_sweep(config);
  if (config.csv_path.empty()) std::cout << r.csv;
  std::cout << r.json;
  return r.report.classification == Classification::inconsistent ? 3 : 0;
}

int cmd_gallery(int depth, const std::string& out) {
  const GalleryResult g = run_gallery(depth, out);
  std::cout << g.summary_csv;
  for (const auto& row : g.rows) {
    if (row.matches) continue;
    std::cerr << fmt::format("mismatch: {} expected {}, got {} ({})\n", row.entry.name, to_string(row.entry.expected),
                             to_string(row.report.classification), row.report.reason);
    for (const auto& c : row.report.conflicts) std::cerr << "  " << c << "\n";
  }
  return g.exit_code();
}

int cmd_decompose(const std::string& mode, const std::string& lambda, const std::string& set_path) {
  const json result = run_decompose(read_json_file(set_path), mode, lambda);
  std::cout << result.dump(2) << "\n";
  return result.at("verification").at("ok").get<bool>() ? 0 : 2;
}

int cmd_leibov(int depth) {
  const TestSequence seq = TestSequence::dyadic(1000);
  const SelectionCertificate cert = select_subsequence(seq, depth);
  const SpikeReport spikes = one_spike_check(seq, cert, augmented_grid(seq, cert));
  json out = cert.to_json();
  out["one_spike"] = {{"max_spikes", spikes.max_spikes}, {"max_sum", spikes.max_sum}};
  if (!cert.steps.empty()) {
    const auto unit = combination_seminorm(seq, cert, std::vector<Complex>(cert.steps.size(), 1.0));
    out["all_ones_seminorm"] = {{"value", unit.value}, {"lower_ok", unit.lower_ok}, {"upper_ok", unit.upper_ok}};
  }
  std::cout << out.dump(2) << "\n";
  return cert.verified() ? 0 : 2;
}

int cmd_identities(std::size_t n, int count, std::uint64_t seed) {
  const IdentityReport r = run_identities(n, count, seed);
  std::cout << r.to_json().dump(2) << "\n";
  return r.ok() ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical laboratory for compact composition operators on BMOA"};
  app.require_subcommand(1);
  unsigned workers = 0;
  app.add_option("--workers", workers, "worker threads (default: OSCILLAB_WORKERS or 1)");

  std::string config_path;
  auto* sweep = app.add_subcommand("sweep", "run a criterion sweep from a JSON config");
  sweep->add_option("--config", config_path, "config path")->required();

  int gallery_depth = 10;
  std::string gallery_out;
  std::uint64_t gallery_seed = 0;
  auto* gallery = app.add_subcommand("gallery", "run the built-in symbol gallery");
  gallery->add_option("--depth", gallery_depth, "ladder depth K")->check(CLI::Range(4, 20));
  gallery->add_option("--out", gallery_out, "output directory");
  gallery->add_option("--seed", gallery_seed, "seed (the gallery is deterministic)");

  std::string mode, lambda, set_path;
  auto* decompose = app.add_subcommand("decompose", "dyadic decompositions of an arc set");
  decompose->add_option("--mode", mode, "density or wik")->required()->check(CLI::IsMember({"density", "wik"}));
  decompose->add_option("--lambda", lambda, "p/q (wik mode)");
  decompose->add_option("--set", set_path, "arc set JSON")->required();

  int leibov_depth = 6;
  auto* leibov = app.add_subcommand("leibov", "select a c0-like subsequence of sigma_{b_n} - b_n");
  leibov->add_option("--depth", leibov_depth, "depth K")->check(CLI::Range(0, 12));

  std::size_t id_n = 4096;
  int id_count = 20;
  std::uint64_t id_seed = 1;
  auto* identities = app.add_subcommand("identities", "cross-module identity suite");
  identities->add_option("--n", id_n, "starting quadrature grid");
  identities->add_option("--count", id_count, "random points per symbol");
  identities->add_option("--seed", id_seed, "seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 4;
  }
  if (workers > 0) set_worker_count(workers);

  try {
    if (*sweep) return cmd_sweep(config_path);
    if (*gallery) return cmd_gallery(gallery_depth, gallery_out);
    if (*decompose) return cmd_decompose(mode, lambda, set_path);
    if (*leibov) return cmd_leibov(leibov_depth);
    if (*identities) return cmd_identities(id_n, id_count, id_seed);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 4;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
