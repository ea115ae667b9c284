// Analytic functions on the closed disc as immutable expression trees, and
// validated self-maps of the disc built from them.
#pragma once

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "oscillab/disc_geometry.hpp"

namespace oscillab {

class Symbol;

namespace node {
struct Constant { Complex c; };
struct Identity {};
struct Polynomial {
  std::vector<Complex> coeffs;  // coeffs[k] multiplies z^k
  int monomial = -1;            // degree when coeffs has a single nonzero entry
};
struct Moebius { Complex a; };
struct Blaschke {
  Complex factor;  // unimodular
  std::vector<Complex> zeros;
};
struct Compose;
struct Scale;
struct Sum;
}  // namespace node

/// Bounded analytic function on the closed disc. Cheap to copy; shares the
/// immutable tree.
class Symbol {
 public:
  static Symbol constant(Complex c);
  static Symbol identity();
  static Symbol polynomial(std::vector<Complex> coeffs);
  static Symbol moebius(Complex a);
  static Symbol blaschke(Complex factor, std::vector<Complex> zeros);
  static Symbol compose(const Symbol& outer, const Symbol& inner);
  static Symbol scale(double r, const Symbol& inner);
  /// offset + sum_k weight_k * symbol_k
  static Symbol sum(std::vector<std::pair<Complex, Symbol>> terms, Complex offset = 0.0);
  /// inner^n: expanded when inner is polynomial, otherwise z^n composed with inner.
  static Symbol power(const Symbol& inner, int n);

  Complex operator()(Complex z) const;

  struct Node;
  const Node& node() const { return *node_; }

  /// Coefficients when the tree lowers exactly to a polynomial.
  std::optional<std::vector<Complex>> as_polynomial() const;

  std::string describe() const;
  nlohmann::json to_json() const;
  static Symbol from_json(const nlohmann::json& j);

 private:
  explicit Symbol(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

namespace node {
struct Compose { Symbol outer, inner; };
struct Scale { double r; Symbol inner; };
struct Sum {
  std::vector<std::pair<Complex, Symbol>> terms;
  Complex offset;
};
}  // namespace node

struct Symbol::Node {
  std::variant<node::Constant, node::Identity, node::Polynomial, node::Moebius, node::Blaschke,
               node::Compose, node::Scale, node::Sum>
      v;
};

class SymbolError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class SelfMapClass { strict, boundary_touching };

struct SelfMapCertificate {
  SelfMapClass kind;
  double sup_modulus;            // over the validation grid
  std::size_t grid_size;
  std::vector<Complex> contacts;  // grid points where |phi| is within the touch threshold of 1
};

/// Thrown when the boundary sup exceeds 1 + margin.
class NotASelfMap : public std::invalid_argument {
 public:
  NotASelfMap(Complex witness, double modulus);
  Complex witness;
  double modulus;
};

inline constexpr std::size_t kValidationGrid = 8192;
inline constexpr double kValidationMargin = 1e-9;
inline constexpr double kTouchThreshold = 1e-6;

SelfMapCertificate validate_self_map(const Symbol& phi, std::size_t n = kValidationGrid);

/// A Symbol that passed validate_self_map.
class SelfMap {
 public:
  explicit SelfMap(Symbol phi);
  const Symbol& symbol() const { return phi_; }
  const SelfMapCertificate& certificate() const { return cert_; }
  Complex operator()(Complex z) const { return phi_(z); }

 private:
  Symbol phi_;
  SelfMapCertificate cert_;
};

DiscPoint eval(const SelfMap& phi, DiscPoint z);
SelfMap compose(const SelfMap& outer, const SelfMap& inner);

/// Samples at the N-th roots of unity, zeta_j = exp(2 pi i j / N). N must be a
/// power of two; no lower bound.
std::vector<Complex> sample_circle(const Symbol& f, std::size_t n);

bool is_power_of_two(std::size_t n);

/// Boundary values of a self-map at N >= 64 roots of unity.
struct BoundaryGrid {
  std::vector<Complex> values;
  std::size_t size() const { return values.size(); }
};

BoundaryGrid boundary_samples(const SelfMap& phi, std::size_t n);

inline constexpr std::size_t kDefaultTaylorGrid = 4096;

/// Taylor coefficients a_0..a_M. Exact for trees that lower to polynomials;
/// otherwise DFT of N boundary samples (N = 0 picks max(4096, 4(M+1))).
std::vector<Complex> taylor(const Symbol& f, int order, std::size_t n = 0);

/// c_k = N^{-1} sum_j v_j zeta_j^{-k}, k = 0..N-1.
std::vector<Complex> dft_coefficients(const std::vector<Complex>& samples);

}  // namespace oscillab
