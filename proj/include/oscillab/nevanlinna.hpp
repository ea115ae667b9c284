// Rational lowering of symbols, preimage solving and the Nevanlinna counting
// function N(psi, w) = sum_{psi(z) = w, |z| < 1} log(1/|z|).
#pragma once

#include <vector>

#include "oscillab/symbols.hpp"

namespace oscillab {

inline constexpr int kMaxRationalDegree = 64;

/// p/q with q zero-free on the closed disc.
struct RationalForm {
  std::vector<Complex> num;  // coefficients in increasing degree
  std::vector<Complex> den;

  Complex operator()(Complex z) const;
  int num_degree() const { return static_cast<int>(num.size()) - 1; }
  int den_degree() const { return static_cast<int>(den.size()) - 1; }
  /// First `count` Taylor coefficients at the origin by series division.
  std::vector<Complex> taylor(std::size_t count) const;
};

struct SeriesEnergy {
  double value;       // sum of |c_k|^2 over the summed terms
  std::size_t terms;
  double tail;        // geometric estimate of the neglected remainder
};

/// ||p/q||_{H^2}^2 from streamed Taylor coefficients. Doubles the term count
/// until the remainder, extrapolated from the last block at the decay rate of
/// the nearest pole, drops below `tail_tol`.
SeriesEnergy series_energy(const RationalForm& f, double tail_tol = 1e-13,
                           std::size_t max_terms = std::size_t{1} << 26);

class DegreeBoundExceeded : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Exact lowering. Throws DegreeBoundExceeded past degree 64 and SymbolError
/// when the denominator vanishes on the closed disc.
RationalForm to_rational(const Symbol& phi);

/// All roots of a polynomial (companion-matrix eigenvalues, Newton-polished).
std::vector<Complex> polynomial_roots(const std::vector<Complex>& coeffs);

struct Preimage {
  Complex z;
  int multiplicity;
};

struct PreimageSet {
  std::vector<Preimage> roots;  // |z| < 1
  bool boundary_ambiguous = false;  // some root within 1e-8 of the circle
};

inline constexpr double kClusterRadius = 1e-8;
inline constexpr double kBoundaryAmbiguity = 1e-8;

PreimageSet preimages(const RationalForm& psi, Complex w);

struct CountingValue {
  double value;
  bool boundary_ambiguous;
};

/// Requires 0 < |w| < 1 and w != psi(0).
CountingValue counting_function(const RationalForm& psi, Complex w);

/// w-grid for the S1 supremum: radii 2^{-k} and 1 - 2^{-k} (k = 1..8) times
/// `angles` equispaced angles.
std::vector<Complex> default_w_grid(int angles = 32);

struct S1Value {
  double value;
  Complex argmax;
  bool flagged;  // a boundary-ambiguous root was seen
};

/// Halving rounds of the 9-point stencil search around the grid argmax.
inline constexpr int kS1RefineRounds = 12;

/// max over w of |w|^2 N(sigma_{phi(a)} o phi o sigma_a, w), refined by a
/// shrinking 9-point stencil around the grid argmax.
S1Value s1_statistic(const SelfMap& phi, Complex a, const std::vector<Complex>& w_grid);
S1Value s1_statistic(const RationalForm& composite, const std::vector<Complex>& w_grid);

/// Rational form of sigma_{phi(a)} o phi o sigma_a.
RationalForm normalized_composite(const SelfMap& phi, Complex a);

}  // namespace oscillab
