// Test functions f_n = sigma_{b_n} - b_n, the closed form of their oscillation,
// and the inductive subsequence selection that makes (f_{n_k}) c0-like.
//
// Points here are stored as (1 - |z|, arg z): the selection drives b_n so close
// to the circle that 1 - |b_n| underflows the mantissa of |b_n| long before it
// underflows as a number of its own.
#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include <nlohmann/json.hpp>

#include "oscillab/symbols.hpp"

namespace oscillab {

struct DeepPoint {
  double depth;  // 1 - |z|, in (0, 1]
  double angle;  // arg z

  static DeepPoint from(Complex z);
  static DeepPoint polar_depth(double depth, double angle) { return {depth, angle}; }
  Complex value() const { return std::polar(1.0 - depth, angle); }
  double one_minus_norm() const { return depth * (2.0 - depth); }  // 1 - |z|^2
};

/// 1 - rho(a, b)^2 = (1 - |a|^2)(1 - |b|^2) / |1 - conj(a) b|^2, without cancellation.
double one_minus_rho_squared(const DeepPoint& a, const DeepPoint& b);

/// sqrt(1 - |sigma_b(a)|^2): the oscillation gamma(sigma_b - b, a).
double gamma_closed_form(const DeepPoint& b, const DeepPoint& a);
double gamma_closed_form(DiscPoint b, DiscPoint a);

/// max over |a| = r of gamma_closed_form(b, a), golden-section in arg a.
double circle_max_gamma(const DeepPoint& b, double radius_depth);

class TestSequence {
 public:
  explicit TestSequence(std::vector<DeepPoint> base);
  /// b_n = 1 - 2^{-n}, n = 1..count.
  static TestSequence dyadic(int count);

  std::size_t size() const { return base_.size(); }
  const DeepPoint& base(std::size_t i) const { return base_[i]; }
  /// f_n as a Symbol (only meaningful while b_n is representable).
  Symbol function(std::size_t i) const;
  double h2_norm(std::size_t i) const;

 private:
  std::vector<DeepPoint> base_;
};

struct SelectionStep {
  int k;                 // 1-based level
  std::size_t index;     // n_k, 0-based into the sequence
  double radius_depth;   // 1 - r_k
  double next_radius_depth;  // 1 - r_{k+1}
  double threshold;      // 2^{-k-1}
  double inner_sup;      // sup_{|a| <= r_k} gamma(f_{n_k}, a)
  double outer_sup;      // sup_{|a| >= r_{k+1}} gamma(f_{n_k}, a)
  double h2;             // ||f_{n_k}||_{H^2}
  bool verified() const { return inner_sup < threshold && outer_sup < threshold && h2 < threshold; }
};

struct SelectionCertificate {
  std::vector<SelectionStep> steps;
  bool verified() const;
  nlohmann::json to_json() const;
};

class SelectionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

SelectionCertificate select_subsequence(const TestSequence& seq, int depth);

/// gamma(sum_k lambda_k f_{n_k}, a) through the Gram identity: every
/// f_n o sigma_a - f_n(a) is a unimodular multiple of sigma_c - c with c = sigma_a(b_n).
double combination_gamma(const TestSequence& seq, const SelectionCertificate& cert, const std::vector<Complex>& lambda,
                         const DeepPoint& a);

struct CombinationEstimate {
  double value;
  DeepPoint argmax;
  double sup_lambda;  // ||lambda||_inf
  bool lower_ok;      // value >= ||lambda||_inf / 4
  bool upper_ok;      // value <= 2 ||lambda||_inf + tol
};

/// Standard grid (radii 1 - 2^{-k}, k = 1..12, 64 angles, origin) augmented with
/// every selected b_{n_k}.
std::vector<DeepPoint> augmented_grid(const TestSequence& seq, const SelectionCertificate& cert, int depth = 12,
                                      int angles = 64);

CombinationEstimate combination_seminorm(const TestSequence& seq, const SelectionCertificate& cert,
                                         const std::vector<Complex>& lambda, double tol = 1e-6);

/// sum_k lambda_k f_{n_k} as a Symbol, for quadrature cross-checks.
Symbol combination_symbol(const TestSequence& seq, const SelectionCertificate& cert, const std::vector<Complex>& lambda);

struct SpikeReport {
  int max_spikes;      // largest number of k with gamma >= 2^{-k-1} at one grid point
  double max_sum;      // largest sum_k gamma(f_{n_k}, a)
};

SpikeReport one_spike_check(const TestSequence& seq, const SelectionCertificate& cert, const std::vector<DeepPoint>& grid);

}  // namespace oscillab
