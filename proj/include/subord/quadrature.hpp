#pragma once

#include <functional>
#include <vector>

#include "subord/series.hpp"

namespace subord {

struct QuadratureResult {
  Complex value;
  double error_estimate = 0.0;
  int level = 0;  // step h = 2^-level / 2
};

/// Double-exponential (tanh-sinh) rule for
///
///     I = integral_0^1 F(u) u^{c-1} du,   Re c > 0,
///
/// with the weight u^{c-1} folded into the node weights, so the endpoint
/// singularity and the oscillation of u^{i Im c} never reach the integrand.
/// Substituting u = 1 / (1 + exp(-pi sinh t)) gives
///
///     u^{c-1} du = u^c (1 - u) pi cosh t dt,
///
/// evaluated through log u to stay accurate for u down to 1e-300. Levels
/// halve the step; each level stores only its new nodes, and the error
/// estimate is the change between the last two levels. F(0) is integrated
/// exactly (F(0)/c) and the rule only sees F(u) - F(0), so F must be finite
/// at u = 0.
class PowerWeightQuadrature {
 public:
  explicit PowerWeightQuadrature(Complex c, int max_level = 9);

  Complex exponent() const noexcept { return c_; }

  QuadratureResult integrate(const std::function<Complex(double)>& F, double tolerance = 1e-11,
                             int min_level = 3) const;

  /// Same, for the common integrand (1 + a u) / (1 + b u) without type erasure.
  QuadratureResult integrate_mobius(Complex a, Complex b, double tolerance = 1e-11, int min_level = 3) const;

  std::size_t node_count(int level) const;

 private:
  struct Node {
    double u;
    Complex weight;
  };

  template <class Fn>
  QuadratureResult run(const Fn& F, double tolerance, int min_level) const;

  Complex c_;
  double h0_ = 0.5;
  std::vector<std::vector<Node>> levels_;
};

}  // namespace subord
