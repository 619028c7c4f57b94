#pragma once

// The integral transform
//
//     q(z) = gamma * integral_0^1 (1 + A z u) / (1 + B z u) u^{gamma - 1} du,
//     gamma = p (alpha + i beta) / (mu n),
//
// evaluated by endpoint-singular quadrature and, independently, by its power
// series 1 + gamma (A - B) sum_k (-B)^k z^{k+1} / (gamma + k + 1).

#include <cstddef>
#include <functional>
#include <vector>

#include "subord/quadrature.hpp"
#include "subord/region.hpp"
#include "subord/series.hpp"

namespace subord {

struct DominantSpec {
  Complex gamma;
  double A = 1.0;
  double B = -1.0;
};

/// Requires Re gamma > 0, -1 <= B <= 1 and A != B.
DominantSpec make_dominant_spec(Complex gamma, double A, double B);

/// q for one spec with the quadrature nodes built once; immutable and safe to
/// share between threads.
class DominantTransform {
 public:
  explicit DominantTransform(const DominantSpec& spec, double tolerance = 1e-11);

  const DominantSpec& spec() const noexcept { return spec_; }

  /// q(z) with an absolute error estimate. Requires |z| < 1 and |B z| < 1.
  QuadratureResult evaluate(Complex z) const;
  Complex operator()(Complex z) const { return evaluate(z).value; }

  Complex derivative(Complex z) const;
  Complex second_derivative(Complex z) const;

  TargetMap as_target() const;

 private:
  void check_point(Complex z) const;

  DominantSpec spec_;
  double tolerance_;
  PowerWeightQuadrature quadrature_;
};

QuadratureResult dominant_quadrature(const DominantSpec& spec, Complex z);

struct SeriesEvaluation {
  Complex value;
  std::vector<Complex> coefficients;  // of z^0, z^1, ... up to the last term used
};

/// Requires |B z| < 1 - 1e-3; stops once a term drops below 1e-14.
SeriesEvaluation dominant_series(const DominantSpec& spec, Complex z);

/// Coefficients of z^0 ... z^{count-1}.
std::vector<Complex> dominant_coefficients(const DominantSpec& spec, std::size_t count);

/// Psi(z) = (gamma/n) integral_0^1 h(z u) u^{gamma/n - 1} du.
QuadratureResult lemma1_transform(const std::function<Complex(Complex)>& h, Complex gamma, int n, Complex z);

struct ReExtrema {
  double inf_re = 0.0;
  double sup_re = 0.0;
  Complex argmin;
  Complex argmax;
  double inf_re_sampled = 0.0;  // refined samples on the outermost circle
  double sup_re_sampled = 0.0;
  bool unbounded_below = false;
  bool unbounded_above = false;
};

/// inf/sup of Re q: coarse scan of the grid, golden-section refinement in the
/// angle on the outermost circle, then linear extrapolation to r = 1 from the
/// outermost radius r1 and 2 r1 - 1.
ReExtrema extrema_of_re(const DominantTransform& q, const DiskGrid& grid);
ReExtrema extrema_of_re(const DominantSpec& spec, const DiskGrid& grid);

struct RhoForms {
  Complex direct;   // A = 1 - 2 rho, B = -1
  Complex shifted;  // rho + (1 - rho) q_{A=1,B=-1}
  double difference = 0.0;
};

RhoForms rho_form_dominant(Complex gamma, double rho, Complex z);

struct DominantReport {
  DominantSpec spec;
  std::vector<Complex> points;
  std::vector<Complex> values;
  std::vector<Complex> series_coeffs;
  ReExtrema extrema;
  double quadrature_error_estimate = 0.0;
};

DominantReport dominant_report(const DominantSpec& spec, const DiskGrid& grid, std::size_t coefficient_count = 32);

}  // namespace subord
