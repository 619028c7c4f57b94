#pragma once

// Truncated complex power series, the normalized p-valent functions built on
// them, branch-continued complex powers and sampling grids of the unit disk.

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <numbers>
#include <span>
#include <vector>

namespace subord {

using Complex = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;

inline bool is_finite(Complex w) noexcept {
  return std::isfinite(w.real()) && std::isfinite(w.imag());
}

/// Dense power series sum_k c_k z^k, stored from the constant term up.
class PowerSeries {
 public:
  PowerSeries() = default;
  explicit PowerSeries(std::vector<Complex> coeffs);

  std::size_t size() const noexcept { return coeffs_.size(); }
  std::span<const Complex> coefficients() const noexcept { return coeffs_; }

  /// Coefficient of z^k; zero past the stored length.
  Complex operator[](std::size_t k) const noexcept {
    return k < coeffs_.size() ? coeffs_[k] : Complex{};
  }

  /// Horner evaluation.
  Complex operator()(Complex z) const noexcept;

  PowerSeries derivative() const;
  PowerSeries truncated(std::size_t length) const;

 private:
  std::vector<Complex> coeffs_;
};

/// Cauchy product truncated to `length` coefficients.
PowerSeries multiply(const PowerSeries& a, const PowerSeries& b, std::size_t length);

/// s^c for a series with s[0] == 1, via the J.C.P. Miller recurrence. The
/// branch is the one with value 1 at the origin.
PowerSeries series_power(const PowerSeries& s, Complex c, std::size_t length);

/// Recovers Taylor coefficients of an analytic function from `samples`
/// equispaced values on |z| = radius (discrete Fourier inversion).
PowerSeries fourier_fit(const std::function<Complex(Complex)>& f, double radius,
                        std::size_t samples);
/// Same from samples at radius * exp(2 pi i j / N), j = 0..N-1.
PowerSeries fourier_fit(std::span<const Complex> values, double radius);

/// f(z) = z^p + sum_{k>=n} a_{k+p} z^{k+p}, truncated at exponent p+N.
class AnalyticFunction {
 public:
  int valence() const noexcept { return p_; }
  int gap() const noexcept { return n_; }
  int truncation_order() const noexcept { return order_; }
  double tail_bound() const noexcept { return tail_bound_; }

  /// a_{p+n}, ..., a_{p+N}.
  std::span<const Complex> coefficients() const noexcept { return coeffs_; }

  /// Coefficient of z^exponent, including the implicit leading 1.
  Complex coefficient(int exponent) const noexcept;

  /// f(z)/z^p = 1 + sum_{k>=n} a_{k+p} z^k as a series in z.
  const PowerSeries& quotient() const noexcept { return quotient_; }

  /// f itself as a dense series.
  PowerSeries series() const;

  /// Evaluates f; |z| < 1 is required.
  Complex operator()(Complex z) const;

 private:
  friend AnalyticFunction make_function(int p, int n, std::vector<Complex> coeffs);

  int p_ = 1;
  int n_ = 1;
  int order_ = 1;
  double tail_bound_ = 0.0;
  std::vector<Complex> coeffs_;
  PowerSeries quotient_;
};

/// Builds a normalized function from the coefficients of z^{p+n}, z^{p+n+1}, ...
/// The tail bound is |a_last| 0.99^{N+1} / 0.01 with |a_last| the largest of the
/// last four coefficient magnitudes.
AnalyticFunction make_function(int p, int n, std::vector<Complex> coeffs);

Complex eval(const AnalyticFunction& f, Complex z);

/// Term-wise derivative f'.
PowerSeries derivative(const AnalyticFunction& f);

/// exp(c Log w) with the principal logarithm. 0^c is 0 when Re c > 0.
Complex principal_power(Complex w, Complex c);

/// Logarithm continued along consecutive samples g_0 = 1, g_1, ... of a
/// function on a ray. Each step must change the argument by less than pi/2.
std::vector<Complex> continued_log(std::span<const Complex> ray_values);

/// g^c along a sampled ray, on the branch with value 1 at the first sample.
std::vector<Complex> power_with_continuation(std::span<const Complex> ray_values, Complex c);

/// Continues log g along the segment [from, to] given its value at `from`.
/// Steps are at most `max_step` long and are halved while the argument of
/// g changes by more than pi/4 within a step.
Complex continue_log(const std::function<Complex(Complex)>& g, Complex from, Complex g_from,
                     Complex log_from, Complex to, double max_step = 0.02);

/// Origin plus concentric circles of equispaced points. Point 0 is the
/// origin; circle i occupies indices [1 + i*angles, 1 + (i+1)*angles).
class DiskGrid {
 public:
  static DiskGrid from_radii(std::vector<double> radii, int angles_per_circle);
  static DiskGrid origin_only();

  std::span<const double> radii() const noexcept { return radii_; }
  int angles_per_circle() const noexcept { return angles_; }
  std::span<const Complex> points() const noexcept { return points_; }
  std::size_t size() const noexcept { return points_.size(); }

  double max_radius() const noexcept { return radii_.empty() ? 0.0 : radii_.back(); }

  std::size_t circle_begin(std::size_t circle) const noexcept {
    return 1 + circle * static_cast<std::size_t>(angles_);
  }
  std::span<const Complex> circle(std::size_t i) const noexcept {
    return std::span<const Complex>(points_).subspan(circle_begin(i), angles_);
  }
  /// Radius of point `index` (0 for the origin).
  double radius_of(std::size_t index) const noexcept;

  /// The sub-grid of circles with radius <= max_radius.
  DiskGrid restricted(double max_radius) const;

 private:
  std::vector<double> radii_;
  int angles_ = 0;
  std::vector<Complex> points_;
};

/// Radii approach max_radius geometrically: 1 - r_k = (1 - max_radius)^{(k+1)/count}.
DiskGrid disk_grid(double max_radius, int radii_count, int angles);

/// Radii {0.1, ..., 0.9, 0.95, 0.99} with `angles` points per circle.
DiskGrid default_grid(int angles = 720);

}  // namespace subord
