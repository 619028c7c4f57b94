#include "subord/dominant.hpp"

#include <algorithm>
#include <cmath>

#include "subord/errors.hpp"

namespace subord {

DominantSpec make_dominant_spec(Complex gamma, double A, double B) {
  if (!is_finite(gamma)) throw DomainError("DominantSpec: non-finite gamma");
  // the transform diverges in modulus for Re gamma <= 0
  if (!(gamma.real() > 0.0)) throw DomainError("DominantSpec: Re gamma must be positive");
  make_mobius(A, B);
  return DominantSpec{gamma, A, B};
}

DominantTransform::DominantTransform(const DominantSpec& spec, double tolerance)
    : spec_(make_dominant_spec(spec.gamma, spec.A, spec.B)), tolerance_(tolerance), quadrature_(spec.gamma) {}

void DominantTransform::check_point(Complex z) const {
  if (!(std::abs(z) < 1.0)) throw DomainError("dominant: |z| must be < 1");
  if (!(std::abs(spec_.B * z) < 1.0)) throw DomainError("dominant: pole of the integrand on the path");
}

QuadratureResult DominantTransform::evaluate(Complex z) const {
  check_point(z);
  // gamma * integral u^{gamma-1} du = 1 exactly
  if (z == Complex{}) return {1.0, 0.0, 0};
  auto r = quadrature_.integrate_mobius(spec_.A * z, spec_.B * z, tolerance_);
  r.value *= spec_.gamma;
  r.error_estimate *= std::abs(spec_.gamma);
  return r;
}

Complex DominantTransform::derivative(Complex z) const {
  check_point(z);
  const double A = spec_.A;
  const double B = spec_.B;
  const auto r = quadrature_.integrate(
      [&](double u) {
        const Complex d = 1.0 + B * z * u;
        return (A - B) * u / (d * d);
      },
      tolerance_);
  return spec_.gamma * r.value;
}

Complex DominantTransform::second_derivative(Complex z) const {
  check_point(z);
  const double A = spec_.A;
  const double B = spec_.B;
  const auto r = quadrature_.integrate(
      [&](double u) {
        const Complex d = 1.0 + B * z * u;
        return -2.0 * B * (A - B) * u * u / (d * d * d);
      },
      tolerance_);
  return spec_.gamma * r.value;
}

TargetMap DominantTransform::as_target() const {
  TargetMap m;
  m.label = "dominant";
  m.value = [this](Complex z) { return (*this)(z); };
  m.d1 = [this](Complex z) { return derivative(z); };
  m.d2 = [this](Complex z) { return second_derivative(z); };
  return m;
}

QuadratureResult dominant_quadrature(const DominantSpec& spec, Complex z) {
  return DominantTransform(spec).evaluate(z);
}

SeriesEvaluation dominant_series(const DominantSpec& spec, Complex z) {
  make_dominant_spec(spec.gamma, spec.A, spec.B);
  if (!(std::abs(spec.B * z) < 1.0 - 1e-3))
    throw ConvergenceError("dominant_series: |B z| too close to 1, use the quadrature");
  SeriesEvaluation out;
  out.coefficients.push_back(1.0);
  Complex sum = 1.0;
  const Complex lead = spec.gamma * (spec.A - spec.B);
  Complex zk = z;     // z^{k+1}
  double bk = 1.0;    // (-B)^k
  for (int k = 0;; ++k) {
    if (k >= 10000) throw ConvergenceError("dominant_series: no convergence within 10^4 terms");
    const Complex coeff = lead * bk / (spec.gamma + static_cast<double>(k + 1));
    const Complex term = coeff * zk;
    out.coefficients.push_back(coeff);
    sum += term;
    if (std::abs(term) < 1e-14 || coeff == Complex{}) break;
    zk *= z;
    bk *= -spec.B;
  }
  out.value = sum;
  return out;
}

std::vector<Complex> dominant_coefficients(const DominantSpec& spec, std::size_t count) {
  make_dominant_spec(spec.gamma, spec.A, spec.B);
  std::vector<Complex> c;
  if (count == 0) return c;
  c.push_back(1.0);
  const Complex lead = spec.gamma * (spec.A - spec.B);
  double bk = 1.0;
  for (std::size_t k = 0; c.size() < count; ++k) {
    c.push_back(lead * bk / (spec.gamma + static_cast<double>(k + 1)));
    bk *= -spec.B;
  }
  return c;
}

QuadratureResult lemma1_transform(const std::function<Complex(Complex)>& h, Complex gamma, int n, Complex z) {
  if (n < 1) throw DomainError("lemma1_transform: n must be >= 1");
  const Complex c = gamma / static_cast<double>(n);
  if (!(c.real() > 0.0)) throw DomainError("lemma1_transform: Re(gamma/n) must be positive");
  const PowerWeightQuadrature quad(c);
  auto r = quad.integrate([&](double u) { return h(z * u); });
  r.value *= c;
  r.error_estimate *= std::abs(c);
  return r;
}

namespace {

// Golden-section search for the minimum of sign * Re q on the circle |z| = r.
double golden_min(const DominantTransform& q, double r, double lo, double hi, double sign, double& at) {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  auto f = [&](double theta) { return sign * q(std::polar(r, theta)).real(); };
  double a = lo;
  double b = hi;
  double x1 = b - g * (b - a);
  double x2 = a + g * (b - a);
  double f1 = f(x1);
  double f2 = f(x2);
  while (b - a > 1e-4) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - g * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + g * (b - a);
      f2 = f(x2);
    }
  }
  at = 0.5 * (a + b);
  const double fm = f(at);
  // the coarse endpoints may still win when Re q is flat
  const double fl = f(lo);
  const double fh = f(hi);
  double best = fm;
  if (fl < best) {
    best = fl;
    at = lo;
  }
  if (fh < best) {
    best = fh;
    at = hi;
  }
  return best;
}

}  // namespace

ReExtrema extrema_of_re(const DominantTransform& q, const DiskGrid& grid) {
  ReExtrema e;
  const auto pts = grid.points();
  std::size_t imin = 0;
  std::size_t imax = 0;
  double vmin = q(pts[0]).real();
  double vmax = vmin;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const double v = q(pts[i]).real();
    if (v < vmin) {
      vmin = v;
      imin = i;
    }
    if (v > vmax) {
      vmax = v;
      imax = i;
    }
  }
  e.argmin = pts[imin];
  e.argmax = pts[imax];
  e.inf_re = e.inf_re_sampled = vmin;
  e.sup_re = e.sup_re_sampled = vmax;
  if (grid.radii().empty()) return e;

  const double r1 = grid.max_radius();
  const double step = 2.0 * kPi / grid.angles_per_circle();
  const double theta_min = std::arg(e.argmin) ;
  const double theta_max = std::arg(e.argmax);

  double at = 0.0;
  const double lo1 = golden_min(q, r1, theta_min - step, theta_min + step, 1.0, at);
  if (lo1 < e.inf_re_sampled) {
    e.inf_re_sampled = lo1;
    e.argmin = std::polar(r1, at);
  }
  const double hi1 = -golden_min(q, r1, theta_max - step, theta_max + step, -1.0, at);
  if (hi1 > e.sup_re_sampled) {
    e.sup_re_sampled = hi1;
    e.argmax = std::polar(r1, at);
  }
  e.inf_re = e.inf_re_sampled;
  e.sup_re = e.sup_re_sampled;

  const double r2 = 2.0 * r1 - 1.0;
  if (r2 > 0.0) {
    const double a_min = std::arg(e.argmin);
    const double a_max = std::arg(e.argmax);
    const double lo2 = golden_min(q, r2, a_min - step, a_min + step, 1.0, at);
    const double hi2 = -golden_min(q, r2, a_max - step, a_max + step, -1.0, at);
    e.inf_re = std::min(e.inf_re, 2.0 * e.inf_re_sampled - lo2);
    e.sup_re = std::max(e.sup_re, 2.0 * e.sup_re_sampled - hi2);
  }

  const auto& s = q.spec();
  if (std::abs(s.B) == 1.0) {
    const auto image = std::get<HalfPlane>(mobius_image(MobiusTarget{s.A, s.B}, 1.0));
    (image.sense == Sense::Greater ? e.unbounded_above : e.unbounded_below) = true;
  }
  if (e.sup_re > 1e6) e.unbounded_above = true;
  if (e.inf_re < -1e6) e.unbounded_below = true;
  return e;
}

ReExtrema extrema_of_re(const DominantSpec& spec, const DiskGrid& grid) {
  return extrema_of_re(DominantTransform(spec), grid);
}

RhoForms rho_form_dominant(Complex gamma, double rho, Complex z) {
  RhoForms f;
  f.direct = dominant_quadrature(make_dominant_spec(gamma, 1.0 - 2.0 * rho, -1.0), z).value;
  f.shifted = rho + (1.0 - rho) * dominant_quadrature(make_dominant_spec(gamma, 1.0, -1.0), z).value;
  f.difference = std::abs(f.direct - f.shifted);
  return f;
}

DominantReport dominant_report(const DominantSpec& spec, const DiskGrid& grid, std::size_t coefficient_count) {
  const DominantTransform q(spec);
  DominantReport rep;
  rep.spec = q.spec();
  for (const auto& z : grid.points()) {
    const auto r = q.evaluate(z);
    rep.points.push_back(z);
    rep.values.push_back(r.value);
    rep.quadrature_error_estimate = std::max(rep.quadrature_error_estimate, r.error_estimate);
  }
  rep.series_coeffs = dominant_coefficients(spec, coefficient_count);
  rep.extrema = extrema_of_re(q, grid);
  return rep;
}

}  // namespace subord
