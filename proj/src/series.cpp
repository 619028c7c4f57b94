#include "subord/series.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "subord/errors.hpp"

namespace subord {

PowerSeries::PowerSeries(std::vector<Complex> coeffs) : coeffs_(std::move(coeffs)) {}

Complex PowerSeries::operator()(Complex z) const noexcept {
  Complex acc{};
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * z + *it;
  return acc;
}

PowerSeries PowerSeries::derivative() const {
  if (coeffs_.size() <= 1) return PowerSeries({Complex{}});
  std::vector<Complex> d(coeffs_.size() - 1);
  for (std::size_t k = 1; k < coeffs_.size(); ++k) d[k - 1] = static_cast<double>(k) * coeffs_[k];
  return PowerSeries(std::move(d));
}

PowerSeries PowerSeries::truncated(std::size_t length) const {
  std::vector<Complex> c(length);
  for (std::size_t k = 0; k < length; ++k) c[k] = (*this)[k];
  return PowerSeries(std::move(c));
}

PowerSeries multiply(const PowerSeries& a, const PowerSeries& b, std::size_t length) {
  std::vector<Complex> c(length);
  const auto na = std::min(a.size(), length);
  for (std::size_t i = 0; i < na; ++i) {
    if (a[i] == Complex{}) continue;
    const auto nb = std::min(b.size(), length - i);
    for (std::size_t j = 0; j < nb; ++j) c[i + j] += a[i] * b[j];
  }
  return PowerSeries(std::move(c));
}

PowerSeries series_power(const PowerSeries& s, Complex c, std::size_t length) {
  if (std::abs(s[0] - 1.0) > 1e-14) throw DomainError("series_power: constant term must be 1");
  std::vector<Complex> g(length);
  if (length == 0) return PowerSeries(std::move(g));
  g[0] = 1.0;
  // k g_k = sum_{j=1}^{k} (c j - (k - j)) s_j g_{k-j}
  for (std::size_t k = 1; k < length; ++k) {
    Complex acc{};
    const auto jmax = std::min(k, s.size() - 1);
    for (std::size_t j = 1; j <= jmax; ++j) {
      if (s[j] == Complex{}) continue;
      acc += (c * static_cast<double>(j) - static_cast<double>(k - j)) * s[j] * g[k - j];
    }
    g[k] = acc / static_cast<double>(k);
  }
  return PowerSeries(std::move(g));
}

PowerSeries fourier_fit(const std::function<Complex(Complex)>& f, double radius,
                        std::size_t samples) {
  if (!(radius > 0.0) || samples == 0) throw DomainError("fourier_fit: bad radius or sample count");
  std::vector<Complex> values(samples);
  for (std::size_t j = 0; j < samples; ++j) {
    const double theta = 2.0 * kPi * static_cast<double>(j) / static_cast<double>(samples);
    values[j] = f(std::polar(radius, theta));
  }
  return fourier_fit(values, radius);
}

PowerSeries fourier_fit(std::span<const Complex> values, double radius) {
  const std::size_t samples = values.size();
  if (!(radius > 0.0) || samples == 0) throw DomainError("fourier_fit: bad radius or sample count");
  std::vector<Complex> roots(samples);
  for (std::size_t j = 0; j < samples; ++j)
    roots[j] = std::polar(1.0, 2.0 * kPi * static_cast<double>(j) / static_cast<double>(samples));
  std::vector<Complex> c(samples);
  double scale = 1.0;
  for (std::size_t k = 0; k < samples; ++k) {
    Complex acc{};
    for (std::size_t j = 0; j < samples; ++j) acc += values[j] * std::conj(roots[(j * k) % samples]);
    c[k] = acc / (static_cast<double>(samples) * scale);
    scale *= radius;
  }
  return PowerSeries(std::move(c));
}

Complex AnalyticFunction::coefficient(int exponent) const noexcept {
  if (exponent == p_) return 1.0;
  const int idx = exponent - p_ - n_;
  if (idx < 0 || idx >= static_cast<int>(coeffs_.size())) return {};
  return coeffs_[static_cast<std::size_t>(idx)];
}

PowerSeries AnalyticFunction::series() const {
  std::vector<Complex> c(static_cast<std::size_t>(p_) + quotient_.size());
  for (std::size_t k = 0; k < quotient_.size(); ++k) c[static_cast<std::size_t>(p_) + k] = quotient_[k];
  return PowerSeries(std::move(c));
}

Complex AnalyticFunction::operator()(Complex z) const {
  if (!(std::abs(z) < 1.0)) throw DomainError("eval: |z| must be < 1");
  return std::pow(z, p_) * quotient_(z);
}

AnalyticFunction make_function(int p, int n, std::vector<Complex> coeffs) {
  if (p < 1) throw DomainError("make_function: p must be >= 1");
  if (n < 1) throw DomainError("make_function: n must be >= 1");
  for (const auto& a : coeffs)
    if (!is_finite(a)) throw DomainError("make_function: non-finite coefficient");

  AnalyticFunction f;
  f.p_ = p;
  f.n_ = n;
  f.order_ = coeffs.empty() ? n : n + static_cast<int>(coeffs.size()) - 1;

  if (!coeffs.empty()) {
    double last = 0.0;
    const auto m = std::min<std::size_t>(4, coeffs.size());
    for (std::size_t i = coeffs.size() - m; i < coeffs.size(); ++i) last = std::max(last, std::abs(coeffs[i]));
    constexpr double rho = 0.99;
    f.tail_bound_ = last * std::pow(rho, f.order_ + 1) / (1.0 - rho);
  }

  std::vector<Complex> q(static_cast<std::size_t>(n) + coeffs.size(), Complex{});
  q[0] = 1.0;
  std::copy(coeffs.begin(), coeffs.end(), q.begin() + n);
  f.quotient_ = PowerSeries(std::move(q));
  f.coeffs_ = std::move(coeffs);
  return f;
}

Complex eval(const AnalyticFunction& f, Complex z) { return f(z); }

PowerSeries derivative(const AnalyticFunction& f) { return f.series().derivative(); }

Complex principal_power(Complex w, Complex c) {
  if (w == Complex{}) {
    if (c.real() > 0.0) return {};
    throw DomainError("principal_power: 0^c with Re c <= 0");
  }
  return std::exp(c * std::log(w));
}

std::vector<Complex> continued_log(std::span<const Complex> ray_values) {
  std::vector<Complex> logs;
  if (ray_values.empty()) return logs;
  if (std::abs(ray_values[0] - 1.0) > 1e-12)
    throw DomainError("continued_log: the first sample must equal 1");
  logs.reserve(ray_values.size());
  logs.push_back(0.0);
  for (std::size_t k = 1; k < ray_values.size(); ++k) {
    if (std::abs(ray_values[k]) < 1e-14)
      throw BranchError(BranchError::Kind::ZeroOnPath, "continued_log: zero at sample " + std::to_string(k));
    const Complex step = std::log(ray_values[k] / ray_values[k - 1]);
    if (std::abs(step.imag()) >= kPi / 2)
      throw BranchError(BranchError::Kind::ArgumentJump,
                        "continued_log: argument jump at sample " + std::to_string(k) + ", refine the ray");
    logs.push_back(logs.back() + step);
  }
  return logs;
}

std::vector<Complex> power_with_continuation(std::span<const Complex> ray_values, Complex c) {
  auto logs = continued_log(ray_values);
  for (auto& l : logs) l = std::exp(c * l);
  return logs;
}

namespace {

Complex continue_step(const std::function<Complex(Complex)>& g, Complex a, Complex ga, Complex b,
                      Complex& gb, int depth) {
  gb = g(b);
  if (!(std::abs(gb) >= 1e-14))
    throw BranchError(BranchError::Kind::ZeroOnPath, "continue_log: function vanishes on the path");
  const Complex step = std::log(gb / ga);
  if (std::abs(step.imag()) <= kPi / 4) return step;
  if (depth >= 40) throw BranchError(BranchError::Kind::ArgumentJump, "continue_log: cannot resolve argument");
  const Complex mid = 0.5 * (a + b);
  Complex gm;
  const Complex first = continue_step(g, a, ga, mid, gm, depth + 1);
  return first + continue_step(g, mid, gm, b, gb, depth + 1);
}

}  // namespace

Complex continue_log(const std::function<Complex(Complex)>& g, Complex from, Complex g_from,
                     Complex log_from, Complex to, double max_step) {
  const double len = std::abs(to - from);
  const int steps = std::max(1, static_cast<int>(std::ceil(len / max_step)));
  Complex log = log_from;
  Complex a = from;
  Complex ga = g_from;
  for (int s = 1; s <= steps; ++s) {
    const Complex b = from + (to - from) * (static_cast<double>(s) / steps);
    Complex gb;
    log += continue_step(g, a, ga, b, gb, 0);
    a = b;
    ga = gb;
  }
  return log;
}

DiskGrid DiskGrid::from_radii(std::vector<double> radii, int angles_per_circle) {
  if (angles_per_circle < 1) throw DomainError("DiskGrid: need at least one angle per circle");
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0.0 && radii[i] < 1.0)) throw DomainError("DiskGrid: radii must lie in (0,1)");
    if (i > 0 && !(radii[i] > radii[i - 1])) throw DomainError("DiskGrid: radii must be strictly ascending");
  }
  DiskGrid g;
  g.radii_ = std::move(radii);
  g.angles_ = angles_per_circle;
  g.points_.reserve(1 + g.radii_.size() * static_cast<std::size_t>(angles_per_circle));
  g.points_.emplace_back(0.0, 0.0);
  for (double r : g.radii_) {
    for (int j = 0; j < angles_per_circle; ++j) {
      // exact axis points keep the grid symmetric under conjugation
      const int q = 4 * j;
      Complex z;
      if (q % angles_per_circle == 0) {
        static constexpr Complex axis[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
        z = r * axis[(q / angles_per_circle) % 4];
      } else {
        z = std::polar(r, 2.0 * kPi * j / angles_per_circle);
      }
      g.points_.push_back(z);
    }
  }
  return g;
}

DiskGrid DiskGrid::origin_only() {
  DiskGrid g;
  g.angles_ = 1;
  g.points_.emplace_back(0.0, 0.0);
  return g;
}

double DiskGrid::radius_of(std::size_t index) const noexcept {
  if (index == 0) return 0.0;
  return radii_[(index - 1) / static_cast<std::size_t>(angles_)];
}

DiskGrid DiskGrid::restricted(double max_radius) const {
  std::vector<double> kept;
  for (double r : radii_)
    if (r <= max_radius) kept.push_back(r);
  if (kept.empty()) return origin_only();
  return from_radii(std::move(kept), angles_);
}

DiskGrid disk_grid(double max_radius, int radii_count, int angles) {
  if (!(max_radius > 0.0 && max_radius < 1.0)) throw DomainError("disk_grid: max_radius must lie in (0,1)");
  if (radii_count < 1 || angles < 1) throw DomainError("disk_grid: degenerate counts");
  std::vector<double> radii(static_cast<std::size_t>(radii_count));
  const double gap = 1.0 - max_radius;
  for (int k = 0; k < radii_count; ++k)
    radii[static_cast<std::size_t>(k)] = 1.0 - std::pow(gap, static_cast<double>(k + 1) / radii_count);
  radii.back() = max_radius;
  return DiskGrid::from_radii(std::move(radii), angles);
}

DiskGrid default_grid(int angles) {
  return DiskGrid::from_radii({0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 0.99}, angles);
}

}  // namespace subord
