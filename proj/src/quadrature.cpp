#include "subord/quadrature.hpp"

#include <algorithm>
#include <cmath>

#include "subord/errors.hpp"

namespace subord {

namespace {

constexpr double kTMax = 12.0;

struct NodeValue {
  double u;
  Complex weight;
};

NodeValue node_at(double t, Complex c) {
  const double s = kPi * std::sinh(t);
  const double log_u = s < 0.0 ? s - std::log1p(std::exp(s)) : -std::log1p(std::exp(-s));
  const double one_minus_u = s > 0.0 ? std::exp(-s) / (1.0 + std::exp(-s)) : 1.0 / (1.0 + std::exp(s));
  const double u = s > 0.0 ? 1.0 / (1.0 + std::exp(-s)) : std::exp(log_u);
  const Complex weight = std::exp(c * log_u) * (one_minus_u * kPi * std::cosh(t));
  return {u, weight};
}

}  // namespace

PowerWeightQuadrature::PowerWeightQuadrature(Complex c, int max_level) : c_(c) {
  if (!(c.real() > 0.0)) throw DomainError("PowerWeightQuadrature: Re c must be positive");
  if (!is_finite(c)) throw DomainError("PowerWeightQuadrature: non-finite exponent");

  // Level-0 sweep outward from t = 0 fixes the truncation window.
  double peak = 0.0;
  std::vector<Node> base;
  const auto sweep = [&](int dir) {
    double last_t = 0.0;
    for (int k = (dir > 0 ? 0 : 1);; ++k) {
      const double t = dir * k * h0_;
      if (std::abs(t) > kTMax) break;
      const auto nv = node_at(t, c_);
      const double mag = std::abs(nv.weight);
      peak = std::max(peak, mag);
      last_t = t;
      if (nv.u > 0.0 && mag > 0.0) base.push_back({nv.u, nv.weight});
      if (std::abs(t) > 1.0 && (mag < 1e-20 * peak || !std::isfinite(mag))) break;
    }
    return last_t;
  };
  const double t_hi = sweep(+1);
  const double t_lo = sweep(-1);

  levels_.push_back(std::move(base));
  for (int level = 1; level <= max_level; ++level) {
    const double h = h0_ / static_cast<double>(1 << level);
    std::vector<Node> fresh;
    const long count = std::lround((t_hi - t_lo) / (2.0 * h));
    for (long j = 0; j < count; ++j) {
      const double t = t_lo + static_cast<double>(2 * j + 1) * h;
      const auto nv = node_at(t, c_);
      if (nv.u > 0.0 && std::abs(nv.weight) > 0.0) fresh.push_back({nv.u, nv.weight});
    }
    levels_.push_back(std::move(fresh));
  }
}

std::size_t PowerWeightQuadrature::node_count(int level) const {
  std::size_t n = 0;
  for (int l = 0; l <= level && l < static_cast<int>(levels_.size()); ++l) n += levels_[static_cast<std::size_t>(l)].size();
  return n;
}

template <class Fn>
QuadratureResult PowerWeightQuadrature::run(const Fn& F, double tolerance, int min_level) const {
  // F(0)/c is exact; the remainder F(u) - F(0) carries an extra power of u,
  // which tames the slowly decaying, oscillating tail when Re c is small
  const Complex f0 = F(0.0);
  const Complex exact = f0 / c_;
  Complex sum{};
  Complex previous{};
  QuadratureResult result;
  for (std::size_t level = 0; level < levels_.size(); ++level) {
    for (const auto& node : levels_[level]) sum += node.weight * (F(node.u) - f0);
    const double h = h0_ / static_cast<double>(1u << level);
    const Complex estimate = exact + h * sum;
    result.value = estimate;
    result.level = static_cast<int>(level);
    if (level > 0) {
      result.error_estimate = std::abs(estimate - previous);
      if (static_cast<int>(level) >= min_level &&
          result.error_estimate <= tolerance * std::max(1.0, std::abs(estimate)))
        return result;
    }
    previous = estimate;
  }
  return result;
}

QuadratureResult PowerWeightQuadrature::integrate(const std::function<Complex(double)>& F, double tolerance,
                                                  int min_level) const {
  return run(F, tolerance, min_level);
}

QuadratureResult PowerWeightQuadrature::integrate_mobius(Complex a, Complex b, double tolerance,
                                                         int min_level) const {
  return run([a, b](double u) { return (1.0 + a * u) / (1.0 + b * u); }, tolerance, min_level);
}

}  // namespace subord
