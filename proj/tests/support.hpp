#pragma once

// Small helpers shared by the unit tests: a seeded generator for property
// tests and closeness checks on complex values.

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include "subord/series.hpp"

namespace testing {

using subord::Complex;

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

  /// Uniform in the disk of radius r.
  Complex in_disk(double r) {
    const double rho = r * std::sqrt(uniform(0.0, 1.0));
    return std::polar(rho, uniform(-subord::kPi, subord::kPi));
  }

  Complex complex_box(double half) { return {uniform(-half, half), uniform(-half, half)}; }

  /// Coefficients with |a_k| <= scale * decay^k.
  std::vector<Complex> decaying(int count, double scale, double decay) {
    std::vector<Complex> c;
    double s = scale;
    for (int k = 0; k < count; ++k, s *= decay) c.push_back(in_disk(s));
    return c;
  }

 private:
  std::mt19937_64 rng_;
};

inline bool close(Complex a, Complex b, double tol) { return std::abs(a - b) <= tol; }

}  // namespace testing
