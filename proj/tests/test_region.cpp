#include <doctest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "subord/errors.hpp"
#include "subord/region.hpp"
#include "support.hpp"

using namespace subord;
using testing::close;
using testing::Gen;
using namespace std::complex_literals;

namespace {

struct Circle {
  Complex center;
  double radius;
};

// algebraic least-squares circle x^2 + y^2 + D x + E y + F = 0 through the
// points, from the 3x3 normal equations
Circle fit_circle(const std::vector<Complex>& pts) {
  std::array<std::array<double, 4>, 3> m{};
  for (const auto& w : pts) {
    const double row[3] = {w.real(), w.imag(), 1.0};
    const double rhs = -(w.real() * w.real() + w.imag() * w.imag());
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) m[i][j] += row[i] * row[j];
      m[i][3] += row[i] * rhs;
    }
  }
  for (int c = 0; c < 3; ++c) {
    int piv = c;
    for (int r = c + 1; r < 3; ++r)
      if (std::abs(m[r][c]) > std::abs(m[piv][c])) piv = r;
    std::swap(m[c], m[piv]);
    for (int r = 0; r < 3; ++r) {
      if (r == c) continue;
      const double f = m[r][c] / m[c][c];
      for (int k = c; k < 4; ++k) m[r][k] -= f * m[c][k];
    }
  }
  const double D = m[0][3] / m[0][0], E = m[1][3] / m[1][1], F = m[2][3] / m[2][2];
  const Complex center(-D / 2, -E / 2);
  return {center, std::sqrt(std::norm(center) - F)};
}

std::vector<Complex> boundary(const MobiusTarget& t, double r, int count) {
  std::vector<Complex> out;
  for (int k = 0; k < count; ++k) out.push_back(t(std::polar(r, 2.0 * kPi * (k + 0.5) / count)));
  return out;
}

std::vector<Complex> circle_curve(Complex c, double r, int count) {
  std::vector<Complex> out;
  for (int k = 0; k <= count; ++k) out.push_back(c + std::polar(r, 2.0 * kPi * k / count));
  out.back() = out.front();
  return out;
}

MobiusTarget random_target(Gen& gen) {
  for (;;) {
    const double B = gen.uniform(-1.0, 1.0);
    const double A = gen.uniform(-3.0, 3.0);
    if (std::abs(A - B) > 0.05) return {A, B};
  }
}

}  // namespace

TEST_SUITE("region") {

TEST_CASE("mobius_image examples") {
  const Region hp = mobius_image({1.0, -1.0}, 1.0);
  REQUIRE(std::holds_alternative<HalfPlane>(hp));
  CHECK(std::get<HalfPlane>(hp).threshold == doctest::Approx(0.0));
  CHECK(std::get<HalfPlane>(hp).sense == Sense::Greater);

  const Region d = mobius_image({0.5, 0.0}, 1.0);
  REQUIRE(std::holds_alternative<Disk>(d));
  CHECK(close(std::get<Disk>(d).center, 1.0, 1e-15));
  CHECK(std::get<Disk>(d).radius == doctest::Approx(0.5));

  // closed form against a least-squares circle through 10^4 boundary samples
  const MobiusTarget t{0.5, -0.5};
  const auto disk = std::get<Disk>(mobius_image(t, 0.8));
  CHECK(close(disk.center, 29.0 / 21.0, 1e-14));
  CHECK(disk.radius == doctest::Approx(20.0 / 21.0).epsilon(1e-14));
  const Circle fit = fit_circle(boundary(t, 0.8, 10000));
  CHECK(close(fit.center, disk.center, 1e-10));
  CHECK(std::abs(fit.radius - disk.radius) < 1e-10);

  CHECK_THROWS_AS(mobius_image(t, 0.0), DomainError);
  CHECK_THROWS_AS(mobius_image(t, 1.5), DomainError);
  CHECK_THROWS_AS(make_mobius(0.5, 0.5), DomainError);
  CHECK_THROWS_AS(make_mobius(0.5, -1.5), DomainError);
}

TEST_CASE("half-plane side follows the image of the origin") {
  // (1 + 2z)/(1 - z): boundary Re w = -1/2, w(0) = 1 on the right
  const auto a = std::get<HalfPlane>(mobius_image({2.0, -1.0}, 1.0));
  CHECK(a.threshold == doctest::Approx(-0.5));
  CHECK(a.sense == Sense::Greater);
  // (1 - 3z)/(1 - z): boundary Re w = 2, w(0) = 1 on the left
  const auto b = std::get<HalfPlane>(mobius_image({-3.0, -1.0}, 1.0));
  CHECK(b.threshold == doctest::Approx(2.0));
  CHECK(b.sense == Sense::Less);
  // (1 + 0.5z)/(1 + z): boundary Re w = 3/4, w(0) = 1 on the right
  const auto c = std::get<HalfPlane>(mobius_image({0.5, 1.0}, 1.0));
  CHECK(c.threshold == doctest::Approx(0.75));
  CHECK(c.sense == Sense::Greater);
  for (const MobiusTarget t : {MobiusTarget{2.0, -1.0}, MobiusTarget{-3.0, -1.0}, MobiusTarget{0.5, 1.0}}) {
    const Region r = mobius_image(t, 1.0);
    Gen gen(201);
    for (int k = 0; k < 200; ++k) CHECK(region_contains(r, t(gen.in_disk(0.999))) > -1e-12);
  }
}

TEST_CASE("property: boundary exactness of the closed-form images") {
  Gen gen(202);
  for (int trial = 0; trial < 50; ++trial) {
    const MobiusTarget t = random_target(gen);
    const double r = gen.uniform(0.05, std::abs(t.B) > 0.99 ? 0.95 : 1.0);
    const Region reg = mobius_image(t, r);
    if (const auto* d = std::get_if<Disk>(&reg)) {
      double worst = 0.0;
      for (const auto& w : boundary(t, r, 10000)) worst = std::max(worst, std::abs(std::abs(w - d->center) - d->radius));
      CHECK(worst < 1e-10 * std::max(1.0, d->radius));
      const Circle fit = fit_circle(boundary(t, r, 2000));
      CHECK(close(fit.center, d->center, 1e-9 * std::max(1.0, std::abs(d->center))));
    }
  }
  // half-planes at r = 1 - 1e-6: nothing on the wrong side, and the boundary is approached
  for (const MobiusTarget t : {MobiusTarget{1.0, -1.0}, MobiusTarget{0.3, -1.0}, MobiusTarget{-2.0, 1.0}}) {
    const auto hp = std::get<HalfPlane>(mobius_image(t, 1.0));
    double closest = std::numeric_limits<double>::infinity();
    for (const auto& w : boundary(t, 1.0 - 1e-6, 10000)) {
      const double m = region_contains(hp, w);
      CHECK(m > -1e-10);
      closest = std::min(closest, m);
    }
    CHECK(closest < 1e-5);
  }
}

TEST_CASE("region_contains examples") {
  CHECK(region_contains(Disk{1.0, 0.5}, 1.0) == doctest::Approx(0.5));
  CHECK(region_contains(HalfPlane{0.0, Sense::Greater}, -0.1) == doctest::Approx(-0.1));
  CHECK(region_contains(Disk{29.0 / 21.0, 20.0 / 21.0}, 1.0) == doctest::Approx(12.0 / 21.0));
  CHECK(region_contains(HalfPlane{2.0, Sense::Less}, 1.5) == doctest::Approx(0.5));
}

TEST_CASE("region_nested examples") {
  const auto a = region_nested(Disk{1.0, 0.5}, HalfPlane{0.0, Sense::Greater});
  CHECK(a.nested);
  CHECK(a.margin == doctest::Approx(0.5));
  const auto lemma = region_nested(mobius_image({0.5, 0.0}, 1.0), mobius_image({1.0, -1.0}, 1.0));
  CHECK(lemma.nested);
  const auto refl = region_nested(Disk{0.0, 1.0}, Disk{0.0, 1.0});
  CHECK(refl.nested);
  CHECK(refl.margin == doctest::Approx(0.0));
  CHECK_FALSE(region_nested(HalfPlane{0.0, Sense::Greater}, Disk{0.0, 100.0}).nested);
  CHECK_FALSE(region_nested(HalfPlane{0.0, Sense::Greater}, HalfPlane{0.0, Sense::Less}).nested);
  CHECK(region_nested(HalfPlane{1.0, Sense::Greater}, HalfPlane{0.0, Sense::Greater}).nested);
  CHECK_FALSE(region_nested(Disk{0.0, 2.0}, Disk{0.5, 2.0}).nested);
}

TEST_CASE("property: monotone nesting in r and nesting of admissible quadruples") {
  Gen gen(203);
  for (int trial = 0; trial < 100; ++trial) {
    const MobiusTarget t = random_target(gen);
    double r1 = gen.uniform(0.05, 0.95), r2 = gen.uniform(0.05, 0.95);
    if (r1 > r2) std::swap(r1, r2);
    CHECK(region_nested(mobius_image(t, r1), mobius_image(t, r2)).margin >= -1e-12);
  }
  for (int trial = 0; trial < 100; ++trial) {
    // -1 <= B1 <= B2 < A2 < A1 <= 1
    std::array<double, 4> v{gen.uniform(-1, 1), gen.uniform(-1, 1), gen.uniform(-1, 1), gen.uniform(-1, 1)};
    std::sort(v.begin(), v.end());
    if (v[2] - v[1] < 1e-6 || v[3] - v[2] < 1e-6) continue;
    const MobiusTarget outer{v[3], v[0]}, inner{v[2], v[1]};
    const auto nest = region_nested(mobius_image(inner, 1.0), mobius_image(outer, 1.0));
    CHECK(nest.nested);
    CHECK(nest.margin >= -1e-12);
  }
}

TEST_CASE("winding_number examples") {
  const auto unit = circle_curve(0.0, 1.0, 400);
  CHECK(winding_number(unit, 0.0) == 1);
  CHECK(winding_number(unit, 2.0) == 0);
  std::vector<Complex> sq;
  for (int k = 0; k <= 400; ++k) sq.push_back(std::pow(std::polar(0.5, 2.0 * kPi * k / 400), 2));
  sq.back() = sq.front();
  CHECK(winding_number(sq, 0.0) == 2);
  CHECK_THROWS_AS(winding_number(unit, unit[7]), NearBoundaryError);
  CHECK_THROWS_AS(winding_number(std::vector<Complex>{0.0, 1.0, 1.0 + 1i}, 0.5), DomainError);
}

TEST_CASE("property: indexed and plain polygon classification agree") {
  Gen gen(204);
  for (int trial = 0; trial < 20; ++trial) {
    const Complex a = gen.in_disk(0.6);
    const double s = gen.uniform(0.3, 0.9);
    // image of |z| = s under a univalent cubic-ish map
    const auto f = [&](Complex z) { return z + a * z * z / 2.0 + 0.1 * z * z * z; };
    ClosedCurve curve = sample_circle_image(f, s, 1e-6);
    REQUIRE_FALSE(curve.boxes.empty());
    ClosedCurve plain = curve;
    plain.boxes.clear();
    for (int k = 0; k < 200; ++k) {
      const Complex w = gen.in_disk(1.5);
      const auto x = classify_point(curve, w);
      const auto y = classify_point(plain, w);
      CHECK(x.winding == y.winding);
      CHECK(winding_number(curve, w) == y.winding);
      CHECK(x.distance == doctest::Approx(y.distance).epsilon(1e-12));
      // a cutoff never hides a distance below it
      const auto z = classify_point(curve, w, 0.05);
      if (y.distance < 0.05) CHECK(z.distance == doctest::Approx(y.distance).epsilon(1e-12));
      else CHECK(z.distance >= 0.05);
    }
  }
}

TEST_CASE("check_subordination examples with Moebius targets") {
  const DiskGrid grid = default_grid(180);
  const SampledFunction one = sample([](Complex) { return Complex(1.0); }, grid);
  const auto v1 = check_subordination(one, MobiusTarget{1.0, -1.0});
  CHECK(v1.status == Status::Certified);
  CHECK(v1.margin > 0.0);

  // (1 + 2z)/(1 + 0.5z) reaches about 1.99 at z = 0.99, outside Disk(1, 0.5)
  const MobiusTarget narrow{0.5, 0.0};
  const SampledFunction left = sample([](Complex z) { return (1.0 + 2.0 * z) / (1.0 + 0.5 * z); }, grid);
  const auto v2 = check_subordination(left, narrow);
  CHECK(v2.status == Status::Refuted);
  REQUIRE(v2.witness);
  CHECK(region_contains(mobius_image(narrow, 1.0), v2.witness->value) < 0.0);
  CHECK(std::abs(v2.witness->z) == doctest::Approx(0.99));
  CHECK(v2.margin < 0.0);

  for (const MobiusTarget t : {MobiusTarget{1.0, -1.0}, MobiusTarget{0.5, 0.0}, MobiusTarget{0.2, -0.8}}) {
    const auto self = check_subordination(sample([t](Complex z) { return t(z); }, grid), t);
    CHECK(self.status == Status::Certified);
  }

  const SampledFunction shifted = sample([](Complex z) { return 1.1 + z / 4.0; }, grid);
  CHECK(check_subordination(shifted, MobiusTarget{1.0, -1.0}).status == Status::Refuted);
}

TEST_CASE("check_subordination with a general univalent target") {
  const DiskGrid grid = default_grid(120);
  TargetMap q;
  q.label = "exp";
  q.value = [](Complex z) { return std::exp(z); };
  q.d1 = q.value;
  q.d2 = q.value;
  const auto inside = check_subordination(sample([](Complex z) { return std::exp(0.5 * z); }, grid), q);
  CHECK(inside.status == Status::Certified);
  const auto outside = check_subordination(sample([](Complex z) { return std::exp(1.2 * z); }, grid), q);
  CHECK(outside.status == Status::Refuted);
  REQUIRE(outside.witness);
  // the witness value is not attained on |z| <= |witness z|
  const ClosedCurve c = sample_circle_image(q.value, std::abs(outside.witness->z));
  CHECK(winding_number(c, outside.witness->value) == 0);

  // z^2 is not univalent: no certificate, but no false refutation either
  TargetMap sq;
  sq.label = "1+z^2";
  sq.value = [](Complex z) { return 1.0 + z * z; };
  const auto v = check_subordination(sample([](Complex z) { return 1.0 + 0.5 * z * z; }, grid), sq);
  CHECK(v.status == Status::Inconclusive);
  CHECK_FALSE(diagnose_univalence(sq).passed);
  CHECK(diagnose_univalence(q).passed);
}

TEST_CASE("property: winding consistency of verdicts") {
  Gen gen(205);
  const DiskGrid grid = default_grid(90);
  for (int trial = 0; trial < 30; ++trial) {
    const MobiusTarget t = random_target(gen);
    if (std::abs(t.B) > 0.95) continue;
    const Complex c = gen.in_disk(0.4);
    const Complex d = gen.in_disk(1.3);
    // left = t(c z + d z^2): subordinate exactly when |c z + d z^2| stays below 1
    const SampledFunction left = sample([&](Complex z) { return t(c * z + d * z * z); }, grid);
    const auto v = check_subordination(left, t);
    const ClosedCurve outer = sample_circle_image([t](Complex z) { return t(z); }, 0.99999);
    if (v.status == Status::Certified) {
      for (std::size_t i = 0; i < left.values.size(); i += 7) CHECK(winding_number(outer, left.values[i]) >= 1);
    } else if (v.status == Status::Refuted) {
      REQUIRE(v.witness);
      const ClosedCurve at = sample_circle_image([t](Complex z) { return t(z); }, std::abs(v.witness->z));
      CHECK(winding_number(at, v.witness->value) == 0);
    }
  }
}

TEST_CASE("schwarz_witness examples and bound") {
  const DiskGrid grid = default_grid(180);
  const MobiusTarget t{1.0, -1.0};
  const auto self = schwarz_witness(sample([t](Complex z) { return t(z); }, grid), t);
  CHECK(self.max_ratio == doctest::Approx(1.0).epsilon(1e-12));
  const auto one = schwarz_witness(sample([](Complex) { return Complex(1.0); }, grid), t);
  CHECK(one.max_ratio == 0.0);
  const auto sq = schwarz_witness(sample([t](Complex z) { return t(z * z); }, grid), t);
  CHECK(sq.max_ratio == doctest::Approx(0.99).epsilon(1e-12));

  Gen gen(206);
  for (int trial = 0; trial < 40; ++trial) {
    const MobiusTarget m = random_target(gen);
    const Complex c = gen.in_disk(1.0);
    const SampledFunction left = sample([&](Complex z) { return m(c * z * (0.5 + 0.5 * z)); }, grid);
    if (check_subordination(left, m).status != Status::Certified) continue;
    CHECK(schwarz_witness(left, m).max_ratio <= 1.0 + 1e-6);
  }
}

TEST_CASE("convexity_margin examples") {
  const DiskGrid grid = default_grid(360);
  const auto cayley = mobius_map({1.0, -1.0});
  // 1 + z q''/q' = (1 + z)/(1 - z), smallest real part at z = -0.99
  CHECK(convexity_margin(cayley, grid) == doctest::Approx(0.01 / 1.99).epsilon(1e-9));
  TargetMap ident;
  ident.value = [](Complex z) { return z; };
  ident.d1 = [](Complex) { return Complex(1.0); };
  ident.d2 = [](Complex) { return Complex(0.0); };
  CHECK(convexity_margin(ident, grid) == doctest::Approx(1.0));
  CHECK(convexity_margin(mobius_map({0.5, 0.0}), grid) == doctest::Approx(1.0));
}

TEST_CASE("convex_combination_check examples") {
  const DiskGrid grid = default_grid(90);
  const MobiusTarget t{1.0, -1.0};
  const Region hp = mobius_image(t, 1.0);
  const auto f = sample([](Complex) { return Complex(1.0); }, grid).values;
  const auto g = sample([t](Complex z) { return t(z); }, grid).values;
  const auto half = convex_combination_check(f, g, hp, 0.5);
  CHECK(half.holds);
  CHECK(half.margin > 0.0);
  // mu = 0 and mu = 1 reduce to the individual checks
  double gmin = std::numeric_limits<double>::infinity();
  for (const auto& w : g) gmin = std::min(gmin, region_contains(hp, w));
  CHECK(convex_combination_check(f, g, hp, 0.0).margin == doctest::Approx(gmin));
  CHECK(convex_combination_check(f, g, hp, 1.0).margin == doctest::Approx(1.0));
}

}  // TEST_SUITE
