#include "subord/region.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "subord/errors.hpp"

namespace subord {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Complex central_difference(const std::function<Complex(Complex)>& f, Complex z) {
  const double h = 1e-6;
  return (f(z + h) - f(z - h)) / (2.0 * h);
}

double segment_distance(Complex a, Complex b, Complex w) {
  const Complex ab = b - a;
  const double len2 = std::norm(ab);
  if (len2 == 0.0) return std::abs(w - a);
  const double t = std::clamp(((w - a) * std::conj(ab)).real() / len2, 0.0, 1.0);
  return std::abs(w - (a + t * ab));
}

// > 0 when w is left of the directed line a -> b.
double is_left(Complex a, Complex b, Complex w) {
  return (b.real() - a.real()) * (w.imag() - a.imag()) - (w.real() - a.real()) * (b.imag() - a.imag());
}

}  // namespace

MobiusTarget make_mobius(double A, double B) {
  if (!std::isfinite(A) || !std::isfinite(B)) throw DomainError("MobiusTarget: non-finite parameter");
  if (B < -1.0 || B > 1.0) throw DomainError("MobiusTarget: B must lie in [-1, 1]");
  if (A == B) throw DomainError("MobiusTarget: A must differ from B");
  return MobiusTarget{A, B};
}

Region mobius_image(const MobiusTarget& target, double r) {
  if (!(r > 0.0 && r <= 1.0)) throw DomainError("mobius_image: r must lie in (0, 1]");
  const double A = target.A;
  const double B = target.B;
  if (std::abs(B) == 1.0 && r == 1.0) {
    // on |z| = 1, Re 1/(1 - z) = 1/2
    const double threshold = B < 0.0 ? (1.0 - A) / 2.0 : (1.0 + A) / 2.0;
    return HalfPlane{threshold, 1.0 > threshold ? Sense::Greater : Sense::Less};
  }
  const double denom = 1.0 - B * B * r * r;
  return Disk{Complex((1.0 - A * B * r * r) / denom, 0.0), std::abs(A - B) * r / denom};
}

double region_contains(const Region& region, Complex w) {
  if (const auto* d = std::get_if<Disk>(&region)) return d->radius - std::abs(w - d->center);
  const auto& h = std::get<HalfPlane>(region);
  return h.sense == Sense::Greater ? w.real() - h.threshold : h.threshold - w.real();
}

Nesting region_nested(const Region& inner, const Region& outer) {
  double margin = -kInf;
  if (const auto* di = std::get_if<Disk>(&inner)) {
    if (const auto* dout = std::get_if<Disk>(&outer)) {
      margin = dout->radius - di->radius - std::abs(di->center - dout->center);
    } else {
      const auto& h = std::get<HalfPlane>(outer);
      margin = h.sense == Sense::Greater ? (di->center.real() - di->radius) - h.threshold
                                         : h.threshold - (di->center.real() + di->radius);
    }
  } else if (const auto* hout = std::get_if<HalfPlane>(&outer)) {
    const auto& hi = std::get<HalfPlane>(inner);
    if (hi.sense == hout->sense)
      margin = hi.sense == Sense::Greater ? hi.threshold - hout->threshold : hout->threshold - hi.threshold;
  }
  return Nesting{margin >= -1e-12, margin};
}

int winding_number(std::span<const Complex> closed_curve, Complex w0) {
  if (closed_curve.size() < 2) throw DomainError("winding_number: curve needs at least two samples");
  if (std::abs(closed_curve.front() - closed_curve.back()) > 1e-12)
    throw DomainError("winding_number: curve is not closed");
  double total = 0.0;
  for (std::size_t k = 0; k < closed_curve.size(); ++k) {
    if (std::abs(closed_curve[k] - w0) < 1e-9)
      throw NearBoundaryError("winding_number: point lies on the sampled curve");
    if (k > 0) total += std::arg((closed_curve[k] - w0) / (closed_curve[k - 1] - w0));
  }
  return static_cast<int>(std::lround(total / (2.0 * kPi)));
}

SampledFunction sample(const std::function<Complex(Complex)>& f, const DiskGrid& grid) {
  SampledFunction s{grid, {}};
  s.values.reserve(grid.size());
  for (const auto& z : grid.points()) s.values.push_back(f(z));
  return s;
}

Complex TargetMap::derivative(Complex z) const { return d1 ? d1(z) : central_difference(value, z); }

TargetMap mobius_map(const MobiusTarget& t) {
  TargetMap m;
  m.label = "mobius(" + std::to_string(t.A) + "," + std::to_string(t.B) + ")";
  m.value = [t](Complex z) { return t(z); };
  m.d1 = [t](Complex z) { return t.derivative(z); };
  m.d2 = [t](Complex z) { return t.second_derivative(z); };
  m.mobius = t;
  return m;
}

TargetMap differential_image(const TargetMap& q, Complex eta) {
  TargetMap m;
  m.label = q.label + "+eta*z*q'";
  m.value = [q, eta](Complex z) { return q(z) + eta * z * q.derivative(z); };
  if (q.d2) {
    m.d1 = [q, eta](Complex z) { return (1.0 + eta) * q.derivative(z) + eta * z * q.d2(z); };
  }
  return m;
}

namespace {

struct CurveBuilder {
  const std::function<Complex(Complex)>& f;
  double radius;
  double tolerance;
  ClosedCurve& out;
  std::size_t max_points = 400000;

  void refine(double ta, Complex wa, double tb, Complex wb, int depth) {
    const double tm = 0.5 * (ta + tb);
    const Complex wm = f(std::polar(radius, tm));
    const double dev = segment_distance(wa, wb, wm);
    const double allowed = tolerance * std::max(1.0, std::abs(wm));
    if ((dev <= allowed && depth > 0) || depth >= 24 || out.points.size() >= max_points) {
      out.sag.push_back(dev);
      out.points.push_back(wb);
      return;
    }
    refine(ta, wa, tm, wm, depth + 1);
    refine(tm, wm, tb, wb, depth + 1);
  }
};

}  // namespace

ClosedCurve sample_circle_image(const std::function<Complex(Complex)>& f, double radius, double tolerance,
                                int initial) {
  if (!(radius > 0.0)) throw DomainError("sample_circle_image: radius must be positive");
  initial = std::max(initial, 8);
  ClosedCurve curve;
  curve.radius = radius;
  CurveBuilder builder{f, radius, tolerance, curve};
  std::vector<Complex> coarse(static_cast<std::size_t>(initial) + 1);
  for (int j = 0; j < initial; ++j) coarse[static_cast<std::size_t>(j)] = f(std::polar(radius, 2.0 * kPi * j / initial));
  coarse.back() = coarse.front();
  curve.points.push_back(coarse.front());
  for (int j = 0; j < initial; ++j) {
    const double ta = 2.0 * kPi * j / initial;
    const double tb = 2.0 * kPi * (j + 1) / initial;
    builder.refine(ta, coarse[static_cast<std::size_t>(j)], tb, coarse[static_cast<std::size_t>(j) + 1], 0);
  }
  curve.points.back() = curve.points.front();
  index_curve(curve);
  return curve;
}

void index_curve(ClosedCurve& curve) {
  curve.boxes.clear();
  const auto& pts = curve.points;
  const std::size_t segments = pts.empty() ? 0 : pts.size() - 1;
  for (std::size_t s = 0; s < segments; s += ClosedCurve::kChunk) {
    const std::size_t e = std::min(s + ClosedCurve::kChunk, segments);
    ClosedCurve::Box b{pts[s].real(), pts[s].real(), pts[s].imag(), pts[s].imag()};
    for (std::size_t i = s + 1; i <= e; ++i) {
      b.x0 = std::min(b.x0, pts[i].real());
      b.x1 = std::max(b.x1, pts[i].real());
      b.y0 = std::min(b.y0, pts[i].imag());
      b.y1 = std::max(b.y1, pts[i].imag());
    }
    curve.boxes.push_back(b);
  }
}

namespace {

void classify_range(const ClosedCurve& curve, Complex w, std::size_t begin, std::size_t end, PointClass& c,
                    bool crossings, bool distances) {
  const auto& pts = curve.points;
  for (std::size_t i = begin; i < end; ++i) {
    const Complex a = pts[i];
    const Complex b = pts[i + 1];
    if (crossings) {
      if (a.imag() <= w.imag()) {
        if (b.imag() > w.imag() && is_left(a, b, w) > 0) ++c.winding;
      } else if (b.imag() <= w.imag() && is_left(a, b, w) < 0) {
        --c.winding;
      }
    }
    if (distances) {
      const double d = segment_distance(a, b, w);
      if (d < c.distance) {
        c.distance = d;
        c.sag = curve.sag[i];
      }
    }
  }
}

double box_distance(const ClosedCurve::Box& b, Complex w) {
  const double dx = std::max({b.x0 - w.real(), 0.0, w.real() - b.x1});
  const double dy = std::max({b.y0 - w.imag(), 0.0, w.imag() - b.y1});
  return std::hypot(dx, dy);
}

}  // namespace

PointClass classify_point(const ClosedCurve& curve, Complex w, double cutoff) {
  PointClass c;
  c.distance = kInf;
  const std::size_t segments = curve.points.empty() ? 0 : curve.points.size() - 1;
  const std::size_t chunks = (segments + ClosedCurve::kChunk - 1) / ClosedCurve::kChunk;
  if (curve.boxes.size() != chunks) {
    classify_range(curve, w, 0, segments, c, true, true);
    return c;
  }
  // chunks straddling the horizontal line through w hold every crossing and
  // usually the nearest segment as well
  const auto straddles = [&](const ClosedCurve::Box& b) { return b.y0 <= w.imag() && w.imag() <= b.y1; };
  for (std::size_t k = 0; k < chunks; ++k) {
    if (!straddles(curve.boxes[k])) continue;
    const std::size_t s = k * ClosedCurve::kChunk;
    classify_range(curve, w, s, std::min(s + ClosedCurve::kChunk, segments), c, true, true);
  }
  for (std::size_t k = 0; k < chunks; ++k) {
    const auto& b = curve.boxes[k];
    if (straddles(b) || box_distance(b, w) >= std::min(c.distance, cutoff)) continue;
    const std::size_t s = k * ClosedCurve::kChunk;
    classify_range(curve, w, s, std::min(s + ClosedCurve::kChunk, segments), c, false, true);
  }
  return c;
}

int winding_number(const ClosedCurve& curve, Complex w) {
  PointClass c;
  c.distance = kInf;
  const std::size_t segments = curve.points.empty() ? 0 : curve.points.size() - 1;
  const std::size_t chunks = (segments + ClosedCurve::kChunk - 1) / ClosedCurve::kChunk;
  if (curve.boxes.size() != chunks) {
    classify_range(curve, w, 0, segments, c, true, false);
    return c.winding;
  }
  for (std::size_t k = 0; k < chunks; ++k) {
    const auto& b = curve.boxes[k];
    if (b.y0 > w.imag() || w.imag() > b.y1 || b.x1 < w.real()) continue;
    const std::size_t s = k * ClosedCurve::kChunk;
    classify_range(curve, w, s, std::min(s + ClosedCurve::kChunk, segments), c, true, false);
  }
  return c.winding;
}

const char* to_string(Status s) noexcept {
  switch (s) {
    case Status::Certified: return "certified";
    case Status::Refuted: return "refuted";
    case Status::Inconclusive: return "inconclusive";
  }
  return "unknown";
}

SubordinationVerdict check_subordination(const SampledFunction& left, const MobiusTarget& target,
                                         const SubordinationOptions& options) {
  SubordinationVerdict v;
  const auto& grid = left.grid;
  v.radii_checked.assign(grid.radii().begin(), grid.radii().end());

  const Complex origin = left.at_origin();
  if (std::abs(origin - 1.0) > options.origin_tolerance) {
    v.status = Status::Refuted;
    v.margin = -std::abs(origin - 1.0);
    v.witness = Witness{0.0, origin};
    v.reason = "value at the origin differs from target(0) = 1";
    return v;
  }

  // Schwarz lemma: left(|z| <= r) must lie in target(|z| <= r).
  double worst = kInf;
  std::size_t worst_index = 0;
  for (std::size_t c = 0; c < grid.radii().size(); ++c) {
    const double r = grid.radii()[c];
    const Region image = mobius_image(target, std::min(1.0, r * options.radius_scale));
    for (std::size_t i = grid.circle_begin(c); i < grid.circle_begin(c + 1); ++i) {
      const double m = region_contains(image, left.values[i]);
      if (m < worst) {
        worst = m;
        worst_index = i;
      }
    }
  }
  if (worst < -(options.refute_margin + options.left_error)) {
    v.status = Status::Refuted;
    v.margin = worst;
    v.witness = Witness{grid.points()[worst_index], left.values[worst_index]};
    v.reason = "value leaves the image of the disk of the same radius";
    return v;
  }

  const Region full = mobius_image(target, 1.0);
  double least = kInf;
  std::size_t least_index = 0;
  for (std::size_t i = 0; i < left.values.size(); ++i) {
    const double m = region_contains(full, left.values[i]);
    if (m < least) {
      least = m;
      least_index = i;
    }
  }
  v.margin = least;
  if (least > options.certify_margin + options.left_error) {
    v.status = Status::Certified;
  } else {
    v.status = Status::Inconclusive;
    v.witness = Witness{grid.points()[least_index], left.values[least_index]};
    v.reason = "samples approach the boundary of the target image";
  }
  return v;
}

CurveFamily build_curve_family(const TargetMap& target, const DiskGrid& grid, const SubordinationOptions& options) {
  CurveFamily family;
  family.origin_value = target(0.0);
  for (double r : grid.radii()) {
    const double rho = std::min(r * options.radius_scale, options.certify_radius);
    family.per_radius.push_back(sample_circle_image(target.value, rho, options.curve_tolerance));
  }
  family.outer = sample_circle_image(target.value, options.certify_radius, options.curve_tolerance);
  family.univalence = diagnose_univalence(target, options.certify_radius);
  return family;
}

SubordinationVerdict check_subordination(const SampledFunction& left, const TargetMap& target,
                                         const SubordinationOptions& options) {
  if (target.mobius) return check_subordination(left, *target.mobius, options);
  return check_subordination(left, build_curve_family(target, left.grid, options), options);
}

SubordinationVerdict check_subordination(const SampledFunction& left, const CurveFamily& family,
                                         const SubordinationOptions& options) {
  SubordinationVerdict v;
  const auto& grid = left.grid;
  if (family.per_radius.size() != grid.radii().size())
    throw DomainError("check_subordination: curve family built for a different grid");
  v.radii_checked.assign(grid.radii().begin(), grid.radii().end());

  const Complex origin = left.at_origin();
  if (std::abs(origin - family.origin_value) > options.origin_tolerance) {
    v.status = Status::Refuted;
    v.margin = -std::abs(origin - family.origin_value);
    v.witness = Witness{0.0, origin};
    v.reason = "value at the origin differs from target(0)";
    return v;
  }

  // argument principle per radius; valid without univalence of the target
  double worst = kInf;
  std::optional<Witness> worst_witness;
  for (std::size_t c = 0; c < grid.radii().size(); ++c) {
    const ClosedCurve& curve = family.per_radius[c];
    for (std::size_t i = grid.circle_begin(c); i < grid.circle_begin(c + 1); ++i) {
      if (winding_number(curve, left.values[i]) != 0) continue;
      const PointClass pc = classify_point(curve, left.values[i]);
      const double depth = -(pc.distance - pc.sag);
      if (depth < worst) {
        worst = depth;
        worst_witness = Witness{grid.points()[i], left.values[i]};
      }
    }
  }
  if (worst < -(options.refute_margin + options.left_error)) {
    v.status = Status::Refuted;
    v.margin = worst;
    v.witness = worst_witness;
    v.reason = "value is not attained by the target on the disk of the same radius";
    return v;
  }

  if (!family.univalence.passed) {
    v.status = Status::Inconclusive;
    v.reason = "target univalence diagnostic failed: " + family.univalence.reason;
    return v;
  }

  const double max_sag =
      family.outer.sag.empty() ? 0.0 : *std::max_element(family.outer.sag.begin(), family.outer.sag.end());
  double least = kInf;
  std::size_t least_index = 0;
  for (std::size_t i = 0; i < left.values.size(); ++i) {
    // inside points farther than least + max_sag cannot lower the margin
    const bool inside = winding_number(family.outer, left.values[i]) != 0;
    const PointClass pc = classify_point(family.outer, left.values[i], inside ? least + max_sag : kInf);
    const double m = pc.winding != 0 ? pc.distance - pc.sag : -pc.distance;
    if (m < least) {
      least = m;
      least_index = i;
    }
  }
  v.margin = least;
  if (least > options.certify_margin + options.left_error) {
    v.status = Status::Certified;
  } else {
    v.status = Status::Inconclusive;
    v.witness = Witness{grid.points()[least_index], left.values[least_index]};
    v.reason = "samples approach the boundary of the target image";
  }
  return v;
}

UnivalenceDiagnostic diagnose_univalence(const TargetMap& target, double radius) {
  std::vector<Complex> pts{0.0};
  for (double r : {0.25 * radius, 0.5 * radius, 0.75 * radius, radius})
    for (int j = 0; j < 32; ++j) pts.push_back(std::polar(r, 2.0 * kPi * (j + 0.5) / 32));

  std::vector<Complex> vals;
  vals.reserve(pts.size());
  double scale = 1.0;
  for (const auto& z : pts) {
    vals.push_back(target(z));
    if (!is_finite(vals.back())) return {false, "non-finite value"};
    scale = std::max(scale, std::abs(vals.back()));
  }
  for (const auto& z : pts)
    if (std::abs(target.derivative(z)) < 1e-10 * scale) return {false, "derivative vanishes at a sample"};
  for (std::size_t i = 0; i < vals.size(); ++i)
    for (std::size_t j = i + 1; j < vals.size(); ++j)
      if (std::abs(vals[i] - vals[j]) < 1e-10 * scale) return {false, "two samples share a value"};

  const ClosedCurve curve = sample_circle_image(target.value, radius, 1e-6);
  const PointClass pc = classify_point(curve, vals[0]);
  if (pc.winding != 1) return {false, "boundary image winds " + std::to_string(pc.winding) + " times around target(0)"};
  return {true, {}};
}

SchwarzWitness schwarz_witness(const SampledFunction& left, const MobiusTarget& target) {
  SchwarzWitness s;
  s.w.reserve(left.values.size());
  const auto pts = left.grid.points();
  for (std::size_t i = 0; i < left.values.size(); ++i) {
    const Complex denom = target.A - target.B * left.values[i];
    if (std::abs(denom) < 1e-12) {
      if (!s.failure_at) s.failure_at = pts[i];
      s.w.push_back(Complex(kInf, 0.0));
      s.max_ratio = kInf;
      continue;
    }
    const Complex w = (left.values[i] - 1.0) / denom;
    s.w.push_back(w);
    if (std::abs(pts[i]) > 0.0) s.max_ratio = std::max(s.max_ratio, std::abs(w) / std::abs(pts[i]));
  }
  return s;
}

double convexity_margin(const TargetMap& q, const DiskGrid& grid) {
  if (!q.d2) throw DomainError("convexity_margin: second derivative required");
  double least = kInf;
  for (const auto& z : grid.points()) {
    const Complex d1 = q.derivative(z);
    if (std::abs(d1) < 1e-14) throw DomainError("convexity_margin: q' vanishes at a sample");
    least = std::min(least, (1.0 + z * q.d2(z) / d1).real());
  }
  return least;
}

CombinationCheck convex_combination_check(std::span<const Complex> f, std::span<const Complex> g,
                                          const Region& region, double mu) {
  if (f.size() != g.size()) throw DomainError("convex_combination_check: sample counts differ");
  if (!(mu >= 0.0 && mu <= 1.0)) throw DomainError("convex_combination_check: mu must lie in [0, 1]");
  double least = kInf;
  for (std::size_t i = 0; i < f.size(); ++i) least = std::min(least, region_contains(region, mu * f[i] + (1.0 - mu) * g[i]));
  return CombinationCheck{least > 0.0, least};
}

}  // namespace subord
