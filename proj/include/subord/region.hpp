#pragma once

// Images of the unit disk under real-coefficient Moebius maps, argument
// principle range tests and three-valued subordination verdicts.

#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "subord/series.hpp"

namespace subord {

/// w = (1 + A z) / (1 + B z) with -1 <= B <= 1 and A != B.
struct MobiusTarget {
  double A = 1.0;
  double B = -1.0;

  Complex operator()(Complex z) const noexcept { return (1.0 + A * z) / (1.0 + B * z); }
  Complex derivative(Complex z) const noexcept {
    const Complex d = 1.0 + B * z;
    return (A - B) / (d * d);
  }
  Complex second_derivative(Complex z) const noexcept {
    const Complex d = 1.0 + B * z;
    return -2.0 * B * (A - B) / (d * d * d);
  }
  /// Inverse map: the Schwarz-function value belonging to w.
  Complex inverse(Complex w) const noexcept { return (w - 1.0) / (A - B * w); }
};

/// Validates the Moebius parameters.
MobiusTarget make_mobius(double A, double B);

struct Disk {
  Complex center;
  double radius = 1.0;
};

enum class Sense { Greater, Less };

/// {Re w > threshold} or {Re w < threshold}.
struct HalfPlane {
  double threshold = 0.0;
  Sense sense = Sense::Greater;
};

using Region = std::variant<Disk, HalfPlane>;

/// Image of |z| < r. A half-plane appears only for |B| = 1 and r = 1; its
/// side is the one containing the image of the origin.
Region mobius_image(const MobiusTarget& target, double r);

/// Signed distance to the boundary, positive inside.
double region_contains(const Region& region, Complex w);

struct Nesting {
  bool nested = false;
  double margin = 0.0;  // smallest gap between the two boundaries
};

/// Exact containment inner ⊆ outer. A half-plane is never inside a disk.
Nesting region_nested(const Region& inner, const Region& outer);

/// Winding number of a closed sampled curve (first == last) around w0 from the
/// sum of principal argument increments. Throws NearBoundaryError when w0 is
/// within 1e-9 of a sample.
int winding_number(std::span<const Complex> closed_curve, Complex w0);

/// Values of a function on every point of a DiskGrid.
struct SampledFunction {
  DiskGrid grid;
  std::vector<Complex> values;

  Complex at_origin() const { return values.at(0); }
};

SampledFunction sample(const std::function<Complex(Complex)>& f, const DiskGrid& grid);

/// An analytic map used as a subordination target, with derivatives where known.
struct TargetMap {
  std::string label;
  std::function<Complex(Complex)> value;
  std::function<Complex(Complex)> d1;  // may be empty: central differences are used
  std::function<Complex(Complex)> d2;  // may be empty
  std::optional<MobiusTarget> mobius;

  Complex operator()(Complex z) const { return value(z); }
  Complex derivative(Complex z) const;
};

TargetMap mobius_map(const MobiusTarget& t);

/// q + eta z q'.
TargetMap differential_image(const TargetMap& q, Complex eta);

/// Polygon through the image of |z| = radius. Each segment carries a sag
/// estimate: the distance of the image of the arc midpoint from the chord.
struct ClosedCurve {
  double radius = 0.0;
  std::vector<Complex> points;  // closed: back() == front()
  std::vector<double> sag;      // sag[i] belongs to segment (points[i], points[i+1])

  // bounding boxes of consecutive runs of kChunk segments, for pruning
  struct Box {
    double x0, x1, y0, y1;
  };
  static constexpr std::size_t kChunk = 32;
  std::vector<Box> boxes;
};

/// Fills curve.boxes. Curves from sample_circle_image are already indexed;
/// classify_point scans every segment of a curve without boxes.
void index_curve(ClosedCurve& curve);

ClosedCurve sample_circle_image(const std::function<Complex(Complex)>& f, double radius,
                                double tolerance = 1e-6, int initial = 256);

struct PointClass {
  int winding = 0;
  double distance = 0.0;  // to the polygon
  double sag = 0.0;       // sag of the nearest segment
};

/// Crossing-rule winding number and distance of w to the polygon. Distances
/// at or above `cutoff` are only known to be >= cutoff.
PointClass classify_point(const ClosedCurve& curve, Complex w,
                          double cutoff = std::numeric_limits<double>::infinity());

/// Crossing-rule winding number alone.
int winding_number(const ClosedCurve& curve, Complex w);

enum class Status { Certified, Refuted, Inconclusive };

const char* to_string(Status s) noexcept;

struct Witness {
  Complex z;
  Complex value;
};

/// `margin` is the smallest signed margin of the deciding test: positive when
/// Certified, negative when Refuted (the witness lies outside by |margin|).
struct SubordinationVerdict {
  Status status = Status::Inconclusive;
  double margin = 0.0;
  std::optional<Witness> witness;
  std::vector<double> radii_checked;
  std::string reason;
};

struct SubordinationOptions {
  double origin_tolerance = 1e-9;
  double certify_margin = 1e-6;
  double refute_margin = 1e-6;
  // slack on the left-hand values, e.g. a series tail bound
  double left_error = 0.0;
  // left(|z| <= r) is compared with target(|z| <= min(1, r * radius_scale))
  double radius_scale = 1.0;
  // curve radius standing in for |z| = 1 with non-Moebius targets
  double certify_radius = 0.999;
  double curve_tolerance = 1e-6;
};

/// left ≺ target where left(0) must equal 1 = target(0). Certified when every
/// sample lies in the full image with margin; Refuted when some sample at
/// radius r leaves the image of |z| <= r.
SubordinationVerdict check_subordination(const SampledFunction& left, const MobiusTarget& target,
                                         const SubordinationOptions& options = {});

struct UnivalenceDiagnostic {
  bool passed = false;
  std::string reason;
};

/// Image curves of a target for every radius of a grid (scaled and capped as
/// in SubordinationOptions) plus the certification curve. Reusable across
/// left-hand functions sampled on the same grid.
struct CurveFamily {
  Complex origin_value;
  std::vector<ClosedCurve> per_radius;
  ClosedCurve outer;
  UnivalenceDiagnostic univalence;
};

CurveFamily build_curve_family(const TargetMap& target, const DiskGrid& grid,
                               const SubordinationOptions& options = {});

/// General analytic target. Refutations use the argument principle at every
/// grid radius; certification additionally needs the univalence diagnostic.
SubordinationVerdict check_subordination(const SampledFunction& left, const TargetMap& target,
                                         const SubordinationOptions& options = {});

SubordinationVerdict check_subordination(const SampledFunction& left, const CurveFamily& family,
                                         const SubordinationOptions& options = {});

/// Necessary conditions only: nonvanishing derivative and pairwise distinct
/// values on a coarse grid, and winding number one of the image of
/// |z| = radius around the image of the origin.
UnivalenceDiagnostic diagnose_univalence(const TargetMap& target, double radius = 0.99);

struct SchwarzWitness {
  std::vector<Complex> w;
  double max_ratio = 0.0;  // max |w(z)| / |z| over z != 0
  std::optional<Complex> failure_at;
};

/// w = target^{-1}(left) on the grid of `left`.
SchwarzWitness schwarz_witness(const SampledFunction& left, const MobiusTarget& target);

/// min over the grid of Re{1 + z q''(z) / q'(z)}.
double convexity_margin(const TargetMap& q, const DiskGrid& grid);

struct CombinationCheck {
  bool holds = false;
  double margin = 0.0;
};

/// mu f + (1 - mu) g stays in `region` at every sample.
CombinationCheck convex_combination_check(std::span<const Complex> f, std::span<const Complex> g,
                                          const Region& region, double mu);

}  // namespace subord
