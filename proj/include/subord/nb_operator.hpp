#pragma once

// Phi(z) = (z^p / f(z))^{alpha + i beta}, the operator
//
//     J(z) = (1 + mu) Phi(z) - mu (z f'(z) / (p f(z))) Phi(z),
//
// class membership and the numerical checkers for the subordination,
// inclusion, bound, superordination and sandwich results built on them.

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "subord/dominant.hpp"
#include "subord/region.hpp"
#include "subord/series.hpp"

namespace subord {

struct RhoBound {
  double rho = 0.0;
};

using ClassTarget = std::variant<MobiusTarget, RhoBound>;

struct ClassParams {
  int p = 1;
  int n = 1;
  Complex mu;
  double alpha = 1.0;
  double beta = 0.0;
  ClassTarget target = MobiusTarget{};

  Complex exponent() const noexcept { return {alpha, beta}; }
  /// mu / (p (alpha + i beta)).
  Complex eta() const noexcept;
  /// p (alpha + i beta) / (mu n). DomainError when mu = 0.
  Complex gamma() const;
};

/// Validates alpha >= 0, alpha + i beta != 0, the Moebius target or 0 <= rho < p.
ClassParams make_params(int p, int n, Complex mu, double alpha, double beta, ClassTarget target);

/// Evaluates Phi and J for one function and exponent. The logarithm of
/// f(z)/z^p is continued from the origin, so Phi(0) = 1 and Phi stays on one
/// analytic branch even where f(z)/z^p crosses the negative axis.
class NbEvaluator {
 public:
  NbEvaluator(AnalyticFunction f, Complex exponent);

  const AnalyticFunction& function() const noexcept { return data_->f; }
  Complex exponent() const noexcept { return data_->exponent; }

  Complex log_quotient(Complex z) const;
  /// From the power series of Phi where it has converged to rounding level
  /// (|z| <= series_radius()), otherwise by continuation along the ray.
  Complex phi(Complex z) const;
  /// Always by continuation along the ray from 0 to z.
  Complex phi_continued(Complex z) const;
  double series_radius() const noexcept { return data_->series_radius; }
  /// Phi at radius * exp(2 pi i j / m), continued once along the positive
  /// axis and then around the circle.
  std::vector<Complex> phi_on_circle(double radius, std::size_t m) const;
  /// z f'(z) / (p f(z)).
  Complex derivative_ratio(Complex z) const;
  Complex j(Complex z, Complex mu) const;

  /// Phi on a grid, continuing the logarithm ray by ray.
  SampledFunction phi_on(const DiskGrid& grid) const;
  /// J from already computed Phi samples.
  SampledFunction j_on(const SampledFunction& phi, Complex mu) const;

  TargetMap phi_target() const;
  TargetMap j_target(Complex mu) const;

 private:
  struct Data {
    AnalyticFunction f;
    Complex exponent;
    PowerSeries weighted;  // sum (k + p)/p u_k z^k
    PowerSeries phi_series;
    double series_radius = 0.0;
  };
  std::shared_ptr<const Data> data_;
};

SampledFunction phi(const AnalyticFunction& f, const ClassParams& params, const DiskGrid& grid);
SampledFunction nb_operator(const AnalyticFunction& f, const ClassParams& params, const DiskGrid& grid);

struct IdentityResidual {
  double max_residual = 0.0;
  Complex at;
};

/// max |J - Phi - mu z Phi' / (p (alpha + i beta))| with Phi' taken from a
/// Fourier fit of Phi on |z| = 0.95 (1024 samples).
IdentityResidual identity_check(const NbEvaluator& ev, const ClassParams& params, const DiskGrid& grid);
IdentityResidual identity_check(const AnalyticFunction& f, const ClassParams& params, const DiskGrid& grid);

/// Phi' from the Fourier fit used by identity_check, fitted to continued
/// values of Phi (never to its power series).
PowerSeries phi_derivative_fit(const NbEvaluator& ev);

/// Same residual from precomputed Phi samples and Phi' series.
IdentityResidual identity_check(const NbEvaluator& ev, const ClassParams& params, const SampledFunction& phi,
                                const PowerSeries& dphi);

struct BoundVerdict {
  double min_re = 0.0;
  bool passes = false;
  Complex argmin_z;
};

struct MembershipVerdict {
  ClassParams params;
  std::variant<SubordinationVerdict, BoundVerdict> verdict;
  std::string note;

  Status status() const;
};

struct MembershipOptions {
  SubordinationOptions subordination;
  double bound_tolerance = 1e-6;
};

/// Membership from precomputed J samples; dispatches on the target kind.
MembershipVerdict membership(const NbEvaluator& ev, const SampledFunction& j, const ClassParams& params,
                             const MembershipOptions& options = {});

MembershipVerdict membership_def1(const AnalyticFunction& f, const ClassParams& params, const DiskGrid& grid,
                                  const MembershipOptions& options = {});
MembershipVerdict membership_def2(const AnalyticFunction& f, const ClassParams& params, const DiskGrid& grid,
                                  const MembershipOptions& options = {});

// ---- theorem checkers ----

enum class CheckStatus { Certified, Refuted, Inconclusive, Skipped };

const char* to_string(CheckStatus s) noexcept;
CheckStatus to_check_status(Status s) noexcept;

struct CheckItem {
  std::string name;
  CheckStatus status = CheckStatus::Inconclusive;
  double margin = 0.0;
  std::optional<Witness> witness;
  std::string note;
};

struct TheoremReport {
  std::string theorem;
  CheckStatus status = CheckStatus::Inconclusive;
  std::string reason;
  std::vector<CheckItem> checks;
  std::vector<std::string> flags;
};

struct CheckerOptions {
  DiskGrid grid = default_grid(180);
  SubordinationOptions subordination;
  double bound_tolerance = 1e-6;
  double quadrature_tolerance = 1e-10;
};

/// Everything the checkers need from one dominant q, computed once and
/// shared across functions. Curves are built with radii scaled by
/// 1 / grid.max_radius(): membership is only established on the grid, and
/// the Schwarz lemma then places Phi(|z| <= r) inside q(|z| <= r / r_max).
struct DominantSurface {
  std::shared_ptr<const DominantTransform> transform;
  SampledFunction values;
  CurveFamily curves;
  ReExtrema extrema;
};

DominantSurface make_dominant_surface(const DominantSpec& spec, const CheckerOptions& options);

/// Phi ≺ q ≺ (1 + A z)/(1 + B z) for a certified member. `corrupt_swap`
/// swaps A and B in q (negative control).
TheoremReport check_theorem_2_1(const NbEvaluator& ev, const ClassParams& params, const CheckerOptions& options,
                                const SampledFunction* phi = nullptr, const DominantSurface* surface = nullptr,
                                bool corrupt_swap = false);

struct NamedFunction {
  std::string id;
  AnalyticFunction f;
  const SampledFunction* phi = nullptr;  // optional Phi on the checker grid, for the inclusion exponent
};

struct InclusionPair {
  double mu1 = 0.0;
  double mu2 = 0.0;
  MobiusTarget outer;  // (A1, B1)
  MobiusTarget inner;  // (A2, B2)
};

struct InclusionCounterexample {
  std::string id;
  SubordinationVerdict verdict;
};

struct InclusionReport {
  InclusionPair pair;
  CheckStatus status = CheckStatus::Inconclusive;
  std::string reason;
  std::vector<std::string> members;  // certified in the (mu2, A2, B2) class
  std::vector<InclusionCounterexample> counterexamples;
};

/// Checks that -1 <= B1 <= B2 < A2 < A1 <= 1 (or the reflexive case) and
/// 0 <= mu1 <= mu2. Returns the reason on failure.
std::optional<std::string> inclusion_hypotheses(const InclusionPair& pair);

/// Members of the (mu2, A2, B2) class must not be refuted in the (mu1, A1, B1)
/// class. With `enforce_hypotheses` false the pair is checked regardless.
InclusionReport check_theorem_2_2(std::span<const NamedFunction> corpus, const InclusionPair& pair,
                                  double alpha, double beta, const CheckerOptions& options,
                                  bool enforce_hypotheses = true);

/// inf Re q - tol <= Re Phi <= sup Re q + tol for a certified member.
/// `bounds_override` replaces the target used for q (negative control).
TheoremReport check_theorem_2_3(const NbEvaluator& ev, const ClassParams& params, const CheckerOptions& options,
                                const SampledFunction* phi = nullptr, const DominantSurface* surface = nullptr,
                                std::optional<MobiusTarget> bounds_override = std::nullopt);

/// J ≺ q + eta z q' implies Phi ≺ q when q is convex enough.
TheoremReport check_theorem_3_1(const NbEvaluator& ev, const ClassParams& params, const TargetMap& q,
                                const CheckerOptions& options);

/// q + eta z q' ≺ J implies q ≺ Phi for Re mu > 0.
TheoremReport check_theorem_4_1(const NbEvaluator& ev, const ClassParams& params, const TargetMap& q,
                                const CheckerOptions& options);

/// q1 ≺ Phi ≺ q2 from the two one-sided results. A report of
/// check_theorem_4_1 for the same q1 may be passed in to avoid recomputing it.
TheoremReport check_theorem_5_1(const NbEvaluator& ev, const ClassParams& params, const TargetMap& q1,
                                const TargetMap& q2, const CheckerOptions& options,
                                const TheoremReport* lower = nullptr);

/// q + eta z q' for a Moebius q in closed form:
/// (1 + A z)/(1 + B z) + eta (A - B) z / (1 + B z)^2.
TargetMap mobius_differential_image(const MobiusTarget& t, Complex eta);

}  // namespace subord
