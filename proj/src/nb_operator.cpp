#include "subord/nb_operator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "subord/errors.hpp"

namespace subord {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

SubordinationOptions scaled(SubordinationOptions o, double scale) {
  o.radius_scale = scale;
  return o;
}

void add_exponent_flags(TheoremReport& rep, const ClassParams& params) {
  if (params.alpha == 0.0) rep.flags.push_back("purely imaginary exponent: branch-sensitive");
}

TheoremReport skipped(TheoremReport rep, std::string reason) {
  rep.status = CheckStatus::Skipped;
  rep.reason = std::move(reason);
  return rep;
}

CheckItem item_from(const std::string& name, const SubordinationVerdict& v) {
  CheckItem it;
  it.name = name;
  it.status = to_check_status(v.status);
  it.margin = v.margin;
  it.witness = v.witness;
  it.note = v.reason;
  return it;
}

// Refuted dominates, then Inconclusive; Skipped items are informational.
CheckStatus combine(const std::vector<CheckItem>& items) {
  bool all_certified = true;
  for (const auto& it : items) {
    if (it.status == CheckStatus::Refuted) return CheckStatus::Refuted;
    if (it.status == CheckStatus::Inconclusive) all_certified = false;
  }
  return all_certified ? CheckStatus::Certified : CheckStatus::Inconclusive;
}

void check_compatible(const NbEvaluator& ev, const ClassParams& params) {
  if (ev.function().valence() != params.p) throw DomainError("valence of f differs from params.p");
  if (ev.exponent() != params.exponent()) throw DomainError("evaluator exponent differs from params");
}

double refined_min_re_j(const NbEvaluator& ev, Complex mu, Complex z0, double step, double& best_theta) {
  const double r = std::abs(z0);
  const double theta0 = std::arg(z0);
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  auto f = [&](double t) { return ev.j(std::polar(r, t), mu).real(); };
  double a = theta0 - step;
  double b = theta0 + step;
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
  best_theta = 0.5 * (a + b);
  return f(best_theta);
}

}  // namespace

Complex ClassParams::eta() const noexcept { return mu / (static_cast<double>(p) * exponent()); }

Complex ClassParams::gamma() const {
  if (mu == Complex{}) throw DomainError("gamma undefined for mu = 0");
  return static_cast<double>(p) * exponent() / (mu * static_cast<double>(n));
}

ClassParams make_params(int p, int n, Complex mu, double alpha, double beta, ClassTarget target) {
  if (p < 1 || n < 1) throw DomainError("ClassParams: p and n must be positive");
  if (!is_finite(mu) || !std::isfinite(alpha) || !std::isfinite(beta))
    throw DomainError("ClassParams: non-finite parameter");
  if (alpha < 0.0) throw DomainError("ClassParams: alpha must be >= 0");
  if (alpha == 0.0 && beta == 0.0) throw DomainError("ClassParams: alpha + i beta must be nonzero");
  if (const auto* m = std::get_if<MobiusTarget>(&target)) {
    make_mobius(m->A, m->B);
  } else {
    const double rho = std::get<RhoBound>(target).rho;
    if (!(rho >= 0.0 && rho < p)) throw DomainError("ClassParams: rho must lie in [0, p)");
  }
  return ClassParams{p, n, mu, alpha, beta, target};
}

NbEvaluator::NbEvaluator(AnalyticFunction f, Complex exponent) {
  if (exponent == Complex{}) throw DomainError("NbEvaluator: exponent must be nonzero");
  const auto& u = f.quotient();
  std::vector<Complex> w(u.size());
  const double p = f.valence();
  for (std::size_t k = 0; k < u.size(); ++k) w[k] = (static_cast<double>(k) + p) / p * u[k];
  Data d{std::move(f), exponent, PowerSeries(std::move(w)), {}, 0.0};

  // Phi = u^{-e} as a series; trusted on the disk where its last coefficients
  // have decayed below 1e-17, shrunk by 2% to leave room for the tail
  constexpr std::size_t kLength = 4096;
  constexpr std::size_t kWindow = 64;
  const PowerSeries full = series_power(d.f.quotient(), -exponent, kLength);
  double radius = std::numeric_limits<double>::infinity();
  for (std::size_t k = kLength - kWindow; k < kLength; ++k) {
    const double a = std::abs(full[k]);
    if (!std::isfinite(a)) {
      radius = 0.0;
      break;
    }
    if (a > 0.0) radius = std::min(radius, std::pow(1e-17 / a, 1.0 / static_cast<double>(k)));
  }
  radius = std::min(0.98 * radius, 1.0);
  if (radius > 0.0) {
    std::size_t keep = 1;
    double rk = 1.0;
    for (std::size_t k = 0; k < kLength; ++k, rk *= radius)
      if (std::abs(full[k]) * rk > 1e-18) keep = k + 1;
    std::vector<Complex> c(full.coefficients().begin(), full.coefficients().begin() + static_cast<std::ptrdiff_t>(keep));
    d.phi_series = PowerSeries(std::move(c));
  }
  d.series_radius = radius;
  data_ = std::make_shared<const Data>(std::move(d));
}

Complex NbEvaluator::log_quotient(Complex z) const {
  if (z == Complex{}) return 0.0;
  const auto& u = data_->f.quotient();
  return continue_log([&u](Complex w) { return u(w); }, 0.0, 1.0, 0.0, z);
}

Complex NbEvaluator::phi(Complex z) const {
  if (std::abs(z) <= data_->series_radius) return data_->phi_series(z);
  return phi_continued(z);
}

Complex NbEvaluator::phi_continued(Complex z) const { return std::exp(-data_->exponent * log_quotient(z)); }

std::vector<Complex> NbEvaluator::phi_on_circle(double radius, std::size_t m) const {
  const auto& u = data_->f.quotient();
  const std::function<Complex(Complex)> g = [&u](Complex w) { return u(w); };
  std::vector<Complex> out(m);
  Complex prev = radius;
  Complex log_prev = log_quotient(prev);
  for (std::size_t j = 0; j < m; ++j) {
    const Complex z = std::polar(radius, 2.0 * kPi * static_cast<double>(j) / static_cast<double>(m));
    if (j > 0) {
      log_prev = continue_log(g, prev, u(prev), log_prev, z);
      prev = z;
    }
    out[j] = std::exp(-data_->exponent * log_prev);
  }
  return out;
}

Complex NbEvaluator::derivative_ratio(Complex z) const {
  const Complex u = data_->f.quotient()(z);
  if (std::abs(u) < 1e-14) throw BranchError(BranchError::Kind::ZeroOnPath, "f(z)/z^p vanishes");
  return data_->weighted(z) / u;
}

Complex NbEvaluator::j(Complex z, Complex mu) const {
  return phi(z) * ((1.0 + mu) - mu * derivative_ratio(z));
}

SampledFunction NbEvaluator::phi_on(const DiskGrid& grid) const {
  SampledFunction s{grid, std::vector<Complex>(grid.size())};
  s.values[0] = 1.0;
  const auto& u = data_->f.quotient();
  const std::function<Complex(Complex)> g = [&u](Complex w) { return u(w); };
  const auto pts = grid.points();
  for (int a = 0; a < grid.angles_per_circle(); ++a) {
    Complex prev = 0.0;
    Complex g_prev = 1.0;
    Complex log_prev = 0.0;
    for (std::size_t c = 0; c < grid.radii().size(); ++c) {
      const std::size_t idx = grid.circle_begin(c) + static_cast<std::size_t>(a);
      const Complex z = pts[idx];
      log_prev = continue_log(g, prev, g_prev, log_prev, z);
      prev = z;
      g_prev = u(z);
      s.values[idx] = std::exp(-data_->exponent * log_prev);
    }
  }
  return s;
}

SampledFunction NbEvaluator::j_on(const SampledFunction& phi, Complex mu) const {
  SampledFunction s{phi.grid, std::vector<Complex>(phi.values.size())};
  const auto pts = phi.grid.points();
  for (std::size_t i = 0; i < pts.size(); ++i)
    s.values[i] = phi.values[i] * ((1.0 + mu) - mu * derivative_ratio(pts[i]));
  return s;
}

TargetMap NbEvaluator::phi_target() const {
  TargetMap m;
  m.label = "phi";
  const NbEvaluator self = *this;
  m.value = [self](Complex z) { return self.phi(z); };
  // Phi' = -e Phi (u'/u) and u'/u = p (ratio - 1) / z
  m.d1 = [self](Complex z) {
    if (z == Complex{}) return -self.exponent() * self.function().quotient()[1];
    const double p = self.function().valence();
    return -self.exponent() * self.phi(z) * p * (self.derivative_ratio(z) - 1.0) / z;
  };
  return m;
}

TargetMap NbEvaluator::j_target(Complex mu) const {
  TargetMap m;
  m.label = "J";
  const NbEvaluator self = *this;
  m.value = [self, mu](Complex z) { return self.j(z, mu); };
  return m;
}

SampledFunction phi(const AnalyticFunction& f, const ClassParams& params, const DiskGrid& grid) {
  const NbEvaluator ev(f, params.exponent());
  check_compatible(ev, params);
  return ev.phi_on(grid);
}

SampledFunction nb_operator(const AnalyticFunction& f, const ClassParams& params, const DiskGrid& grid) {
  const NbEvaluator ev(f, params.exponent());
  check_compatible(ev, params);
  return ev.j_on(ev.phi_on(grid), params.mu);
}

PowerSeries phi_derivative_fit(const NbEvaluator& ev) {
  return fourier_fit(ev.phi_on_circle(0.95, 1024), 0.95).derivative();
}

IdentityResidual identity_check(const NbEvaluator& ev, const ClassParams& params, const SampledFunction& phi,
                                const PowerSeries& dphi) {
  check_compatible(ev, params);
  const SampledFunction j = ev.j_on(phi, params.mu);
  const Complex scale = params.mu / (static_cast<double>(params.p) * params.exponent());
  IdentityResidual out;
  const auto pts = phi.grid.points();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double r = std::abs(j.values[i] - phi.values[i] - scale * pts[i] * dphi(pts[i]));
    if (r > out.max_residual) {
      out.max_residual = r;
      out.at = pts[i];
    }
  }
  return out;
}

IdentityResidual identity_check(const NbEvaluator& ev, const ClassParams& params, const DiskGrid& grid) {
  return identity_check(ev, params, ev.phi_on(grid), phi_derivative_fit(ev));
}

IdentityResidual identity_check(const AnalyticFunction& f, const ClassParams& params, const DiskGrid& grid) {
  return identity_check(NbEvaluator(f, params.exponent()), params, grid);
}

Status MembershipVerdict::status() const {
  if (const auto* s = std::get_if<SubordinationVerdict>(&verdict)) return s->status;
  const auto& b = std::get<BoundVerdict>(verdict);
  if (b.passes) return Status::Certified;
  const double rho = std::get<RhoBound>(params.target).rho;
  return b.min_re < rho ? Status::Refuted : Status::Inconclusive;
}

MembershipVerdict membership(const NbEvaluator& ev, const SampledFunction& j, const ClassParams& params,
                             const MembershipOptions& options) {
  MembershipVerdict out;
  out.params = params;
  if (const auto* m = std::get_if<MobiusTarget>(&params.target)) {
    out.verdict = check_subordination(j, *m, options.subordination);
    return out;
  }
  const double rho = std::get<RhoBound>(params.target).rho;
  const auto pts = j.grid.points();
  std::size_t imin = 0;
  for (std::size_t i = 1; i < pts.size(); ++i)
    if (j.values[i].real() < j.values[imin].real()) imin = i;
  BoundVerdict b;
  b.min_re = j.values[imin].real();
  b.argmin_z = pts[imin];
  if (imin != 0 && j.grid.angles_per_circle() > 0) {
    double theta = 0.0;
    const double step = 2.0 * kPi / j.grid.angles_per_circle();
    const double refined = refined_min_re_j(ev, params.mu, pts[imin], step, theta);
    if (refined < b.min_re) {
      b.min_re = refined;
      b.argmin_z = std::polar(std::abs(pts[imin]), theta);
    }
  }
  b.passes = b.min_re > rho + options.bound_tolerance;
  if (rho >= 1.0) out.note = "J(0) = 1 bounds min Re J by 1: the class is empty for rho >= 1";
  out.verdict = b;
  return out;
}

namespace {

MembershipVerdict membership_guarded(const AnalyticFunction& f, const ClassParams& params, const DiskGrid& grid,
                                     const MembershipOptions& options) {
  const NbEvaluator ev(f, params.exponent());
  check_compatible(ev, params);
  try {
    return membership(ev, ev.j_on(ev.phi_on(grid), params.mu), params, options);
  } catch (const BranchError& e) {
    MembershipVerdict out;
    out.params = params;
    SubordinationVerdict v;
    v.reason = std::string("branch continuation failed: ") + e.what();
    out.verdict = v;
    out.note = v.reason;
    return out;
  }
}

}  // namespace

MembershipVerdict membership_def1(const AnalyticFunction& f, const ClassParams& params, const DiskGrid& grid,
                                  const MembershipOptions& options) {
  if (!std::holds_alternative<MobiusTarget>(params.target))
    throw DomainError("membership_def1 needs a Moebius target");
  return membership_guarded(f, params, grid, options);
}

MembershipVerdict membership_def2(const AnalyticFunction& f, const ClassParams& params, const DiskGrid& grid,
                                  const MembershipOptions& options) {
  if (!std::holds_alternative<RhoBound>(params.target)) throw DomainError("membership_def2 needs a rho bound");
  return membership_guarded(f, params, grid, options);
}

const char* to_string(CheckStatus s) noexcept {
  switch (s) {
    case CheckStatus::Certified: return "certified";
    case CheckStatus::Refuted: return "refuted";
    case CheckStatus::Inconclusive: return "inconclusive";
    case CheckStatus::Skipped: return "skipped";
  }
  return "unknown";
}

CheckStatus to_check_status(Status s) noexcept {
  switch (s) {
    case Status::Certified: return CheckStatus::Certified;
    case Status::Refuted: return CheckStatus::Refuted;
    case Status::Inconclusive: return CheckStatus::Inconclusive;
  }
  return CheckStatus::Inconclusive;
}

DominantSurface make_dominant_surface(const DominantSpec& spec, const CheckerOptions& options) {
  DominantSurface s;
  s.transform = std::make_shared<const DominantTransform>(spec, options.quadrature_tolerance);
  s.values = sample([&s](Complex z) { return (*s.transform)(z); }, options.grid);
  const double r_max = options.grid.max_radius();
  s.curves = build_curve_family(s.transform->as_target(), options.grid,
                                scaled(options.subordination, r_max > 0.0 ? 1.0 / r_max : 1.0));
  s.extrema = extrema_of_re(*s.transform, options.grid);
  return s;
}

namespace {

struct Gate {
  std::optional<std::string> skip;
  Complex gamma;
  MobiusTarget target;
};

Gate dominant_gate(const ClassParams& params) {
  Gate g;
  const auto* m = std::get_if<MobiusTarget>(&params.target);
  if (!m) {
    g.skip = "needs a Moebius target";
    return g;
  }
  g.target = *m;
  if (params.mu == Complex{}) {
    g.skip = "mu = 0: no dominant";
    return g;
  }
  g.gamma = params.gamma();
  if (!(g.gamma.real() > 0.0)) g.skip = "Re gamma <= 0: dominant integral diverges";
  return g;
}

}  // namespace

TheoremReport check_theorem_2_1(const NbEvaluator& ev, const ClassParams& params, const CheckerOptions& options,
                                const SampledFunction* phi_in, const DominantSurface* surface, bool corrupt_swap) {
  TheoremReport rep;
  rep.theorem = "thm2.1";
  add_exponent_flags(rep, params);
  check_compatible(ev, params);
  const Gate gate = dominant_gate(params);
  if (gate.skip) return skipped(std::move(rep), *gate.skip);
  if (corrupt_swap) rep.flags.push_back("negative control: A and B swapped in q");

  SampledFunction phi_local;
  try {
    if (!phi_in) phi_local = ev.phi_on(options.grid);
    const SampledFunction& phi = phi_in ? *phi_in : phi_local;
    const SampledFunction j = ev.j_on(phi, params.mu);
    const auto member = membership(ev, j, params, {options.subordination, options.bound_tolerance});
    if (member.status() != Status::Certified)
      return skipped(std::move(rep), std::string("not a certified member (") + to_string(member.status()) + ")");

    DominantSurface local;
    if (!surface) {
      const DominantSpec spec = corrupt_swap ? make_dominant_spec(gate.gamma, gate.target.B, gate.target.A)
                                             : make_dominant_spec(gate.gamma, gate.target.A, gate.target.B);
      local = make_dominant_surface(spec, options);
      surface = &local;
    }

    // q ≺ (1 + A z)/(1 + B z): every value of q inside the full image
    const Region image = mobius_image(gate.target, 1.0);
    CheckItem link2;
    link2.name = "q-in-target-image";
    link2.margin = kInf;
    const auto pts = surface->values.grid.points();
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const double m = region_contains(image, surface->values.values[i]);
      if (m < link2.margin) {
        link2.margin = m;
        link2.witness = Witness{pts[i], surface->values.values[i]};
      }
    }
    link2.status = link2.margin > 0.0 ? CheckStatus::Certified : CheckStatus::Refuted;
    rep.checks.push_back(link2);

    const auto link1 = check_subordination(phi, surface->curves, options.subordination);
    rep.checks.push_back(item_from("phi-subordinate-to-q", link1));
  } catch (const BranchError& e) {
    rep.status = CheckStatus::Inconclusive;
    rep.reason = std::string("branch continuation failed: ") + e.what();
    return rep;
  }
  rep.status = combine(rep.checks);
  return rep;
}

std::optional<std::string> inclusion_hypotheses(const InclusionPair& pair) {
  if (!(pair.mu1 >= 0.0 && pair.mu1 <= pair.mu2)) return "needs 0 <= mu1 <= mu2";
  const double A1 = pair.outer.A, B1 = pair.outer.B, A2 = pair.inner.A, B2 = pair.inner.B;
  if (A1 == A2 && B1 == B2) {
    if (-1.0 <= B1 && B1 < A1 && A1 <= 1.0) return std::nullopt;
    return "needs -1 <= B < A <= 1";
  }
  if (!(-1.0 <= B1 && B1 <= B2 && B2 < A2 && A2 < A1 && A1 <= 1.0))
    return "needs -1 <= B1 <= B2 < A2 < A1 <= 1";
  return std::nullopt;
}

InclusionReport check_theorem_2_2(std::span<const NamedFunction> corpus, const InclusionPair& pair, double alpha,
                                  double beta, const CheckerOptions& options, bool enforce_hypotheses) {
  InclusionReport rep;
  rep.pair = pair;
  if (enforce_hypotheses) {
    if (auto why = inclusion_hypotheses(pair)) {
      rep.status = CheckStatus::Skipped;
      rep.reason = *why;
      return rep;
    }
    if (!(alpha > 0.0)) {
      rep.status = CheckStatus::Skipped;
      rep.reason = "needs alpha > 0 for a dominant with Re gamma > 0";
      return rep;
    }
  }
  const double r_max = options.grid.max_radius();
  const SubordinationOptions outer_opts = scaled(options.subordination, r_max > 0.0 ? 1.0 / r_max : 1.0);
  for (const auto& entry : corpus) {
    try {
      const NbEvaluator ev(entry.f, Complex(alpha, beta));
      const ClassParams inner_params =
          make_params(entry.f.valence(), entry.f.gap(), pair.mu2, alpha, beta, pair.inner);
      SampledFunction phi_local;
      if (!entry.phi) phi_local = ev.phi_on(options.grid);
      const SampledFunction& phi = entry.phi ? *entry.phi : phi_local;
      const auto m2 = membership(ev, ev.j_on(phi, pair.mu2), inner_params, {options.subordination, 0.0});
      if (m2.status() != Status::Certified) continue;
      rep.members.push_back(entry.id);
      const auto v1 = check_subordination(ev.j_on(phi, pair.mu1), pair.outer, outer_opts);
      if (v1.status == Status::Refuted) rep.counterexamples.push_back({entry.id, v1});
    } catch (const BranchError&) {
      continue;
    }
  }
  if (!rep.counterexamples.empty()) {
    rep.status = CheckStatus::Refuted;
    rep.reason = std::to_string(rep.counterexamples.size()) + " member(s) refuted in the larger class";
  } else if (rep.members.empty()) {
    rep.status = CheckStatus::Inconclusive;
    rep.reason = "no certified members in the smaller class";
  } else {
    rep.status = CheckStatus::Certified;
  }
  return rep;
}

TheoremReport check_theorem_2_3(const NbEvaluator& ev, const ClassParams& params, const CheckerOptions& options,
                                const SampledFunction* phi_in, const DominantSurface* surface,
                                std::optional<MobiusTarget> bounds_override) {
  TheoremReport rep;
  rep.theorem = "thm2.3";
  add_exponent_flags(rep, params);
  check_compatible(ev, params);
  const Gate gate = dominant_gate(params);
  if (gate.skip) return skipped(std::move(rep), *gate.skip);

  SampledFunction phi_local;
  try {
    if (!phi_in) phi_local = ev.phi_on(options.grid);
    const SampledFunction& phi = phi_in ? *phi_in : phi_local;
    if (bounds_override) {
      rep.flags.push_back("negative control: bounds from an unrelated target");
    } else {
      const auto member = membership(ev, ev.j_on(phi, params.mu), params, {options.subordination, 0.0});
      if (member.status() != Status::Certified)
        return skipped(std::move(rep), std::string("not a certified member (") + to_string(member.status()) + ")");
    }

    const MobiusTarget bt = bounds_override.value_or(gate.target);
    ReExtrema ext;
    if (surface && !bounds_override) {
      ext = surface->extrema;
    } else {
      ext = extrema_of_re(make_dominant_spec(gate.gamma, bt.A, bt.B), options.grid);
    }

    CheckItem bounds;
    bounds.name = "re-phi-within-extrema";
    bounds.margin = kInf;
    const double tol = options.bound_tolerance;
    const auto pts = phi.grid.points();
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const double re = phi.values[i].real();
      double m = kInf;
      if (!ext.unbounded_below) m = std::min(m, re - ext.inf_re);
      if (!ext.unbounded_above) m = std::min(m, ext.sup_re - re);
      if (m < bounds.margin) {
        bounds.margin = m;
        bounds.witness = Witness{pts[i], phi.values[i]};
      }
    }
    bounds.status = bounds.margin >= -tol ? CheckStatus::Certified : CheckStatus::Refuted;
    bounds.note = "inf " + (ext.unbounded_below ? std::string("-inf") : std::to_string(ext.inf_re)) + ", sup " +
                  (ext.unbounded_above ? std::string("+inf") : std::to_string(ext.sup_re));
    rep.checks.push_back(bounds);

    if (!bounds_override && gate.target.B == -1.0) {
      const double rho = (1.0 - gate.target.A) / 2.0;
      if (rho < 1.0) {
        // the shifted form rho + (1 - rho) q_{1,-1} must coincide with q
        const Complex z = ext.argmin;
        const auto forms = rho_form_dominant(gate.gamma, rho, z);
        CheckItem c;
        c.name = "rho-shifted-dominant";
        c.margin = forms.difference;
        c.status = forms.difference < 1e-9 ? CheckStatus::Certified : CheckStatus::Inconclusive;
        c.note = "|direct - shifted| at the argmin of Re q";
        rep.checks.push_back(c);
      } else if (rho > 1.0) {
        const auto base = extrema_of_re(make_dominant_spec(gate.gamma, 1.0, -1.0), options.grid);
        const double lo_stated = base.unbounded_above ? -kInf : rho + (1.0 - rho) * base.sup_re;
        const double hi_stated = base.unbounded_below ? kInf : rho + (1.0 - rho) * base.inf_re;
        const double lo_rev = base.unbounded_below ? -kInf : rho + (1.0 - rho) * base.inf_re;
        const double hi_rev = base.unbounded_above ? -kInf : rho + (1.0 - rho) * base.sup_re;
        auto margin_of = [&](double lo, double hi) {
          double m = kInf;
          for (const auto& w : phi.values) m = std::min({m, w.real() - lo, hi - w.real()});
          return m;
        };
        for (const auto& [name, m] : {std::pair{"rho-above-one-as-stated", margin_of(lo_stated, hi_stated)},
                                      std::pair{"rho-above-one-reversed", margin_of(lo_rev, hi_rev)}}) {
          CheckItem c;
          c.name = name;
          c.margin = m;
          c.status = CheckStatus::Skipped;
          c.note = std::string("informational: ordering ") + (m >= -tol ? "holds" : "fails");
          rep.checks.push_back(c);
        }
      }
    }
  } catch (const BranchError& e) {
    rep.status = CheckStatus::Inconclusive;
    rep.reason = std::string("branch continuation failed: ") + e.what();
    return rep;
  }
  rep.status = combine(rep.checks);
  return rep;
}

TargetMap mobius_differential_image(const MobiusTarget& t, Complex eta) {
  TargetMap m;
  m.label = "mobius-differential";
  m.value = [t, eta](Complex z) { return t(z) + eta * z * t.derivative(z); };
  m.d1 = [t, eta](Complex z) { return (1.0 + eta) * t.derivative(z) + eta * z * t.second_derivative(z); };
  m.d2 = [t, eta](Complex z) {
    const Complex d = 1.0 + t.B * z;
    const Complex third = 6.0 * t.B * t.B * (t.A - t.B) / (d * d * d * d);
    return (1.0 + 2.0 * eta) * t.second_derivative(z) + eta * z * third;
  };
  return m;
}

namespace {

TargetMap differential_of(const TargetMap& q, Complex eta) {
  return q.mobius ? mobius_differential_image(*q.mobius, eta) : differential_image(q, eta);
}

}  // namespace

TheoremReport check_theorem_3_1(const NbEvaluator& ev, const ClassParams& params, const TargetMap& q,
                                const CheckerOptions& options) {
  TheoremReport rep;
  rep.theorem = "thm3.1";
  add_exponent_flags(rep, params);
  check_compatible(ev, params);
  if (params.mu == Complex{}) return skipped(std::move(rep), "mu = 0: the hypothesis degenerates");

  const Complex eta = params.eta();
  const double required = std::max(0.0, -(static_cast<double>(params.p) * params.exponent() / params.mu).real());
  double cm = 0.0;
  try {
    cm = convexity_margin(q, options.grid);
  } catch (const DomainError& e) {
    return skipped(std::move(rep), std::string("convexity diagnostic failed: ") + e.what());
  }
  CheckItem convex;
  convex.name = "convexity-hypothesis";
  convex.margin = cm - required;
  convex.status = convex.margin > 0.0 ? CheckStatus::Certified : CheckStatus::Skipped;
  rep.checks.push_back(convex);
  if (convex.margin <= 0.0) return skipped(std::move(rep), "vacuous: convexity hypothesis fails");

  try {
    const SampledFunction phi = ev.phi_on(options.grid);
    const SampledFunction j = ev.j_on(phi, params.mu);
    const auto hyp = check_subordination(j, differential_of(q, eta), options.subordination);
    rep.checks.push_back(item_from("hypothesis-J-subordinate", hyp));
    if (hyp.status == Status::Refuted) return skipped(std::move(rep), "hypothesis subordination refuted");
    if (hyp.status == Status::Inconclusive) {
      rep.status = CheckStatus::Inconclusive;
      rep.reason = "hypothesis not certified: " + hyp.reason;
      return rep;
    }
    const double r_max = options.grid.max_radius();
    const auto concl = check_subordination(phi, q, scaled(options.subordination, 1.0 / r_max));
    rep.checks.push_back(item_from("conclusion-phi-subordinate", concl));
    rep.status = to_check_status(concl.status);
    if (concl.status != Status::Certified) rep.reason = concl.reason;
  } catch (const BranchError& e) {
    rep.status = CheckStatus::Inconclusive;
    rep.reason = std::string("branch continuation failed: ") + e.what();
  }
  return rep;
}

TheoremReport check_theorem_4_1(const NbEvaluator& ev, const ClassParams& params, const TargetMap& q,
                                const CheckerOptions& options) {
  TheoremReport rep;
  rep.theorem = "thm4.1";
  add_exponent_flags(rep, params);
  check_compatible(ev, params);
  if (!(params.mu.real() > 0.0)) return skipped(std::move(rep), "precondition Re mu > 0 fails");
  const Complex eta = params.eta();
  if (!(std::conj(eta).real() > 0.0)) rep.flags.push_back("Re conj(eta) <= 0");

  double cm = 0.0;
  try {
    cm = convexity_margin(q, options.grid);
  } catch (const DomainError& e) {
    return skipped(std::move(rep), std::string("convexity diagnostic failed: ") + e.what());
  }
  if (!(cm > 0.0)) return skipped(std::move(rep), "q is not convex on the grid");

  try {
    const CurveFamily j_curves = build_curve_family(ev.j_target(params.mu), options.grid, options.subordination);
    CheckItem univalent;
    univalent.name = "J-univalence-diagnostic";
    univalent.status = j_curves.univalence.passed ? CheckStatus::Certified : CheckStatus::Inconclusive;
    univalent.note = j_curves.univalence.reason;
    rep.checks.push_back(univalent);
    if (!j_curves.univalence.passed) {
      rep.status = CheckStatus::Inconclusive;
      rep.reason = "J univalence diagnostic failed: " + j_curves.univalence.reason;
      return rep;
    }
    const SampledFunction lower = sample(differential_of(q, eta).value, options.grid);
    const auto hyp = check_subordination(lower, j_curves, options.subordination);
    rep.checks.push_back(item_from("hypothesis-J-superordinate", hyp));
    if (hyp.status == Status::Refuted) return skipped(std::move(rep), "hypothesis superordination refuted");
    if (hyp.status == Status::Inconclusive) {
      rep.status = CheckStatus::Inconclusive;
      rep.reason = "hypothesis not certified: " + hyp.reason;
      return rep;
    }
    const double scale = options.subordination.certify_radius / options.grid.max_radius();
    const auto concl =
        check_subordination(sample(q.value, options.grid), ev.phi_target(), scaled(options.subordination, scale));
    rep.checks.push_back(item_from("conclusion-q-subordinate-to-phi", concl));
    rep.status = to_check_status(concl.status);
    if (concl.status != Status::Certified) rep.reason = concl.reason;
  } catch (const BranchError& e) {
    rep.status = CheckStatus::Inconclusive;
    rep.reason = std::string("branch continuation failed: ") + e.what();
  }
  return rep;
}

TheoremReport check_theorem_5_1(const NbEvaluator& ev, const ClassParams& params, const TargetMap& q1,
                                const TargetMap& q2, const CheckerOptions& options, const TheoremReport* lower_in) {
  TheoremReport rep;
  rep.theorem = "thm5.1";
  add_exponent_flags(rep, params);
  if (q1.mobius && q2.mobius) {
    const auto nest = region_nested(mobius_image(*q1.mobius, 1.0), mobius_image(*q2.mobius, 1.0));
    CheckItem order;
    order.name = "q1-image-inside-q2-image";
    order.margin = nest.margin;
    order.status = nest.nested ? CheckStatus::Certified : CheckStatus::Skipped;
    rep.checks.push_back(order);
    if (!nest.nested) return skipped(std::move(rep), "ordering q1 ≺ q2 fails: hypotheses cannot both hold");
  }
  const TheoremReport lower = lower_in ? *lower_in : check_theorem_4_1(ev, params, q1, options);
  const auto upper = check_theorem_3_1(ev, params, q2, options);
  for (const auto* side : {&lower, &upper}) {
    const std::string prefix = side == &lower ? "lower:" : "upper:";
    for (auto it : side->checks) {
      it.name = prefix + it.name;
      rep.checks.push_back(std::move(it));
    }
    for (const auto& f : side->flags)
      if (std::find(rep.flags.begin(), rep.flags.end(), f) == rep.flags.end()) rep.flags.push_back(f);
  }
  if (lower.status == CheckStatus::Refuted || upper.status == CheckStatus::Refuted) {
    rep.status = CheckStatus::Refuted;
    rep.reason = lower.status == CheckStatus::Refuted ? "lower: " + lower.reason : "upper: " + upper.reason;
  } else if (lower.status == CheckStatus::Skipped || upper.status == CheckStatus::Skipped) {
    rep.status = CheckStatus::Skipped;
    rep.reason = lower.status == CheckStatus::Skipped ? "lower: " + lower.reason : "upper: " + upper.reason;
  } else if (lower.status == CheckStatus::Inconclusive || upper.status == CheckStatus::Inconclusive) {
    rep.status = CheckStatus::Inconclusive;
    rep.reason = lower.status == CheckStatus::Inconclusive ? "lower: " + lower.reason : "upper: " + upper.reason;
  } else {
    rep.status = CheckStatus::Certified;
  }
  return rep;
}

}  // namespace subord
