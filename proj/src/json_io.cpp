#include "subord/json_io.hpp"

#include <cmath>
#include <limits>

#include "subord/errors.hpp"

namespace subord {

using nlohmann::json;

namespace {

// JSON has no infinities; unbounded margins become null.
json number(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

void put_witness(json& j, const std::optional<Witness>& w) {
  if (w) {
    j["witness_z"] = complex_json(w->z);
    j["witness_value"] = complex_json(w->value);
  } else {
    j["witness_z"] = nullptr;
    j["witness_value"] = nullptr;
  }
}

}  // namespace

json complex_json(Complex z) { return json::array({number(z.real()), number(z.imag())}); }

Complex complex_from_json(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  throw DomainError("expected a number or a [re, im] pair, got " + j.dump());
}

json to_json(const Region& region) {
  if (const auto* d = std::get_if<Disk>(&region))
    return {{"kind", "disk"}, {"center", complex_json(d->center)}, {"radius", d->radius}};
  const auto& h = std::get<HalfPlane>(region);
  return {{"kind", "halfplane"}, {"threshold", h.threshold}, {"sense", h.sense == Sense::Greater ? ">" : "<"}};
}

json to_json(const SubordinationVerdict& v) {
  json j{{"status", to_string(v.status)}, {"margin", number(v.margin)}, {"radii_checked", v.radii_checked}};
  put_witness(j, v.witness);
  if (!v.reason.empty()) j["reason"] = v.reason;
  return j;
}

json to_json(const ClassTarget& target) {
  if (const auto* m = std::get_if<MobiusTarget>(&target)) return {{"A", m->A}, {"B", m->B}};
  return {{"rho", std::get<RhoBound>(target).rho}};
}

ClassTarget target_from_json(const json& j) {
  if (!j.is_object()) throw DomainError("target must be an object");
  for (const auto& [key, value] : j.items())
    if (key != "A" && key != "B" && key != "rho") throw DomainError("unknown target field '" + key + "'");
  if (j.contains("rho")) {
    if (j.size() != 1) throw DomainError("a rho target takes no other fields");
    return RhoBound{j.at("rho").get<double>()};
  }
  if (!j.contains("A") || !j.contains("B")) throw DomainError("a Moebius target needs A and B");
  return make_mobius(j.at("A").get<double>(), j.at("B").get<double>());
}

json to_json(const ClassParams& p) {
  return {{"p", p.p},         {"n", p.n},       {"mu", complex_json(p.mu)},
          {"alpha", p.alpha}, {"beta", p.beta}, {"target", to_json(p.target)}};
}

json to_json(const MembershipVerdict& v) {
  json j{{"params", to_json(v.params)}, {"status", to_string(v.status())}};
  if (const auto* s = std::get_if<SubordinationVerdict>(&v.verdict)) {
    j["definition"] = 1;
    j["verdict"] = to_json(*s);
  } else {
    const auto& b = std::get<BoundVerdict>(v.verdict);
    j["definition"] = 2;
    j["verdict"] = {{"min_re", b.min_re}, {"passes", b.passes}, {"argmin_z", complex_json(b.argmin_z)}};
  }
  if (!v.note.empty()) j["note"] = v.note;
  return j;
}

json to_json(const ReExtrema& e) {
  return {{"inf_re", e.unbounded_below ? json(nullptr) : number(e.inf_re)},
          {"sup_re", e.unbounded_above ? json(nullptr) : number(e.sup_re)},
          {"inf_re_sampled", number(e.inf_re_sampled)},
          {"sup_re_sampled", number(e.sup_re_sampled)},
          {"argmin", complex_json(e.argmin)},
          {"argmax", complex_json(e.argmax)},
          {"unbounded_below", e.unbounded_below},
          {"unbounded_above", e.unbounded_above}};
}

json to_json(const DominantReport& r) {
  json values = json::array();
  for (std::size_t i = 0; i < r.points.size(); ++i)
    values.push_back({{"z", complex_json(r.points[i])}, {"q", complex_json(r.values[i])}});
  json coeffs = json::array();
  for (const auto& c : r.series_coeffs) coeffs.push_back(complex_json(c));
  json j{{"gamma", complex_json(r.spec.gamma)},
         {"A", r.spec.A},
         {"B", r.spec.B},
         {"values", values},
         {"series_coeffs", coeffs},
         {"quadrature_error_estimate", r.quadrature_error_estimate}};
  j.update(to_json(r.extrema));
  return j;
}

json to_json(const TheoremReport& r) {
  json checks = json::array();
  for (const auto& c : r.checks) {
    json cj{{"name", c.name}, {"status", to_string(c.status)}, {"margin", number(c.margin)}};
    put_witness(cj, c.witness);
    if (!c.note.empty()) cj["note"] = c.note;
    checks.push_back(cj);
  }
  json j{{"theorem", r.theorem}, {"status", to_string(r.status)}, {"checks", checks}};
  if (!r.reason.empty()) j["reason"] = r.reason;
  if (!r.flags.empty()) j["flags"] = r.flags;
  return j;
}

json to_json(const InclusionReport& r) {
  json cex = json::array();
  for (const auto& c : r.counterexamples) cex.push_back({{"id", c.id}, {"verdict", to_json(c.verdict)}});
  json j{{"theorem", "thm2.2"},
         {"mu1", r.pair.mu1},
         {"mu2", r.pair.mu2},
         {"outer", {{"A", r.pair.outer.A}, {"B", r.pair.outer.B}}},
         {"inner", {{"A", r.pair.inner.A}, {"B", r.pair.inner.B}}},
         {"status", to_string(r.status)},
         {"members", r.members},
         {"counterexamples", cex}};
  if (!r.reason.empty()) j["reason"] = r.reason;
  return j;
}

}  // namespace subord
