#include "subord/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <limits>
#include <map>
#include <mutex>
#include <random>
#include <thread>
#include <tuple>

#include "subord/errors.hpp"
#include "subord/json_io.hpp"

namespace subord {

using nlohmann::json;

namespace {

// ---------------------------------------------------------------- config

void reject_unknown(const json& j, std::initializer_list<const char*> known, const std::string& where) {
  if (!j.is_object()) throw DomainError(where + ": expected an object");
  for (const auto& [key, value] : j.items()) {
    if (std::none_of(known.begin(), known.end(), [&](const char* k) { return key == k; }))
      throw DomainError(where + ": unknown field '" + key + "'");
  }
}

template <class T>
void read(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

ClassTarget raw_target(const json& j) {
  reject_unknown(j, {"A", "B", "rho"}, "target");
  if (j.contains("rho")) return RhoBound{j.at("rho").get<double>()};
  if (!j.contains("A") || !j.contains("B")) throw DomainError("target: needs A and B, or rho");
  // validated later per lattice point, so that bad entries are skipped with a reason
  return MobiusTarget{j.at("A").get<double>(), j.at("B").get<double>()};
}

std::uint64_t parse_seed(const std::string& text) {
  std::size_t used = 0;
  unsigned long long v = 0;
  try {
    if (!text.empty() && text[0] == '-') throw std::invalid_argument("negative");
    v = std::stoull(text, &used);
  } catch (const std::exception&) {
    throw DomainError("SUBORD_SEED must be a non-negative integer, got '" + text + "'");
  }
  if (used != text.size()) throw DomainError("SUBORD_SEED must be a non-negative integer, got '" + text + "'");
  return v;
}

// ---------------------------------------------------------------- workers

template <class Fn>
void parallel_for(std::size_t count, int workers, const Fn& fn) {
  std::size_t threads = workers > 0 ? static_cast<std::size_t>(workers)
                                    : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, count);
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

// ---------------------------------------------------------------- corpus

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  // 53 random bits, identical on every platform
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  Complex in_disk(double radius) {
    const double r = radius * std::sqrt(uniform());
    return std::polar(r, 2.0 * kPi * uniform());
  }
  double phase() { return 2.0 * kPi * uniform(); }

 private:
  std::mt19937_64 engine_;
};

std::string numbered(const char* family, int i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s-%02d", family, i);
  return buf;
}

std::vector<std::pair<int, int>> pn_combos(const CorpusConfig& c) {
  std::vector<std::pair<int, int>> out;
  for (int p : c.p_values)
    for (int n : c.n_values) out.emplace_back(p, n);
  if (out.empty()) throw DomainError("corpus: p_values and n_values must be non-empty");
  return out;
}

const MobiusTarget kDesignTargets[] = {{1.0, -1.0}, {0.5, 0.0}, {1.0, 0.0}, {0.2, -0.8}, {0.5, -0.5}};
const double kDesignRadii[] = {0.5, 0.4, 0.6, 0.3};
const double kStressModuli[] = {0.95, 0.98, 0.995, 1.02, 1.05};

// q1 = M(s1 z) below Phi = M(s z) and q2 = M(s2 z) above it
double lower_scale(double s) { return 0.4 * s; }
double upper_scale(double s) { return std::min(1.0, 1.6 * s); }

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

// ---------------------------------------------------------------- records

json record(const std::string& theorem, const std::string& entry, const ClassParams& params) {
  return {{"theorem", theorem}, {"entry", entry}, {"params", to_json(params)}};
}

void absorb(json& rec, const TheoremReport& r) {
  const json body = to_json(r);
  for (const auto& [k, v] : body.items()) rec[k] = v;
}

struct PhiData {
  bool ok = false;
  std::string error;
  std::optional<NbEvaluator> ev;
  SampledFunction phi;
};

struct Candidate {
  std::size_t entry = 0;
  std::size_t exponent = 0;
  ClassParams params;
  std::size_t surface = 0;
  bool nontrivial = false;
  double phi_spread = 0.0;  // max |Re Phi - 1|
};

struct SurfaceKey {
  double gr, gi, A, B;
  bool operator<(const SurfaceKey& o) const { return std::tie(gr, gi, A, B) < std::tie(o.gr, o.gi, o.A, o.B); }
};

bool selected(const RunConfig& c, const std::string& id) {
  return std::find(c.theorems.begin(), c.theorems.end(), id) != c.theorems.end();
}

std::string timestamp_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

// ---------------------------------------------------------------- config io

RunConfig config_from_json(const json& j) {
  RunConfig c;
  reject_unknown(j, {"seed", "corpus", "lattice", "grid", "tolerances", "inclusion", "planted", "theorems", "workers",
                     "output_dir"},
                 "config");
  try {
    read(j, "seed", c.seed);
    if (j.contains("corpus")) {
      const auto& k = j.at("corpus");
      reject_unknown(k, {"p_values", "n_values", "sparse", "inverse", "stress", "truncation_order"}, "corpus");
      read(k, "p_values", c.corpus.p_values);
      read(k, "n_values", c.corpus.n_values);
      read(k, "sparse", c.corpus.sparse);
      read(k, "inverse", c.corpus.inverse);
      read(k, "stress", c.corpus.stress);
      read(k, "truncation_order", c.corpus.truncation_order);
    }
    if (j.contains("lattice")) {
      const auto& l = j.at("lattice");
      reject_unknown(l, {"mu", "exponents", "targets"}, "lattice");
      if (l.contains("mu")) {
        c.lattice.mu.clear();
        for (const auto& m : l.at("mu")) c.lattice.mu.push_back(complex_from_json(m));
      }
      if (l.contains("exponents")) {
        c.lattice.exponents.clear();
        for (const auto& e : l.at("exponents")) {
          if (e.is_array() && e.size() == 2) {
            c.lattice.exponents.push_back({e[0].get<double>(), e[1].get<double>()});
          } else {
            reject_unknown(e, {"alpha", "beta"}, "exponent");
            c.lattice.exponents.push_back({e.value("alpha", 1.0), e.value("beta", 0.0)});
          }
        }
      }
      if (l.contains("targets")) {
        c.lattice.targets.clear();
        for (const auto& t : l.at("targets")) c.lattice.targets.push_back(raw_target(t));
      }
    }
    if (j.contains("grid")) {
      const auto& g = j.at("grid");
      reject_unknown(g, {"radii", "angles", "identity_radius"}, "grid");
      read(g, "radii", c.grid.radii);
      read(g, "angles", c.grid.angles);
      read(g, "identity_radius", c.grid.identity_radius);
    }
    if (j.contains("tolerances")) {
      const auto& t = j.at("tolerances");
      reject_unknown(t, {"certify", "refute", "identity", "quadrature"}, "tolerances");
      read(t, "certify", c.tolerances.certify);
      read(t, "refute", c.tolerances.refute);
      read(t, "identity", c.tolerances.identity);
      read(t, "quadrature", c.tolerances.quadrature);
    }
    if (j.contains("inclusion")) {
      const auto& i = j.at("inclusion");
      reject_unknown(i, {"pairs"}, "inclusion");
      read(i, "pairs", c.inclusion.pairs);
    }
    read(j, "planted", c.planted);
    read(j, "theorems", c.theorems);
    read(j, "workers", c.workers);
    read(j, "output_dir", c.output_dir);
  } catch (const json::exception& e) {
    throw DomainError(std::string("config: ") + e.what());
  }
  static const std::vector<std::string> known{"identity", "def1",   "def2",   "thm2.1", "thm2.2",
                                              "thm2.3",   "thm3.1", "thm4.1", "thm5.1"};
  for (const auto& t : c.theorems)
    if (std::find(known.begin(), known.end(), t) == known.end())
      throw DomainError("config: unknown theorem id '" + t + "'");
  DiskGrid::from_radii(c.grid.radii, c.grid.angles);  // validates the grid
  if (c.corpus.sparse < 0 || c.corpus.inverse < 0 || c.corpus.stress < 0)
    throw DomainError("config: family sizes must be >= 0");
  return c;
}

json config_to_json(const RunConfig& c) {
  json mu = json::array();
  for (const auto& m : c.lattice.mu) mu.push_back(complex_json(m));
  json exps = json::array();
  for (const auto& e : c.lattice.exponents) exps.push_back({e.alpha, e.beta});
  json targets = json::array();
  for (const auto& t : c.lattice.targets) targets.push_back(to_json(t));
  return {{"seed", c.seed},
          {"corpus",
           {{"p_values", c.corpus.p_values},
            {"n_values", c.corpus.n_values},
            {"sparse", c.corpus.sparse},
            {"inverse", c.corpus.inverse},
            {"stress", c.corpus.stress},
            {"truncation_order", c.corpus.truncation_order}}},
          {"lattice", {{"mu", mu}, {"exponents", exps}, {"targets", targets}}},
          {"grid", {{"radii", c.grid.radii}, {"angles", c.grid.angles}, {"identity_radius", c.grid.identity_radius}}},
          {"tolerances",
           {{"certify", c.tolerances.certify},
            {"refute", c.tolerances.refute},
            {"identity", c.tolerances.identity},
            {"quadrature", c.tolerances.quadrature}}},
          {"inclusion", {{"pairs", c.inclusion.pairs}}},
          {"planted", c.planted},
          {"theorems", c.theorems},
          {"workers", c.workers},
          {"output_dir", c.output_dir}};
}

void apply_environment(RunConfig& config) {
  if (const char* s = std::getenv("SUBORD_SEED")) config.seed = parse_seed(s);
}

const char* to_string(Construction c) noexcept {
  return c == Construction::Explicit ? "explicit-coefficients" : "inverse-designed";
}

// ---------------------------------------------------------------- corpus

AnalyticFunction inverse_designed(int p, int n, const InverseDesign& d, int max_order) {
  if (!(d.s > 0.0 && d.s <= 1.0)) throw DomainError("inverse design: s must lie in (0, 1]");
  make_mobius(d.A, d.B);
  const Complex e(d.alpha, d.beta);
  if (e == Complex{}) throw DomainError("inverse design: exponent must be nonzero");
  const std::size_t length = static_cast<std::size_t>(std::max(2, max_order / n + 1));
  // psi(w) = 1 + (A - B) s w sum_k (-B s w)^k
  std::vector<Complex> psi(length);
  psi[0] = 1.0;
  double term = (d.A - d.B) * d.s;
  for (std::size_t k = 1; k < length; ++k) {
    psi[k] = term;
    term *= -d.B * d.s;
  }
  const PowerSeries g = series_power(PowerSeries(psi), -1.0 / e, length);
  std::size_t last = 0;
  for (std::size_t k = 1; k < length; ++k)
    if (std::abs(g[k]) >= 1e-15) last = k;
  if (last == 0) return make_function(p, n, {});
  // coefficient of z^{p + n + i} is g_k when n + i = k n
  std::vector<Complex> coeffs(static_cast<std::size_t>(n) * last - static_cast<std::size_t>(n) + 1);
  for (std::size_t k = 1; k <= last; ++k) coeffs[(k - 1) * static_cast<std::size_t>(n)] = g[k];
  return make_function(p, n, std::move(coeffs));
}

void screen_entry(CorpusEntry& entry, const DiskGrid& grid) {
  const auto& u = entry.f.quotient();
  const double r = grid.max_radius();
  if (r > 0.0) {
    const std::size_t m = 4096;
    std::vector<Complex> ring(m + 1);
    for (std::size_t k = 0; k < m; ++k) ring[k] = u(std::polar(r, 2.0 * kPi * static_cast<double>(k) / m));
    ring[m] = ring[0];
    try {
      const int w = winding_number(ring, 0.0);
      if (w != 0) {
        entry.excluded = true;
        entry.exclusion_reason = "f(z)/z^p has " + std::to_string(w) + " zero(s) in |z| < " + fmt(r);
        return;
      }
    } catch (const NearBoundaryError&) {
      entry.excluded = true;
      entry.exclusion_reason = "f(z)/z^p vanishes near |z| = " + fmt(r);
      return;
    }
  }
  double least = std::numeric_limits<double>::infinity();
  for (const auto& z : grid.points()) least = std::min(least, std::abs(u(z)));
  if (least < 1e-10) {
    entry.excluded = true;
    entry.exclusion_reason = "|f(z)/z^p| below 1e-10 on the grid";
    return;
  }
  try {
    NbEvaluator(entry.f, 1.0).phi_on(grid);
  } catch (const BranchError& e) {
    entry.excluded = true;
    entry.exclusion_reason = std::string("branch continuation failed: ") + e.what();
  }
}

std::vector<CorpusEntry> generate_corpus(const RunConfig& config) {
  const auto& cc = config.corpus;
  const auto combos = pn_combos(cc);
  Rng rng(config.seed);
  std::vector<CorpusEntry> out;

  {
    CorpusEntry e;
    const int p = cc.p_values.front();
    e.id = "identity-p" + std::to_string(p);
    e.family = "identity";
    e.f = make_function(p, cc.n_values.front(), {});
    e.provenance = "f = z^" + std::to_string(p);
    out.push_back(std::move(e));
  }
  for (int i = 0; i < cc.sparse; ++i) {
    const auto [p, n] = combos[static_cast<std::size_t>(i) % combos.size()];
    const Complex c = rng.in_disk(0.3);
    const Complex d = rng.in_disk(0.3);
    std::vector<Complex> coeffs(static_cast<std::size_t>(n) + 1);
    coeffs.front() = c;
    coeffs.back() = d;
    CorpusEntry e;
    e.id = numbered("sparse", i);
    e.family = "sparse";
    e.f = make_function(p, n, std::move(coeffs));
    e.provenance = "z^p (1 + c z^n + d z^2n), c = " + fmt(c.real()) + (c.imag() < 0 ? "" : "+") + fmt(c.imag()) +
                   "i, d = " + fmt(d.real()) + (d.imag() < 0 ? "" : "+") + fmt(d.imag()) + "i";
    out.push_back(std::move(e));
  }
  for (int i = 0; i < cc.inverse; ++i) {
    const auto [p, n] = combos[static_cast<std::size_t>(i) % combos.size()];
    const auto& t = kDesignTargets[static_cast<std::size_t>(i) % std::size(kDesignTargets)];
    const auto& x = config.lattice.exponents.empty()
                        ? ExponentSpec{}
                        : config.lattice.exponents[static_cast<std::size_t>(i) % config.lattice.exponents.size()];
    InverseDesign d{t.A, t.B, kDesignRadii[static_cast<std::size_t>(i) % std::size(kDesignRadii)], x.alpha, x.beta};
    CorpusEntry e;
    e.id = numbered("inverse", i);
    e.family = "inverse";
    e.construction = Construction::InverseDesigned;
    e.design = d;
    e.f = inverse_designed(p, n, d, cc.truncation_order);
    e.provenance = "Phi = (1 + " + fmt(d.A) + " w)/(1 + " + fmt(d.B) + " w), w = " + fmt(d.s) + " z^" +
                   std::to_string(n) + ", exponent " + fmt(d.alpha) + (d.beta < 0 ? "" : "+") + fmt(d.beta) + "i";
    out.push_back(std::move(e));
  }
  for (int i = 0; i < cc.stress; ++i) {
    const auto [p, n] = combos[static_cast<std::size_t>(i) % combos.size()];
    const Complex c = std::polar(kStressModuli[static_cast<std::size_t>(i) % std::size(kStressModuli)], rng.phase());
    std::vector<Complex> coeffs{c};
    CorpusEntry e;
    e.id = numbered("stress", i);
    e.family = "stress";
    e.f = make_function(p, n, std::move(coeffs));
    e.provenance = "z^p (1 + c z^n), |c| = " + fmt(std::abs(c));
    out.push_back(std::move(e));
  }
  return out;
}

json corpus_to_json(const std::vector<CorpusEntry>& corpus) {
  json entries = json::array();
  std::size_t excluded = 0;
  for (const auto& e : corpus) {
    json coeffs = json::array();
    for (const auto& a : e.f.coefficients()) coeffs.push_back(complex_json(a));
    json j{{"id", e.id},
           {"family", e.family},
           {"construction", to_string(e.construction)},
           {"p", e.f.valence()},
           {"n", e.f.gap()},
           {"truncation_order", e.f.truncation_order()},
           {"tail_bound", e.f.tail_bound()},
           {"coefficients", coeffs},
           {"provenance", e.provenance},
           {"excluded", e.excluded}};
    if (e.design)
      j["design"] = {{"A", e.design->A}, {"B", e.design->B}, {"s", e.design->s},
                     {"alpha", e.design->alpha}, {"beta", e.design->beta}};
    if (e.excluded) {
      j["exclusion_reason"] = e.exclusion_reason;
      ++excluded;
    }
    entries.push_back(j);
  }
  return {{"generated", corpus.size()},
          {"checked", corpus.size() - excluded},
          {"excluded", excluded},
          {"entries", entries}};
}

std::vector<InclusionPair> inclusion_pairs(int count) {
  // chains of nested targets, -1 <= B1 <= B2 < A2 < A1 <= 1, plus reflexive ones
  const std::pair<MobiusTarget, MobiusTarget> nests[] = {
      {{1.0, -1.0}, {0.5, 0.0}},  {{1.0, -1.0}, {0.5, -0.5}}, {{1.0, 0.0}, {0.5, 0.0}},
      {{1.0, -1.0}, {0.2, -0.8}}, {{0.5, -0.5}, {0.2, -0.2}}, {{1.0, -0.8}, {0.6, -0.4}},
      {{1.0, -1.0}, {1.0, -1.0}}, {{0.5, 0.0}, {0.5, 0.0}},   {{1.0, -0.5}, {0.5, 0.0}},
      {{0.8, -1.0}, {0.3, -0.6}}};
  const std::pair<double, double> mus[] = {{0.0, 0.5}, {0.5, 1.0}, {1.0, 2.0}, {0.0, 2.0}, {1.0, 1.0},
                                           {0.5, 2.0}, {2.0, 2.0}, {0.0, 0.0}, {0.25, 1.5}, {1.5, 2.0}};
  std::vector<InclusionPair> out;
  for (int k = 0; k < count; ++k) {
    const auto& nest = nests[static_cast<std::size_t>(k) % std::size(nests)];
    const auto& mu = mus[static_cast<std::size_t>(k * 3 + k / 10) % std::size(mus)];
    out.push_back({mu.first, mu.second, nest.first, nest.second});
  }
  return out;
}

// ---------------------------------------------------------------- run_all

RunResult run_all(const RunConfig& config) {
  const DiskGrid grid = DiskGrid::from_radii(config.grid.radii, config.grid.angles);
  const DiskGrid id_grid = grid.restricted(config.grid.identity_radius);

  CheckerOptions copt;
  copt.grid = grid;
  copt.subordination.certify_margin = config.tolerances.certify;
  copt.subordination.refute_margin = config.tolerances.refute;
  copt.bound_tolerance = config.tolerances.refute;
  copt.quadrature_tolerance = config.tolerances.quadrature;
  const MembershipOptions mopt{copt.subordination, config.tolerances.certify};

  auto corpus = generate_corpus(config);
  parallel_for(corpus.size(), config.workers, [&](std::size_t i) { screen_entry(corpus[i], grid); });

  const auto& exps = config.lattice.exponents;
  const auto& mus = config.lattice.mu;
  const auto& targets = config.lattice.targets;
  const std::size_t nx = exps.size();

  json skipped_params = json::array();

  // Phase 1: Phi per (entry, exponent); identity residuals and memberships.
  std::vector<PhiData> phis(corpus.size() * nx);
  std::vector<std::vector<json>> phase1(corpus.size() * nx);
  std::vector<std::vector<Candidate>> found(corpus.size() * nx);
  std::mutex skip_mutex;

  parallel_for(phis.size(), config.workers, [&](std::size_t k) {
    const std::size_t ei = k / nx;
    const std::size_t xi = k % nx;
    const auto& entry = corpus[ei];
    if (entry.excluded) return;
    PhiData& d = phis[k];
    auto& recs = phase1[k];
    const int p = entry.f.valence();
    const int n = entry.f.gap();
    try {
      d.ev.emplace(entry.f, Complex(exps[xi].alpha, exps[xi].beta));
      d.phi = d.ev->phi_on(grid);
      d.ok = true;
    } catch (const Error& e) {
      d.error = e.what();
      json rec{{"theorem", "phi"}, {"entry", entry.id}, {"status", "inconclusive"}, {"reason", d.error}};
      recs.push_back(rec);
      return;
    }
    const auto& ev = *d.ev;
    std::optional<PowerSeries> dphi;
    SampledFunction phi_id;
    if (selected(config, "identity")) {
      dphi = phi_derivative_fit(ev);
      phi_id = ev.phi_on(id_grid);
    }
    for (std::size_t mi = 0; mi < mus.size(); ++mi) {
      const Complex mu = mus[mi];
      SampledFunction j;
      try {
        j = ev.j_on(d.phi, mu);
      } catch (const Error&) {
        continue;
      }
      if (dphi) {
        ClassParams params;
        try {
          params = make_params(p, n, mu, exps[xi].alpha, exps[xi].beta, MobiusTarget{});
        } catch (const DomainError&) {
          continue;
        }
        const auto res = identity_check(ev, params, phi_id, *dphi);
        json rec = record("identity", entry.id, params);
        rec.erase("params");
        rec["params"] = {{"p", p}, {"n", n}, {"mu", complex_json(mu)}, {"alpha", exps[xi].alpha},
                         {"beta", exps[xi].beta}};
        const bool ok = res.max_residual < config.tolerances.identity;
        rec["status"] = ok ? "certified" : "refuted";
        rec["margin"] = config.tolerances.identity - res.max_residual;
        rec["residual"] = res.max_residual;
        rec["witness_z"] = complex_json(res.at);
        recs.push_back(rec);
      }
      for (std::size_t ti = 0; ti < targets.size(); ++ti) {
        const bool def1 = std::holds_alternative<MobiusTarget>(targets[ti]);
        if (!selected(config, def1 ? "def1" : "def2") && !(def1 && (selected(config, "thm2.1") ||
                                                                    selected(config, "thm2.3"))))
          continue;
        ClassParams params;
        try {
          params = make_params(p, n, mu, exps[xi].alpha, exps[xi].beta, targets[ti]);
        } catch (const DomainError& e) {
          std::lock_guard lock(skip_mutex);
          skipped_params.push_back({{"entry", entry.id},
                                    {"mu", complex_json(mu)},
                                    {"exponent", {exps[xi].alpha, exps[xi].beta}},
                                    {"target", to_json(targets[ti])},
                                    {"reason", e.what()}});
          continue;
        }
        const auto mv = membership(ev, j, params, mopt);
        if (selected(config, def1 ? "def1" : "def2")) {
          json rec = record(def1 ? "def1" : "def2", entry.id, params);
          const json body = to_json(mv);
          rec["status"] = body["status"];
          rec["verdict"] = body["verdict"];
          if (body.contains("note")) rec["note"] = body["note"];
          if (def1 && mv.status() == Status::Certified) {
            const auto sw = schwarz_witness(j, std::get<MobiusTarget>(params.target));
            rec["schwarz_max_ratio"] = sw.max_ratio;
            if (sw.failure_at) rec["schwarz_failure_at"] = complex_json(*sw.failure_at);
          }
          recs.push_back(rec);
        }
        if (def1 && mv.status() == Status::Certified && mu != Complex{} && params.gamma().real() > 0.0) {
          Candidate c;
          c.entry = ei;
          c.exponent = xi;
          c.params = params;
          c.nontrivial = entry.family != "identity";
          for (const auto& w : d.phi.values) c.phi_spread = std::max(c.phi_spread, std::abs(w.real() - 1.0));
          found[k].push_back(c);
        }
      }
    }
  });

  std::vector<json> records;
  for (auto& v : phase1)
    for (auto& r : v) records.push_back(std::move(r));

  // Phase 2: dominant surfaces for every certified member.
  std::vector<Candidate> candidates;
  for (auto& v : found)
    for (auto& c : v) candidates.push_back(std::move(c));
  std::map<SurfaceKey, std::size_t> surface_index;
  std::vector<DominantSpec> specs;
  const bool want_dominant = selected(config, "thm2.1") || selected(config, "thm2.3");
  if (want_dominant) {
    for (auto& c : candidates) {
      const Complex g = c.params.gamma();
      const auto& t = std::get<MobiusTarget>(c.params.target);
      const SurfaceKey key{g.real(), g.imag(), t.A, t.B};
      auto [it, inserted] = surface_index.emplace(key, specs.size());
      if (inserted) specs.push_back(DominantSpec{g, t.A, t.B});
      c.surface = it->second;
    }
  }
  std::vector<DominantSurface> surfaces(specs.size());
  parallel_for(specs.size(), config.workers,
               [&](std::size_t i) { surfaces[i] = make_dominant_surface(specs[i], copt); });

  // Phase 3: Theorem 2.1 and 2.3 per certified member.
  std::vector<std::vector<json>> phase3(want_dominant ? candidates.size() : 0);
  parallel_for(phase3.size(), config.workers, [&](std::size_t i) {
    const auto& c = candidates[i];
    const auto& entry = corpus[c.entry];
    const PhiData& d = phis[c.entry * nx + c.exponent];
    for (const char* id : {"thm2.1", "thm2.3"}) {
      if (!selected(config, id)) continue;
      json rec = record(id, entry.id, c.params);
      try {
        const TheoremReport r = std::string(id) == "thm2.1"
                                    ? check_theorem_2_1(*d.ev, c.params, copt, &d.phi, &surfaces[c.surface])
                                    : check_theorem_2_3(*d.ev, c.params, copt, &d.phi, &surfaces[c.surface]);
        absorb(rec, r);
      } catch (const Error& e) {
        rec["status"] = "inconclusive";
        rec["reason"] = std::string("error: ") + e.what();
      }
      rec["nontrivial"] = c.nontrivial;
      rec["bounded_target"] = std::abs(std::get<MobiusTarget>(c.params.target).B) < 1.0;
      phase3[i].push_back(rec);
    }
  });
  for (auto& v : phase3)
    for (auto& r : v) records.push_back(std::move(r));

  // Planted faults in the 2.1 and 2.3 checks.
  json planted = json::array();
  if (config.planted && want_dominant) {
    const Candidate* swap_pick = nullptr;
    const Candidate* wide_pick = nullptr;
    for (const auto& c : candidates) {
      const auto& t = std::get<MobiusTarget>(c.params.target);
      if (!c.nontrivial) continue;
      // swapping A and B maps the image of (1, -1) onto itself; the larger
      // A + B, the further the swapped q strays from the target image
      if (t.A >= -1.0 && t.A <= 1.0 && t.A + t.B > 0.0) {
        const auto* best = swap_pick ? &std::get<MobiusTarget>(swap_pick->params.target) : nullptr;
        if (!best || t.A + t.B > best->A + best->B) swap_pick = &c;
      }
      if (!wide_pick || c.phi_spread > wide_pick->phi_spread) wide_pick = &c;
    }
    if (swap_pick && selected(config, "thm2.1")) {
      const auto& d = phis[swap_pick->entry * nx + swap_pick->exponent];
      json rec = record("thm2.1", corpus[swap_pick->entry].id, swap_pick->params);
      absorb(rec, check_theorem_2_1(*d.ev, swap_pick->params, copt, &d.phi, nullptr, true));
      rec["planted"] = "thm2.1:swap-A-B";
      records.push_back(rec);
      planted.push_back("thm2.1:swap-A-B");
    }
    if (wide_pick && selected(config, "thm2.3")) {
      const auto& d = phis[wide_pick->entry * nx + wide_pick->exponent];
      json rec = record("thm2.3", corpus[wide_pick->entry].id, wide_pick->params);
      absorb(rec, check_theorem_2_3(*d.ev, wide_pick->params, copt, &d.phi, nullptr, MobiusTarget{0.1, 0.0}));
      rec["planted"] = "thm2.3:bounds-from-(0.1,0)";
      records.push_back(rec);
      planted.push_back("thm2.3:bounds-from-(0.1,0)");
    }
  }

  // Phase 4: inclusion pairs.
  std::vector<json> inclusion;
  if (selected(config, "thm2.2")) {
    auto pairs = inclusion_pairs(config.inclusion.pairs);
    std::vector<bool> enforce(pairs.size(), true);
    if (config.planted) {
      // reversed nesting: the larger class is checked inside the smaller one
      pairs.push_back({1.0, 1.0, MobiusTarget{0.5, 0.0}, MobiusTarget{1.0, -1.0}});
      enforce.push_back(false);
    }
    std::vector<std::size_t> usable;
    for (std::size_t x = 0; x < nx; ++x)
      if (exps[x].alpha > 0.0) usable.push_back(x);
    inclusion.resize(pairs.size());
    parallel_for(pairs.size(), config.workers, [&](std::size_t k) {
      if (usable.empty()) {
        inclusion[k] = {{"theorem", "thm2.2"}, {"status", "skipped"}, {"reason", "no exponent with alpha > 0"}};
        return;
      }
      const std::size_t xi = usable[k % usable.size()];
      std::vector<NamedFunction> named;
      for (std::size_t ei = 0; ei < corpus.size(); ++ei) {
        const auto& d = phis[ei * nx + xi];
        if (corpus[ei].excluded || !d.ok) continue;
        named.push_back({corpus[ei].id, corpus[ei].f, &d.phi});
      }
      const auto rep = check_theorem_2_2(named, pairs[k], exps[xi].alpha, exps[xi].beta, copt, enforce[k]);
      json j = to_json(rep);
      j["alpha"] = exps[xi].alpha;
      j["beta"] = exps[xi].beta;
      if (!enforce[k]) j["planted"] = "thm2.2:reversed-nesting";
      inclusion[k] = j;
    });
    if (config.planted) planted.push_back("thm2.2:reversed-nesting");
  }

  // Phase 5: subordination, superordination and sandwich on designed entries.
  struct DesignTask {
    std::size_t entry;
    InverseDesign design;
    Complex mu;
  };
  std::vector<DesignTask> design_tasks;
  const bool want_design = selected(config, "thm3.1") || selected(config, "thm4.1") || selected(config, "thm5.1");
  if (want_design) {
    for (std::size_t ei = 0; ei < corpus.size(); ++ei) {
      const auto& e = corpus[ei];
      if (e.excluded) continue;
      if (!e.design && e.family != "identity") continue;
      const InverseDesign d = e.design.value_or(InverseDesign{});
      for (const auto& mu : mus)
        if (mu != Complex{}) design_tasks.push_back({ei, d, mu});
    }
  }
  std::vector<std::vector<json>> phase5(design_tasks.size());
  parallel_for(design_tasks.size(), config.workers, [&](std::size_t k) {
    const auto& task = design_tasks[k];
    const auto& entry = corpus[task.entry];
    const auto& d = task.design;
    ClassParams params;
    try {
      params = make_params(entry.f.valence(), entry.f.gap(), task.mu, d.alpha, d.beta, MobiusTarget{d.A, d.B});
    } catch (const DomainError&) {
      return;
    }
    const NbEvaluator ev(entry.f, params.exponent());
    const TargetMap q = mobius_map(MobiusTarget{d.A, d.B});
    const double s1 = lower_scale(d.s);
    const double s2 = upper_scale(d.s);
    const TargetMap q1 = mobius_map(MobiusTarget{d.A * s1, d.B * s1});
    const TargetMap q2 = mobius_map(MobiusTarget{d.A * s2, d.B * s2});
    auto run = [&](const char* id, auto&& fn) {
      json rec = record(id, entry.id, params);
      try {
        absorb(rec, fn());
      } catch (const Error& e) {
        rec["status"] = "inconclusive";
        rec["reason"] = std::string("error: ") + e.what();
      }
      rec["design"] = {{"A", d.A}, {"B", d.B}, {"s", d.s}};
      phase5[k].push_back(rec);
    };
    if (selected(config, "thm3.1")) run("thm3.1", [&] { return check_theorem_3_1(ev, params, q, copt); });
    std::optional<TheoremReport> lower;
    if (selected(config, "thm4.1") || selected(config, "thm5.1")) {
      try {
        lower = check_theorem_4_1(ev, params, q1, copt);
      } catch (const Error&) {
      }
    }
    if (selected(config, "thm4.1")) {
      run("thm4.1", [&] {
        if (!lower) return check_theorem_4_1(ev, params, q1, copt);
        return *lower;
      });
      phase5[k].back()["q"] = {{"A", d.A * s1}, {"B", d.B * s1}};
    }
    if (selected(config, "thm5.1")) {
      run("thm5.1", [&] { return check_theorem_5_1(ev, params, q1, q2, copt, lower ? &*lower : nullptr); });
      phase5[k].back()["q1"] = {{"A", d.A * s1}, {"B", d.B * s1}};
      phase5[k].back()["q2"] = {{"A", d.A * s2}, {"B", d.B * s2}};
    }
  });
  for (auto& v : phase5)
    for (auto& r : v) records.push_back(std::move(r));

  // Deterministic order: entry id, then theorem id, then lattice position.
  std::stable_sort(records.begin(), records.end(), [](const json& a, const json& b) {
    return std::tie(a["entry"].get_ref<const std::string&>(), a["theorem"].get_ref<const std::string&>()) <
           std::tie(b["entry"].get_ref<const std::string&>(), b["theorem"].get_ref<const std::string&>());
  });

  // ---- summary
  RunResult result;
  json summary{{"certified", 0}, {"refuted", 0}, {"inconclusive", 0}, {"skipped", 0}};
  json by_theorem = json::object();
  json unexpected = json::array();
  json detected = json::array();
  auto tally = [&](const std::string& theorem, const std::string& status) {
    summary[status] = summary[status].get<int>() + 1;
    if (!by_theorem.contains(theorem))
      by_theorem[theorem] = {{"certified", 0}, {"refuted", 0}, {"inconclusive", 0}, {"skipped", 0}};
    by_theorem[theorem][status] = by_theorem[theorem][status].get<int>() + 1;
  };
  double identity_max = 0.0;
  double schwarz_max = 0.0;
  int nontrivial_21 = 0;
  json per_theorem_certified{{"thm3.1", 0}, {"thm4.1", 0}, {"thm5.1", 0}};
  for (const auto& r : records) {
    const std::string theorem = r["theorem"];
    const std::string status = r["status"];
    tally(theorem, status);
    const bool is_check = theorem == "identity" || theorem.rfind("thm", 0) == 0;
    if (status == "refuted" && is_check) {
      if (r.contains("planted")) {
        detected.push_back(r["planted"]);
      } else {
        unexpected.push_back({{"theorem", theorem}, {"entry", r["entry"]}, {"params", r["params"]}});
      }
    }
    if (theorem == "identity") identity_max = std::max(identity_max, r["residual"].get<double>());
    if (r.contains("schwarz_max_ratio")) schwarz_max = std::max(schwarz_max, r["schwarz_max_ratio"].get<double>());
    if (theorem == "thm2.1" && status == "certified" && r.value("nontrivial", false) && !r.contains("planted"))
      ++nontrivial_21;
    if (per_theorem_certified.contains(theorem) && status == "certified")
      per_theorem_certified[theorem] = per_theorem_certified[theorem].get<int>() + 1;
  }
  int inclusion_counterexamples = 0;
  for (const auto& j : inclusion) {
    const std::string status = j["status"];
    tally("thm2.2", status);
    if (status != "refuted") continue;
    if (j.contains("planted")) {
      detected.push_back(j["planted"]);
    } else {
      inclusion_counterexamples += static_cast<int>(j["counterexamples"].size());
      unexpected.push_back({{"theorem", "thm2.2"}, {"mu1", j["mu1"]}, {"mu2", j["mu2"]}, {"outer", j["outer"]},
                            {"inner", j["inner"]}});
    }
  }

  json corpus_json = corpus_to_json(corpus);
  std::vector<std::string> planted_sorted = planted.get<std::vector<std::string>>();
  std::vector<std::string> detected_sorted = detected.get<std::vector<std::string>>();
  std::sort(planted_sorted.begin(), planted_sorted.end());
  std::sort(detected_sorted.begin(), detected_sorted.end());
  result.planted_audit_passed = planted_sorted == detected_sorted;
  result.unexpected_refutations = static_cast<int>(unexpected.size());

  json& rep = result.report;
  rep["schema"] = 1;
  rep["timestamp"] = timestamp_now();
  rep["seed"] = config.seed;
  rep["config"] = config_to_json(config);
  rep["corpus"] = corpus_json;
  rep["skipped_params"] = skipped_params;
  rep["results"] = records;
  rep["inclusion"] = inclusion;
  rep["summary"] = summary;
  rep["summary"]["by_theorem"] = by_theorem;
  rep["unexpected_refutations"] = unexpected;
  rep["planted"] = {{"injected", planted}, {"detected", detected}, {"audit_passed", result.planted_audit_passed}};
  rep["metrics"] = {{"identity_max_residual", identity_max},
                    {"schwarz_max_ratio", schwarz_max},
                    {"thm2_1_nontrivial_certified", nontrivial_21},
                    {"thm2_2_counterexamples", inclusion_counterexamples},
                    {"certified_by_theorem", per_theorem_certified},
                    {"dominant_surfaces", specs.size()}};
  return result;
}

int exit_code(const RunResult& result) {
  return result.unexpected_refutations == 0 && result.planted_audit_passed ? 0 : 1;
}

std::string canonical_report(const json& report) {
  json copy = report;
  copy.erase("timestamp");
  return copy.dump();
}

}  // namespace subord
