// Command line front end: corpus, check, dominant, trace, membership.

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "subord/errors.hpp"
#include "subord/harness.hpp"
#include "subord/json_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace subord;

namespace {

constexpr int kConfigError = 2;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string format = "json";
  std::optional<double> tol_certify, tol_refute, tol_identity, tol_quadrature;
};

RunConfig load_config(const Common& c) {
  RunConfig config;
  if (!c.config_path.empty()) {
    std::ifstream in(c.config_path);
    if (!in) throw ConfigError("cannot read config " + c.config_path);
    json j;
    try {
      in >> j;
    } catch (const json::exception& e) {
      throw ConfigError("config " + c.config_path + ": " + e.what());
    }
    config = config_from_json(j);
  }
  apply_environment(config);
  if (c.seed) config.seed = *c.seed;
  if (c.tol_certify) config.tolerances.certify = *c.tol_certify;
  if (c.tol_refute) config.tolerances.refute = *c.tol_refute;
  if (c.tol_identity) config.tolerances.identity = *c.tol_identity;
  if (c.tol_quadrature) config.tolerances.quadrature = *c.tol_quadrature;
  if (!c.out.empty()) config.output_dir = c.out;
  return config;
}

fs::path prepare_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + dir + ": " + ec.message());
  return fs::path(dir);
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << text;
  if (!out) throw ConfigError("write failed: " + path.string());
}

std::string num(double x) {
  std::ostringstream s;
  s << std::setprecision(17) << x;
  return s.str();
}

// "0.3", "-2i", "0.1+0.2i", "1e-3-4e-2i"
Complex parse_complex(const std::string& text) {
  std::string t = text;
  t.erase(std::remove(t.begin(), t.end(), ' '), t.end());
  if (t.empty()) throw ConfigError("empty complex number");
  std::size_t used = 0;
  try {
    if (t.back() != 'i') {
      const double re = std::stod(t, &used);
      if (used != t.size()) throw ConfigError("bad complex number '" + text + "'");
      return re;
    }
    t.pop_back();
    // split at the last sign that is not part of an exponent
    std::size_t split = 0;
    for (std::size_t k = 1; k < t.size(); ++k)
      if ((t[k] == '+' || t[k] == '-') && t[k - 1] != 'e' && t[k - 1] != 'E') split = k;
    const std::string re_part = t.substr(0, split);
    std::string im_part = t.substr(split);
    if (im_part == "+" || im_part == "-" || im_part.empty()) im_part += "1";
    double re = 0.0;
    if (!re_part.empty()) {
      re = std::stod(re_part, &used);
      if (used != re_part.size()) throw ConfigError("bad complex number '" + text + "'");
    }
    const double im = std::stod(im_part, &used);
    if (used != im_part.size()) throw ConfigError("bad complex number '" + text + "'");
    return {re, im};
  } catch (const std::logic_error&) {
    throw ConfigError("bad complex number '" + text + "'");
  }
}

// the function under test: a corpus entry by id or explicit coefficients of
// z^{p+n}, z^{p+n+1}, ...
struct FunctionChoice {
  std::string entry;
  int p = 1;
  int n = 1;
  std::vector<std::string> coeffs;
};

AnalyticFunction resolve_function(const FunctionChoice& fc, const RunConfig& config, std::string& label) {
  if (!fc.entry.empty()) {
    for (auto& e : generate_corpus(config))
      if (e.id == fc.entry) {
        label = e.id;
        return e.f;
      }
    throw ConfigError("no corpus entry with id " + fc.entry);
  }
  label = "explicit";
  std::vector<Complex> coeffs;
  for (const auto& c : fc.coeffs) coeffs.push_back(parse_complex(c));
  return make_function(fc.p, fc.n, coeffs);
}

void add_common(CLI::App* app, Common& c) {
  app->add_option("--config", c.config_path, "JSON run configuration");
  app->add_option("--seed", c.seed, "corpus seed (overrides config and SUBORD_SEED)");
  app->add_option("--out", c.out, "output directory");
  app->add_option("--format", c.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  app->add_option("--tol-certify", c.tol_certify);
  app->add_option("--tol-refute", c.tol_refute);
  app->add_option("--tol-identity", c.tol_identity);
  app->add_option("--tol-quadrature", c.tol_quadrature);
}

void add_function(CLI::App* app, FunctionChoice& fc) {
  app->add_option("--entry", fc.entry, "corpus entry id");
  app->add_option("--p", fc.p, "valence")->check(CLI::PositiveNumber);
  app->add_option("--n", fc.n, "gap")->check(CLI::PositiveNumber);
  app->add_option("--coeffs", fc.coeffs, "coefficients of z^(p+n), z^(p+n+1), ... (e.g. 0.3 0.1+0.2i)");
}

// ---- corpus

int cmd_corpus(const Common& c) {
  const RunConfig config = load_config(c);
  auto corpus = generate_corpus(config);
  const DiskGrid grid = DiskGrid::from_radii(config.grid.radii, config.grid.angles);
  for (auto& e : corpus) screen_entry(e, grid);
  const fs::path dir = prepare_dir(config.output_dir);
  if (c.format == "csv") {
    std::ostringstream s;
    s << "id,family,construction,p,n,order,excluded,reason\n";
    for (const auto& e : corpus)
      s << e.id << ',' << e.family << ',' << to_string(e.construction) << ',' << e.f.valence() << ',' << e.f.gap()
        << ',' << e.f.truncation_order() << ',' << (e.excluded ? 1 : 0) << ",\"" << e.exclusion_reason << "\"\n";
    write_file(dir / "corpus.csv", s.str());
  } else {
    write_file(dir / "corpus.json", corpus_to_json(corpus).dump(1) + "\n");
  }
  std::size_t excluded = 0;
  for (const auto& e : corpus) excluded += e.excluded ? 1 : 0;
  std::cout << "corpus: " << corpus.size() << " generated, " << corpus.size() - excluded << " checked, " << excluded
            << " excluded -> " << dir.string() << "\n";
  return 0;
}

// ---- check

int cmd_check(const Common& c, const std::string& which) {
  RunConfig config = load_config(c);
  if (which != "all") {
    const std::vector<std::string> known = RunConfig{}.theorems;
    if (std::find(known.begin(), known.end(), which) == known.end())
      throw ConfigError("unknown check '" + which + "'");
    config.theorems = {which};
  }
  const RunResult result = run_all(config);
  const fs::path dir = prepare_dir(config.output_dir);
  write_file(dir / "report.json", result.report.dump(1) + "\n");
  if (c.format == "csv") {
    std::ostringstream s;
    s << "theorem,entry,status,margin,planted\n";
    for (const auto& r : result.report["results"]) {
      const double margin = r.contains("margin") && r["margin"].is_number() ? r["margin"].get<double>() : 0.0;
      s << r["theorem"].get<std::string>() << ',' << r.value("entry", "") << ',' << r["status"].get<std::string>()
        << ',' << num(margin) << ',' << (r.contains("planted") ? 1 : 0) << "\n";
    }
    // inclusion reports are per parameter pair, not per entry
    for (const auto& r : result.report["inclusion"]) {
      std::ostringstream pair;
      pair << "mu" << num(r["mu1"]) << "-" << num(r["mu2"]);
      s << "thm2.2," << pair.str() << ',' << r["status"].get<std::string>() << ",0,"
        << (r.contains("planted") ? 1 : 0) << "\n";
    }
    write_file(dir / "results.csv", s.str());
  }
  const auto& sum = result.report["summary"];
  std::cout << "certified " << sum["certified"] << ", refuted " << sum["refuted"] << ", inconclusive "
            << sum["inconclusive"] << ", skipped " << sum["skipped"] << "\n"
            << "unexpected refutations: " << result.unexpected_refutations
            << ", planted audit: " << (result.planted_audit_passed ? "passed" : "FAILED") << "\n"
            << "report -> " << (dir / "report.json").string() << "\n";
  return exit_code(result);
}

// ---- dominant

struct DominantArgs {
  std::string gamma = "1";
  double A = 1.0;
  double B = -1.0;
  std::size_t count = 32;
};

int cmd_dominant(const Common& c, const DominantArgs& d) {
  const RunConfig config = load_config(c);
  const DominantSpec spec = make_dominant_spec(parse_complex(d.gamma), d.A, d.B);
  const DiskGrid grid = DiskGrid::from_radii(config.grid.radii, config.grid.angles);
  const fs::path dir = prepare_dir(config.output_dir);
  if (c.format == "csv") {
    std::ostringstream s;
    s << "k,re,im\n";
    const auto coeffs = dominant_coefficients(spec, d.count);
    for (std::size_t k = 0; k < coeffs.size(); ++k)
      s << k << ',' << num(coeffs[k].real()) << ',' << num(coeffs[k].imag()) << "\n";
    write_file(dir / "dominant.csv", s.str());
    std::cout << "coefficients -> " << (dir / "dominant.csv").string() << "\n";
    return 0;
  }
  const DominantReport rep = dominant_report(spec, grid, d.count);
  write_file(dir / "dominant.json", to_json(rep).dump(1) + "\n");
  std::cout << "inf Re q = " << num(rep.extrema.inf_re) << ", sup Re q = " << num(rep.extrema.sup_re)
            << "\nreport -> " << (dir / "dominant.json").string() << "\n";
  return 0;
}

// ---- trace

struct TraceArgs {
  std::string what;
  std::string gamma = "1";
  double A = 1.0;
  double B = -1.0;
  double alpha = 1.0;
  double beta = 0.0;
  int samples = 360;
  FunctionChoice fn;
};

struct TraceRow {
  Complex z;
  Complex w;
  double radius;
  std::string tag;
};

int cmd_trace(const Common& c, const TraceArgs& t) {
  const RunConfig config = load_config(c);
  const DiskGrid grid = DiskGrid::from_radii(config.grid.radii, t.samples);
  std::vector<TraceRow> rows;
  json params;

  auto circles = [&](const std::vector<Complex>& values, const std::string& tag) {
    for (std::size_t ci = 0; ci < grid.radii().size(); ++ci)
      for (std::size_t i = grid.circle_begin(ci); i < grid.circle_begin(ci + 1); ++i)
        rows.push_back({grid.points()[i], values[i], grid.radii()[ci], tag});
  };

  if (t.what == "region-boundary") {
    const MobiusTarget m = make_mobius(t.A, t.B);
    std::vector<Complex> values;
    for (const auto& z : grid.points()) values.push_back(m(z));
    circles(values, "boundary");
    params = {{"A", t.A}, {"B", t.B}};
  } else if (t.what == "phi-image") {
    std::string label;
    const AnalyticFunction f = resolve_function(t.fn, config, label);
    const NbEvaluator ev(f, Complex(t.alpha, t.beta));
    circles(ev.phi_on(grid).values, "phi");
    params = {{"function", label}, {"p", f.valence()}, {"n", f.gap()}, {"alpha", t.alpha}, {"beta", t.beta}};
  } else if (t.what == "dominant-values" || t.what == "re-extrema") {
    const Complex gamma = parse_complex(t.gamma);
    const DominantSpec spec = make_dominant_spec(gamma, t.A, t.B);
    const DominantTransform q(spec, config.tolerances.quadrature);
    params = {{"gamma", complex_json(gamma)}, {"A", t.A}, {"B", t.B}};
    if (t.what == "dominant-values") {
      std::vector<Complex> values;
      for (const auto& z : grid.points()) values.push_back(q(z));
      circles(values, "q");
    } else {
      // sampled argmin / argmax per circle, then the extrapolated values
      for (std::size_t ci = 0; ci < grid.radii().size(); ++ci) {
        std::optional<TraceRow> lo, hi;
        for (std::size_t i = grid.circle_begin(ci); i < grid.circle_begin(ci + 1); ++i) {
          const TraceRow row{grid.points()[i], q(grid.points()[i]), grid.radii()[ci], ""};
          if (!lo || row.w.real() < lo->w.real()) lo = row;
          if (!hi || row.w.real() > hi->w.real()) hi = row;
        }
        lo->tag = "inf";
        hi->tag = "sup";
        rows.push_back(*lo);
        rows.push_back(*hi);
      }
      const ReExtrema ex = extrema_of_re(q, grid);
      if (!ex.unbounded_below) rows.push_back({ex.argmin, ex.inf_re, 1.0, "inf-extrapolated"});
      if (!ex.unbounded_above) rows.push_back({ex.argmax, ex.sup_re, 1.0, "sup-extrapolated"});
      params["extrema"] = to_json(ex);
    }
  } else {
    throw ConfigError("unknown trace '" + t.what + "'");
  }

  const fs::path dir = prepare_dir(config.output_dir);
  std::ostringstream s;
  s << "z_re,z_im,w_re,w_im,radius,tag\n";
  for (const auto& r : rows)
    s << num(r.z.real()) << ',' << num(r.z.imag()) << ',' << num(r.w.real()) << ',' << num(r.w.imag()) << ','
      << num(r.radius) << ',' << r.tag << "\n";
  const fs::path csv = dir / (t.what + ".csv");
  write_file(csv, s.str());
  json sidecar{{"trace", t.what}, {"params", params}, {"rows", rows.size()}, {"radii", grid.radii()},
               {"samples_per_circle", t.samples}, {"csv", csv.filename().string()}};
  write_file(dir / (t.what + ".json"), sidecar.dump(1) + "\n");
  std::cout << rows.size() << " rows -> " << csv.string() << "\n";
  return 0;
}

// ---- membership

struct MembershipArgs {
  FunctionChoice fn;
  std::string mu = "1";
  double alpha = 1.0;
  double beta = 0.0;
  std::optional<double> A, B, rho;
};

int cmd_membership(const Common& c, const MembershipArgs& m) {
  const RunConfig config = load_config(c);
  std::string label;
  const AnalyticFunction f = resolve_function(m.fn, config, label);
  ClassTarget target;
  if (m.rho) {
    if (m.A || m.B) throw ConfigError("give either --rho or --A/--B");
    target = RhoBound{*m.rho};
  } else {
    target = MobiusTarget{m.A.value_or(1.0), m.B.value_or(-1.0)};
  }
  const ClassParams params = make_params(f.valence(), f.gap(), parse_complex(m.mu), m.alpha, m.beta, target);
  const DiskGrid grid = DiskGrid::from_radii(config.grid.radii, config.grid.angles);
  MembershipOptions opts;
  opts.subordination.certify_margin = config.tolerances.certify;
  opts.subordination.refute_margin = config.tolerances.refute;
  opts.bound_tolerance = config.tolerances.certify;
  const MembershipVerdict v =
      m.rho ? membership_def2(f, params, grid, opts) : membership_def1(f, params, grid, opts);
  json out = to_json(v);
  out["function"] = label;
  if (c.format == "csv") {
    std::cout << "function,status,note\n" << label << ',' << to_string(v.status()) << ",\"" << v.note << "\"\n";
  } else {
    std::cout << out.dump(1) << "\n";
  }
  if (!c.out.empty()) write_file(prepare_dir(c.out) / "membership.json", out.dump(1) + "\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical checks for p-valent non-Bazilevic classes"};
  app.require_subcommand(1);

  Common common;
  auto* corpus = app.add_subcommand("corpus", "generate and screen the test corpus");
  add_common(corpus, common);

  std::string which = "all";
  auto* check = app.add_subcommand("check", "run checks over the corpus and parameter lattice");
  add_common(check, common);
  check->add_option("id", which, "identity|def1|def2|thm2.1|thm2.2|thm2.3|thm3.1|thm4.1|thm5.1|all");

  DominantArgs dom;
  auto* dominant = app.add_subcommand("dominant", "evaluate the dominant q for (gamma, A, B)");
  add_common(dominant, common);
  dominant->add_option("--gamma", dom.gamma, "complex, e.g. 1 or 1+1i");
  dominant->add_option("--A", dom.A);
  dominant->add_option("--B", dom.B);
  dominant->add_option("--count", dom.count, "number of series coefficients");

  TraceArgs tr;
  auto* trace = app.add_subcommand("trace", "write CSV traces for plotting");
  add_common(trace, common);
  trace->add_option("what", tr.what, "region-boundary|phi-image|dominant-values|re-extrema")
      ->required()
      ->check(CLI::IsMember({"region-boundary", "phi-image", "dominant-values", "re-extrema"}));
  trace->add_option("--gamma", tr.gamma);
  trace->add_option("--A", tr.A);
  trace->add_option("--B", tr.B);
  trace->add_option("--alpha", tr.alpha);
  trace->add_option("--beta", tr.beta);
  trace->add_option("--samples", tr.samples, "samples per circle")->check(CLI::PositiveNumber);
  add_function(trace, tr.fn);

  MembershipArgs mem;
  auto* membership = app.add_subcommand("membership", "class membership of one function");
  add_common(membership, common);
  add_function(membership, mem.fn);
  membership->add_option("--mu", mem.mu);
  membership->add_option("--alpha", mem.alpha);
  membership->add_option("--beta", mem.beta);
  membership->add_option("--A", mem.A);
  membership->add_option("--B", mem.B);
  membership->add_option("--rho", mem.rho, "lower bound on Re J instead of a Moebius target");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kConfigError;
  }

  try {
    if (*corpus) return cmd_corpus(common);
    if (*check) return cmd_check(common, which);
    if (*dominant) return cmd_dominant(common, dom);
    if (*trace) return cmd_trace(common, tr);
    if (*membership) return cmd_membership(common, mem);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigError;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
