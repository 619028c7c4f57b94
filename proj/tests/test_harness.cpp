#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <set>

#include "subord/errors.hpp"
#include "subord/harness.hpp"
#include "support.hpp"

using namespace subord;
using nlohmann::json;
using testing::close;

namespace {

RunConfig small_config() {
  RunConfig c;
  c.corpus.sparse = 3;
  c.corpus.inverse = 3;
  c.corpus.stress = 0;
  c.grid.radii = {0.3, 0.6, 0.9};
  c.grid.angles = 36;
  c.lattice.mu = {0.0, 1.0};
  c.lattice.exponents = {{1.0, 0.0}, {0.5, 0.5}};
  c.workers = 1;
  return c;
}

}  // namespace

TEST_SUITE("harness") {

TEST_CASE("default corpus has 26 entries with unique ids") {
  const auto corpus = generate_corpus(RunConfig{});
  CHECK(corpus.size() == 26);
  std::set<std::string> ids;
  for (const auto& e : corpus) ids.insert(e.id);
  CHECK(ids.size() == corpus.size());
  CHECK(corpus.front().family == "identity");
  CHECK(corpus.front().f.coefficients().empty());
  int designed = 0;
  for (const auto& e : corpus) designed += e.construction == Construction::InverseDesigned;
  CHECK(designed == 10);
}

TEST_CASE("corpus is a function of the seed") {
  RunConfig a;
  RunConfig b;
  CHECK(corpus_to_json(generate_corpus(a)).dump() == corpus_to_json(generate_corpus(b)).dump());
  b.seed = 7;
  CHECK(corpus_to_json(generate_corpus(a)).dump() != corpus_to_json(generate_corpus(b)).dump());
}

TEST_CASE("inverse-designed entries reproduce their phi") {
  for (const auto& e : generate_corpus(RunConfig{})) {
    if (!e.design) continue;
    const auto& d = *e.design;
    const NbEvaluator ev(e.f, Complex(d.alpha, d.beta));
    const int n = e.f.gap();
    for (int k = 0; k < 12; ++k) {
      const Complex z = std::polar(0.99 * (k + 1) / 12.0, 0.7 + 2.0 * kPi * k / 12.0);
      const Complex w = d.s * std::pow(z, n);
      CHECK(close(ev.phi(z), (1.0 + d.A * w) / (1.0 + d.B * w), 1e-8));
    }
  }
  CHECK_THROWS_AS(inverse_designed(1, 1, {1.0, -1.0, 1.5, 1.0, 0.0}), DomainError);
}

TEST_CASE("config parsing rejects unknown fields and keeps defaults") {
  CHECK_THROWS_AS(config_from_json(json{{"sed", 1}}), DomainError);
  CHECK_THROWS_AS(config_from_json(json{{"corpus", {{"sparse", 1}, {"dense", 2}}}}), DomainError);
  CHECK_THROWS_AS(config_from_json(json{{"grid", {{"radii", {0.5, 0.4}}}}}), DomainError);
  CHECK_THROWS_AS(config_from_json(json{{"theorems", {"thm9.9"}}}), DomainError);
  CHECK_THROWS_AS(config_from_json(json{{"seed", "x"}}), DomainError);

  const auto c = config_from_json(json{{"seed", 5}, {"corpus", {{"stress", 1}}}});
  CHECK(c.seed == 5);
  CHECK(c.corpus.stress == 1);
  CHECK(c.corpus.sparse == RunConfig{}.corpus.sparse);

  const RunConfig d;
  CHECK(config_to_json(config_from_json(config_to_json(d))) == config_to_json(d));
}

TEST_CASE("SUBORD_SEED overrides the seed") {
  RunConfig c;
  ::setenv("SUBORD_SEED", "1234", 1);
  apply_environment(c);
  CHECK(c.seed == 1234);
  ::setenv("SUBORD_SEED", "12x", 1);
  CHECK_THROWS_AS(apply_environment(c), DomainError);
  ::setenv("SUBORD_SEED", "-3", 1);
  CHECK_THROWS_AS(apply_environment(c), DomainError);
  ::unsetenv("SUBORD_SEED");
  RunConfig untouched;
  apply_environment(untouched);
  CHECK(untouched.seed == 42);
}

TEST_CASE("screening excludes functions with zeros inside the grid") {
  const auto grid = default_grid(90);
  // 1 + c z vanishes at |z| = 1/|c|
  CorpusEntry inside{"in", "stress", Construction::Explicit, make_function(1, 1, {1.02}), {}, "", false, ""};
  screen_entry(inside, grid);
  CHECK(inside.excluded);
  CHECK(inside.exclusion_reason.find("zero") != std::string::npos);

  CorpusEntry outside{"out", "stress", Construction::Explicit, make_function(1, 1, {0.995}), {}, "", false, ""};
  screen_entry(outside, grid);
  CHECK_FALSE(outside.excluded);

  const auto j = corpus_to_json({inside, outside});
  CHECK(j["generated"] == 2);
  CHECK(j["checked"] == 1);
  CHECK(j["excluded"] == 1);
  CHECK(j["entries"][0].contains("exclusion_reason"));
}

TEST_CASE("inclusion pairs satisfy the nesting hypotheses") {
  for (const auto& pair : inclusion_pairs(20)) CHECK_FALSE(inclusion_hypotheses(pair));
}

TEST_CASE("restricted run: identity only") {
  auto c = small_config();
  c.theorems = {"identity"};
  const auto r = run_all(c);
  CHECK(exit_code(r) == 0);
  CHECK(r.report["planted"]["injected"].empty());
  const auto& results = r.report["results"];
  // one record per entry, exponent and mu
  CHECK(results.size() == (1 + 3 + 3) * 2 * 2);
  for (const auto& rec : results) {
    CHECK(rec["theorem"] == "identity");
    CHECK(rec["status"] == "certified");
  }
  CHECK(r.report["metrics"]["identity_max_residual"].get<double>() < 1e-7);
}

TEST_CASE("restricted run: f = z^p through every check") {
  RunConfig c;
  c.corpus.sparse = c.corpus.inverse = c.corpus.stress = 0;
  c.planted = false;
  c.grid.angles = 90;
  c.workers = 1;
  const auto r = run_all(c);
  CHECK(exit_code(r) == 0);
  CHECK(r.report["summary"]["refuted"] == 0);
  for (const auto& rec : r.report["results"]) {
    if (rec["status"] != "inconclusive") continue;
    // constant phi: superordination cannot be certified, nothing else may stall
    const std::string t = rec["theorem"];
    CHECK((t == "thm4.1" || t == "thm5.1"));
    CHECK(rec["reason"].get<std::string>().find("univalence") != std::string::npos);
  }
  CHECK(r.report["summary"]["by_theorem"]["thm2.1"]["certified"].get<int>() > 0);
}

TEST_CASE("run is deterministic and independent of the worker count") {
  auto c = small_config();
  c.theorems = {"identity", "def1", "def2", "thm2.1", "thm2.3"};
  const auto a = run_all(c);
  const auto b = run_all(c);
  CHECK(canonical_report(a.report) == canonical_report(b.report));
  c.workers = 3;
  const auto m = run_all(c);
  // the config is part of the report: compare everything else
  auto strip = [](json rep) {
    rep.erase("timestamp");
    rep.erase("config");
    return rep.dump();
  };
  CHECK(strip(a.report) == strip(m.report));
  CHECK(a.unexpected_refutations == 0);
  CHECK(a.planted_audit_passed);
}

}  // TEST_SUITE
