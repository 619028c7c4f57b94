#pragma once

// Corpus generation, run configuration and the batch driver that runs every
// checker over the corpus and a parameter lattice.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "subord/nb_operator.hpp"

namespace subord {

struct CorpusConfig {
  std::vector<int> p_values{1, 2};
  std::vector<int> n_values{1, 2};
  int sparse = 10;
  int inverse = 10;
  int stress = 5;
  // cap on the series length of inverse-designed entries
  int truncation_order = 512;
};

struct ExponentSpec {
  double alpha = 1.0;
  double beta = 0.0;
};

struct LatticeConfig {
  std::vector<Complex> mu{0.0, 0.5, 1.0, 2.0, -0.5, Complex(1.0, 0.5)};
  std::vector<ExponentSpec> exponents{{1.0, 0.0}, {0.5, 0.0}, {2.0, 0.0}, {1.0, 0.5}, {0.5, -0.5}};
  std::vector<ClassTarget> targets{MobiusTarget{1.0, -1.0}, MobiusTarget{0.5, 0.0},  MobiusTarget{1.0, 0.0},
                                   MobiusTarget{0.2, -0.8}, MobiusTarget{0.5, -0.5}, RhoBound{0.0},
                                   RhoBound{0.5}};
};

struct GridConfig {
  std::vector<double> radii{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 0.99};
  int angles = 180;
  // the identity residual is evaluated on the circles with radius <= this
  double identity_radius = 0.9;
};

struct Tolerances {
  double certify = 1e-6;
  double refute = 1e-6;
  double identity = 1e-7;
  double quadrature = 1e-10;
};

struct InclusionConfig {
  int pairs = 20;
};

struct RunConfig {
  std::uint64_t seed = 42;
  CorpusConfig corpus;
  LatticeConfig lattice;
  GridConfig grid;
  Tolerances tolerances;
  InclusionConfig inclusion;
  // inject one violation each into the 2.1, 2.2 and 2.3 checks
  bool planted = true;
  std::vector<std::string> theorems{"identity", "def1", "def2", "thm2.1", "thm2.2", "thm2.3",
                                    "thm3.1", "thm4.1", "thm5.1"};
  int workers = 0;  // 0: hardware concurrency
  std::string output_dir = "out";
};

/// Parses a JSON config; unknown fields raise DomainError. Missing fields keep
/// their defaults.
RunConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const RunConfig& config);

/// Applies SUBORD_SEED when set. Throws DomainError when it is not an integer.
void apply_environment(RunConfig& config);

enum class Construction { Explicit, InverseDesigned };

const char* to_string(Construction c) noexcept;

/// Phi = M(s z^n) with M(w) = (1 + A w)/(1 + B w), realized for one exponent.
struct InverseDesign {
  double A = 1.0;
  double B = -1.0;
  double s = 0.5;
  double alpha = 1.0;
  double beta = 0.0;
};

struct CorpusEntry {
  std::string id;
  std::string family;  // identity | sparse | inverse | stress
  Construction construction = Construction::Explicit;
  AnalyticFunction f;
  std::optional<InverseDesign> design;
  std::string provenance;
  bool excluded = false;
  std::string exclusion_reason;
};

/// f = z^p psi(z^n)^{-1/(alpha + i beta)} with psi = M(s .), truncated once
/// the coefficients fall below 1e-15 or at `max_order`.
AnalyticFunction inverse_designed(int p, int n, const InverseDesign& design, int max_order = 512);

/// Deterministic for a fixed config: the identity entry z^p for the first p
/// value, then sparse, inverse-designed and stress families.
std::vector<CorpusEntry> generate_corpus(const RunConfig& config);

/// Marks entries whose f(z)/z^p vanishes on or inside |z| = r_max or cannot
/// be continued along the grid rays.
void screen_entry(CorpusEntry& entry, const DiskGrid& grid);

nlohmann::json corpus_to_json(const std::vector<CorpusEntry>& corpus);

struct RunResult {
  nlohmann::json report;
  int unexpected_refutations = 0;
  bool planted_audit_passed = true;
};

/// Runs every selected check. The report is ordered by entry id, theorem and
/// lattice position, independent of the worker count.
RunResult run_all(const RunConfig& config);

/// Exit code convention of the command line tool.
int exit_code(const RunResult& result);

/// The 2.2 pairs used by run_all: nested targets, 0 <= mu1 <= mu2 <= 2.
std::vector<InclusionPair> inclusion_pairs(int count);

/// The report without its timestamp, for byte comparisons.
std::string canonical_report(const nlohmann::json& report);

}  // namespace subord
