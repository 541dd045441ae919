#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "rlab/badckt.hpp"
#include "rlab/cdt.hpp"
#include "rlab/dist.hpp"

namespace rlab {

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

struct BiasReport {
  std::string function_desc;
  std::string dist_desc;
  bool exact = true;
  uint64_t trials = 0;  // sampled mode
  double uniform_expectation = 0.0;
  double prg_expectation = 0.0;
  double bias = 0.0;
  double ci_half_width = 0.0;  // 99% half width in sampled mode

  std::string to_json() const;
  static std::string csv_header();
  std::string to_csv_row() const;
};

struct SwitchingReport {
  std::string family_desc;
  std::string source_desc;
  int l = 0, t = 0;
  bool exact = false;
  uint64_t trials = 0;
  uint64_t failures = 0;
  double rate = 0.0;
  double bound = 0.0;
  std::string bound_formula;
  double sigma = 0.0;
  bool vacuous = false;  // bound >= 1
  bool pass = false;     // rate <= bound + 3 sigma (or vacuous)

  /// Recomputes the bound from the stored symbolic pieces; guards against
  /// transcription drift between computation and rendering.
  double recompute_bound() const;
  int M_ = 0, k_ = 0;
  double p_ = 0.0, delta_ = 0.0;
  bool derandomized_ = false;

  std::string to_json() const;
  static std::string csv_header();
  std::string to_csv_row() const;
};

// ---------------------------------------------------------------------------
// Bias measurement
// ---------------------------------------------------------------------------

enum class BiasMode { ExactAuto, ExactSeeds, ExactSpectral, Sampled };

/// Signed parity biases of the distribution for all 2^n masks (n = n_out).
std::vector<double> parity_spectrum(const SeededDistribution& d);

/// |E f(Gen(s)) - E f(x)|. Exact mode either sweeps the seed space or uses
/// the distribution's exact parity spectrum through the Fourier expansion
/// of f; sampled mode draws from a master-seeded stream.
BiasReport measure_bias(const TruthTable& f, const std::string& function_desc,
                        const SeededDistribution& d, BiasMode mode,
                        uint64_t trials = 0, uint64_t master_seed = 0,
                        const std::vector<double>* spectrum = nullptr);

/// Max |E parity_S(Gen) - 1/2|*2 over nonempty masks, by seed enumeration.
double max_parity_bias_exhaustive(const SeededDistribution& d, int seed_cap_bits = 24);

// ---------------------------------------------------------------------------
// Switching-lemma failure rates
// ---------------------------------------------------------------------------

struct TrueRp {
  double p = 0.0;
};
struct PseudoBits {
  SeededDistribution dist;
  int q = 1;
};
using RestrictionSource = std::variant<TrueRp, PseudoBits>;

SwitchingReport switching_failure(const CnfFamily& fam, int l, int t,
                                  const RestrictionSource& source, uint64_t trials,
                                  uint64_t master_seed, int jobs = 1);

SwitchingReport single_switching_failure(const Cnf& f, int t, double p,
                                         uint64_t trials, uint64_t master_seed,
                                         int jobs = 1);

struct PolyFailureReport {
  std::string poly_desc;
  double p = 0.0;
  int k = 0;
  double eps = 0.0;
  int w = 0;  // width threshold from the tail computation
  uint64_t trials = 0;
  uint64_t failures = 0;
  double rate = 0.0;
  double bound = 0.0;  // eps/2 + S * C(w, k) * p^k
  bool vacuous = false;
  bool pass = false;

  std::string to_json() const;
};

/// Two-phase restriction (half rate, then star rate p): frequency of the
/// restricted polynomial keeping degree above k, against the union bound.
PolyFailureReport naive_poly_failure(const F2Polynomial& poly, double p, int k,
                                     double eps, uint64_t trials,
                                     uint64_t master_seed);

/// Closed-form Pr[at least k of w coordinates stay live at rate p].
double binomial_tail_at_least(int w, int k, double p);

// ---------------------------------------------------------------------------
// Cross-module oracle suite
// ---------------------------------------------------------------------------

struct OracleResult {
  std::string id;
  bool pass = false;
  std::string detail;
};

std::vector<OracleResult> run_oracle_suite(uint64_t master_seed);

}  // namespace rlab
