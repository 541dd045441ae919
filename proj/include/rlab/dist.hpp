#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rlab/bits.hpp"
#include "rlab/boolcore.hpp"
#include "rlab/rng.hpp"

namespace rlab {

// ---------------------------------------------------------------------------
// Seeded distributions
// ---------------------------------------------------------------------------

/// Deterministic map from r-bit seeds to n-bit strings with a declared
/// statistical guarantee. Values are immutable; Sum nodes own copies of
/// their components.
struct SeededDistribution {
  enum class Kind { Identity, KWise, EpsBiased, Sum, TWiseBiasSum, Composed };

  Kind kind = Kind::Identity;
  int n_out = 0;
  int seed_bits = 0;

  // KWise
  int k = 0;
  int field_m = 0;
  // EpsBiased
  double delta = 0.0;
  int bias_m = 0;
  // Sum / TWiseBiasSum
  std::vector<SeededDistribution> components;
  int tws_t = 0, tws_k = 0;
  double tws_delta_prime = 0.0;
  // Composed
  std::function<BitVec(const BitVec&)> custom;
  std::string description;

  BitVec generate(const BitVec& seed) const;

  /// E[(-1)^<mask, output>] over the full seed space, by closed form
  /// (parity spectra of the constructions here are exactly computable).
  double parity_bias_signed(const BitVec& mask) const;
  bool exact_spectrum_available() const;

  std::string describe() const;
  std::string descriptor_json() const;
};

/// Every k coordinates exactly uniform: evaluations of a random degree-(k-1)
/// polynomial over GF(2^b), b = ceil(log2(max(n,2))); output bit i is bit 0
/// of the evaluation at the i-th field point. Seed length k*b.
SeededDistribution kwise(int n, int k);

/// Powering construction: seed (x, y) in GF(2^m)^2, output bit i is bit 0 of
/// x^i * y, with m chosen so the worst parity bias (n-1)/2^m is at most
/// delta. Seed length 2m.
SeededDistribution epsbiased(int n, double delta);

/// Identity generator: r = n, the uniform distribution.
SeededDistribution uniform_bits(int n);

/// Coordinatewise XOR; seeds concatenate.
SeededDistribution xor_sum(std::vector<SeededDistribution> parts);

/// Equal-weight mixture (selector bits pick the component). Test aid.
SeededDistribution mixture(std::vector<SeededDistribution> parts);

// ---------------------------------------------------------------------------
// Bitstrings as restrictions
// ---------------------------------------------------------------------------

/// Coordinates of the (selector grid, value vector) encoding: q selector
/// bits per variable followed by one value bit per variable.
struct BitstringRestrictionSpace {
  int n = 0;
  int q = 1;

  int total_bits() const { return n * q + n; }
  int selector_bit(int var, int j) const { return var * q + j; }
  int value_bit(int var) const { return n * q + var; }
};

/// Star iff all q selector bits are 1, else fixed to the value bit.
Restriction restriction_from_bits(const BitstringRestrictionSpace& space,
                                  const BitVec& selectors, const BitVec& values);
Restriction restriction_from_bits(const BitstringRestrictionSpace& space,
                                  const BitVec& combined);

/// The live set of restriction_from_bits, ignoring the value bits.
std::vector<int> stars_from_bits(const BitstringRestrictionSpace& space,
                                 const BitVec& selectors);

/// i.i.d. per coordinate: star with probability p, else a uniform bit.
Restriction sample_Rp(int n, double p, SplitMix64& rng);

// ---------------------------------------------------------------------------
// Conditioning
// ---------------------------------------------------------------------------

/// Rejection sampler over seeds. Sampling drives fresh uniform seeds from
/// the caller's stream; exact conditional enumeration is available when the
/// seed space is small enough to sweep.
class ConditionalSampler {
public:
  ConditionalSampler(SeededDistribution base,
                     std::function<bool(const BitVec&)> predicate,
                     int max_attempts);

  BitVec sample(SplitMix64& rng) const;
  double measured_acceptance_rate() const;
  uint64_t attempts() const { return attempts_; }
  uint64_t accepts() const { return accepts_; }

  /// All accepted outputs over the full seed space (seed_bits <= cap).
  std::vector<BitVec> exact_accepted_outputs(int cap_bits = 24) const;

  const SeededDistribution& base() const { return base_; }

private:
  SeededDistribution base_;
  std::function<bool(const BitVec&)> predicate_;
  int max_attempts_;
  mutable uint64_t attempts_ = 0, accepts_ = 0;
};

ConditionalSampler mix_condition(SeededDistribution d,
                                 std::function<bool(const BitVec&)> predicate,
                                 int max_attempts = 4096);

}  // namespace rlab
