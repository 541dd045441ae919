#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rlab/dist.hpp"

namespace rlab {

/// Tunable constants standing in for asymptotic ones. Defaults are toy-scale
/// choices; acceptance rests on measured fooling and failure rates rather
/// than on matching any particular constant.
struct Params {
  int r_hs_cap = 40;       // cap on independence orders
  double c_ac0 = 1.0;      // scales the AC0 star rates and tree depths
  double C_ac0 = 1.0;      // reserved scale for seed-length accounting
  double A_f2 = 2.0;       // tree-depth scale in the sparse-polynomial route
  double B_f2 = 2.0;       // star-rate exponent scale in that route
  int max_stages = 0;      // 0 = derive from the star rate
  int rejection_max_attempts = 4096;

  /// Independence order sufficient to fool size-S depth-d circuits to
  /// error delta, capped for feasibility.
  int r_hs(double log2_size, int d, double delta) const;

  std::string descriptor_json() const;
};

/// Seeded sampler of live-coordinate sets over [0, n).
struct StarSampler {
  int n = 0;
  double p = 0.0;  // per-coordinate star rate
  int seed_bits = 0;
  int min_size = 0;  // every output has at least this many stars
  std::string guarantee;
  std::function<std::vector<int>(const BitVec&)> gen;

  std::vector<int> sample(SplitMix64& rng) const { return gen(rng.bits(seed_bits)); }
};

/// r-wise independent bits over the n x q selector grid, mapped to the live
/// set "all q selectors equal 1"; p-regular with p = 2^-q.
StarSampler stars_kwise(int n, int q, int r);

/// Rejection wrapper: resamples (with seeds derived deterministically from
/// the master seed) until the live set has at least `threshold` elements.
StarSampler condition_min_stars(const StarSampler& base, double threshold,
                                int max_attempts = 4096);

struct StageRecord {
  int live_before = 0;
  int stars_seed_bits = 0;
  int fill_seed_bits = 0;
  std::string stars_desc;
  std::string fill_desc;
};

/// Restriction-composition generator: each stage pins a pseudorandom live
/// set to values drawn from the stage filler, and a final draw fills
/// whatever is left after the stage cap.
class ComposedPrg {
public:
  using StarsFactory = std::function<StarSampler(int live)>;
  using FillFactory = std::function<SeededDistribution(int live)>;

  ComposedPrg(int n, double p, StarsFactory stars, FillFactory fill, int max_stages,
              std::string target, std::string notes);

  int n() const { return n_; }
  int seed_bits() const { return seed_bits_; }
  int max_stage_count() const { return max_stages_ + 1; }  // + final fill
  double stage_rate() const { return p_; }
  const std::string& target() const { return target_; }

  BitVec generate(const BitVec& seed) const;
  /// Stage count actually used for the given seed (<= max_stage_count()).
  int stages_used(const BitVec& seed) const;

  SeededDistribution as_distribution() const;
  std::string descriptor_json() const;

private:
  BitVec run(const BitVec& seed, int* stages_out) const;

  int n_;
  double p_;
  StarsFactory stars_;
  FillFactory fill_;
  int max_stages_;
  int seed_bits_;
  std::vector<StageRecord> plan_;  // worst-case layout at full n
  std::string target_, notes_;
};

/// Sum of k biased distributions and one t-wise block: fools depth-t trees
/// with degree-k parity leaves to error delta. delta' follows the
/// conditioning correction (delta^(2^(k-1))/16) * 4^-t.
SeededDistribution fool_simple_prg(int n, int t, int k, double delta);

/// Smallest delta the construction supports at (n, t, k) before the biased
/// field exceeds GF(2^32).
double fool_simple_min_delta(int n, int t, int k);

/// Intersection of d selector-grid samplers (one trimming stage with q=1,
/// then d-1 stages with q from the width of the stage's clauses).
StarSampler ac0_stars(int M, int d, int n, double eps1, const Params& params);

ComposedPrg ac0_prg(int n, int M, int d, double eps, const Params& params);

/// Single selector-grid sampler with q scaled by sqrt(log2 S).
StarSampler f2_stars(int S, int n, double eps2, const Params& params);

ComposedPrg f2_prg(int n, int S, double eps, const Params& params);

}  // namespace rlab
