#include <cmath>
#include <set>

#include "doctest.h"
#include "rlab/corpus.hpp"
#include "rlab/prg.hpp"
#include "rlab/verify.hpp"

using namespace rlab;

TEST_CASE("selector-grid star sampler is p-regular") {
  for (int q : {1, 2}) {
    StarSampler s = stars_kwise(4, q, 8);
    CHECK(s.p == doctest::Approx(std::ldexp(1.0, -q)));
    uint64_t seeds = uint64_t{1} << s.seed_bits;
    REQUIRE(s.seed_bits <= 22);
    std::vector<uint64_t> hits(4, 0);
    for (uint64_t seed = 0; seed < seeds; ++seed) {
      for (int v : s.gen(BitVec::from_u64(seed, s.seed_bits))) ++hits[v];
    }
    for (int v = 0; v < 4; ++v)
      CHECK(hits[v] * (uint64_t{1} << q) == seeds);
  }
}

TEST_CASE("pairwise independence of star events at r >= 2q") {
  int q = 1, n = 4;
  StarSampler s = stars_kwise(n, q, 2 * q);
  uint64_t seeds = uint64_t{1} << s.seed_bits;
  uint64_t both = 0, first = 0, second = 0;
  for (uint64_t seed = 0; seed < seeds; ++seed) {
    auto live = s.gen(BitVec::from_u64(seed, s.seed_bits));
    bool a = false, b = false;
    for (int v : live) {
      a = a || v == 0;
      b = b || v == 1;
    }
    first += a;
    second += b;
    both += a && b;
  }
  // exact pairwise independence: P[a and b] = P[a] P[b]
  CHECK(both * seeds == first * second);
}

TEST_CASE("conditioning a star sampler enforces the floor") {
  StarSampler base = stars_kwise(8, 1, 8);
  double threshold = base.p * 8 / 2.0;  // = 2
  StarSampler cond = condition_min_stars(base, threshold);
  SplitMix64 rng(5);
  for (int i = 0; i < 500; ++i) {
    auto live = cond.sample(rng);
    CHECK(static_cast<double>(live.size()) >= threshold);
  }

  // threshold 0 behaves as the base sampler
  StarSampler same = condition_min_stars(base, 0.0);
  BitVec seed = SplitMix64(3).bits(base.seed_bits);
  CHECK(same.gen(seed) == base.gen(seed));

  // unreachable threshold errors out
  StarSampler broken = condition_min_stars(base, 9.0, 4);
  CHECK_THROWS_AS(broken.sample(rng), Error);
}

TEST_CASE("acceptance rate of the star floor is at least p/2") {
  StarSampler base = stars_kwise(12, 2, 10);
  double p = base.p;
  uint64_t accepted = 0, trials = 4000;
  SplitMix64 rng(11);
  for (uint64_t i = 0; i < trials; ++i) {
    auto live = base.sample(rng);
    if (static_cast<double>(live.size()) >= p * 12 / 2.0) ++accepted;
  }
  double rate = static_cast<double>(accepted) / trials;
  double sigma = std::sqrt(rate * (1 - rate) / trials);
  CHECK(rate >= p / 2.0 - 3 * sigma);
}

TEST_CASE("composed generator: degenerate and tiny cases") {
  // p = 1 (stars = everything): a single stage reproduces the filler
  auto stars_all = [](int live) {
    StarSampler s;
    s.n = live;
    s.p = 1.0;
    s.seed_bits = 1;  // consumed but ignored
    s.guarantee = "all";
    s.gen = [live](const BitVec&) {
      std::vector<int> all(live);
      for (int i = 0; i < live; ++i) all[i] = i;
      return all;
    };
    return s;
  };
  auto fill = [](int live) { return uniform_bits(live); };
  ComposedPrg prg(6, 1.0, stars_all, fill, 4, "degenerate", "");
  SplitMix64 rng(1);
  BitVec seed = rng.bits(prg.seed_bits());
  CHECK(prg.stages_used(seed) == 1);
  // output equals the first stage filler bits
  BitVec out = prg.generate(seed);
  BitVec expect = seed.slice(1, 6);
  CHECK(out == expect);

  // n = 1: one stage pins the coordinate
  ComposedPrg tiny(1, 1.0, stars_all, fill, 2, "tiny", "");
  BitVec tseed = rng.bits(tiny.seed_bits());
  CHECK(tiny.generate(tseed).size() == 1);
}

TEST_CASE("stage count stays within the cap") {
  Params params;
  ComposedPrg prg = ac0_prg(16, 8, 2, 0.1, params);
  int cap = prg.max_stage_count();
  CHECK(cap <= static_cast<int>(std::ceil(std::log(16) / prg.stage_rate())) + 1);
  SplitMix64 rng(17);
  for (int i = 0; i < 20; ++i) {
    BitVec seed = rng.bits(prg.seed_bits());
    CHECK(prg.stages_used(seed) <= cap);
  }
}

TEST_CASE("fool_simple_prg shapes and degenerate cases") {
  // k = 0: a pure t-wise block
  SeededDistribution d0 = fool_simple_prg(8, 2, 0, 0.5);
  CHECK(d0.tws_k == 0);
  CHECK(d0.components.size() == 1);

  // k = 1, t = 0: one biased distribution, measured against parities
  SeededDistribution d1 = fool_simple_prg(10, 0, 1, 0.25);
  double worst = 0.0;
  std::vector<double> spec = parity_spectrum(d1);
  for (size_t mask = 1; mask < spec.size(); ++mask)
    worst = std::max(worst, std::abs(spec[mask]));
  CHECK(worst <= 0.25);

  // seed length bookkeeping: components concatenate
  SeededDistribution d2 = fool_simple_prg(8, 2, 2, 0.2);
  int total = 0;
  for (const auto& part : d2.components) total += part.seed_bits;
  CHECK(total == d2.seed_bits);

  // infeasible delta' errors with guidance
  CHECK_THROWS_AS(fool_simple_prg(8, 30, 3, 1e-6), Error);
  double floor = fool_simple_min_delta(8, 2, 2);
  CHECK_NOTHROW(fool_simple_prg(8, 2, 2, std::min(0.999, floor * 1.01)));
}

TEST_CASE("fool_simple_prg fools small poly-leaf trees exactly") {
  SeededDistribution d = fool_simple_prg(8, 2, 2, 0.2);
  std::vector<double> spectrum = parity_spectrum(d);
  SplitMix64 rng(23);
  for (int i = 0; i < 12; ++i) {
    PartialDecisionTree tree = random_poly_tree(rng, 8, 2, 2, 3);
    TruthTable tt = tree_truth_table(tree, 8);
    BiasReport r =
        measure_bias(tt, "tree", d, BiasMode::ExactSpectral, 0, 0, &spectrum);
    CHECK(r.bias <= 0.2);
  }
}

TEST_CASE("intersection star sampler multiplies the rates") {
  Params params;
  StarSampler s = ac0_stars(8, 2, 12, 0.1, params);
  // stage 0 at width 1 gives q=1, stage 1 at width ceil(log2 8)=3 gives q=2
  CHECK(s.p == doctest::Approx(1.0 / 8));
  SplitMix64 rng(29);
  uint64_t hits = 0, trials = 20000;
  for (uint64_t i = 0; i < trials; ++i) {
    auto live = s.sample(rng);
    for (int v : live)
      if (v == 5) ++hits;
  }
  double rate = static_cast<double>(hits) / trials;
  double sigma = std::sqrt(s.p * (1 - s.p) / trials);
  CHECK(std::abs(rate - s.p) <= 4 * sigma);
}

TEST_CASE("composed generators expose descriptors and determinism") {
  Params params;
  ComposedPrg prg = f2_prg(12, 8, 0.1, params);
  std::string desc = prg.descriptor_json();
  CHECK(desc.find("\"target\":\"f2(S=8)\"") != std::string::npos);
  CHECK(desc.find("seed_bits") != std::string::npos);

  SplitMix64 rng(31);
  BitVec seed = rng.bits(prg.seed_bits());
  CHECK(prg.generate(seed) == prg.generate(seed));
  CHECK(static_cast<int>(prg.generate(seed).size()) == 12);
}
