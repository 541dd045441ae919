#include <cmath>
#include <map>

#include "doctest.h"
#include "rlab/dist.hpp"
#include "rlab/verify.hpp"

using namespace rlab;

TEST_CASE("kwise at n=2, k=2 over GF(2) is the (c0, c0+c1) map") {
  SeededDistribution d = kwise(2, 2);
  CHECK(d.seed_bits == 2);
  std::map<std::string, int> seen;
  for (uint64_t s = 0; s < 4; ++s)
    ++seen[d.generate(BitVec::from_u64(s, 2)).to_string()];
  CHECK(seen.size() == 4);  // all four pairs equally likely
  for (const auto& [pattern, count] : seen) CHECK(count == 1);
}

TEST_CASE("kwise marginals are exactly uniform") {
  for (int k : {1, 2, 3}) {
    SeededDistribution d = kwise(8, k);
    uint64_t seeds = uint64_t{1} << d.seed_bits;
    // every pair (for k >= 2) hits each pattern exactly 1/4 of the time
    if (k >= 2) {
      for (int a = 0; a < 8; ++a)
        for (int b = a + 1; b < 8; ++b) {
          uint64_t count[4] = {0};
          for (uint64_t s = 0; s < seeds; ++s) {
            BitVec out = d.generate(BitVec::from_u64(s, d.seed_bits));
            ++count[out.get(a) * 2 + out.get(b)];
          }
          for (int pat = 0; pat < 4; ++pat) CHECK(count[pat] * 4 == seeds);
        }
    }
    // single coordinates unbiased for every k
    for (int a = 0; a < 8; ++a) {
      uint64_t ones = 0;
      for (uint64_t s = 0; s < seeds; ++s)
        ones += d.generate(BitVec::from_u64(s, d.seed_bits)).get(a);
      CHECK(ones * 2 == seeds);
    }
  }
}

TEST_CASE("kwise closed-form spectrum matches enumeration") {
  SeededDistribution d = kwise(6, 2);
  std::vector<double> spec = parity_spectrum(d);
  uint64_t seeds = uint64_t{1} << d.seed_bits;
  for (uint64_t mask = 0; mask < 64; ++mask) {
    double acc = 0;
    for (uint64_t s = 0; s < seeds; ++s) {
      BitVec out = d.generate(BitVec::from_u64(s, d.seed_bits));
      int par = 0;
      for (int i = 0; i < 6; ++i)
        if ((mask >> i) & 1) par ^= out.get(i);
      acc += par ? -1.0 : 1.0;
    }
    CHECK(spec[mask] == doctest::Approx(acc / seeds).epsilon(1e-12));
  }
}

TEST_CASE("epsbiased stays within its declared bias") {
  SeededDistribution d = epsbiased(8, 0.25);
  CHECK(max_parity_bias_exhaustive(d) <= 0.25);

  SeededDistribution tight = epsbiased(12, 0.1);
  CHECK(max_parity_bias_exhaustive(tight) <= 0.1);

  SeededDistribution single = epsbiased(1, 0.5);
  CHECK(max_parity_bias_exhaustive(single) <= 0.5);

  CHECK_THROWS_AS(epsbiased(8, 0.0), Error);
}

TEST_CASE("epsbiased closed-form spectrum matches enumeration") {
  SeededDistribution d = epsbiased(5, 0.3);
  std::vector<double> spec = parity_spectrum(d);
  uint64_t seeds = uint64_t{1} << d.seed_bits;
  for (uint64_t mask = 0; mask < 32; ++mask) {
    double acc = 0;
    for (uint64_t s = 0; s < seeds; ++s) {
      BitVec out = d.generate(BitVec::from_u64(s, d.seed_bits));
      int par = 0;
      for (int i = 0; i < 5; ++i)
        if ((mask >> i) & 1) par ^= out.get(i);
      acc += par ? -1.0 : 1.0;
    }
    CHECK(spec[mask] == doctest::Approx(acc / seeds).epsilon(1e-12));
  }
}

TEST_CASE("xor_sum basics") {
  SeededDistribution one = epsbiased(6, 0.25);
  SeededDistribution same = xor_sum({one});
  for (uint64_t s = 0; s < 16; ++s) {
    BitVec seed = BitVec::from_u64(s * 77 + 3, one.seed_bits);
    CHECK(one.generate(seed) == same.generate(seed));
  }

  // summing with uniform gives the uniform distribution
  SeededDistribution with_uniform = xor_sum({one, uniform_bits(6)});
  double worst = max_parity_bias_exhaustive(with_uniform);
  CHECK(worst == doctest::Approx(0.0));

  // the sum's parity bias never exceeds the min component bias
  SeededDistribution a = epsbiased(6, 0.5), b = epsbiased(6, 0.25);
  SeededDistribution sum = xor_sum({a, b});
  std::vector<double> sa = parity_spectrum(a), sb = parity_spectrum(b),
                      ss = parity_spectrum(sum);
  for (uint64_t mask = 1; mask < 64; ++mask)
    CHECK(std::abs(ss[mask]) <=
          std::min(std::abs(sa[mask]), std::abs(sb[mask])) + 1e-12);
}

TEST_CASE("restrictions from bitstrings") {
  BitstringRestrictionSpace space{2, 1};
  Restriction r = restriction_from_bits(space, BitVec::from_string("10"),
                                        BitVec::from_string("01"));
  CHECK(r.to_string() == "*1");

  BitstringRestrictionSpace space2{3, 2};
  Restriction all = restriction_from_bits(space2, BitVec::from_string("111111"),
                                          BitVec::from_string("010"));
  CHECK(all.to_string() == "***");

  // uniform bits give star probability exactly 2^-q, coordinatewise
  for (int q : {1, 2}) {
    BitstringRestrictionSpace sp{3, q};
    uint64_t total = uint64_t{1} << sp.total_bits();
    uint64_t stars[3] = {0, 0, 0};
    uint64_t zeros[3] = {0, 0, 0};
    for (uint64_t x = 0; x < total; ++x) {
      Restriction rho = restriction_from_bits(sp, BitVec::from_u64(x, sp.total_bits()));
      for (int i = 0; i < 3; ++i) {
        if (rho.is_star(i)) ++stars[i];
        else if (!rho.bit(i)) ++zeros[i];
      }
    }
    for (int i = 0; i < 3; ++i) {
      CHECK(stars[i] * (uint64_t{1} << q) == total);
      CHECK(zeros[i] * 2 == total - stars[i] * 1);
    }
  }
}

TEST_CASE("pairwise coordinate independence of the bitstring law") {
  for (int q : {1, 2}) {
    BitstringRestrictionSpace sp{3, q};
    uint64_t total = uint64_t{1} << sp.total_bits();
    // joint counts over coordinate pair (0, 1), 3x3 outcomes
    uint64_t joint[9] = {0};
    uint64_t marg0[3] = {0}, marg1[3] = {0};
    auto code = [](const Restriction& rho, int i) {
      return rho.is_star(i) ? 2 : (rho.bit(i) ? 1 : 0);
    };
    for (uint64_t x = 0; x < total; ++x) {
      Restriction rho = restriction_from_bits(sp, BitVec::from_u64(x, sp.total_bits()));
      ++joint[code(rho, 0) * 3 + code(rho, 1)];
      ++marg0[code(rho, 0)];
      ++marg1[code(rho, 1)];
    }
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b)
        CHECK(joint[a * 3 + b] * total == marg0[a] * marg1[b]);
  }
}

TEST_CASE("stars_from_bits matches the restriction view") {
  BitstringRestrictionSpace space{4, 2};
  SplitMix64 rng(3);
  for (int i = 0; i < 50; ++i) {
    BitVec sel = rng.bits(space.n * space.q);
    BitVec val = rng.bits(space.n);
    Restriction r = restriction_from_bits(space, sel, val);
    std::vector<int> live = stars_from_bits(space, sel);
    std::vector<int> expected = r.stars();
    CHECK(live == expected);
  }
}

TEST_CASE("sample_Rp endpoints and concentration") {
  SplitMix64 rng(9);
  CHECK(sample_Rp(6, 1.0, rng).star_count() == 6);
  CHECK(sample_Rp(6, 0.0, rng).star_count() == 0);

  int n = 10000;
  Restriction r = sample_Rp(n, 0.25, rng);
  double frac = static_cast<double>(r.star_count()) / n;
  double sigma = std::sqrt(0.25 * 0.75 / n);
  CHECK(std::abs(frac - 0.25) <= 3 * sigma);
}

TEST_CASE("conditioning by rejection") {
  SeededDistribution d = epsbiased(6, 0.25);

  // always-true predicate: identity behavior
  ConditionalSampler id = mix_condition(d, [](const BitVec&) { return true; });
  SplitMix64 rng(1);
  (void)id.sample(rng);
  CHECK(id.measured_acceptance_rate() == doctest::Approx(1.0));

  // never-true predicate: errors after max attempts
  ConditionalSampler never =
      mix_condition(d, [](const BitVec&) { return false; }, 8);
  CHECK_THROWS_AS(never.sample(rng), Error);

  // conditioning on bit0 = 1 keeps the remaining coordinates biased by at
  // most 2 delta / (1 - delta)
  double delta = 0.25;
  ConditionalSampler cond =
      mix_condition(d, [](const BitVec& v) { return v.get(0); });
  std::vector<BitVec> accepted = cond.exact_accepted_outputs();
  REQUIRE_FALSE(accepted.empty());
  double worst = 0;
  for (uint64_t mask = 2; mask < 64; mask += 2) {  // masks avoiding bit 0
    double acc = 0;
    for (const BitVec& v : accepted) {
      int par = 0;
      for (int i = 1; i < 6; ++i)
        if ((mask >> i) & 1) par ^= v.get(i);
      acc += par ? -1.0 : 1.0;
    }
    worst = std::max(worst, std::abs(acc / accepted.size()));
  }
  CHECK(worst <= 2 * delta / (1 - delta) + 1e-12);
}

TEST_CASE("mixture of fooling distributions still fools") {
  SeededDistribution a = epsbiased(6, 0.2);
  SeededDistribution b = epsbiased(6, 0.2);
  SeededDistribution mix = mixture({a, b});
  double worst = max_parity_bias_exhaustive(mix);
  CHECK(worst <= 0.2 + 1e-12);
}

TEST_CASE("distribution descriptors are valid JSON") {
  SeededDistribution d = xor_sum({epsbiased(6, 0.25), kwise(6, 2)});
  std::string j = d.descriptor_json();
  CHECK(j.find("\"kind\":\"sum\"") != std::string::npos);
  CHECK(j.find("seed_bits") != std::string::npos);
}
