#include <cmath>

#include "doctest.h"
#include "rlab/corpus.hpp"
#include "rlab/verify.hpp"

using namespace rlab;

TEST_CASE("measure_bias on constants and uniform") {
  TruthTable ones(4);
  for (size_t i = 0; i < ones.size(); ++i) ones.set(i, true);
  SeededDistribution d = epsbiased(4, 0.25);
  BiasReport r = measure_bias(ones, "constant-1", d, BiasMode::ExactSeeds);
  CHECK(r.bias == doctest::Approx(0.0));

  // identity generator is exactly unbiased on anything
  SplitMix64 rng(3);
  Cnf f = random_kcnf(rng, 4, 2, 3);
  BiasReport ru = measure_bias(truth_table(f), "random cnf", uniform_bits(4),
                               BiasMode::ExactSeeds);
  CHECK(ru.bias == doctest::Approx(0.0));
}

TEST_CASE("full parity bias stays under the declared delta") {
  SeededDistribution d = epsbiased(8, 0.25);
  F2Polynomial parity;
  parity.n = 8;
  parity.monomials = {};
  for (int i = 0; i < 8; ++i) parity.monomials.push_back(uint64_t{1} << i);
  BiasReport r =
      measure_bias(truth_table(parity), "full parity", d, BiasMode::ExactSeeds);
  CHECK(r.bias <= 0.25);
}

TEST_CASE("spectral and seed-sweep exact modes agree") {
  SeededDistribution d = xor_sum({epsbiased(6, 0.25), kwise(6, 2)});
  SplitMix64 rng(5);
  for (int i = 0; i < 6; ++i) {
    Cnf f = random_kcnf(rng, 6, 2, 3);
    TruthTable tt = truth_table(f);
    BiasReport seeds = measure_bias(tt, "cnf", d, BiasMode::ExactSeeds);
    BiasReport spectral = measure_bias(tt, "cnf", d, BiasMode::ExactSpectral);
    CHECK(seeds.prg_expectation ==
          doctest::Approx(spectral.prg_expectation).epsilon(1e-9));
  }
}

TEST_CASE("sampled mode is deterministic under the master seed") {
  SeededDistribution d = epsbiased(8, 0.25);
  SplitMix64 rng(7);
  Cnf f = random_kcnf(rng, 8, 2, 4);
  TruthTable tt = truth_table(f);
  BiasReport a = measure_bias(tt, "cnf", d, BiasMode::Sampled, 5000, 99);
  BiasReport b = measure_bias(tt, "cnf", d, BiasMode::Sampled, 5000, 99);
  CHECK(a.prg_expectation == b.prg_expectation);
  CHECK(a.ci_half_width > 0);
}

TEST_CASE("switching failure harness behaviors") {
  SplitMix64 rng(11);
  CnfFamily fam = random_family(rng, 8, 2, 3, 2);

  // t = 0 is always a failure and the bound is vacuous
  SwitchingReport r0 = switching_failure(fam, 2, 0, TrueRp{0.5}, 200, 1);
  CHECK(r0.rate == doctest::Approx(1.0));
  CHECK(r0.vacuous);
  CHECK(r0.pass);

  // constant family never fails at t >= 1
  CnfFamily constants;
  constants.n = 8;
  Cnf c;
  c.n = 8;
  c.k = 1;
  constants.members.push_back(c);
  SwitchingReport rc = switching_failure(constants, 2, 1, TrueRp{0.5}, 200, 1);
  CHECK(rc.rate == doctest::Approx(0.0));

  // bound arithmetic: M=4, l=2, t=4, p=2^-8, k=2 gives 16 * (1/4)^4 = 1/16
  CnfFamily fam4 = random_family(rng, 8, 2, 3, 4);
  SwitchingReport rb =
      switching_failure(fam4, 2, 4, TrueRp{1.0 / 256}, 100, 1);
  CHECK(rb.bound == doctest::Approx(1.0 / 16));
  CHECK(rb.recompute_bound() == doctest::Approx(rb.bound));

  // parallel execution gives identical counts
  SwitchingReport seq = switching_failure(fam, 2, 2, TrueRp{0.25}, 2000, 5, 1);
  SwitchingReport par = switching_failure(fam, 2, 2, TrueRp{0.25}, 2000, 5, 4);
  CHECK(seq.failures == par.failures);
}

TEST_CASE("single switching failure") {
  SplitMix64 rng(13);
  Cnf f = random_kcnf(rng, 8, 2, 4);
  SwitchingReport r = single_switching_failure(f, 3, 1.0 / 20, 4000, 3);
  // (5pk)^t with k=2, p=1/20, t=3: (1/2)^3 = 1/8
  CHECK(r.bound == doctest::Approx(1.0 / 8));
  CHECK(r.pass);

  Cnf constant;
  constant.n = 8;
  constant.k = 1;
  SwitchingReport rc = single_switching_failure(constant, 1, 0.5, 500, 3);
  CHECK(rc.rate == doctest::Approx(0.0));
}

TEST_CASE("derandomized source matches the bit-space dimensions") {
  SplitMix64 rng(17);
  CnfFamily fam = random_family(rng, 8, 2, 3, 2);
  BitstringRestrictionSpace space{8, 2};
  SeededDistribution bits = kwise(space.total_bits(), 12);
  SwitchingReport r =
      switching_failure(fam, 2, 3, PseudoBits{bits, 2}, 2000, 19);
  CHECK(r.trials == 2000);
  CHECK(r.bound_formula.find("16^") == 0);

  SeededDistribution wrong = kwise(8, 4);
  CHECK_THROWS_AS(
      switching_failure(fam, 2, 3, PseudoBits{wrong, 2}, 10, 1), Error);
}

TEST_CASE("naive polynomial failure harness") {
  // a polynomial that is already low degree never fails
  SplitMix64 rng(19);
  F2Polynomial low = random_poly(rng, 10, 4, 2);
  PolyFailureReport r = naive_poly_failure(low, 0.25, 2, 0.5, 500, 7);
  CHECK(r.rate == doctest::Approx(0.0));
  CHECK(r.pass);

  // single monomial of width w: survival matches the binomial closed form
  F2Polynomial single;
  single.n = 12;
  single.monomials = {(uint64_t{1} << 6) - 1};  // width 6
  double p = 0.5;
  int k = 3;
  uint64_t trials = 20000, hits = 0;
  for (uint64_t i = 0; i < trials; ++i) {
    SplitMix64 trial_rng = derive_stream(23, i);
    F2Polynomial g = restrict_poly(single, sample_Rp(12, p, trial_rng));
    if (g.degree() >= k) ++hits;
  }
  double expect = binomial_tail_at_least(6, k, p);
  double rate = static_cast<double>(hits) / trials;
  double sigma = std::sqrt(expect * (1 - expect) / trials);
  CHECK(std::abs(rate - expect) <= 4 * sigma);

  // bound arithmetic: S=8, w=6, k=3, p=1/4 -> eps/2 + 8 * C(6,3) * (1/64)
  F2Polynomial wide;
  wide.n = 16;
  for (int i = 0; i < 8; ++i) {
    uint64_t mask = 0;
    for (int j = 0; j < 6; ++j) mask |= uint64_t{1} << ((i + j) % 16);
    wide.monomials.push_back(mask);
  }
  wide.normalize();
  REQUIRE(wide.S() == 8);
  PolyFailureReport rb = naive_poly_failure(wide, 0.25, 3, 1.0, 100, 3);
  if (rb.w == 6) {
    CHECK(rb.bound == doctest::Approx(0.5 + 8 * 20 * std::pow(0.25, 3)));
  }
  CHECK(rb.bound >= 0.5);
}

TEST_CASE("oracle suite passes end to end") {
  for (const OracleResult& r : run_oracle_suite(2024)) {
    CAPTURE(r.id);
    CHECK(r.pass);
  }
}

TEST_CASE("reports render to json and csv") {
  SplitMix64 rng(29);
  CnfFamily fam = random_family(rng, 8, 2, 3, 2);
  SwitchingReport r = switching_failure(fam, 2, 2, TrueRp{0.25}, 100, 1);
  CHECK(r.to_json().find("\"bound_recomputed\"") != std::string::npos);
  CHECK(SwitchingReport::csv_header().find("rate") != std::string::npos);
  CHECK(r.to_csv_row().find(",") != std::string::npos);
}
