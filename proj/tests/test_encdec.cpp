#include "doctest.h"
#include "rlab/corpus.hpp"
#include "rlab/encdec.hpp"
#include "rlab/rng.hpp"

using namespace rlab;

namespace {

Cnf cnf_of(int n, int k, std::vector<std::vector<int>> signed_clauses) {
  Cnf f;
  f.n = n;
  f.k = k;
  for (auto& clause : signed_clauses) {
    Clause c;
    for (int lit : clause) c.literals.push_back({std::abs(lit) - 1, lit < 0});
    f.clauses.push_back(std::move(c));
  }
  f.validate();
  return f;
}

Restriction restriction_of_code(uint64_t code, int n) {
  Restriction rho(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    int digit = static_cast<int>(code % 3);
    code /= 3;
    if (digit < 2) rho.set(i, digit == 1 ? Trit::One : Trit::Zero);
  }
  return rho;
}

}  // namespace

TEST_CASE("encoding a single wide clause uses the falsifying answers") {
  CnfFamily fam;
  fam.n = 3;
  fam.members.push_back(cnf_of(3, 3, {{1, 2, 3}}));
  Restriction rho = Restriction::all_stars(3);
  Encoding enc = encode_bad(fam, rho, 1, 3);
  // rho' extends rho on exactly the clause variables, all set to falsify
  CHECK(enc.rho_prime.to_string() == "000");
  CHECK(enc.rho_prime.fixed_count() - rho.fixed_count() == 3);
  CHECK(enc.witness.u() == 1);
  CHECK(decode(fam, enc.rho_prime, enc.aux, 1, 3) == rho);
}

TEST_CASE("encode is defined on every bad restriction and round trips") {
  SplitMix64 rng(71);
  for (int inst = 0; inst < 8; ++inst) {
    int M = 1 + static_cast<int>(rng.below(2));
    CnfFamily fam = random_family(rng, 4, 2, 2, M);
    int l = 1 + static_cast<int>(rng.below(2));
    for (int t = 1; t <= 3; ++t) {
      for (uint64_t code = 0; code < 81; ++code) {
        Restriction rho = restriction_of_code(code, 4);
        if (!ccdt_reaches_under(fam, rho, l, t)) continue;
        Encoding enc = encode_bad(fam, rho, l, t);
        CAPTURE(inst);
        CAPTURE(l);
        CAPTURE(t);
        CAPTURE(code);
        REQUIRE(enc.rho_prime.fixed_count() == rho.fixed_count() + t);
        REQUIRE(decode(fam, enc.rho_prime, enc.aux, l, t) == rho);
      }
    }
  }
}

TEST_CASE("encode rejects good restrictions") {
  CnfFamily fam;
  fam.n = 3;
  fam.members.push_back(cnf_of(3, 1, {{1}}));
  CHECK_THROWS_AS(encode_bad(fam, Restriction::all_stars(3), 1, 2), Error);
}

TEST_CASE("aux corruption is detected or decodes to something else") {
  SplitMix64 rng(73);
  CnfFamily fam = random_family(rng, 4, 2, 2, 2);
  int l = 1, t = 2;
  AuxLayout layout = aux_layout(fam, l);
  int mutations_checked = 0;
  for (uint64_t code = 0; code < 81 && mutations_checked < 60; ++code) {
    Restriction rho = restriction_of_code(code, 4);
    if (!ccdt_reaches_under(fam, rho, l, t)) continue;
    Encoding enc = encode_bad(fam, rho, l, t);
    size_t u = enc.witness.u();
    size_t last_len = enc.witness.segments.back().vars.size();
    size_t records_off = u * (layout.len_bits + layout.idx_bits);
    // Branch answers of the final segment (and the walk answer of the very
    // last record) are erased before the output is produced, so flipping
    // them legitimately decodes back to rho. Every other bit must change
    // the result or trip a consistency check.
    auto erasable = [&](size_t bit) {
      if (bit < records_off) return false;
      size_t rec = (bit - records_off) / layout.record_bits();
      size_t inner = (bit - records_off) % layout.record_bits();
      bool in_last_segment = rec >= static_cast<size_t>(t) - last_len;
      bool pi_bit = inner == static_cast<size_t>(layout.record_bits()) - 1;
      bool eta_bit = inner == static_cast<size_t>(layout.record_bits()) - 2;
      return (in_last_segment && pi_bit) ||
             (rec + 1 == static_cast<size_t>(t) && eta_bit);
    };
    for (size_t bit = 0; bit < enc.aux.size(); ++bit) {
      if (erasable(bit)) continue;
      BitVec mutated = enc.aux;
      mutated.set(bit, !mutated.get(bit));
      ++mutations_checked;
      try {
        Restriction back = decode(fam, enc.rho_prime, mutated, l, t);
        CAPTURE(code);
        CAPTURE(bit);
        CHECK_FALSE(back == rho);
      } catch (const Error&) {
        // detection is fine
      }
    }
  }
  CHECK(mutations_checked > 0);
}

TEST_CASE("counting bound on exhaustive instances") {
  SplitMix64 rng(79);
  {
    CnfFamily fam;  // instance with an empty bad set
    fam.n = 4;
    fam.members.push_back(cnf_of(4, 1, {{1}}));
    CountingReport r = verify_counting_bound(fam, 1, 2, 1, 4);
    CHECK(r.bad_count == 0);
    CHECK(r.holds);
  }
  for (int M : {1, 2}) {
    CnfFamily fam = random_family(rng, 4, 2, 2, M);
    for (auto [num, den] : std::vector<std::pair<uint64_t, uint64_t>>{{1, 4}, {1, 8}}) {
      CountingReport r = verify_counting_bound(fam, 2, 3, num, den);
      CAPTURE(M);
      CAPTURE(den);
      CHECK(r.injective);
      CHECK(r.round_trip);
      CHECK(r.extends_by_t);
      CHECK(r.weight_ratio_exact);
      CHECK(r.holds);
    }
  }
}

TEST_CASE("encodings serialize for golden comparisons") {
  CnfFamily fam;
  fam.n = 3;
  fam.members.push_back(cnf_of(3, 3, {{1, 2, 3}}));
  Encoding enc = encode_bad(fam, Restriction::all_stars(3), 1, 3);
  // restriction string, colon, hex aux
  std::string s = enc.to_string();
  CHECK(s.substr(0, 4) == "000:");
  CHECK(s.size() > 4);
}
