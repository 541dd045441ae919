#include <sstream>

#include "doctest.h"
#include "rlab/boolcore.hpp"
#include "rlab/corpus.hpp"
#include "rlab/rng.hpp"

using namespace rlab;

namespace {

Cnf cnf_of(int n, int k, std::vector<std::vector<int>> signed_clauses) {
  // 1-indexed signed literals, like the file format
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

}  // namespace

TEST_CASE("restrict_cnf follows the literal rules") {
  // (x0 or not x1) | [*,1] -> (x0), still active
  Cnf f = cnf_of(2, 2, {{1, -2}});
  Cnf r = restrict_cnf(f, Restriction::parse("*1"));
  CHECK(r.clauses[0].status == ClauseStatus::Active);
  REQUIRE(r.clauses[0].literals.size() == 1);
  CHECK(r.clauses[0].literals[0].var == 0);

  // (x0 or x1) | [1,*] -> satisfied, kept in place
  Cnf g = cnf_of(2, 2, {{1, 2}});
  Cnf rg = restrict_cnf(g, Restriction::parse("1*"));
  CHECK(rg.clauses[0].status == ClauseStatus::Satisfied);
  CHECK(rg.Q() == 1);

  // (x0) | [0] -> falsified, formula identically 0
  Cnf h = cnf_of(1, 1, {{1}});
  Cnf rh = restrict_cnf(h, Restriction::parse("0"));
  CHECK(rh.clauses[0].status == ClauseStatus::Falsified);
  CHECK_FALSE(rh.eval(BitVec::from_u64(0, 1)));

  CHECK_THROWS_AS(restrict_cnf(f, Restriction::parse("*")), Error);
}

TEST_CASE("restriction composition") {
  Restriction a = Restriction::parse("1**");
  Restriction b = Restriction::parse("00*");
  CHECK(compose_restrictions(a, b).to_string() == "10*");

  Restriction stars = Restriction::all_stars(3);
  CHECK(compose_restrictions(a, stars).to_string() == a.to_string());
  CHECK(compose_restrictions(stars, a).to_string() == a.to_string());

  // associativity, randomized
  SplitMix64 rng(7);
  for (int i = 0; i < 200; ++i) {
    auto rand_restriction = [&] {
      Restriction r(6);
      for (int j = 0; j < 6; ++j) {
        int d = static_cast<int>(rng.below(3));
        if (d < 2) r.set(j, d ? Trit::One : Trit::Zero);
      }
      return r;
    };
    Restriction x = rand_restriction(), y = rand_restriction(), z = rand_restriction();
    CHECK(compose_restrictions(compose_restrictions(x, y), z) ==
          compose_restrictions(x, compose_restrictions(y, z)));
  }
}

TEST_CASE("restrict_family is elementwise and order preserving") {
  CnfFamily empty;
  empty.n = 2;
  CHECK(restrict_family(empty, Restriction::all_stars(2)).M() == 0);

  CnfFamily fam;
  fam.n = 2;
  fam.members.push_back(cnf_of(2, 1, {{1}}));
  fam.members.push_back(cnf_of(2, 1, {{2}}));
  CnfFamily r = restrict_family(fam, Restriction::parse("1*"));
  CHECK(r.members[0].clauses[0].status == ClauseStatus::Satisfied);
  CHECK(r.members[1].clauses[0].status == ClauseStatus::Active);

  SplitMix64 rng(3);
  CnfFamily big = random_family(rng, 6, 2, 3, 3);
  CHECK(restrict_family(big, Restriction::parse("01****")).M() == 3);
}

TEST_CASE("restrict_poly cancels over F2") {
  F2Polynomial p;
  p.n = 2;
  p.monomials = {0b11, 0b10};  // x0 x1 + x1
  p.normalize();
  F2Polynomial r = restrict_poly(p, Restriction::parse("1*"));
  CHECK(r.S() == 0);  // x1 + x1 = 0

  F2Polynomial q;
  q.n = 2;
  q.monomials = {0b11};
  CHECK(restrict_poly(q, Restriction::all_stars(2)).monomials == q.monomials);

  F2Polynomial s;
  s.n = 3;
  s.monomials = {0b011, 0b100};  // x0 x1 + x2
  F2Polynomial rs = restrict_poly(s, Restriction::parse("0**"));
  REQUIRE(rs.S() == 1);
  CHECK(rs.monomials[0] == 0b100);
}

TEST_CASE("truth tables of basic objects") {
  Cnf empty;  // no clauses: constant 1
  empty.n = 2;
  empty.k = 1;
  TruthTable t = truth_table(empty);
  for (size_t i = 0; i < t.size(); ++i) CHECK(t.get(i));

  Cnf single = cnf_of(1, 1, {{1}});
  TruthTable ts = truth_table(single);
  CHECK_FALSE(ts.get(0));
  CHECK(ts.get(1));

  F2Polynomial parity;
  parity.n = 2;
  parity.monomials = {0b01, 0b10};
  TruthTable tp = truth_table(parity);
  CHECK_FALSE(tp.get(0));
  CHECK(tp.get(1));
  CHECK(tp.get(2));
  CHECK_FALSE(tp.get(3));

  CHECK_THROWS_AS(TruthTable(25), Error);
}

TEST_CASE("restriction commutes with evaluation") {
  SplitMix64 rng(11);
  for (int i = 0; i < 50; ++i) {
    int n = 4 + static_cast<int>(rng.below(5));
    Cnf f = random_kcnf(rng, n, 2, 4);
    Restriction rho(n);
    for (int j = 0; j < n; ++j) {
      int d = static_cast<int>(rng.below(3));
      if (d < 2) rho.set(j, d ? Trit::One : Trit::Zero);
    }
    Cnf g = restrict_cnf(f, rho);
    TruthTable tf = truth_table(f), tg = truth_table(g);
    for (uint64_t x = 0; x < tf.size(); ++x) {
      BitVec input = input_of_index(x, n);
      if (rho.consistent_with(input)) CHECK(tf.get(x) == tg.get(x));
    }
    // clause count and order preserved; active widths never increase
    REQUIRE(g.Q() == f.Q());
    for (size_t c = 0; c < f.Q(); ++c)
      if (g.clauses[c].status == ClauseStatus::Active)
        CHECK(g.clauses[c].literals.size() <= f.clauses[c].literals.size());
  }
}

TEST_CASE("poly restriction commutes with evaluation") {
  SplitMix64 rng(13);
  for (int i = 0; i < 50; ++i) {
    int n = 5;
    F2Polynomial p = random_poly(rng, n, 4, 3);
    Restriction rho(n);
    for (int j = 0; j < n; ++j) {
      int d = static_cast<int>(rng.below(3));
      if (d < 2) rho.set(j, d ? Trit::One : Trit::Zero);
    }
    F2Polynomial q = restrict_poly(p, rho);
    for (uint64_t x = 0; x < (uint64_t{1} << n); ++x) {
      BitVec input = input_of_index(x, n);
      BitVec filled = rho.fill_with(input);
      CHECK(q.eval(input) == p.eval(filled));
    }
  }
}

TEST_CASE("family file round trip") {
  std::string text =
      "c example corpus entry\n"
      "family 2 3 2\n"
      "cnf 2\n"
      "1 -2\n"
      "2 3\n"
      "\n"
      "cnf 1\n"
      "-1 3\n";
  std::istringstream in(text);
  CnfFamily fam = parse_family(in);
  CHECK(fam.M() == 2);
  CHECK(fam.n == 3);
  CHECK(fam.members[0].clauses[0].literals[1].negated);

  std::ostringstream out;
  write_family(out, fam);
  std::istringstream in2(out.str());
  CnfFamily fam2 = parse_family(in2);
  REQUIRE(fam2.M() == fam.M());
  for (size_t m = 0; m < fam.M(); ++m)
    CHECK(truth_table(fam.members[m]) == truth_table(fam2.members[m]));
}

TEST_CASE("poly file round trip") {
  std::string text =
      "poly 3 3\n"
      "1 2\n"
      "3\n"
      "\n";  // the empty line is the constant-1 monomial
  std::istringstream in(text);
  F2Polynomial p = parse_poly(in);
  CHECK(p.S() == 3);
  CHECK(p.eval(BitVec::from_u64(0, 3)) == true);  // constant term

  std::ostringstream out;
  write_poly(out, p);
  std::istringstream in2(out.str());
  F2Polynomial p2 = parse_poly(in2);
  CHECK(truth_table(p) == truth_table(p2));
}

TEST_CASE("restriction text form") {
  Restriction r = Restriction::parse("01*");
  CHECK(r.to_string() == "01*");
  CHECK(r.star_count() == 1);
  CHECK_THROWS_AS(Restriction::parse("01x"), Error);
}
