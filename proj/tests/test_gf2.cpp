#include "doctest.h"
#include "rlab/gf2.hpp"

using namespace rlab;

TEST_CASE("embedded moduli are irreducible for every m") {
  for (int m = 1; m <= 32; ++m) {
    CAPTURE(m);
    CHECK(gf2_poly_irreducible(m, gf2_modulus_low(m)));
  }
}

TEST_CASE("field axioms on small fields") {
  for (int m : {1, 2, 3, 4, 8}) {
    const GF2m& f = gf2_field(m);
    uint64_t q = f.order();
    for (uint32_t a = 0; a < q; ++a) {
      CHECK(f.mul(a, 1) == a);
      CHECK(f.mul(a, 0) == 0);
      for (uint32_t b = 0; b < q; ++b) {
        CHECK(f.mul(a, b) == f.mul(b, a));
        if (a && b) CHECK(f.mul(a, b) != 0);  // no zero divisors
      }
    }
    // Fermat: a^(q-1) = 1 for nonzero a
    for (uint32_t a = 1; a < q; ++a) CHECK(f.pow(a, q - 1) == 1);
  }
}

TEST_CASE("table and shift-reduce multiplication agree") {
  // m = 17 exercises the slow path; compare against pow-based identities
  const GF2m& f = gf2_field(17);
  uint32_t x = 0x1ABCD & ((1u << 17) - 1);
  CHECK(f.mul(x, 1) == x);
  CHECK(f.mul(f.pow(x, 3), x) == f.pow(x, 4));
  CHECK(f.pow(x, f.order() - 1) == 1);
}
