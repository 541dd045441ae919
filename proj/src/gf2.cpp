#include "rlab/gf2.hpp"

#include <array>
#include <memory>
#include <mutex>
#include <utility>

namespace rlab {

namespace {

// Low-order masks of low-weight irreducible polynomials x^m + ... + 1,
// m = 1..32. Certified by gf2_poly_irreducible in the test suite.
constexpr uint32_t kModLow[33] = {
    0,
    0x1,   // m=1:  x + 1
    0x3,   // m=2:  x^2+x+1
    0x3,   // m=3:  x^3+x+1
    0x3,   // m=4:  x^4+x+1
    0x5,   // m=5:  x^5+x^2+1
    0x3,   // m=6
    0x3,   // m=7
    0x1b,  // m=8:  x^8+x^4+x^3+x+1
    0x3,   // m=9
    0x9,   // m=10: x^10+x^3+1
    0x5,   // m=11
    0x9,   // m=12
    0x1b,  // m=13
    0x21,  // m=14: x^14+x^5+1
    0x3,   // m=15
    0x2b,  // m=16: x^16+x^5+x^3+x+1
    0x9,   // m=17
    0x9,   // m=18
    0x27,  // m=19: x^19+x^5+x^2+x+1
    0x9,   // m=20
    0x5,   // m=21
    0x3,   // m=22
    0x21,  // m=23
    0x1b,  // m=24
    0x9,   // m=25
    0x1b,  // m=26
    0x27,  // m=27
    0x3,   // m=28
    0x5,   // m=29
    0x3,   // m=30
    0x9,   // m=31
    0x8d,  // m=32: x^32+x^7+x^3+x^2+1
};

// Polynomials over GF(2) as uint64 bit masks, degree <= 63.

int pdeg(uint64_t p) {
  if (p == 0) return -1;
  return 63 - __builtin_clzll(p);
}

uint64_t pmod(uint64_t a, uint64_t f) {
  int df = pdeg(f);
  while (pdeg(a) >= df) a ^= f << (pdeg(a) - df);
  return a;
}

uint64_t pmulmod(uint64_t a, uint64_t b, uint64_t f) {
  uint64_t r = 0;
  while (b) {
    if (b & 1) r ^= a;
    b >>= 1;
    a <<= 1;
    if (pdeg(a) >= pdeg(f)) a ^= f << (pdeg(a) - pdeg(f));
  }
  return pmod(r, f);
}

uint64_t pgcd(uint64_t a, uint64_t b) {
  while (b) {
    a = pmod(a, b);
    std::swap(a, b);
  }
  return a;
}

// x^(2^e) mod f by repeated squaring of x.
uint64_t frobenius(uint64_t f, int e) {
  uint64_t x = 2;  // the polynomial "x"
  for (int i = 0; i < e; ++i) x = pmulmod(x, x, f);
  return x;
}

}  // namespace

uint32_t gf2_modulus_low(int m) {
  require(m >= 1 && m <= 32, "GF(2^m): m out of supported range [1,32]");
  return kModLow[m];
}

bool gf2_poly_irreducible(int m, uint32_t low) {
  if (m > 32) return false;
  uint64_t f = (uint64_t{1} << m) | low;
  // x^(2^m) == x (mod f)
  if (frobenius(f, m) != 2) return false;
  // gcd(x^(2^(m/p)) - x, f) == 1 for every prime p | m
  for (int p = 2; p <= m; ++p) {
    if (m % p != 0) continue;
    bool prime = true;
    for (int d = 2; d * d <= p; ++d)
      if (p % d == 0) prime = false;
    if (!prime) continue;
    uint64_t g = pgcd(frobenius(f, m / p) ^ 2, f);
    if (g != 1) return false;
  }
  return true;
}

GF2m::GF2m(int m) : m_(m), low_(gf2_modulus_low(m)) {
  if (m_ <= 16) {
    // Discrete log tables over a generator; fall back to slow multiply to
    // find one (any primitive element works, search from 2).
    size_t q = size_t{1} << m_;
    exp_.assign(2 * q, 0);
    log_.assign(q, 0);
    uint32_t g = 2 % q;
    if (m_ == 1) g = 1;
    for (;; ++g) {
      uint32_t x = 1;
      size_t i = 0;
      bool ok = true;
      std::vector<bool> seen(q, false);
      for (; i < q - 1; ++i) {
        if (seen[x]) {
          ok = false;
          break;
        }
        seen[x] = true;
        exp_[i] = static_cast<uint16_t>(x);
        log_[x] = static_cast<uint16_t>(i);
        x = mul_slow(x, g);
      }
      if (ok && x == 1) break;
      require(g + 1 < q, "GF(2^m): no generator found");
    }
    for (size_t i = 0; i < q - 1; ++i) exp_[q - 1 + i] = exp_[i];
  }
}

uint32_t GF2m::mul_slow(uint32_t a, uint32_t b) const {
  uint64_t r = 0, aa = a;
  while (b) {
    if (b & 1) r ^= aa;
    b >>= 1;
    aa <<= 1;
    if (aa >> m_) aa ^= (uint64_t{1} << m_) | low_;
  }
  return static_cast<uint32_t>(r);
}

uint32_t GF2m::mul(uint32_t a, uint32_t b) const {
  if (a == 0 || b == 0) return 0;
  if (m_ <= 16) {
    return exp_[size_t{log_[a]} + log_[b]];  // exp table is doubled
  }
  return mul_slow(a, b);
}

uint32_t GF2m::pow(uint32_t a, uint64_t e) const {
  uint32_t r = 1;
  while (e) {
    if (e & 1) r = mul(r, a);
    a = mul(a, a);
    e >>= 1;
  }
  return r;
}

const GF2m& gf2_field(int m) {
  require(m >= 1 && m <= 32, "gf2_field: m out of range");
  static std::array<std::unique_ptr<GF2m>, 33> cache;
  static std::array<std::once_flag, 33> flags;
  std::call_once(flags[m], [m] { cache[m] = std::make_unique<GF2m>(m); });
  return *cache[m];
}

}  // namespace rlab
