#pragma once

#include <cstdint>
#include <vector>

#include "rlab/common.hpp"

namespace rlab {

/// Reduction polynomial for GF(2^m) as the low-order mask: the modulus is
/// x^m + (bits of the mask). Entries follow the usual low-weight tables.
uint32_t gf2_modulus_low(int m);

/// Checks irreducibility of x^m + low over GF(2) (Ben-Or style probe over
/// factor degrees). Used by tests to certify the embedded modulus table.
bool gf2_poly_irreducible(int m, uint32_t low);

/// Arithmetic in GF(2^m), m <= 32. Elements are m-bit integers. For m <= 16
/// multiplication goes through log/antilog tables, otherwise shift-and-add.
class GF2m {
public:
  explicit GF2m(int m);

  int m() const { return m_; }
  uint64_t order() const { return uint64_t{1} << m_; }

  uint32_t add(uint32_t a, uint32_t b) const { return a ^ b; }
  uint32_t mul(uint32_t a, uint32_t b) const;
  uint32_t pow(uint32_t a, uint64_t e) const;

private:
  uint32_t mul_slow(uint32_t a, uint32_t b) const;

  int m_;
  uint32_t low_;
  std::vector<uint16_t> log_, exp_;  // populated for m <= 16
};

/// Shared per-m instance (table construction is not free in hot loops).
const GF2m& gf2_field(int m);

}  // namespace rlab
