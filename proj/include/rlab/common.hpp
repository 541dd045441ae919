#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace rlab {

inline constexpr const char* kVersion = "0.1.0";

class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw Error(msg);
}

// Smallest b with 2^b >= x (x >= 1).
inline int ceil_log2(uint64_t x) {
  int b = 0;
  while ((uint64_t{1} << b) < x) ++b;
  return b;
}

// Bits needed to store values 0..x-1. Zero-width fields are legal (x <= 1).
inline int bits_for(uint64_t x) { return x <= 1 ? 0 : ceil_log2(x); }

}  // namespace rlab
