#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rlab/common.hpp"

namespace rlab {

/// Dynamic bit string. Bit 0 is the first coordinate.
class BitVec {
public:
  BitVec() = default;
  explicit BitVec(size_t n) : n_(n), w_((n + 63) / 64, 0) {}

  static BitVec from_u64(uint64_t value, size_t n) {
    BitVec v(n);
    for (size_t i = 0; i < n && i < 64; ++i) v.set(i, (value >> i) & 1);
    return v;
  }

  static BitVec from_string(const std::string& s) {
    BitVec v(s.size());
    for (size_t i = 0; i < s.size(); ++i) {
      require(s[i] == '0' || s[i] == '1', "BitVec: bad character");
      v.set(i, s[i] == '1');
    }
    return v;
  }

  size_t size() const { return n_; }

  bool get(size_t i) const { return (w_[i >> 6] >> (i & 63)) & 1; }

  void set(size_t i, bool b) {
    uint64_t mask = uint64_t{1} << (i & 63);
    if (b)
      w_[i >> 6] |= mask;
    else
      w_[i >> 6] &= ~mask;
  }

  void xor_in(const BitVec& other) {
    require(other.n_ == n_, "BitVec: length mismatch in xor");
    for (size_t i = 0; i < w_.size(); ++i) w_[i] ^= other.w_[i];
  }

  /// Parity of the AND with a mask of equal length.
  bool parity_with(const BitVec& mask) const {
    require(mask.n_ == n_, "BitVec: length mismatch in parity");
    uint64_t acc = 0;
    for (size_t i = 0; i < w_.size(); ++i) acc ^= w_[i] & mask.w_[i];
    return __builtin_parityll(acc);
  }

  uint64_t low_u64() const { return w_.empty() ? 0 : w_[0]; }

  /// Bits [off, off+len) as an integer, len <= 64.
  uint64_t read_u64(size_t off, int len) const {
    uint64_t out = 0;
    for (int i = 0; i < len; ++i) out |= uint64_t{get(off + i)} << i;
    return out;
  }

  void write_u64(size_t off, int len, uint64_t value) {
    for (int i = 0; i < len; ++i) set(off + i, (value >> i) & 1);
  }

  BitVec slice(size_t off, size_t len) const {
    BitVec out(len);
    for (size_t i = 0; i < len; ++i) out.set(i, get(off + i));
    return out;
  }

  std::string to_string() const {
    std::string s(n_, '0');
    for (size_t i = 0; i < n_; ++i)
      if (get(i)) s[i] = '1';
    return s;
  }

  std::string to_hex() const {
    static const char* digits = "0123456789abcdef";
    std::string s;
    for (size_t i = 0; i < n_; i += 4) {
      int nib = 0;
      for (size_t j = 0; j < 4 && i + j < n_; ++j) nib |= get(i + j) << j;
      s.push_back(digits[nib]);
    }
    return s;
  }

  static BitVec from_hex(const std::string& s, size_t n) {
    BitVec v(n);
    for (size_t i = 0; i < n; ++i) {
      char c = s.at(i / 4);
      int nib = (c <= '9') ? c - '0' : c - 'a' + 10;
      v.set(i, (nib >> (i % 4)) & 1);
    }
    return v;
  }

  bool operator==(const BitVec& o) const { return n_ == o.n_ && w_ == o.w_; }
  bool operator!=(const BitVec& o) const { return !(*this == o); }

  uint64_t hash() const {
    uint64_t h = 0x9e3779b97f4a7c15ull ^ n_;
    for (uint64_t x : w_) {
      h ^= x + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    }
    return h;
  }

private:
  size_t n_ = 0;
  std::vector<uint64_t> w_;
};

/// In-place Walsh-Hadamard transform of a length-2^n vector.
/// After the call v[S] = sum_x (-1)^{<S,x>} v0[x].
inline void walsh_hadamard(std::vector<double>& v) {
  size_t n = v.size();
  for (size_t len = 1; len < n; len <<= 1) {
    for (size_t i = 0; i < n; i += len << 1) {
      for (size_t j = i; j < i + len; ++j) {
        double a = v[j], b = v[j + len];
        v[j] = a + b;
        v[j + len] = a - b;
      }
    }
  }
}

}  // namespace rlab
