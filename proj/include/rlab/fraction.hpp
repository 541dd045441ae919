#pragma once

#include <cstdint>
#include <numeric>
#include <string>

#include "rlab/common.hpp"

namespace rlab {

/// Nonnegative exact rational on 128-bit words. Big enough for the
/// restriction-weight accounting done here (denominators are powers of
/// small numbers at toy scale); overflow is checked, not wrapped.
class Fraction {
public:
  using U = unsigned __int128;

  Fraction() : num_(0), den_(1) {}
  Fraction(uint64_t num, uint64_t den) : num_(num), den_(den) {
    require(den != 0, "Fraction: zero denominator");
    reduce();
  }

  static Fraction zero() { return Fraction(); }
  static Fraction one() { return Fraction(1, 1); }

  /// (num/den)^e
  static Fraction pow(uint64_t num, uint64_t den, unsigned e) {
    Fraction r = one();
    Fraction b(num, den);
    while (e) {
      if (e & 1) r = r * b;
      b = b * b;
      e >>= 1;
    }
    return r;
  }

  Fraction operator+(const Fraction& o) const {
    Fraction r;
    r.num_ = checked_add(checked_mul(num_, o.den_), checked_mul(o.num_, den_));
    r.den_ = checked_mul(den_, o.den_);
    r.reduce();
    return r;
  }

  Fraction operator*(const Fraction& o) const {
    Fraction r;
    r.num_ = checked_mul(num_, o.num_);
    r.den_ = checked_mul(den_, o.den_);
    r.reduce();
    return r;
  }

  bool operator<=(const Fraction& o) const {
    return checked_mul(num_, o.den_) <= checked_mul(o.num_, den_);
  }
  bool operator<(const Fraction& o) const {
    return checked_mul(num_, o.den_) < checked_mul(o.num_, den_);
  }
  bool operator==(const Fraction& o) const {
    return num_ == o.num_ && den_ == o.den_;
  }

  double to_double() const {
    return static_cast<double>(num_) / static_cast<double>(den_);
  }

  std::string to_string() const {
    return u128_str(num_) + "/" + u128_str(den_);
  }

private:
  static U checked_mul(U a, U b) {
    if (a != 0 && b > ~U{0} / a) throw Error("Fraction: overflow");
    return a * b;
  }
  static U checked_add(U a, U b) {
    if (b > ~U{0} - a) throw Error("Fraction: overflow");
    return a + b;
  }
  static U gcd128(U a, U b) {
    while (b) {
      U t = a % b;
      a = b;
      b = t;
    }
    return a;
  }
  static std::string u128_str(U x) {
    if (x == 0) return "0";
    std::string s;
    while (x) {
      s.insert(s.begin(), char('0' + int(x % 10)));
      x /= 10;
    }
    return s;
  }

  void reduce() {
    if (num_ == 0) {
      den_ = 1;
      return;
    }
    U g = gcd128(num_, den_);
    num_ /= g;
    den_ /= g;
  }

  U num_, den_;
};

}  // namespace rlab
