#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "rlab/bits.hpp"
#include "rlab/common.hpp"

namespace rlab {

// ---------------------------------------------------------------------------
// Restrictions
// ---------------------------------------------------------------------------

enum class Trit : uint8_t { Zero = 0, One = 1, Star = 2 };

/// A partial assignment in {0,1,*}^n. Immutable in spirit: operations return
/// new values. Coordinate 0 comes first in the text form.
class Restriction {
public:
  Restriction() = default;
  explicit Restriction(size_t n) : a_(n, Trit::Star) {}
  explicit Restriction(std::vector<Trit> a) : a_(std::move(a)) {}

  static Restriction all_stars(size_t n) { return Restriction(n); }
  static Restriction parse(const std::string& s);

  size_t n() const { return a_.size(); }
  Trit operator[](size_t i) const { return a_[i]; }

  bool is_star(size_t i) const { return a_[i] == Trit::Star; }
  bool bit(size_t i) const { return a_[i] == Trit::One; }

  Restriction with(size_t i, bool value) const {
    Restriction r = *this;
    r.a_[i] = value ? Trit::One : Trit::Zero;
    return r;
  }
  Restriction with_star(size_t i) const {
    Restriction r = *this;
    r.a_[i] = Trit::Star;
    return r;
  }
  void set(size_t i, Trit t) { a_[i] = t; }

  std::vector<int> support() const;
  std::vector<int> stars() const;
  size_t star_count() const;
  size_t fixed_count() const { return n() - star_count(); }

  /// Fills the stars from x (full assignment of length n).
  BitVec fill_with(const BitVec& x) const;

  /// True when x agrees with every fixed coordinate.
  bool consistent_with(const BitVec& x) const;

  std::string to_string() const;

  /// 2 bits per coordinate; requires n <= 32. Used as a memo key.
  uint64_t pack() const;

  bool operator==(const Restriction& o) const { return a_ == o.a_; }

private:
  std::vector<Trit> a_;
};

/// (rho rho')_i = rho_i when fixed, else rho'_i.
Restriction compose_restrictions(const Restriction& rho, const Restriction& rho2);

// ---------------------------------------------------------------------------
// CNF formulas
// ---------------------------------------------------------------------------

struct Literal {
  int var = 0;
  bool negated = false;

  bool satisfied_by(bool value) const { return value != negated; }
  /// The assignment that makes this literal false.
  bool falsifying_value() const { return negated; }
};

enum class ClauseStatus : uint8_t { Active, Satisfied, Falsified };

struct Clause {
  std::vector<Literal> literals;
  ClauseStatus status = ClauseStatus::Active;

  size_t width() const { return literals.size(); }
};

/// Ordered clause list. Clause order is semantically significant: the
/// canonical decision tree and the witness encoding both key off "the first
/// clause that is not satisfied", so restriction keeps satisfied clauses in
/// place (flagged) instead of deleting them.
struct Cnf {
  int n = 0;
  int k = 0;  // declared max width
  std::vector<Clause> clauses;

  size_t Q() const { return clauses.size(); }

  void validate() const;
  bool eval(const BitVec& x) const;
};

struct CnfFamily {
  int n = 0;
  std::vector<Cnf> members;

  size_t M() const { return members.size(); }
  int max_width() const;
  void validate() const;
};

Cnf restrict_cnf(const Cnf& f, const Restriction& rho);
CnfFamily restrict_family(const CnfFamily& fam, const Restriction& rho);

// ---------------------------------------------------------------------------
// F2 polynomials
// ---------------------------------------------------------------------------

/// Multilinear polynomial over GF(2), monomials as variable bit masks
/// (n <= 64). The empty monomial is the constant 1.
struct F2Polynomial {
  int n = 0;
  std::vector<uint64_t> monomials;  // sorted, duplicate-free

  size_t S() const { return monomials.size(); }
  int degree() const;

  void normalize();  // sort + cancel duplicate pairs mod 2
  bool eval(const BitVec& x) const;
};

F2Polynomial restrict_poly(const F2Polynomial& p, const Restriction& rho);

// ---------------------------------------------------------------------------
// Truth tables (exhaustive oracle substrate)
// ---------------------------------------------------------------------------

class TruthTable {
public:
  static constexpr int kMaxVars = 24;

  TruthTable() = default;
  explicit TruthTable(int n);

  int n() const { return n_; }
  size_t size() const { return size_t{1} << n_; }
  bool get(size_t i) const { return (w_[i >> 6] >> (i & 63)) & 1; }
  void set(size_t i, bool b);

  bool operator==(const TruthTable& o) const { return n_ == o.n_ && w_ == o.w_; }

private:
  int n_ = 0;
  std::vector<uint64_t> w_;
};

TruthTable truth_table(const Cnf& f);
TruthTable truth_table(const F2Polynomial& p);

/// Index -> assignment: coordinate 0 is the least significant bit.
inline BitVec input_of_index(uint64_t idx, int n) { return BitVec::from_u64(idx, n); }

// ---------------------------------------------------------------------------
// Text formats
// ---------------------------------------------------------------------------

/// Family file: `c ...` comments, a `family M n k` header, then for each
/// member a `cnf Q` line followed by Q lines of signed 1-indexed literals.
CnfFamily parse_family(std::istream& in);
void write_family(std::ostream& out, const CnfFamily& fam);

/// Polynomial file: `poly n S` header, then S lines of 1-indexed variable
/// indices (an empty line is the constant-1 monomial).
F2Polynomial parse_poly(std::istream& in);
void write_poly(std::ostream& out, const F2Polynomial& p);

}  // namespace rlab
