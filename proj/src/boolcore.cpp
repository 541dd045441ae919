#include "rlab/boolcore.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>

namespace rlab {

// --- Restriction -----------------------------------------------------------

Restriction Restriction::parse(const std::string& s) {
  std::vector<Trit> a;
  a.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '0': a.push_back(Trit::Zero); break;
      case '1': a.push_back(Trit::One); break;
      case '*': a.push_back(Trit::Star); break;
      default: throw Error("Restriction: bad character in literal");
    }
  }
  return Restriction(std::move(a));
}

std::vector<int> Restriction::support() const {
  std::vector<int> out;
  for (size_t i = 0; i < a_.size(); ++i)
    if (a_[i] != Trit::Star) out.push_back(static_cast<int>(i));
  return out;
}

std::vector<int> Restriction::stars() const {
  std::vector<int> out;
  for (size_t i = 0; i < a_.size(); ++i)
    if (a_[i] == Trit::Star) out.push_back(static_cast<int>(i));
  return out;
}

size_t Restriction::star_count() const {
  size_t c = 0;
  for (Trit t : a_)
    if (t == Trit::Star) ++c;
  return c;
}

BitVec Restriction::fill_with(const BitVec& x) const {
  require(x.size() == n(), "Restriction: length mismatch in fill");
  BitVec out(n());
  for (size_t i = 0; i < n(); ++i)
    out.set(i, a_[i] == Trit::Star ? x.get(i) : a_[i] == Trit::One);
  return out;
}

bool Restriction::consistent_with(const BitVec& x) const {
  require(x.size() == n(), "Restriction: length mismatch");
  for (size_t i = 0; i < n(); ++i) {
    if (a_[i] == Trit::Star) continue;
    if (x.get(i) != (a_[i] == Trit::One)) return false;
  }
  return true;
}

std::string Restriction::to_string() const {
  std::string s;
  s.reserve(n());
  for (Trit t : a_)
    s.push_back(t == Trit::Star ? '*' : (t == Trit::One ? '1' : '0'));
  return s;
}

uint64_t Restriction::pack() const {
  require(n() <= 32, "Restriction: pack requires n <= 32");
  uint64_t key = 0;
  for (size_t i = 0; i < n(); ++i) key |= uint64_t(a_[i]) << (2 * i);
  return key;
}

Restriction compose_restrictions(const Restriction& rho, const Restriction& rho2) {
  require(rho.n() == rho2.n(), "compose_restrictions: length mismatch");
  std::vector<Trit> a(rho.n());
  for (size_t i = 0; i < rho.n(); ++i)
    a[i] = rho.is_star(i) ? rho2[i] : rho[i];
  return Restriction(std::move(a));
}

// --- CNF --------------------------------------------------------------------

void Cnf::validate() const {
  for (const Clause& c : clauses) {
    require(static_cast<int>(c.width()) <= k, "Cnf: clause wider than declared k");
    std::vector<int> vars;
    for (const Literal& lit : c.literals) {
      require(lit.var >= 0 && lit.var < n, "Cnf: variable out of range");
      vars.push_back(lit.var);
    }
    std::sort(vars.begin(), vars.end());
    require(std::adjacent_find(vars.begin(), vars.end()) == vars.end(),
            "Cnf: duplicate variable within a clause");
  }
}

bool Cnf::eval(const BitVec& x) const {
  require(static_cast<int>(x.size()) == n, "Cnf: eval length mismatch");
  for (const Clause& c : clauses) {
    if (c.status == ClauseStatus::Satisfied) continue;
    if (c.status == ClauseStatus::Falsified) return false;
    bool sat = false;
    for (const Literal& lit : c.literals)
      if (lit.satisfied_by(x.get(lit.var))) {
        sat = true;
        break;
      }
    if (!sat) return false;
  }
  return true;
}

int CnfFamily::max_width() const {
  int k = 0;
  for (const Cnf& f : members) k = std::max(k, f.k);
  return k;
}

void CnfFamily::validate() const {
  for (const Cnf& f : members) {
    require(f.n == n, "CnfFamily: members must share n");
    f.validate();
  }
}

Cnf restrict_cnf(const Cnf& f, const Restriction& rho) {
  require(static_cast<int>(rho.n()) == f.n, "restrict_cnf: length mismatch");
  Cnf out;
  out.n = f.n;
  out.k = f.k;
  out.clauses.reserve(f.clauses.size());
  for (const Clause& c : f.clauses) {
    Clause nc;
    nc.status = c.status;
    if (c.status != ClauseStatus::Active) {
      nc.literals = c.literals;
      out.clauses.push_back(std::move(nc));
      continue;
    }
    bool satisfied = false;
    for (const Literal& lit : c.literals) {
      if (rho.is_star(lit.var)) {
        nc.literals.push_back(lit);
      } else if (lit.satisfied_by(rho.bit(lit.var))) {
        satisfied = true;
      }
      // falsified literals are dropped
    }
    if (satisfied) {
      // Keep the clause in place so clause indices stay aligned.
      nc.status = ClauseStatus::Satisfied;
      nc.literals = c.literals;
    } else if (nc.literals.empty()) {
      nc.status = ClauseStatus::Falsified;
    }
    out.clauses.push_back(std::move(nc));
  }
  return out;
}

CnfFamily restrict_family(const CnfFamily& fam, const Restriction& rho) {
  require(static_cast<int>(rho.n()) == fam.n, "restrict_family: length mismatch");
  CnfFamily out;
  out.n = fam.n;
  out.members.reserve(fam.members.size());
  for (const Cnf& f : fam.members) out.members.push_back(restrict_cnf(f, rho));
  return out;
}

// --- F2 polynomials ---------------------------------------------------------

int F2Polynomial::degree() const {
  int d = 0;
  for (uint64_t m : monomials) d = std::max(d, __builtin_popcountll(m));
  return d;
}

void F2Polynomial::normalize() {
  std::sort(monomials.begin(), monomials.end());
  std::vector<uint64_t> out;
  for (size_t i = 0; i < monomials.size();) {
    size_t j = i;
    while (j < monomials.size() && monomials[j] == monomials[i]) ++j;
    if ((j - i) % 2 == 1) out.push_back(monomials[i]);
    i = j;
  }
  monomials = std::move(out);
}

bool F2Polynomial::eval(const BitVec& x) const {
  require(static_cast<int>(x.size()) == n, "F2Polynomial: eval length mismatch");
  uint64_t xm = 0;
  for (int i = 0; i < n && i < 64; ++i) xm |= uint64_t{x.get(i)} << i;
  bool acc = false;
  for (uint64_t m : monomials)
    if ((xm & m) == m) acc = !acc;
  return acc;
}

F2Polynomial restrict_poly(const F2Polynomial& p, const Restriction& rho) {
  require(static_cast<int>(rho.n()) == p.n, "restrict_poly: length mismatch");
  require(p.n <= 64, "F2Polynomial: n <= 64");
  uint64_t zero_mask = 0, one_mask = 0;
  for (int i = 0; i < p.n; ++i) {
    if (rho.is_star(i)) continue;
    if (rho.bit(i))
      one_mask |= uint64_t{1} << i;
    else
      zero_mask |= uint64_t{1} << i;
  }
  F2Polynomial out;
  out.n = p.n;
  for (uint64_t m : p.monomials) {
    if (m & zero_mask) continue;       // a 0-fixed variable kills the monomial
    out.monomials.push_back(m & ~one_mask);  // 1-fixed variables drop out
  }
  out.normalize();  // duplicates cancel in pairs over F2
  return out;
}

// --- Truth tables -----------------------------------------------------------

TruthTable::TruthTable(int n) : n_(n) {
  require(n >= 0 && n <= kMaxVars, "TruthTable: n exceeds the exhaustive cap");
  w_.assign((size() + 63) / 64, 0);
}

void TruthTable::set(size_t i, bool b) {
  uint64_t mask = uint64_t{1} << (i & 63);
  if (b)
    w_[i >> 6] |= mask;
  else
    w_[i >> 6] &= ~mask;
}

TruthTable truth_table(const Cnf& f) {
  TruthTable t(f.n);
  for (uint64_t i = 0; i < t.size(); ++i)
    t.set(i, f.eval(input_of_index(i, f.n)));
  return t;
}

TruthTable truth_table(const F2Polynomial& p) {
  TruthTable t(p.n);
  for (uint64_t i = 0; i < t.size(); ++i)
    t.set(i, p.eval(input_of_index(i, p.n)));
  return t;
}

// --- Text formats -----------------------------------------------------------

namespace {

std::string next_content_line(std::istream& in) {
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] == 'c') continue;
    size_t a = line.find_first_not_of(" \t\r");
    if (a == std::string::npos) continue;
    return line;
  }
  throw Error("format: unexpected end of input");
}

}  // namespace

CnfFamily parse_family(std::istream& in) {
  std::string header = next_content_line(in);
  std::istringstream hs(header);
  std::string tag;
  size_t M;
  int n, k;
  hs >> tag >> M >> n >> k;
  require(bool(hs) && tag == "family", "family file: bad header");
  CnfFamily fam;
  fam.n = n;
  for (size_t m = 0; m < M; ++m) {
    std::istringstream cs(next_content_line(in));
    size_t Q;
    cs >> tag >> Q;
    require(bool(cs) && tag == "cnf", "family file: bad cnf header");
    Cnf f;
    f.n = n;
    f.k = k;
    for (size_t q = 0; q < Q; ++q) {
      std::istringstream ls(next_content_line(in));
      Clause c;
      long lit;
      while (ls >> lit) {
        require(lit != 0, "family file: zero literal");
        int var = static_cast<int>(std::abs(lit)) - 1;
        c.literals.push_back({var, lit < 0});
      }
      f.clauses.push_back(std::move(c));
    }
    f.validate();
    fam.members.push_back(std::move(f));
  }
  fam.validate();
  return fam;
}

void write_family(std::ostream& out, const CnfFamily& fam) {
  out << "family " << fam.M() << ' ' << fam.n << ' ' << fam.max_width() << '\n';
  for (const Cnf& f : fam.members) {
    out << "cnf " << f.Q() << '\n';
    for (const Clause& c : f.clauses) {
      bool first = true;
      for (const Literal& lit : c.literals) {
        if (!first) out << ' ';
        out << (lit.negated ? -(lit.var + 1) : lit.var + 1);
        first = false;
      }
      out << '\n';
    }
    out << '\n';
  }
}

F2Polynomial parse_poly(std::istream& in) {
  std::string header = next_content_line(in);
  std::istringstream hs(header);
  std::string tag;
  int n;
  size_t S;
  hs >> tag >> n >> S;
  require(bool(hs) && tag == "poly", "poly file: bad header");
  require(n <= 64, "poly file: n <= 64");
  F2Polynomial p;
  p.n = n;
  std::string line;
  size_t got = 0;
  while (got < S && std::getline(in, line)) {
    if (!line.empty() && line[0] == 'c') continue;
    std::istringstream ls(line);
    uint64_t mask = 0;
    long v;
    while (ls >> v) {
      require(v >= 1 && v <= n, "poly file: variable out of range");
      mask |= uint64_t{1} << (v - 1);
    }
    p.monomials.push_back(mask);  // empty line = constant-1 monomial
    ++got;
  }
  require(got == S, "poly file: truncated");
  p.normalize();
  return p;
}

void write_poly(std::ostream& out, const F2Polynomial& p) {
  out << "poly " << p.n << ' ' << p.S() << '\n';
  for (uint64_t m : p.monomials) {
    bool first = true;
    for (int i = 0; i < p.n; ++i) {
      if ((m >> i) & 1) {
        if (!first) out << ' ';
        out << i + 1;
        first = false;
      }
    }
    out << '\n';
  }
}

}  // namespace rlab
