#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rlab/cdt.hpp"
#include "rlab/fraction.hpp"

namespace rlab {

/// Image of one bad restriction under the witness-compression map: an
/// extension fixing exactly t more coordinates, plus the side information
/// a decoder needs to undo it.
struct Encoding {
  Restriction rho_prime;
  BitVec aux;
  int m_achieved = 0;
  Traversal witness;

  std::string to_string() const;  // "restriction:hex(aux)" for golden files
};

/// Field widths of the auxiliary string (shared by encoder and decoder).
struct AuxLayout {
  int len_bits = 0;   // per segment, stores length-1
  int idx_bits = 0;   // per segment, member index
  int pos_bits = 0;   // per record, literal position within the clause
  int record_bits() const { return pos_bits + 3; }  // + chunk-end, eta, pi
};

AuxLayout aux_layout(const CnfFamily& fam, int l);

/// Deterministic encoder. Precondition: the common-tree depth of fam|rho
/// reaches t. The witnessing path is chosen canonically (first witnessing
/// path in enumeration order, lexicographically least branch continuation),
/// and each chunk is re-fixed to the answers that falsify its clause, which
/// is what lets the decoder find the clause again.
Encoding encode_bad(const CnfFamily& fam, const Restriction& rho, int l, int t);

/// Inverse of encode_bad. Throws on malformed aux or on a hybrid that is
/// inconsistent with the family (corruption is not always detected).
Restriction decode(const CnfFamily& fam, const Restriction& rho_prime,
                   const BitVec& aux, int l, int t);

/// ccdt_reaches with an explicit starting restriction.
bool ccdt_reaches_under(const CnfFamily& fam, const Restriction& rho, int l, int t);

struct CountingReport {
  uint64_t bad_count = 0;
  bool injective = false;
  bool round_trip = false;
  bool extends_by_t = false;
  bool weight_ratio_exact = false;  // per-encoding weight identity
  int m_achieved_max = 0;
  double paper_m = 0.0;  // u*log2(M) + t*log2(k) + 3t at the worst witness
  Fraction weight_bad;
  Fraction bound;  // 2^m_max * (2p/(1-p))^t
  bool holds = false;
};

/// Exhaustive counting check over all 3^n restrictions; p = p_num/p_den.
CountingReport verify_counting_bound(const CnfFamily& fam, int l, int t,
                                     uint64_t p_num, uint64_t p_den);

}  // namespace rlab
