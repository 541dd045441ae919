#include "rlab/encdec.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace rlab {

std::string Encoding::to_string() const {
  return rho_prime.to_string() + ":" + aux.to_hex();
}

AuxLayout aux_layout(const CnfFamily& fam, int l) {
  AuxLayout layout;
  int k = fam.max_width();
  layout.len_bits = bits_for(static_cast<uint64_t>(l + k));
  layout.idx_bits = bits_for(fam.M());
  layout.pos_bits = bits_for(static_cast<uint64_t>(k));
  return layout;
}

namespace {

struct WitnessSegment {
  int member = 0;
  SegmentedPath eta;                  // chunk structure with walk answers
  std::vector<uint8_t> pi_bits;      // branch answers, walk order
};

// Deterministic witness search through the common-tree recursion: first
// witnessing path in enumeration order, lexicographically least branch
// continuation. The memo caches unreachable states.
struct WitnessSearch {
  const CnfFamily& fam;
  int l;
  std::map<std::tuple<int, std::string, int>, bool> dead;

  std::optional<std::vector<WitnessSegment>> find(int front, const Restriction& rho,
                                                  int budget) {
    if (budget <= 0) return std::vector<WitnessSegment>{};
    if (front == static_cast<int>(fam.M())) return std::nullopt;
    auto key = std::make_tuple(front, rho.to_string(), budget);
    if (dead.count(key)) return std::nullopt;
    Cnf f = restrict_cnf(fam.members[front], rho);
    if (!cdt_depth_exceeds(f, l)) {
      auto tail = find(front + 1, rho, budget);
      if (!tail) dead[key] = true;
      return tail;
    }
    for (const SegmentedPath& full_path : enumerate_witnessing_full_paths(f, l)) {
      int len = static_cast<int>(full_path.length());
      if (len >= budget) {
        // Truncate to exactly `budget` answers; the final chunk may end
        // mid-clause, in which case the segment is not full.
        WitnessSegment seg;
        seg.member = front;
        int take = budget;
        for (const auto& chunk : full_path.chunks) {
          if (take == 0) break;
          SegmentedPath::Chunk copy;
          copy.clause_index = chunk.clause_index;
          for (const PathEntry& e : chunk.assignment.entries) {
            if (take == 0) break;
            copy.assignment.entries.push_back(e);
            --take;
          }
          seg.eta.chunks.push_back(std::move(copy));
        }
        seg.eta.full = seg.eta.chunks.back().assignment.length() ==
                       full_path.chunks[seg.eta.chunks.size() - 1].assignment.length();
        seg.pi_bits.assign(static_cast<size_t>(budget), 0);  // lex least branch
        return std::vector<WitnessSegment>{std::move(seg)};
      }
      PathAssignment flat = full_path.flat();
      uint64_t total = uint64_t{1} << len;
      for (uint64_t bits = 0; bits < total; ++bits) {
        Restriction pi(rho.n());
        for (int j = 0; j < len; ++j)
          pi.set(flat.entries[j].var, ((bits >> j) & 1) ? Trit::One : Trit::Zero);
        auto tail = find(front, compose_restrictions(rho, pi), budget - len);
        if (tail) {
          WitnessSegment seg;
          seg.member = front;
          seg.eta = full_path;
          for (int j = 0; j < len; ++j)
            seg.pi_bits.push_back(static_cast<uint8_t>((bits >> j) & 1));
          tail->insert(tail->begin(), std::move(seg));
          return tail;
        }
      }
    }
    dead[key] = true;
    return std::nullopt;
  }
};

Traversal witness_to_traversal(const std::vector<WitnessSegment>& segments) {
  Traversal p;
  for (const WitnessSegment& ws : segments) {
    Traversal::Segment seg;
    seg.member = ws.member;
    PathAssignment flat = ws.eta.flat();
    std::vector<std::pair<int, std::pair<uint8_t, uint8_t>>> items;
    for (size_t i = 0; i < flat.entries.size(); ++i)
      items.push_back({flat.entries[i].var,
                       {static_cast<uint8_t>(flat.entries[i].value), ws.pi_bits[i]}});
    std::sort(items.begin(), items.end());
    for (const auto& [var, bits] : items) {
      seg.vars.push_back(var);
      seg.eta.push_back(bits.first);
      seg.pi.push_back(bits.second);
    }
    p.segments.push_back(std::move(seg));
  }
  return p;
}

}  // namespace

bool ccdt_reaches_under(const CnfFamily& fam, const Restriction& rho, int l, int t) {
  return ccdt_reaches(restrict_family(fam, rho), l, t);
}

Encoding encode_bad(const CnfFamily& fam, const Restriction& rho, int l, int t) {
  require(t >= 1, "encode_bad: t >= 1");
  WitnessSearch search{fam, l, {}};
  auto segments = search.find(0, rho, t);
  require(segments.has_value(), "encode_bad: restriction is not bad");

  AuxLayout layout = aux_layout(fam, l);
  size_t u = segments->size();
  int total_bits = static_cast<int>(u) * (layout.len_bits + layout.idx_bits) +
                   t * layout.record_bits();

  Encoding enc;
  enc.aux = BitVec(static_cast<size_t>(total_bits));
  enc.m_achieved = total_bits;
  enc.witness = witness_to_traversal(*segments);

  size_t off = 0;
  for (const WitnessSegment& ws : *segments) {
    enc.aux.write_u64(off, layout.len_bits, ws.eta.length() - 1);
    off += layout.len_bits;
  }
  for (const WitnessSegment& ws : *segments) {
    enc.aux.write_u64(off, layout.idx_bits, static_cast<uint64_t>(ws.member));
    off += layout.idx_bits;
  }

  Restriction rho_prime = rho;
  for (const WitnessSegment& ws : *segments) {
    const Cnf& member = fam.members[ws.member];
    size_t flat_index = 0;
    for (size_t h = 0; h < ws.eta.chunks.size(); ++h) {
      const auto& chunk = ws.eta.chunks[h];
      const Clause& clause = member.clauses[chunk.clause_index];
      for (size_t e = 0; e < chunk.assignment.entries.size(); ++e, ++flat_index) {
        const PathEntry& entry = chunk.assignment.entries[e];
        int pos = -1;
        for (size_t p = 0; p < clause.literals.size(); ++p)
          if (clause.literals[p].var == entry.var) pos = static_cast<int>(p);
        require(pos >= 0, "encode_bad: chunk variable missing from clause");
        bool chunk_end = (e + 1 == chunk.assignment.entries.size());
        enc.aux.write_u64(off, layout.pos_bits, static_cast<uint64_t>(pos));
        off += layout.pos_bits;
        enc.aux.set(off++, chunk_end);
        enc.aux.set(off++, entry.value);
        enc.aux.set(off++, ws.pi_bits[flat_index] != 0);
        // sigma: the answer falsifying this literal keeps the clause
        // unsatisfied, so the decoder can find it as "first not satisfied"
        rho_prime.set(entry.var, clause.literals[pos].falsifying_value()
                                     ? Trit::One
                                     : Trit::Zero);
      }
    }
  }
  require(off == enc.aux.size(), "encode_bad: aux layout mismatch");
  enc.rho_prime = std::move(rho_prime);
  return enc;
}

Restriction decode(const CnfFamily& fam, const Restriction& rho_prime,
                   const BitVec& aux, int l, int t) {
  AuxLayout layout = aux_layout(fam, l);
  int k = fam.max_width();

  // Segment lengths: read until they sum to t.
  size_t off = 0;
  std::vector<int> lengths;
  int total = 0;
  while (total < t) {
    require(off + layout.len_bits <= aux.size(), "decode: truncated length block");
    int len = static_cast<int>(aux.read_u64(off, layout.len_bits)) + 1;
    off += layout.len_bits;
    require(len >= 1 && len <= l + k, "decode: segment length out of range");
    lengths.push_back(len);
    total += len;
  }
  require(total == t, "decode: segment lengths do not sum to t");
  std::vector<int> members(lengths.size());
  for (size_t j = 0; j < lengths.size(); ++j) {
    require(off + layout.idx_bits <= aux.size(), "decode: truncated index block");
    members[j] = static_cast<int>(aux.read_u64(off, layout.idx_bits));
    require(members[j] < static_cast<int>(fam.M()), "decode: member index out of range");
    off += layout.idx_bits;
  }

  Restriction hybrid = rho_prime;
  std::vector<int> all_vars;
  for (size_t j = 0; j < lengths.size(); ++j) {
    const Cnf& member = fam.members[members[j]];
    std::vector<std::pair<int, bool>> segment_pi;
    int remaining = lengths[j];
    while (remaining > 0) {
      // locate the chunk clause: first clause not satisfied by the hybrid
      int clause_index = -1;
      for (size_t ci = 0; ci < member.Q(); ++ci) {
        const Clause& c = member.clauses[ci];
        bool satisfied = false;
        for (const Literal& lit : c.literals) {
          if (hybrid.is_star(lit.var)) continue;
          if (lit.satisfied_by(hybrid.bit(lit.var))) {
            satisfied = true;
            break;
          }
        }
        if (!satisfied) {
          clause_index = static_cast<int>(ci);
          break;
        }
      }
      require(clause_index >= 0, "decode: no unsatisfied clause (corrupt aux)");
      const Clause& clause = member.clauses[clause_index];
      bool chunk_end = false;
      while (!chunk_end) {
        require(remaining > 0, "decode: record overrun (corrupt aux)");
        require(off + layout.record_bits() <= aux.size(), "decode: truncated records");
        int pos = static_cast<int>(aux.read_u64(off, layout.pos_bits));
        off += layout.pos_bits;
        chunk_end = aux.get(off++);
        bool eta_bit = aux.get(off++);
        bool pi_bit = aux.get(off++);
        require(pos < static_cast<int>(clause.literals.size()),
                "decode: literal position out of range");
        const Literal& lit = clause.literals[pos];
        require(!hybrid.is_star(lit.var), "decode: expected fixed coordinate");
        require(hybrid.bit(lit.var) == lit.falsifying_value(),
                "decode: hybrid inconsistent with sigma rule");
        hybrid.set(lit.var, eta_bit ? Trit::One : Trit::Zero);
        segment_pi.push_back({lit.var, pi_bit});
        all_vars.push_back(lit.var);
        --remaining;
      }
    }
    for (const auto& [var, bit] : segment_pi)
      hybrid.set(var, bit ? Trit::One : Trit::Zero);
  }
  require(off == aux.size(), "decode: trailing aux bits");
  for (int var : all_vars) hybrid.set(var, Trit::Star);
  return hybrid;
}

CountingReport verify_counting_bound(const CnfFamily& fam, int l, int t,
                                     uint64_t p_num, uint64_t p_den) {
  require(fam.n <= 10, "verify_counting_bound: exhaustive sweep needs small n");
  require(p_num * 2 < p_den, "verify_counting_bound: needs p < 1/2");
  int n = fam.n;
  CountingReport report;
  report.injective = true;
  report.round_trip = true;
  report.extends_by_t = true;
  report.weight_ratio_exact = true;
  report.weight_bad = Fraction::zero();

  Fraction p(p_num, p_den);
  Fraction fix_weight(p_den - p_num, 2 * p_den);  // (1-p)/2 per fixed coord
  Fraction ratio(2 * p_num, p_den - p_num);       // 2p/(1-p)

  std::set<std::string> images;
  uint64_t total = 1;
  for (int i = 0; i < n; ++i) total *= 3;
  for (uint64_t code = 0; code < total; ++code) {
    uint64_t c = code;
    Restriction rho(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
      int digit = static_cast<int>(c % 3);
      c /= 3;
      if (digit < 2) rho.set(i, digit == 1 ? Trit::One : Trit::Zero);
    }
    if (!ccdt_reaches_under(fam, rho, l, t)) continue;
    ++report.bad_count;

    size_t stars = rho.star_count();
    Fraction weight = Fraction::pow(p_num, p_den, static_cast<unsigned>(stars)) *
                      Fraction::pow(p_den - p_num, 2 * p_den,
                                    static_cast<unsigned>(n - stars));
    report.weight_bad = report.weight_bad + weight;

    Encoding enc = encode_bad(fam, rho, l, t);
    report.m_achieved_max = std::max(report.m_achieved_max, enc.m_achieved);
    double paper_m =
        enc.witness.u() * std::log2(std::max<double>(fam.M(), 2)) +
        t * std::log2(std::max(fam.max_width(), 2)) + 3.0 * t;
    report.paper_m = std::max(report.paper_m, paper_m);

    if (!images.insert(enc.to_string()).second) report.injective = false;

    size_t extension = enc.rho_prime.fixed_count() - rho.fixed_count();
    bool supp_ok = extension == static_cast<size_t>(t);
    for (int i = 0; i < n && supp_ok; ++i)
      if (!rho.is_star(i) && (enc.rho_prime.is_star(i) || rho[i] != enc.rho_prime[i]))
        supp_ok = false;
    if (!supp_ok) report.extends_by_t = false;

    size_t stars_prime = enc.rho_prime.star_count();
    Fraction weight_prime =
        Fraction::pow(p_num, p_den, static_cast<unsigned>(stars_prime)) *
        Fraction::pow(p_den - p_num, 2 * p_den,
                      static_cast<unsigned>(n - stars_prime));
    if (!(weight == weight_prime * Fraction::pow(2 * p_num, p_den - p_num,
                                                 static_cast<unsigned>(t))))
      report.weight_ratio_exact = false;

    Restriction back = decode(fam, enc.rho_prime, enc.aux, l, t);
    if (!(back == rho)) report.round_trip = false;
  }

  report.bound = Fraction::pow(2, 1, static_cast<unsigned>(report.m_achieved_max)) *
                 Fraction::pow(2 * p_num, p_den - p_num, static_cast<unsigned>(t));
  report.holds = report.weight_bad <= report.bound;
  return report;
}

}  // namespace rlab
