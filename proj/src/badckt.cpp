#include "rlab/badckt.hpp"

#include <algorithm>

namespace rlab {

// --- LayeredCircuit -----------------------------------------------------------

int LayeredCircuit::make_const(bool value) {
  Gate g;
  g.op = Gate::Op::Const;
  g.value = value;
  gates_.push_back(std::move(g));
  return static_cast<int>(gates_.size()) - 1;
}

int LayeredCircuit::make_leaf(int input, bool negated) {
  require(input >= 0 && input < input_bits_, "circuit: input out of range");
  Gate g;
  g.op = Gate::Op::Leaf;
  g.input = input;
  g.negated = negated;
  gates_.push_back(std::move(g));
  return static_cast<int>(gates_.size()) - 1;
}

int LayeredCircuit::make_and(std::vector<int> kids) {
  Gate g;
  g.op = Gate::Op::And;
  g.kids = std::move(kids);
  gates_.push_back(std::move(g));
  return static_cast<int>(gates_.size()) - 1;
}

int LayeredCircuit::make_or(std::vector<int> kids) {
  Gate g;
  g.op = Gate::Op::Or;
  g.kids = std::move(kids);
  gates_.push_back(std::move(g));
  return static_cast<int>(gates_.size()) - 1;
}

bool LayeredCircuit::eval(const BitVec& input) const {
  require(static_cast<int>(input.size()) == input_bits_, "circuit: input size mismatch");
  require(root_ >= 0, "circuit: empty");
  std::vector<uint8_t> value(gates_.size());
  for (size_t i = 0; i < gates_.size(); ++i) {
    const Gate& g = gates_[i];
    switch (g.op) {
      case Gate::Op::Const: value[i] = g.value; break;
      case Gate::Op::Leaf: value[i] = input.get(g.input) != g.negated; break;
      case Gate::Op::And: {
        uint8_t v = 1;
        for (int c : g.kids) v &= value[c];
        value[i] = v;
        break;
      }
      case Gate::Op::Or: {
        uint8_t v = 0;
        for (int c : g.kids) v |= value[c];
        value[i] = v;
        break;
      }
    }
  }
  return value[root_];
}

int LayeredCircuit::depth_below(int g) const {
  const Gate& gate = gates_[g];
  if (gate.op == Gate::Op::Const || gate.op == Gate::Op::Leaf) return 0;
  int d = 0;
  for (int c : gate.kids) d = std::max(d, depth_below(c));
  return 1 + d;
}

int LayeredCircuit::depth() const { return root_ < 0 ? 0 : depth_below(root_); }

std::vector<size_t> LayeredCircuit::fanin_sequence() const {
  std::vector<size_t> out;
  if (root_ < 0) return out;
  std::vector<int> level{root_};
  while (!level.empty()) {
    size_t max_fanin = 0;
    std::vector<int> next;
    for (int g : level) {
      const Gate& gate = gates_[g];
      if (gate.op == Gate::Op::And || gate.op == Gate::Op::Or) {
        max_fanin = std::max(max_fanin, gate.kids.size());
        for (int c : gate.kids) next.push_back(c);
      }
    }
    if (max_fanin == 0) break;
    out.push_back(max_fanin);
    level = std::move(next);
  }
  return out;
}

std::vector<int> LayeredCircuit::inputs_read() const {
  std::vector<bool> seen(input_bits_, false);
  for (const Gate& g : gates_)
    if (g.op == Gate::Op::Leaf) seen[g.input] = true;
  std::vector<int> out;
  for (int i = 0; i < input_bits_; ++i)
    if (seen[i]) out.push_back(i);
  return out;
}

LayeredCircuit LayeredCircuit::negated() const {
  LayeredCircuit out(input_bits_);
  for (const Gate& g : gates_) {
    Gate ng = g;
    switch (g.op) {
      case Gate::Op::Const: ng.value = !g.value; break;
      case Gate::Op::Leaf: ng.negated = !g.negated; break;
      case Gate::Op::And: ng.op = Gate::Op::Or; break;
      case Gate::Op::Or: ng.op = Gate::Op::And; break;
    }
    out.gates_.push_back(std::move(ng));
  }
  out.root_ = root_;
  return out;
}

CircuitShape circuit_shape(const LayeredCircuit& c) {
  return {c.gate_count(), c.depth(), c.fanin_sequence()};
}

// --- condition synthesis --------------------------------------------------------
//
// Each per-clause condition reads only the selector/value bits of the
// variables in that clause, so it can be synthesized as a CNF by sweeping
// the assignments of those bits (at most 2^(k(q+1)) rows).

namespace {

enum class LitState { Satisfied, Falsified, Alive };

struct ClauseCondition {
  std::vector<int> bits;                      // relevant input bit indices
  std::function<bool(const BitVec&)> accept;  // reads only those bits
};

// State of a literal under rho(selectors, values) composed with the pinned
// variables (branch context and consumed chunk answers).
LitState literal_state(const Literal& lit, const BitVec& input,
                       const BitstringRestrictionSpace& space,
                       const std::map<int, bool>& pinned) {
  bool star = true;
  for (int j = 0; j < space.q; ++j)
    if (!input.get(space.selector_bit(lit.var, j))) {
      star = false;
      break;
    }
  bool value;
  if (star) {
    auto it = pinned.find(lit.var);
    if (it == pinned.end()) return LitState::Alive;
    value = it->second;
  } else {
    value = input.get(space.value_bit(lit.var));
  }
  return lit.satisfied_by(value) ? LitState::Satisfied : LitState::Falsified;
}

std::vector<int> clause_bits(const Clause& clause, const BitstringRestrictionSpace& space) {
  std::vector<int> bits;
  for (const Literal& lit : clause.literals) {
    for (int j = 0; j < space.q; ++j) bits.push_back(space.selector_bit(lit.var, j));
    bits.push_back(space.value_bit(lit.var));
  }
  return bits;
}

// Appends the CNF clauses of one local condition to the circuit. Returns
// false when the condition is constantly false.
bool append_condition_cnf(LayeredCircuit& circuit, std::vector<int>& and_kids,
                          const ClauseCondition& condition) {
  size_t nbits = condition.bits.size();
  require(nbits <= 20, "recognizer: condition on too many bits");
  BitVec scratch(static_cast<size_t>(circuit.input_bits()));
  std::vector<uint64_t> falsifying;
  uint64_t rows = uint64_t{1} << nbits;
  for (uint64_t row = 0; row < rows; ++row) {
    for (size_t i = 0; i < nbits; ++i) scratch.set(condition.bits[i], (row >> i) & 1);
    if (!condition.accept(scratch)) falsifying.push_back(row);
  }
  if (falsifying.size() == rows) return false;
  for (uint64_t row : falsifying) {
    std::vector<int> lits;
    lits.reserve(nbits);
    for (size_t i = 0; i < nbits; ++i)
      lits.push_back(circuit.make_leaf(condition.bits[i], ((row >> i) & 1) != 0));
    and_kids.push_back(circuit.make_or(std::move(lits)));
  }
  return true;
}

// All per-clause conditions of "eta (with the given chunking) is a path of
// the canonical tree of f under rho(input) o context". Conditions are local
// to single clauses; `full` controls the final chunk.
struct PathConditions {
  std::vector<ClauseCondition> conditions;
  bool constant_false = false;
};

PathConditions path_conditions(const Cnf& f, const SegmentedPath& eta,
                               const BranchContext& context,
                               const BitstringRestrictionSpace& space) {
  PathConditions out;
  // Chunk variables must not collide with pinned branch variables.
  for (const auto& chunk : eta.chunks)
    for (const PathEntry& e : chunk.assignment.entries)
      if (context.count(e.var)) {
        out.constant_false = true;
        return out;
      }

  std::map<int, bool> pinned = context;  // grows chunk by chunk
  size_t h = 0;
  int prev_clause = -1;
  for (; h < eta.chunks.size(); ++h) {
    const auto& chunk = eta.chunks[h];
    int ci = chunk.clause_index;
    if (ci <= prev_clause || ci >= static_cast<int>(f.Q())) {
      out.constant_false = true;
      return out;
    }
    // Clauses passed over must be satisfied at this checkpoint.
    std::map<int, bool> at_checkpoint = pinned;
    for (int i = prev_clause + 1; i < ci; ++i) {
      const Clause& c = f.clauses[i];
      out.conditions.push_back(
          {clause_bits(c, space), [&f, i, at_checkpoint, &space](const BitVec& in) {
             for (const Literal& lit : f.clauses[i].literals)
               if (literal_state(lit, in, space, at_checkpoint) == LitState::Satisfied)
                 return true;
             return false;
           }});
    }
    const Clause& clause = f.clauses[ci];
    // Chunk variables must occur in the clause.
    std::vector<int> positions;
    std::map<int, bool> chunk_map;
    for (const PathEntry& e : chunk.assignment.entries) {
      int pos = -1;
      for (size_t p = 0; p < clause.literals.size(); ++p)
        if (clause.literals[p].var == e.var) pos = static_cast<int>(p);
      if (pos < 0) {
        out.constant_false = true;
        return out;
      }
      positions.push_back(pos);
      chunk_map[e.var] = e.value;
    }
    bool final_chunk = (h + 1 == eta.chunks.size());
    bool complete = !final_chunk || eta.full;
    if (!final_chunk) {
      // The walk continues past this chunk only when its answers satisfy
      // the clause; otherwise the formula is already the constant 0 here.
      bool satisfies = false;
      for (const PathEntry& e : chunk.assignment.entries)
        for (const Literal& lit : clause.literals)
          if (lit.var == e.var && lit.satisfied_by(e.value)) satisfies = true;
      if (!satisfies) {
        out.constant_false = true;
        return out;
      }
    }
    if (complete) {
      out.conditions.push_back(
          {clause_bits(clause, space),
           [&f, ci, at_checkpoint, chunk_map, &space](const BitVec& in) {
             for (const Literal& lit : f.clauses[ci].literals) {
               if (chunk_map.count(lit.var)) {
                 // queried variables must be alive
                 if (literal_state(lit, in, space, at_checkpoint) != LitState::Alive)
                   return false;
               } else if (literal_state(lit, in, space, at_checkpoint) !=
                          LitState::Falsified) {
                 return false;
               }
             }
             return true;
           }});
    } else {
      // Partial final chunk: the queried set is a prefix of the clause's
      // surviving variables in written literal order.
      int maxpos = *std::max_element(positions.begin(), positions.end());
      out.conditions.push_back(
          {clause_bits(clause, space),
           [&f, ci, at_checkpoint, chunk_map, maxpos, &space](const BitVec& in) {
             const Clause& c = f.clauses[ci];
             for (size_t p = 0; p < c.literals.size(); ++p) {
               const Literal& lit = c.literals[p];
               LitState st = literal_state(lit, in, space, at_checkpoint);
               if (chunk_map.count(lit.var)) {
                 if (st != LitState::Alive) return false;
               } else if (static_cast<int>(p) < maxpos) {
                 if (st != LitState::Falsified) return false;
               } else {
                 if (st == LitState::Satisfied) return false;
               }
             }
             return true;
           }});
    }
    for (const PathEntry& e : chunk.assignment.entries) pinned[e.var] = e.value;
    prev_clause = ci;
  }
  // Later clauses must not be falsified before the walk finishes: the
  // binding checkpoint is the one before the final chunk.
  std::map<int, bool> before_last = context;
  for (size_t hh = 0; hh + 1 < eta.chunks.size(); ++hh)
    for (const PathEntry& e : eta.chunks[hh].assignment.entries)
      before_last[e.var] = e.value;
  if (!eta.chunks.empty()) {
    for (int i = prev_clause + 1; i < static_cast<int>(f.Q()); ++i) {
      const Clause& c = f.clauses[i];
      out.conditions.push_back(
          {clause_bits(c, space), [&f, i, before_last, &space](const BitVec& in) {
             for (const Literal& lit : f.clauses[i].literals)
               if (literal_state(lit, in, space, before_last) != LitState::Falsified)
                 return true;
             return false;
           }});
    }
  }
  return out;
}

// Builds the path-checker CNF into an existing circuit; returns the gate
// (or a Const gate when degenerate).
int build_path_checker(LayeredCircuit& circuit, const Cnf& f, const SegmentedPath& eta,
                       const BranchContext& context,
                       const BitstringRestrictionSpace& space) {
  PathConditions pc = path_conditions(f, eta, context, space);
  if (pc.constant_false) return circuit.make_const(false);
  std::vector<int> and_kids;
  for (const ClauseCondition& cond : pc.conditions)
    if (!append_condition_cnf(circuit, and_kids, cond))
      return circuit.make_const(false);
  if (and_kids.empty()) return circuit.make_const(true);
  return circuit.make_and(std::move(and_kids));
}

// Enumerates the chunk structures consistent with a set-with-answers
// segment: ordered partitions into per-clause chunks with strictly
// increasing clause indices. Inner chunk answers must satisfy their clause
// (otherwise the walk cannot continue).
void enumerate_chunkings(const Cnf& f, const std::vector<int>& vars,
                         const std::vector<uint8_t>& answers, bool full,
                         const BranchContext& context, int min_clause,
                         SegmentedPath& prefix, std::vector<int> remaining,
                         std::vector<SegmentedPath>& out) {
  if (remaining.empty()) {
    SegmentedPath done = prefix;
    done.full = full;
    out.push_back(std::move(done));
    return;
  }
  auto answer_of = [&](int var) {
    for (size_t i = 0; i < vars.size(); ++i)
      if (vars[i] == var) return answers[i] != 0;
    throw Error("chunking: unknown var");
  };
  for (int ci = min_clause + 1; ci < static_cast<int>(f.Q()); ++ci) {
    const Clause& clause = f.clauses[ci];
    std::vector<int> avail;
    for (int v : remaining)
      for (const Literal& lit : clause.literals)
        if (lit.var == v) avail.push_back(v);
    if (avail.empty()) continue;
    uint64_t subsets = uint64_t{1} << avail.size();
    for (uint64_t mask = 1; mask < subsets; ++mask) {
      SegmentedPath::Chunk chunk;
      chunk.clause_index = ci;
      std::vector<int> next_remaining;
      for (int v : remaining) {
        bool in_chunk = false;
        for (size_t a = 0; a < avail.size(); ++a)
          if (((mask >> a) & 1) && avail[a] == v) in_chunk = true;
        if (!in_chunk) next_remaining.push_back(v);
      }
      // chunk entries in clause literal order (the canonical query order)
      for (const Literal& lit : clause.literals) {
        for (size_t a = 0; a < avail.size(); ++a)
          if (((mask >> a) & 1) && avail[a] == lit.var)
            chunk.assignment.entries.push_back({lit.var, answer_of(lit.var)});
      }
      bool final_chunk = next_remaining.empty();
      if (!final_chunk) {
        bool satisfies = false;
        for (const PathEntry& e : chunk.assignment.entries)
          for (const Literal& lit : clause.literals)
            if (lit.var == e.var && lit.satisfied_by(e.value)) satisfies = true;
        if (!satisfies) continue;
      }
      prefix.chunks.push_back(chunk);
      enumerate_chunkings(f, vars, answers, full, context, ci, prefix,
                          std::move(next_remaining), out);
      prefix.chunks.pop_back();
    }
  }
}

// OR over consistent chunkings of path-checker CNFs for one traversal
// segment (the chunk structure is input-dependent, so all consistent
// parses are offered and the CNF conditions pick the live one).
int build_segment_checker(LayeredCircuit& circuit, const Cnf& f,
                          const std::vector<int>& vars, const std::vector<uint8_t>& eta,
                          bool full, const BranchContext& context,
                          const BitstringRestrictionSpace& space) {
  for (int v : vars)
    if (context.count(v)) return circuit.make_const(false);
  std::vector<SegmentedPath> chunkings;
  SegmentedPath prefix;
  enumerate_chunkings(f, vars, eta, full, context, -1, prefix, vars, chunkings);
  std::vector<int> or_kids;
  for (const SegmentedPath& parse : chunkings) {
    int g = build_path_checker(circuit, f, parse, context, space);
    or_kids.push_back(g);
  }
  if (or_kids.empty()) return circuit.make_const(false);
  return circuit.make_or(std::move(or_kids));
}

// All length-(l+1) path candidates: chunk sequences with free answers.
void enumerate_depth_candidates(const Cnf& f, int need, int min_clause,
                                const BranchContext& context, SegmentedPath& prefix,
                                std::vector<SegmentedPath>& out) {
  if (need == 0) {
    SegmentedPath done = prefix;
    done.full = false;  // prefix semantics for the final chunk
    out.push_back(std::move(done));
    return;
  }
  for (int ci = min_clause + 1; ci < static_cast<int>(f.Q()); ++ci) {
    const Clause& clause = f.clauses[ci];
    std::vector<int> avail;
    for (const Literal& lit : clause.literals)
      if (!context.count(lit.var)) avail.push_back(lit.var);
    if (avail.empty()) continue;
    uint64_t subsets = uint64_t{1} << avail.size();
    for (uint64_t mask = 1; mask < subsets; ++mask) {
      std::vector<int> chunk_vars;
      for (size_t a = 0; a < avail.size(); ++a)
        if ((mask >> a) & 1) chunk_vars.push_back(avail[a]);
      if (static_cast<int>(chunk_vars.size()) > need) continue;
      uint64_t labelings = uint64_t{1} << chunk_vars.size();
      for (uint64_t bits = 0; bits < labelings; ++bits) {
        SegmentedPath::Chunk chunk;
        chunk.clause_index = ci;
        for (size_t a = 0; a < chunk_vars.size(); ++a)
          chunk.assignment.entries.push_back({chunk_vars[a], ((bits >> a) & 1) != 0});
        bool final_chunk = static_cast<int>(chunk_vars.size()) == need;
        if (!final_chunk) {
          bool satisfies = false;
          for (const PathEntry& e : chunk.assignment.entries)
            for (const Literal& lit : clause.literals)
              if (lit.var == e.var && lit.satisfied_by(e.value)) satisfies = true;
          if (!satisfies) continue;
        }
        prefix.chunks.push_back(chunk);
        enumerate_depth_candidates(f, need - static_cast<int>(chunk_vars.size()), ci,
                                   context, prefix, out);
        prefix.chunks.pop_back();
      }
    }
  }
}

int build_depth_exceeds(LayeredCircuit& circuit, const Cnf& f, int l,
                        const BranchContext& context,
                        const BitstringRestrictionSpace& space) {
  std::vector<SegmentedPath> candidates;
  SegmentedPath prefix;
  enumerate_depth_candidates(f, l + 1, -1, context, prefix, candidates);
  std::vector<int> or_kids;
  for (const SegmentedPath& eta : candidates)
    or_kids.push_back(build_path_checker(circuit, f, eta, context, space));
  if (or_kids.empty()) return circuit.make_const(false);
  return circuit.make_or(std::move(or_kids));
}

}  // namespace

// --- public constructions -------------------------------------------------------

LayeredCircuit path_checker_cnf(const Cnf& f, const SegmentedPath& eta,
                                const BranchContext& context,
                                const BitstringRestrictionSpace& space) {
  require(f.n == space.n, "path_checker: n mismatch");
  LayeredCircuit circuit(space.total_bits());
  circuit.set_root(build_path_checker(circuit, f, eta, context, space));
  return circuit;
}

LayeredCircuit depth_exceeds_circuit(const Cnf& f, int l, const BranchContext& context,
                                     const BitstringRestrictionSpace& space) {
  require(f.n == space.n, "depth_exceeds_circuit: n mismatch");
  LayeredCircuit circuit(space.total_bits());
  circuit.set_root(build_depth_exceeds(circuit, f, l, context, space));
  return circuit;
}

LayeredCircuit depth_checker(const Cnf& f, int l, const BranchContext& context,
                             const BitstringRestrictionSpace& space) {
  return depth_exceeds_circuit(f, l, context, space).negated();
}

LayeredCircuit depth_checker(const Cnf& f, int l,
                             const BitstringRestrictionSpace& space) {
  return depth_checker(f, l, BranchContext{}, space);
}

LayeredCircuit traversal_circuit(const CnfFamily& fam, const Traversal& p, int l,
                                 const BitstringRestrictionSpace& space) {
  require(fam.n == space.n, "traversal_circuit: n mismatch");
  p.validate(fam, l, static_cast<int>(p.length()));
  LayeredCircuit circuit(space.total_bits());
  if (p.u() == 0) {
    circuit.set_root(circuit.make_const(true));
    return circuit;
  }
  std::vector<int> blocks;
  BranchContext context;
  int front = 0;
  for (size_t j = 0; j < p.u(); ++j) {
    const Traversal::Segment& seg = p.segments[j];
    // members passed over must be shallow at the current prefix
    for (int i = front; i < seg.member; ++i) {
      LayeredCircuit shallow = depth_checker(fam.members[i], l, context, space);
      blocks.push_back(merge_into(circuit, shallow));
    }
    const Cnf& f = fam.members[seg.member];
    bool last = (j + 1 == p.u());
    blocks.push_back(
        build_segment_checker(circuit, f, seg.vars, seg.eta, !last, context, space));
    if (last && static_cast<int>(seg.vars.size()) <= l)
      blocks.push_back(build_depth_exceeds(circuit, f, l, context, space));
    for (size_t i = 0; i < seg.vars.size(); ++i) context[seg.vars[i]] = seg.pi[i] != 0;
    front = seg.member;
  }
  circuit.set_root(circuit.make_and(std::move(blocks)));
  return circuit;
}

BadEvalResult bad_restriction_eval(const CnfFamily& fam, int l, int t,
                                   const BitstringRestrictionSpace& space,
                                   const BitVec& input) {
  BadEvalResult result;
  TraversalStream stream(fam, l, t);
  while (auto p = stream.next()) {
    ++result.traversals_tried;
    LayeredCircuit c = traversal_circuit(fam, *p, l, space);
    if (c.eval(input)) {
      result.bad = true;
      result.witness = std::move(*p);
      return result;
    }
  }
  return result;
}

uint64_t count_satisfied_traversals(const CnfFamily& fam, int l, int t,
                                    const BitstringRestrictionSpace& space,
                                    const BitVec& input) {
  uint64_t count = 0;
  TraversalStream stream(fam, l, t);
  while (auto p = stream.next()) {
    LayeredCircuit c = traversal_circuit(fam, *p, l, space);
    if (c.eval(input)) ++count;
  }
  return count;
}

BadnessSweep evaluate_all_inputs(const CnfFamily& fam, int l, int t,
                                 const BitstringRestrictionSpace& space) {
  int bits = space.total_bits();
  require(bits <= 24, "evaluate_all_inputs: input space too large");
  size_t total = size_t{1} << bits;
  BadnessSweep sweep;
  sweep.bad.assign(total, 0);
  sweep.counts.assign(total, 0);
  TraversalStream stream(fam, l, t);
  while (auto p = stream.next()) {
    ++sweep.traversal_total;
    LayeredCircuit c = traversal_circuit(fam, *p, l, space);
    for (size_t idx = 0; idx < total; ++idx) {
      if (c.eval(BitVec::from_u64(idx, bits))) {
        sweep.bad[idx] = 1;
        ++sweep.counts[idx];
      }
    }
  }
  return sweep;
}

}  // namespace rlab
