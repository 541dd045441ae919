#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rlab/cdt.hpp"
#include "rlab/dist.hpp"

namespace rlab {

// ---------------------------------------------------------------------------
// Circuits over the (selector grid, value vector) input space
// ---------------------------------------------------------------------------

/// Small AND/OR circuit with input literals at the bottom. Built by the
/// recognizer constructions below; depth stays <= 4.
class LayeredCircuit {
public:
  struct Gate {
    enum class Op : uint8_t { Const, Leaf, And, Or };
    Op op = Op::Const;
    bool value = false;    // Const
    int input = -1;        // Leaf
    bool negated = false;  // Leaf
    std::vector<int> kids;
  };

  explicit LayeredCircuit(int input_bits = 0) : input_bits_(input_bits) {}

  int make_const(bool value);
  int make_leaf(int input, bool negated);
  int make_and(std::vector<int> kids);
  int make_or(std::vector<int> kids);
  void set_root(int g) { root_ = g; }

  int input_bits() const { return input_bits_; }
  int root() const { return root_; }
  size_t gate_count() const { return gates_.size(); }
  const std::vector<Gate>& gates() const { return gates_; }

  bool eval(const BitVec& input) const;
  int depth() const;
  /// Max fan-in per level, root first (leaves and constants excluded).
  std::vector<size_t> fanin_sequence() const;
  std::vector<int> inputs_read() const;

  /// Structural negation by de Morgan: swaps AND/OR and negates leaves.
  LayeredCircuit negated() const;

private:
  int depth_below(int g) const;

  int input_bits_ = 0;
  int root_ = -1;
  std::vector<Gate> gates_;
};

// ---------------------------------------------------------------------------
// Recognizer constructions
// ---------------------------------------------------------------------------

/// Variables already pinned by earlier branch segments, var -> value.
using BranchContext = std::map<int, bool>;

/// CNF (AND of ORs) that accepts (selectors, values) exactly when eta is a
/// path of the canonical tree of f under rho(selectors, values) composed
/// with the context. eta's chunk structure is given; eta.full selects
/// whether the final chunk must be complete.
LayeredCircuit path_checker_cnf(const Cnf& f, const SegmentedPath& eta,
                                const BranchContext& context,
                                const BitstringRestrictionSpace& space);

/// AND-OR-AND circuit accepting exactly when the canonical tree of f under
/// rho(selectors, values) has depth at most l.
LayeredCircuit depth_checker(const Cnf& f, int l,
                             const BitstringRestrictionSpace& space);
LayeredCircuit depth_checker(const Cnf& f, int l, const BranchContext& context,
                             const BitstringRestrictionSpace& space);

/// OR-AND-OR circuit accepting exactly when that depth exceeds l ("deep").
LayeredCircuit depth_exceeds_circuit(const Cnf& f, int l, const BranchContext& context,
                                     const BitstringRestrictionSpace& space);

/// Circuit accepting exactly when the traversal describes a depth-t path of
/// the common-tree recursion on fam restricted by rho(selectors, values).
/// Matches traversal_occurs pointwise.
LayeredCircuit traversal_circuit(const CnfFamily& fam, const Traversal& p, int l,
                                 const BitstringRestrictionSpace& space);

struct BadEvalResult {
  bool bad = false;
  std::optional<Traversal> witness;
  uint64_t traversals_tried = 0;
};

/// Lazy OR over all traversals; never materializes the top disjunction.
BadEvalResult bad_restriction_eval(const CnfFamily& fam, int l, int t,
                                   const BitstringRestrictionSpace& space,
                                   const BitVec& input);

uint64_t count_satisfied_traversals(const CnfFamily& fam, int l, int t,
                                    const BitstringRestrictionSpace& space,
                                    const BitVec& input);

/// Batch evaluation over the whole input space (builds each traversal
/// circuit once). Input index i is the bit pattern of the combined string.
struct BadnessSweep {
  std::vector<uint8_t> bad;
  std::vector<uint64_t> counts;
  uint64_t traversal_total = 0;
};

BadnessSweep evaluate_all_inputs(const CnfFamily& fam, int l, int t,
                                 const BitstringRestrictionSpace& space);

/// Size/fan-in report for one traversal circuit.
struct CircuitShape {
  size_t gates = 0;
  int depth = 0;
  std::vector<size_t> fanin_sequence;
};

CircuitShape circuit_shape(const LayeredCircuit& c);

}  // namespace rlab
