#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "rlab/boolcore.hpp"

namespace rlab {

// ---------------------------------------------------------------------------
// Paths
// ---------------------------------------------------------------------------

struct PathEntry {
  int var = 0;
  bool value = false;
};

/// Ordered sequence of queried variables with their answers; the order is
/// the query order.
struct PathAssignment {
  std::vector<PathEntry> entries;

  size_t length() const { return entries.size(); }
  std::vector<int> support() const;
  Restriction as_restriction(int n) const;
  bool contains_var(int var) const;
};

/// A canonical-decision-tree path broken into its per-clause chunks. Chunk
/// h records the clause it queried and the (variable, answer) pairs, in
/// query order. All chunks except possibly the last are complete: they fix
/// every variable of their clause that survived the preceding prefix.
struct SegmentedPath {
  struct Chunk {
    int clause_index = 0;
    PathAssignment assignment;
  };
  std::vector<Chunk> chunks;
  /// True when the final chunk also fixed all surviving variables of its
  /// clause (every complete root-to-leaf path has this property).
  bool full = true;

  size_t length() const;
  PathAssignment flat() const;
  std::vector<PathAssignment> segments() const;
};

// ---------------------------------------------------------------------------
// Trees
// ---------------------------------------------------------------------------

/// Decision tree whose leaves carry either a constant or a residual function.
class PartialDecisionTree {
public:
  using Leaf = std::variant<bool, CnfFamily, F2Polynomial>;

  struct Node {
    int var = -1;        // -1 for leaves
    int child0 = -1, child1 = -1;
    int leaf = -1;       // index into leaves() when var == -1
  };

  int add_leaf(Leaf content);
  int add_node(int var, int child0, int child1);
  void set_root(int idx) { root_ = idx; }

  int root() const { return root_; }
  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<Leaf>& leaves() const { return leaves_; }

  int depth() const;
  bool eval(const BitVec& x) const;  // requires constant leaves
  /// Root-to-leaf paths as restrictions over n variables.
  std::vector<std::pair<Restriction, int>> leaf_paths(int n) const;

  std::string serialize() const;

private:
  int depth_below(int idx) const;

  std::vector<Node> nodes_;
  std::vector<Leaf> leaves_;
  int root_ = -1;
};

// ---------------------------------------------------------------------------
// Canonical decision trees
// ---------------------------------------------------------------------------

/// One step of the canonical-decision-tree walk on F (already restricted):
/// either the formula is a constant, or the first non-satisfied clause is
/// queried on its surviving variables in written literal order.
struct CdtStep {
  enum Kind { Constant0, Constant1, Query } kind;
  int clause_index = -1;
  std::vector<int> query_vars;  // surviving variables, clause literal order
};

CdtStep cdt_step(const Cnf& f);

/// Builds the canonical decision tree, failing when any path would exceed
/// depth_cap. Leaves are constants.
std::optional<PartialDecisionTree> cdt_build(const Cnf& f, int depth_cap);

/// depth(CDT(F)) > l, decided without materializing the tree.
bool cdt_depth_exceeds(const Cnf& f, int l);

/// Exact depth of CDT(F), capped: returns cap+1 when the depth exceeds cap.
int cdt_depth_capped(const Cnf& f, int cap);

/// All full paths of CDT(F) with length in [l+1, l+k], i.e. the witnessing
/// paths of "depth > l", in canonical DFS order (answer 0 before answer 1).
/// Precondition: cdt_depth_exceeds(f, l).
std::vector<SegmentedPath> enumerate_witnessing_full_paths(const Cnf& f, int l);

/// True when (vars, answers) = path is a path of CDT(F), walking chunks
/// against the clause order. require_full demands the final chunk complete.
bool is_cdt_path(const Cnf& f, const PathAssignment& path, bool require_full);

// ---------------------------------------------------------------------------
// Common partial decision trees
// ---------------------------------------------------------------------------

/// depth(CCDT_l(family)) >= t.
bool ccdt_reaches(const CnfFamily& fam, int l, int t);

struct CcdtDepth {
  int depth = 0;          // valid when !exceeds_cap
  bool exceeds_cap = false;
};

CcdtDepth ccdt_depth(const CnfFamily& fam, int l, int cap);

/// Materializes one tree from the common-tree recursion. The chooser picks
/// the witnessing path index at every branching point (0 = canonical first;
/// it receives the number of candidates). Leaves hold the residual family.
PartialDecisionTree ccdt_materialize(const CnfFamily& fam, int l, int depth_cap,
                                     const std::function<size_t(size_t)>& chooser);

// ---------------------------------------------------------------------------
// Traversals
// ---------------------------------------------------------------------------

/// The combinatorial witness of a depth-t path through a common tree:
/// nondecreasing member indices, disjoint query sets (given with the
/// tree-path answers pi and the witnessing-path answers eta, aligned with
/// the sorted set order).
struct Traversal {
  struct Segment {
    int member = 0;              // 0-based index into the family
    std::vector<int> vars;       // sorted
    std::vector<uint8_t> pi;     // branch answers, aligned with vars
    std::vector<uint8_t> eta;    // witnessing-path answers, aligned with vars
  };
  std::vector<Segment> segments;

  size_t u() const { return segments.size(); }
  size_t length() const;
  void validate(const CnfFamily& fam, int l, int t) const;
  std::string to_string() const;
};

/// Lazy stream over every valid traversal of length t; the count is
/// astronomical even at toy scale, so nothing is materialized.
class TraversalStream {
public:
  TraversalStream(const CnfFamily& fam, int l, int t);
  std::optional<Traversal> next();

private:
  void start_shape();
  bool advance_shape();
  bool load_sets();
  bool advance_sets();

  const CnfFamily& fam_;
  int l_, t_, k_;
  size_t u_max_;
  bool done_ = false;
  bool fresh_ = true;
  std::vector<int> sizes_;      // segment sizes; last is the remainder
  std::vector<int> members_;    // nondecreasing member indices
  std::vector<std::vector<int>> set_choice_;  // per-segment combination state
  uint64_t pi_bits_ = 0, eta_bits_ = 0;
  bool emitted_empty_ = false;
};

uint64_t count_traversals(const CnfFamily& fam, int l, int t);

/// Independent closed-form count (multinomial arithmetic) used to
/// cross-check the stream.
uint64_t count_traversals_closed_form(const CnfFamily& fam, int l, int t);

/// Does the traversal describe an actual depth-t path of the common-tree
/// recursion on fam|rho? Mirrors the bad-restriction circuit semantics.
bool traversal_occurs(const CnfFamily& fam, const Restriction& rho,
                      const Traversal& p, int l, int t);

}  // namespace rlab
