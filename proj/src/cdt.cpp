#include "rlab/cdt.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <unordered_map>

namespace rlab {

// --- paths -------------------------------------------------------------------

std::vector<int> PathAssignment::support() const {
  std::vector<int> out;
  out.reserve(entries.size());
  for (const PathEntry& e : entries) out.push_back(e.var);
  return out;
}

Restriction PathAssignment::as_restriction(int n) const {
  Restriction r(static_cast<size_t>(n));
  for (const PathEntry& e : entries) r.set(e.var, e.value ? Trit::One : Trit::Zero);
  return r;
}

bool PathAssignment::contains_var(int var) const {
  for (const PathEntry& e : entries)
    if (e.var == var) return true;
  return false;
}

size_t SegmentedPath::length() const {
  size_t s = 0;
  for (const Chunk& c : chunks) s += c.assignment.length();
  return s;
}

PathAssignment SegmentedPath::flat() const {
  PathAssignment out;
  for (const Chunk& c : chunks)
    out.entries.insert(out.entries.end(), c.assignment.entries.begin(),
                       c.assignment.entries.end());
  return out;
}

std::vector<PathAssignment> SegmentedPath::segments() const {
  std::vector<PathAssignment> out;
  out.reserve(chunks.size());
  for (const Chunk& c : chunks) out.push_back(c.assignment);
  return out;
}

// --- trees -------------------------------------------------------------------

int PartialDecisionTree::add_leaf(Leaf content) {
  leaves_.push_back(std::move(content));
  Node node;
  node.leaf = static_cast<int>(leaves_.size()) - 1;
  nodes_.push_back(node);
  return static_cast<int>(nodes_.size()) - 1;
}

int PartialDecisionTree::add_node(int var, int child0, int child1) {
  Node node;
  node.var = var;
  node.child0 = child0;
  node.child1 = child1;
  nodes_.push_back(node);
  return static_cast<int>(nodes_.size()) - 1;
}

int PartialDecisionTree::depth_below(int idx) const {
  const Node& node = nodes_[idx];
  if (node.var < 0) return 0;
  return 1 + std::max(depth_below(node.child0), depth_below(node.child1));
}

int PartialDecisionTree::depth() const {
  return root_ < 0 ? 0 : depth_below(root_);
}

bool PartialDecisionTree::eval(const BitVec& x) const {
  require(root_ >= 0, "tree: empty");
  int idx = root_;
  while (nodes_[idx].var >= 0) {
    // no variable repeats on a root-to-leaf path, so this terminates
    idx = x.get(nodes_[idx].var) ? nodes_[idx].child1 : nodes_[idx].child0;
  }
  const Leaf& leaf = leaves_[nodes_[idx].leaf];
  require(std::holds_alternative<bool>(leaf), "tree: eval needs constant leaves");
  return std::get<bool>(leaf);
}

std::vector<std::pair<Restriction, int>> PartialDecisionTree::leaf_paths(int n) const {
  std::vector<std::pair<Restriction, int>> out;
  if (root_ < 0) return out;
  std::vector<std::pair<int, Restriction>> stack{{root_, Restriction::all_stars(n)}};
  while (!stack.empty()) {
    auto [idx, rho] = stack.back();
    stack.pop_back();
    const Node& node = nodes_[idx];
    if (node.var < 0) {
      out.push_back({rho, node.leaf});
      continue;
    }
    stack.push_back({node.child1, rho.with(node.var, true)});
    stack.push_back({node.child0, rho.with(node.var, false)});
  }
  return out;
}

namespace {

void serialize_node(const PartialDecisionTree& tree, int idx, std::ostream& out) {
  const auto& node = tree.nodes()[idx];
  if (node.var < 0) {
    const auto& leaf = tree.leaves()[node.leaf];
    if (std::holds_alternative<bool>(leaf)) {
      out << (std::get<bool>(leaf) ? "1" : "0");
    } else if (std::holds_alternative<CnfFamily>(leaf)) {
      out << "(family " << std::get<CnfFamily>(leaf).M() << ")";
    } else {
      out << "(poly " << std::get<F2Polynomial>(leaf).S() << ")";
    }
    return;
  }
  out << "(x" << node.var << ' ';
  serialize_node(tree, node.child0, out);
  out << ' ';
  serialize_node(tree, node.child1, out);
  out << ')';
}

}  // namespace

std::string PartialDecisionTree::serialize() const {
  std::ostringstream out;
  if (root_ < 0)
    out << "()";
  else
    serialize_node(*this, root_, out);
  return out.str();
}

// --- canonical decision trees -------------------------------------------------

CdtStep cdt_step(const Cnf& f) {
  // Any falsified clause makes the whole formula the constant 0.
  for (size_t i = 0; i < f.clauses.size(); ++i) {
    const Clause& c = f.clauses[i];
    if (c.status == ClauseStatus::Falsified ||
        (c.status == ClauseStatus::Active && c.literals.empty()))
      return {CdtStep::Constant0, static_cast<int>(i), {}};
  }
  for (size_t i = 0; i < f.clauses.size(); ++i) {
    const Clause& c = f.clauses[i];
    if (c.status != ClauseStatus::Active) continue;
    CdtStep step;
    step.kind = CdtStep::Query;
    step.clause_index = static_cast<int>(i);
    for (const Literal& lit : c.literals) step.query_vars.push_back(lit.var);
    return step;
  }
  return {CdtStep::Constant1, -1, {}};
}

namespace {

Restriction chunk_restriction(int n, const std::vector<int>& vars, uint64_t bits) {
  Restriction r(static_cast<size_t>(n));
  for (size_t j = 0; j < vars.size(); ++j)
    r.set(vars[j], ((bits >> j) & 1) ? Trit::One : Trit::Zero);
  return r;
}

struct CdtBuilder {
  const int cap;
  PartialDecisionTree tree;
  bool exceeded = false;

  // Builds the subtree for f at the given depth; returns the node index.
  int build(const Cnf& f, int depth) {
    if (exceeded) return -1;
    CdtStep step = cdt_step(f);
    if (step.kind == CdtStep::Constant0) return tree.add_leaf(false);
    if (step.kind == CdtStep::Constant1) return tree.add_leaf(true);
    int kappa = static_cast<int>(step.query_vars.size());
    if (depth + kappa > cap) {
      exceeded = true;
      return -1;
    }
    return chunk(f, step.query_vars, 0, Restriction::all_stars(f.n), depth);
  }

  int chunk(const Cnf& f, const std::vector<int>& vars, size_t pos,
            const Restriction& partial, int depth) {
    if (exceeded) return -1;
    if (pos == vars.size())
      return build(restrict_cnf(f, partial),
                   depth + static_cast<int>(vars.size()));
    int c0 = chunk(f, vars, pos + 1, partial.with(vars[pos], false), depth);
    int c1 = chunk(f, vars, pos + 1, partial.with(vars[pos], true), depth);
    if (exceeded) return -1;
    return tree.add_node(vars[pos], c0, c1);
  }
};

}  // namespace

std::optional<PartialDecisionTree> cdt_build(const Cnf& f, int depth_cap) {
  require(depth_cap >= 0, "cdt_build: depth_cap >= 0");
  CdtBuilder builder{depth_cap};
  int root = builder.build(f, 0);
  if (builder.exceeded) return std::nullopt;
  builder.tree.set_root(root);
  return std::move(builder.tree);
}

bool cdt_depth_exceeds(const Cnf& f, int l) {
  CdtStep step = cdt_step(f);
  if (step.kind != CdtStep::Query) return false;
  int kappa = static_cast<int>(step.query_vars.size());
  if (kappa > l) return true;
  uint64_t total = uint64_t{1} << kappa;
  for (uint64_t bits = 0; bits < total; ++bits) {
    Cnf g = restrict_cnf(f, chunk_restriction(f.n, step.query_vars, bits));
    if (cdt_depth_exceeds(g, l - kappa)) return true;
  }
  return false;
}

int cdt_depth_capped(const Cnf& f, int cap) {
  CdtStep step = cdt_step(f);
  if (step.kind != CdtStep::Query) return 0;
  int kappa = static_cast<int>(step.query_vars.size());
  if (kappa > cap) return cap + 1;
  int best = 0;
  uint64_t total = uint64_t{1} << kappa;
  for (uint64_t bits = 0; bits < total; ++bits) {
    Cnf g = restrict_cnf(f, chunk_restriction(f.n, step.query_vars, bits));
    int sub = cdt_depth_capped(g, cap - kappa);
    if (sub > cap - kappa) return cap + 1;
    best = std::max(best, kappa + sub);
  }
  return best;
}

namespace {

void witness_dfs(const Cnf& f, int l, int k, SegmentedPath& prefix, int length,
                 std::vector<SegmentedPath>& out) {
  if (length >= l + 1) {
    // Every chunk boundary is the end of a full path.
    if (length <= l + k) {
      SegmentedPath path = prefix;
      path.full = true;
      out.push_back(std::move(path));
    }
    if (length >= l + k) return;  // deeper boundaries leave the window
  }
  CdtStep step = cdt_step(f);
  if (step.kind != CdtStep::Query) return;
  int kappa = static_cast<int>(step.query_vars.size());
  uint64_t total = uint64_t{1} << kappa;
  for (uint64_t bits = 0; bits < total; ++bits) {
    SegmentedPath::Chunk chunk;
    chunk.clause_index = step.clause_index;
    for (int j = 0; j < kappa; ++j)
      chunk.assignment.entries.push_back({step.query_vars[j], ((bits >> j) & 1) != 0});
    prefix.chunks.push_back(std::move(chunk));
    Cnf g = restrict_cnf(f, chunk_restriction(f.n, step.query_vars, bits));
    witness_dfs(g, l, k, prefix, length + kappa, out);
    prefix.chunks.pop_back();
  }
}

}  // namespace

std::vector<SegmentedPath> enumerate_witnessing_full_paths(const Cnf& f, int l) {
  require(cdt_depth_exceeds(f, l),
          "enumerate_witnessing_full_paths: tree depth does not exceed l");
  std::vector<SegmentedPath> out;
  SegmentedPath prefix;
  witness_dfs(f, l, f.k, prefix, 0, out);
  return out;
}

bool is_cdt_path(const Cnf& f, const PathAssignment& path, bool require_full) {
  Cnf cur = f;
  size_t pos = 0;
  for (;;) {
    CdtStep step = cdt_step(cur);
    if (step.kind != CdtStep::Query) return pos == path.length();
    if (pos == path.length()) return true;  // stopped at a chunk boundary
    size_t kappa = step.query_vars.size();
    size_t remaining = path.length() - pos;
    if (remaining < kappa) {
      if (require_full) return false;
      // Partial final chunk: must be a prefix of the query order.
      for (size_t j = 0; j < remaining; ++j)
        if (path.entries[pos + j].var != step.query_vars[j]) return false;
      return true;
    }
    Restriction r(static_cast<size_t>(cur.n));
    for (size_t j = 0; j < kappa; ++j) {
      if (path.entries[pos + j].var != step.query_vars[j]) return false;
      r.set(step.query_vars[j],
            path.entries[pos + j].value ? Trit::One : Trit::Zero);
    }
    cur = restrict_cnf(cur, r);
    pos += kappa;
  }
}

// --- common partial decision trees --------------------------------------------

namespace {

struct CcdtProbe {
  const CnfFamily& fam;
  int l;
  std::map<std::tuple<int, std::string, int>, bool> memo;

  bool reaches(int front, const Restriction& rho, int t) {
    if (t <= 0) return true;
    if (front == static_cast<int>(fam.M())) return false;
    auto key = std::make_tuple(front, rho.to_string(), t);
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    bool result = false;
    Cnf f = restrict_cnf(fam.members[front], rho);
    if (!cdt_depth_exceeds(f, l)) {
      result = reaches(front + 1, rho, t);
    } else {
      for (const SegmentedPath& eta : enumerate_witnessing_full_paths(f, l)) {
        int len = static_cast<int>(eta.length());
        if (len >= t) {
          result = true;
          break;
        }
        PathAssignment flat = eta.flat();
        uint64_t total = uint64_t{1} << len;
        for (uint64_t bits = 0; bits < total && !result; ++bits) {
          Restriction pi(rho.n());
          for (int j = 0; j < len; ++j)
            pi.set(flat.entries[j].var, ((bits >> j) & 1) ? Trit::One : Trit::Zero);
          result = reaches(front, compose_restrictions(rho, pi), t - len);
        }
        if (result) break;
      }
    }
    memo[key] = result;
    return result;
  }
};

}  // namespace

bool ccdt_reaches(const CnfFamily& fam, int l, int t) {
  fam.validate();
  require(t >= 0, "ccdt_reaches: t >= 0");
  CcdtProbe probe{fam, l, {}};
  return probe.reaches(0, Restriction::all_stars(fam.n), t);
}

CcdtDepth ccdt_depth(const CnfFamily& fam, int l, int cap) {
  if (ccdt_reaches(fam, l, cap + 1)) return {0, true};
  int lo = 0;
  for (int t = cap; t >= 1; --t) {
    if (ccdt_reaches(fam, l, t)) {
      lo = t;
      break;
    }
  }
  return {lo, false};
}

namespace {

struct CcdtBuilder {
  const CnfFamily& fam;
  int l;
  int cap;
  const std::function<size_t(size_t)>& chooser;
  PartialDecisionTree tree;

  int build(int front, const Restriction& rho, int depth) {
    require(depth <= cap, "ccdt_materialize: depth cap exceeded");
    if (front == static_cast<int>(fam.M()))
      return tree.add_leaf(restrict_family(fam, rho));
    Cnf f = restrict_cnf(fam.members[front], rho);
    if (!cdt_depth_exceeds(f, l)) return build(front + 1, rho, depth);
    auto paths = enumerate_witnessing_full_paths(f, l);
    size_t pick = chooser(paths.size());
    require(pick < paths.size(), "ccdt_materialize: chooser out of range");
    PathAssignment flat = paths[pick].flat();
    std::vector<int> vars;
    for (const PathEntry& e : flat.entries) vars.push_back(e.var);
    return block(front, rho, vars, 0, depth);
  }

  int block(int front, const Restriction& rho, const std::vector<int>& vars,
            size_t pos, int depth) {
    if (pos == vars.size()) return build(front, rho, depth);
    int c0 = block(front, rho.with(vars[pos], false), vars, pos + 1, depth + 1);
    int c1 = block(front, rho.with(vars[pos], true), vars, pos + 1, depth + 1);
    return tree.add_node(vars[pos], c0, c1);
  }
};

}  // namespace

PartialDecisionTree ccdt_materialize(const CnfFamily& fam, int l, int depth_cap,
                                     const std::function<size_t(size_t)>& chooser) {
  fam.validate();
  CcdtBuilder builder{fam, l, depth_cap, chooser, {}};
  int root = builder.build(0, Restriction::all_stars(fam.n), 0);
  builder.tree.set_root(root);
  return std::move(builder.tree);
}

// --- traversals ----------------------------------------------------------------

size_t Traversal::length() const {
  size_t s = 0;
  for (const Segment& seg : segments) s += seg.vars.size();
  return s;
}

void Traversal::validate(const CnfFamily& fam, int l, int t) const {
  size_t u = segments.size();
  if (t == 0) {
    require(u == 0, "traversal: t=0 must be empty");
    return;
  }
  require(u >= 1, "traversal: needs at least one segment");
  if (l >= 1)
    require(u <= static_cast<size_t>((t + l - 1) / l), "traversal: u exceeds ceil(t/l)");
  int k = fam.max_width();
  std::vector<bool> seen(fam.n, false);
  int prev_member = 0;
  size_t total = 0;
  for (size_t j = 0; j < u; ++j) {
    const Segment& seg = segments[j];
    require(seg.member >= 0 && seg.member < static_cast<int>(fam.M()),
            "traversal: member out of range");
    require(j == 0 || seg.member >= prev_member, "traversal: indices must be nondecreasing");
    prev_member = seg.member;
    require(!seg.vars.empty(), "traversal: empty segment");
    require(seg.pi.size() == seg.vars.size() && seg.eta.size() == seg.vars.size(),
            "traversal: assignment size mismatch");
    if (j + 1 < u)
      require(seg.vars.size() >= static_cast<size_t>(l + 1) &&
                  seg.vars.size() <= static_cast<size_t>(l + k),
              "traversal: full segment size outside [l+1, l+k]");
    for (size_t i = 0; i < seg.vars.size(); ++i) {
      int v = seg.vars[i];
      require(v >= 0 && v < fam.n, "traversal: variable out of range");
      require(i == 0 || seg.vars[i - 1] < v, "traversal: vars must be sorted");
      require(!seen[v], "traversal: overlapping segments");
      seen[v] = true;
    }
    total += seg.vars.size();
  }
  require(total == static_cast<size_t>(t), "traversal: sizes must sum to t");
}

std::string Traversal::to_string() const {
  std::ostringstream out;
  out << "[";
  for (size_t j = 0; j < segments.size(); ++j) {
    const Segment& seg = segments[j];
    if (j) out << " ";
    out << "F" << seg.member << ":";
    for (size_t i = 0; i < seg.vars.size(); ++i)
      out << "x" << seg.vars[i] << "(pi=" << int(seg.pi[i]) << ",eta=" << int(seg.eta[i])
          << ")";
  }
  out << "]";
  return out.str();
}

TraversalStream::TraversalStream(const CnfFamily& fam, int l, int t)
    : fam_(fam), l_(l), t_(t), k_(fam.max_width()) {
  require(t >= 0, "traversals: t >= 0");
  u_max_ = 0;
  if (t_ >= 1 && t_ <= fam_.n && fam_.M() >= 1) {
    u_max_ = l_ >= 1 ? static_cast<size_t>((t_ + l_ - 1) / l_)
                     : static_cast<size_t>(t_);
  }
  if (t_ == 0) return;
  start_shape();
}

void TraversalStream::start_shape() {
  // First shape: the fewest segments is u = 1 (a single remainder segment).
  sizes_ = {t_};
  if (u_max_ < 1) {
    done_ = true;
    return;
  }
  members_.assign(1, 0);
  if (!load_sets()) {
    if (!advance_shape()) done_ = true;
  }
}

// Shape = (segment sizes, member indices). Sizes for all but the last
// segment range over [l+1, l+k]; the last is the remainder and must be >= 1.
bool TraversalStream::advance_shape() {
  for (;;) {
    // advance members odometer (nondecreasing sequences)
    size_t u = sizes_.size();
    size_t j = u;
    while (j > 0) {
      --j;
      if (members_[j] + 1 < static_cast<int>(fam_.M())) {
        ++members_[j];
        for (size_t i = j + 1; i < u; ++i) members_[i] = members_[j];
        if (load_sets()) return true;
        j = u;  // continue advancing
        continue;
      }
    }
    // advance size composition for this u
    bool advanced = false;
    if (u >= 2) {
      size_t pos = u - 1;
      while (pos > 0) {
        --pos;
        if (sizes_[pos] + 1 <= l_ + k_) {
          ++sizes_[pos];
          for (size_t i = pos + 1; i + 1 < u; ++i) sizes_[i] = l_ + 1;
          int used = 0;
          for (size_t i = 0; i + 1 < u; ++i) used += sizes_[i];
          sizes_[u - 1] = t_ - used;
          if (sizes_[u - 1] >= 1) {
            advanced = true;
            break;
          }
          // remainder dead: keep advancing earlier positions
          pos = u - 1;
          continue;
        }
      }
    }
    if (!advanced) {
      // next u
      size_t u_next = u + 1;
      for (;;) {
        if (u_next > u_max_) return false;
        int used = static_cast<int>(u_next - 1) * (l_ + 1);
        if (t_ - used >= 1) break;
        ++u_next;
      }
      sizes_.assign(u_next, l_ + 1);
      int used = static_cast<int>(u_next - 1) * (l_ + 1);
      sizes_[u_next - 1] = t_ - used;
    }
    members_.assign(sizes_.size(), 0);
    if (load_sets()) return true;
  }
}

// Initializes the per-segment variable combinations to the first choice.
bool TraversalStream::load_sets() {
  size_t u = sizes_.size();
  set_choice_.assign(u, {});
  std::vector<bool> used(fam_.n, false);
  for (size_t j = 0; j < u; ++j) {
    int need = sizes_[j];
    std::vector<int>& pick = set_choice_[j];
    for (int v = 0; v < fam_.n && static_cast<int>(pick.size()) < need; ++v)
      if (!used[v]) {
        pick.push_back(v);
        used[v] = true;
      }
    if (static_cast<int>(pick.size()) < need) return false;
  }
  pi_bits_ = 0;
  eta_bits_ = 0;
  return true;
}

// Advances the ordered-disjoint-sets odometer from the last segment inward.
bool TraversalStream::advance_sets() {
  size_t u = sizes_.size();
  size_t j = u;
  while (j > 0) {
    --j;
    // pool for segment j: variables not used by segments < j
    std::vector<bool> used(fam_.n, false);
    for (size_t i = 0; i < j; ++i)
      for (int v : set_choice_[i]) used[v] = true;
    std::vector<int> pool;
    for (int v = 0; v < fam_.n; ++v)
      if (!used[v]) pool.push_back(v);
    // current combination as indices into pool
    std::vector<int> idx(set_choice_[j].size());
    for (size_t i = 0; i < idx.size(); ++i) {
      idx[i] = static_cast<int>(std::lower_bound(pool.begin(), pool.end(),
                                                 set_choice_[j][i]) -
                                pool.begin());
    }
    // next combination
    int m = static_cast<int>(pool.size());
    int r = static_cast<int>(idx.size());
    int pos = r - 1;
    while (pos >= 0 && idx[pos] == m - r + pos) --pos;
    if (pos >= 0) {
      ++idx[pos];
      for (int i = pos + 1; i < r; ++i) idx[i] = idx[i - 1] + 1;
      for (int i = 0; i < r; ++i) set_choice_[j][i] = pool[idx[i]];
      // reset deeper segments to first choices
      std::vector<bool> used2(fam_.n, false);
      for (size_t i = 0; i <= j; ++i)
        for (int v : set_choice_[i]) used2[v] = true;
      bool ok = true;
      for (size_t jj = j + 1; jj < u && ok; ++jj) {
        set_choice_[jj].clear();
        for (int v = 0; v < fam_.n &&
                        static_cast<int>(set_choice_[jj].size()) < sizes_[jj];
             ++v)
          if (!used2[v]) {
            set_choice_[jj].push_back(v);
            used2[v] = true;
          }
        if (static_cast<int>(set_choice_[jj].size()) < sizes_[jj]) ok = false;
      }
      if (!ok) continue;  // could not refill; try advancing this level again
      pi_bits_ = 0;
      eta_bits_ = 0;
      return true;
    }
  }
  return false;
}

std::optional<Traversal> TraversalStream::next() {
  if (t_ == 0) {
    if (emitted_empty_) return std::nullopt;
    emitted_empty_ = true;
    return Traversal{};
  }
  if (done_) return std::nullopt;
  if (!fresh_) {
    // advance: eta, then pi, then sets, then shape
    ++eta_bits_;
    if (eta_bits_ >> t_) {
      eta_bits_ = 0;
      ++pi_bits_;
      if (pi_bits_ >> t_) {
        pi_bits_ = 0;
        if (!advance_sets() && !advance_shape()) {
          done_ = true;
          return std::nullopt;
        }
      }
    }
  }
  fresh_ = false;
  Traversal p;
  size_t bit = 0;
  for (size_t j = 0; j < sizes_.size(); ++j) {
    Traversal::Segment seg;
    seg.member = members_[j];
    seg.vars = set_choice_[j];
    for (size_t i = 0; i < seg.vars.size(); ++i, ++bit) {
      seg.pi.push_back((pi_bits_ >> bit) & 1);
      seg.eta.push_back((eta_bits_ >> bit) & 1);
    }
    p.segments.push_back(std::move(seg));
  }
  return p;
}

uint64_t count_traversals(const CnfFamily& fam, int l, int t) {
  TraversalStream stream(fam, l, t);
  uint64_t count = 0;
  while (stream.next()) ++count;
  return count;
}

namespace {

uint64_t binom(uint64_t n, uint64_t k) {
  if (k > n) return 0;
  uint64_t r = 1;
  for (uint64_t i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
  return r;
}

}  // namespace

uint64_t count_traversals_closed_form(const CnfFamily& fam, int l, int t) {
  if (t == 0) return 1;
  int n = fam.n;
  size_t M = fam.M();
  if (t > n || M == 0) return 0;
  int k = fam.max_width();
  size_t u_max = l >= 1 ? static_cast<size_t>((t + l - 1) / l) : static_cast<size_t>(t);
  uint64_t total = 0;
  // enumerate size compositions recursively
  std::function<void(size_t, int, uint64_t)> rec = [&](size_t u_used, int remaining,
                                                       uint64_t ways_sets) {
    // close the composition with a final segment of size `remaining`
    if (remaining >= 1 && u_used + 1 <= u_max) {
      uint64_t sets = ways_sets * binom(static_cast<uint64_t>(remaining + /*pool*/ 0) +
                                            static_cast<uint64_t>(n - t + remaining) -
                                            remaining,
                                        remaining);
      // pool size for the last segment = n - (t - remaining)
      sets = ways_sets * binom(static_cast<uint64_t>(n - (t - remaining)), remaining);
      uint64_t members = binom(M + u_used, u_used + 1);  // nondecreasing sequences
      total += sets * members * (uint64_t{1} << t) * (uint64_t{1} << t);
    }
    // or add one more full segment
    for (int s = l + 1; s <= l + k; ++s) {
      if (remaining - s < 1) break;
      if (u_used + 2 > u_max) break;
      int consumed = t - remaining;
      uint64_t sets = ways_sets * binom(static_cast<uint64_t>(n - consumed), s);
      rec(u_used + 1, remaining - s, sets);
    }
  };
  rec(0, t, 1);
  return total;
}

// --- occurrence ----------------------------------------------------------------

namespace {

// Walks the canonical tree of f consuming the (set, answers) segment.
// require_full demands that the walk end exactly at a chunk boundary.
bool walk_segment(const Cnf& f, const std::vector<int>& vars,
                  const std::vector<uint8_t>& eta, bool require_full) {
  std::map<int, bool> remaining;
  for (size_t i = 0; i < vars.size(); ++i) remaining[vars[i]] = eta[i] != 0;
  Cnf cur = f;
  for (;;) {
    CdtStep step = cdt_step(cur);
    if (step.kind != CdtStep::Query) return remaining.empty();
    if (remaining.empty()) return true;  // boundary reached
    size_t kappa = step.query_vars.size();
    if (remaining.size() >= kappa) {
      Restriction r(static_cast<size_t>(cur.n));
      for (int v : step.query_vars) {
        auto it = remaining.find(v);
        if (it == remaining.end()) return false;
        r.set(v, it->second ? Trit::One : Trit::Zero);
        remaining.erase(it);
      }
      cur = restrict_cnf(cur, r);
      continue;
    }
    if (require_full) return false;
    // partial final chunk: must be the first |remaining| queried variables
    for (size_t j = 0; j < remaining.size(); ++j)
      if (!remaining.count(step.query_vars[j])) return false;
    return true;
  }
}

}  // namespace

bool traversal_occurs(const CnfFamily& fam, const Restriction& rho,
                      const Traversal& p, int l, int t) {
  p.validate(fam, l, t);
  if (t == 0) return true;
  int front = 0;
  Restriction cur = rho;
  for (size_t j = 0; j < p.u(); ++j) {
    const Traversal::Segment& seg = p.segments[j];
    // members passed over must be shallow at the current prefix
    for (int i = front; i < seg.member; ++i) {
      if (cdt_depth_exceeds(restrict_cnf(fam.members[i], cur), l)) return false;
    }
    Cnf f = restrict_cnf(fam.members[seg.member], cur);
    bool last = (j + 1 == p.u());
    if (!walk_segment(f, seg.vars, seg.eta, /*require_full=*/!last)) return false;
    if (last && static_cast<int>(seg.vars.size()) <= l && !cdt_depth_exceeds(f, l))
      return false;
    Restriction pi(cur.n());
    for (size_t i = 0; i < seg.vars.size(); ++i)
      pi.set(seg.vars[i], seg.pi[i] ? Trit::One : Trit::Zero);
    cur = compose_restrictions(cur, pi);
    front = seg.member;
  }
  return true;
}

}  // namespace rlab
