#include "rlab/corpus.hpp"

#include <algorithm>
#include <set>

namespace rlab {

Cnf random_kcnf(SplitMix64& rng, int n, int k, int Q) {
  require(k <= n, "random_kcnf: k <= n");
  Cnf f;
  f.n = n;
  f.k = k;
  for (int q = 0; q < Q; ++q) {
    Clause c;
    std::set<int> vars;
    while (static_cast<int>(vars.size()) < k)
      vars.insert(static_cast<int>(rng.below(static_cast<uint64_t>(n))));
    for (int v : vars) c.literals.push_back({v, rng.bit()});
    f.clauses.push_back(std::move(c));
  }
  f.validate();
  return f;
}

CnfFamily random_family(SplitMix64& rng, int n, int k, int Q, int M) {
  CnfFamily fam;
  fam.n = n;
  for (int m = 0; m < M; ++m) fam.members.push_back(random_kcnf(rng, n, k, Q));
  return fam;
}

F2Polynomial random_poly(SplitMix64& rng, int n, int S, int max_width) {
  require(n <= 64, "random_poly: n <= 64");
  F2Polynomial p;
  p.n = n;
  std::set<uint64_t> monomials;
  int guard = 0;
  while (static_cast<int>(monomials.size()) < S) {
    require(++guard < 100000, "random_poly: cannot place distinct monomials");
    int w = 1 + static_cast<int>(rng.below(static_cast<uint64_t>(max_width)));
    std::set<int> vars;
    while (static_cast<int>(vars.size()) < w)
      vars.insert(static_cast<int>(rng.below(static_cast<uint64_t>(n))));
    uint64_t mask = 0;
    for (int v : vars) mask |= uint64_t{1} << v;
    monomials.insert(mask);
  }
  p.monomials.assign(monomials.begin(), monomials.end());
  return p;
}

PartialDecisionTree random_poly_tree(SplitMix64& rng, int n, int t, int degree,
                                     int leaf_sparsity) {
  require(t <= n, "random_poly_tree: t <= n");
  std::vector<int> pool(n);
  for (int i = 0; i < n; ++i) pool[i] = i;
  for (int i = n - 1; i > 0; --i)
    std::swap(pool[i], pool[rng.below(static_cast<uint64_t>(i + 1))]);
  std::vector<int> query(pool.begin(), pool.begin() + t);
  std::vector<int> rest(pool.begin() + t, pool.end());

  PartialDecisionTree tree;
  // Build bottom-up: the complete tree over `query` with fresh leaves.
  std::function<int(size_t)> build = [&](size_t level) -> int {
    if (level == query.size()) {
      F2Polynomial poly;
      poly.n = n;
      int count = 1 + static_cast<int>(rng.below(
                          static_cast<uint64_t>(std::max(1, leaf_sparsity))));
      std::set<uint64_t> monomials;
      int guard = 0;
      while (static_cast<int>(monomials.size()) < count && ++guard < 1000) {
        int w = degree == 0 ? 0
                            : static_cast<int>(rng.below(
                                  static_cast<uint64_t>(degree) + 1));
        if (w > static_cast<int>(rest.size())) w = static_cast<int>(rest.size());
        std::set<int> vars;
        while (static_cast<int>(vars.size()) < w)
          vars.insert(rest[rng.below(rest.size())]);
        uint64_t mask = 0;
        for (int v : vars) mask |= uint64_t{1} << v;
        monomials.insert(mask);
      }
      poly.monomials.assign(monomials.begin(), monomials.end());
      return tree.add_leaf(poly);
    }
    int c0 = build(level + 1);
    int c1 = build(level + 1);
    return tree.add_node(query[level], c0, c1);
  };
  tree.set_root(build(0));
  return tree;
}

TruthTable tree_truth_table(const PartialDecisionTree& tree, int n) {
  TruthTable out(n);
  for (uint64_t idx = 0; idx < out.size(); ++idx) {
    BitVec x = input_of_index(idx, n);
    int node = tree.root();
    while (tree.nodes()[node].var >= 0)
      node = x.get(tree.nodes()[node].var) ? tree.nodes()[node].child1
                                           : tree.nodes()[node].child0;
    const auto& leaf = tree.leaves()[tree.nodes()[node].leaf];
    bool value;
    if (std::holds_alternative<bool>(leaf))
      value = std::get<bool>(leaf);
    else if (std::holds_alternative<F2Polynomial>(leaf))
      value = std::get<F2Polynomial>(leaf).eval(x);
    else
      throw Error("tree_truth_table: family leaves are not evaluable");
    out.set(idx, value);
  }
  return out;
}

}  // namespace rlab
