#pragma once

#include "rlab/cdt.hpp"
#include "rlab/rng.hpp"

namespace rlab {

/// Seeded test-instance generators. The lemmas come with no test
/// distributions of their own, so these corpora are part of the repo.

Cnf random_kcnf(SplitMix64& rng, int n, int k, int Q);
CnfFamily random_family(SplitMix64& rng, int n, int k, int Q, int M);
F2Polynomial random_poly(SplitMix64& rng, int n, int S, int max_width);

/// Complete depth-t tree over t distinct variables with random sparse
/// polynomials of degree at most `degree` at the leaves.
PartialDecisionTree random_poly_tree(SplitMix64& rng, int n, int t, int degree,
                                     int leaf_sparsity);

/// Truth table of a tree whose leaves are constants or polynomials.
TruthTable tree_truth_table(const PartialDecisionTree& tree, int n);

}  // namespace rlab
