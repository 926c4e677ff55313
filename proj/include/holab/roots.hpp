#pragma once

#include <vector>

#include "holab/groups.hpp"

namespace holab {

// Pair (e, e_k) with ad(v)e = alpha e_k, ad(v)e_k = -alpha e.
struct RootDatum {
  double alpha_value = 0.0;
  AlgebraVector e;
  AlgebraVector e_k;
  int multiplicity_index = 1;
};

struct TorusDecomposition {
  const CompactGroup* group = nullptr;
  AlgebraVector v;
  std::vector<AlgebraVector> torus_basis;
  std::vector<RootDatum> roots;  // positive roots, alpha descending
  // Kernel of ad(v)^2 beyond the torus; empty in the group realization.
  std::vector<AlgebraVector> zero_space_basis;
};

// v must lie in the standard maximal torus and be generic (distinct positive
// root values); otherwise degeneracy_error.
TorusDecomposition root_decomposition(const AlgebraVector& v);

}  // namespace holab
