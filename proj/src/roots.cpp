#include "holab/roots.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

namespace holab {

namespace {

// Canonical sign: first coordinate of meaningful size is positive.
void fix_sign(Vecd& c) {
  for (int i = 0; i < c.size(); ++i) {
    if (std::abs(c[i]) > 1e-8) {
      if (c[i] < 0) c = -c;
      return;
    }
  }
}

bool lex_less(const Vecd& a, const Vecd& b) {
  for (int i = 0; i < a.size(); ++i) {
    if (std::abs(a[i] - b[i]) > 1e-12) return a[i] < b[i];
  }
  return false;
}

}  // namespace

TorusDecomposition root_decomposition(const AlgebraVector& v) {
  const CompactGroup& G = *v.group;
  const int dim = G.dim(), rank = G.rank();

  for (int j = rank; j < dim; ++j)
    if (std::abs(inner(G, v.m, G.basis()[j])) > 1e-10)
      throw std::domain_error("root_decomposition: v not in the standard torus");

  Matd A = ad_matrix(v);
  Matd M = A.transpose() * A;  // = -ad(v)^2, symmetric PSD
  Eigen::SelfAdjointEigenSolver<Matd> es(M);
  Vecd mu = es.eigenvalues();  // ascending
  double mu_max = std::max(mu[dim - 1], 1e-30);
  double tol = 1e-8 * std::max(1.0, mu_max);

  // Cluster eigenvalues; the kernel cluster must be exactly the torus.
  std::vector<std::pair<int, int>> clusters;  // [begin, end)
  for (int i = 0; i < dim;) {
    int j = i + 1;
    while (j < dim && mu[j] - mu[j - 1] < tol) ++j;
    clusters.emplace_back(i, j);
    i = j;
  }
  if (mu[0] > tol || clusters.front().second != rank)
    throw degeneracy_error("root_decomposition: kernel of ad(v)^2 is not the torus; perturb v");

  TorusDecomposition dec;
  dec.group = &G;
  dec.v = v;
  for (int j = 0; j < rank; ++j) dec.torus_basis.push_back({G.basis()[j], &G});

  for (size_t ci = 1; ci < clusters.size(); ++ci) {
    auto [b, e] = clusters[ci];
    if (e - b != 2)
      throw degeneracy_error("root_decomposition: coinciding root values; perturb v");
    double alpha = std::sqrt(0.5 * (mu[b] + mu[b + 1]));
    Vecd ce = es.eigenvectors().col(b);
    fix_sign(ce);
    Vecd ck = (A * ce) / alpha;  // exact pair relation by construction
    RootDatum r;
    r.alpha_value = alpha;
    r.e = {G.from_coords(ce), &G};
    r.e_k = {G.from_coords(ck), &G};
    dec.roots.push_back(std::move(r));
  }

  std::sort(dec.roots.begin(), dec.roots.end(), [&](const RootDatum& a, const RootDatum& b) {
    if (std::abs(a.alpha_value - b.alpha_value) > 1e-12) return a.alpha_value > b.alpha_value;
    return lex_less(G.to_coords(a.e.m), G.to_coords(b.e.m));
  });
  return dec;
}

}  // namespace holab
