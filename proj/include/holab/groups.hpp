#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "holab/linalg.hpp"
#include "holab/rng.hpp"

namespace holab {

// Taking the real log too close to the cut locus (a -1 eigenvalue).
struct branch_error : std::domain_error {
  using std::domain_error::domain_error;
};

// Torus vector with coinciding root values; callers should perturb and retry.
struct degeneracy_error : std::domain_error {
  using std::domain_error::domain_error;
};

class CompactGroup;

struct AlgebraVector {
  Mat m;
  const CompactGroup* group = nullptr;
};

struct GroupElement {
  Mat m;
  const CompactGroup* group = nullptr;
};

// One of the fixed groups su2, su3, so3. Instances are static; pointers are
// stable and comparable for identity.
class CompactGroup {
 public:
  static const CompactGroup& of(std::string_view id);

  const std::string& id() const { return id_; }
  int n() const { return n_; }
  int dim() const { return dim_; }
  int rank() const { return rank_; }
  bool real_entries() const { return real_; }

  // inner(x, y) = -trace_scale * Re tr(xy); equals minus the Killing form.
  double trace_scale() const { return kappa_; }

  // Orthonormal in inner(); torus vectors occupy indices 0..rank-1.
  const std::vector<Mat>& basis() const { return basis_; }

  Mat from_coords(const Vecd& c) const;
  Vecd to_coords(const Mat& m) const;

  // Nearest algebra element: anti-Hermitian (antisymmetric real for so),
  // traceless part.
  Mat project_algebra(const Mat& m) const;

  bool in_algebra(const Mat& m, double tol = 1e-12) const;
  bool in_group(const Mat& g, double tol = 1e-10) const;

  // max |inner - (-Killing)| over the basis, computed once at construction.
  double killing_residual() const { return killing_residual_; }

 private:
  CompactGroup(std::string id, int n, int dim, int rank, bool real, double kappa);

  std::string id_;
  int n_, dim_, rank_;
  bool real_;
  double kappa_;
  std::vector<Mat> basis_;
  double killing_residual_ = 0.0;
};

double inner(const CompactGroup& G, const Mat& x, const Mat& y);
double inner(const AlgebraVector& x, const AlgebraVector& y);
double algebra_norm(const CompactGroup& G, const Mat& x);
inline double algebra_norm(const AlgebraVector& x) { return algebra_norm(*x.group, x.m); }

Mat exp_algebra(const CompactGroup& G, const Mat& x);
Mat log_element(const CompactGroup& G, const Mat& g);

GroupElement exp_group(const AlgebraVector& x);
AlgebraVector log_group(const GroupElement& g);

// Ad(g)x = g x g^{-1}; unitarity makes the inverse an adjoint.
Mat adjoint(const CompactGroup& G, const Mat& g, const Mat& x);
AlgebraVector adjoint(const GroupElement& g, const AlgebraVector& x);

// Matrix of ad(v) in basis() coordinates; antisymmetric.
Matd ad_matrix(const AlgebraVector& v);

// Right-trivialized differential of exp: sum_m ad_x^m(a) / (m+1)!, so that
// (d/ds exp(x(s))) exp(x(s))^{-1} = dexp_right(x, dx/ds).
Mat dexp_right(const Mat& x, const Mat& a);

AlgebraVector random_algebra(const CompactGroup& G, Rng& rng, double scale = 1.0);
AlgebraVector random_torus_vector(const CompactGroup& G, Rng& rng, double scale = 1.0);
GroupElement random_group_element(const CompactGroup& G, Rng& rng, double scale = 1.0);

}  // namespace holab
