#include "holab/groups.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace holab {

namespace {

constexpr cplx I{0.0, 1.0};

Mat elem(int n, int r, int c, cplx v) {
  Mat m = Mat::Zero(n, n);
  m(r, c) = v;
  return m;
}

std::vector<Mat> su2_basis() {
  double s = 1.0 / (2.0 * std::sqrt(2.0));
  std::vector<Mat> b;
  b.push_back(s * (elem(2, 0, 0, I) + elem(2, 1, 1, -I)));  // torus
  b.push_back(s * (elem(2, 0, 1, 1) + elem(2, 1, 0, -1)));
  b.push_back(s * (elem(2, 0, 1, I) + elem(2, 1, 0, I)));
  return b;
}

std::vector<Mat> su3_basis() {
  double s = 1.0 / (2.0 * std::sqrt(3.0));
  std::vector<Mat> b;
  Mat t0 = Mat::Zero(3, 3);
  t0(0, 0) = I, t0(1, 1) = -I;
  b.push_back(s * t0);  // torus
  Mat t1 = Mat::Zero(3, 3);
  t1(0, 0) = I, t1(1, 1) = I, t1(2, 2) = -2.0 * I;
  b.push_back(t1 / 6.0);  // torus, orthogonal to t0
  for (int j = 0; j < 3; ++j)
    for (int k = j + 1; k < 3; ++k) {
      b.push_back(s * (elem(3, j, k, 1) + elem(3, k, j, -1)));
      b.push_back(s * (elem(3, j, k, I) + elem(3, k, j, I)));
    }
  return b;
}

std::vector<Mat> so3_basis() {
  double s = 1.0 / std::sqrt(2.0);
  std::vector<Mat> b;
  b.push_back(s * (elem(3, 0, 1, 1) + elem(3, 1, 0, -1)));  // torus
  b.push_back(s * (elem(3, 0, 2, 1) + elem(3, 2, 0, -1)));
  b.push_back(s * (elem(3, 1, 2, 1) + elem(3, 2, 1, -1)));
  return b;
}

double sinc(double t) { return std::abs(t) < 1e-8 ? 1.0 - t * t / 6.0 : std::sin(t) / t; }

}  // namespace

CompactGroup::CompactGroup(std::string id, int n, int dim, int rank, bool real, double kappa)
    : id_(std::move(id)), n_(n), dim_(dim), rank_(rank), real_(real), kappa_(kappa) {
  if (id_ == "su2") basis_ = su2_basis();
  else if (id_ == "su3") basis_ = su3_basis();
  else basis_ = so3_basis();

  // Cross-check the trace form against the Killing form via structure constants.
  std::vector<Matd> ad(dim_);
  for (int j = 0; j < dim_; ++j) {
    ad[j] = Matd::Zero(dim_, dim_);
    for (int k = 0; k < dim_; ++k) {
      Mat c = comm(basis_[j], basis_[k]);
      for (int i = 0; i < dim_; ++i) ad[j](i, k) = inner(*this, c, basis_[i]);
    }
  }
  for (int j = 0; j < dim_; ++j)
    for (int k = 0; k < dim_; ++k) {
      double killing = (ad[j] * ad[k]).trace();
      double res = std::abs(inner(*this, basis_[j], basis_[k]) + killing);
      killing_residual_ = std::max(killing_residual_, res);
    }
}

const CompactGroup& CompactGroup::of(std::string_view id) {
  static const CompactGroup su2{"su2", 2, 3, 1, false, 4.0};
  static const CompactGroup su3{"su3", 3, 8, 2, false, 6.0};
  static const CompactGroup so3{"so3", 3, 3, 1, true, 1.0};
  if (id == "su2") return su2;
  if (id == "su3") return su3;
  if (id == "so3") return so3;
  throw std::domain_error("unknown group id: " + std::string(id));
}

Mat CompactGroup::from_coords(const Vecd& c) const {
  Mat m = Mat::Zero(n_, n_);
  for (int j = 0; j < dim_; ++j) m += c[j] * basis_[j];
  return m;
}

Vecd CompactGroup::to_coords(const Mat& m) const {
  Vecd c(dim_);
  for (int j = 0; j < dim_; ++j) c[j] = inner(*this, m, basis_[j]);
  return c;
}

Mat CompactGroup::project_algebra(const Mat& m) const {
  Mat a = 0.5 * (m - m.adjoint());
  if (real_) a = a.real().cast<cplx>();
  else a -= (a.trace() / static_cast<double>(n_)) * eye(n_);
  return a;
}

bool CompactGroup::in_algebra(const Mat& m, double tol) const {
  return fro_dist(m, project_algebra(m)) <= tol;
}

bool CompactGroup::in_group(const Mat& g, double tol) const {
  if ((g.adjoint() * g - eye(n_)).norm() > tol) return false;
  if (std::abs(g.determinant() - cplx{1.0, 0.0}) > tol) return false;
  if (real_ && g.imag().norm() > tol) return false;
  return true;
}

double inner(const CompactGroup& G, const Mat& x, const Mat& y) {
  return -G.trace_scale() * (x * y).trace().real();
}

double inner(const AlgebraVector& x, const AlgebraVector& y) {
  if (x.group != y.group) throw std::domain_error("inner: mismatched groups");
  return inner(*x.group, x.m, y.m);
}

double algebra_norm(const CompactGroup& G, const Mat& x) {
  return std::sqrt(std::max(0.0, inner(G, x, x)));
}

Mat exp_algebra(const CompactGroup& G, const Mat& x) {
  if (G.id() == "su2") {
    // x^2 = -det(x) I with det(x) >= 0; closed-form rotation.
    double d = (x(0, 0) * x(1, 1) - x(0, 1) * x(1, 0)).real();
    double th = std::sqrt(std::max(0.0, d));
    return std::cos(th) * eye(2) + sinc(th) * x;
  }
  if (G.id() == "so3") {
    double w1 = x(2, 1).real(), w2 = x(0, 2).real(), w3 = x(1, 0).real();
    double th = std::sqrt(w1 * w1 + w2 * w2 + w3 * w3);
    double c2 = th < 1e-8 ? 0.5 - th * th / 24.0 : (1.0 - std::cos(th)) / (th * th);
    return eye(3) + sinc(th) * x + c2 * (x * x);
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(Mat(-I * x));
  Mat ph = Mat::Zero(G.n(), G.n());
  for (int j = 0; j < G.n(); ++j) ph(j, j) = std::exp(I * es.eigenvalues()[j]);
  return es.eigenvectors() * ph * es.eigenvectors().adjoint();
}

Mat log_element(const CompactGroup& G, const Mat& g) {
  int n = G.n();
  if (n == 2 || G.real_entries()) {
    Mat w = 0.5 * (g - g.adjoint());
    double s = w.norm() / std::sqrt(2.0);
    double c = n == 2 ? 0.5 * g.trace().real() : 0.5 * (g.trace().real() - 1.0);
    double th = std::atan2(s, c);
    if (th > M_PI - 1e-6) throw branch_error("log: rotation angle within 1e-6 of pi");
    Mat x = (s < 1e-12 ? 1.0 : th / s) * w;
    return G.project_algebra(x);
  }
  Eigen::ComplexSchur<Mat> cs(g);  // unitary => normal => T is diagonal
  Mat u = cs.matrixU();
  Vecd phi(n);
  for (int j = 0; j < n; ++j) {
    cplx lam = cs.matrixT()(j, j);
    phi[j] = std::arg(lam);
    if (M_PI - std::abs(phi[j]) < 1e-8) throw branch_error("log: eigenvalue at -1");
  }
  // det = 1 forces sum(phi) into {-2pi, 0, 2pi}; rewrap the extreme angle so the
  // result is traceless.
  double sum = phi.sum();
  if (std::abs(sum) > 1e-6) {
    int jmax = 0;
    for (int j = 1; j < n; ++j)
      if (std::abs(phi[j]) > std::abs(phi[jmax])) jmax = j;
    phi[jmax] -= (sum > 0 ? 2.0 : -2.0) * M_PI;
  }
  Mat d = Mat::Zero(n, n);
  for (int j = 0; j < n; ++j) d(j, j) = I * phi[j];
  return G.project_algebra(u * d * u.adjoint());
}

GroupElement exp_group(const AlgebraVector& x) {
  return {exp_algebra(*x.group, x.m), x.group};
}

AlgebraVector log_group(const GroupElement& g) {
  return {log_element(*g.group, g.m), g.group};
}

Mat adjoint(const CompactGroup&, const Mat& g, const Mat& x) {
  return g * x * g.adjoint();
}

AlgebraVector adjoint(const GroupElement& g, const AlgebraVector& x) {
  if (g.group != x.group) throw std::domain_error("adjoint: mismatched groups");
  return {adjoint(*g.group, g.m, x.m), x.group};
}

Matd ad_matrix(const AlgebraVector& v) {
  const CompactGroup& G = *v.group;
  Matd a(G.dim(), G.dim());
  for (int k = 0; k < G.dim(); ++k) {
    Mat c = comm(v.m, G.basis()[k]);
    for (int i = 0; i < G.dim(); ++i) a(i, k) = inner(G, c, G.basis()[i]);
  }
  return a;
}

Mat dexp_right(const Mat& x, const Mat& a) {
  Mat term = a;
  Mat acc = a;  // m = 0 term, 1/1!
  double fact = 1.0;
  for (int m = 1; m <= 32; ++m) {
    term = comm(x, term);
    fact *= m + 1;
    acc += term / fact;
  }
  return acc;
}

AlgebraVector random_algebra(const CompactGroup& G, Rng& rng, double scale) {
  Vecd c(G.dim());
  for (int j = 0; j < G.dim(); ++j) c[j] = scale * rng.normal();
  return {G.from_coords(c), &G};
}

AlgebraVector random_torus_vector(const CompactGroup& G, Rng& rng, double scale) {
  Vecd c = Vecd::Zero(G.dim());
  for (int j = 0; j < G.rank(); ++j) c[j] = scale * rng.normal();
  return {G.from_coords(c), &G};
}

GroupElement random_group_element(const CompactGroup& G, Rng& rng, double scale) {
  return exp_group(random_algebra(G, rng, scale));
}

}  // namespace holab
