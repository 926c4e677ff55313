#include "holab/transport.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <stdexcept>

namespace holab {

Scheme scheme_from_string(std::string_view s) {
  if (s == "rkmk4") return Scheme::rkmk4;
  if (s == "magnus4") return Scheme::magnus4;
  if (s == "cf4") return Scheme::cf4;
  throw std::domain_error("unknown integrator '" + std::string(s) + "'");
}

std::string_view scheme_name(Scheme s) {
  switch (s) {
    case Scheme::rkmk4: return "rkmk4";
    case Scheme::magnus4: return "magnus4";
    case Scheme::cf4: return "cf4";
  }
  return "?";
}

namespace {

// dexp^{-1}_sigma(a) truncated past the order the schemes need; sgn = -1 for
// the right-trivialized ODE, +1 for the left (transpose mirror).
Mat dexpinv(const Mat& sigma, const Mat& a, double sgn) {
  Mat c1 = comm(sigma, a);
  return a + sgn * 0.5 * c1 + (1.0 / 12.0) * comm(sigma, c1);
}

// One step of size h given the three Simpson stage values. The left update is
// the transpose mirror of the right one (commutator signs flip, the cf4
// factor order reverses), so the order conditions carry over.
void step(const CompactGroup& G, Scheme scheme, Side side, double h, const Mat& A1,
          const Mat& A2, const Mat& A3, Mat& g) {
  const double sgn = side == Side::right ? -1.0 : 1.0;
  switch (scheme) {
    case Scheme::rkmk4: {
      Mat k1 = A1;
      Mat k2 = dexpinv(0.5 * h * k1, A2, sgn);
      Mat k3 = dexpinv(0.5 * h * k2, A2, sgn);
      Mat k4 = dexpinv(h * k3, A3, sgn);
      Mat sigma = (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      g = side == Side::right ? Mat(exp_algebra(G, sigma) * g) : Mat(g * exp_algebra(G, sigma));
      break;
    }
    case Scheme::magnus4: {
      Mat omega = (h / 6.0) * (A1 + 4.0 * A2 + A3) + sgn * (h * h / 12.0) * comm(A1, A3);
      g = side == Side::right ? Mat(exp_algebra(G, omega) * g) : Mat(g * exp_algebra(G, omega));
      break;
    }
    case Scheme::cf4: {
      Mat x1 = (h / 12.0) * (-A1 + 4.0 * A2 + 3.0 * A3);
      Mat x2 = (h / 12.0) * (3.0 * A1 + 4.0 * A2 - A3);
      if (side == Side::right)
        g = exp_algebra(G, x1) * (exp_algebra(G, x2) * g);
      else
        g = (g * exp_algebra(G, x2)) * exp_algebra(G, x1);
      break;
    }
  }
}

Mat run_transport(const AlgebraLoop& u, Scheme scheme, GroupPath* path_out) {
  const CompactGroup& G = *u.group;
  if (u.N < 2 || u.N % 2 != 0) throw std::domain_error("transport needs an even grid, N >= 2");
  const int M = u.N / 2;
  const double h = 2.0 / u.N;
  if (path_out) {
    path_out->group = u.group;
    path_out->N = M;
    path_out->samples.assign(M + 1, eye(G.n()));
  }
  Mat g = eye(G.n());
  for (int j = 0; j < M; ++j) {
    step(G, scheme, Side::left, h, u.samples[2 * j], u.samples[2 * j + 1], u.samples[2 * j + 2],
         g);
    if (path_out) path_out->samples[j + 1] = g;
  }
  return g;
}

}  // namespace

TransportSolution solve_transport(const AlgebraLoop& u, Scheme scheme) {
  TransportSolution sol;
  sol.input = u;
  Mat end = run_transport(u, scheme, &sol.path);
  sol.endpoint = GroupElement{end, u.group};
  sol.integrator_id = std::string(scheme_name(scheme));
  sol.step_count = u.N / 2;
  double sup = 0.0;
  for (const Mat& a : u.samples) sup = std::max(sup, a.norm());
  sol.step_size_warning = sup / u.N > 1.0;
  return sol;
}

Mat transport_endpoint(const AlgebraLoop& u, Scheme scheme) {
  return run_transport(u, scheme, nullptr);
}

GroupPath integrate_frame(const std::function<Mat(double)>& A, const CompactGroup& G, int N,
                          Scheme scheme, Side side) {
  if (N < 1) throw std::domain_error("integrate_frame needs N >= 1");
  GroupPath p;
  p.group = &G;
  p.N = N;
  p.samples.assign(N + 1, eye(G.n()));
  const double h = 1.0 / N;
  Mat g = eye(G.n());
  Mat A3 = A(0.0);
  for (int j = 0; j < N; ++j) {
    Mat A1 = A3;
    Mat A2 = A((j + 0.5) * h);
    A3 = A((j + 1.0) * h);
    step(G, scheme, side, h, A1, A2, A3, g);
    p.samples[j + 1] = g;
  }
  return p;
}

double transport_residual(const TransportSolution& sol) {
  const AlgebraLoop& u = sol.input;
  const GroupPath& p = sol.path;
  const double hp = 2.0 / u.N;
  double worst = 0.0;
  for (int i = 1; i < p.N; ++i) {
    Mat fd = (p.samples[i + 1] - p.samples[i - 1]) / (2.0 * hp);
    worst = std::max(worst, (fd - p.samples[i] * u.samples[2 * i]).norm());
  }
  return worst;
}

double check_equivariance(const GroupPath& g, const AlgebraLoop& u, Scheme scheme) {
  AlgebraLoop gu = gauge_act(g, u);
  Mat lhs = transport_endpoint(gu, scheme);
  Mat rhs = g.samples.front() * transport_endpoint(u, scheme) * g.samples.back().adjoint();
  return fro_dist(lhs, rhs);
}

namespace {

Mat log_offset(const CompactGroup& G, const Mat& base_adj, const AlgebraLoop& u,
               const AlgebraLoop& dir, double eps, Scheme scheme) {
  AlgebraLoop shifted = loop_axpy(eps, dir, u);
  return log_element(G, base_adj * transport_endpoint(shifted, scheme));
}

}  // namespace

AlgebraVector differential_phi(const AlgebraLoop& u, const AlgebraLoop& direction, double eps,
                               Scheme scheme) {
  if (u.group != direction.group || u.N != direction.N)
    throw std::domain_error("differential_phi: loop grids differ");
  if (!(eps >= 1e-6 && eps <= 1e-3))
    throw std::domain_error("differential_phi: eps outside [1e-6, 1e-3]");
  const CompactGroup& G = *u.group;
  Mat base_adj = transport_endpoint(u, scheme).adjoint();
  Mat lp = log_offset(G, base_adj, u, direction, eps, scheme);
  Mat lm = log_offset(G, base_adj, u, direction, -eps, scheme);
  return AlgebraVector{G.project_algebra((lp - lm) / (2.0 * eps)), &G};
}

AlgebraVector differential_phi_rich(const AlgebraLoop& u, const AlgebraLoop& direction,
                                    double eps, Scheme scheme) {
  if (u.group != direction.group || u.N != direction.N)
    throw std::domain_error("differential_phi: loop grids differ");
  const CompactGroup& G = *u.group;
  Mat base_adj = transport_endpoint(u, scheme).adjoint();
  Mat l1p = log_offset(G, base_adj, u, direction, eps, scheme);
  Mat l1m = log_offset(G, base_adj, u, direction, -eps, scheme);
  Mat l2p = log_offset(G, base_adj, u, direction, 2.0 * eps, scheme);
  Mat l2m = log_offset(G, base_adj, u, direction, -2.0 * eps, scheme);
  Mat d = (8.0 * (l1p - l1m) - (l2p - l2m)) / (12.0 * eps);
  return AlgebraVector{G.project_algebra(d), &G};
}

Matd sampled_differential(const AlgebraLoop& u, const LoopBasis& basis, double eps,
                          Scheme scheme) {
  const CompactGroup& G = *u.group;
  Mat base_adj = transport_endpoint(u, scheme).adjoint();
  Matd J(G.dim(), basis.size());
  for (int j = 0; j < basis.size(); ++j) {
    const AlgebraLoop& dir = basis.loops[j];
    Mat l1p = log_offset(G, base_adj, u, dir, eps, scheme);
    Mat l1m = log_offset(G, base_adj, u, dir, -eps, scheme);
    Mat l2p = log_offset(G, base_adj, u, dir, 2.0 * eps, scheme);
    Mat l2m = log_offset(G, base_adj, u, dir, -2.0 * eps, scheme);
    Mat d = G.project_algebra((8.0 * (l1p - l1m) - (l2p - l2m)) / (12.0 * eps));
    J.col(j) = G.to_coords(d);
  }
  return J;
}

SubmersionReport check_riemannian_submersion(const AlgebraLoop& u, const LoopBasis& basis,
                                             double eps, Scheme scheme, const GroupPath* frame,
                                             int sample_count) {
  const CompactGroup& G = *u.group;
  const int D = basis.size();
  const int dg = G.dim();
  if (frame && (frame->group != u.group || frame->N != u.N))
    throw std::domain_error("submersion check: frame grid differs from loop grid");

  Matd J = sampled_differential(u, basis, eps, scheme);
  Eigen::JacobiSVD<Matd> svd(J, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double thresh = 1e-8 * sv(0);
  int rank = 0;
  while (rank < sv.size() && sv(rank) >= thresh) ++rank;

  SubmersionReport rep;
  rep.basis_size = D;
  rep.horizontal_dim = rank;
  rep.kernel_dim = D - rank;
  rep.sigma_min_kept = rank > 0 ? sv(rank - 1) : 0.0;
  rep.sigma_max_dropped = rank < sv.size() ? sv(rank) : 0.0;
  if (rank < dg)
    throw std::domain_error("submersion check: sampled differential is rank-deficient; "
                            "increase the mode truncation");

  const Matd& V = svd.matrixV();

  // Vertical test: each kernel vector, pulled back through the gauge frame,
  // must have zero loop mean.
  for (int j = rank; j < D; ++j) {
    AlgebraLoop w = basis.combine(V.col(j));
    Mat mean = Mat::Zero(G.n(), G.n());
    for (int i = 0; i < w.N; ++i) {
      Mat s = frame ? adjoint(G, frame->samples[i].adjoint().eval(), w.samples[i]) : w.samples[i];
      mean += s;
    }
    mean /= static_cast<double>(w.N);
    rep.kernel_residual = std::max(rep.kernel_residual, algebra_norm(G, G.project_algebra(mean)));
  }

  // Horizontal test: the differential restricted to the sigma-carrying right
  // singular vectors is an isometry onto the algebra.
  int hcount = rank;
  if (sample_count >= 0) hcount = std::min(hcount, sample_count);
  Matd JH = J * V.leftCols(hcount);
  for (int i = 0; i < hcount; ++i)
    for (int j = 0; j <= i; ++j) {
      double gij = JH.col(i).dot(JH.col(j));
      rep.isometry_residual =
          std::max(rep.isometry_residual, std::abs(gij - (i == j ? 1.0 : 0.0)));
    }
  return rep;
}

}  // namespace holab
