#pragma once

#include <functional>

#include "holab/loops.hpp"

namespace holab {

enum class Scheme { rkmk4, magnus4, cf4 };

// Side of the trivialized ODE: left means g' = g A(t), right means g' = A(t) g.
enum class Side { left, right };

Scheme scheme_from_string(std::string_view s);
std::string_view scheme_name(Scheme s);

struct TransportSolution {
  AlgebraLoop input;
  GroupPath path;  // on the step grid: N/2 + 1 samples for grid input of size N
  GroupElement endpoint;
  std::string integrator_id;
  int step_count = 0;
  bool step_size_warning = false;  // sup ||u|| / N > 1
};

// Solves g' = g u(t), g(0) = e; the side is what makes the gauge action
// Ad(g)u - g'g^{-1} satisfy phi(g.u) = g(0) phi(u) g(1)^{-1}. Steps of size
// 2/N so every Simpson-type stage node lands on the sample grid; no
// interpolation of u ever happens.
TransportSolution solve_transport(const AlgebraLoop& u, Scheme scheme = Scheme::rkmk4);
Mat transport_endpoint(const AlgebraLoop& u, Scheme scheme = Scheme::rkmk4);

// Same one-step maps driven by an analytic frame A(t); N steps of size 1/N,
// all N+1 samples returned. Used for bundle lifts and direct holonomy.
GroupPath integrate_frame(const std::function<Mat(double)>& A, const CompactGroup& G, int N,
                          Scheme scheme = Scheme::rkmk4, Side side = Side::left);

// Max centered-difference residual ||g' - u g|| at interior step nodes.
double transport_residual(const TransportSolution& sol);

// || phi(g.u) - g(0) phi(u) g(1)^{-1} ||_F
double check_equivariance(const GroupPath& g, const AlgebraLoop& u,
                          Scheme scheme = Scheme::rkmk4);

// Central difference of eps -> log(phi(u)^{-1} phi(u + eps dir)) at 0,
// expressed in the algebra via left translation. eps in [1e-6, 1e-3].
AlgebraVector differential_phi(const AlgebraLoop& u, const AlgebraLoop& direction, double eps,
                               Scheme scheme = Scheme::rkmk4);
// 5-point Richardson variant (no eps window restriction); the kernel and
// shape-operator computations need its ~1e-12 accuracy.
AlgebraVector differential_phi_rich(const AlgebraLoop& u, const AlgebraLoop& direction,
                                    double eps, Scheme scheme = Scheme::rkmk4);

// Columns = coordinates of d phi(u)[basis loop j]; Richardson differences with
// the base endpoint computed once.
Matd sampled_differential(const AlgebraLoop& u, const LoopBasis& basis, double eps,
                          Scheme scheme = Scheme::rkmk4);

struct SubmersionReport {
  int basis_size = 0;
  int kernel_dim = 0;
  int horizontal_dim = 0;
  double isometry_residual = 0.0;  // max |<J h_i, J h_j> - delta_ij|
  double kernel_residual = 0.0;    // max ||mean(Ad(frame^-1) w)|| over kernel vectors
  double sigma_min_kept = 0.0;
  double sigma_max_dropped = 0.0;
};

// frame: gauge path whose translate produced u (null means u sits at the
// reference point); kernel vectors are pulled back through it before the
// mean-zero test. sample_count < 0 checks the full horizontal Gram.
SubmersionReport check_riemannian_submersion(const AlgebraLoop& u, const LoopBasis& basis,
                                             double eps = 1e-3, Scheme scheme = Scheme::rkmk4,
                                             const GroupPath* frame = nullptr,
                                             int sample_count = -1);

}  // namespace holab
