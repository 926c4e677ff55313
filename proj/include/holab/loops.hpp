#pragma once

#include <string>
#include <vector>

#include "holab/roots.hpp"

namespace holab {

// g-valued path sampled on t_i = i/N with the endpoint stored; closed loops
// keep samples[N] bitwise equal to samples[0].
struct AlgebraLoop {
  const CompactGroup* group = nullptr;
  int N = 0;  // power of two
  bool closed = true;
  std::vector<Mat> samples;  // N+1

  // Optional Fourier tables in orthonormal-basis coordinates; col 0 of
  // cos_table is the mean, col k the cos(2 pi k t) coefficient.
  int K = -1;  // -1 when absent
  Matd cos_table;  // dim x (K+1)
  Matd sin_table;  // dim x K

  bool has_fourier() const { return K >= 0; }
  double t(int i) const { return static_cast<double>(i) / N; }
};

struct GroupPath {
  const CompactGroup* group = nullptr;
  int N = 0;
  std::vector<Mat> samples;  // N+1
};

struct BasisLabel {
  enum class Kind { constant, l1, l2 };
  Kind kind = Kind::constant;
  int torus_index = -1;  // torus (zero-space role) directions
  int root_index = -1;   // root-plane directions
  bool ek = false;       // constants only: e vs e_k leg
  int k = 0;             // 0 for constants, k in Z\{0} for root loops, k >= 1 for torus loops

  static BasisLabel constant_torus(int j) { return {Kind::constant, j, -1, false, 0}; }
  static BasisLabel constant_root(int r, bool ek) { return {Kind::constant, -1, r, ek, 0}; }
  static BasisLabel root_loop(Kind kind, int r, int k) { return {kind, -1, r, false, k}; }
  static BasisLabel torus_loop(Kind kind, int j, int k) { return {kind, j, -1, false, k}; }
  std::string to_string() const;
};

AlgebraLoop zero_loop(const CompactGroup& G, int N);
AlgebraLoop constant_loop(const AlgebraVector& v, int N);
AlgebraLoop loop_from_fourier(const CompactGroup& G, int N, const Matd& cos_table,
                              const Matd& sin_table);
// a*x + y sample-wise; closed only if both are.
AlgebraLoop loop_axpy(double a, const AlgebraLoop& x, const AlgebraLoop& y);

double l2_inner(const AlgebraLoop& u, const AlgebraLoop& w);
double l2_norm(const AlgebraLoop& u);
// Spectral multiplier (1 + (2 pi k)^2)^s; closed loops with Fourier tables only.
double hs_inner(const AlgebraLoop& u, const AlgebraLoop& w, int s);

void compute_fourier(AlgebraLoop& u, int K);
// Max coefficient mismatch between a fresh DFT and the stored tables.
double fourier_residual(const AlgebraLoop& u);
// Analytic derivative from the Fourier tables.
AlgebraLoop loop_derivative(const AlgebraLoop& u);

AlgebraLoop basis_loop(const TorusDecomposition& dec, const BasisLabel& label, int N);
std::vector<BasisLabel> enumerate_basis(const TorusDecomposition& dec, int K);

// The enumerated orthonormal system (constants first), prebuilt on a grid.
struct LoopBasis {
  const TorusDecomposition* dec = nullptr;
  int N = 0, K = 0;
  std::vector<BasisLabel> labels;
  std::vector<AlgebraLoop> loops;

  static LoopBasis build(const TorusDecomposition& dec, int K, int N);
  int size() const { return static_cast<int>(labels.size()); }
  bool is_constant(int j) const { return labels[j].kind == BasisLabel::Kind::constant; }
  AlgebraLoop combine(const Vecd& coords) const;
  Vecd project(const AlgebraLoop& u) const;
};

bool path_closed(const GroupPath& g, double tol = 1e-12);
bool h1_sane(const GroupPath& g, double C);

// (g.u)(t) = Ad(g(t)) u(t) - g'(t) g(t)^{-1}, g' by 4th-order stencils
// (periodic when g closes, one-sided at the ends otherwise).
AlgebraLoop gauge_act(const GroupPath& g, const AlgebraLoop& u);

GroupPath exp_path(const AlgebraLoop& x);

}  // namespace holab
