#include "holab/loops.hpp"

#include <cmath>

namespace holab {

namespace {

void require_compatible(const AlgebraLoop& u, const AlgebraLoop& w) {
  if (u.group != w.group) throw std::domain_error("loops: mismatched groups");
  if (u.N != w.N) throw std::domain_error("loops: mismatched grid sizes");
}

double int_pow(double base, int s) {
  double w = 1.0;
  for (int i = 0; i < s; ++i) w *= base;
  return w;
}

}  // namespace

std::string BasisLabel::to_string() const {
  switch (kind) {
    case Kind::constant:
      if (torus_index >= 0) return "const_t" + std::to_string(torus_index);
      return "const_r" + std::to_string(root_index) + (ek ? "_ek" : "_e");
    case Kind::l1:
    case Kind::l2: {
      std::string base = kind == Kind::l1 ? "l1_" : "l2_";
      if (torus_index >= 0) return base + "t" + std::to_string(torus_index) + "_k" + std::to_string(k);
      return base + "r" + std::to_string(root_index) + "_k" + std::to_string(k);
    }
  }
  return "?";
}

AlgebraLoop zero_loop(const CompactGroup& G, int N) {
  AlgebraLoop u;
  u.group = &G;
  u.N = N;
  u.closed = true;
  u.samples.assign(N + 1, Mat::Zero(G.n(), G.n()));
  u.K = 0;
  u.cos_table = Matd::Zero(G.dim(), 1);
  u.sin_table = Matd::Zero(G.dim(), 0);
  return u;
}

AlgebraLoop constant_loop(const AlgebraVector& v, int N) {
  AlgebraLoop u = zero_loop(*v.group, N);
  u.samples.assign(N + 1, v.m);
  u.cos_table.col(0) = v.group->to_coords(v.m);
  return u;
}

AlgebraLoop loop_from_fourier(const CompactGroup& G, int N, const Matd& cos_table,
                              const Matd& sin_table) {
  AlgebraLoop u;
  u.group = &G;
  u.N = N;
  u.closed = true;
  u.K = static_cast<int>(cos_table.cols()) - 1;
  u.cos_table = cos_table;
  u.sin_table = sin_table;
  u.samples.resize(N + 1);
  for (int i = 0; i < N; ++i) {
    Vecd c = cos_table.col(0);
    for (int k = 1; k <= u.K; ++k) {
      double ph = 2.0 * M_PI * k * i / N;
      c += std::cos(ph) * cos_table.col(k) + std::sin(ph) * sin_table.col(k - 1);
    }
    u.samples[i] = G.from_coords(c);
  }
  u.samples[N] = u.samples[0];
  return u;
}

AlgebraLoop loop_axpy(double a, const AlgebraLoop& x, const AlgebraLoop& y) {
  require_compatible(x, y);
  AlgebraLoop r;
  r.group = x.group;
  r.N = x.N;
  r.closed = x.closed && y.closed;
  r.samples.resize(x.N + 1);
  for (int i = 0; i <= x.N; ++i) r.samples[i] = a * x.samples[i] + y.samples[i];
  if (x.has_fourier() && y.has_fourier() && x.K == y.K) {
    r.K = x.K;
    r.cos_table = a * x.cos_table + y.cos_table;
    r.sin_table = a * x.sin_table + y.sin_table;
  }
  return r;
}

double l2_inner(const AlgebraLoop& u, const AlgebraLoop& w) {
  require_compatible(u, w);
  const CompactGroup& G = *u.group;
  // Trapezoid; coincides with the rectangle rule on closed loops, exact on
  // trigonometric polynomials of degree < N/2.
  double acc = 0.5 * (inner(G, u.samples[0], w.samples[0]) +
                      inner(G, u.samples[u.N], w.samples[u.N]));
  for (int i = 1; i < u.N; ++i) acc += inner(G, u.samples[i], w.samples[i]);
  return acc / u.N;
}

double l2_norm(const AlgebraLoop& u) { return std::sqrt(std::max(0.0, l2_inner(u, u))); }

double hs_inner(const AlgebraLoop& u, const AlgebraLoop& w, int s) {
  require_compatible(u, w);
  if (!u.closed || !w.closed)
    throw std::domain_error("hs_inner: defined on closed loops, not open paths");
  if (!u.has_fourier() || !w.has_fourier() || u.K != w.K)
    throw std::domain_error("hs_inner: Fourier tables absent or of mismatched depth");
  double acc = u.cos_table.col(0).dot(w.cos_table.col(0));
  for (int k = 1; k <= u.K; ++k) {
    double weight = int_pow(1.0 + 4.0 * M_PI * M_PI * k * k, s);
    acc += 0.5 * weight * (u.cos_table.col(k).dot(w.cos_table.col(k)) +
                           u.sin_table.col(k - 1).dot(w.sin_table.col(k - 1)));
  }
  return acc;
}

void compute_fourier(AlgebraLoop& u, int K) {
  if (!u.closed) throw std::domain_error("compute_fourier: loop is not closed");
  if (K >= u.N / 2) throw std::domain_error("compute_fourier: K must stay below N/2");
  const CompactGroup& G = *u.group;
  Matd coords(G.dim(), u.N);
  for (int i = 0; i < u.N; ++i) coords.col(i) = G.to_coords(u.samples[i]);
  u.K = K;
  u.cos_table = Matd::Zero(G.dim(), K + 1);
  u.sin_table = Matd::Zero(G.dim(), K);
  u.cos_table.col(0) = coords.rowwise().mean();
  for (int k = 1; k <= K; ++k) {
    for (int i = 0; i < u.N; ++i) {
      double ph = 2.0 * M_PI * k * i / u.N;
      u.cos_table.col(k) += (2.0 / u.N) * std::cos(ph) * coords.col(i);
      u.sin_table.col(k - 1) += (2.0 / u.N) * std::sin(ph) * coords.col(i);
    }
  }
}

double fourier_residual(const AlgebraLoop& u) {
  if (!u.has_fourier()) throw std::domain_error("fourier_residual: tables absent");
  AlgebraLoop v = u;
  compute_fourier(v, u.K);
  double r = (v.cos_table - u.cos_table).cwiseAbs().maxCoeff();
  if (u.K > 0) r = std::max(r, (v.sin_table - u.sin_table).cwiseAbs().maxCoeff());
  return r;
}

AlgebraLoop loop_derivative(const AlgebraLoop& u) {
  if (!u.has_fourier()) throw std::domain_error("loop_derivative: Fourier tables required");
  const CompactGroup& G = *u.group;
  Matd dc = Matd::Zero(G.dim(), u.K + 1);
  Matd ds = Matd::Zero(G.dim(), std::max(u.K, 0));
  for (int k = 1; k <= u.K; ++k) {
    dc.col(k) = 2.0 * M_PI * k * u.sin_table.col(k - 1);
    ds.col(k - 1) = -2.0 * M_PI * k * u.cos_table.col(k);
  }
  return loop_from_fourier(G, u.N, dc, ds);
}

AlgebraLoop basis_loop(const TorusDecomposition& dec, const BasisLabel& label, int N) {
  const CompactGroup& G = *dec.group;
  using Kind = BasisLabel::Kind;
  if (label.kind == Kind::constant) {
    const AlgebraVector& v = label.torus_index >= 0
                                 ? dec.torus_basis[label.torus_index]
                                 : (label.ek ? dec.roots[label.root_index].e_k
                                             : dec.roots[label.root_index].e);
    return constant_loop(v, N);
  }
  if (label.k == 0)
    throw std::domain_error("basis_loop: k = 0 is not a loop label; use a constant");

  Matd ct = Matd::Zero(G.dim(), std::abs(label.k) + 1);
  Matd st = Matd::Zero(G.dim(), std::abs(label.k));
  int ka = std::abs(label.k);
  double sg = label.k > 0 ? 1.0 : -1.0;
  if (label.torus_index >= 0) {
    // Zero-space role: sqrt(2) * cos/sin(2 pi k t) in a torus direction.
    Vecd c = G.to_coords(dec.torus_basis[label.torus_index].m);
    if (label.kind == Kind::l1) ct.col(ka) = std::sqrt(2.0) * c;
    else st.col(ka - 1) = std::sqrt(2.0) * c;
  } else {
    const RootDatum& r = dec.roots[label.root_index];
    Vecd ce = G.to_coords(r.e.m), ck = G.to_coords(r.e_k.m);
    if (label.kind == Kind::l1) {  // e cos(2 pi k t) - e_k sin(2 pi k t)
      ct.col(ka) = ce;
      st.col(ka - 1) = -sg * ck;
    } else {  // e sin(2 pi k t) + e_k cos(2 pi k t)
      ct.col(ka) = ck;
      st.col(ka - 1) = sg * ce;
    }
  }
  return loop_from_fourier(G, N, ct, st);
}

std::vector<BasisLabel> enumerate_basis(const TorusDecomposition& dec, int K) {
  using Kind = BasisLabel::Kind;
  std::vector<BasisLabel> out;
  int rank = static_cast<int>(dec.torus_basis.size());
  int nroots = static_cast<int>(dec.roots.size());
  for (int j = 0; j < rank; ++j) out.push_back(BasisLabel::constant_torus(j));
  for (int r = 0; r < nroots; ++r) {
    out.push_back(BasisLabel::constant_root(r, false));
    out.push_back(BasisLabel::constant_root(r, true));
  }
  for (int r = 0; r < nroots; ++r)
    for (int k = 1; k <= K; ++k) {
      out.push_back(BasisLabel::root_loop(Kind::l1, r, k));
      out.push_back(BasisLabel::root_loop(Kind::l2, r, k));
      out.push_back(BasisLabel::root_loop(Kind::l1, r, -k));
      out.push_back(BasisLabel::root_loop(Kind::l2, r, -k));
    }
  for (int j = 0; j < rank; ++j)
    for (int k = 1; k <= K; ++k) {
      out.push_back(BasisLabel::torus_loop(Kind::l1, j, k));
      out.push_back(BasisLabel::torus_loop(Kind::l2, j, k));
    }
  return out;
}

LoopBasis LoopBasis::build(const TorusDecomposition& dec, int K, int N) {
  LoopBasis b;
  b.dec = &dec;
  b.N = N;
  b.K = K;
  b.labels = enumerate_basis(dec, K);
  b.loops.reserve(b.labels.size());
  for (const auto& l : b.labels) b.loops.push_back(basis_loop(dec, l, N));
  return b;
}

AlgebraLoop LoopBasis::combine(const Vecd& coords) const {
  AlgebraLoop r = zero_loop(*dec->group, N);
  for (int j = 0; j < size(); ++j) {
    if (coords[j] == 0.0) continue;
    for (int i = 0; i <= N; ++i) r.samples[i] += coords[j] * loops[j].samples[i];
  }
  r.K = -1;
  return r;
}

Vecd LoopBasis::project(const AlgebraLoop& u) const {
  Vecd c(size());
  for (int j = 0; j < size(); ++j) c[j] = l2_inner(loops[j], u);
  return c;
}

bool path_closed(const GroupPath& g, double tol) {
  return fro_dist(g.samples[0], g.samples[g.N]) < tol;
}

bool h1_sane(const GroupPath& g, double C) {
  for (int i = 0; i < g.N; ++i)
    if (fro_dist(g.samples[i + 1], g.samples[i]) > C / g.N) return false;
  return true;
}

AlgebraLoop gauge_act(const GroupPath& g, const AlgebraLoop& u) {
  if (g.group != u.group) throw std::domain_error("gauge_act: mismatched groups");
  if (g.N != u.N) throw std::domain_error("gauge_act: mismatched grid sizes");
  const CompactGroup& G = *g.group;
  const int N = g.N;
  const double h = 1.0 / N;
  const bool per = path_closed(g);

  AlgebraLoop r;
  r.group = &G;
  r.N = N;
  r.closed = u.closed && per;
  r.samples.resize(N + 1);

  auto at = [&](int i) -> const Mat& { return g.samples[((i % N) + N) % N]; };
  auto deriv = [&](int i) -> Mat {
    if (per)
      return (at(i - 2) - 8.0 * at(i - 1) + 8.0 * at(i + 1) - at(i + 2)) / (12.0 * h);
    const auto& f = g.samples;
    if (i == 0)
      return (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]) / (12.0 * h);
    if (i == 1)
      return (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]) / (12.0 * h);
    if (i == N - 1)
      return (3.0 * f[N] + 10.0 * f[N - 1] - 18.0 * f[N - 2] + 6.0 * f[N - 3] - f[N - 4]) /
             (12.0 * h);
    if (i == N)
      return (25.0 * f[N] - 48.0 * f[N - 1] + 36.0 * f[N - 2] - 16.0 * f[N - 3] +
              3.0 * f[N - 4]) /
             (12.0 * h);
    return (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]) / (12.0 * h);
  };

  int last = per ? N - 1 : N;
  for (int i = 0; i <= last; ++i) {
    const Mat& gi = g.samples[i];
    Mat v = gi * u.samples[i] * gi.adjoint() - deriv(i) * gi.adjoint();
    r.samples[i] = G.project_algebra(v);
  }
  if (per) r.samples[N] = r.samples[0];
  return r;
}

GroupPath exp_path(const AlgebraLoop& x) {
  GroupPath g;
  g.group = x.group;
  g.N = x.N;
  g.samples.resize(x.N + 1);
  for (int i = 0; i <= x.N; ++i) g.samples[i] = exp_algebra(*x.group, x.samples[i]);
  return g;
}

}  // namespace holab
