#include "holab/generators.hpp"

#include <cmath>
#include <stdexcept>

namespace holab {

AlgebraLoop random_band_loop(const CompactGroup& G, Rng& rng, int N, int max_mode, double amp) {
  const int dim = G.dim();
  Matd ct = Matd::Zero(dim, max_mode + 1);
  Matd st = Matd::Zero(dim, max_mode);
  for (int d = 0; d < dim; ++d) {
    ct(d, 0) = amp * rng.normal();
    for (int k = 1; k <= max_mode; ++k) {
      ct(d, k) = amp * rng.normal() / k;
      st(d, k - 1) = amp * rng.normal() / k;
    }
  }
  return loop_from_fourier(G, N, ct, st);
}

AlgebraLoop random_drift_loop(const CompactGroup& G, Rng& rng, int N, int max_mode, double amp) {
  Mat c0 = random_algebra(G, rng, amp).m;
  Mat c1 = random_algebra(G, rng, amp).m;
  std::vector<Mat> cs, ss;
  for (int k = 1; k <= max_mode; ++k) {
    cs.push_back(random_algebra(G, rng, amp / k).m);
    ss.push_back(random_algebra(G, rng, amp / k).m);
  }
  AlgebraLoop x;
  x.group = &G;
  x.N = N;
  x.closed = false;
  x.samples.resize(N + 1);
  for (int i = 0; i <= N; ++i) {
    double t = static_cast<double>(i) / N;
    Mat v = c0 + t * c1;
    for (int k = 1; k <= max_mode; ++k) {
      v += std::cos(2.0 * M_PI * k * t) * cs[k - 1] + std::sin(2.0 * M_PI * k * t) * ss[k - 1];
    }
    x.samples[i] = v;
  }
  return x;
}

GroupPath random_gauge_path(const CompactGroup& G, Rng& rng, int N, int max_mode, double amp,
                            bool based) {
  AlgebraLoop x = random_band_loop(G, rng, N, max_mode, amp);
  GroupPath g = exp_path(x);
  if (based) {
    Mat h0 = g.samples[0].adjoint();
    for (Mat& s : g.samples) s = s * h0;
    g.samples[g.N] = g.samples[0];
  }
  return g;
}

AlgebraLoop gauge_translate_constant(const AlgebraLoop& x, const Mat& v) {
  const CompactGroup& G = *x.group;
  if (!x.has_fourier()) throw std::domain_error("gauge translate needs Fourier tables on x");
  AlgebraLoop dx = loop_derivative(x);
  AlgebraLoop u;
  u.group = &G;
  u.N = x.N;
  u.closed = x.closed;
  u.samples.resize(x.N + 1);
  const bool zero_v = v.size() == 0 || v.norm() == 0.0;
  for (int i = 0; i <= x.N; ++i) {
    Mat s = -dexp_right(x.samples[i], dx.samples[i]);
    if (!zero_v) {
      Mat g = exp_algebra(G, x.samples[i]);
      s += g * v * g.adjoint();
    }
    u.samples[i] = G.project_algebra(s);
  }
  if (u.closed) u.samples[u.N] = u.samples[0];
  return u;
}

AlgebraLoop gauge_translate_of_zero(const AlgebraLoop& x) {
  return gauge_translate_constant(x, Mat());
}

Mat generic_torus_vector(const CompactGroup& G) {
  Vecd c = Vecd::Zero(G.dim());
  if (G.rank() == 1) {
    c(0) = 0.9;
  } else {
    c(0) = 0.8;
    c(1) = 0.33;
  }
  return G.from_coords(c);
}

TorusDecomposition generic_torus_decomposition(const CompactGroup& G) {
  return root_decomposition(AlgebraVector{generic_torus_vector(G), &G});
}

Mat random_generic_torus_vector(const CompactGroup& G, Rng& rng, double scale) {
  for (int attempt = 0; attempt < 64; ++attempt) {
    AlgebraVector v = random_torus_vector(G, rng, scale);
    try {
      root_decomposition(v);
      return v.m;
    } catch (const degeneracy_error&) {
    }
  }
  throw std::domain_error("could not draw a generic torus vector");
}

}  // namespace holab
