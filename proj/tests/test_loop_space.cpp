#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "holab/loops.hpp"

using namespace holab;

namespace {

TorusDecomposition standard_dec(const char* id, std::uint64_t seed = 101) {
  const CompactGroup& G = CompactGroup::of(id);
  Rng rng(seed);
  while (true) {
    try {
      return root_decomposition(random_torus_vector(G, rng));
    } catch (const degeneracy_error&) {
    }
  }
}

AlgebraLoop random_band_loop(const CompactGroup& G, Rng& rng, int N, int modes, double amp) {
  Matd ct = Matd::Zero(G.dim(), modes + 1), st = Matd::Zero(G.dim(), modes);
  for (int j = 0; j < G.dim(); ++j) {
    ct(j, 0) = amp * rng.normal();
    for (int k = 1; k <= modes; ++k) {
      ct(j, k) = amp * rng.normal() / k;
      st(j, k - 1) = amp * rng.normal() / k;
    }
  }
  return loop_from_fourier(G, N, ct, st);
}

}  // namespace

TEST_CASE("l2_inner: zero, constants, size mismatch") {
  const CompactGroup& G = CompactGroup::of("su2");
  Rng rng(1);
  AlgebraLoop z = zero_loop(G, 64);
  AlgebraLoop w = random_band_loop(G, rng, 64, 3, 1.0);
  CHECK(l2_inner(z, w) == 0.0);

  AlgebraVector v = random_algebra(G, rng);
  AlgebraLoop vc = constant_loop(v, 64);
  CHECK(l2_inner(vc, vc) == doctest::Approx(inner(v, v)).epsilon(1e-14));

  AlgebraLoop other = random_band_loop(G, rng, 128, 3, 1.0);
  CHECK_THROWS_AS((void)l2_inner(w, other), std::domain_error);
}

TEST_CASE("basis Gram matrix is the identity") {
  for (auto id : {"su2", "so3"}) {
    TorusDecomposition dec = standard_dec(id);
    LoopBasis basis = LoopBasis::build(dec, 4, 256);
    int D = basis.size();
    CHECK(D == dec.group->dim() * (2 * 4 + 1));
    double worst = 0;
    for (int a = 0; a < D; ++a)
      for (int b = a; b < D; ++b) {
        double g = l2_inner(basis.loops[a], basis.loops[b]);
        worst = std::max(worst, std::abs(g - (a == b ? 1.0 : 0.0)));
      }
    CHECK(worst < 1e-12);
  }
}

TEST_CASE("constants are orthogonal to every retained l-loop") {
  TorusDecomposition dec = standard_dec("su2");
  LoopBasis basis = LoopBasis::build(dec, 6, 256);
  AlgebraLoop vhat = constant_loop(dec.v, 256);
  double norm2 = 0;
  for (int j = 0; j < basis.size(); ++j) {
    if (basis.is_constant(j)) continue;
    double c = l2_inner(basis.loops[j], vhat);
    norm2 += c * c;
  }
  CHECK(std::sqrt(norm2) < 1e-10);
}

TEST_CASE("hs_inner: multiplier behavior") {
  const CompactGroup& G = CompactGroup::of("su2");
  Rng rng(2);
  AlgebraLoop u = random_band_loop(G, rng, 256, 4, 0.7);
  AlgebraLoop w = random_band_loop(G, rng, 256, 4, 0.7);
  CHECK(hs_inner(u, w, 0) == doctest::Approx(l2_inner(u, w)).epsilon(1e-12));

  AlgebraVector v = random_algebra(G, rng);
  AlgebraLoop vc = constant_loop(v, 256);
  for (int s : {0, 1, 2, 3})
    CHECK(hs_inner(vc, vc, s) == doctest::Approx(l2_inner(vc, vc)).epsilon(1e-12));

  Matd ct = Matd::Zero(3, 2), st = Matd::Zero(3, 1);
  ct(1, 1) = 0.9;  // single cos mode k = 1
  AlgebraLoop m1 = loop_from_fourier(G, 256, ct, st);
  double ratio = hs_inner(m1, m1, 1) / l2_inner(m1, m1);
  CHECK(ratio == doctest::Approx(1.0 + 4.0 * M_PI * M_PI).epsilon(1e-12));

  AlgebraLoop open = u;
  open.closed = false;
  CHECK_THROWS_WITH_AS((void)hs_inner(open, open, 1),
                       doctest::Contains("closed loops"), std::domain_error);
  AlgebraLoop bare = u;
  bare.K = -1;
  CHECK_THROWS_AS((void)hs_inner(bare, bare, 1), std::domain_error);
}

TEST_CASE("Fourier tables: DFT consistency and derivative") {
  const CompactGroup& G = CompactGroup::of("su3");
  Rng rng(3);
  AlgebraLoop u = random_band_loop(G, rng, 128, 5, 1.2);
  CHECK(fourier_residual(u) < 1e-10);

  // Exact single-mode oracle: d/dt of cos(2 pi k t) e is -2 pi k sin(2 pi k t) e.
  Matd ct = Matd::Zero(G.dim(), 3), st = Matd::Zero(G.dim(), 2);
  ct(2, 2) = 0.8;
  AlgebraLoop m2 = loop_from_fourier(G, 128, ct, st);
  AlgebraLoop dm2 = loop_derivative(m2);
  for (int i : {10, 40, 77}) {
    double want = -0.8 * 4.0 * M_PI * std::sin(4.0 * M_PI * i / 128.0);
    Mat expect = want * G.basis()[2];
    CHECK(fro_dist(dm2.samples[i], expect) < 1e-12);
  }
  AlgebraLoop v = u;
  compute_fourier(v, 5);
  CHECK((v.cos_table - u.cos_table).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("basis_loop: displayed values and unit norms") {
  TorusDecomposition dec = standard_dec("su2");
  int N = 256;

  AlgebraLoop l1 = basis_loop(dec, BasisLabel::root_loop(BasisLabel::Kind::l1, 0, 1), N);
  CHECK(fro_dist(l1.samples[0], dec.roots[0].e.m) < 1e-12);
  CHECK(l2_norm(l1) == doctest::Approx(1.0).epsilon(1e-12));

  // Zero-space (torus) label, k = 2, at t = 1/4: direction -t_j, unit L2 norm.
  AlgebraLoop z1 = basis_loop(dec, BasisLabel::torus_loop(BasisLabel::Kind::l1, 0, 2), N);
  CHECK(l2_norm(z1) == doctest::Approx(1.0).epsilon(1e-12));
  Mat at_quarter = z1.samples[N / 4];
  CHECK(fro_dist(at_quarter, -std::sqrt(2.0) * dec.torus_basis[0].m) < 1e-12);
  double cosine = inner(*dec.group, at_quarter, dec.torus_basis[0].m) /
                  algebra_norm(*dec.group, at_quarter);
  CHECK(cosine == doctest::Approx(-1.0).epsilon(1e-12));

  TorusDecomposition dsu3 = standard_dec("su3");
  for (const auto& label : enumerate_basis(dsu3, 3)) {
    AlgebraLoop l = basis_loop(dsu3, label, 128);
    CHECK(l2_norm(l) == doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK_THROWS_AS((void)basis_loop(dec, BasisLabel::root_loop(BasisLabel::Kind::l1, 0, 0), N),
                  std::domain_error);
}

TEST_CASE("gauge_act: identity and constant paths") {
  const CompactGroup& G = CompactGroup::of("su2");
  Rng rng(4);
  int N = 128;
  AlgebraLoop u = random_band_loop(G, rng, N, 3, 0.8);

  GroupPath id{&G, N, std::vector<Mat>(N + 1, eye(2))};
  AlgebraLoop r = gauge_act(id, u);
  CHECK(r.closed);
  double worst = 0;
  for (int i = 0; i <= N; ++i) worst = std::max(worst, fro_dist(r.samples[i], u.samples[i]));
  CHECK(worst < 1e-14);

  GroupElement g0 = random_group_element(G, rng);
  GroupPath cg{&G, N, std::vector<Mat>(N + 1, g0.m)};
  AlgebraLoop rc = gauge_act(cg, u);
  for (int i = 0; i <= N; ++i)
    CHECK(fro_dist(rc.samples[i], adjoint(G, g0.m, u.samples[i])) < 1e-13);
}

TEST_CASE("gauge_act: action property and algebra validity") {
  const CompactGroup& G = CompactGroup::of("su2");
  Rng rng(5);
  int N = 512;
  AlgebraLoop u = random_band_loop(G, rng, N, 2, 0.5);
  AlgebraLoop x1 = random_band_loop(G, rng, N, 2, 0.4);
  AlgebraLoop x2 = random_band_loop(G, rng, N, 2, 0.4);
  GroupPath g1 = exp_path(x1), g2 = exp_path(x2);

  GroupPath g12{&G, N, {}};
  g12.samples.resize(N + 1);
  for (int i = 0; i <= N; ++i) g12.samples[i] = g1.samples[i] * g2.samples[i];

  AlgebraLoop lhs = gauge_act(g1, gauge_act(g2, u));
  AlgebraLoop rhs = gauge_act(g12, u);
  double worst = 0;
  for (int i = 0; i <= N; ++i) {
    worst = std::max(worst, fro_dist(lhs.samples[i], rhs.samples[i]));
    CHECK(G.in_algebra(lhs.samples[i], 1e-10));
  }
  CHECK(worst < 1e-6);
  CHECK(lhs.closed);
}

TEST_CASE("gauge_act: open paths use one-sided stencils") {
  const CompactGroup& G = CompactGroup::of("su2");
  Rng rng(6);
  int N = 512;
  // Drift makes the path open: x(t) = t * c1 + band-limited part.
  AlgebraLoop x = random_band_loop(G, rng, N, 2, 0.3);
  AlgebraVector c1 = random_algebra(G, rng, 0.4);
  for (int i = 0; i <= N; ++i) x.samples[i] += (static_cast<double>(i) / N) * c1.m;
  x.closed = false;
  x.K = -1;
  GroupPath g = exp_path(x);
  CHECK(!path_closed(g));

  AlgebraLoop r = gauge_act(g, zero_loop(G, N));
  CHECK(!r.closed);

  // Pure-drift oracle: for x(t) = t c1 the path derivative commutes and
  // g'g^{-1} = c1 exactly, endpoints included.
  GroupPath gd{&G, N, {}};
  gd.samples.resize(N + 1);
  for (int i = 0; i <= N; ++i)
    gd.samples[i] = exp_algebra(G, (static_cast<double>(i) / N) * c1.m);
  AlgebraLoop rd = gauge_act(gd, zero_loop(G, N));
  for (int i : {0, 1, N / 3, N - 1, N}) CHECK(fro_dist(rd.samples[i], -c1.m) < 1e-9);
}

TEST_CASE("gauge_act matches the analytic derivative series of exp") {
  const CompactGroup& G = CompactGroup::of("su2");
  Rng rng(9);
  int N = 1024;
  AlgebraLoop y = random_band_loop(G, rng, N, 2, 0.3);
  GroupPath gy = exp_path(y);
  AlgebraLoop ry = gauge_act(gy, zero_loop(G, N));
  AlgebraLoop dy = loop_derivative(y);
  double worst = 0;
  for (int i = 0; i <= N; ++i) {
    // g'g^{-1} = sum_m ad_y^m(y') / (m+1)!
    Mat term = dy.samples[i], acc = Mat::Zero(2, 2);
    double fact = 1.0;
    for (int m = 0; m < 24; ++m) {
      acc += term / fact;
      term = comm(y.samples[i], term);
      fact *= (m + 2);
    }
    worst = std::max(worst, fro_dist(ry.samples[i], -acc));
  }
  CHECK(worst < 1e-8);
}

TEST_CASE("gauge_act: grid mismatch rejected") {
  const CompactGroup& G = CompactGroup::of("su2");
  Rng rng(7);
  AlgebraLoop u = random_band_loop(G, rng, 128, 2, 0.5);
  GroupPath id{&G, 64, std::vector<Mat>(65, eye(2))};
  CHECK_THROWS_AS((void)gauge_act(id, u), std::domain_error);
}

TEST_CASE("h1 sanity bound on exp paths") {
  const CompactGroup& G = CompactGroup::of("so3");
  Rng rng(8);
  AlgebraLoop x = random_band_loop(G, rng, 256, 2, 0.4);
  GroupPath g = exp_path(x);
  CHECK(h1_sane(g, 40.0));
  CHECK(!h1_sane(g, 1e-6));
}
