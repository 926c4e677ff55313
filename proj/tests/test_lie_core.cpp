#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unsupported/Eigen/MatrixFunctions>

#include "holab/groups.hpp"
#include "holab/roots.hpp"

using namespace holab;

namespace {

const char* kGroups[] = {"su2", "su3", "so3"};

// Independent Killing form: tr(ad_x ad_y) with ad matrices rebuilt here.
double killing_oracle(const CompactGroup& G, const Mat& x, const Mat& y) {
  Matd ax(G.dim(), G.dim()), ay(G.dim(), G.dim());
  for (int k = 0; k < G.dim(); ++k) {
    Mat cx = comm(x, G.basis()[k]), cy = comm(y, G.basis()[k]);
    for (int i = 0; i < G.dim(); ++i) {
      ax(i, k) = inner(G, cx, G.basis()[i]);
      ay(i, k) = inner(G, cy, G.basis()[i]);
    }
  }
  return (ax * ay).trace();
}

}  // namespace

TEST_CASE("inner product: zero, scale pinning, Killing agreement") {
  const CompactGroup& su2 = CompactGroup::of("su2");
  Mat z = Mat::Zero(2, 2);
  CHECK(inner(su2, z, z) == 0.0);

  Mat x = Mat::Zero(2, 2);
  x(0, 0) = cplx(0, 0.5), x(1, 1) = cplx(0, -0.5);
  CHECK(inner(su2, x, x) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(std::abs(inner(su2, x, x) + killing_oracle(su2, x, x)) < 1e-12);

  for (auto id : kGroups) {
    const CompactGroup& G = CompactGroup::of(id);
    CHECK(G.killing_residual() < 1e-12);
    Rng rng(7);
    for (int t = 0; t < 5; ++t) {
      AlgebraVector a = random_algebra(G, rng), b = random_algebra(G, rng);
      CHECK(std::abs(inner(a, b) + killing_oracle(G, a.m, b.m)) < 1e-10);
    }
  }
}

TEST_CASE("inner product: Ad-invariance and group mismatch") {
  for (auto id : kGroups) {
    const CompactGroup& G = CompactGroup::of(id);
    Rng rng(11);
    double worst = 0;
    for (int t = 0; t < 100; ++t) {
      GroupElement g = random_group_element(G, rng);
      AlgebraVector x = random_algebra(G, rng), y = random_algebra(G, rng);
      worst = std::max(worst, std::abs(inner(adjoint(g, x), adjoint(g, y)) - inner(x, y)));
    }
    CHECK(worst < 1e-10);
  }
  AlgebraVector a{Mat::Zero(2, 2), &CompactGroup::of("su2")};
  AlgebraVector b{Mat::Zero(3, 3), &CompactGroup::of("su3")};
  CHECK_THROWS_AS((void)inner(a, b), std::domain_error);
}

TEST_CASE("orthonormal basis and coordinate round trip") {
  for (auto id : kGroups) {
    const CompactGroup& G = CompactGroup::of(id);
    for (int j = 0; j < G.dim(); ++j) {
      CHECK(G.in_algebra(G.basis()[j], 1e-12));
      for (int k = 0; k < G.dim(); ++k) {
        double expect = j == k ? 1.0 : 0.0;
        CHECK(std::abs(inner(G, G.basis()[j], G.basis()[k]) - expect) < 1e-12);
      }
    }
    Rng rng(3);
    AlgebraVector x = random_algebra(G, rng, 0.8);
    CHECK(fro_dist(G.from_coords(G.to_coords(x.m)), x.m) < 1e-12);
    CHECK(fro_dist(G.project_algebra(x.m), x.m) < 1e-14);
  }
}

TEST_CASE("exp_group: identity, inverse, unitarity, series oracle") {
  for (auto id : kGroups) {
    const CompactGroup& G = CompactGroup::of(id);
    CHECK(fro_dist(exp_algebra(G, Mat::Zero(G.n(), G.n())), eye(G.n())) == 0.0);
    Rng rng(19);
    for (int t = 0; t < 25; ++t) {
      AlgebraVector x = random_algebra(G, rng);
      GroupElement g = exp_group(x);
      CHECK(G.in_group(g.m, 1e-12));
      CHECK((g.m.adjoint() * g.m - eye(G.n())).norm() < 1e-12);
      AlgebraVector mx{-x.m, &G};
      CHECK(fro_dist(g.m * exp_group(mx).m, eye(G.n())) < 1e-12);
      // Oracle: Pade-based matrix exponential on the raw entries.
      Eigen::MatrixXcd dense = x.m;
      CHECK(fro_dist(g.m, Mat(dense.exp())) < 1e-12);
    }
  }
}

TEST_CASE("log_group: local inverse and round trips") {
  for (auto id : kGroups) {
    const CompactGroup& G = CompactGroup::of(id);
    CHECK(log_element(G, eye(G.n())).norm() == 0.0);
    Rng rng(23);
    for (int t = 0; t < 50; ++t) {
      AlgebraVector x = random_algebra(G, rng, 0.3);
      GroupElement g = exp_group(x);
      CHECK(fro_dist(log_group(g).m, x.m) < 1e-10);
    }
    for (int t = 0; t < 50; ++t) {
      GroupElement g = random_group_element(G, rng, 0.9);
      Mat lg = log_element(G, g.m);
      CHECK(G.in_algebra(lg, 1e-10));
      CHECK(fro_dist(exp_algebra(G, lg), g.m) < 1e-10);
    }
  }
}

TEST_CASE("log_group: branch handling") {
  const CompactGroup& su2 = CompactGroup::of("su2");
  Mat x = 2.0 * std::sqrt(2.0) * M_PI * su2.basis()[1];  // rotation by pi
  CHECK_THROWS_AS((void)log_element(su2, exp_algebra(su2, x)), branch_error);

  const CompactGroup& so3 = CompactGroup::of("so3");
  Mat y = std::sqrt(2.0) * M_PI * so3.basis()[2];
  CHECK_THROWS_AS((void)log_element(so3, exp_algebra(so3, y)), branch_error);

  // Angles (2.2, 2.2, 1.883) sum to 2pi; the log must rewrap to stay traceless.
  const CompactGroup& su3 = CompactGroup::of("su3");
  Mat d = Mat::Zero(3, 3);
  d(0, 0) = cplx(0, 2.2), d(1, 1) = cplx(0, 2.2), d(2, 2) = cplx(0, -4.4);
  Mat g = exp_algebra(su3, d);
  Mat lg = log_element(su3, g);
  CHECK(std::abs(lg.trace()) < 1e-10);
  CHECK(fro_dist(exp_algebra(su3, lg), g) < 1e-10);
}

TEST_CASE("root_decomposition: su2 root value 2*theta") {
  const CompactGroup& G = CompactGroup::of("su2");
  double theta = 0.37;
  Vecd c = Vecd::Zero(3);
  c[0] = 2.0 * std::sqrt(2.0) * theta;  // v = diag(i theta, -i theta)
  AlgebraVector v{G.from_coords(c), &G};
  CHECK(std::abs(v.m(0, 0).imag() - theta) < 1e-15);

  TorusDecomposition dec = root_decomposition(v);
  REQUIRE(dec.roots.size() == 1);
  CHECK(dec.zero_space_basis.empty());
  CHECK(dec.torus_basis.size() == 1);
  CHECK(dec.roots[0].alpha_value == doctest::Approx(2.0 * theta).epsilon(1e-12));
}

TEST_CASE("root_decomposition: so3 root value = rotation angle") {
  const CompactGroup& G = CompactGroup::of("so3");
  double theta = 1.21;
  Vecd c = Vecd::Zero(3);
  c[0] = std::sqrt(2.0) * theta;
  AlgebraVector v{G.from_coords(c), &G};
  TorusDecomposition dec = root_decomposition(v);
  REQUIRE(dec.roots.size() == 1);
  CHECK(dec.roots[0].alpha_value == doctest::Approx(theta).epsilon(1e-12));
}

TEST_CASE("root_decomposition: su3 generic and pair relations") {
  const CompactGroup& G = CompactGroup::of("su3");
  Rng rng(31);
  AlgebraVector v = random_torus_vector(G, rng);
  TorusDecomposition dec = root_decomposition(v);
  REQUIRE(dec.roots.size() == 3);
  CHECK(dec.torus_basis.size() == 2);
  CHECK(dec.zero_space_basis.empty());
  CHECK(2 * 3 + 0 + 2 == G.dim());
  CHECK(dec.roots[0].alpha_value >= dec.roots[1].alpha_value);
  CHECK(dec.roots[1].alpha_value >= dec.roots[2].alpha_value);

  for (auto id : kGroups) {
    const CompactGroup& H = CompactGroup::of(id);
    Rng r2(41);
    AlgebraVector w = random_torus_vector(H, r2);
    TorusDecomposition d2 = root_decomposition(w);
    std::vector<AlgebraVector> all = d2.torus_basis;
    for (const auto& rt : d2.roots) {
      CHECK(rt.multiplicity_index == 1);
      Mat r1 = comm(w.m, rt.e.m) - rt.alpha_value * rt.e_k.m;
      Mat r2m = comm(w.m, rt.e_k.m) + rt.alpha_value * rt.e.m;
      CHECK(r1.norm() < 1e-10);
      CHECK(r2m.norm() < 1e-10);
      all.push_back(rt.e);
      all.push_back(rt.e_k);
    }
    CHECK(static_cast<int>(all.size()) == H.dim());
    for (size_t a = 0; a < all.size(); ++a)
      for (size_t b = 0; b < all.size(); ++b) {
        double expect = a == b ? 1.0 : 0.0;
        CHECK(std::abs(inner(all[a], all[b]) - expect) < 1e-10);
      }
  }
}

TEST_CASE("root_decomposition: degeneracy rejected") {
  const CompactGroup& su2 = CompactGroup::of("su2");
  AlgebraVector zero{Mat::Zero(2, 2), &su2};
  CHECK_THROWS_AS((void)root_decomposition(zero), degeneracy_error);

  // diag(i, 0, -i): root gaps 1, 1, 2 collide.
  const CompactGroup& su3 = CompactGroup::of("su3");
  Mat d = Mat::Zero(3, 3);
  d(0, 0) = cplx(0, 1), d(2, 2) = cplx(0, -1);
  CHECK_THROWS_AS((void)root_decomposition({d, &su3}), degeneracy_error);

  Rng rng(5);
  AlgebraVector notorus = random_algebra(su3, rng);
  CHECK_THROWS_AS((void)root_decomposition(notorus), std::domain_error);
}
