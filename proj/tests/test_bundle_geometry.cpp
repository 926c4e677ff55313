#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "holab/bundle.hpp"
#include "holab/generators.hpp"

using namespace holab;

namespace {

double loop_dist(const AlgebraLoop& a, const AlgebraLoop& b) {
  double worst = 0.0;
  for (int i = 0; i <= a.N; ++i) worst = std::max(worst, (a.samples[i] - b.samples[i]).norm());
  return worst;
}

double trace_power_gap(const CompactGroup& G, const Mat& a, const Mat& b) {
  Mat pa = eye(G.n()), pb = eye(G.n());
  double worst = 0.0;
  for (int k = 1; k <= G.n(); ++k) {
    pa = pa * a;
    pb = pb * b;
    worst = std::max(worst, std::abs(pa.trace() - pb.trace()));
  }
  return worst;
}

Vecd vec2(double a, double b) {
  Vecd v(2);
  v << a, b;
  return v;
}

}  // namespace

TEST_CASE("base charts: flat metric, conformal sphere, consistent transition") {
  BaseManifold T = BaseManifold::flat_torus(1.0, 1.0);
  CHECK((T.metric(vec2(0.3, 0.8)) - Matd::Identity(2, 2)).norm() == 0.0);

  BaseManifold S = BaseManifold::round_sphere(1.4);
  Rng rng(derive_seed(101, "charts"));
  for (int trial = 0; trial < 5; ++trial) {
    Vecd x = vec2(rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0));
    if (x.norm() < 0.2) x += vec2(0.5, 0.5);
    Matd g0 = S.metric(x);
    double lam = 2.0 * S.R * S.R / (S.R * S.R + x.squaredNorm());
    CHECK((g0 - lam * lam * Matd::Identity(2, 2)).norm() < 1e-14);

    // The opposite stereographic chart carries the same conformal metric, so
    // pulling it back through the transition must return g0.
    Vecd xp = S.chart1_point(x);
    Matd J = S.chart1_jacobian(x);
    CHECK((J.transpose() * S.metric(xp) * J - g0).norm() < 1e-10);
    CHECK((S.chart1_point(xp) - x).norm() < 1e-12);
  }
  CHECK_THROWS_AS(S.chart1_point(Vecd::Zero(2)), std::domain_error);
  CHECK_THROWS_AS(T.chart1_point(vec2(0.1, 0.1)), std::domain_error);
}

TEST_CASE("connection forms evaluate linearly in the tangent") {
  const CompactGroup& G = CompactGroup::of("su3");
  BaseManifold T = BaseManifold::flat_torus(1.0, 2.0);
  BaseManifold S = BaseManifold::round_sphere(1.0);
  Rng rng(derive_seed(101, "linearity"));
  ConnectionForm wt = random_fourier_connection(T, G, rng, 2, 0.5);
  ConnectionForm ws = random_harmonic_connection(S, G, rng, 3, 0.5);
  for (int trial = 0; trial < 4; ++trial) {
    Vecd x = vec2(rng.uniform(), rng.uniform());
    Vecd v = vec2(rng.normal(), rng.normal());
    Vecd w = vec2(rng.normal(), rng.normal());
    for (const ConnectionForm* f : {&wt, &ws}) {
      Mat lhs = f->value(x, Vecd(2.0 * v - 3.0 * w));
      Mat rhs = 2.0 * f->value(x, v) - 3.0 * f->value(x, w);
      CHECK(fro_dist(lhs, rhs) < 1e-13);
      CHECK(G.in_algebra(f->value(x, v), 1e-10));
    }
  }
  ConnectionForm z = zero_connection(T, G);
  CHECK(z.component(0, vec2(0.2, 0.7)).norm() == 0.0);
  CHECK_THROWS_AS(wt.component(2, vec2(0.0, 0.0)), std::domain_error);
}

TEST_CASE("horizontal lift: flat and constant closed forms, ODE residual") {
  const CompactGroup& G = CompactGroup::of("su2");
  BaseManifold T = BaseManifold::flat_torus(1.5, 1.0);
  BaseLoop c = BaseLoop::line(T, vec2(0.1, 0.4), 1, 0);

  GroupPath flat = horizontal_lift(c, zero_connection(T, G), 256);
  for (const Mat& s : flat.samples) CHECK(fro_dist(s, eye(2)) < 1e-13);

  // omega0 = A dx^1 with a constant coefficient: h(t) = exp(-t L1 A).
  Mat A = 0.7 * G.basis()[0] - 0.4 * G.basis()[2];
  ConnectionForm w0 = fourier_connection(T, G, {{0, 0, 0, 0.7, 0.0}, {2, 0, 0, -0.4, 0.0}}, {});
  GroupPath h = horizontal_lift(c, w0, 256);
  for (int i = 0; i <= 256; ++i) {
    double t = i / 256.0;
    CHECK(fro_dist(h.samples[i], exp_algebra(G, Mat(-t * T.L1 * A))) < 1e-12);
  }

  // Generic form: five-point stencil residual of h' + omega0(c') h.
  Rng rng(derive_seed(101, "lift"));
  ConnectionForm wg = random_fourier_connection(T, G, rng, 2, 0.2);
  const int N = 1024;
  GroupPath hg = horizontal_lift(c, wg, N);
  double worst = 0.0;
  for (int i = 2; i <= N - 2; ++i) {
    double t = static_cast<double>(i) / N;
    Mat d = (-hg.samples[i + 2] + 8.0 * hg.samples[i + 1] - 8.0 * hg.samples[i - 1] +
             hg.samples[i - 2]) *
            (N / 12.0);
    worst = std::max(worst, (d + wg.value(c.point(t), c.velocity(t)) * hg.samples[i]).norm());
  }
  CHECK(worst < 1e-8);
  for (const Mat& s : hg.samples) CHECK(G.in_group(s, 1e-11));
}

TEST_CASE("gauge maps: analytic right logarithmic derivative") {
  const CompactGroup& G = CompactGroup::of("su2");
  BaseManifold T = BaseManifold::flat_torus(1.0, 1.3);
  BaseManifold S = BaseManifold::round_sphere(1.0);
  Rng rng(derive_seed(101, "gauge maps"));
  GaugeMap gt = random_gauge_map(T, G, rng, 2, 0.4);
  GaugeMap gs = random_gauge_map(S, G, rng, 0, 0.4);
  const double eps = 1e-5;
  for (int trial = 0; trial < 4; ++trial) {
    Vecd x = vec2(rng.uniform(-0.8, 0.8), rng.uniform(-0.8, 0.8));
    for (const GaugeMap* g : {&gt, &gs}) {
      for (int j = 0; j < 2; ++j) {
        Vecd e = Vecd::Zero(2);
        e[j] = eps;
        Mat fd = (g->value(Vecd(x + e)) - g->value(Vecd(x - e))) / (2.0 * eps);
        CHECK(fro_dist(Mat(fd * g->value(x).adjoint()), g->dvalue_rt(j, x)) < 1e-8);
      }
      CHECK(G.in_group(g->value(x), 1e-12));
    }
  }
  GaugeMap gb = based_gauge_map(gt, vec2(0.2, 0.9));
  CHECK(fro_dist(gb.value(vec2(0.2, 0.9)), eye(2)) < 1e-14);
}

TEST_CASE("pull-back along the frame: zero, affine, closure") {
  const CompactGroup& G = CompactGroup::of("su3");
  BaseManifold T = BaseManifold::flat_torus(1.0, 1.0);
  BaseLoop c = BaseLoop::circle(T, vec2(0.5, 0.5), 0.3);
  Rng rng(derive_seed(101, "mu"));
  ConnectionForm w0 = random_fourier_connection(T, G, rng, 2, 0.3);
  ConnectionForm d = random_fourier_connection(T, G, rng, 2, 0.4);
  LoopFrame f = make_frame(c, w0, 512);

  AlgebraLoop self = mu_c(w0, f);
  for (const Mat& s : self.samples) CHECK(s.norm() == 0.0);

  // mu_c(omega0 + s d) = s mu_c(omega0 + d) pointwise.
  AlgebraLoop unit = mu_c(connection_sum(w0, 1.0, d), f);
  AlgebraLoop scaled = mu_c(connection_sum(w0, 0.37, d), f);
  AlgebraLoop want = loop_axpy(0.37, unit, zero_loop(G, 512));
  CHECK(loop_dist(scaled, want) < 1e-12);

  // Open unless the reference holonomy fixes the endpoint sample; the
  // endpoint is then its Ad-translate.
  CHECK_FALSE(unit.closed);
  Mat h1 = f.sigma.samples[f.N];
  CHECK(fro_dist(unit.samples[f.N], Mat(h1.adjoint() * unit.samples[0] * h1)) < 1e-12);

  LoopFrame flat = make_frame(c, zero_connection(T, G), 512);
  AlgebraLoop closed = mu_c(d, flat);
  CHECK(closed.closed);
  CHECK((closed.samples[0] - closed.samples[closed.N]).norm() < 1e-10);
}

TEST_CASE("holonomy: dual-route factorization agreement") {
  Rng rng(derive_seed(101, "factorization"));
  for (const char* id : {"su2", "su3", "so3"}) {
    const CompactGroup& G = CompactGroup::of(id);
    BaseManifold T = BaseManifold::flat_torus(1.0, 1.4);
    for (int trial = 0; trial < 3; ++trial) {
      BaseLoop c = random_base_loop(T, rng);
      ConnectionForm w0 = trial == 0 ? zero_connection(T, G)
                                     : random_fourier_connection(T, G, rng, 2, 0.25);
      ConnectionForm w = connection_sum(w0, 1.0, random_fourier_connection(T, G, rng, 2, 0.3));
      LoopFrame f = make_frame(c, w0, 1024);
      CHECK(fro_dist(hol_c(w, f), hol_c_direct(w, f)) < 1e-8);
    }
  }

  // Sphere base with a spherical-harmonic form.
  const CompactGroup& G = CompactGroup::of("su2");
  BaseManifold S = BaseManifold::round_sphere(1.0);
  BaseLoop lat = BaseLoop::latitude(S, 0.8);
  ConnectionForm w0 = random_harmonic_connection(S, G, rng, 2, 0.2);
  ConnectionForm w = connection_sum(w0, 1.0, random_harmonic_connection(S, G, rng, 3, 0.3));
  LoopFrame f = make_frame(lat, w0, 1024);
  CHECK(fro_dist(hol_c(w, f), hol_c_direct(w, f)) < 1e-8);
  CHECK(G.in_group(hol_c(w, f), 1e-10));
}

TEST_CASE("holonomy: constant abelian coefficient integrates in closed form") {
  const CompactGroup& G = CompactGroup::of("su2");
  BaseManifold T = BaseManifold::flat_torus(0.8, 1.0);
  BaseLoop c = BaseLoop::line(T, vec2(0.0, 0.25), 1, 0);
  Mat A = 1.3 * G.basis()[1];
  ConnectionForm w = fourier_connection(T, G, {{1, 0, 0, 1.3, 0.0}}, {});
  LoopFrame f = make_frame(c, zero_connection(T, G), 512);
  Mat want = exp_algebra(G, Mat(T.L1 * A));
  CHECK(fro_dist(hol_c(w, f), want) < 1e-12);
  CHECK(fro_dist(hol_c_direct(w, f), want) < 1e-12);
}

TEST_CASE("gauge action intertwines with the pull-back through lambda_c") {
  Rng rng(derive_seed(101, "lambda"));
  for (const char* id : {"su2", "so3"}) {
    const CompactGroup& G = CompactGroup::of(id);
    BaseManifold T = BaseManifold::flat_torus(1.0, 1.0);
    BaseLoop c = BaseLoop::line(T, vec2(0.3, 0.6), 1, 0);
    GaugeMap g = random_gauge_map(T, G, rng, 1, 0.2);
    for (bool flat : {true, false}) {
      ConnectionForm w0 =
          flat ? zero_connection(T, G) : random_fourier_connection(T, G, rng, 1, 0.2);
      ConnectionForm w = connection_sum(w0, 1.0, random_fourier_connection(T, G, rng, 1, 0.3));
      LoopFrame f = make_frame(c, w0, 1024);
      AlgebraLoop lhs = mu_c(gauge_transform(g, w), f);
      AlgebraLoop rhs = gauge_act(lambda_c(g, f), mu_c(w, f));
      CHECK(loop_dist(lhs, rhs) < 1e-8);
    }
  }
}

TEST_CASE("holonomy translates by the lambda endpoints under gauge maps") {
  Rng rng(derive_seed(101, "translation"));
  const CompactGroup& G = CompactGroup::of("su3");
  BaseManifold T = BaseManifold::flat_torus(1.0, 1.0);
  BaseLoop c = BaseLoop::circle(T, vec2(0.4, 0.5), 0.25);

  ConnectionForm w0 = random_fourier_connection(T, G, rng, 2, 0.25);
  ConnectionForm w = connection_sum(w0, 1.0, random_fourier_connection(T, G, rng, 2, 0.3));
  GaugeMap g = random_gauge_map(T, G, rng, 2, 0.3);
  LoopFrame f = make_frame(c, w0, 1024);

  GroupPath lam = lambda_c(g, f);
  Mat lhs = hol_c(gauge_transform(g, w), f);
  Mat rhs = lam.samples[0] * hol_c(w, f) * lam.samples[f.N].adjoint();
  CHECK(fro_dist(lhs, rhs) < 1e-8);

  // Flat reference: the translation collapses to conjugation by the gauge
  // value at the basepoint.
  LoopFrame flat = make_frame(c, zero_connection(T, G), 1024);
  Mat g0 = g.value(c.point(0.0));
  CHECK(fro_dist(hol_c(gauge_transform(g, w), flat),
                 Mat(g0 * hol_c(w, flat) * g0.adjoint())) < 1e-8);

  // Based gauge maps leave the holonomy fixed even for a curved reference.
  GaugeMap gb = based_gauge_map(g, c.point(0.0));
  CHECK(fro_dist(hol_c(gauge_transform(gb, w), f), hol_c(w, f)) < 1e-8);
}

TEST_CASE("trace powers of the holonomy are gauge invariants") {
  Rng rng(derive_seed(101, "class functions"));
  for (const char* id : {"su2", "su3", "so3"}) {
    const CompactGroup& G = CompactGroup::of(id);
    BaseManifold T = BaseManifold::flat_torus(1.0, 1.0);
    BaseLoop c = BaseLoop::line(T, vec2(0.2, 0.7), 0, 1);
    LoopFrame f = make_frame(c, zero_connection(T, G), 1024);
    ConnectionForm w = random_fourier_connection(T, G, rng, 2, 0.4);
    GaugeMap g = random_gauge_map(T, G, rng, 2, 0.4);
    CHECK(class_function_invariance(w, g, f) < 1e-8);
  }

  // Two constant forms with different torus angles sit in different orbits;
  // the same comparison must separate them.
  const CompactGroup& G = CompactGroup::of("su2");
  BaseManifold T = BaseManifold::flat_torus(1.0, 1.0);
  BaseLoop c = BaseLoop::line(T, vec2(0.0, 0.0), 1, 0);
  LoopFrame f = make_frame(c, zero_connection(T, G), 512);
  ConnectionForm wa = fourier_connection(T, G, {{0, 0, 0, 0.7, 0.0}}, {});
  ConnectionForm wb = fourier_connection(T, G, {{0, 0, 0, 1.9, 0.0}}, {});
  CHECK(trace_power_gap(G, hol_c(wa, f), hol_c(wb, f)) > 1e-3);
}

TEST_CASE("curve-supported tangents: homothety constant equals the speed squared") {
  Rng rng(derive_seed(101, "homothety"));
  const int N = 512;
  BaseManifold unitT = BaseManifold::flat_torus(1.0, 1.0);
  BaseManifold longT = BaseManifold::flat_torus(2.0 * M_PI, 1.0);
  BaseManifold S = BaseManifold::round_sphere(1.0);
  std::vector<BaseLoop> loops = {
      BaseLoop::line(unitT, vec2(0.1, 0.2), 1, 0),             // a = 1
      BaseLoop::line(longT, vec2(0.0, 0.5), 1, 0),             // a = 2 pi
      BaseLoop::circle(unitT, vec2(0.5, 0.5), 5.0 / (2.0 * M_PI)),  // a = 5
      BaseLoop::latitude(S, 1.0),
  };
  for (const char* id : {"su2", "su3"}) {
    const CompactGroup& G = CompactGroup::of(id);
    for (const BaseLoop& c : loops) {
      const BaseManifold& B = *c.base;
      ConnectionForm w0 = B.kind == BaseManifold::Kind::flat_torus
                              ? random_fourier_connection(B, G, rng, 1, 0.2)
                              : random_harmonic_connection(B, G, rng, 2, 0.2);
      AlgebraLoop xi = random_band_loop(G, rng, N, 3, 0.6);
      HomothetyReport rep = check_homothety(c, xi, w0);
      CHECK(rep.speed_residual < 1e-12);
      CHECK(rep.pointwise_residual < 1e-10);
      CHECK(rep.ratio_residual < 1e-8);
      CHECK(rep.speed ==
            doctest::Approx(std::sqrt(c.velocity(0.0).dot(B.metric(c.point(0.0)) * c.velocity(0.0))))
                .epsilon(1e-12));
    }
  }

  // A chart circle away from the sphere origin has non-constant metric speed.
  BaseLoop bad = BaseLoop::circle(S, vec2(0.6, 0.0), 0.4);
  AlgebraLoop xi = random_band_loop(CompactGroup::of("su2"), rng, N, 2, 0.5);
  CHECK_THROWS_AS(check_homothety(bad, xi, zero_connection(S, CompactGroup::of("su2"))),
                  std::domain_error);
}

TEST_CASE("curve-supported tangents: pairing reproduces the pull-back differential") {
  Rng rng(derive_seed(101, "pairing"));
  const CompactGroup& G = CompactGroup::of("su2");
  BaseManifold T = BaseManifold::flat_torus(1.0, 1.0);
  BaseLoop c = BaseLoop::circle(T, vec2(0.4, 0.6), 0.3);
  const int N = 512;
  ConnectionForm w0 = random_fourier_connection(T, G, rng, 1, 0.2);
  CurveSupportedForm A{make_frame(c, w0, N), random_band_loop(G, rng, N, 3, 0.7)};

  ConnectionForm probe = random_fourier_connection(T, G, rng, 2, 0.5);
  double a2 = c.speed() * c.speed();
  // mu_c is affine with mu_c(omega0) = 0, so this difference quotient is the
  // exact differential of the pull-back in the probe direction.
  AlgebraLoop dmu = mu_c(connection_sum(w0, 1.0, probe), A.frame);
  CHECK(std::abs(A.pairing(probe) - l2_inner(A.xi, dmu) / a2) < 1e-10);
}

TEST_CASE("pull-back differential annihilates forms vanishing on the loop") {
  const CompactGroup& G = CompactGroup::of("su3");
  BaseManifold T = BaseManifold::flat_torus(1.0, 1.0);
  const double y0 = 0.35;
  BaseLoop c = BaseLoop::line(T, vec2(0.15, y0), 1, 0);
  // Both components proportional to sin(2 pi (x2 - y0)); zero on the loop.
  const double ph0 = 2.0 * M_PI * y0;
  std::vector<FourierTerm2D> t1 = {{0, 0, 1, -std::sin(ph0), std::cos(ph0)}};
  std::vector<FourierTerm2D> t2 = {{3, 0, 1, -0.8 * std::sin(ph0), 0.8 * std::cos(ph0)}};
  ConnectionForm vanishing = fourier_connection(T, G, t1, t2);

  Rng rng(derive_seed(101, "annihilation"));
  ConnectionForm w0 = random_fourier_connection(T, G, rng, 1, 0.3);
  LoopFrame f = make_frame(c, w0, 512);
  AlgebraLoop d = mu_c(connection_sum(w0, 1.0, vanishing), f);
  for (const Mat& s : d.samples) CHECK(s.norm() < 1e-14);
  CHECK(fro_dist(hol_c(connection_sum(w0, 1.0, vanishing), f), hol_c(w0, f)) < 1e-13);
}

TEST_CASE("holonomy is stable under grid refinement") {
  Rng rng(derive_seed(101, "refinement"));
  const CompactGroup& G = CompactGroup::of("su3");
  BaseManifold T = BaseManifold::flat_torus(1.0, 1.0);
  BaseLoop c = BaseLoop::circle(T, vec2(0.5, 0.5), 0.3);
  ConnectionForm w0 = random_fourier_connection(T, G, rng, 2, 0.2);
  ConnectionForm w = connection_sum(w0, 1.0, random_fourier_connection(T, G, rng, 2, 0.3));
  Mat coarse = hol_c(w, make_frame(c, w0, 512));
  Mat fine = hol_c(w, make_frame(c, w0, 1024));
  CHECK(fro_dist(coarse, fine) < 1e-9);
}
