#include "holab/bundle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace holab {

namespace {

Vecd vec2(double a, double b) {
  Vecd v(2);
  v << a, b;
  return v;
}

// theta measured from the projection pole, so the chart origin is theta = pi.
void sphere_angles(const BaseManifold& B, const Vecd& x, double& theta, double& phi) {
  const double rho2 = x.squaredNorm();
  const double R2 = B.R * B.R;
  theta = std::acos(std::clamp((rho2 - R2) / (rho2 + R2), -1.0, 1.0));
  phi = std::atan2(x[1], x[0]);
}

// Ambient coordinates of the chart point on the radius-R sphere, divided by R.
Vecd ambient_point(const BaseManifold& B, const Vecd& x) {
  const double s = x.squaredNorm() + B.R * B.R;
  Vecd n(3);
  n << 2.0 * B.R * x[0] / s, 2.0 * B.R * x[1] / s, (x.squaredNorm() - B.R * B.R) / s;
  return n;
}

Matd ambient_jacobian(const BaseManifold& B, const Vecd& x) {
  const double R = B.R;
  const double s = x.squaredNorm() + R * R;
  Matd J(3, 2);
  for (int j = 0; j < 2; ++j) {
    J(0, j) = 2.0 * R * ((j == 0 ? s : 0.0) - 2.0 * x[0] * x[j]) / (s * s);
    J(1, j) = 2.0 * R * ((j == 1 ? s : 0.0) - 2.0 * x[1] * x[j]) / (s * s);
    J(2, j) = 4.0 * R * R * x[j] / (s * s);
  }
  return J;
}

Mat gauge_chi_raw(const GaugeMap& g, const Vecd& x) {
  const CompactGroup& G = *g.group;
  Mat acc = Mat::Zero(G.n(), G.n());
  if (g.base->kind == BaseManifold::Kind::flat_torus) {
    for (const FourierTerm2D& t : g.fourier) {
      const double ph = 2.0 * M_PI * (t.p * x[0] / g.base->L1 + t.q * x[1] / g.base->L2);
      acc += (t.amp_c * std::cos(ph) + t.amp_s * std::sin(ph)) * G.basis()[t.mu];
    }
  } else {
    const Vecd n = ambient_point(*g.base, x);
    if (!g.ambient.empty()) acc += g.ambient[0];
    for (int i = 1; i < static_cast<int>(g.ambient.size()); ++i) acc += n[i - 1] * g.ambient[i];
  }
  return acc;
}

Mat gauge_dchi_raw(const GaugeMap& g, int j, const Vecd& x) {
  const CompactGroup& G = *g.group;
  Mat acc = Mat::Zero(G.n(), G.n());
  if (g.base->kind == BaseManifold::Kind::flat_torus) {
    for (const FourierTerm2D& t : g.fourier) {
      const double ph = 2.0 * M_PI * (t.p * x[0] / g.base->L1 + t.q * x[1] / g.base->L2);
      const double rate =
          2.0 * M_PI * (j == 0 ? t.p / g.base->L1 : t.q / g.base->L2);
      acc += rate * (-t.amp_c * std::sin(ph) + t.amp_s * std::cos(ph)) * G.basis()[t.mu];
    }
  } else {
    const Matd J = ambient_jacobian(*g.base, x);
    for (int i = 1; i < static_cast<int>(g.ambient.size()); ++i) acc += J(i - 1, j) * g.ambient[i];
  }
  return acc;
}

double trapezoid(const std::vector<double>& f) {
  const int N = static_cast<int>(f.size()) - 1;
  double acc = 0.5 * (f[0] + f[N]);
  for (int i = 1; i < N; ++i) acc += f[i];
  return acc / N;
}

}  // namespace

BaseManifold BaseManifold::flat_torus(double L1, double L2) {
  if (L1 <= 0.0 || L2 <= 0.0) throw std::domain_error("torus periods must be positive");
  BaseManifold b;
  b.kind = Kind::flat_torus;
  b.L1 = L1;
  b.L2 = L2;
  return b;
}

BaseManifold BaseManifold::round_sphere(double R) {
  if (R <= 0.0) throw std::domain_error("sphere radius must be positive");
  BaseManifold b;
  b.kind = Kind::round_sphere;
  b.R = R;
  return b;
}

Matd BaseManifold::metric(const Vecd& x) const {
  Matd g = Matd::Identity(2, 2);
  if (kind == Kind::round_sphere) {
    const double lam = 2.0 * R * R / (R * R + x.squaredNorm());
    g *= lam * lam;
  }
  return g;
}

Vecd BaseManifold::chart1_point(const Vecd& x) const {
  if (kind != Kind::round_sphere) throw std::domain_error("chart transition is sphere-only");
  const double rho2 = x.squaredNorm();
  if (rho2 == 0.0) throw std::domain_error("chart transition undefined at the origin");
  return Vecd(R * R * x / rho2);
}

Matd BaseManifold::chart1_jacobian(const Vecd& x) const {
  if (kind != Kind::round_sphere) throw std::domain_error("chart transition is sphere-only");
  const double rho2 = x.squaredNorm();
  if (rho2 == 0.0) throw std::domain_error("chart transition undefined at the origin");
  Matd J(2, 2);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      J(i, j) = R * R * ((i == j ? rho2 : 0.0) - 2.0 * x[i] * x[j]) / (rho2 * rho2);
  return J;
}

Mat ConnectionForm::component(int j, const Vecd& x) const {
  if (j < 0 || j > 1) throw std::domain_error("chart index out of range");
  if (!comp) return Mat::Zero(group->n(), group->n());
  return comp(j, x);
}

Mat ConnectionForm::value(const Vecd& x, const Vecd& tangent) const {
  return tangent[0] * component(0, x) + tangent[1] * component(1, x);
}

ConnectionForm zero_connection(const BaseManifold& base, const CompactGroup& G) {
  ConnectionForm w;
  w.base = &base;
  w.group = &G;
  return w;
}

ConnectionForm fourier_connection(const BaseManifold& base, const CompactGroup& G,
                                  std::vector<FourierTerm2D> comp1,
                                  std::vector<FourierTerm2D> comp2) {
  if (base.kind != BaseManifold::Kind::flat_torus)
    throw std::domain_error("fourier_connection lives on the torus");
  ConnectionForm w;
  w.base = &base;
  w.group = &G;
  const BaseManifold* bp = &base;
  const CompactGroup* gp = &G;
  std::vector<std::vector<FourierTerm2D>> terms{std::move(comp1), std::move(comp2)};
  w.comp = [bp, gp, terms](int j, const Vecd& x) {
    Mat acc = Mat::Zero(gp->n(), gp->n());
    for (const FourierTerm2D& t : terms[j]) {
      const double ph = 2.0 * M_PI * (t.p * x[0] / bp->L1 + t.q * x[1] / bp->L2);
      acc += (t.amp_c * std::cos(ph) + t.amp_s * std::sin(ph)) * gp->basis()[t.mu];
    }
    return acc;
  };
  return w;
}

ConnectionForm harmonic_connection(const BaseManifold& base, const CompactGroup& G,
                                   std::vector<SphereTerm> terms) {
  if (base.kind != BaseManifold::Kind::round_sphere)
    throw std::domain_error("harmonic_connection lives on the sphere");
  for (const SphereTerm& t : terms)
    if (t.m < 0 || t.m > t.l) throw std::domain_error("harmonic order out of range");
  ConnectionForm w;
  w.base = &base;
  w.group = &G;
  const BaseManifold* bp = &base;
  const CompactGroup* gp = &G;
  w.comp = [bp, gp, terms](int j, const Vecd& x) {
    double theta, phi;
    sphere_angles(*bp, x, theta, phi);
    Mat acc = Mat::Zero(gp->n(), gp->n());
    for (const SphereTerm& t : terms) {
      if (t.j != j) continue;
      const double angular = t.sin_phase ? std::sin(t.m * phi) : std::cos(t.m * phi);
      acc += t.amp * std::sph_legendre(t.l, t.m, theta) * angular * gp->basis()[t.mu];
    }
    return acc;
  };
  return w;
}

ConnectionForm connection_sum(const ConnectionForm& a, double s, const ConnectionForm& b) {
  if (a.base != b.base || a.group != b.group)
    throw std::domain_error("connection_sum needs one base and one group");
  ConnectionForm w;
  w.base = a.base;
  w.group = a.group;
  ConnectionForm ca = a, cb = b;
  w.comp = [ca, cb, s](int j, const Vecd& x) {
    return Mat(ca.component(j, x) + s * cb.component(j, x));
  };
  return w;
}

Mat GaugeMap::chi(const Vecd& x) const {
  Mat c = gauge_chi_raw(*this, x);
  if (based) c -= gauge_chi_raw(*this, x0);
  return c;
}

Mat GaugeMap::dchi(int j, const Vecd& x) const { return gauge_dchi_raw(*this, j, x); }

Mat GaugeMap::value(const Vecd& x) const { return exp_algebra(*group, chi(x)); }

Mat GaugeMap::dvalue_rt(int j, const Vecd& x) const { return dexp_right(chi(x), dchi(j, x)); }

ConnectionForm gauge_transform(const GaugeMap& g, const ConnectionForm& omega) {
  if (g.base != omega.base || g.group != omega.group)
    throw std::domain_error("gauge_transform needs one base and one group");
  ConnectionForm w;
  w.base = omega.base;
  w.group = omega.group;
  GaugeMap gc = g;
  ConnectionForm oc = omega;
  w.comp = [gc, oc](int j, const Vecd& x) {
    const Mat gh = gc.value(x);
    return Mat(gh * oc.component(j, x) * gh.adjoint() - gc.dvalue_rt(j, x));
  };
  return w;
}

BaseLoop BaseLoop::line(const BaseManifold& base, const Vecd& p0, int m, int n) {
  if (base.kind != BaseManifold::Kind::flat_torus)
    throw std::domain_error("line loops live on the torus");
  if (m == 0 && n == 0) throw std::domain_error("line loop needs a nonzero winding");
  BaseLoop c;
  c.base = &base;
  c.kind = Kind::torus_line;
  c.p0 = p0;
  c.m = m;
  c.n = n;
  return c;
}

BaseLoop BaseLoop::circle(const BaseManifold& base, const Vecd& center, double r) {
  if (r <= 0.0) throw std::domain_error("circle radius must be positive");
  BaseLoop c;
  c.base = &base;
  c.kind = Kind::torus_circle;
  c.p0 = center;
  c.r = r;
  return c;
}

BaseLoop BaseLoop::latitude(const BaseManifold& base, double rho0) {
  if (base.kind != BaseManifold::Kind::round_sphere)
    throw std::domain_error("latitude loops live on the sphere");
  if (rho0 <= 0.0) throw std::domain_error("latitude radius must be positive");
  BaseLoop c;
  c.base = &base;
  c.kind = Kind::sphere_latitude;
  c.p0 = Vecd::Zero(2);
  c.r = rho0;
  return c;
}

Vecd BaseLoop::point(double t) const {
  switch (kind) {
    case Kind::torus_line:
      return Vecd(p0 + t * vec2(m * base->L1, n * base->L2));
    case Kind::torus_circle:
    case Kind::sphere_latitude:
      return Vecd(p0 + r * vec2(std::cos(2.0 * M_PI * t), std::sin(2.0 * M_PI * t)));
  }
  throw std::logic_error("unreachable");
}

Vecd BaseLoop::velocity(double t) const {
  switch (kind) {
    case Kind::torus_line:
      return vec2(m * base->L1, n * base->L2);
    case Kind::torus_circle:
    case Kind::sphere_latitude:
      return Vecd(2.0 * M_PI * r *
                  vec2(-std::sin(2.0 * M_PI * t), std::cos(2.0 * M_PI * t)));
  }
  throw std::logic_error("unreachable");
}

double BaseLoop::speed() const {
  const Vecd v = velocity(0.0);
  return std::sqrt(v.dot(base->metric(point(0.0)) * v));
}

GroupPath horizontal_lift(const BaseLoop& c, const ConnectionForm& omega0, int N,
                          Scheme scheme) {
  const CompactGroup& G = *omega0.group;
  auto A = [&](double t) { return Mat(-omega0.value(c.point(t), c.velocity(t))); };
  return integrate_frame(A, G, N, scheme, Side::right);
}

LoopFrame make_frame(const BaseLoop& c, const ConnectionForm& omega0, int N, Scheme scheme) {
  LoopFrame f;
  f.c = c;
  f.omega0 = omega0;
  f.sigma = horizontal_lift(c, omega0, N, scheme);
  f.N = N;
  f.scheme = scheme;
  return f;
}

AlgebraLoop mu_c(const ConnectionForm& omega, const LoopFrame& f) {
  if (omega.group != f.omega0.group || omega.base != f.omega0.base)
    throw std::domain_error("mu_c: omega does not match the frame");
  const CompactGroup& G = *omega.group;
  AlgebraLoop u;
  u.group = &G;
  u.N = f.N;
  u.samples.resize(f.N + 1);
  for (int i = 0; i <= f.N; ++i) {
    const double t = static_cast<double>(i) / f.N;
    const Vecd x = f.c.point(t);
    const Vecd v = f.c.velocity(t);
    const Mat d = omega.value(x, v) - f.omega0.value(x, v);
    const Mat& h = f.sigma.samples[i];
    u.samples[i] = G.project_algebra(h.adjoint() * d * h);
  }
  // The image loop closes exactly when the reference holonomy commutes with
  // the endpoint value (flat-along-c omega0 in particular); otherwise keep
  // both endpoint samples and mark it open.
  if ((u.samples[f.N] - u.samples[0]).norm() < 1e-10) {
    u.samples[f.N] = u.samples[0];
    u.closed = true;
  } else {
    u.closed = false;
  }
  return u;
}

Mat hol_c(const ConnectionForm& omega, const LoopFrame& f, Scheme scheme) {
  return transport_endpoint(mu_c(omega, f), scheme);
}

Mat hol_c_direct(const ConnectionForm& omega, const LoopFrame& f, Scheme scheme) {
  if (omega.group != f.omega0.group || omega.base != f.omega0.base)
    throw std::domain_error("hol_c_direct: omega does not match the frame");
  const CompactGroup& G = *omega.group;
  auto A = [&](double t) { return omega.value(f.c.point(t), f.c.velocity(t)); };
  const GroupPath V = integrate_frame(A, G, f.N, scheme, Side::left);
  return V.samples[f.N] * f.sigma.samples[f.N];
}

GroupPath lambda_c(const GaugeMap& g, const LoopFrame& f) {
  if (g.group != f.omega0.group || g.base != f.omega0.base)
    throw std::domain_error("lambda_c: gauge map does not match the frame");
  GroupPath lam;
  lam.group = f.sigma.group;
  lam.N = f.N;
  lam.samples.resize(f.N + 1);
  for (int i = 0; i <= f.N; ++i) {
    const double t = static_cast<double>(i) / f.N;
    const Mat& h = f.sigma.samples[i];
    lam.samples[i] = h.adjoint() * g.value(f.c.point(t)) * h;
  }
  return lam;
}

double class_function_invariance(const ConnectionForm& omega, const GaugeMap& g,
                                 const LoopFrame& f, Scheme scheme) {
  const CompactGroup& G = *omega.group;
  const Mat h0 = hol_c(omega, f, scheme);
  const Mat h1 = hol_c(gauge_transform(g, omega), f, scheme);
  Mat p0 = eye(G.n()), p1 = eye(G.n());
  double worst = 0.0;
  for (int k = 1; k <= G.n(); ++k) {
    p0 = p0 * h0;
    p1 = p1 * h1;
    worst = std::max(worst, std::abs(p0.trace() - p1.trace()));
  }
  return worst;
}

double CurveSupportedForm::pairing(const ConnectionForm& A) const {
  if (A.group != frame.omega0.group || A.base != frame.omega0.base)
    throw std::domain_error("pairing: form does not match the frame");
  if (xi.N != frame.N) throw std::domain_error("pairing: grid mismatch");
  const CompactGroup& G = *A.group;
  const BaseLoop& c = frame.c;
  const double a2 = c.speed() * c.speed();
  std::vector<double> vals(frame.N + 1);
  for (int i = 0; i <= frame.N; ++i) {
    const double t = static_cast<double>(i) / frame.N;
    const Vecd x = c.point(t);
    const Vecd v = c.velocity(t);
    const Matd gB = c.base->metric(x);
    const Vecd bup = Vecd(gB.inverse() * (gB * v / a2));  // contravariant beta
    const Mat& h = frame.sigma.samples[i];
    const Mat X = h * xi.samples[i] * h.adjoint();
    double s = 0.0;
    for (int l = 0; l < 2; ++l) s += bup[l] * inner(G, X, A.component(l, x));
    vals[i] = s;
  }
  return trapezoid(vals);
}

HomothetyReport check_homothety(const BaseLoop& c, const AlgebraLoop& xi,
                                const ConnectionForm& omega0, Scheme scheme) {
  const CompactGroup& G = *xi.group;
  if (!xi.closed) throw std::domain_error("homothety check needs a closed xi");
  const int N = xi.N;
  const LoopFrame f = make_frame(c, omega0, N, scheme);
  const double a = c.speed();
  HomothetyReport rep;
  rep.speed = a;
  std::vector<double> eta2(N + 1), img2(N + 1);
  for (int i = 0; i <= N; ++i) {
    const double t = static_cast<double>(i) / N;
    const Vecd x = c.point(t);
    const Vecd v = c.velocity(t);
    const Matd gB = c.base->metric(x);
    rep.speed_residual = std::max(rep.speed_residual, std::abs(std::sqrt(v.dot(gB * v)) - a));
    const Vecd beta = Vecd(gB * v / (a * a));
    const double b2 = beta.dot(gB.inverse() * beta);
    const Mat& h = f.sigma.samples[i];
    const Mat X = h * xi.samples[i] * h.adjoint();
    const double Xn = inner(G, X, X);
    eta2[i] = b2 * Xn;
    rep.pointwise_residual = std::max(
        rep.pointwise_residual, std::abs(b2 * Xn - inner(G, xi.samples[i], xi.samples[i]) / (a * a)));
    const Mat img = h.adjoint() * (beta.dot(v) * X) * h;  // Ad(h^{-1}) of eta(c')
    img2[i] = inner(G, img, img);
  }
  if (rep.speed_residual > 1e-6)
    throw std::domain_error("homothety check needs a constant-speed loop");
  rep.tangent_norm2 = trapezoid(eta2);
  rep.image_norm2 = trapezoid(img2);
  rep.ratio = rep.image_norm2 / rep.tangent_norm2;
  rep.ratio_residual = std::abs(rep.ratio - a * a);
  return rep;
}

ConnectionForm random_fourier_connection(const BaseManifold& base, const CompactGroup& G,
                                         Rng& rng, int max_mode, double amp) {
  std::vector<std::vector<FourierTerm2D>> comp(2);
  for (int j = 0; j < 2; ++j) {
    for (int mu = 0; mu < G.dim(); ++mu) {
      for (int p = 0; p <= max_mode; ++p) {
        for (int q = (p == 0 ? 0 : -max_mode); q <= max_mode; ++q) {
          const double w = 1.0 + p * p + q * q;
          FourierTerm2D t;
          t.mu = mu;
          t.p = p;
          t.q = q;
          t.amp_c = amp * rng.normal() / w;
          t.amp_s = (p == 0 && q == 0) ? 0.0 : amp * rng.normal() / w;
          comp[j].push_back(t);
        }
      }
    }
  }
  return fourier_connection(base, G, std::move(comp[0]), std::move(comp[1]));
}

ConnectionForm random_harmonic_connection(const BaseManifold& base, const CompactGroup& G,
                                          Rng& rng, int max_l, double amp) {
  std::vector<SphereTerm> terms;
  for (int j = 0; j < 2; ++j) {
    for (int mu = 0; mu < G.dim(); ++mu) {
      for (int l = 0; l <= max_l; ++l) {
        for (int m = 0; m <= l; ++m) {
          SphereTerm t;
          t.j = j;
          t.mu = mu;
          t.l = l;
          t.m = m;
          t.amp = amp * rng.normal() / (1.0 + l);
          terms.push_back(t);
          if (m > 0) {
            t.sin_phase = true;
            t.amp = amp * rng.normal() / (1.0 + l);
            terms.push_back(t);
          }
        }
      }
    }
  }
  return harmonic_connection(base, G, std::move(terms));
}

GaugeMap random_gauge_map(const BaseManifold& base, const CompactGroup& G, Rng& rng,
                          int max_mode, double amp) {
  GaugeMap g;
  g.base = &base;
  g.group = &G;
  if (base.kind == BaseManifold::Kind::flat_torus) {
    for (int mu = 0; mu < G.dim(); ++mu) {
      for (int p = 0; p <= max_mode; ++p) {
        for (int q = (p == 0 ? 0 : -max_mode); q <= max_mode; ++q) {
          const double w = 1.0 + p * p + q * q;
          FourierTerm2D t;
          t.mu = mu;
          t.p = p;
          t.q = q;
          t.amp_c = amp * rng.normal() / w;
          t.amp_s = (p == 0 && q == 0) ? 0.0 : amp * rng.normal() / w;
          g.fourier.push_back(t);
        }
      }
    }
  } else {
    for (int i = 0; i < 4; ++i) g.ambient.push_back(random_algebra(G, rng, amp).m);
  }
  return g;
}

GaugeMap based_gauge_map(GaugeMap g, const Vecd& x0) {
  g.based = true;
  g.x0 = x0;
  return g;
}

BaseLoop random_base_loop(const BaseManifold& base, Rng& rng) {
  if (base.kind == BaseManifold::Kind::round_sphere)
    return BaseLoop::latitude(base, base.R * rng.uniform(0.6, 1.8));
  const Vecd p0 = vec2(base.L1 * rng.uniform(), base.L2 * rng.uniform());
  switch (rng.range(0, 3)) {
    case 0:
      return BaseLoop::line(base, p0, 1, 0);
    case 1:
      return BaseLoop::line(base, p0, 0, 1);
    case 2:
      return BaseLoop::line(base, p0, 1, 1);
    default:
      return BaseLoop::circle(base, p0, rng.uniform(0.15, 0.35) * std::min(base.L1, base.L2));
  }
}

}  // namespace holab
