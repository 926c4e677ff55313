#pragma once

#include <functional>
#include <vector>

#include "holab/groups.hpp"
#include "holab/loops.hpp"
#include "holab/rng.hpp"
#include "holab/transport.hpp"

namespace holab {

// Two-dimensional base manifolds with an explicit chart metric. The sphere
// chart is the stereographic projection from the north pole; the second
// chart (projection from the south pole) has the same conformal metric, so
// only the transition map and its Jacobian are exposed.
struct BaseManifold {
  enum class Kind { flat_torus, round_sphere };

  Kind kind = Kind::flat_torus;
  double L1 = 1.0;  // torus periods
  double L2 = 1.0;
  double R = 1.0;  // sphere radius

  static BaseManifold flat_torus(double L1, double L2);
  static BaseManifold round_sphere(double R);

  Matd metric(const Vecd& x) const;
  // Sphere only: image of x in the opposite stereographic chart and the
  // Jacobian of that transition. Throws std::domain_error at the chart origin.
  Vecd chart1_point(const Vecd& x) const;
  Matd chart1_jacobian(const Vecd& x) const;
};

// One scalar Fourier mode on the torus: amp_c cos(ph) + amp_s sin(ph) with
// ph = 2 pi (p x1 / L1 + q x2 / L2), attached to algebra basis direction mu.
struct FourierTerm2D {
  int mu = 0;
  int p = 0;
  int q = 0;
  double amp_c = 0.0;
  double amp_s = 0.0;
};

// One real spherical harmonic amp * Y_l^m(theta) * cos/sin(m phi) attached to
// chart direction j and algebra basis direction mu.
struct SphereTerm {
  int j = 0;
  int mu = 0;
  int l = 0;
  int m = 0;
  double amp = 0.0;
  bool sin_phase = false;
};

// Principal connection form in the chart trivialization: a g-valued 1-form,
// stored as a callable giving the j-th chart component at a base point.
struct ConnectionForm {
  const BaseManifold* base = nullptr;
  const CompactGroup* group = nullptr;
  std::function<Mat(int, const Vecd&)> comp;

  Mat component(int j, const Vecd& x) const;
  Mat value(const Vecd& x, const Vecd& tangent) const;
};

ConnectionForm zero_connection(const BaseManifold& base, const CompactGroup& G);
ConnectionForm fourier_connection(const BaseManifold& base, const CompactGroup& G,
                                  std::vector<FourierTerm2D> comp1,
                                  std::vector<FourierTerm2D> comp2);
ConnectionForm harmonic_connection(const BaseManifold& base, const CompactGroup& G,
                                   std::vector<SphereTerm> terms);
ConnectionForm connection_sum(const ConnectionForm& a, double s, const ConnectionForm& b);

// Gauge transformation of the base, stored through its algebra-valued
// potential chi: value(x) = exp(chi(x)). On the torus chi is a Fourier sum;
// on the sphere it is affine in the ambient coordinates of the unit sphere,
// so all chart derivatives are analytic.
struct GaugeMap {
  const BaseManifold* base = nullptr;
  const CompactGroup* group = nullptr;
  std::vector<FourierTerm2D> fourier;
  std::vector<Mat> ambient;  // chi = ambient[0] + n1 ambient[1] + n2 ambient[2] + n3 ambient[3]
  bool based = false;        // subtract chi(x0) so that value(x0) = e
  Vecd x0 = Vecd::Zero(2);

  Mat chi(const Vecd& x) const;
  Mat dchi(int j, const Vecd& x) const;
  Mat value(const Vecd& x) const;
  // Right logarithmic derivative (d_j ghat) ghat^{-1}, computed from the
  // analytic dexp series, not by finite differences.
  Mat dvalue_rt(int j, const Vecd& x) const;
};

// Pulled-back connection g . omega = Ad(ghat) omega - (d ghat) ghat^{-1}.
ConnectionForm gauge_transform(const GaugeMap& g, const ConnectionForm& omega);

// Constant-speed base loops. point/velocity take t in [0, 1].
struct BaseLoop {
  enum class Kind { torus_line, torus_circle, sphere_latitude };

  const BaseManifold* base = nullptr;
  Kind kind = Kind::torus_line;
  Vecd p0 = Vecd::Zero(2);  // start point (line) or center (circle)
  int m = 1;                // winding numbers (line)
  int n = 0;
  double r = 0.25;  // chart radius (circle, latitude)

  static BaseLoop line(const BaseManifold& base, const Vecd& p0, int m, int n);
  static BaseLoop circle(const BaseManifold& base, const Vecd& center, double r);
  static BaseLoop latitude(const BaseManifold& base, double rho0);

  Vecd point(double t) const;
  Vecd velocity(double t) const;
  double speed() const;  // metric speed, constant along the loop
};

// A base loop together with the horizontal lift of its reference connection:
// sigma(t) = (c(t), h(t)) with h' = -omega0(c')(h), h(0) = e, sampled on the
// uniform grid t_i = i/N.
struct LoopFrame {
  BaseLoop c;
  ConnectionForm omega0;
  GroupPath sigma;
  int N = 0;
  Scheme scheme = Scheme::rkmk4;
};

GroupPath horizontal_lift(const BaseLoop& c, const ConnectionForm& omega0, int N,
                          Scheme scheme = Scheme::rkmk4);
LoopFrame make_frame(const BaseLoop& c, const ConnectionForm& omega0, int N,
                     Scheme scheme = Scheme::rkmk4);

// Pull-back of omega along the frame: t -> Ad(h(t)^{-1}) (omega - omega0)(c'(t)).
// The sample at t = 1 is snapped onto the one at t = 0 when they agree to
// 1e-10 (exact for a reference connection flat along c); otherwise the loop is
// marked open.
AlgebraLoop mu_c(const ConnectionForm& omega, const LoopFrame& f);

// Holonomy comparison map: hol_c(omega) = phi(mu_c(omega)). The direct variant
// never forms mu_c: it multiplies the left Wilson line of omega along c with
// the lift endpoint, V(1) h(1), and exists as an independent cross-check.
Mat hol_c(const ConnectionForm& omega, const LoopFrame& f, Scheme scheme = Scheme::rkmk4);
Mat hol_c_direct(const ConnectionForm& omega, const LoopFrame& f,
                 Scheme scheme = Scheme::rkmk4);

// Loop-group element lambda(t) = h(t)^{-1} ghat(c(t)) h(t) implementing the
// gauge action on pull-backs: mu_c(g . omega) = lambda . mu_c(omega), and
// hol_c(g . omega) = lambda(0) hol_c(omega) lambda(1)^{-1}.
GroupPath lambda_c(const GaugeMap& g, const LoopFrame& f);

// max_{k = 1..n} |tr(hol_c(g.omega)^k) - tr(hol_c(omega)^k)|.
double class_function_invariance(const ConnectionForm& omega, const GaugeMap& g,
                                 const LoopFrame& f, Scheme scheme = Scheme::rkmk4);

// Tangent vector to the space of connections supported on the loop of the
// frame: the 1-form w -> (g_B(w, c') / a^2) Ad(h) xi(t), paired against smooth
// forms by integrating the pointwise (T*B tensor g) inner product.
struct CurveSupportedForm {
  LoopFrame frame;
  AlgebraLoop xi;

  double pairing(const ConnectionForm& A) const;
};

struct HomothetyReport {
  double speed = 0.0;               // a
  double speed_residual = 0.0;      // max_t | |c'(t)|_g - a |
  double pointwise_residual = 0.0;  // max_t |<eta, eta>(t) - inner(xi, xi)(t)/a^2|
  double tangent_norm2 = 0.0;       // <A, A>_0
  double image_norm2 = 0.0;         // ||dmu_c(A)||_{L2}^2
  double ratio = 0.0;               // image_norm2 / tangent_norm2
  double ratio_residual = 0.0;      // |ratio - a^2|
};

// Verifies that dmu_c scales the curve-supported tangent A_xi by the constant
// loop speed: |dmu_c(A)|^2 = a^2 <A, A>_0. Throws std::domain_error when the
// loop speed is not constant to 1e-6.
HomothetyReport check_homothety(const BaseLoop& c, const AlgebraLoop& xi,
                                const ConnectionForm& omega0,
                                Scheme scheme = Scheme::rkmk4);

ConnectionForm random_fourier_connection(const BaseManifold& base, const CompactGroup& G,
                                         Rng& rng, int max_mode, double amp);
ConnectionForm random_harmonic_connection(const BaseManifold& base, const CompactGroup& G,
                                          Rng& rng, int max_l, double amp);
GaugeMap random_gauge_map(const BaseManifold& base, const CompactGroup& G, Rng& rng,
                          int max_mode, double amp);
GaugeMap based_gauge_map(GaugeMap g, const Vecd& x0);
BaseLoop random_base_loop(const BaseManifold& base, Rng& rng);

}  // namespace holab
