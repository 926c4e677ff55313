#include "holab/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace holab {

namespace {

void sort_entries(std::vector<SpectrumEntry>& v) {
  std::sort(v.begin(), v.end(), [](const SpectrumEntry& a, const SpectrumEntry& b) {
    if (a.eigenvalue != b.eigenvalue) return a.eigenvalue > b.eigenvalue;
    return a.label < b.label;
  });
}

SpectrumTable table_from_eigenvalues(const Vecd& evs) {
  SpectrumTable t;
  for (int i = 0; i < evs.size(); ++i) t.entries.push_back({evs[i], 1, "numeric"});
  sort_entries(t.entries);
  return t;
}

LogFit fit_against_log(const std::vector<std::pair<long long, double>>& pts) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (const auto& [m, s] : pts) {
    if (m < 10) continue;
    const double x = std::log(static_cast<double>(m));
    sx += x;
    sy += s;
    sxx += x * x;
    sxy += x * s;
    ++n;
  }
  LogFit f;
  if (n < 3) return f;
  f.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  f.intercept = (sy - f.slope * sx) / n;
  double ss_res = 0, ss_tot = 0;
  const double mean = sy / n;
  for (const auto& [m, s] : pts) {
    if (m < 10) continue;
    const double x = std::log(static_cast<double>(m));
    ss_res += (s - f.intercept - f.slope * x) * (s - f.intercept - f.slope * x);
    ss_tot += (s - mean) * (s - mean);
  }
  f.r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
  return f;
}

// sum_{k >= start} k^{-s}
double zeta_from(double s, int start) {
  double z = std::riemann_zeta(s);
  for (int k = 1; k < start; ++k) z -= std::pow(k, -s);
  return z;
}

}  // namespace

int SpectrumTable::total_count() const {
  int n = 0;
  for (const SpectrumEntry& e : entries) n += e.multiplicity;
  return n;
}

std::vector<double> SpectrumTable::expanded() const {
  std::vector<double> v;
  v.reserve(total_count());
  for (const SpectrumEntry& e : entries)
    for (int i = 0; i < e.multiplicity; ++i) v.push_back(e.eigenvalue);
  std::sort(v.begin(), v.end(), std::greater<>());
  return v;
}

double spectrum_distance(const SpectrumTable& a, const SpectrumTable& b) {
  const std::vector<double> xa = a.expanded(), xb = b.expanded();
  if (xa.size() != xb.size()) throw std::domain_error("spectrum tables have different sizes");
  double worst = 0.0;
  for (std::size_t i = 0; i < xa.size(); ++i) worst = std::max(worst, std::abs(xa[i] - xb[i]));
  return worst;
}

SpectrumTable analytic_fiber_spectrum(const AlgebraVector& v, int K) {
  if (K < 1) throw std::domain_error("mode cutoff must be positive");
  const TorusDecomposition dec = root_decomposition(v);
  const CompactGroup& G = *v.group;
  SpectrumTable t;
  for (std::size_t r = 0; r < dec.roots.size(); ++r) {
    for (int k = -K; k <= K; ++k) {
      if (k == 0) continue;
      t.entries.push_back({-dec.roots[r].alpha_value / (2.0 * M_PI * k), 2,
                           "root " + std::to_string(r) + " k " + std::to_string(k)});
    }
  }
  t.entries.push_back({0.0, G.rank() * 2 * K, "zero space"});
  sort_entries(t.entries);
  return t;
}

SpectrumTable numeric_shape_operator(const AlgebraVector& v, int K, double eps, int N,
                                     Scheme scheme) {
  if (K < 1 || K > 8) throw std::domain_error("mode cutoff must lie in [1, 8]");
  if (eps < 1e-5 || eps > 1e-3) throw std::domain_error("eps must lie in [1e-5, 1e-3]");
  const CompactGroup& G = *v.group;
  const bool zero_v = v.m.size() == 0 || v.m.norm() == 0.0;
  const TorusDecomposition dec =
      zero_v ? generic_torus_decomposition(G) : root_decomposition(v);
  const LoopBasis basis = LoopBasis::build(dec, K, N);
  const int D = basis.size();
  const Vecd target = zero_v ? Vecd(Vecd::Zero(G.dim())) : Vecd(G.to_coords(v.m));

  std::vector<int> tangent;
  for (int j = 0; j < D; ++j)
    if (!basis.is_constant(j)) tangent.push_back(j);
  const int T = static_cast<int>(tangent.size());

  // Horizontal-lift field: minimal-norm preimage of the left translate of v
  // under the sampled differential, evaluated at +-eps along each tangent
  // basis loop. Constant coordinates are dropped by the tangential projection.
  const AlgebraLoop origin = zero_loop(G, N);
  Matd W(T, T);
  for (int jt = 0; jt < T; ++jt) {
    const AlgebraLoop& dir = basis.loops[tangent[jt]];
    Vecd x[2];
    for (int side = 0; side < 2; ++side) {
      const double step = side == 0 ? eps : -eps;
      AlgebraLoop u = loop_axpy(step, dir, origin);
      Matd J = sampled_differential(u, basis, 1e-3, scheme);
      x[side] = Eigen::JacobiSVD<Matd>(J, Eigen::ComputeThinU | Eigen::ComputeThinV).solve(target);
    }
    const Vecd w = (x[0] - x[1]) / (2.0 * eps);
    for (int it = 0; it < T; ++it) W(it, jt) = w[tangent[it]];
  }
  const Matd S = -0.5 * (W + W.transpose());
  Eigen::SelfAdjointEigenSolver<Matd> es(S);
  return table_from_eigenvalues(es.eigenvalues());
}

TraceReport regularized_traces(const SpectrumTable& table, const TailModel* tail,
                               long long partial_sum_count, double reference_bound) {
  if (table.entries.empty() && !tail) throw std::domain_error("empty spectrum");
  TraceReport rep;
  rep.partial_sum_count = partial_sum_count;

  std::vector<double> pos, neg;  // magnitudes, descending
  for (double e : table.expanded()) {
    if (e > 0.0) pos.push_back(e);
    if (e < 0.0) neg.push_back(-e);
  }
  std::sort(neg.begin(), neg.end(), std::greater<>());

  const double p = tail ? tail->plus_coef : 0.0;
  const double q = tail ? tail->minus_coef : 0.0;
  const int start = tail ? tail->start : 1;

  // L^s norms on a fixed grid, analytic zeta tail, sup norm last.
  for (double s : {1.1, 1.5, 2.0, 3.0}) {
    double acc = 0.0;
    for (double e : pos) acc += std::pow(e, s);
    for (double e : neg) acc += std::pow(e, s);
    if (tail) acc += (std::pow(std::abs(p), s) + std::pow(std::abs(q), s)) * zeta_from(s, start);
    rep.ls_norms.emplace_back(s, std::pow(acc, 1.0 / s));
  }
  double sup = 0.0;
  if (!pos.empty()) sup = std::max(sup, pos.front());
  if (!neg.empty()) sup = std::max(sup, neg.front());
  if (tail) sup = std::max({sup, std::abs(p) / start, std::abs(q) / start});
  rep.ls_norms.emplace_back(std::numeric_limits<double>::infinity(), sup);

  // Paired trace: i-th positive against i-th negative; exact cancellation for
  // symmetric tables.
  double table_sum = 0.0;
  for (std::size_t i = 0; i < std::max(pos.size(), neg.size()); ++i)
    table_sum += (i < pos.size() ? pos[i] : 0.0) - (i < neg.size() ? neg[i] : 0.0);

  if (!tail || p == q) {
    rep.hlo_status = TraceVerdict::finite;
    rep.hlo_value = table_sum;
    rep.hlo_partial_sums.emplace_back(partial_sum_count, table_sum);
  } else {
    std::vector<long long> samples;
    for (double e = 1.0; ; e += 0.25) {
      long long m = std::llround(std::pow(10.0, e));
      if (m >= partial_sum_count) break;
      samples.push_back(m);
    }
    samples.push_back(partial_sum_count);
    double acc = table_sum;
    std::size_t next = 0;
    for (long long k = start; k <= partial_sum_count; ++k) {
      acc += (p - q) / static_cast<double>(k);
      while (next < samples.size() && samples[next] == k) {
        rep.hlo_partial_sums.emplace_back(k, acc);
        ++next;
      }
    }
    rep.hlo_value = acc;
    rep.hlo_fit = fit_against_log(rep.hlo_partial_sums);
    const double expected = p - q;
    if (rep.hlo_fit.r2 > 0.999 && std::abs(rep.hlo_fit.slope - expected) < 0.1 * std::abs(expected))
      rep.hlo_status = TraceVerdict::diverges;
    else
      rep.hlo_status = TraceVerdict::inconclusive;
  }

  // s -> 1 probe of the zeta-weighted trace.
  for (double s : {1.1, 1.05, 1.01, 1.001}) {
    double val = 0.0;
    for (double e : pos) val += std::pow(e, s);
    for (double e : neg) val -= std::pow(e, s);
    if (tail) val += (std::pow(p, s) - std::pow(q, s)) * zeta_from(s, start);
    rep.zeta_probe.emplace_back(s, val);
  }
  const double v1 = rep.zeta_probe[3].second;  // s = 1.001
  const double v2 = rep.zeta_probe[2].second;  // s = 1.01
  const double c1 = v1 * (rep.zeta_probe[3].first - 1.0);
  const double c2 = v2 * (rep.zeta_probe[2].first - 1.0);
  rep.zeta_value = v1;
  rep.zeta_residue = c1;
  if (std::abs(v1 - v2) < 1e-3 * (1.0 + std::abs(v1))) {
    rep.zeta_status = TraceVerdict::finite;
  } else if (c1 * c2 > 0.0 && std::abs(c1 / c2 - 1.0) < 0.25 && std::abs(c1) > 1e-6) {
    rep.zeta_status = TraceVerdict::diverges;
    rep.note = "zeta probe grows like " + std::to_string(c1) +
               "/(s-1) as s decreases to 1; no finite regularized value assigned";
    if (std::isfinite(reference_bound) && v1 > reference_bound)
      rep.note += "; probe exceeds the reference bound " + std::to_string(reference_bound);
  } else {
    rep.zeta_status = TraceVerdict::inconclusive;
    rep.note = "zeta probe neither stabilizes nor matches a simple pole on the sample grid";
  }
  return rep;
}

double trace_square(const AlgebraVector& v, int K) {
  if (K < 1) throw std::domain_error("mode cutoff must be positive");
  if (v.m.size() == 0 || v.m.norm() == 0.0) return 0.0;
  const TorusDecomposition dec = root_decomposition(v);
  double head = 0.0;
  for (int k = 1; k <= K; ++k) head += 1.0 / (static_cast<double>(k) * k);
  const double tail = M_PI * M_PI / 6.0 - head;
  double total = 0.0;
  for (const RootDatum& r : dec.roots)
    total += r.alpha_value * r.alpha_value / (M_PI * M_PI) * (head + tail);
  return total;
}

double trace_square_exact(const AlgebraVector& v) {
  if (v.m.size() == 0 || v.m.norm() == 0.0) return 0.0;
  const TorusDecomposition dec = root_decomposition(v);
  double total = 0.0;
  for (const RootDatum& r : dec.roots) total += r.alpha_value * r.alpha_value / 6.0;
  return total;
}

namespace {

struct ProbeContext {
  const CompactGroup* G = nullptr;
  const LoopBasis* basis = nullptr;
  Scheme scheme = Scheme::rkmk4;

  double dist(const Vecd& c) const {
    const Mat g = transport_endpoint(basis->combine(c), scheme);
    return algebra_norm(*G, log_element(*G, g));
  }

  // Gradient of the endpoint distance in basis coordinates; the norm is close
  // to 1 away from the focal set because the differential is a submersion
  // isometry on horizontals.
  Vecd gradient(const Vecd& c) const {
    const AlgebraLoop u = basis->combine(c);
    const Matd J = sampled_differential(u, *basis, 1e-3, scheme);
    const Mat l = log_element(*G, transport_endpoint(u, scheme));
    const Vecd lc = Vecd(G->to_coords(l) / algebra_norm(*G, l));
    return Vecd(J.transpose() * lc);
  }
};

double find_scale(const ProbeContext& ctx, const Vecd& dir, double radius) {
  auto reach = [&](double t) {
    try {
      return ctx.dist(Vecd(t * dir));
    } catch (const branch_error&) {
      return M_PI * 4.0;  // past the radius for every probe we run
    }
  };
  double hi = 1.0;
  int guard = 0;
  while (reach(hi) < radius) {
    hi *= 2.0;
    if (++guard > 8) throw std::domain_error("retraction failed to bracket the radius");
  }
  double lo = 0.0;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    (reach(mid) < radius ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

Vecd retract(const ProbeContext& ctx, const Vecd& raw, double radius) {
  return Vecd(find_scale(ctx, raw, radius) * raw);
}

// Discrete transport of the unit normal between preimage points: follow the
// gradient direction through retracted segment nodes, flipping the carried
// sign whenever consecutive directions reverse.
double transport_sign(const ProbeContext& ctx, const Vecd& a, const Vecd& b, double radius,
                      int steps) {
  Vecd prev = ctx.gradient(a).normalized();
  double sign = 1.0;
  for (int s = 1; s <= steps; ++s) {
    const Vecd raw = a + (static_cast<double>(s) / steps) * (b - a);
    const Vecd g = ctx.gradient(retract(ctx, raw, radius)).normalized();
    const double d = prev.dot(g);
    if (std::abs(d) < 0.5)
      throw std::domain_error("normal transport step lost track of the normal line");
    if (d < 0.0) sign = -sign;
    prev = d < 0.0 ? Vecd(-g) : g;
  }
  return sign;
}

SpectrumTable level_set_shape_operator(const ProbeContext& ctx, const Vecd& u, double sign,
                                       double eps, double* max_grad_drop) {
  const int D = static_cast<int>(u.size());
  Vecd ghat = ctx.gradient(u);
  if (max_grad_drop) *max_grad_drop = std::min(*max_grad_drop, ghat.norm());
  ghat.normalize();

  // Householder frame: column 0 maps to the normal, the rest span the tangent.
  Matd H = Matd::Identity(D, D);
  Vecd w = ghat - Vecd(Vecd::Unit(D, 0));
  if (w.squaredNorm() > 1e-24) H -= (2.0 / w.squaredNorm()) * (w * w.transpose());

  Matd W(D - 1, D - 1);
  for (int j = 1; j < D; ++j) {
    const Vecd tau = H.col(j);
    Vecd side[2];
    for (int s = 0; s < 2; ++s) {
      const double step = s == 0 ? eps : -eps;
      Vecd g = ctx.gradient(Vecd(u + step * tau)).normalized();
      if (g.dot(ghat) < 0.0) g = -g;
      side[s] = g;
    }
    const Vecd dv = sign * (side[0] - side[1]) / (2.0 * eps);
    for (int i = 1; i < D; ++i) W(i - 1, j - 1) = H.col(i).dot(dv);
  }
  const Matd S = -0.5 * (W + W.transpose());
  Eigen::SelfAdjointEigenSolver<Matd> es(S);
  return table_from_eigenvalues(es.eigenvalues());
}

}  // namespace

ProbeReport isoparametric_probe(const CompactGroup& G, double radius, int K, int point_count,
                                std::uint64_t seed, int N, double eps, Scheme scheme) {
  if (K < 1 || K > 6) throw std::domain_error("probe cutoff must lie in [1, 6]");
  if (point_count < 1) throw std::domain_error("point_count must be positive");
  Rng rng(seed);
  ProbeReport rep;
  rep.radius = radius;
  rep.K = K;
  rep.point_count = point_count;

  if (radius <= 0.0) {
    // Point case: the preimage of {e} through the zero loop is the fibre, and
    // the numeric spectra must reproduce the analytic table.
    rep.mode = "point";
    for (int pt = 0; pt < point_count; ++pt) {
      const AlgebraVector v{random_generic_torus_vector(G, rng, 0.8), &G};
      const SpectrumTable num = numeric_shape_operator(v, K, eps, N, scheme);
      const SpectrumTable ana = analytic_fiber_spectrum(v, K);
      rep.max_discrepancy = std::max(rep.max_discrepancy, spectrum_distance(num, ana));
      for (double e : num.expanded())
        rep.max_abs_eigenvalue = std::max(rep.max_abs_eigenvalue, std::abs(e));
      rep.spectra.push_back(num);
    }
    return rep;
  }

  rep.mode = "sphere";
  const TorusDecomposition dec = generic_torus_decomposition(G);
  const LoopBasis basis = LoopBasis::build(dec, K, N);
  ProbeContext ctx{&G, &basis, scheme};
  const int D = basis.size();

  auto sample_point = [&]() {
    for (int attempt = 0; attempt < 8; ++attempt) {
      Vecd c(D);
      for (int j = 0; j < D; ++j)
        c[j] = 0.6 * rng.normal() / (1.0 + std::abs(basis.labels[j].k));
      const Vecd u = retract(ctx, c, radius);
      const double gn = ctx.gradient(u).norm();
      if (gn >= 0.1) {
        rep.min_gradient_norm = std::min(rep.min_gradient_norm, gn);
        return u;
      }
    }
    throw std::domain_error("probe sampling stayed too close to the focal set");
  };

  std::vector<Vecd> pts;
  for (int pt = 0; pt < point_count; ++pt) pts.push_back(sample_point());

  std::vector<SpectrumTable> spectra;
  spectra.push_back(level_set_shape_operator(ctx, pts[0], 1.0, eps, &rep.min_gradient_norm));
  for (int pt = 1; pt < point_count; ++pt) {
    const double sign = transport_sign(ctx, pts[0], pts[pt], radius, 16);
    spectra.push_back(
        level_set_shape_operator(ctx, pts[pt], sign, eps, &rep.min_gradient_norm));
  }
  for (int pt = 1; pt < point_count; ++pt)
    rep.max_discrepancy = std::max(rep.max_discrepancy, spectrum_distance(spectra[0], spectra[pt]));
  for (const SpectrumTable& t : spectra)
    for (double e : t.expanded())
      rep.max_abs_eigenvalue = std::max(rep.max_abs_eigenvalue, std::abs(e));
  rep.spectra = std::move(spectra);

  // Path independence of the discrete transport: a detour through a perturbed
  // midpoint must carry the same sign.
  if (point_count >= 2) {
    Vecd mid = Vecd(0.5 * (pts[0] + pts[1]));
    for (int j = 0; j < D; ++j)
      mid[j] += 0.15 * rng.normal() / (1.0 + std::abs(basis.labels[j].k));
    const Vecd via = retract(ctx, mid, radius);
    const double direct = transport_sign(ctx, pts[0], pts[1], radius, 16);
    const double detour =
        transport_sign(ctx, pts[0], via, radius, 8) * transport_sign(ctx, via, pts[1], radius, 8);
    rep.transport_gap = std::abs(direct - detour);
  }
  return rep;
}

}  // namespace holab
