#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "holab/generators.hpp"
#include "holab/transport.hpp"

namespace holab {

struct SpectrumEntry {
  double eigenvalue = 0.0;
  int multiplicity = 1;
  std::string label;
};

// Eigenvalue table sorted descending; analytic tables carry the k <-> -k sign
// pairing by construction.
struct SpectrumTable {
  std::vector<SpectrumEntry> entries;

  int total_count() const;
  std::vector<double> expanded() const;  // descending, multiplicities unrolled
};

// Max entrywise gap between the expanded tables; requires equal counts.
double spectrum_distance(const SpectrumTable& a, const SpectrumTable& b);

// Fibre shape-operator spectrum in the constant normal direction v: eigenvalue
// -alpha(v) / (2 pi k) with multiplicity 2 per root plane and |k| <= K, plus
// the zero eigenvalue on torus-direction loops.
SpectrumTable analytic_fiber_spectrum(const AlgebraVector& v, int K);

// Same operator assembled numerically: the horizontal-lift field of the left
// translate of v (minimal-norm preimage under the sampled differential),
// finite-differenced along each tangent basis loop and projected back to the
// tangent space at the zero loop.
SpectrumTable numeric_shape_operator(const AlgebraVector& v, int K, double eps = 1e-3,
                                     int N = 256, Scheme scheme = Scheme::rkmk4);

// lambda^+_k = plus_coef / k, lambda^-_k = minus_coef / k for k >= start,
// appended beyond the finite table.
struct TailModel {
  double plus_coef = 0.0;
  double minus_coef = 0.0;
  int start = 1;
};

struct LogFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

enum class TraceVerdict { finite, diverges, inconclusive };

struct TraceReport {
  std::vector<std::pair<double, double>> ls_norms;  // (s, ||A||_s); s = inf last
  TraceVerdict hlo_status = TraceVerdict::finite;
  double hlo_value = 0.0;  // paired partial sum at partial_sum_count
  LogFit hlo_fit;
  std::vector<std::pair<long long, double>> hlo_partial_sums;
  TraceVerdict zeta_status = TraceVerdict::finite;
  double zeta_value = 0.0;    // probe value at the smallest s
  double zeta_residue = 0.0;  // estimated simple-pole residue at s = 1
  std::vector<std::pair<double, double>> zeta_probe;
  std::string note;
  long long partial_sum_count = 0;
};

// Trace regularizations of a (table + optional tail) spectrum: L^s norms on a
// sample grid, the paired partial-sum trace with a log-divergence fit, and the
// s -> 1 probe of the zeta-weighted trace. reference_bound, when finite, is
// quoted in the note whenever the diverging probe crosses it.
TraceReport regularized_traces(const SpectrumTable& table, const TailModel* tail = nullptr,
                               long long partial_sum_count = 1000000,
                               double reference_bound = std::numeric_limits<double>::quiet_NaN());

// Sum of eigenvalue^2 over the |k| <= K table plus the analytic |k| > K tail;
// converges to trace_square_exact as K grows.
double trace_square(const AlgebraVector& v, int K);
// Closed form sum_alpha alpha(v)^2 / 6 over positive root planes.
double trace_square_exact(const AlgebraVector& v);

struct ProbeReport {
  std::string mode;  // "point" or "sphere"
  double radius = 0.0;
  int K = 0;
  int point_count = 0;
  double max_discrepancy = 0.0;    // numeric-vs-analytic (point) or cross-point (sphere)
  double min_gradient_norm = 1.0;  // smallest accepted normal gradient norm
  double transport_gap = 0.0;      // two-path discrete normal transport disagreement
  double max_abs_eigenvalue = 0.0;
  std::vector<SpectrumTable> spectra;
};

// Spectral-constancy probe of the preimage of a metric sphere of the given
// radius around the identity (radius <= 0 means the point case, which reduces
// to the fibre operator). Samples points on the truncated preimage, builds the
// unit normal from the gradient of the endpoint distance, transports it
// discretely between sample points, and compares the sorted shape spectra.
ProbeReport isoparametric_probe(const CompactGroup& G, double radius, int K, int point_count,
                                std::uint64_t seed, int N = 128, double eps = 1e-3,
                                Scheme scheme = Scheme::rkmk4);

}  // namespace holab
