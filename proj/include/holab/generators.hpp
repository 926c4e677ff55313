#pragma once

#include "holab/loops.hpp"
#include "holab/rng.hpp"
#include "holab/roots.hpp"

namespace holab {

// Band-limited closed loop: mean plus modes 1..max_mode, coordinate
// coefficients amp * normal() / k. Fourier tables attached.
AlgebraLoop random_band_loop(const CompactGroup& G, Rng& rng, int N, int max_mode, double amp);

// Open algebra path c0 + t c1 + band-limited trig part. No tables.
AlgebraLoop random_drift_loop(const CompactGroup& G, Rng& rng, int N, int max_mode, double amp);

// exp of a random band-limited loop; based = conjugate so the path starts at e.
GroupPath random_gauge_path(const CompactGroup& G, Rng& rng, int N, int max_mode, double amp,
                            bool based = false);

// Exact gauge action of exp(x(t)) on the constant loop v:
//   u(t) = Ad(e^{x}) v - (d/dt e^{x}) e^{-x},
// the derivative term summed as sum_m ad_x^m(x') / (m+1)!.
// x must carry Fourier tables (the derivative is taken analytically).
AlgebraLoop gauge_translate_constant(const AlgebraLoop& x, const Mat& v);
AlgebraLoop gauge_translate_of_zero(const AlgebraLoop& x);

// Fixed generic torus vector per group; its root decomposition seeds the
// tangent bases used by the spectral code.
Mat generic_torus_vector(const CompactGroup& G);
TorusDecomposition generic_torus_decomposition(const CompactGroup& G);

// Random torus vector redrawn until root_decomposition accepts it.
Mat random_generic_torus_vector(const CompactGroup& G, Rng& rng, double scale = 1.0);

}  // namespace holab
