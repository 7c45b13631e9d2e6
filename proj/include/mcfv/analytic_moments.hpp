#pragma once

#include <cstddef>

#include "mcfv/grid_function.hpp"
#include "mcfv/initial_profile.hpp"
#include "mcfv/ou_process.hpp"

namespace mcfv {

/// Normal law of the displacement A(t): mean E[A(t)], variance Var[A(t)].
struct GaussianKernel {
  double mean = 0.0;
  double var = 0.0;
};

GaussianKernel solution_kernel(const OUParams& p, double t);

/// Normal density of the kernel at y. Requires var > 0.
double density_fA(double y, const GaussianKernel& k);

/// Periodic convolution (g * f)(x) = integral of g(x - y) f(y) over the real
/// line, evaluated on the grid of g.
///
/// Point samples use a Riemann sum against the kernel sampled on the grid
/// (spectrally accurate for smooth g) whenever the kernel spans at least two
/// cells. Cell averages, and point samples with narrower kernels, use the
/// exact integral of the kernel against the hat function, which is exact for
/// piecewise constant data (and is linear interpolation for point data).
/// A zero-variance kernel reduces to a shift by the mean.
GridFunction convolve_periodic(const GridFunction& g, const GaussianKernel& k);

/// E[u(x, t)] for u_t + (a(t) u)_x = 0 with OU coefficient a and u(., 0) = g.
GridFunction exact_expectation(const GridFunction& g, const OUParams& p, double t);

/// Var[u(x, t)] = (g^2 * f)(x) - ((g * f)(x))^2, clamped at zero.
GridFunction exact_variance_field(const GridFunction& g, const OUParams& p, double t);

struct ReferenceMoments {
  GridFunction mean;
  GridFunction variance;
};

/// Exact moments as cell averages on `cells` cells: the profile is sampled at
/// the centers of a grid `refine` times finer, convolved there and averaged
/// back down.
ReferenceMoments reference_moments(const InitialProfile& profile, const OUParams& p, double t, std::size_t cells,
                                   std::size_t refine = 4);

}  // namespace mcfv
