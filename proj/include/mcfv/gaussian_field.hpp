#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "mcfv/random_stream.hpp"

namespace mcfv {

/// Stationary periodic Gaussian field a = mu + IDFT(sqrt(gamma) DFT(Z)) on
/// `cells` interface points, with gamma(xi) = (1 + xi^2)^{-q} / cutoff on the
/// folded frequency layout xi_k = min(k, cells - k) / cutoff and
/// Z = sqrt(sigma / delta) Y, delta = cutoff / cells.
///
/// DFT convention: forward transform unscaled, inverse scaled by 1 / cells.
struct FieldParams {
  double mu = 0.0;
  double sigma = 0.0;
  int q = 1;
  double cutoff = 50.0;
  std::size_t cells = 0;

  /// Requires q >= 1, cutoff > 0, sigma >= 0, cells even and >= 4.
  void validate() const;
};

/// Interface velocities a[i] = a(x_{i-1/2}), x_{i-1/2} = i / cells; the
/// closing interface x = 1 reuses a[0].
struct FieldSample {
  std::vector<double> a;

  double max_abs() const;
};

/// (1 + xi^2)^{-q}
double spectral_density(double xi, int q);

/// gamma_k for k = 0 .. cells - 1 on the folded layout.
std::vector<double> spectral_weights(const FieldParams& p);

/// Filters the given standard normal draws (one per interface). When
/// `max_imag` is non-null it receives the largest imaginary magnitude left by
/// the inverse transform before the real part is taken.
FieldSample synthesize_field(const FieldParams& p, std::span<const double> normals, double* max_imag = nullptr);

/// Draws `cells` standard normals from the stream and filters them.
FieldSample sample_field(const FieldParams& p, RandomStream& stream);

/// Exact pointwise variance of a - mu for the discrete synthesis:
/// (sigma / delta) (1 / cells) sum_k gamma_k.
double field_variance(const FieldParams& p);

/// Mean level placing a at zeta standard deviations above zero.
double zeta_to_mu(double zeta, const FieldParams& p);

/// Sums blocks of `factor` standard normals, centred on the coarse interface
/// positions and wrapping periodically, and rescales by
/// 1 / sqrt(factor). The result is again i.i.d. standard normal, so a coarse
/// field built from it is a valid sample that shares its large scales with
/// the fine field built from `fine`.
std::vector<double> coarsen_white_noise(std::span<const double> fine, std::size_t factor);

/// CSV with header "x,a".
void write_field_csv(std::ostream& out, const FieldSample& field);

}  // namespace mcfv
