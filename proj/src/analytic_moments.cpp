#include "mcfv/analytic_moments.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include "mcfv/fv_solver.hpp"
#include "mcfv/metrics.hpp"

namespace mcfv {

namespace {

constexpr double inv_sqrt_2pi = 0.3989422804014327;
// Beyond 12 standard deviations the normal tail mass is below 1e-32.
constexpr double tail_sigmas = 12.0;

// 8-point Gauss-Legendre rule on [-1, 1].
constexpr std::array<double, 8> gl_nodes = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
                                            -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
                                            0.7966664774136267,  0.9602898564975363};
constexpr std::array<double, 8> gl_weights = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
                                              0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
                                              0.2223810344533745, 0.1012285362903763};

std::size_t wrap(std::ptrdiff_t i, std::size_t n) {
  const auto m = static_cast<std::ptrdiff_t>(n);
  return static_cast<std::size_t>(((i % m) + m) % m);
}

double std_density(double z) { return inv_sqrt_2pi * std::exp(-0.5 * z * z); }

// P(a < Z < b) for a standard normal Z, accurate in both tails.
double normal_mass(double a, double b) {
  if (a > 0.0) return 0.5 * (std::erfc(a / std::numbers::sqrt2) - std::erfc(b / std::numbers::sqrt2));
  if (b < 0.0) return 0.5 * (std::erfc(-b / std::numbers::sqrt2) - std::erfc(-a / std::numbers::sqrt2));
  return 1.0 - 0.5 * std::erfc(-a / std::numbers::sqrt2) - 0.5 * std::erfc(b / std::numbers::sqrt2);
}

// Kernel density summed over all periodic images.
double wrapped_density(double y, const GaussianKernel& k, double sd) {
  const double offset = y - k.mean;
  const double base = offset - std::round(offset);
  const int images = static_cast<int>(std::ceil(tail_sigmas * sd)) + 1;
  double sum = 0.0;
  for (int j = -images; j <= images; ++j) {
    const double z = (base + j) / sd;
    if (std::abs(z) <= tail_sigmas) sum += std_density(z);
  }
  return sum / sd;
}

// Integral of the normal density (mean m, sd s) against the hat function of
// half-width h centred at c.
double hat_mass(double c, double h, double m, double s) {
  const double za = (c - h - m) / s;
  const double zc = (c - m) / s;
  const double zb = (c + h - m) / s;
  if (s >= 0.25 * h) {
    const int pieces = static_cast<int>(std::ceil(4.0 * h / s));
    const double width = h / pieces;
    double total = 0.0;
    for (int side = 0; side < 2; ++side) {
      const double start = side == 0 ? c - h : c;
      for (int piece = 0; piece < pieces; ++piece) {
        const double lo = start + piece * width;
        const double mid = lo + 0.5 * width;
        for (std::size_t q = 0; q < gl_nodes.size(); ++q) {
          const double y = mid + 0.5 * width * gl_nodes[q];
          const double hat = 1.0 - std::abs(y - c) / h;
          total += 0.5 * width * gl_weights[q] * hat * std_density((y - m) / s) / s;
        }
      }
    }
    return total;
  }
  // Closed form for kernels narrower than the hat.
  const double rise = (std_density(za) - std_density(zc)) - za * normal_mass(za, zc);
  const double fall = (std_density(zb) - std_density(zc)) + zb * normal_mass(zc, zb);
  return s * (rise + fall) / h;
}

std::vector<double> hat_weights(std::size_t n, const GaussianKernel& k, double sd) {
  const double h = 1.0 / static_cast<double>(n);
  std::vector<double> w(n, 0.0);
  const auto first = static_cast<std::ptrdiff_t>(std::floor((k.mean - tail_sigmas * sd) / h)) - 1;
  const auto last = static_cast<std::ptrdiff_t>(std::ceil((k.mean + tail_sigmas * sd) / h)) + 1;
  for (std::ptrdiff_t c = first; c <= last; ++c) w[wrap(c, n)] += hat_mass(static_cast<double>(c) * h, h, k.mean, sd);
  return w;
}

std::vector<double> riemann_weights(std::size_t n, const GaussianKernel& k, double sd) {
  const double h = 1.0 / static_cast<double>(n);
  std::vector<double> w(n);
  for (std::size_t d = 0; d < n; ++d) w[d] = h * wrapped_density(static_cast<double>(d) * h, k, sd);
  return w;
}

std::vector<double> circular_convolve(const std::vector<double>& g, const std::vector<double>& w) {
  const std::size_t n = g.size();
  std::vector<double> out(n, 0.0);
  for (std::size_t d = 0; d < n; ++d) {
    const double wd = w[d];
    if (wd == 0.0) continue;
    // out[i] += wd * g[i - d]
    for (std::size_t i = 0; i < d; ++i) out[i] += wd * g[i + n - d];
    for (std::size_t i = d; i < n; ++i) out[i] += wd * g[i - d];
  }
  return out;
}

std::vector<double> shift(const std::vector<double>& g, double displacement) {
  const std::size_t n = g.size();
  const double cells = displacement * static_cast<double>(n);
  const double whole = std::floor(cells);
  const double frac = cells - whole;
  const auto k = static_cast<std::ptrdiff_t>(whole);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto ii = static_cast<std::ptrdiff_t>(i);
    out[i] = (1.0 - frac) * g[wrap(ii - k, n)] + frac * g[wrap(ii - k - 1, n)];
  }
  return out;
}

std::vector<double> kernel_weights(const GridFunction& g, const GaussianKernel& k) {
  const double sd = std::sqrt(k.var);
  if (g.sampling == Sampling::point && sd >= 2.0 * g.dx()) return riemann_weights(g.cells(), k, sd);
  return hat_weights(g.cells(), k, sd);
}

void require_grid(const GridFunction& g) {
  if (g.cells() < 2) throw std::invalid_argument("grid function needs at least 2 cells");
}

}  // namespace

void write_grid_csv(std::ostream& out, const GridFunction& f) {
  const auto old_precision = out.precision(17);
  out << "x,value\n";
  for (std::size_t i = 0; i < f.cells(); ++i) out << f.center(i) << ',' << f.values[i] << '\n';
  out.precision(old_precision);
}

GaussianKernel solution_kernel(const OUParams& p, double t) {
  p.validate();
  return {integrated_mean(p, t), integrated_variance(p, t)};
}

double density_fA(double y, const GaussianKernel& k) {
  if (!(k.var > 0.0)) throw std::invalid_argument("density_fA needs a positive variance");
  const double sd = std::sqrt(k.var);
  return std_density((y - k.mean) / sd) / sd;
}

GridFunction convolve_periodic(const GridFunction& g, const GaussianKernel& k) {
  require_grid(g);
  if (!(k.var >= 0.0)) throw std::invalid_argument("kernel variance must be non-negative");
  GridFunction out;
  out.sampling = g.sampling;
  if (k.var == 0.0) {
    out.values = shift(g.values, k.mean);
  } else {
    out.values = circular_convolve(g.values, kernel_weights(g, k));
  }
  return out;
}

GridFunction exact_expectation(const GridFunction& g, const OUParams& p, double t) {
  return convolve_periodic(g, solution_kernel(p, t));
}

GridFunction exact_variance_field(const GridFunction& g, const OUParams& p, double t) {
  require_grid(g);
  const GaussianKernel k = solution_kernel(p, t);
  GridFunction out;
  out.sampling = g.sampling;
  if (k.var == 0.0) {
    out.values.assign(g.cells(), 0.0);
    return out;
  }
  const std::vector<double> w = kernel_weights(g, k);
  std::vector<double> squares(g.cells());
  for (std::size_t i = 0; i < g.cells(); ++i) squares[i] = g.values[i] * g.values[i];
  const std::vector<double> first = circular_convolve(g.values, w);
  const std::vector<double> second = circular_convolve(squares, w);
  out.values.resize(g.cells());
  for (std::size_t i = 0; i < g.cells(); ++i) out.values[i] = std::max(0.0, second[i] - first[i] * first[i]);
  return out;
}

ReferenceMoments reference_moments(const InitialProfile& profile, const OUParams& p, double t, std::size_t cells,
                                   std::size_t refine) {
  if (refine == 0) throw std::invalid_argument("refinement factor must be positive");
  const GridSpec fine = GridSpec::unit(cells * refine);
  GridFunction g{profile.point_samples(fine), Sampling::point};
  ReferenceMoments ref{restrict_average(exact_expectation(g, p, t), refine),
                       restrict_average(exact_variance_field(g, p, t), refine)};
  return ref;
}

}  // namespace mcfv
