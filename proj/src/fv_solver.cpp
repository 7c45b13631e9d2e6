#include "mcfv/fv_solver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "mcfv/gaussian_field.hpp"

#if defined(__GNUC__) && !defined(__clang__) && defined(__x86_64__)
#define MCFV_VECTOR_CLONES __attribute__((target_clones("avx2", "default")))
#else
#define MCFV_VECTOR_CLONES
#endif

namespace mcfv {

namespace {

// Relative slack on the CFL bound.
constexpr double cfl_slack = 1e-12;

// p[k + 2] = v[k] with two periodic ghost cells on either side.
void pad_periodic(std::span<const double> v, std::vector<double>& p) {
  const std::size_t n = v.size();
  p.resize(n + 4);
  std::copy(v.begin(), v.end(), p.begin() + 2);
  p[0] = v[n - 2];
  p[1] = v[n - 1];
  p[n + 2] = v[0];
  p[n + 3] = v[1];
}

// Slopes for padded indices 1 .. n + 2 (cells -1 .. n).
MCFV_VECTOR_CLONES void padded_slopes(const std::vector<double>& p, Limiter limiter, std::vector<double>& s) {
  const std::size_t m = p.size();
  s.resize(m);
  s.front() = 0.0;
  s.back() = 0.0;
  if (limiter == Limiter::minmod) {
    for (std::size_t j = 1; j + 1 < m; ++j) s[j] = minmod(p[j] - p[j - 1], p[j + 1] - p[j]);
  } else {
    for (std::size_t j = 1; j + 1 < m; ++j) s[j] = superbee(p[j] - p[j - 1], p[j + 1] - p[j]);
  }
}

void require_cells(std::size_t n) {
  if (n < 2) throw std::invalid_argument("grid needs at least 2 cells");
}

SchemeConfig order_config(int order, Limiter limiter) {
  SchemeConfig cfg;
  cfg.order = order;
  cfg.limiter = limiter;
  return cfg;
}

}  // namespace

GridSpec GridSpec::unit(std::size_t cells) {
  require_cells(cells);
  return GridSpec{cells, 1.0 / static_cast<double>(cells)};
}

Limiter parse_limiter(const std::string& name) {
  if (name == "minmod") return Limiter::minmod;
  if (name == "superbee") return Limiter::superbee;
  throw std::invalid_argument("unknown limiter '" + name + "'");
}

std::string to_string(Limiter limiter) { return limiter == Limiter::minmod ? "minmod" : "superbee"; }

void SchemeConfig::validate() const {
  if (order != 1 && order != 2) throw std::invalid_argument("order must be 1 or 2");
  if (!(courant > 0.0) || courant > 1.0) throw std::invalid_argument("courant must lie in (0, 1]");
}

// ---------------------------------------------------------------------------

TimeStepper::TimeStepper(std::size_t cells, double dx, const SchemeConfig& scheme) : dx_(dx), scheme_(scheme) {
  require_cells(cells);
  scheme_.validate();
  padded_.resize(cells + 4);
  slopes_.resize(cells + 4);
  flux_.resize(cells + 4);
  stage_.resize(cells);
  stage2_.resize(cells);
}

MCFV_VECTOR_CLONES void TimeStepper::euler_stage(std::span<const double> v, double nu, std::span<double> out) {
  const std::size_t n = v.size();
  pad_periodic(v, padded_);
  const double* p = padded_.data();
  if (scheme_.order == 1) {
    const double up = std::max(nu, 0.0);
    const double down = std::min(nu, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t j = i + 2;
      out[i] = p[j] - up * (p[j] - p[j - 1]) - down * (p[j + 1] - p[j]);
    }
    return;
  }
  padded_slopes(padded_, scheme_.limiter, slopes_);
  const double* s = slopes_.data();
  double* f = flux_.data();
  // f[j] is the flux through the right interface of padded cell j.
  if (nu >= 0.0) {
    for (std::size_t j = 1; j <= n + 1; ++j) f[j] = nu * (p[j] + 0.5 * s[j]);
  } else {
    for (std::size_t j = 1; j <= n + 1; ++j) f[j] = nu * (p[j + 1] - 0.5 * s[j + 1]);
  }
  for (std::size_t i = 0; i < n; ++i) out[i] = p[i + 2] - (f[i + 2] - f[i + 1]);
}

void TimeStepper::advance(std::vector<double>& u, double displacement) {
  if (std::abs(displacement) > dx_ * (1.0 + cfl_slack))
    throw std::domain_error("CFL violation: |displacement| = " + std::to_string(std::abs(displacement)) +
                            " exceeds dx = " + std::to_string(dx_));
  const double nu = displacement / dx_;
  if (scheme_.order == 1) {
    euler_stage(u, nu, stage_);
    u.swap(stage_);
    return;
  }
  euler_stage(u, nu, stage_);
  euler_stage(stage_, nu, stage2_);
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = 0.5 * (u[i] + stage2_[i]);
}

// ---------------------------------------------------------------------------

SpaceStepper::SpaceStepper(std::span<const double> a, double dx, const SchemeConfig& scheme)
    : dx_(dx), max_speed_(0.0), scheme_(scheme) {
  const std::size_t n = a.size();
  require_cells(n);
  scheme_.validate();
  positive_.resize(n);
  negative_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    positive_[i] = std::max(a[i], 0.0);
    negative_[i] = std::min(a[(i + 1) % n], 0.0);
    max_speed_ = std::max(max_speed_, std::abs(a[i]));
  }
  padded_.resize(n + 4);
  slopes_.resize(n + 4);
  stage_.resize(n);
  stage2_.resize(n);
}

MCFV_VECTOR_CLONES void SpaceStepper::euler_stage(std::span<const double> v, double ratio, std::span<double> out) {
  const std::size_t n = v.size();
  pad_periodic(v, padded_);
  const double* p = padded_.data();
  const double* ap = positive_.data();
  const double* am = negative_.data();
  if (scheme_.order == 1) {
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t j = i + 2;
      out[i] = p[j] - ratio * (ap[i] * (p[j] - p[j - 1]) + am[i] * (p[j + 1] - p[j]));
    }
    return;
  }
  padded_slopes(padded_, scheme_.limiter, slopes_);
  const double* s = slopes_.data();
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = i + 2;
    // Upwind traces: left states feed a > 0, right states feed a < 0.
    const double left_here = p[j] + 0.5 * s[j];
    const double left_prev = p[j - 1] + 0.5 * s[j - 1];
    const double right_next = p[j + 1] - 0.5 * s[j + 1];
    const double right_here = p[j] - 0.5 * s[j];
    out[i] = p[j] - ratio * (ap[i] * (left_here - left_prev) + am[i] * (right_next - right_here));
  }
}

void SpaceStepper::advance(std::vector<double>& u, double dt) {
  if (u.size() != positive_.size()) throw std::invalid_argument("state and field sizes differ");
  if (dt * max_speed_ > dx_ * (1.0 + cfl_slack))
    throw std::domain_error("CFL violation: dt max|a| = " + std::to_string(dt * max_speed_) +
                            " exceeds dx = " + std::to_string(dx_));
  const double ratio = dt / dx_;
  if (scheme_.order == 1) {
    euler_stage(u, ratio, stage_);
    u.swap(stage_);
    return;
  }
  euler_stage(u, ratio, stage_);
  euler_stage(stage_, ratio, stage2_);
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = 0.5 * (u[i] + stage2_[i]);
}

// ---------------------------------------------------------------------------

State upwind_step_time(const State& s, double displacement, const GridSpec& grid) {
  TimeStepper stepper(grid.cells, grid.dx, order_config(1, Limiter::minmod));
  State next = s;
  stepper.advance(next.u, displacement);
  return next;
}

State upwind_step_space(const State& s, const FieldSample& field, double dt, const GridSpec& grid) {
  SpaceStepper stepper(field.a, grid.dx, order_config(1, Limiter::minmod));
  State next = s;
  stepper.advance(next.u, dt);
  next.time += dt;
  return next;
}

State second_order_step_time(const State& s, double displacement, Limiter limiter, const GridSpec& grid) {
  TimeStepper stepper(grid.cells, grid.dx, order_config(2, limiter));
  State next = s;
  stepper.advance(next.u, displacement);
  return next;
}

State second_order_step_space(const State& s, const FieldSample& field, double dt, Limiter limiter,
                              const GridSpec& grid) {
  SpaceStepper stepper(field.a, grid.dx, order_config(2, limiter));
  State next = s;
  stepper.advance(next.u, dt);
  next.time += dt;
  return next;
}

std::vector<double> limited_slopes(const State& s, Limiter limiter) {
  require_cells(s.u.size());
  std::vector<double> padded;
  std::vector<double> slopes;
  pad_periodic(s.u, padded);
  padded_slopes(padded, limiter, slopes);
  return {slopes.begin() + 2, slopes.begin() + 2 + static_cast<std::ptrdiff_t>(s.u.size())};
}

double cfl_dt_space(const FieldSample& field, const GridSpec& grid, double courant) {
  const double top = field.max_abs();
  if (!(top > 0.0)) throw std::domain_error("field is identically zero; the solution is stationary");
  return courant * grid.dx / top;
}

double total_variation(std::span<const double> u) {
  const std::size_t n = u.size();
  double tv = 0.0;
  for (std::size_t i = 0; i < n; ++i) tv += std::abs(u[(i + 1) % n] - u[i]);
  return tv;
}

}  // namespace mcfv
