#include "mcfv/ou_process.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace mcfv {

namespace {

void require_time(double t) {
  if (!(t >= 0.0)) throw std::invalid_argument("time must be non-negative, got " + std::to_string(t));
}

// (x + 2 e^{-x} - e^{-2x} / 2 - 3/2) / x^3
double integrated_variance_shape(double x) {
  if (x < 1.0) {
    // sum_{k>=3} (-1)^k (2 - 2^{k-1}) x^{k-3} / k!
    double sum = 0.0;
    double power = 1.0;      // x^{k-3}
    double factorial = 6.0;  // k!
    double two_pow = 4.0;    // 2^{k-1}
    for (int k = 3; k < 60; ++k) {
      const double sign = (k % 2 == 0) ? 1.0 : -1.0;
      const double term = sign * (2.0 - two_pow) * power / factorial;
      sum += term;
      if (std::abs(term) < 1e-18 * std::abs(sum)) break;
      power *= x;
      factorial *= k + 1;
      two_pow *= 2.0;
    }
    return sum;
  }
  return (x + 2.0 * std::expm1(-x) - 0.5 * std::expm1(-2.0 * x)) / (x * x * x);
}

}  // namespace

void OUParams::validate() const {
  if (!(theta > 0.0)) throw std::invalid_argument("ou.theta must be positive");
  if (!(sigma >= 0.0)) throw std::invalid_argument("ou.sigma must be non-negative");
  if (!std::isfinite(mu) || !std::isfinite(a0) || !std::isfinite(theta) || !std::isfinite(sigma))
    throw std::invalid_argument("ou parameters must be finite");
}

double exact_mean(const OUParams& p, double t) {
  require_time(t);
  return p.mu + (p.a0 - p.mu) * std::exp(-p.theta * t);
}

double exact_variance(const OUParams& p, double t) {
  require_time(t);
  return p.sigma * p.sigma / (2.0 * p.theta) * -std::expm1(-2.0 * p.theta * t);
}

double integrated_mean(const OUParams& p, double t) {
  require_time(t);
  return p.mu * t - (p.a0 - p.mu) * std::expm1(-p.theta * t) / p.theta;
}

double integrated_variance(const OUParams& p, double t) {
  require_time(t);
  return p.sigma * p.sigma * t * t * t * integrated_variance_shape(p.theta * t);
}

double choose_micro_step(const OUParams& p, double horizon, double dx) {
  if (!(horizon > 0.0)) throw std::invalid_argument("final time must be positive");
  if (!(dx > 0.0)) throw std::invalid_argument("dx must be positive");
  const double lambda = p.mu + p.sigma;
  if (!(lambda > 0.0))
    throw std::invalid_argument("mu + sigma must be positive to choose a micro-step; set micro_step explicitly");
  return horizon / std::ceil(3.0 * horizon * lambda / dx);
}

std::size_t micro_step_count(double ds, double horizon) {
  if (!(ds > 0.0)) throw std::invalid_argument("micro-step must be positive");
  if (!(horizon > 0.0)) throw std::invalid_argument("final time must be positive");
  const double ratio = horizon / ds;
  const double nearest = std::round(ratio);
  const double n = std::abs(ratio - nearest) <= 1e-9 * std::max(1.0, ratio) ? nearest : std::ceil(ratio);
  return std::max<std::size_t>(1, static_cast<std::size_t>(n));
}

OUPath::OUPath(double ds, double horizon, std::vector<double> values)
    : ds_(ds), horizon_(horizon), values_(std::move(values)) {
  const std::size_t steps = micro_step_count(ds, horizon);
  if (values_.size() != steps + 1)
    throw std::invalid_argument("path needs " + std::to_string(steps + 1) + " values, got " +
                                std::to_string(values_.size()));
  cumulative_.resize(values_.size() + 1);
  // Neumaier summation of the cell integrals.
  double sum = 0.0;
  double carry = 0.0;
  cumulative_[0] = 0.0;
  for (std::size_t l = 0; l < values_.size(); ++l) {
    const double term = values_[l] * ds_;
    const double next = sum + term;
    if (std::abs(sum) >= std::abs(term))
      carry += (sum - next) + term;
    else
      carry += (term - next) + sum;
    sum = next;
    cumulative_[l + 1] = sum + carry;
  }
}

std::size_t OUPath::cell_of(double t) const {
  const double cell = std::floor(t / ds_);
  if (cell <= 0.0) return 0;
  return std::min(static_cast<std::size_t>(cell), values_.size() - 1);
}

double OUPath::value_at(double t) const { return values_[cell_of(t)]; }

double OUPath::antiderivative(double t) const {
  const std::size_t l = cell_of(t);
  return cumulative_[l] + values_[l] * (t - static_cast<double>(l) * ds_);
}

OUPath simulate_path(const OUParams& p, double ds, double horizon, RandomStream& stream) {
  p.validate();
  const std::size_t steps = micro_step_count(ds, horizon);
  std::vector<double> values(steps + 1);
  const double relax = ds * p.theta;
  const double kick = p.sigma * std::sqrt(ds);
  double a = p.a0;
  values[0] = a;
  for (std::size_t l = 0; l < steps; ++l) {
    const double y = stream.normal();
    // Same recursion as (a + ds theta mu + sigma sqrt(ds) y) / (1 + ds theta),
    // written so that a = mu is an exact fixed point when sigma = 0.
    a += (relax * (p.mu - a) + kick * y) / (1.0 + relax);
    values[l + 1] = a;
  }
  return OUPath(ds, horizon, std::move(values));
}

double path_integral(const OUPath& path, double t1, double t2) {
  if (!(t1 >= 0.0) || !(t2 >= t1) || !(t2 <= path.horizon()))
    throw std::invalid_argument("path_integral: need 0 <= t1 <= t2 <= horizon");
  if (t1 == t2) return 0.0;
  return path.antiderivative(t2) - path.antiderivative(t1);
}

TimeStep find_time_step(const OUPath& path, double t, double dx, double courant, double tol, double horizon) {
  if (horizon < 0.0) horizon = path.horizon();
  if (horizon > path.horizon()) throw std::invalid_argument("path horizon is shorter than the requested horizon");
  if (!(t >= 0.0) || !(t < horizon)) throw std::invalid_argument("find_time_step: need 0 <= t < horizon");
  if (!(dx > 0.0)) throw std::invalid_argument("dx must be positive");
  if (!(courant > 0.0) || courant > 1.0) throw std::invalid_argument("courant number must lie in (0, 1]");
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");

  const double target = courant * dx;
  const double base = path.antiderivative(t);
  const auto displacement = [&](double s) { return path.antiderivative(s) - base; };
  const auto phi = [&](double s) { return std::abs(displacement(s)) - target; };

  const double ds = path.ds();
  auto l = static_cast<std::size_t>(std::floor(t / ds));
  double lo = 0.0;
  double hi = 0.0;
  for (;;) {
    double right = static_cast<double>(l + 1) * ds;
    const bool at_end = right >= horizon;
    if (at_end) right = horizon;
    if (phi(right) >= 0.0) {
      lo = std::max(static_cast<double>(l) * ds, t);
      hi = right;
      break;
    }
    if (at_end) return {horizon - t, displacement(horizon), true};
    ++l;
  }

  // The displacement is linear on [lo, hi], so the interpolation point is
  // already the root up to roundoff; bisection only guards against that
  // roundoff.
  const double d_lo = displacement(lo);
  const double d_hi = displacement(hi);
  const double goal = std::copysign(target, d_hi);
  double s = lo + (goal - d_lo) / (d_hi - d_lo) * (hi - lo);
  s = std::clamp(s, lo, hi);
  double residual = phi(s);
  const double limit = tol * dx;
  for (int iter = 0; iter < 200 && std::abs(residual) > limit; ++iter) {
    if (residual < 0.0)
      lo = s;
    else
      hi = s;
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    s = mid;
    residual = phi(s);
  }
  return {s - t, displacement(s), false};
}

}  // namespace mcfv
