#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace mcfv {

struct FieldSample;

/// Uniform periodic grid of `cells` cells on [0, 1].
struct GridSpec {
  std::size_t cells = 0;
  double dx = 0.0;

  static GridSpec unit(std::size_t cells);

  double center(std::size_t i) const { return (static_cast<double>(i) + 0.5) * dx; }
  /// Left interface x_{i-1/2} of cell i.
  double interface(std::size_t i) const { return static_cast<double>(i) * dx; }
};

/// Cell averages u_i at time `time`. Indices wrap periodically.
struct State {
  std::vector<double> u;
  double time = 0.0;
};

enum class Limiter { minmod, superbee };

Limiter parse_limiter(const std::string& name);
std::string to_string(Limiter limiter);

struct SchemeConfig {
  int order = 1;  ///< 1: upwind, 2: limited reconstruction + SSP-RK2
  Limiter limiter = Limiter::minmod;
  double courant = 0.45;

  void validate() const;
};

/// Smaller-magnitude argument when the signs agree, else 0.
inline double minmod(double a, double b) { return std::max(0.0, std::min(a, b)) + std::min(0.0, std::max(a, b)); }

/// maxmod(minmod(2a, b), minmod(a, 2b)).
inline double superbee(double a, double b) {
  const double sign = 0.5 * (std::copysign(1.0, a) + std::copysign(1.0, b));
  const double aa = std::abs(a);
  const double bb = std::abs(b);
  return sign * std::max(std::min(2.0 * aa, bb), std::min(aa, 2.0 * bb));
}

/// First-order conservative upwind step for u_t + (a(t) u)_x = 0, where
/// `displacement` is the integral of a over the step (the role of a dt).
/// Throws when |displacement| > dx.
State upwind_step_time(const State& s, double displacement, const GridSpec& grid);

/// First-order non-conservative upwind step for u_t + a(x) u_x = 0 with
/// interface velocities from `field`. Throws when dt max|a| > dx.
State upwind_step_space(const State& s, const FieldSample& field, double dt, const GridSpec& grid);

/// Per-cell limited slope (an increment across the cell, not per unit length).
std::vector<double> limited_slopes(const State& s, Limiter limiter);

/// SSP-RK2 with limited piecewise-linear reconstruction, conservative form.
State second_order_step_time(const State& s, double displacement, Limiter limiter, const GridSpec& grid);

/// SSP-RK2 with limited piecewise-linear reconstruction, non-conservative form.
State second_order_step_space(const State& s, const FieldSample& field, double dt, Limiter limiter,
                              const GridSpec& grid);

/// c dx / max |a|. Throws std::domain_error for an identically zero field.
double cfl_dt_space(const FieldSample& field, const GridSpec& grid, double courant);

/// Periodic total variation sum |u_{i+1} - u_i|.
double total_variation(std::span<const double> u);
inline double total_variation(const State& s) { return total_variation(s.u); }

/// In-place stepping for the time-dependent problem with reusable buffers.
class TimeStepper {
 public:
  TimeStepper(std::size_t cells, double dx, const SchemeConfig& scheme);

  void advance(std::vector<double>& u, double displacement);

 private:
  void euler_stage(std::span<const double> v, double nu, std::span<double> out);

  double dx_;
  SchemeConfig scheme_;
  std::vector<double> padded_;
  std::vector<double> slopes_;
  std::vector<double> flux_;
  std::vector<double> stage_;
  std::vector<double> stage2_;
};

/// In-place stepping for the space-dependent problem with a frozen field.
class SpaceStepper {
 public:
  SpaceStepper(std::span<const double> interface_velocity, double dx, const SchemeConfig& scheme);

  void advance(std::vector<double>& u, double dt);

 private:
  void euler_stage(std::span<const double> v, double ratio, std::span<double> out);

  double dx_;
  double max_speed_;
  SchemeConfig scheme_;
  std::vector<double> positive_;  // max(a_{i-1/2}, 0)
  std::vector<double> negative_;  // min(a_{i+1/2}, 0)
  std::vector<double> padded_;
  std::vector<double> slopes_;
  std::vector<double> stage_;
  std::vector<double> stage2_;
};

}  // namespace mcfv
