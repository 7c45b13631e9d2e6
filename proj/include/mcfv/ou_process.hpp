#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mcfv/random_stream.hpp"

namespace mcfv {

/// Ornstein-Uhlenbeck coefficient da = theta (mu - a) dt + sigma dW, a(0) = a0.
struct OUParams {
  double mu = 0.0;
  double theta = 1.0;  ///< relaxation rate, > 0
  double sigma = 0.0;  ///< noise intensity, >= 0 (0 gives a deterministic path)
  double a0 = 0.0;

  /// Throws std::invalid_argument unless theta > 0 and sigma >= 0.
  void validate() const;
};

/// E[a(t)].
double exact_mean(const OUParams& p, double t);
/// Var[a(t)].
double exact_variance(const OUParams& p, double t);

/// E[A(t)] with A(t) the time integral of a over [0, t]. This is a
/// displacement; the mean transport speed is integrated_mean / t.
double integrated_mean(const OUParams& p, double t);

/// Var[A(t)]. Evaluated through a power series when theta * t is small, where
/// the closed form loses all significant digits to cancellation.
double integrated_variance(const OUParams& p, double t);

/// Micro-step for the path simulation: T / ceil(3 T lambda / dx) with
/// lambda = mu + sigma. Throws when lambda <= 0; callers must then supply an
/// explicit step.
double choose_micro_step(const OUParams& p, double horizon, double dx);

/// Number of micro-steps needed to cover [0, horizon] with step ds, i.e.
/// ceil(horizon / ds), tolerant of the roundoff in horizon / (horizon / n).
std::size_t micro_step_count(double ds, double horizon);

/// Piecewise constant realization of the coefficient: value a^l on
/// [l ds, (l + 1) ds). Holds micro_step_count(ds, horizon) + 1 values.
class OUPath {
 public:
  OUPath(double ds, double horizon, std::vector<double> values);

  double ds() const { return ds_; }
  double horizon() const { return horizon_; }
  std::span<const double> values() const { return values_; }

  /// Value of the piecewise constant path at t in [0, horizon].
  double value_at(double t) const;

  /// Exact integral of the path over [0, t]. Cell sums are accumulated with
  /// compensation so that differences of antiderivatives are additive to a
  /// few ulp.
  double antiderivative(double t) const;

 private:
  std::size_t cell_of(double t) const;

  double ds_;
  double horizon_;
  std::vector<double> values_;
  std::vector<double> cumulative_;
};

/// Implicit Euler-Maruyama:
///   a^{l+1} = (a^l + ds theta mu + sigma sqrt(ds) Y^l) / (1 + ds theta),
/// starting from a^0 = p.a0.
OUPath simulate_path(const OUParams& p, double ds, double horizon, RandomStream& stream);

/// Integral of the piecewise constant path over [t1, t2], 0 <= t1 <= t2 <= horizon.
double path_integral(const OUPath& path, double t1, double t2);

struct TimeStep {
  double dt = 0.0;
  double displacement = 0.0;  ///< integral of the path over [t, t + dt]
  bool clipped = false;       ///< true when the step was cut at the horizon
};

/// Finds the step dt for which |integral of the path over [t, t + dt]| equals
/// courant * dx, or clips it to horizon - t when that level is never reached.
///
/// Micro-cells are scanned forward from the one containing t until the end of
/// a cell satisfies |integral| >= courant * dx; the root is then bracketed in
/// that cell and refined by bisection (seeded with the linear-interpolation
/// point, which is exact for a constant cell value) until the residual is
/// below tol * dx or 200 iterations have run.
///
/// `horizon` defaults to the path horizon; a larger value throws.
TimeStep find_time_step(const OUPath& path, double t, double dx, double courant, double tol = 1e-12,
                        double horizon = -1.0);

}  // namespace mcfv
