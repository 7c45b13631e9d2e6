#pragma once

#include <string>
#include <vector>

namespace mcfv {

struct GridSpec;

enum class ProfileKind {
  standard,  ///< 1/2 + 1/2 sin(4 pi x) on [0, 1/2), 1 on [1/2, 3/4), 0 on [3/4, 1)
  sine,      ///< sin(2 pi x)
  box,       ///< 1 on [1/4, 3/4), 0 elsewhere
  constant,  ///< `value` everywhere
};

ProfileKind parse_profile_kind(const std::string& name);
std::string to_string(ProfileKind kind);

/// Periodic initial condition g on [0, 1).
struct InitialProfile {
  ProfileKind kind = ProfileKind::standard;
  double value = 1.0;

  double operator()(double x) const;
  /// Exact average of g over [left, right], right - left <= 1.
  double average(double left, double right) const;

  std::vector<double> cell_averages(const GridSpec& grid) const;
  std::vector<double> point_samples(const GridSpec& grid) const;

 private:
  double antiderivative(double x) const;  // over [0, x], x in [0, 1]
};

}  // namespace mcfv
