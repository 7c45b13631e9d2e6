#include "mcfv/initial_profile.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "mcfv/fv_solver.hpp"

namespace mcfv {

namespace {

constexpr double pi = std::numbers::pi;

double wrap_unit(double x) {
  double r = x - std::floor(x);
  return r >= 1.0 ? 0.0 : r;
}

}  // namespace

ProfileKind parse_profile_kind(const std::string& name) {
  if (name == "standard") return ProfileKind::standard;
  if (name == "sine") return ProfileKind::sine;
  if (name == "box") return ProfileKind::box;
  if (name == "constant") return ProfileKind::constant;
  throw std::invalid_argument("unknown profile '" + name + "'");
}

std::string to_string(ProfileKind kind) {
  switch (kind) {
    case ProfileKind::standard: return "standard";
    case ProfileKind::sine: return "sine";
    case ProfileKind::box: return "box";
    case ProfileKind::constant: return "constant";
  }
  return "standard";
}

double InitialProfile::operator()(double x) const {
  x = wrap_unit(x);
  switch (kind) {
    case ProfileKind::standard:
      if (x < 0.5) return 0.5 + 0.5 * std::sin(4.0 * pi * x);
      return x < 0.75 ? 1.0 : 0.0;
    case ProfileKind::sine:
      return std::sin(2.0 * pi * x);
    case ProfileKind::box:
      return (x >= 0.25 && x < 0.75) ? 1.0 : 0.0;
    case ProfileKind::constant:
      return value;
  }
  return 0.0;
}

double InitialProfile::antiderivative(double x) const {
  switch (kind) {
    case ProfileKind::standard:
      if (x < 0.5) return 0.5 * x + (1.0 - std::cos(4.0 * pi * x)) / (8.0 * pi);
      if (x < 0.75) return 0.25 + (x - 0.5);
      return 0.5;
    case ProfileKind::sine:
      return (1.0 - std::cos(2.0 * pi * x)) / (2.0 * pi);
    case ProfileKind::box:
      return std::clamp(x, 0.25, 0.75) - 0.25;
    case ProfileKind::constant:
      return value * x;
  }
  return 0.0;
}

double InitialProfile::average(double left, double right) const {
  const double width = right - left;
  if (!(width > 0.0)) return (*this)(left);
  if (kind == ProfileKind::constant) return value;
  // Split [left, right] at the periodic seam.
  const double shift = std::floor(left);
  const double a = left - shift;
  const double b = right - shift;
  double integral = 0.0;
  if (b <= 1.0) {
    integral = antiderivative(b) - antiderivative(a);
  } else {
    integral = antiderivative(1.0) - antiderivative(a) + antiderivative(std::min(b - 1.0, 1.0));
  }
  return integral / width;
}

std::vector<double> InitialProfile::cell_averages(const GridSpec& grid) const {
  std::vector<double> u(grid.cells);
  for (std::size_t i = 0; i < grid.cells; ++i) u[i] = average(grid.interface(i), grid.interface(i + 1));
  return u;
}

std::vector<double> InitialProfile::point_samples(const GridSpec& grid) const {
  std::vector<double> u(grid.cells);
  for (std::size_t i = 0; i < grid.cells; ++i) u[i] = (*this)(grid.center(i));
  return u;
}

}  // namespace mcfv
