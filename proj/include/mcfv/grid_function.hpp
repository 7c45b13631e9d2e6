#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

namespace mcfv {

/// How the values of a GridFunction relate to the underlying function.
enum class Sampling {
  point,         ///< samples at the cell centers x_i = (i + 1/2) / cells
  cell_average,  ///< averages over [i / cells, (i + 1) / cells]
};

/// Periodic function on [0, 1] represented on a uniform grid.
struct GridFunction {
  std::vector<double> values;
  Sampling sampling = Sampling::cell_average;

  std::size_t cells() const { return values.size(); }
  double dx() const { return 1.0 / static_cast<double>(values.size()); }
  double center(std::size_t i) const { return (static_cast<double>(i) + 0.5) * dx(); }
};

/// CSV with header "x,value", x at cell centers, 17 significant digits.
void write_grid_csv(std::ostream& out, const GridFunction& f);

}  // namespace mcfv
