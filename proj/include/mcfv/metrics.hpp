#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "mcfv/grid_function.hpp"

namespace mcfv {

/// Relative L1 error of an estimated mean: sum |est - exact| / sum |exact|.
double eps_appr(const GridFunction& est, const GridFunction& exact);

/// Absolute L1 error of an estimated variance: dx sum |est - exact|.
double delta_appr(const GridFunction& est, const GridFunction& exact);

/// Conservative coarsening: coarse cell i is the mean of fine cells
/// [i factor, (i + 1) factor).
GridFunction restrict_average(const GridFunction& fine, std::size_t factor);

struct LevelMoments {
  GridFunction mean;
  GridFunction variance;
};

struct ConvergenceRow {
  std::size_t cells = 0;
  double eps_mean = 0.0;
  double delta_var = 0.0;
  /// log(e_prev / e) / log(cells / cells_prev); NaN on the first row.
  double order_mean = 0.0;
  double order_var = 0.0;
};

using ReferenceFn = std::function<LevelMoments(std::size_t cells)>;

/// Errors of each level against an externally supplied reference on the
/// same grid. Levels must be ordered by increasing resolution, each grid
/// dividing the next.
std::vector<ConvergenceRow> convergence_table(std::span<const LevelMoments> levels, const ReferenceFn& reference);

/// Errors of each level except the finest against the finest level averaged
/// down onto it.
std::vector<ConvergenceRow> self_convergence_table(std::span<const LevelMoments> levels);

/// CSV columns: I, eps_mean, delta_var, order_mean, order_var.
void write_convergence_csv(std::ostream& out, std::span<const ConvergenceRow> rows);

}  // namespace mcfv
