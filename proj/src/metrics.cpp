#include "mcfv/metrics.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

namespace mcfv {

namespace {

void require_same_grid(const GridFunction& a, const GridFunction& b) {
  if (a.cells() != b.cells() || a.cells() == 0)
    throw std::invalid_argument("grid functions live on different grids (" + std::to_string(a.cells()) + " vs " +
                                std::to_string(b.cells()) + " cells)");
}

void require_nested(std::span<const LevelMoments> levels) {
  if (levels.size() < 2) throw std::invalid_argument("a convergence study needs at least two levels");
  for (std::size_t k = 0; k < levels.size(); ++k) {
    const std::size_t cells = levels[k].mean.cells();
    if (cells == 0 || levels[k].variance.cells() != cells)
      throw std::invalid_argument("level mean and variance grids differ");
    if (k > 0) {
      const std::size_t prev = levels[k - 1].mean.cells();
      if (cells <= prev || cells % prev != 0)
        throw std::invalid_argument("levels are not nested: " + std::to_string(prev) + " does not refine to " +
                                    std::to_string(cells));
    }
  }
}

void fill_orders(std::vector<ConvergenceRow>& rows) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t k = 0; k < rows.size(); ++k) {
    if (k == 0) {
      rows[k].order_mean = nan;
      rows[k].order_var = nan;
      continue;
    }
    const double ratio = std::log(static_cast<double>(rows[k].cells) / static_cast<double>(rows[k - 1].cells));
    rows[k].order_mean = std::log(rows[k - 1].eps_mean / rows[k].eps_mean) / ratio;
    rows[k].order_var = std::log(rows[k - 1].delta_var / rows[k].delta_var) / ratio;
  }
}

}  // namespace

double eps_appr(const GridFunction& est, const GridFunction& exact) {
  require_same_grid(est, exact);
  double diff = 0.0;
  double norm = 0.0;
  for (std::size_t i = 0; i < est.cells(); ++i) {
    diff += std::abs(est.values[i] - exact.values[i]);
    norm += std::abs(exact.values[i]);
  }
  if (!(norm > 0.0)) throw std::domain_error("relative error undefined: exact mean is identically zero");
  return diff / norm;
}

double delta_appr(const GridFunction& est, const GridFunction& exact) {
  require_same_grid(est, exact);
  double diff = 0.0;
  for (std::size_t i = 0; i < est.cells(); ++i) diff += std::abs(est.values[i] - exact.values[i]);
  return diff * est.dx();
}

GridFunction restrict_average(const GridFunction& fine, std::size_t factor) {
  if (factor == 0 || fine.cells() % factor != 0)
    throw std::invalid_argument("cannot coarsen " + std::to_string(fine.cells()) + " cells by " +
                                std::to_string(factor));
  GridFunction coarse;
  coarse.sampling = Sampling::cell_average;
  if (factor == 1) {
    coarse.values = fine.values;
    return coarse;
  }
  coarse.values.resize(fine.cells() / factor);
  for (std::size_t i = 0; i < coarse.values.size(); ++i) {
    double sum = 0.0;
    for (std::size_t k = 0; k < factor; ++k) sum += fine.values[i * factor + k];
    coarse.values[i] = sum / static_cast<double>(factor);
  }
  return coarse;
}

std::vector<ConvergenceRow> convergence_table(std::span<const LevelMoments> levels, const ReferenceFn& reference) {
  require_nested(levels);
  std::vector<ConvergenceRow> rows;
  for (const auto& level : levels) {
    const std::size_t cells = level.mean.cells();
    const LevelMoments ref = reference(cells);
    rows.push_back({cells, eps_appr(level.mean, ref.mean), delta_appr(level.variance, ref.variance), 0.0, 0.0});
  }
  fill_orders(rows);
  return rows;
}

std::vector<ConvergenceRow> self_convergence_table(std::span<const LevelMoments> levels) {
  require_nested(levels);
  const LevelMoments& finest = levels.back();
  std::vector<ConvergenceRow> rows;
  for (std::size_t k = 0; k + 1 < levels.size(); ++k) {
    const std::size_t cells = levels[k].mean.cells();
    const std::size_t factor = finest.mean.cells() / cells;
    const GridFunction mean = restrict_average(finest.mean, factor);
    const GridFunction var = restrict_average(finest.variance, factor);
    rows.push_back({cells, eps_appr(levels[k].mean, mean), delta_appr(levels[k].variance, var), 0.0, 0.0});
  }
  fill_orders(rows);
  return rows;
}

void write_convergence_csv(std::ostream& out, std::span<const ConvergenceRow> rows) {
  const auto old_precision = out.precision(17);
  out << "I,eps_mean,delta_var,order_mean,order_var\n";
  for (const auto& r : rows)
    out << r.cells << ',' << r.eps_mean << ',' << r.delta_var << ',' << r.order_mean << ',' << r.order_var << '\n';
  out.precision(old_precision);
}

}  // namespace mcfv
