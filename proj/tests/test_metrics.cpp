#include <doctest.h>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include "mcfv/metrics.hpp"

using namespace mcfv;
using quad = boost::multiprecision::cpp_bin_float_quad;

namespace {

GridFunction random_function(std::mt19937_64& gen, std::size_t n, double offset) {
  std::normal_distribution<double> nd;
  GridFunction f;
  for (std::size_t i = 0; i < n; ++i) f.values.push_back(offset + nd(gen));
  return f;
}

}  // namespace

TEST_CASE("error norms against quad-precision sums") {
  std::mt19937_64 gen(12);
  for (int trial = 0; trial < 50; ++trial) {
    const GridFunction exact = random_function(gen, 1000, 0.3);
    GridFunction est = exact;
    std::normal_distribution<double> noise(0.0, 1e-3);
    for (double& v : est.values) v += noise(gen);

    quad diff = 0, norm = 0;
    for (std::size_t i = 0; i < 1000; ++i) {
      diff += abs(quad(est.values[i]) - quad(exact.values[i]));
      norm += abs(quad(exact.values[i]));
    }
    CHECK(eps_appr(est, exact) == doctest::Approx(static_cast<double>(diff / norm)).epsilon(1e-12));
    CHECK(delta_appr(est, exact) == doctest::Approx(static_cast<double>(diff / 1000)).epsilon(1e-12));
  }
}

TEST_CASE("error norm preconditions") {
  const GridFunction zero{std::vector<double>(8, 0.0)};
  const GridFunction one{std::vector<double>(8, 1.0)};
  CHECK_THROWS_AS(eps_appr(one, zero), std::domain_error);
  CHECK(eps_appr(zero, one) == 1.0);
  CHECK(delta_appr(one, zero) == doctest::Approx(1.0));
  CHECK_THROWS_AS(delta_appr(one, GridFunction{std::vector<double>(4, 1.0)}), std::invalid_argument);
}

TEST_CASE("restriction averages blocks") {
  const GridFunction fine{{1.0, 3.0, 5.0, 7.0, 0.0, 2.0}};
  const GridFunction coarse = restrict_average(fine, 2);
  CHECK(coarse.values == std::vector<double>{2.0, 6.0, 1.0});
  CHECK(restrict_average(fine, 3).values == std::vector<double>{3.0, 3.0});
  CHECK(restrict_average(fine, 1).values == fine.values);
  CHECK_THROWS_AS(restrict_average(fine, 4), std::invalid_argument);
}

TEST_CASE("observed orders of a synthetic sequence") {
  // level error C h^p is realised by a constant offset on each level
  std::vector<LevelMoments> levels;
  for (std::size_t n : {16u, 32u, 64u, 128u}) {
    const double h = 1.0 / n;
    levels.push_back({GridFunction{std::vector<double>(n, 1.0 + 3.0 * h * h)},
                      GridFunction{std::vector<double>(n, 0.5 * h)}});
  }
  const auto rows = convergence_table(levels, [](std::size_t n) {
    return LevelMoments{GridFunction{std::vector<double>(n, 1.0)}, GridFunction{std::vector<double>(n, 0.0)}};
  });
  REQUIRE(rows.size() == 4);
  CHECK(std::isnan(rows[0].order_mean));
  for (std::size_t k = 1; k < 4; ++k) {
    CHECK(rows[k].order_mean == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(rows[k].order_var == doctest::Approx(1.0).epsilon(1e-9));
  }

  const auto self = self_convergence_table(levels);
  REQUIRE(self.size() == 3);
  CHECK(self[0].cells == 16);
  const double h0 = 1.0 / 16, hf = 1.0 / 128;
  CHECK(self[0].eps_mean == doctest::Approx(3.0 * (h0 * h0 - hf * hf) / (1.0 + 3.0 * hf * hf)));
  CHECK(self[0].delta_var == doctest::Approx(0.5 * (h0 - hf)));
}

TEST_CASE("convergence preconditions") {
  std::vector<LevelMoments> one = {{GridFunction{std::vector<double>(8, 1.0)}, GridFunction{std::vector<double>(8)}}};
  CHECK_THROWS_AS(self_convergence_table(one), std::invalid_argument);
  std::vector<LevelMoments> bad = {one[0], {GridFunction{std::vector<double>(12, 1.0)}, GridFunction{std::vector<double>(12)}}};
  CHECK_THROWS_AS(self_convergence_table(bad), std::invalid_argument);
}

TEST_CASE("convergence csv schema") {
  std::ostringstream out;
  const std::vector<ConvergenceRow> rows = {{100, 0.5, 0.25, std::nan(""), std::nan("")}, {200, 0.125, 0.0625, 2.0, 2.0}};
  write_convergence_csv(out, rows);
  CHECK(out.str() == "I,eps_mean,delta_var,order_mean,order_var\n100,0.5,0.25,nan,nan\n200,0.125,0.0625,2,2\n");
}
