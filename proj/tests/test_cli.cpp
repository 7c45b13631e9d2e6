#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "mcfv/cli.hpp"
#include "mcfv/config.hpp"

using namespace mcfv;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result cli(std::vector<std::string> args) {
  args.insert(args.begin(), "mcfv");
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "mcfv_cli_test" / name;
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<double> column(const fs::path& path) {
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  std::vector<double> v;
  while (std::getline(in, line)) v.push_back(std::stod(line.substr(line.find(',') + 1)));
  return v;
}

}  // namespace

TEST_CASE("exact command") {
  const fs::path dir = scratch("exact");
  const Result r = cli({"exact", "--cells", "64", "--out", dir.string()});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("kernel mean 0.12728945") != std::string::npos);
  CHECK(r.out.find("kernel variance 0.0039632") != std::string::npos);
  CHECK(slurp(dir / "exact_mean.csv").rfind("x,value\n", 0) == 0);
  CHECK(column(dir / "exact_mean.csv").size() == 64);

  const fs::path zero = scratch("exact_zero");
  REQUIRE(cli({"exact", "--cells", "32", "--set", "ou.sigma=0", "--out", zero.string()}).code == 0);
  for (double v : column(zero / "exact_var.csv")) CHECK(v == 0.0);

  const fs::path flat = scratch("exact_flat");
  REQUIRE(cli({"exact", "--cells", "32", "--set", "profile=constant", "--set", "profile_value=3", "--out",
               flat.string()})
              .code == 0);
  for (double v : column(flat / "exact_mean.csv")) CHECK(v == doctest::Approx(3.0).epsilon(1e-13));
}

TEST_CASE("configuration errors name the key") {
  Result r = cli({"time-run", "--set", "ou.mu_typo=1"});
  CHECK(r.code == 1);
  CHECK(r.err.find("ou.mu_typo") != std::string::npos);

  r = cli({"time-run", "--order", "3"});
  CHECK(r.code == 1);
  CHECK(r.err.find("order") != std::string::npos);

  r = cli({"exact", "--set", "ou.theta=-1"});
  CHECK(r.code == 1);
  CHECK(r.err.find("ou.theta") != std::string::npos);

  const fs::path dir = scratch("badfile");
  fs::create_directories(dir);
  std::ofstream(dir / "bad.cfg") << "# comment\nsamples = 10\nnot_a_key = 4\n";
  r = cli({"time-run", "--config", (dir / "bad.cfg").string(), "--out", dir.string()});
  CHECK(r.code == 1);
  CHECK(r.err.find("not_a_key") != std::string::npos);

  r = cli({"convergence", "--set", "levels=100"});
  CHECK(r.code == 1);
  CHECK(r.err.find("levels") != std::string::npos);

  CHECK(cli({"time-run", "--preset", "fig9"}).code == 1);
  CHECK(cli({"frobnicate"}).code == 1);
  CHECK(cli({}).code == 1);
}

TEST_CASE("numerical failures exit with code 2 and the sample index") {
  const Result r = cli({"time-run", "--samples", "4", "--cells", "16", "--threads", "1", "--set", "profile=constant",
                        "--set", "profile_value=nan", "--out", scratch("nan").string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("sample 0") != std::string::npos);
}

TEST_CASE("time run: deterministic single sample, reproducibility and round trip") {
  const fs::path a = scratch("run_a"), b = scratch("run_b"), c = scratch("run_c");
  const std::vector<std::string> common = {"time-run", "--samples", "1", "--cells", "50", "--set", "ou.sigma=0"};
  auto args = common;
  args.insert(args.end(), {"--out", a.string()});
  REQUIRE(cli(args).code == 0);
  for (double v : column(a / "var.csv")) CHECK(v == 0.0);

  const std::vector<std::string> random = {"time-run", "--samples", "200", "--cells", "50", "--seed", "9"};
  args = random;
  args.insert(args.end(), {"--threads", "1", "--out", b.string()});
  REQUIRE(cli(args).code == 0);
  args = random;
  args.insert(args.end(), {"--threads", "4", "--out", c.string()});
  REQUIRE(cli(args).code == 0);
  CHECK(slurp(b / "mean.csv") == slurp(c / "mean.csv"));
  CHECK(slurp(b / "var.csv") == slurp(c / "var.csv"));

  const std::string meta = slurp(b / "meta.cfg");
  CHECK(meta.find("seed = 9") != std::string::npos);
  CHECK(meta.find("# eps_mean = ") != std::string::npos);
  const fs::path d = scratch("run_d");
  REQUIRE(cli({"time-run", "--config", (b / "meta.cfg").string(), "--out", d.string()}).code == 0);
  CHECK(slurp(b / "mean.csv") == slurp(d / "mean.csv"));
  CHECK(slurp(b / "var.csv") == slurp(d / "var.csv"));
}

TEST_CASE("space run and field dump") {
  const fs::path still = scratch("space_still");
  REQUIRE(cli({"space-run", "--samples", "3", "--cells", "64", "--set", "field.sigma=0", "--out", still.string()})
              .code == 0);
  for (double v : column(still / "var.csv")) CHECK(v == 0.0);
  CHECK(slurp(still / "meta.cfg").find("final_time = 2\n") != std::string::npos);

  const fs::path moving = scratch("space_moving");
  REQUIRE(cli({"space-run", "--samples", "4", "--cells", "64", "--out", moving.string()}).code == 0);
  const std::string meta = slurp(moving / "meta.cfg");
  CHECK(meta.find("problem = space") != std::string::npos);
  const fs::path again = scratch("space_again");
  REQUIRE(cli({"space-run", "--config", (moving / "meta.cfg").string(), "--out", again.string()}).code == 0);
  CHECK(slurp(moving / "mean.csv") == slurp(again / "mean.csv"));

  const fs::path field = scratch("field");
  REQUIRE(cli({"field-dump", "--cells", "64", "--set", "sample_index=2", "--out", field.string()}).code == 0);
  CHECK(slurp(field / "field.csv").rfind("x,a\n", 0) == 0);
  CHECK(column(field / "field.csv").size() == 64);
}

TEST_CASE("convergence command") {
  const fs::path dir = scratch("conv");
  const Result r = cli({"convergence", "--samples", "20", "--set", "levels=20,40,80", "--out", dir.string()});
  REQUIRE(r.code == 0);
  const std::string csv = slurp(dir / "convergence.csv");
  CHECK(csv.rfind("I,eps_mean,delta_var,order_mean,order_var\n20,", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);

  const fs::path multi = scratch("conv_multi");
  REQUIRE(cli({"convergence", "--samples", "10", "--set", "levels=20,40", "--set", "schemes=1,2:superbee", "--out",
               multi.string()})
              .code == 0);
  CHECK(fs::exists(multi / "convergence_1.csv"));
  CHECK(fs::exists(multi / "convergence_2_superbee.csv"));

  const fs::path space = scratch("conv_space");
  REQUIRE(cli({"convergence", "--samples", "4", "--set", "problem=space", "--set", "levels=32,64,128", "--out",
               space.string()})
              .code == 0);
  const std::string s = slurp(space / "convergence.csv");
  CHECK(std::count(s.begin(), s.end(), '\n') == 3);  // finest level is the reference

  CHECK(cli({"convergence", "--set", "problem=space", "--set", "reference=analytic"}).code == 1);
}

TEST_CASE("presets resolve") {
  for (const std::string& name : Settings::presets()) {
    Settings s;
    s.apply_preset(name);
    CHECK(s.get("preset") == name);
  }
  Settings s;
  s.apply_preset("fig4-desk");
  CHECK(s.get("field.zeta") == "0");
  const RunConfig cfg = make_run_config(s, Problem::space, 64);
  CHECK(cfg.final_time == 2.0);
  s.set("field.zeta", "2");
  CHECK(make_run_config(s, Problem::space, 64).final_time ==
        doctest::Approx(0.5 / make_run_config(s, Problem::space, 64).resolved_field().mu));
}

namespace {

/// Circular mean position of a nonnegative profile.
double centre_of_mass(const fs::path& csv) {
  std::ifstream in(csv);
  std::string line;
  std::getline(in, line);
  double c = 0.0, s = 0.0;
  while (std::getline(in, line)) {
    const double x = std::stod(line.substr(0, line.find(',')));
    const double u = std::stod(line.substr(line.find(',') + 1));
    c += u * std::cos(2.0 * M_PI * x);
    s += u * std::sin(2.0 * M_PI * x);
  }
  return std::atan2(s, c) / (2.0 * M_PI);
}

double wrapped(double d) { return d - std::round(d); }

}  // namespace

TEST_CASE("a mean close to zero slows transport down") {
  // reduced grid and sample count; same normalised final time for both
  const fs::path start = scratch("com_start"), slow = scratch("com_slow"), fast = scratch("com_fast");
  const std::vector<std::string> base = {"space-run", "--preset", "fig3-desk", "--cells", "256",
                                         "--samples", "40",        "--set",    "distance=0.25"};
  auto args = base;
  args.insert(args.end(), {"--set", "field.sigma=0", "--out", start.string()});
  REQUIRE(cli(args).code == 0);
  args = base;
  args.insert(args.end(), {"--set", "field.zeta=1", "--out", slow.string()});
  REQUIRE(cli(args).code == 0);
  args = base;
  args.insert(args.end(), {"--set", "field.zeta=4", "--out", fast.string()});
  REQUIRE(cli(args).code == 0);
  const double c0 = centre_of_mass(start / "mean.csv");
  const double d_slow = wrapped(centre_of_mass(slow / "mean.csv") - c0);
  const double d_fast = wrapped(centre_of_mass(fast / "mean.csv") - c0);
  CHECK(d_fast > 0.15);
  CHECK(d_slow < 0.5 * d_fast);
}

TEST_CASE("with zero mean velocity the variance sits at the initial jumps") {
  const fs::path dir = scratch("mu0");
  REQUIRE(cli({"space-run", "--preset", "fig4-desk", "--cells", "256", "--samples", "40", "--out", dir.string()})
              .code == 0);
  std::ifstream in(dir / "var.csv");
  std::string line;
  std::getline(in, line);
  double near = 0.0, total = 0.0, near_cells = 0.0, cells = 0.0;
  while (std::getline(in, line)) {
    const double x = std::stod(line.substr(0, line.find(',')));
    const double v = std::stod(line.substr(line.find(',') + 1));
    // jumps of the standard profile at x = 0, 1/2 and 3/4
    const bool close = std::min({std::abs(wrapped(x)), std::abs(x - 0.5), std::abs(x - 0.75)}) < 0.05;
    near += close ? v : 0.0;
    near_cells += close;
    total += v;
    cells += 1.0;
  }
  CHECK(near / total > 2.0 * near_cells / cells);
}
