#include "mcfv/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include "mcfv/analytic_moments.hpp"
#include "mcfv/config.hpp"
#include "mcfv/mc_driver.hpp"
#include "mcfv/metrics.hpp"

namespace mcfv {

namespace {

namespace fs = std::filesystem;

struct Options {
  std::string config;
  std::string preset;
  std::optional<std::string> seed, samples, cells, order, limiter, courant, threads;
  std::vector<std::string> assignments;
  std::string out = ".";
};

void add_common_options(CLI::App& cmd, Options& o) {
  cmd.add_option("--config", o.config, "Configuration file (key = value lines)");
  cmd.add_option("--preset", o.preset, "Named preset applied before the configuration file");
  cmd.add_option("--seed", o.seed, "Master seed");
  cmd.add_option("--samples", o.samples, "Number of Monte Carlo samples");
  cmd.add_option("--cells", o.cells, "Number of grid cells");
  cmd.add_option("--order", o.order, "Scheme order (1 or 2)");
  cmd.add_option("--limiter", o.limiter, "Slope limiter (minmod or superbee)");
  cmd.add_option("--courant", o.courant, "Courant number");
  cmd.add_option("--threads", o.threads, "Worker threads (0: all cores)");
  cmd.add_option("--set", o.assignments, "Override any key: --set key=value");
  cmd.add_option("--out", o.out, "Output directory");
}

Settings resolve(const Options& o) {
  Settings s;
  std::vector<std::pair<std::string, std::string>> file;
  if (!o.config.empty()) file = read_config_file(o.config);

  std::string preset = o.preset;
  if (preset.empty())
    for (const auto& [key, value] : file)
      if (key == "preset") preset = value;
  if (!preset.empty()) s.apply_preset(preset);

  for (const auto& [key, value] : file)
    if (key != "preset") s.set(key, value);
  for (const auto& a : o.assignments) s.set_assignment(a);

  const std::pair<const char*, const std::optional<std::string>*> flags[] = {
      {"seed", &o.seed},         {"samples", &o.samples}, {"cells", &o.cells},     {"order", &o.order},
      {"limiter", &o.limiter},   {"courant", &o.courant}, {"threads", &o.threads},
  };
  for (const auto& [key, value] : flags)
    if (*value) s.set(key, **value);
  return s;
}

Problem problem_of(const Settings& s) {
  try {
    return parse_problem(s.get("problem"));
  } catch (const std::invalid_argument& e) {
    throw ConfigError("problem", e.what());
  }
}

fs::path prepare_out(const std::string& dir) {
  fs::path path(dir);
  std::error_code ec;
  fs::create_directories(path, ec);
  if (ec) throw ConfigError("out", "cannot create '" + dir + "': " + ec.message());
  return path;
}

void write_file(const fs::path& path, const std::function<void(std::ostream&)>& body) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot write " + path.string());
  body(file);
  if (!file) throw std::runtime_error("write failed for " + path.string());
}

using Telemetry = std::vector<std::pair<std::string, std::string>>;

void write_meta(const fs::path& dir, const Settings& s, const Telemetry& telemetry) {
  write_file(dir / "meta.cfg", [&](std::ostream& out) {
    s.write(out);
    for (const auto& [key, value] : telemetry) out << "# " << key << " = " << value << '\n';
  });
}

/// Pins final_time so the written configuration reproduces the run.
void pin_final_time(Settings& s, const RunConfig& cfg) { s.set("final_time", format_double(cfg.final_time)); }

int cmd_exact(Settings s, const Options& o, std::ostream& out) {
  s.set("problem", "time");
  const RunConfig cfg = make_run_config(s, Problem::time, s.get_size("cells"));
  cfg.ou.validate();
  pin_final_time(s, cfg);
  const GaussianKernel k = solution_kernel(cfg.ou, cfg.final_time);
  const ReferenceMoments ref =
      reference_moments(cfg.profile, cfg.ou, cfg.final_time, cfg.grid.cells, s.get_size("oracle_refine"));

  const fs::path dir = prepare_out(o.out);
  write_file(dir / "exact_mean.csv", [&](std::ostream& f) { write_grid_csv(f, ref.mean); });
  write_file(dir / "exact_var.csv", [&](std::ostream& f) { write_grid_csv(f, ref.variance); });
  write_meta(dir, s, {{"kernel_mean", format_double(k.mean)}, {"kernel_var", format_double(k.var)}});
  out << "kernel mean " << format_double(k.mean) << "\nkernel variance " << format_double(k.var) << '\n';
  return 0;
}

int cmd_run(Settings s, const Options& o, std::ostream& out, Problem problem) {
  s.set("problem", to_string(problem));
  const RunConfig cfg = make_run_config(s, problem, s.get_size("cells"));
  pin_final_time(s, cfg);
  const MomentStats stats = run(cfg);

  Telemetry telemetry = {
      {"wall_seconds", format_double(stats.wall_seconds)},
      {"total_steps", std::to_string(stats.total_steps)},
  };
  if (problem == Problem::time) {
    const ReferenceMoments ref =
        reference_moments(cfg.profile, cfg.ou, cfg.final_time, cfg.grid.cells, s.get_size("oracle_refine"));
    const double eps = eps_appr(stats.mean, ref.mean);
    const double delta = delta_appr(stats.variance, ref.variance);
    telemetry.emplace_back("eps_mean", format_double(eps));
    telemetry.emplace_back("delta_var", format_double(delta));
    out << "eps_mean " << format_double(eps) << "\ndelta_var " << format_double(delta) << '\n';
  } else {
    const FieldParams field = cfg.resolved_field();
    telemetry.emplace_back("field_mean", format_double(field.mu));
    telemetry.emplace_back("field_std", format_double(std::sqrt(field_variance(field))));
  }

  const fs::path dir = prepare_out(o.out);
  write_file(dir / "mean.csv", [&](std::ostream& f) { write_grid_csv(f, stats.mean); });
  write_file(dir / "var.csv", [&](std::ostream& f) { write_grid_csv(f, stats.variance); });
  write_meta(dir, s, telemetry);
  out << "samples " << stats.samples << "\nwall_seconds " << format_double(stats.wall_seconds) << '\n';
  return 0;
}

struct SchemeChoice {
  std::string label;
  int order;
  std::string limiter;
};

std::vector<SchemeChoice> scheme_list(const Settings& s) {
  std::vector<SchemeChoice> out;
  std::stringstream stream(s.get("schemes"));
  std::string item;
  while (std::getline(stream, item, ',')) {
    if (item.empty()) continue;
    if (item == "1") {
      out.push_back({"1", 1, s.get("limiter")});
    } else if (item == "2:minmod" || item == "2:superbee") {
      out.push_back({"2_" + item.substr(2), 2, item.substr(2)});
    } else {
      throw ConfigError("schemes", "unknown scheme '" + item + "' (use 1, 2:minmod, 2:superbee)");
    }
  }
  return out;
}

int cmd_convergence(Settings s, const Options& o, std::ostream& out) {
  const Problem problem = problem_of(s);
  const std::vector<std::size_t> levels = s.get_sizes("levels");
  if (levels.size() < 2) throw ConfigError("levels", "need at least two grid levels");
  for (std::size_t l = 1; l < levels.size(); ++l)
    if (levels[l] <= levels[l - 1] || levels[l] % levels[l - 1] != 0)
      throw ConfigError("levels", "each level must be a proper multiple of the previous one");

  std::string reference = s.get("reference");
  if (reference == "auto") reference = problem == Problem::time ? "analytic" : "finest";
  if (reference != "analytic" && reference != "finest")
    throw ConfigError("reference", "expected analytic, finest or auto");
  if (reference == "analytic" && problem == Problem::space)
    throw ConfigError("reference", "no analytic reference for the space problem");
  const bool common = s.get_bool("common_samples");

  // Validate every level before spending time on any of them.
  std::vector<RunConfig> configs;
  for (std::size_t cells : levels) configs.push_back(make_run_config(s, problem, cells));
  pin_final_time(s, configs.front());
  if (common) {
    const RunConfig& finest = configs.back();
    for (RunConfig& cfg : configs) {
      if (problem == Problem::time && cfg.micro_step == 0.0)
        cfg.micro_step = choose_micro_step(cfg.ou, cfg.final_time, finest.grid.dx);
      if (problem == Problem::space && cfg.noise_cells == 0) cfg.noise_cells = finest.grid.cells;
    }
  }

  std::vector<SchemeChoice> schemes = scheme_list(s);
  const bool single = schemes.empty();
  if (single) schemes.push_back({"", s.get_int("order"), s.get("limiter")});

  const fs::path dir = prepare_out(o.out);
  const std::size_t refine = s.get_size("oracle_refine");
  Telemetry telemetry;
  for (const SchemeChoice& scheme : schemes) {
    std::vector<LevelMoments> moments;
    for (RunConfig cfg : configs) {
      cfg.scheme.order = scheme.order;
      cfg.scheme.limiter = parse_limiter(scheme.limiter);
      MomentStats stats = run(cfg);
      out << (scheme.label.empty() ? "" : "scheme " + scheme.label + " ") << "cells " << cfg.grid.cells
          << " wall_seconds " << format_double(stats.wall_seconds) << '\n';
      telemetry.emplace_back("wall_seconds" + (scheme.label.empty() ? "" : "_" + scheme.label) + "_" +
                                 std::to_string(cfg.grid.cells),
                             format_double(stats.wall_seconds));
      moments.push_back({std::move(stats.mean), std::move(stats.variance)});
    }

    std::vector<ConvergenceRow> rows;
    if (reference == "analytic") {
      const RunConfig& base = configs.front();
      rows = convergence_table(moments, [&](std::size_t cells) {
        ReferenceMoments ref = reference_moments(base.profile, base.ou, base.final_time, cells, refine);
        return LevelMoments{std::move(ref.mean), std::move(ref.variance)};
      });
    } else {
      rows = self_convergence_table(moments);
    }

    const std::string name = single ? "convergence.csv" : "convergence_" + scheme.label + ".csv";
    write_file(dir / name, [&](std::ostream& f) { write_convergence_csv(f, rows); });
    write_convergence_csv(out, rows);
  }
  write_meta(dir, s, telemetry);
  return 0;
}

int cmd_field_dump(Settings s, const Options& o, std::ostream& out) {
  s.set("problem", "space");
  const RunConfig cfg = make_run_config(s, Problem::space, s.get_size("cells"));
  cfg.validate();
  pin_final_time(s, cfg);
  const FieldSample field = sample_field(cfg, s.get_u64("sample_index"));
  const FieldParams params = cfg.resolved_field();

  const fs::path dir = prepare_out(o.out);
  write_file(dir / "field.csv", [&](std::ostream& f) { write_field_csv(f, field); });
  write_meta(dir, s,
             {{"field_mean", format_double(params.mu)},
              {"field_std", format_double(std::sqrt(field_variance(params)))},
              {"max_abs", format_double(field.max_abs())}});
  out << "field_mean " << format_double(params.mu) << "\nmax_abs " << format_double(field.max_abs()) << '\n';
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Monte Carlo finite volume solver for linear advection with random coefficients", "mcfv"};
  app.require_subcommand(1);

  Options o;
  std::function<int(const Settings&)> action;
  const auto command = [&](const char* name, const char* help, std::function<int(const Settings&)> fn) {
    CLI::App* cmd = app.add_subcommand(name, help);
    add_common_options(*cmd, o);
    cmd->callback([&action, fn] { action = fn; });
  };
  command("exact", "Exact mean and variance of the time-dependent problem",
          [&](const Settings& s) { return cmd_exact(s, o, out); });
  command("time-run", "Monte Carlo run of the time-dependent problem",
          [&](const Settings& s) { return cmd_run(s, o, out, Problem::time); });
  command("space-run", "Monte Carlo run of the space-dependent problem",
          [&](const Settings& s) { return cmd_run(s, o, out, Problem::space); });
  command("convergence", "Grid convergence sweep", [&](const Settings& s) { return cmd_convergence(s, o, out); });
  command("field-dump", "Write one sampled velocity field",
          [&](const Settings& s) { return cmd_field_dump(s, o, out); });

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();  // program name
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    return action(resolve(o));
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << '\n';
    return 1;
  } catch (const std::invalid_argument& e) {
    err << "configuration error: " << e.what() << '\n';
    return 1;
  } catch (const SampleFailure& e) {
    err << "numerical failure in sample " << e.index() << ": " << e.detail() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace mcfv
