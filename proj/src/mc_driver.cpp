#include "mcfv/mc_driver.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <mutex>
#include <thread>

namespace mcfv {

namespace {

constexpr std::size_t max_steps_per_sample = 1'000'000'000;

void require_finite(const std::vector<double>& u, std::uint64_t index) {
  for (std::size_t i = 0; i < u.size(); ++i)
    if (!std::isfinite(u[i])) throw SampleFailure(index, "non-finite value in cell " + std::to_string(i));
}

void count_step(std::size_t& steps, std::uint64_t index) {
  if (++steps > max_steps_per_sample) throw SampleFailure(index, "step limit exceeded");
}

}  // namespace

Problem parse_problem(const std::string& name) {
  if (name == "time") return Problem::time;
  if (name == "space") return Problem::space;
  throw std::invalid_argument("unknown problem '" + name + "'");
}

std::string to_string(Problem problem) { return problem == Problem::time ? "time" : "space"; }

void RunConfig::validate() const {
  if (samples < 1) throw std::invalid_argument("samples must be >= 1");
  if (!(final_time > 0.0)) throw std::invalid_argument("final time must be positive");
  if (grid.cells < 2 || grid.dx <= 0.0) throw std::invalid_argument("grid needs at least 2 cells");
  scheme.validate();
  if (problem == Problem::time) {
    ou.validate();
    if (micro_step < 0.0) throw std::invalid_argument("micro_step must be non-negative");
    if (micro_step == 0.0) choose_micro_step(ou, final_time, grid.dx);
  } else {
    resolved_field().validate();
    if (!(zeta >= 0.0)) throw std::invalid_argument("zeta must be non-negative");
    if (noise_cells != 0 && (noise_cells < grid.cells || noise_cells % grid.cells != 0))
      throw std::invalid_argument("noise_cells must be a multiple of the cell count");
  }
}

FieldParams RunConfig::resolved_field() const {
  FieldParams f = field;
  f.cells = grid.cells;
  f.mu = zeta_to_mu(zeta, f);
  return f;
}

// ---------------------------------------------------------------------------

MomentAccumulator::MomentAccumulator(std::size_t cells) : mean_(cells, 0.0), m2_(cells, 0.0) {}

void MomentAccumulator::add(std::span<const double> sample) {
  if (sample.size() != mean_.size())
    throw std::invalid_argument("sample has " + std::to_string(sample.size()) + " cells, accumulator " +
                                std::to_string(mean_.size()));
  ++count_;
  const double inv_n = 1.0 / static_cast<double>(count_);
  for (std::size_t i = 0; i < mean_.size(); ++i) {
    const double delta = sample[i] - mean_[i];
    mean_[i] += delta * inv_n;
    m2_[i] += delta * (sample[i] - mean_[i]);
  }
}

void MomentAccumulator::merge(const MomentAccumulator& other) {
  if (other.count_ == 0) return;
  if (count_ == 0) {
    *this = other;
    return;
  }
  if (other.cells() != cells()) throw std::invalid_argument("cannot merge accumulators of different sizes");
  const double na = static_cast<double>(count_);
  const double nb = static_cast<double>(other.count_);
  const double n = na + nb;
  for (std::size_t i = 0; i < mean_.size(); ++i) {
    const double delta = other.mean_[i] - mean_[i];
    mean_[i] += delta * (nb / n);
    m2_[i] += other.m2_[i] + delta * delta * (na * nb / n);
  }
  count_ += other.count_;
}

std::vector<double> MomentAccumulator::variance(bool unbiased) const {
  std::vector<double> v(mean_.size(), 0.0);
  if (count_ == 0 || (unbiased && count_ < 2)) return v;
  const double denom = static_cast<double>(unbiased ? count_ - 1 : count_);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::max(0.0, m2_[i] / denom);
  return v;
}

MomentAccumulator accumulate(MomentAccumulator acc, std::span<const double> sample) {
  acc.add(sample);
  return acc;
}

MomentAccumulator merge(MomentAccumulator a, const MomentAccumulator& b) {
  a.merge(b);
  return a;
}

// ---------------------------------------------------------------------------

SampleFailure::SampleFailure(std::uint64_t index, const std::string& what)
    : std::runtime_error("sample " + std::to_string(index) + ": " + what), index_(index), detail_(what) {}

SampleRun run_sample_time(const RunConfig& cfg, std::uint64_t sample_index) {
  const double horizon = cfg.final_time;
  const double dx = cfg.grid.dx;
  RandomStream stream(cfg.seed, sample_index);
  const double ds = cfg.micro_step > 0.0 ? cfg.micro_step : choose_micro_step(cfg.ou, horizon, dx);
  const OUPath path = simulate_path(cfg.ou, ds, horizon, stream);

  SampleRun run;
  run.state.u = cfg.profile.cell_averages(cfg.grid);
  TimeStepper stepper(cfg.grid.cells, dx, cfg.scheme);
  double t = 0.0;
  while (t < horizon) {
    const TimeStep step = find_time_step(path, t, dx, cfg.scheme.courant);
    stepper.advance(run.state.u, step.displacement);
    t = step.clipped ? horizon : std::min(horizon, t + step.dt);
    count_step(run.steps, sample_index);
  }
  run.state.time = horizon;
  require_finite(run.state.u, sample_index);
  return run;
}

FieldSample sample_field(const RunConfig& cfg, std::uint64_t sample_index) {
  RandomStream stream(cfg.seed, sample_index);
  const std::size_t noise = cfg.noise_cells == 0 ? cfg.grid.cells : cfg.noise_cells;
  std::vector<double> normals(noise);
  for (double& y : normals) y = stream.normal();
  return synthesize_field(cfg.resolved_field(), coarsen_white_noise(normals, noise / cfg.grid.cells));
}

SampleRun run_sample_space(const RunConfig& cfg, std::uint64_t sample_index) {
  const double horizon = cfg.final_time;
  const FieldSample field = sample_field(cfg, sample_index);

  SampleRun run;
  run.state.u = cfg.profile.cell_averages(cfg.grid);
  run.state.time = horizon;
  if (!(field.max_abs() > 0.0)) return run;  // a == 0: stationary

  const double dt = cfl_dt_space(field, cfg.grid, cfg.scheme.courant);
  SpaceStepper stepper(field.a, cfg.grid.dx, cfg.scheme);
  double t = 0.0;
  while (t < horizon) {
    const bool last = t + dt >= horizon;
    stepper.advance(run.state.u, last ? horizon - t : dt);
    t = last ? horizon : t + dt;
    count_step(run.steps, sample_index);
  }
  require_finite(run.state.u, sample_index);
  return run;
}

SampleRun run_sample(const RunConfig& cfg, std::uint64_t sample_index) {
  return cfg.problem == Problem::time ? run_sample_time(cfg, sample_index) : run_sample_space(cfg, sample_index);
}

std::size_t reduction_block_size(std::size_t samples) { return std::clamp<std::size_t>(samples / 128, 1, 64); }

MomentStats run(const RunConfig& cfg) {
  cfg.validate();
  const auto started = std::chrono::steady_clock::now();

  const std::size_t cells = cfg.grid.cells;
  const std::size_t block = reduction_block_size(cfg.samples);
  const std::size_t blocks = (cfg.samples + block - 1) / block;
  std::vector<MomentAccumulator> partial(blocks, MomentAccumulator(cells));
  std::vector<std::size_t> steps(blocks, 0);

  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::mutex failure_mutex;
  std::uint64_t failure_index = std::numeric_limits<std::uint64_t>::max();
  std::string failure_message;

  const auto worker = [&] {
    for (;;) {
      const std::size_t b = next.fetch_add(1);
      if (b >= blocks || failed.load()) return;
      const std::size_t first = b * block;
      const std::size_t last = std::min(cfg.samples, first + block);
      for (std::size_t i = first; i < last; ++i) {
        try {
          const SampleRun r = run_sample(cfg, i);
          partial[b].add(r.state.u);
          steps[b] += r.steps;
        } catch (const std::exception& e) {
          const auto* sample_error = dynamic_cast<const SampleFailure*>(&e);
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (i < failure_index) {
            failure_index = i;
            failure_message = sample_error != nullptr ? sample_error->detail() : e.what();
          }
          failed.store(true);
          return;
        }
      }
    }
  };

  std::size_t threads = cfg.threads != 0 ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, blocks);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t k = 0; k < threads; ++k) pool.emplace_back(worker);
  }
  if (failed.load()) throw SampleFailure(failure_index, failure_message);

  // Pairwise tree reduction in block order.
  while (partial.size() > 1) {
    std::vector<MomentAccumulator> next_level;
    next_level.reserve((partial.size() + 1) / 2);
    for (std::size_t k = 0; k < partial.size(); k += 2) {
      if (k + 1 < partial.size()) partial[k].merge(partial[k + 1]);
      next_level.push_back(std::move(partial[k]));
    }
    partial = std::move(next_level);
  }

  MomentStats stats;
  stats.samples = partial.front().count();
  stats.mean = GridFunction{partial.front().mean(), Sampling::cell_average};
  stats.variance = GridFunction{partial.front().variance(cfg.unbiased_variance), Sampling::cell_average};
  for (std::size_t s : steps) stats.total_steps += s;
  stats.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return stats;
}

}  // namespace mcfv
