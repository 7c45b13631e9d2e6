#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "mcfv/fv_solver.hpp"
#include "mcfv/gaussian_field.hpp"
#include "mcfv/grid_function.hpp"
#include "mcfv/initial_profile.hpp"
#include "mcfv/ou_process.hpp"

namespace mcfv {

enum class Problem {
  time,   ///< u_t + (a(t) u)_x = 0, a an OU process
  space,  ///< u_t + a(x) u_x = 0, a a stationary Gaussian field
};

Problem parse_problem(const std::string& name);
std::string to_string(Problem problem);

struct RunConfig {
  Problem problem = Problem::time;
  std::size_t samples = 1;
  std::uint64_t seed = 1;
  GridSpec grid = GridSpec::unit(100);
  SchemeConfig scheme;
  double final_time = 1.0;
  InitialProfile profile;

  // time problem
  OUParams ou;
  double micro_step = 0.0;  ///< 0 selects choose_micro_step

  // space problem; field.mu is replaced by zeta_to_mu(zeta, field)
  FieldParams field;
  double zeta = 0.0;
  /// White-noise resolution. 0 uses the grid; a multiple of the grid draws
  /// that many normals and coarsens them, so runs on nested grids with the
  /// same noise_cells see the same large-scale field per sample.
  std::size_t noise_cells = 0;

  std::size_t threads = 0;  ///< 0: hardware concurrency
  bool unbiased_variance = false;

  void validate() const;
  /// Field parameters on the solver grid with the zeta-derived mean.
  FieldParams resolved_field() const;
};

/// Streaming per-cell mean and sum of squared deviations.
class MomentAccumulator {
 public:
  explicit MomentAccumulator(std::size_t cells = 0);

  /// Welford update with one sample.
  void add(std::span<const double> sample);
  /// Chan et al. pairwise combination; `other` must describe samples that
  /// come after the ones already held.
  void merge(const MomentAccumulator& other);

  std::size_t count() const { return count_; }
  std::size_t cells() const { return mean_.size(); }
  const std::vector<double>& mean() const { return mean_; }
  const std::vector<double>& m2() const { return m2_; }
  /// m2 / count, or m2 / (count - 1) when `unbiased`.
  std::vector<double> variance(bool unbiased = false) const;

 private:
  std::size_t count_ = 0;
  std::vector<double> mean_;
  std::vector<double> m2_;
};

MomentAccumulator accumulate(MomentAccumulator acc, std::span<const double> sample);
MomentAccumulator merge(MomentAccumulator a, const MomentAccumulator& b);

struct SampleRun {
  State state;
  std::size_t steps = 0;
};

/// One realization of the time-dependent problem (adaptive steps on a
/// simulated OU path).
SampleRun run_sample_time(const RunConfig& cfg, std::uint64_t sample_index);

/// Velocity field of one space-problem sample.
FieldSample sample_field(const RunConfig& cfg, std::uint64_t sample_index);

/// One realization of the space-dependent problem (fixed CFL step on a
/// sampled field, last step clipped to the horizon).
SampleRun run_sample_space(const RunConfig& cfg, std::uint64_t sample_index);

SampleRun run_sample(const RunConfig& cfg, std::uint64_t sample_index);

struct MomentStats {
  GridFunction mean;
  GridFunction variance;
  std::size_t samples = 0;
  double wall_seconds = 0.0;
  std::size_t total_steps = 0;
};

/// Raised when a sample fails; carries the sample index.
class SampleFailure : public std::runtime_error {
 public:
  SampleFailure(std::uint64_t index, const std::string& what);
  std::uint64_t index() const { return index_; }
  /// Message without the sample prefix.
  const std::string& detail() const { return detail_; }

 private:
  std::uint64_t index_;
  std::string detail_;
};

/// Runs all samples and reduces their moments. Samples are grouped into
/// fixed blocks by index and the block accumulators are merged in a fixed
/// pairwise tree, so the result does not depend on the thread count.
MomentStats run(const RunConfig& cfg);

/// Samples per reduction block for a run of `samples` samples.
std::size_t reduction_block_size(std::size_t samples);

}  // namespace mcfv
