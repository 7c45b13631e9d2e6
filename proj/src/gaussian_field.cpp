#include "mcfv/gaussian_field.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <utility>

namespace mcfv {

namespace {

struct FftwFree {
  void operator()(fftw_complex* p) const { fftw_free(p); }
};
using ComplexBuffer = std::unique_ptr<fftw_complex[], FftwFree>;

ComplexBuffer make_buffer(std::size_t n) { return ComplexBuffer(fftw_alloc_complex(n)); }

// FFTW planning is not thread-safe; execution with the new-array interface
// is. Plans are created once per (size, direction) and kept for the process.
class PlanCache {
 public:
  fftw_plan get(std::size_t n, int sign) {
    std::lock_guard<std::mutex> lock(mutex_);
    const auto key = std::make_pair(n, sign);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    auto in = make_buffer(n);
    auto out = make_buffer(n);
    fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(n), in.get(), out.get(), sign, FFTW_ESTIMATE);
    if (plan == nullptr) throw std::runtime_error("FFTW planning failed");
    plans_.emplace(key, plan);
    return plan;
  }

  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

 private:
  std::mutex mutex_;
  std::map<std::pair<std::size_t, int>, fftw_plan> plans_;
};

PlanCache& plan_cache() {
  static PlanCache cache;
  return cache;
}

}  // namespace

void FieldParams::validate() const {
  if (q < 1) throw std::invalid_argument("field.q must be >= 1");
  if (!(cutoff > 0.0)) throw std::invalid_argument("field.cutoff must be positive");
  if (!(sigma >= 0.0)) throw std::invalid_argument("field.sigma must be non-negative");
  if (cells < 4 || cells % 2 != 0) throw std::invalid_argument("field needs an even number of cells >= 4");
  if (!std::isfinite(mu)) throw std::invalid_argument("field mean must be finite");
}

double FieldSample::max_abs() const {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

double spectral_density(double xi, int q) {
  if (q < 1) throw std::invalid_argument("q must be >= 1");
  return std::pow(1.0 + xi * xi, -q);
}

std::vector<double> spectral_weights(const FieldParams& p) {
  p.validate();
  const std::size_t n = p.cells;
  std::vector<double> gamma(n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t folded = k <= n / 2 ? k : n - k;
    const double xi = static_cast<double>(folded) / p.cutoff;
    gamma[k] = spectral_density(xi, p.q) / p.cutoff;
  }
  return gamma;
}

FieldSample synthesize_field(const FieldParams& p, std::span<const double> normals, double* max_imag) {
  p.validate();
  const std::size_t n = p.cells;
  if (normals.size() != n) throw std::invalid_argument("need one normal draw per interface");

  FieldSample field;
  field.a.assign(n, p.mu);
  if (p.sigma == 0.0) {
    if (max_imag != nullptr) *max_imag = 0.0;
    return field;
  }

  const double delta = p.cutoff / static_cast<double>(n);
  const double scale = std::sqrt(p.sigma / delta);
  const std::vector<double> gamma = spectral_weights(p);

  auto work = make_buffer(n);
  auto spectrum = make_buffer(n);
  for (std::size_t i = 0; i < n; ++i) {
    work[i][0] = scale * normals[i];
    work[i][1] = 0.0;
  }
  fftw_execute_dft(plan_cache().get(n, FFTW_FORWARD), work.get(), spectrum.get());
  for (std::size_t k = 0; k < n; ++k) {
    const double filter = std::sqrt(gamma[k]);
    spectrum[k][0] *= filter;
    spectrum[k][1] *= filter;
  }
  fftw_execute_dft(plan_cache().get(n, FFTW_BACKWARD), spectrum.get(), work.get());

  const double inv_n = 1.0 / static_cast<double>(n);
  double imag = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    field.a[i] = p.mu + work[i][0] * inv_n;
    imag = std::max(imag, std::abs(work[i][1] * inv_n));
  }
  if (max_imag != nullptr) *max_imag = imag;
  return field;
}

FieldSample sample_field(const FieldParams& p, RandomStream& stream) {
  p.validate();
  std::vector<double> normals(p.cells);
  for (double& y : normals) y = stream.normal();
  return synthesize_field(p, normals);
}

double field_variance(const FieldParams& p) {
  const std::vector<double> gamma = spectral_weights(p);
  double sum = 0.0;
  for (double g : gamma) sum += g;
  const double n = static_cast<double>(p.cells);
  const double delta = p.cutoff / n;
  return p.sigma / delta * sum / n;
}

double zeta_to_mu(double zeta, const FieldParams& p) {
  if (!(zeta >= 0.0)) throw std::invalid_argument("zeta must be non-negative");
  return zeta * std::sqrt(field_variance(p));
}

std::vector<double> coarsen_white_noise(std::span<const double> fine, std::size_t factor) {
  if (factor == 0 || fine.size() % factor != 0)
    throw std::invalid_argument("noise length must be a multiple of the coarsening factor");
  if (factor == 1) return {fine.begin(), fine.end()};
  const double norm = 1.0 / std::sqrt(static_cast<double>(factor));
  const std::size_t n = fine.size();
  std::vector<double> coarse(n / factor);
  // Block i is centred on the fine index of coarse interface i (wrapping).
  const std::size_t back = factor / 2;
  for (std::size_t i = 0; i < coarse.size(); ++i) {
    double sum = 0.0;
    const std::size_t start = i * factor + n - back;
    for (std::size_t k = 0; k < factor; ++k) sum += fine[(start + k) % n];
    coarse[i] = sum * norm;
  }
  return coarse;
}

void write_field_csv(std::ostream& out, const FieldSample& field) {
  const auto old_precision = out.precision(17);
  out << "x,a\n";
  const double dx = 1.0 / static_cast<double>(field.a.size());
  for (std::size_t i = 0; i < field.a.size(); ++i) out << static_cast<double>(i) * dx << ',' << field.a[i] << '\n';
  out.precision(old_precision);
}

}  // namespace mcfv
