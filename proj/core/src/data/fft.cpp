#include "lnop/data/fft.hpp"

#include <algorithm>
#include <mutex>

#include <fftw3.h>

#include "lnop/error.hpp"

namespace lnop::fft {
namespace {

// The FFTW planner is not thread-safe; execution of distinct plans is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

struct RealTransform::Plans {
  double* real = nullptr;
  fftw_complex* spec = nullptr;
  fftw_plan r2c = nullptr;
  fftw_plan c2r = nullptr;

  ~Plans() {
    std::lock_guard lock(planner_mutex());
    if (r2c) fftw_destroy_plan(r2c);
    if (c2r) fftw_destroy_plan(c2r);
    fftw_free(real);
    fftw_free(spec);
  }
};

RealTransform::RealTransform(Shape extents) : extents_(std::move(extents)), plans_(std::make_unique<Plans>()) {
  if (extents_.empty() || extents_.size() > 3) throw DimensionError("RealTransform supports 1 to 3 axes");
  real_size_ = numel(extents_);
  spectrum_size_ = numel(spectrum_extents());
  std::vector<int> n(extents_.begin(), extents_.end());
  std::lock_guard lock(planner_mutex());
  plans_->real = fftw_alloc_real(real_size_);
  plans_->spec = fftw_alloc_complex(spectrum_size_);
  const int rank = static_cast<int>(n.size());
  plans_->r2c = fftw_plan_dft_r2c(rank, n.data(), plans_->real, plans_->spec, FFTW_ESTIMATE);
  plans_->c2r = fftw_plan_dft_c2r(rank, n.data(), plans_->spec, plans_->real, FFTW_ESTIMATE);
  if (!plans_->r2c || !plans_->c2r) throw SolverError("FFTW planning failed for " + to_string(extents_));
}

RealTransform::~RealTransform() = default;

Shape RealTransform::spectrum_extents() const {
  Shape s = extents_;
  s.back() = s.back() / 2 + 1;
  return s;
}

void RealTransform::forward(std::span<const double> in, std::span<Complex> out) {
  if (in.size() != real_size_ || out.size() != spectrum_size_) throw DimensionError("RealTransform::forward sizes");
  std::copy(in.begin(), in.end(), plans_->real);
  fftw_execute(plans_->r2c);
  const auto* src = reinterpret_cast<const Complex*>(plans_->spec);
  std::copy(src, src + spectrum_size_, out.begin());
}

void RealTransform::inverse(std::span<const Complex> in, std::span<double> out) {
  if (in.size() != spectrum_size_ || out.size() != real_size_) throw DimensionError("RealTransform::inverse sizes");
  std::copy(in.begin(), in.end(), reinterpret_cast<Complex*>(plans_->spec));
  fftw_execute(plans_->c2r);
  const double norm = 1.0 / static_cast<double>(real_size_);
  for (std::size_t i = 0; i < real_size_; ++i) out[i] = plans_->real[i] * norm;
}

void inverse_complex(std::vector<Complex>& data, const Shape& extents) {
  if (data.size() != numel(extents)) throw DimensionError("inverse_complex: size mismatch");
  std::vector<int> n(extents.begin(), extents.end());
  fftw_plan plan;
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  {
    std::lock_guard lock(planner_mutex());
    plan = fftw_plan_dft(static_cast<int>(n.size()), n.data(), buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  if (!plan) throw SolverError("FFTW planning failed for " + to_string(extents));
  fftw_execute(plan);
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(plan);
}

}  // namespace lnop::fft
