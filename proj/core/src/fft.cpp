#include "reldiff/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <new>

#include "reldiff/error.hpp"

namespace reldiff {
namespace detail {

void* fft_alloc(std::size_t bytes) {
  void* p = fftw_malloc(bytes == 0 ? 1 : bytes);
  if (p == nullptr) throw std::bad_alloc();
  return p;
}

void fft_free(void* p) noexcept { fftw_free(p); }

}  // namespace detail

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

std::size_t product(const std::vector<int>& dims) {
  std::size_t n = 1;
  for (int d : dims) n *= static_cast<std::size_t>(d);
  return n;
}

void check_dims(const std::vector<int>& dims) {
  if (dims.empty() || dims.size() > 2) throw ValidationError("FFT rank must be 1 or 2");
  for (int d : dims) {
    if (d < 2) throw ValidationError("FFT axis length must be >= 2");
  }
}

}  // namespace

struct RealFFT::Plans {
  fftw_plan r2c = nullptr;
  fftw_plan c2r = nullptr;
};

struct ComplexFFT::Plans {
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;
};

RealFFT::RealFFT(std::vector<int> dims) : dims_(std::move(dims)) {
  check_dims(dims_);
  real_size_ = product(dims_);
  complex_size_ = real_size_ / static_cast<std::size_t>(dims_.back()) * (dims_.back() / 2 + 1);

  static std::map<std::vector<int>, std::shared_ptr<const Plans>> cache;
  std::lock_guard<std::mutex> lock(planner_mutex());
  auto it = cache.find(dims_);
  if (it != cache.end()) {
    plans_ = it->second;
    return;
  }
  RealBuffer r(real_size_);
  ComplexBuffer c(complex_size_);
  auto plans = std::make_shared<Plans>();
  const int rank = static_cast<int>(dims_.size());
  plans->r2c = fftw_plan_dft_r2c(rank, dims_.data(), r.data(), reinterpret_cast<fftw_complex*>(c.data()),
                                 FFTW_ESTIMATE);
  plans->c2r = fftw_plan_dft_c2r(rank, dims_.data(), reinterpret_cast<fftw_complex*>(c.data()), r.data(),
                                 FFTW_ESTIMATE);
  if (!plans->r2c || !plans->c2r) throw NumericalError("FFTW planning failed");
  plans_ = plans;
  cache.emplace(dims_, plans_);
}

void RealFFT::forward(const RealBuffer& in, ComplexBuffer& out) const {
  if (in.size() != real_size_) throw ValidationError("RealFFT::forward input size mismatch");
  out.resize(complex_size_);
  fftw_execute_dft_r2c(plans_->r2c, const_cast<double*>(in.data()), reinterpret_cast<fftw_complex*>(out.data()));
}

void RealFFT::backward(ComplexBuffer& in, RealBuffer& out) const {
  if (in.size() != complex_size_) throw ValidationError("RealFFT::backward input size mismatch");
  out.resize(real_size_);
  fftw_execute_dft_c2r(plans_->c2r, reinterpret_cast<fftw_complex*>(in.data()), out.data());
}

ComplexFFT::ComplexFFT(std::vector<int> dims) : dims_(std::move(dims)) {
  check_dims(dims_);
  size_ = product(dims_);
  static std::map<std::vector<int>, std::shared_ptr<const Plans>> cache;
  std::lock_guard<std::mutex> lock(planner_mutex());
  auto it = cache.find(dims_);
  if (it != cache.end()) {
    plans_ = it->second;
    return;
  }
  ComplexBuffer c(size_);
  auto plans = std::make_shared<Plans>();
  const int rank = static_cast<int>(dims_.size());
  auto* p = reinterpret_cast<fftw_complex*>(c.data());
  plans->fwd = fftw_plan_dft(rank, dims_.data(), p, p, FFTW_FORWARD, FFTW_ESTIMATE);
  plans->bwd = fftw_plan_dft(rank, dims_.data(), p, p, FFTW_BACKWARD, FFTW_ESTIMATE);
  if (!plans->fwd || !plans->bwd) throw NumericalError("FFTW planning failed");
  plans_ = plans;
  cache.emplace(dims_, plans_);
}

void ComplexFFT::forward(ComplexBuffer& data) const {
  if (data.size() != size_) throw ValidationError("ComplexFFT size mismatch");
  auto* p = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plans_->fwd, p, p);
}

void ComplexFFT::backward(ComplexBuffer& data) const {
  if (data.size() != size_) throw ValidationError("ComplexFFT size mismatch");
  auto* p = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plans_->bwd, p, p);
}

}  // namespace reldiff
