#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace reldiff {

namespace detail {
void* fft_alloc(std::size_t bytes);
void fft_free(void* p) noexcept;
}  // namespace detail

/// Allocator returning SIMD-aligned storage, as required by the FFT plans.
template <class T>
struct AlignedAllocator {
  using value_type = T;
  AlignedAllocator() = default;
  template <class U>
  AlignedAllocator(const AlignedAllocator<U>&) noexcept {}
  T* allocate(std::size_t n) { return static_cast<T*>(detail::fft_alloc(n * sizeof(T))); }
  void deallocate(T* p, std::size_t) noexcept { detail::fft_free(p); }
  template <class U>
  bool operator==(const AlignedAllocator<U>&) const noexcept { return true; }
};

using RealBuffer = std::vector<double, AlignedAllocator<double>>;
using ComplexBuffer = std::vector<std::complex<double>, AlignedAllocator<std::complex<double>>>;

/// Real-to-half-complex transform on a periodic grid of rank 1 or 2 (row-major,
/// last axis halved). forward: X_k = sum_j x_j e^{-2 pi i jk/N};
/// backward: x_j = sum_k X_k e^{+2 pi i jk/N} (unnormalized).
///
/// Plans are cached per shape and shared; execute is safe from any thread as long
/// as the buffers come from AlignedAllocator.
class RealFFT {
 public:
  explicit RealFFT(std::vector<int> dims);

  const std::vector<int>& dims() const { return dims_; }
  std::size_t real_size() const { return real_size_; }
  std::size_t complex_size() const { return complex_size_; }

  void forward(const RealBuffer& in, ComplexBuffer& out) const;
  /// Overwrites `in`.
  void backward(ComplexBuffer& in, RealBuffer& out) const;

 private:
  struct Plans;
  std::vector<int> dims_;
  std::size_t real_size_;
  std::size_t complex_size_;
  std::shared_ptr<const Plans> plans_;
};

/// Complex-to-complex transform in place, sign -1 (forward) or +1 (backward), rank 1 or 2.
class ComplexFFT {
 public:
  explicit ComplexFFT(std::vector<int> dims);
  std::size_t size() const { return size_; }
  void forward(ComplexBuffer& data) const;
  void backward(ComplexBuffer& data) const;

 private:
  struct Plans;
  std::vector<int> dims_;
  std::size_t size_;
  std::shared_ptr<const Plans> plans_;
};

/// Signed integer frequency index of position i on an axis of n points.
inline long signed_index(std::size_t i, std::size_t n) {
  return i <= n / 2 ? static_cast<long>(i) : static_cast<long>(i) - static_cast<long>(n);
}

}  // namespace reldiff
