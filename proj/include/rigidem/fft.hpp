#pragma once

#include <fftw3.h>

#include <complex>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <new>
#include <vector>

#include "rigidem/grid.hpp"

namespace rigidem {

// Allocator backed by fftw_malloc so every buffer fed to FFTW has the same
// (SIMD) alignment as the buffers the plans were created with.
template <class T>
struct FftwAllocator {
  using value_type = T;
  FftwAllocator() = default;
  template <class U>
  FftwAllocator(const FftwAllocator<U>&) {}
  T* allocate(std::size_t n) {
    void* p = fftw_malloc(n * sizeof(T));
    if (!p) throw std::bad_alloc();
    return static_cast<T*>(p);
  }
  void deallocate(T* p, std::size_t) { fftw_free(p); }
  template <class U>
  bool operator==(const FftwAllocator<U>&) const {
    return true;
  }
};

using RealBuffer = std::vector<double, FftwAllocator<double>>;
using SpectralBuffer = std::vector<std::complex<double>, FftwAllocator<std::complex<double>>>;

// Real 3d transforms for one grid size, planned once and reused.
//
// Conventions: forward() includes the 1/n^3 factor, so the coefficients are
// the amplitudes in f(x) = sum_k F(k) exp(i k.x) and backward() is the plain
// unnormalized synthesis.  Plans use FFTW_ESTIMATE so the chosen algorithm,
// and with it the exact floating point result, never depends on runtime
// measurement.  backward() works on a scratch copy because the half-complex
// inverse transform destroys its input.
class FftPlan {
 public:
  static const FftPlan& get(int n) {
    static std::mutex mutex;
    static std::map<int, std::unique_ptr<FftPlan>> cache;
    std::lock_guard<std::mutex> lk(mutex);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, std::unique_ptr<FftPlan>(new FftPlan(n))).first;
    return *it->second;
  }

  int n() const { return n_; }
  std::int64_t real_size() const { return std::int64_t(n_) * n_ * n_; }
  std::int64_t spec_size() const { return std::int64_t(n_) * n_ * (n_ / 2 + 1); }

  // Real field -> normalized half-complex spectrum.  Input is preserved.
  void forward(const double* in, std::complex<double>* out) const {
    fftw_execute_dft_r2c(fwd_, const_cast<double*>(in), reinterpret_cast<fftw_complex*>(out));
    double scale = 1.0 / static_cast<double>(real_size());
    std::int64_t m = spec_size();
    for (std::int64_t i = 0; i < m; ++i) out[i] *= scale;
  }

  // Half-complex spectrum -> real field (unnormalized synthesis).
  void backward(const std::complex<double>* in, double* out) const {
    thread_local SpectralBuffer scratch;
    scratch.assign(in, in + spec_size());
    fftw_execute_dft_c2r(bwd_, reinterpret_cast<fftw_complex*>(scratch.data()), out);
  }

  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;

  ~FftPlan() {
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(bwd_);
  }

 private:
  explicit FftPlan(int n) : n_(n) {
    RealBuffer real(static_cast<std::size_t>(real_size()));
    SpectralBuffer spec(static_cast<std::size_t>(spec_size()));
    fwd_ = fftw_plan_dft_r2c_3d(n, n, n, real.data(),
                                reinterpret_cast<fftw_complex*>(spec.data()), FFTW_ESTIMATE);
    bwd_ = fftw_plan_dft_c2r_3d(n, n, n, reinterpret_cast<fftw_complex*>(spec.data()),
                                real.data(), FFTW_ESTIMATE);
  }

  int n_;
  fftw_plan fwd_;
  fftw_plan bwd_;
};

}  // namespace rigidem
