#pragma once

#include <fftw3.h>

#include <complex>
#include <cstring>
#include <map>
#include <mutex>

#include "tfec/types.hpp"

namespace tfec {

// Thin RAII wrapper over FFTW complex transforms. Plans are cached per
// (size, direction) and created with the deterministic heuristic planner, so
// repeated runs use identical algorithms. Each thread executes through its
// own fftw-aligned scratch pair (same alignment the plans were created
// with), which keeps execution thread-safe and allocation-free after the
// first call of each size.
class Fft {
 public:
  static VectorXcd forward(const VectorXcd& x) { return exec(x, FFTW_FORWARD); }

  static VectorXcd forward(const VectorXd& x) {
    return exec(x.cast<std::complex<double>>().eval(), FFTW_FORWARD);
  }

  // Unnormalized inverse; divide by N for the analysis convention used here.
  static VectorXcd backward_raw(const VectorXcd& x) {
    return exec(x, FFTW_BACKWARD);
  }

  static VectorXcd inverse(const VectorXcd& x) {
    VectorXcd y = exec(x, FFTW_BACKWARD);
    y /= static_cast<double>(x.size());
    return y;
  }

  // In-place unnormalized transform of caller scratch obtained from
  // scratch_in/scratch_out; avoids the copy-out in hot loops.
  static void execute(int n, int sign) {
    Scratch& s = scratch(n);
    fftw_execute_dft(plan_for(n, sign), s.in, s.out);
  }

  static std::complex<double>* scratch_in(int n) {
    return reinterpret_cast<std::complex<double>*>(scratch(n).in);
  }
  static std::complex<double>* scratch_out(int n) {
    return reinterpret_cast<std::complex<double>*>(scratch(n).out);
  }

 private:
  struct Scratch {
    fftw_complex* in = nullptr;
    fftw_complex* out = nullptr;
    ~Scratch() {
      if (in) fftw_free(in);
      if (out) fftw_free(out);
    }
  };

  static Scratch& scratch(int n) {
    thread_local std::map<int, Scratch> buffers;
    Scratch& s = buffers[n];
    if (!s.in) {
      s.in = fftw_alloc_complex(static_cast<std::size_t>(n));
      s.out = fftw_alloc_complex(static_cast<std::size_t>(n));
    }
    return s;
  }

  static VectorXcd exec(const VectorXcd& x, int sign) {
    const int n = static_cast<int>(x.size());
    if (n == 0) return {};
    Scratch& s = scratch(n);
    std::memcpy(s.in, x.data(), sizeof(fftw_complex) * static_cast<std::size_t>(n));
    fftw_execute_dft(plan_for(n, sign), s.in, s.out);
    VectorXcd out(n);
    std::memcpy(out.data(), s.out,
                sizeof(fftw_complex) * static_cast<std::size_t>(n));
    return out;
  }

  static fftw_plan plan_for(int n, int sign) {
    static std::mutex mu;
    static std::map<std::pair<int, int>, fftw_plan> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_pair(n, sign);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    fftw_complex* a = fftw_alloc_complex(static_cast<std::size_t>(n));
    fftw_complex* b = fftw_alloc_complex(static_cast<std::size_t>(n));
    fftw_plan p = fftw_plan_dft_1d(n, a, b, sign, FFTW_ESTIMATE);
    fftw_free(a);
    fftw_free(b);
    cache.emplace(key, p);
    return p;
  }
};

}  // namespace tfec
