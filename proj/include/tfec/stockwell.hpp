#pragma once

#include <cmath>
#include <complex>
#include <map>
#include <mutex>
#include <numbers>
#include <vector>

#include "tfec/fft.hpp"
#include "tfec/types.hpp"

namespace tfec {

// Time-frequency magnitude map of one epoch. Rows are frequency bins
// (strictly increasing), columns are time samples of the source epoch.
struct TfdMatrix {
  MatrixXd mag;
  VectorXd f_axis;  // Hz per row
  VectorXd t_axis;  // seconds per column, relative to the epoch start
  int channel = -1;
  std::int64_t start_sample = 0;  // absolute sample index of column 0
  double fs = 0.0;
};

namespace detail {

// Frequency-domain Gaussian voice window for bin m of an N-point DFT:
// G[nu] = exp(-2 pi^2 nu~^2 / m^2) with nu~ the symmetric alias of nu.
// Depends only on (N, m), so windows are cached across epochs.
inline const VectorXd& voice_window(int n, int m) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, VectorXd> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_pair(n, m);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  VectorXd g(n);
  const double c = 2.0 * std::numbers::pi * std::numbers::pi / (double(m) * m);
  for (int nu = 0; nu < n; ++nu) {
    const double alias = nu <= n / 2 ? nu : nu - n;
    g[nu] = std::exp(-c * alias * alias);
  }
  return cache.emplace(key, std::move(g)).first->second;
}

inline std::vector<int> band_bins(Eigen::Index n, double fs, double f_lo,
                                  double f_hi) {
  if (n < 64) throw ConfigError("stransform: epoch must have >= 64 samples");
  if (!(f_lo > 0 && f_lo < f_hi && f_hi < fs / 2))
    throw ConfigError("stransform: need 0 < f_lo < f_hi < fs/2");
  const double df = fs / static_cast<double>(n);
  if (f_lo < df)
    throw ConfigError("stransform: f_lo must be at least one DFT bin above DC");
  std::vector<int> bins;
  for (int m = 1; m < n / 2; ++m) {
    const double f = m * df;
    if (f >= f_lo && f <= f_hi) bins.push_back(m);
  }
  return bins;
}

// Fill the thread's FFT scratch with the voice at bin m and run the IDFT;
// returns the unnormalized result (divide by n for the transform value).
// The wrap of the shifted spectrum index is unrolled into two runs.
inline const std::complex<double>* voice_unnormalized(const VectorXcd& spectrum,
                                                      int n, int m) {
  const VectorXd& g = voice_window(n, m);
  std::complex<double>* in = Fft::scratch_in(n);
  for (int nu = 0; nu < n - m; ++nu) in[nu] = spectrum[nu + m] * g[nu];
  for (int nu = n - m; nu < n; ++nu) in[nu] = spectrum[nu + m - n] * g[nu];
  Fft::execute(n, FFTW_BACKWARD);
  return Fft::scratch_out(n);
}

}  // namespace detail

// Complex S-transform rows at the DFT bins falling in [f_lo, f_hi]:
// row m = IDFT over nu of X[(nu + m) mod N] * exp(-2 pi^2 nu^2 / m^2).
inline MatrixXcd stransform_rows(const VectorXd& x, double fs, double f_lo,
                                 double f_hi,
                                 std::vector<int>* bins_out = nullptr) {
  const int n = static_cast<int>(x.size());
  const auto bins = detail::band_bins(n, fs, f_lo, f_hi);
  const VectorXcd spectrum = Fft::forward(x);
  const double inv_n = 1.0 / static_cast<double>(n);

  MatrixXcd rows(static_cast<Eigen::Index>(bins.size()), n);
  for (std::size_t r = 0; r < bins.size(); ++r) {
    const std::complex<double>* out =
        detail::voice_unnormalized(spectrum, n, bins[r]);
    for (int j = 0; j < n; ++j)
      rows(static_cast<Eigen::Index>(r), j) = out[j] * inv_n;
  }
  if (bins_out) *bins_out = bins;
  return rows;
}

inline TfdMatrix stransform(const VectorXd& epoch_samples, double fs,
                            double f_lo, double f_hi) {
  const int n = static_cast<int>(epoch_samples.size());
  const auto bins = detail::band_bins(n, fs, f_lo, f_hi);
  const VectorXcd spectrum = Fft::forward(epoch_samples);
  const double inv_n = 1.0 / static_cast<double>(n);

  TfdMatrix tfd;
  tfd.mag.resize(static_cast<Eigen::Index>(bins.size()), n);
  for (std::size_t r = 0; r < bins.size(); ++r) {
    const std::complex<double>* out =
        detail::voice_unnormalized(spectrum, n, bins[r]);
    for (int j = 0; j < n; ++j) {
      const double re = out[j].real(), im = out[j].imag();
      tfd.mag(static_cast<Eigen::Index>(r), j) =
          std::sqrt(re * re + im * im) * inv_n;
    }
  }
  tfd.fs = fs;
  const double df = fs / static_cast<double>(n);
  tfd.f_axis.resize(static_cast<Eigen::Index>(bins.size()));
  for (std::size_t r = 0; r < bins.size(); ++r)
    tfd.f_axis[static_cast<Eigen::Index>(r)] = bins[r] * df;
  tfd.t_axis = VectorXd::LinSpaced(epoch_samples.size(), 0.0,
                                   (epoch_samples.size() - 1) / fs);
  return tfd;
}

inline TfdMatrix stransform(const Epoch& epoch, double f_lo, double f_hi) {
  TfdMatrix tfd = stransform(epoch.samples, epoch.fs, f_lo, f_hi);
  tfd.channel = epoch.channel;
  tfd.start_sample = epoch.start_sample;
  return tfd;
}

// Direct quadrature of the S-transform integral at one frequency, with the
// Gaussian window periodized over the epoch length (the circular boundary
// the DFT realization implies). O(N^2); kept as the reference path for the
// FFT-based rows.
inline VectorXcd stransform_direct(const VectorXd& x, double fs, double f_hz) {
  const Eigen::Index n = x.size();
  if (n < 64) throw ConfigError("stransform_direct: epoch must have >= 64 samples");
  if (!(f_hz > 0 && f_hz < fs / 2))
    throw ConfigError("stransform_direct: need 0 < f < fs/2");

  const double dt = 1.0 / fs;
  const double span = n * dt;
  const double amp = f_hz / std::sqrt(2.0 * std::numbers::pi) * dt;

  VectorXcd phased(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double phase = -2.0 * std::numbers::pi * f_hz * (k * dt);
    phased[k] = x[k] * std::polar(1.0, phase);
  }

  VectorXcd row = VectorXcd::Zero(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    std::complex<double> acc(0.0, 0.0);
    for (Eigen::Index k = 0; k < n; ++k) {
      const double lag = (static_cast<double>(j) - k) * dt;
      double w = 0.0;
      for (int r = -4; r <= 4; ++r) {
        const double u = lag + r * span;
        w += std::exp(-0.5 * u * u * f_hz * f_hz);
      }
      acc += phased[k] * (amp * w);
    }
    row[j] = acc;
  }
  return row;
}

}  // namespace tfec
