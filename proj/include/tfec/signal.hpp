#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "tfec/types.hpp"

namespace tfec {

// Sliding-window epoching with stride step_s. Trailing partial windows are
// dropped; downstream stages assume fixed-length epochs.
inline std::vector<Epoch> epoch_signal(const SignalRecord& record, int channel,
                                       double window_s = 1.0,
                                       double step_s = 0.5) {
  if (window_s <= 0.0) throw ConfigError("epoch_signal: window_s must be > 0");
  if (step_s <= 0.0 || step_s > window_s)
    throw ConfigError("epoch_signal: need 0 < step_s <= window_s");

  const auto window = static_cast<Eigen::Index>(std::llround(window_s * record.fs));
  const auto step = static_cast<Eigen::Index>(std::llround(step_s * record.fs));
  const Eigen::Index n = record.n_samples();

  std::vector<Epoch> epochs;
  for (Eigen::Index start = 0; start + window <= n; start += step) {
    Epoch e;
    e.channel = channel;
    e.start_sample = start;
    e.samples = record.samples.row(channel).segment(start, window).transpose();
    e.fs = record.fs;
    epochs.push_back(std::move(e));
  }
  return epochs;
}

inline std::vector<std::vector<Epoch>> epoch_signal(const SignalRecord& record,
                                                    double window_s = 1.0,
                                                    double step_s = 0.5) {
  std::vector<std::vector<Epoch>> out;
  out.reserve(record.n_channels());
  for (Eigen::Index c = 0; c < record.n_channels(); ++c)
    out.push_back(epoch_signal(record, static_cast<int>(c), window_s, step_s));
  return out;
}

// Teager-Kaiser energy: y[n] = x[n]^2 - x[n-1]*x[n+1]. Endpoints are zeroed
// so the trace stays sample-aligned with the input.
template <typename Derived>
Vector<typename Derived::Scalar> tkeo(const Eigen::MatrixBase<Derived>& x) {
  using S = typename Derived::Scalar;
  const Eigen::Index n = x.size();
  if (n < 3) throw ConfigError("tkeo: need at least 3 samples");
  Vector<S> y = Vector<S>::Zero(n);
  y.segment(1, n - 2) =
      x.segment(1, n - 2).array().square() -
      x.segment(0, n - 2).array() * x.segment(2, n - 2).array();
  return y;
}

// Linear-phase windowed-sinc bandpass taps (odd length, Hamming window).
// Tap count is sized so the Hamming transition band fits inside half an
// octave below f_lo, giving >= 40 dB one octave outside the passband.
template <typename Scalar = double>
Vector<Scalar> design_bandpass_fir(Scalar fs, Scalar f_lo, Scalar f_hi,
                                   int taps = 0) {
  if (!(f_lo > 0 && f_lo < f_hi && f_hi < fs / 2))
    throw ConfigError("bandpass: need 0 < f_lo < f_hi < fs/2");
  if (taps <= 0) {
    const double transition = static_cast<double>(f_lo) / 2.0;
    taps = static_cast<int>(std::ceil(3.3 * fs / transition));
    if (taps < 33) taps = 33;
  }
  if (taps % 2 == 0) ++taps;

  const int half = (taps - 1) / 2;
  const Scalar w_lo = 2 * std::numbers::pi_v<Scalar> * f_lo / fs;
  const Scalar w_hi = 2 * std::numbers::pi_v<Scalar> * f_hi / fs;
  Vector<Scalar> h(taps);
  for (int i = 0; i < taps; ++i) {
    const int k = i - half;
    Scalar ideal;
    if (k == 0) {
      ideal = (w_hi - w_lo) / std::numbers::pi_v<Scalar>;
    } else {
      ideal = (std::sin(w_hi * k) - std::sin(w_lo * k)) /
              (std::numbers::pi_v<Scalar> * k);
    }
    const Scalar window =
        Scalar(0.54) - Scalar(0.46) * std::cos(2 * std::numbers::pi_v<Scalar> *
                                               i / Scalar(taps - 1));
    h[i] = ideal * window;
  }
  return h;
}

// Zero-phase bandpass: symmetric FIR applied forward, output advanced by the
// (constant) group delay. Requires linear-phase (symmetric) taps of odd
// length, which makes y[i] = dot(taps, x[i-half .. i+half]). Same length as
// the input; ends are zero-padded.
template <typename Derived, typename TapsDerived>
Vector<typename Derived::Scalar> filter_zero_phase(
    const Eigen::MatrixBase<Derived>& x,
    const Eigen::MatrixBase<TapsDerived>& taps) {
  using S = typename Derived::Scalar;
  const Eigen::Index n = x.size();
  const Eigen::Index m = taps.size();
  const Eigen::Index half = (m - 1) / 2;
  Vector<S> y = Vector<S>::Zero(n);
  const Vector<S> h = taps;
  const Vector<S> xs = x;
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index k_lo = std::max<Eigen::Index>(0, half - i);
    const Eigen::Index k_hi = std::min<Eigen::Index>(m - 1, n - 1 - i + half);
    const Eigen::Index len = k_hi - k_lo + 1;
    if (len > 0)
      y[i] = h.segment(k_lo, len).dot(xs.segment(i - half + k_lo, len));
  }
  return y;
}

template <typename Derived>
Vector<typename Derived::Scalar> bandpass(const Eigen::MatrixBase<Derived>& x,
                                          typename Derived::Scalar fs,
                                          typename Derived::Scalar f_lo,
                                          typename Derived::Scalar f_hi) {
  const auto taps = design_bandpass_fir<typename Derived::Scalar>(fs, f_lo, f_hi);
  return filter_zero_phase(x, taps);
}

}  // namespace tfec
