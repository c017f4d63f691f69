#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "tfec/fft.hpp"
#include "tfec/rng.hpp"
#include "tfec/signal.hpp"
#include "tfec/types.hpp"

namespace tfec {

// ---------------------------------------------------------------------------
// One event to inject. Oscillatory kinds are Gaussian-windowed sinusoids
// carrying n_cycles inside the envelope's half-power width; spikes are
// smooth biphasic transients of width_s total width with no oscillation.
// ---------------------------------------------------------------------------
struct EventSpec {
  EventKind kind = EventKind::ripple;
  int channel = 0;
  double center_s = 0.0;  // snapped to the sample grid by the generator
  double f0_hz = 0.0;     // oscillatory kinds only
  int n_cycles = 0;       // oscillatory kinds only, >= 6
  double width_s = 0.05;  // spike kinds only, total biphasic width
  double amplitude_uv = 1.0;  // peak absolute amplitude of the waveform
  int co_occurring = -1;  // index of a paired spec sharing the center

  void validate() const {
    if (amplitude_uv <= 0) throw ConfigError("EventSpec: amplitude must be > 0");
    if (kind == EventKind::spike) {
      if (width_s < 0.02 || width_s > 0.1)
        throw ConfigError("EventSpec: spike width outside [0.02, 0.1] s");
      return;
    }
    if (n_cycles < 6)
      throw ConfigError("EventSpec: oscillatory events need >= 6 cycles");
    if (kind == EventKind::ripple && (f0_hz < 80.0 || f0_hz >= 250.0))
      throw ConfigError("EventSpec: ripple f0 outside [80, 250)");
    if (kind == EventKind::fast_ripple && (f0_hz < 250.0 || f0_hz >= 500.0))
      throw ConfigError("EventSpec: fast ripple f0 outside [250, 500)");
  }
};

struct BenchmarkConfig {
  int n_channels = 8;
  double duration_s = 120.0;
  double fs = 2048.0;
  double snr_db = 15.0;
  int n_backgrounds = 30;
  int background_id = 0;
  std::uint64_t seed = 12345;

  // Generator shape choices (the source protocol does not publish event
  // densities or amplitudes; these defaults are ours and fully overridable).
  int events_per_kind = 10;        // per channel, per kind
  double co_occur_fraction = 0.1;  // fraction of fast ripples riding a ripple
  double bg_amplitude_uv = 25.0;   // background RMS after pink shaping
  double spike_amp_factor = 3.0;   // spike peak = factor * bg sd * 10^(snr/20)
  double min_separation_s = 0.5;
  double edge_margin_s = 0.5;
  std::vector<int> event_channels;    // empty: events on every channel
  std::vector<int> resected_channels; // empty: first half of the channels

  BandEdges ripple{80.0, 250.0};
  BandEdges fast_ripple{250.0, 500.0};

  void validate() const {
    if (n_channels < 1) throw ConfigError("BenchmarkConfig: n_channels < 1");
    if (duration_s <= 0) throw ConfigError("BenchmarkConfig: duration <= 0");
    if (fs < 1000.0) throw ConfigError("BenchmarkConfig: fs below 1 kHz");
    if (events_per_kind < 0)
      throw ConfigError("BenchmarkConfig: negative event count");
    if (co_occur_fraction < 0 || co_occur_fraction > 1)
      throw ConfigError("BenchmarkConfig: co_occur_fraction outside [0, 1]");
    if (background_id < 0 || (n_backgrounds > 0 && background_id >= n_backgrounds))
      throw ConfigError("BenchmarkConfig: background_id out of range");
    for (const int ch : event_channels)
      if (ch < 0 || ch >= n_channels)
        throw ConfigError("BenchmarkConfig: event channel out of range");
    for (const int ch : resected_channels)
      if (ch < 0 || ch >= n_channels)
        throw ConfigError("BenchmarkConfig: resected channel out of range");
  }
};

namespace synth_tag {
constexpr std::uint64_t background = 0x6267;  // 'bg'
constexpr std::uint64_t events = 0x6576;      // 'ev'
}  // namespace synth_tag

// ---------------------------------------------------------------------------
// Pink (1/f) background noise: white Gaussian noise shaped in the frequency
// domain by 1/sqrt(f), DC removed, normalized to unit RMS. Reproducible
// from (seed, background_id, channel).
// ---------------------------------------------------------------------------
inline VectorXd generate_background(const BenchmarkConfig& cfg, int channel,
                                    int background_id) {
  cfg.validate();
  const auto n = static_cast<Eigen::Index>(std::llround(cfg.duration_s * cfg.fs));
  auto rng = seeded_engine(cfg.seed, synth_tag::background,
                           static_cast<std::uint64_t>(background_id),
                           static_cast<std::uint64_t>(channel));
  GaussianDraw gauss;
  VectorXd white(n);
  for (Eigen::Index i = 0; i < n; ++i) white[i] = gauss(rng);

  VectorXcd spectrum = Fft::forward(white);
  spectrum[0] = 0.0;
  const double df = cfg.fs / static_cast<double>(n);
  for (Eigen::Index k = 1; k < n; ++k) {
    const double f = static_cast<double>(std::min(k, n - k)) * df;
    spectrum[k] /= std::sqrt(std::max(f, 1.0));
  }
  VectorXd pink = Fft::inverse(spectrum).real();
  const double rms = std::sqrt(pink.squaredNorm() / static_cast<double>(n));
  if (rms > 0) pink /= rms;
  return pink;
}

// ---------------------------------------------------------------------------
// Render one event on the sample grid. Returns the waveform and the absolute
// sample index of its first sample; the waveform's peak magnitude equals
// spec.amplitude_uv exactly (peaks are aligned to grid points).
// ---------------------------------------------------------------------------
struct RenderedEvent {
  std::int64_t start_sample = 0;
  VectorXd wave;
};

inline RenderedEvent render_event(const EventSpec& spec, double fs) {
  spec.validate();
  if (fs <= 0) throw ConfigError("render_event: fs must be positive");
  const std::int64_t center = std::llround(spec.center_s * fs);
  RenderedEvent out;

  if (spec.kind == EventKind::spike) {
    // Biphasic transient: first derivative of a Gaussian, normalized so the
    // lobes peak at +-amplitude. The lobes sit one sigma from the center;
    // sigma is an integer sample count so a lobe lands on the grid.
    const auto sigma =
        std::max<std::int64_t>(1, std::llround(spec.width_s / 6.0 * fs));
    const std::int64_t half = 5 * sigma;
    out.start_sample = center - half;
    out.wave = VectorXd::Zero(2 * half + 1);
    for (std::int64_t k = -half; k <= half; ++k) {
      const double u = static_cast<double>(k) / static_cast<double>(sigma);
      out.wave[k + half] =
          spec.amplitude_uv * u * std::exp(0.5 * (1.0 - u * u));
    }
    return out;
  }

  // Gabor atom. The envelope's half-power width spans n_cycles periods:
  // sigma = n_cycles / (2 * f0 * sqrt(ln 2)).
  const double sigma =
      static_cast<double>(spec.n_cycles) / (2.0 * spec.f0_hz * std::sqrt(M_LN2));
  const auto half = static_cast<std::int64_t>(std::ceil(4.0 * sigma * fs));
  out.start_sample = center - half;
  out.wave = VectorXd::Zero(2 * half + 1);
  const double c = static_cast<double>(center) / fs;
  for (std::int64_t k = -half; k <= half; ++k) {
    const double t = static_cast<double>(center + k) / fs - c;
    out.wave[k + half] = spec.amplitude_uv *
                         std::exp(-t * t / (2.0 * sigma * sigma)) *
                         std::cos(2.0 * M_PI * spec.f0_hz * t);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Full benchmark: per-channel pink background at bg_amplitude_uv RMS with
// events injected at the configured in-band SNR,
//   snr_db = 10*log10(P_event_band / P_background_band),
// both powers measured over the event's support after bandpassing to the
// event's own band. Spike peaks scale with the broadband background sd.
// ---------------------------------------------------------------------------
struct Benchmark {
  SignalRecord record;
  std::vector<Annotation> annotations;
  std::vector<EventSpec> specs;  // calibrated amplitudes, support via render
};

namespace detail {

inline double mean_square(const VectorXd& x, std::int64_t lo, std::int64_t hi) {
  lo = std::max<std::int64_t>(lo, 0);
  hi = std::min<std::int64_t>(hi, x.size());
  if (hi <= lo) return 0.0;
  return x.segment(lo, hi - lo).squaredNorm() / static_cast<double>(hi - lo);
}

// Mean square of the bandpassed unit-amplitude atom over its own support.
inline double atom_band_power(const RenderedEvent& atom, const VectorXd& taps) {
  const Eigen::Index pad = taps.size();
  VectorXd padded = VectorXd::Zero(atom.wave.size() + 2 * pad);
  padded.segment(pad, atom.wave.size()) = atom.wave;
  const VectorXd filtered = filter_zero_phase(padded, taps);
  return filtered.segment(pad, atom.wave.size()).squaredNorm() /
         static_cast<double>(atom.wave.size());
}

}  // namespace detail

inline Benchmark build_benchmark(const BenchmarkConfig& cfg) {
  cfg.validate();
  const auto n = static_cast<Eigen::Index>(std::llround(cfg.duration_s * cfg.fs));
  Benchmark bench;
  bench.record.fs = cfg.fs;
  bench.record.samples = MatrixXd::Zero(cfg.n_channels, n);
  for (int ch = 0; ch < cfg.n_channels; ++ch) {
    std::string name = "ch" + std::to_string(ch + 1);
    if (name.size() == 3) name.insert(2, "0");
    bench.record.channel_names.push_back(name);
  }
  bench.record.resected.assign(cfg.n_channels, false);
  if (cfg.resected_channels.empty()) {
    for (int ch = 0; ch < cfg.n_channels / 2; ++ch)
      bench.record.resected[ch] = true;
  } else {
    for (const int ch : cfg.resected_channels) bench.record.resected[ch] = true;
  }

  std::vector<int> event_channels = cfg.event_channels;
  if (event_channels.empty())
    for (int ch = 0; ch < cfg.n_channels; ++ch) event_channels.push_back(ch);

  const VectorXd ripple_taps =
      design_bandpass_fir<double>(cfg.fs, cfg.ripple.lo_hz, cfg.ripple.hi_hz);
  const VectorXd fr_taps = design_bandpass_fir<double>(
      cfg.fs, cfg.fast_ripple.lo_hz, cfg.fast_ripple.hi_hz);
  const double snr_ratio = std::pow(10.0, cfg.snr_db / 10.0);
  const int n_co = static_cast<int>(
      std::llround(cfg.co_occur_fraction * cfg.events_per_kind));

  for (int ch = 0; ch < cfg.n_channels; ++ch) {
    VectorXd channel =
        generate_background(cfg, ch, cfg.background_id) * cfg.bg_amplitude_uv;
    const bool wants_events =
        std::find(event_channels.begin(), event_channels.end(), ch) !=
        event_channels.end();

    if (wants_events && cfg.events_per_kind > 0) {
      const VectorXd bg_ripple = filter_zero_phase(channel, ripple_taps);
      const VectorXd bg_fr = filter_zero_phase(channel, fr_taps);
      const double bg_sd =
          std::sqrt((channel.array() - channel.mean()).square().sum() /
                    static_cast<double>(n));

      auto rng = seeded_engine(cfg.seed, synth_tag::events,
                               static_cast<std::uint64_t>(cfg.background_id),
                               static_cast<std::uint64_t>(ch));
      std::vector<EventSpec> specs;
      std::vector<double> centers;
      const double lo_t = cfg.edge_margin_s;
      const double hi_t = cfg.duration_s - cfg.edge_margin_s;
      if (hi_t <= lo_t)
        throw ConfigError("build_benchmark: recording shorter than margins");

      auto place = [&](EventSpec& spec, int partner) {
        if (partner >= 0) {
          spec.center_s = specs[partner].center_s;
          spec.co_occurring = partner;
          specs[partner].co_occurring = static_cast<int>(specs.size());
          return;
        }
        for (int attempt = 0; attempt < 5000; ++attempt) {
          const double c =
              std::llround(uniform_range(rng, lo_t, hi_t) * cfg.fs) / cfg.fs;
          bool ok = true;
          for (const double other : centers)
            if (std::abs(c - other) < cfg.min_separation_s) {
              ok = false;
              break;
            }
          if (ok) {
            spec.center_s = c;
            centers.push_back(c);
            return;
          }
        }
        throw ConfigError(
            "build_benchmark: event density too high for the minimum "
            "separation");
      };

      for (const EventKind kind :
           {EventKind::ripple, EventKind::fast_ripple, EventKind::spike}) {
        for (int i = 0; i < cfg.events_per_kind; ++i) {
          EventSpec spec;
          spec.kind = kind;
          spec.channel = ch;
          const bool co =
              kind == EventKind::fast_ripple && i < n_co &&
              static_cast<int>(specs.size()) >= cfg.events_per_kind;
          place(spec, co ? i : -1);
          if (kind == EventKind::spike) {
            spec.width_s = uniform_range(rng, 0.03, 0.07);
          } else {
            const BandEdges& band =
                kind == EventKind::ripple ? cfg.ripple : cfg.fast_ripple;
            spec.n_cycles = static_cast<int>(uniform_int(rng, 6, 12));
            // Keep the atom's spectrum inside its nominal band (3 sigma of
            // the Gaussian envelope's bandwidth), so band-level scoring is
            // well-defined: a Gabor straddling the 250 Hz boundary would be
            // legitimately detectable in both bands.
            const double rel_bw =
                3.0 * std::sqrt(M_LN2) / (M_PI * spec.n_cycles);
            spec.f0_hz = uniform_range(rng, band.lo_hz / (1.0 - rel_bw),
                                       band.hi_hz / (1.0 + rel_bw));
          }
          specs.push_back(spec);
        }
      }

      // Calibrate amplitudes against the local background and mix in.
      const int spec_base = static_cast<int>(bench.specs.size());
      for (auto& spec : specs) {
        if (spec.kind == EventKind::spike) {
          spec.amplitude_uv =
              cfg.spike_amp_factor * bg_sd * std::pow(10.0, cfg.snr_db / 20.0);
        } else {
          const bool is_ripple = spec.kind == EventKind::ripple;
          const VectorXd& taps = is_ripple ? ripple_taps : fr_taps;
          const VectorXd& bg_band = is_ripple ? bg_ripple : bg_fr;
          EventSpec unit = spec;
          unit.amplitude_uv = 1.0;
          const RenderedEvent atom = render_event(unit, cfg.fs);
          const double p_atom = detail::atom_band_power(atom, taps);
          const double p_bg = detail::mean_square(
              bg_band, atom.start_sample,
              atom.start_sample + atom.wave.size());
          if (p_atom <= 0)
            throw ConfigError("build_benchmark: degenerate event waveform");
          spec.amplitude_uv = std::sqrt(snr_ratio * p_bg / p_atom);
        }
        const RenderedEvent rendered = render_event(spec, cfg.fs);
        const std::int64_t lo = rendered.start_sample;
        for (Eigen::Index k = 0; k < rendered.wave.size(); ++k) {
          const std::int64_t s = lo + k;
          if (s >= 0 && s < n) channel[s] += rendered.wave[k];
        }
        Annotation ann;
        ann.channel = ch;
        ann.center_s = spec.center_s;
        ann.kind = spec.kind;
        ann.amplitude_uv = spec.amplitude_uv;
        bench.annotations.push_back(ann);
        EventSpec global = spec;
        if (global.co_occurring >= 0) global.co_occurring += spec_base;
        bench.specs.push_back(global);
      }
    }
    bench.record.samples.row(ch) = channel.transpose();
  }

  std::sort(bench.annotations.begin(), bench.annotations.end(),
            [](const Annotation& a, const Annotation& b) {
              if (a.channel != b.channel) return a.channel < b.channel;
              if (a.center_s != b.center_s) return a.center_s < b.center_s;
              return static_cast<int>(a.kind) < static_cast<int>(b.kind);
            });
  return bench;
}

}  // namespace tfec
