#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace tfec {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using RowVector = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;

using MatrixXd = Matrix<double>;
using VectorXd = Vector<double>;
using MatrixXcd = Matrix<std::complex<double>>;
using VectorXcd = Vector<std::complex<double>>;

// User/configuration mistakes: bad keys, bad bands, bad parameters. CLI exit 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Violated data contracts: malformed containers, schema mismatches,
// a sampling rate too low for the requested band. CLI exit 3.
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Band { ripple, fast_ripple };

inline const char* band_name(Band b) {
  return b == Band::ripple ? "ripple" : "fast_ripple";
}

struct BandEdges {
  double lo_hz = 80.0;
  double hi_hz = 250.0;
};

// Multichannel sampled signal. Channels are rows; all rows share one length.
struct SignalRecord {
  MatrixXd samples;  // n_channels x n_samples, microvolts
  double fs = 0.0;   // Hz
  std::vector<std::string> channel_names;
  std::vector<bool> resected;

  Eigen::Index n_channels() const { return samples.rows(); }
  Eigen::Index n_samples() const { return samples.cols(); }
  double duration_s() const { return static_cast<double>(n_samples()) / fs; }

  void validate() const {
    if (fs <= 0.0) throw DataError("SignalRecord: fs must be positive");
    if (!channel_names.empty() &&
        static_cast<Eigen::Index>(channel_names.size()) != n_channels())
      throw DataError("SignalRecord: channel_names size mismatch");
    if (!resected.empty() &&
        static_cast<Eigen::Index>(resected.size()) != n_channels())
      throw DataError("SignalRecord: resected size mismatch");
  }
};

// One analysis window of one channel. start_sample is absolute so event
// times map back to the continuous recording.
struct Epoch {
  int channel = 0;
  std::int64_t start_sample = 0;
  VectorXd samples;
  double fs = 0.0;
};

// What a ground-truth marker claims the waveform is. Spikes are sharp
// transients injected as confounders; they belong to no oscillation band.
enum class EventKind { ripple, fast_ripple, spike };

inline const char* kind_name(EventKind k) {
  switch (k) {
    case EventKind::ripple: return "ripple";
    case EventKind::fast_ripple: return "fast_ripple";
    case EventKind::spike: return "spike";
  }
  return "?";
}

// Band column associated with a kind in annotation tables.
inline const char* kind_band_name(EventKind k) {
  return k == EventKind::spike ? "none" : kind_name(k);
}

inline EventKind parse_kind(const std::string& s) {
  if (s == "ripple") return EventKind::ripple;
  if (s == "fast_ripple") return EventKind::fast_ripple;
  if (s == "spike") return EventKind::spike;
  throw ConfigError("unknown event kind: '" + s + "'");
}

inline Band parse_band(const std::string& s) {
  if (s == "ripple") return Band::ripple;
  if (s == "fast_ripple") return Band::fast_ripple;
  throw ConfigError("unknown band: '" + s + "'");
}

// One ground-truth marker.
struct Annotation {
  int channel = 0;
  double center_s = 0.0;
  EventKind kind = EventKind::ripple;
  double amplitude_uv = 0.0;
};

// One detector output row, pointing at its feature vector by row index in
// the companion feature table.
struct Detection {
  int channel = 0;
  double center_s = 0.0;
  Band band = Band::ripple;
  bool hfo = false;
  int feature_row = -1;
};

}  // namespace tfec
