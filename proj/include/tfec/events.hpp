#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "tfec/stockwell.hpp"
#include "tfec/types.hpp"

namespace tfec {

using BinaryMatrix = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>;

// Otsu threshold over a magnitude matrix quantized to 256 levels spanning
// [lo, hi]. `level` is the last background bin; cells with bin > level are
// foreground. `value` is the same boundary in magnitude units.
struct OtsuResult {
  int level = 0;
  double value = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  bool degenerate = false;

  int bin_of(double v) const {
    if (hi <= lo) return 0;
    const int b = static_cast<int>((v - lo) / (hi - lo) * 256.0);
    return std::clamp(b, 0, 255);
  }
};

template <typename Derived>
OtsuResult otsu_threshold(const Eigen::MatrixBase<Derived>& mag) {
  if (mag.size() == 0) throw ConfigError("otsu_threshold: empty matrix");
  OtsuResult res;
  res.lo = static_cast<double>(mag.minCoeff());
  res.hi = static_cast<double>(mag.maxCoeff());
  if (res.hi <= res.lo) {
    res.degenerate = true;
    res.value = res.lo;
    return res;
  }

  std::array<std::int64_t, 256> hist{};
  for (Eigen::Index j = 0; j < mag.cols(); ++j)
    for (Eigen::Index i = 0; i < mag.rows(); ++i)
      ++hist[res.bin_of(static_cast<double>(mag(i, j)))];

  const double total = static_cast<double>(mag.size());
  double sum_all = 0.0;
  for (int b = 0; b < 256; ++b) sum_all += b * static_cast<double>(hist[b]);

  // Maximize between-class variance w0*w1*(mu0 - mu1)^2; ties keep the
  // lowest level.
  double best = -1.0;
  int best_level = 0;
  double w0 = 0.0, sum0 = 0.0;
  for (int t = 0; t < 255; ++t) {
    w0 += static_cast<double>(hist[t]);
    sum0 += t * static_cast<double>(hist[t]);
    const double w1 = total - w0;
    if (w0 <= 0.0 || w1 <= 0.0) continue;
    const double mu0 = sum0 / w0;
    const double mu1 = (sum_all - sum0) / w1;
    const double var_between = w0 * w1 * (mu0 - mu1) * (mu0 - mu1);
    if (var_between > best) {
      best = var_between;
      best_level = t;
    }
  }
  res.level = best_level;
  res.value = res.lo + (best_level + 1) * (res.hi - res.lo) / 256.0;
  return res;
}

template <typename Derived>
BinaryMatrix binarize(const Eigen::MatrixBase<Derived>& mag,
                      const OtsuResult& otsu) {
  BinaryMatrix out = BinaryMatrix::Zero(mag.rows(), mag.cols());
  if (otsu.degenerate) return out;
  for (Eigen::Index j = 0; j < mag.cols(); ++j)
    for (Eigen::Index i = 0; i < mag.rows(); ++i)
      out(i, j) = otsu.bin_of(static_cast<double>(mag(i, j))) > otsu.level;
  return out;
}

// Connected region of foreground cells. Cell coordinates are (row, col);
// physical units are filled in when the region is lifted onto a TfdMatrix.
struct BlobRegion {
  int label = 0;
  std::int64_t pixel_count = 0;
  double centroid_row = 0.0;
  double centroid_col = 0.0;
  int row_min = 0, row_max = 0, col_min = 0, col_max = 0;
  std::vector<std::pair<int, int>> pixels;

  double centroid_t = 0.0;  // seconds, epoch-relative
  double centroid_f = 0.0;  // Hz
  double t_min = 0.0, t_max = 0.0;
  double f_min = 0.0, f_max = 0.0;
};

// Two-pass connected-component labeling with union-find over provisional
// labels. Regions smaller than min_area are discarded; survivors are
// renumbered 1..K in order of first (row-major) appearance.
inline std::vector<BlobRegion> label_components(const BinaryMatrix& binary,
                                                int connectivity = 8,
                                                std::int64_t min_area = 1) {
  if (connectivity != 4 && connectivity != 8)
    throw ConfigError("label_components: connectivity must be 4 or 8");
  const Eigen::Index rows = binary.rows(), cols = binary.cols();

  std::vector<int> parent;
  auto find = [&parent](int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  auto unite = [&](int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  };

  Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic> labels =
      Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic>::Constant(rows, cols,
                                                                   -1);
  // Pass 1: scan row-major; union with already-visited neighbors.
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) {
      if (!binary(r, c)) continue;
      int lbl = -1;
      auto consider = [&](Eigen::Index rr, Eigen::Index cc) {
        if (rr < 0 || cc < 0 || cc >= cols) return;
        if (!binary(rr, cc)) return;
        const int other = labels(rr, cc);
        if (lbl < 0) {
          lbl = other;
        } else {
          unite(lbl, other);
          lbl = std::min(find(lbl), find(other));
        }
      };
      consider(r, c - 1);
      consider(r - 1, c);
      if (connectivity == 8) {
        consider(r - 1, c - 1);
        consider(r - 1, c + 1);
      }
      if (lbl < 0) {
        lbl = static_cast<int>(parent.size());
        parent.push_back(lbl);
      }
      labels(r, c) = lbl;
    }
  }

  // Pass 2: resolve labels, gather pixels per root in first-appearance order.
  std::vector<int> root_order(parent.size(), -1);
  std::vector<BlobRegion> regions;
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) {
      if (!binary(r, c)) continue;
      const int root = find(labels(r, c));
      int idx = root_order[root];
      if (idx < 0) {
        idx = static_cast<int>(regions.size());
        root_order[root] = idx;
        BlobRegion blob;
        blob.row_min = blob.row_max = static_cast<int>(r);
        blob.col_min = blob.col_max = static_cast<int>(c);
        regions.push_back(std::move(blob));
      }
      BlobRegion& blob = regions[idx];
      blob.pixels.emplace_back(static_cast<int>(r), static_cast<int>(c));
      ++blob.pixel_count;
      blob.row_min = std::min(blob.row_min, static_cast<int>(r));
      blob.row_max = std::max(blob.row_max, static_cast<int>(r));
      blob.col_min = std::min(blob.col_min, static_cast<int>(c));
      blob.col_max = std::max(blob.col_max, static_cast<int>(c));
    }
  }

  std::vector<BlobRegion> kept;
  for (auto& blob : regions) {
    if (blob.pixel_count < min_area) continue;
    double sr = 0.0, sc = 0.0;
    for (const auto& [r, c] : blob.pixels) {
      sr += r;
      sc += c;
    }
    blob.centroid_row = sr / static_cast<double>(blob.pixel_count);
    blob.centroid_col = sc / static_cast<double>(blob.pixel_count);
    blob.label = static_cast<int>(kept.size()) + 1;
    kept.push_back(std::move(blob));
  }
  return kept;
}

struct ExtractConfig {
  std::int64_t min_blob_area = 6;
  int connectivity = 8;
  double crop_s = 0.2;
  double band_split_hz = 250.0;
  double merge_radius_s = 0.1;
  // An epoch is an event source only if its thresholded map is sparse:
  // events of interest are pockets of concentrated energy, while a threshold
  // cutting through featureless background lights up roughly a third of the
  // cells. Epochs whose foreground exceeds this fraction yield no events;
  // 1 disables the check.
  double max_foreground_fraction = 0.25;
};

// One candidate event of interest.
struct Event {
  int channel = 0;
  double center_s = 0.0;  // absolute seconds in the recording
  VectorXd crop;          // round(crop_s * fs) samples of the filtered signal
  Band band = Band::ripple;
  MatrixXd tfd_patch;     // tfd rows x crop columns, zero outside the epoch
  BlobRegion region;
  int source_epoch = -1;
};

// Fill an event's signal crop and TFD patch. The crop is cut from the full
// filtered channel (zero-padded past the recording ends); the patch holds
// the TFD columns under the crop, zeroed where the crop extends outside the
// parent epoch. Split out from extract_events so a pooled survivor can have
// its windows rebuilt from a recomputed epoch TFD.
inline void fill_event_window(Event& ev, const TfdMatrix& tfd,
                              const Epoch& epoch,
                              const VectorXd& channel_signal, double crop_s) {
  const double fs = epoch.fs;
  const Eigen::Index crop_len =
      static_cast<Eigen::Index>(std::llround(crop_s * fs));
  const Eigen::Index half = crop_len / 2;
  const std::int64_t center_sample = std::llround(ev.center_s * fs);
  const std::int64_t crop_start = center_sample - half;
  const Eigen::Index n_signal = channel_signal.size();
  const Eigen::Index n_epoch = epoch.samples.size();

  ev.crop = VectorXd::Zero(crop_len);
  for (Eigen::Index j = 0; j < crop_len; ++j) {
    const std::int64_t s = crop_start + j;
    if (s >= 0 && s < n_signal) ev.crop[j] = channel_signal[s];
  }
  ev.tfd_patch = MatrixXd::Zero(tfd.mag.rows(), crop_len);
  for (Eigen::Index j = 0; j < crop_len; ++j) {
    const std::int64_t col = crop_start + j - epoch.start_sample;
    if (col >= 0 && col < n_epoch) ev.tfd_patch.col(j) = tfd.mag.col(col);
  }
}

// Segment blobs from one epoch's TFD into events. With fill_windows false
// only the cheap identity fields (center, band, region) are computed, for a
// first pass whose survivors get their windows rebuilt after deduplication.
inline std::vector<Event> extract_events(const TfdMatrix& tfd,
                                         const Epoch& epoch,
                                         const VectorXd& channel_signal,
                                         const ExtractConfig& cfg,
                                         int epoch_index = -1,
                                         bool fill_windows = true) {
  std::vector<Event> events;
  const OtsuResult otsu = otsu_threshold(tfd.mag);
  if (otsu.degenerate) return events;
  const BinaryMatrix binary = binarize(tfd.mag, otsu);
  if (cfg.max_foreground_fraction < 1.0) {
    const double frac = static_cast<double>(binary.cast<int>().sum()) /
                        static_cast<double>(binary.size());
    if (frac > cfg.max_foreground_fraction) return events;
  }
  auto regions =
      label_components(binary, cfg.connectivity, cfg.min_blob_area);
  if (regions.empty()) return events;

  const double fs = epoch.fs;
  const double df =
      tfd.f_axis.size() > 1 ? tfd.f_axis[1] - tfd.f_axis[0] : 0.0;

  for (auto& region : regions) {
    region.centroid_t = region.centroid_col / fs;
    region.centroid_f = tfd.f_axis[0] + region.centroid_row * df;
    region.t_min = tfd.t_axis[region.col_min];
    region.t_max = tfd.t_axis[region.col_max];
    region.f_min = tfd.f_axis[region.row_min];
    region.f_max = tfd.f_axis[region.row_max];

    Event ev;
    ev.channel = epoch.channel;
    ev.source_epoch = epoch_index;
    ev.band = region.centroid_f < cfg.band_split_hz ? Band::ripple
                                                    : Band::fast_ripple;
    const std::int64_t center_sample =
        epoch.start_sample + std::llround(region.centroid_col);
    ev.center_s = static_cast<double>(center_sample) / fs;
    ev.region = std::move(region);
    if (fill_windows) fill_event_window(ev, tfd, epoch, channel_signal, cfg.crop_s);
    events.push_back(std::move(ev));
  }
  return events;
}

// Merge duplicate detections of one channel arising from the 50% epoch
// overlap. Greedy left-to-right over the center-sorted stream, per band:
// an event within merge_radius_s of the current representative joins it,
// and the member with the larger blob wins the slot; surviving centers are
// therefore strictly more than merge_radius_s apart.
inline std::vector<Event> pool_and_dedup(std::vector<Event> events,
                                         double merge_radius_s = 0.1) {
  auto order = [](const Event& a, const Event& b) {
    if (a.center_s != b.center_s) return a.center_s < b.center_s;
    if (a.region.pixel_count != b.region.pixel_count)
      return a.region.pixel_count > b.region.pixel_count;
    return a.source_epoch < b.source_epoch;
  };

  std::vector<Event> out;
  for (const Band band : {Band::ripple, Band::fast_ripple}) {
    std::vector<Event> lane;
    for (auto& e : events)
      if (e.band == band) lane.push_back(e);
    if (lane.empty()) continue;
    std::sort(lane.begin(), lane.end(), order);

    Event rep = std::move(lane.front());
    for (std::size_t i = 1; i < lane.size(); ++i) {
      Event& e = lane[i];
      if (e.center_s - rep.center_s <= merge_radius_s) {
        if (e.region.pixel_count > rep.region.pixel_count) rep = std::move(e);
      } else {
        out.push_back(std::move(rep));
        rep = std::move(e);
      }
    }
    out.push_back(std::move(rep));
  }
  std::sort(out.begin(), out.end(), [](const Event& a, const Event& b) {
    if (a.center_s != b.center_s) return a.center_s < b.center_s;
    return a.band < b.band;
  });
  return out;
}

}  // namespace tfec
