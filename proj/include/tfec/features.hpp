#pragma once

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "tfec/events.hpp"
#include "tfec/fft.hpp"
#include "tfec/types.hpp"

namespace tfec {

// ---------------------------------------------------------------------------
// Frozen feature catalog. Order and names are part of the output contract:
// feature CSV columns, selection indices and report labels all refer to
// these. Appending is allowed; reordering or renaming is not.
// ---------------------------------------------------------------------------
inline const std::vector<std::string>& feature_names() {
  static const std::vector<std::string> names = {
      // time-domain statistics of the filtered crop
      "t_mean", "t_variance", "t_skewness", "t_kurtosis", "t_coeff_variation",
      "t_rms", "t_power", "t_line_length", "t_autocorr_lag1",
      "t_teager_energy", "t_fractal_dim", "t_peak_to_peak",
      // spectral statistics of the crop's Welch periodogram
      "f_spectral_flux", "f_spectral_flatness", "f_spectral_entropy",
      "f_mean_freq", "f_bandwidth", "f_peak_power",
      // statistics of the time-frequency patch treated as a distribution
      "tf_mean", "tf_variance", "tf_skewness", "tf_kurtosis",
      "tf_coeff_variation", "tf_shannon_entropy", "tf_renyi_entropy",
      "tf_flatness", "tf_flux", "tf_concentration",
      // geometry of the dominant thresholded blob in the patch
      "img_area", "img_centroid_row", "img_centroid_col", "img_mu20",
      "img_mu02", "img_mu11", "img_moment_perimeter", "img_moment_compactness",
      "img_boundary_perimeter", "img_bbox_height", "img_bbox_width",
      // local-binary-pattern texture of the raw patch
      "lbp_mean", "lbp_variance", "lbp_skewness", "lbp_kurtosis"};
  return names;
}

inline int feature_index(const std::string& name) {
  const auto& names = feature_names();
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return static_cast<int>(i);
  throw ConfigError("unknown feature name: " + name);
}

namespace detail {

// Central moments m2..m4 of a flattened value set; used by several groups.
struct MomentStats {
  double mean = 0, var = 0, skew = 0, kurt = 0;
  bool flat = false;       // zero variance: skew/kurt imputed to 0
  bool zero_mean = false;  // |mean| negligible vs spread: cv imputed to 0
  double cv = 0;
};

template <typename Getter>
MomentStats moment_stats(std::int64_t n, Getter value) {
  MomentStats s;
  double sum = 0;
  for (std::int64_t i = 0; i < n; ++i) sum += value(i);
  s.mean = sum / static_cast<double>(n);
  double m2 = 0, m3 = 0, m4 = 0;
  for (std::int64_t i = 0; i < n; ++i) {
    const double d = value(i) - s.mean;
    m2 += d * d;
    m3 += d * d * d;
    m4 += d * d * d * d;
  }
  m2 /= static_cast<double>(n);
  m3 /= static_cast<double>(n);
  m4 /= static_cast<double>(n);
  s.var = m2;
  const double sd = std::sqrt(m2);
  if (sd > 0) {
    s.skew = m3 / (m2 * sd);
    s.kurt = m4 / (m2 * m2);
  } else {
    s.flat = true;
  }
  // Guard the ratio so near-zero means cannot produce infinities.
  if (std::abs(s.mean) > 1e-12 * (sd + std::abs(s.mean))) {
    s.cv = sd / s.mean;
  } else {
    s.zero_mean = true;
  }
  return s;
}

inline void flag(std::vector<std::string>* degenerate, const char* name) {
  if (degenerate) degenerate->emplace_back(name);
}

// Box-counting estimate of the fractal dimension of the sample path. The
// waveform is overlaid with grids of time width eps samples and amplitude
// height range*eps/n, the occupied boxes are counted per grid, and the
// dimension is the slope of log N(eps) against log(1/eps).
inline double box_counting_dimension(const VectorXd& x) {
  const std::int64_t n = x.size();
  const double lo = x.minCoeff();
  const double range = x.maxCoeff() - lo;
  std::vector<double> log_inv_eps, log_count;
  for (std::int64_t eps = 1; eps * 4 <= n; eps *= 2) {
    std::int64_t boxes = 0;
    for (std::int64_t start = 0; start < n; start += eps) {
      // include the sample shared with the next column, so the covering
      // follows the polyline rather than isolated points
      const std::int64_t stop = std::min(start + eps + 1, n);
      if (range <= 0) {
        boxes += 1;
        continue;
      }
      double seg_lo = x[start], seg_hi = x[start];
      for (std::int64_t i = start + 1; i < stop; ++i) {
        seg_lo = std::min(seg_lo, x[i]);
        seg_hi = std::max(seg_hi, x[i]);
      }
      const double h = range * static_cast<double>(eps) /
                       static_cast<double>(n);
      boxes += static_cast<std::int64_t>(std::floor((seg_hi - lo) / h)) -
               static_cast<std::int64_t>(std::floor((seg_lo - lo) / h)) + 1;
    }
    log_inv_eps.push_back(-std::log(static_cast<double>(eps)));
    log_count.push_back(std::log(static_cast<double>(boxes)));
  }
  if (log_inv_eps.size() < 2) return 0.0;
  double mu = 0, mc = 0;
  for (std::size_t i = 0; i < log_inv_eps.size(); ++i) {
    mu += log_inv_eps[i];
    mc += log_count[i];
  }
  mu /= static_cast<double>(log_inv_eps.size());
  mc /= static_cast<double>(log_count.size());
  double num = 0, den = 0;
  for (std::size_t i = 0; i < log_inv_eps.size(); ++i) {
    num += (log_inv_eps[i] - mu) * (log_count[i] - mc);
    den += (log_inv_eps[i] - mu) * (log_inv_eps[i] - mu);
  }
  return den > 0 ? num / den : 0.0;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Time-domain group (12 values, catalog order).
// ---------------------------------------------------------------------------
inline VectorXd time_features(const VectorXd& crop,
                              std::vector<std::string>* degenerate = nullptr) {
  const std::int64_t n = crop.size();
  if (n < 3) throw ConfigError("time_features: crop shorter than 3 samples");
  VectorXd out = VectorXd::Zero(12);

  const auto s = detail::moment_stats(n, [&](std::int64_t i) { return crop[i]; });
  out[0] = s.mean;
  out[1] = s.var;
  out[2] = s.skew;
  out[3] = s.kurt;
  out[4] = s.cv;
  if (s.flat) {
    detail::flag(degenerate, "t_skewness");
    detail::flag(degenerate, "t_kurtosis");
  }
  if (s.zero_mean) detail::flag(degenerate, "t_coeff_variation");

  out[6] = crop.squaredNorm() / static_cast<double>(n);
  out[5] = std::sqrt(out[6]);
  out[7] = (crop.tail(n - 1) - crop.head(n - 1)).cwiseAbs().sum();

  if (s.var > 0) {
    const VectorXd d = crop.array() - s.mean;
    out[8] = d.head(n - 1).dot(d.tail(n - 1)) / d.squaredNorm();
  } else {
    detail::flag(degenerate, "t_autocorr_lag1");
  }

  // Mean Teager energy over the interior samples.
  double teager = 0;
  for (std::int64_t i = 1; i + 1 < n; ++i)
    teager += crop[i] * crop[i] - crop[i - 1] * crop[i + 1];
  out[9] = teager / static_cast<double>(n - 2);

  if (n >= 8) {
    out[10] = detail::box_counting_dimension(crop);
  } else {
    detail::flag(degenerate, "t_fractal_dim");
  }
  out[11] = crop.maxCoeff() - crop.minCoeff();
  return out;
}

// ---------------------------------------------------------------------------
// Welch power spectral density: non-overlapping segments of window_s seconds
// (the whole signal when shorter), per-segment mean removal and Hamming
// window, one-sided scaling 1/(fs*sum(w^2)) with interior bins doubled so
// that the integrated density matches the signal variance.
// ---------------------------------------------------------------------------
struct Psd {
  VectorXd power;   // density, unit^2 per Hz
  VectorXd f_axis;  // Hz
};

inline Psd welch_psd(const VectorXd& x, double fs, double window_s = 1.0) {
  const std::int64_t n = x.size();
  if (n < 2) throw ConfigError("welch_psd: need at least 2 samples");
  if (fs <= 0) throw ConfigError("welch_psd: fs must be positive");
  const std::int64_t seg_len =
      std::min<std::int64_t>(n, std::max<std::int64_t>(2, std::llround(window_s * fs)));
  const std::int64_t n_seg = n / seg_len;

  VectorXd window(seg_len);
  for (std::int64_t i = 0; i < seg_len; ++i)
    window[i] = 0.54 - 0.46 * std::cos(2.0 * M_PI * static_cast<double>(i) /
                                       static_cast<double>(seg_len - 1));
  const double scale = 1.0 / (fs * window.squaredNorm());

  const std::int64_t n_bins = seg_len / 2 + 1;
  Psd psd;
  psd.power = VectorXd::Zero(n_bins);
  psd.f_axis = VectorXd::LinSpaced(n_bins, 0.0,
                                   static_cast<double>(n_bins - 1) * fs /
                                       static_cast<double>(seg_len));
  for (std::int64_t s = 0; s < n_seg; ++s) {
    VectorXd seg = x.segment(s * seg_len, seg_len);
    seg.array() -= seg.mean();
    seg.array() *= window.array();
    const VectorXcd spec = Fft::forward(seg);
    for (std::int64_t k = 0; k < n_bins; ++k) {
      double p = std::norm(spec[k]) * scale;
      const bool interior = k > 0 && !(seg_len % 2 == 0 && k == n_bins - 1);
      if (interior) p *= 2.0;
      psd.power[k] += p;
    }
  }
  psd.power /= static_cast<double>(n_seg);
  return psd;
}

// ---------------------------------------------------------------------------
// Spectral group. spectral_features computes the five statistics of a given
// density (flatness, entropy, mean frequency, bandwidth, peak); freq_features
// prepends the spectral flux (L1 distance between the PSDs of the two crop
// halves) to make the 6-value catalog block.
// ---------------------------------------------------------------------------
inline VectorXd spectral_features(const Psd& psd,
                                  std::vector<std::string>* degenerate = nullptr) {
  if (psd.power.size() == 0)
    throw ConfigError("spectral_features: empty psd");
  VectorXd out = VectorXd::Zero(5);
  const double total = psd.power.sum();
  if (total <= 0) {
    detail::flag(degenerate, "f_spectral_flatness");
    detail::flag(degenerate, "f_spectral_entropy");
    detail::flag(degenerate, "f_mean_freq");
    detail::flag(degenerate, "f_bandwidth");
    return out;
  }

  const std::int64_t m = psd.power.size();
  double log_sum = 0;
  bool has_zero = false;
  double entropy = 0, mean_f = 0;
  for (std::int64_t k = 0; k < m; ++k) {
    const double p = psd.power[k];
    if (p > 0) {
      log_sum += std::log(p);
      const double q = p / total;
      entropy -= q * std::log2(q);
    } else {
      has_zero = true;
    }
    mean_f += psd.f_axis[k] * p;
  }
  mean_f /= total;
  double bw = 0;
  for (std::int64_t k = 0; k < m; ++k)
    bw += (psd.f_axis[k] - mean_f) * (psd.f_axis[k] - mean_f) * psd.power[k];
  out[0] = has_zero ? 0.0
                    : std::exp(log_sum / static_cast<double>(m)) /
                          (total / static_cast<double>(m));
  out[1] = entropy;
  out[2] = mean_f;
  out[3] = std::sqrt(bw / total);
  out[4] = psd.power.maxCoeff();
  return out;
}

inline VectorXd freq_features(const VectorXd& crop, double fs,
                              double window_s = 1.0,
                              std::vector<std::string>* degenerate = nullptr) {
  const std::int64_t n = crop.size();
  if (n < 4) throw ConfigError("freq_features: crop shorter than 4 samples");
  VectorXd out = VectorXd::Zero(6);

  const std::int64_t half = n / 2;
  const Psd first = welch_psd(crop.head(half), fs, window_s);
  const Psd second = welch_psd(crop.segment(n - half, half), fs, window_s);
  out[0] = (second.power - first.power).cwiseAbs().sum();
  out.segment(1, 5) = spectral_features(welch_psd(crop, fs, window_s), degenerate);
  return out;
}

// ---------------------------------------------------------------------------
// Time-frequency group (10 values, catalog order). The patch is treated both
// as a raw value set (moments) and, after normalization to unit mass, as a
// 2-D distribution (entropies, concentration).
// ---------------------------------------------------------------------------
inline VectorXd tf_features(const MatrixXd& patch,
                            std::vector<std::string>* degenerate = nullptr) {
  if (patch.size() == 0) throw ConfigError("tf_features: empty patch");
  const std::int64_t rows = patch.rows(), cols = patch.cols();
  const std::int64_t n = patch.size();
  VectorXd out = VectorXd::Zero(10);

  const auto s = detail::moment_stats(
      n, [&](std::int64_t i) { return patch(i % rows, i / rows); });
  out[0] = s.mean;
  out[1] = s.var;
  out[2] = s.skew;
  out[3] = s.kurt;
  out[4] = s.cv;
  if (s.flat) {
    detail::flag(degenerate, "tf_skewness");
    detail::flag(degenerate, "tf_kurtosis");
  }
  if (s.zero_mean) detail::flag(degenerate, "tf_coeff_variation");

  const double total = patch.sum();
  if (total > 0) {
    double shannon = 0, cubes = 0, sqrt_sum = 0;
    double log_sum = 0;
    bool has_zero = false;
    for (std::int64_t j = 0; j < cols; ++j) {
      for (std::int64_t i = 0; i < rows; ++i) {
        const double v = patch(i, j);
        const double p = v / total;
        if (p > 0) {
          shannon -= p * std::log2(p);
          log_sum += std::log(v);
        } else {
          has_zero = true;
        }
        cubes += p * p * p;
        sqrt_sum += std::sqrt(p);
      }
    }
    out[5] = shannon;
    out[6] = -0.5 * std::log2(cubes);
    out[7] = has_zero ? 0.0
                      : std::exp(log_sum / static_cast<double>(n)) /
                            (total / static_cast<double>(n));
    out[9] = sqrt_sum * sqrt_sum;
  } else {
    detail::flag(degenerate, "tf_shannon_entropy");
    detail::flag(degenerate, "tf_renyi_entropy");
    detail::flag(degenerate, "tf_flatness");
    detail::flag(degenerate, "tf_concentration");
  }

  // Mean absolute difference along the main diagonal neighbor, a smoothness
  // measure of the surface.
  if (rows > 1 && cols > 1) {
    double flux = 0;
    for (std::int64_t j = 0; j + 1 < cols; ++j)
      for (std::int64_t i = 0; i + 1 < rows; ++i)
        flux += std::abs(patch(i + 1, j + 1) - patch(i, j));
    out[8] = flux / static_cast<double>(n);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Image group (15 values, catalog order): the patch is re-thresholded, the
// largest connected blob is described by area, centroid, second central
// moments mu_pq = sum (row-r0)^p (col-c0)^q, a moment-based perimeter
// (m30+m12)^2 + (m03+m21)^2, its ratio to the area, the count of boundary
// pixels, and the bounding box; plus four moments of the patch's
// local-binary-pattern code distribution.
// ---------------------------------------------------------------------------
inline VectorXd image_features(const MatrixXd& patch,
                               std::vector<std::string>* degenerate = nullptr) {
  if (patch.size() == 0) throw ConfigError("image_features: empty patch");
  VectorXd out = VectorXd::Zero(15);
  static const char* kImgNames[] = {
      "img_area",          "img_centroid_row",      "img_centroid_col",
      "img_mu20",          "img_mu02",              "img_mu11",
      "img_moment_perimeter", "img_moment_compactness",
      "img_boundary_perimeter", "img_bbox_height",  "img_bbox_width"};

  const OtsuResult otsu = otsu_threshold(patch);
  if (otsu.degenerate) {
    for (const char* name : kImgNames) detail::flag(degenerate, name);
  } else {
    const BinaryMatrix binary = binarize(patch, otsu);
    const auto regions = label_components(binary, 8, 1);
    const BlobRegion* blob = nullptr;
    for (const auto& r : regions)
      if (!blob || r.pixel_count > blob->pixel_count) blob = &r;
    if (!blob) {
      for (const char* name : kImgNames) detail::flag(degenerate, name);
    } else {
      const double m00 = static_cast<double>(blob->pixel_count);
      double mu20 = 0, mu02 = 0, mu11 = 0;
      double m30 = 0, m12 = 0, m03 = 0, m21 = 0;
      for (const auto& [r, c] : blob->pixels) {
        const double dr = r - blob->centroid_row;
        const double dc = c - blob->centroid_col;
        mu20 += dr * dr;
        mu02 += dc * dc;
        mu11 += dr * dc;
        m30 += static_cast<double>(r) * r * r;
        m12 += static_cast<double>(r) * c * c;
        m03 += static_cast<double>(c) * c * c;
        m21 += static_cast<double>(c) * r * r;
      }
      std::int64_t boundary = 0;
      for (const auto& [r, c] : blob->pixels) {
        auto outside = [&](int rr, int cc) {
          return rr < 0 || cc < 0 || rr >= binary.rows() || cc >= binary.cols() ||
                 !binary(rr, cc);
        };
        if (outside(r - 1, c) || outside(r + 1, c) || outside(r, c - 1) ||
            outside(r, c + 1))
          ++boundary;
      }
      out[0] = m00;
      out[1] = blob->centroid_row;
      out[2] = blob->centroid_col;
      out[3] = mu20;
      out[4] = mu02;
      out[5] = mu11;
      out[6] = (m30 + m12) * (m30 + m12) + (m03 + m21) * (m03 + m21);
      out[7] = out[6] / m00;
      out[8] = static_cast<double>(boundary);
      out[9] = blob->row_max - blob->row_min + 1;
      out[10] = blob->col_max - blob->col_min + 1;
    }
  }

  // Local binary patterns over the 8-neighborhood, most-significant bit at
  // the top-left neighbor, proceeding clockwise; a neighbor >= center sets
  // its bit. Statistics are moments of the resulting code distribution.
  const std::int64_t rows = patch.rows(), cols = patch.cols();
  if (rows < 3 || cols < 3) {
    detail::flag(degenerate, "lbp_mean");
    detail::flag(degenerate, "lbp_variance");
    detail::flag(degenerate, "lbp_skewness");
    detail::flag(degenerate, "lbp_kurtosis");
    return out;
  }
  static constexpr int kOffsets[8][2] = {{-1, -1}, {-1, 0}, {-1, 1}, {0, 1},
                                         {1, 1},   {1, 0},  {1, -1}, {0, -1}};
  std::vector<int> codes;
  codes.reserve(static_cast<std::size_t>((rows - 2) * (cols - 2)));
  for (std::int64_t c = 1; c + 1 < cols; ++c) {
    for (std::int64_t r = 1; r + 1 < rows; ++r) {
      int code = 0;
      for (int b = 0; b < 8; ++b) {
        code <<= 1;
        if (patch(r + kOffsets[b][0], c + kOffsets[b][1]) >= patch(r, c))
          code |= 1;
      }
      codes.push_back(code);
    }
  }
  const auto s = detail::moment_stats(
      static_cast<std::int64_t>(codes.size()),
      [&](std::int64_t i) { return static_cast<double>(codes[i]); });
  out[11] = s.mean;
  out[12] = s.var;
  out[13] = s.skew;
  out[14] = s.kurt;
  if (s.flat) {
    detail::flag(degenerate, "lbp_skewness");
    detail::flag(degenerate, "lbp_kurtosis");
  }
  return out;
}

// ---------------------------------------------------------------------------
// Full catalog for one event.
// ---------------------------------------------------------------------------
struct FeatureVector {
  VectorXd values;                      // catalog order, length 43
  std::vector<std::string> degenerate;  // names of imputed entries
};

inline FeatureVector assemble_features(const Event& ev, double fs,
                                       double psd_window_s = 1.0) {
  FeatureVector fv;
  fv.values = VectorXd::Zero(static_cast<Eigen::Index>(feature_names().size()));
  fv.values.segment(0, 12) = time_features(ev.crop, &fv.degenerate);
  fv.values.segment(12, 6) =
      freq_features(ev.crop, fs, psd_window_s, &fv.degenerate);
  fv.values.segment(18, 10) = tf_features(ev.tfd_patch, &fv.degenerate);
  fv.values.segment(28, 15) = image_features(ev.tfd_patch, &fv.degenerate);
  return fv;
}

// Column-wise standardization; constant columns map to zero.
struct ZScore {
  MatrixXd z;
  VectorXd mean;
  VectorXd sd;
};

inline ZScore zscore(const MatrixXd& x) {
  if (x.rows() < 2) throw ConfigError("zscore: need at least 2 rows");
  ZScore out;
  out.mean = x.colwise().mean();
  MatrixXd centered = x.rowwise() - out.mean.transpose();
  out.sd = (centered.array().square().colwise().sum() /
            static_cast<double>(x.rows()))
               .sqrt();
  out.z = MatrixXd::Zero(x.rows(), x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    // A column of identical values can pick up a nonzero sd purely from
    // summation rounding; demand spread above the column's own scale.
    const double scale = x.col(j).cwiseAbs().maxCoeff();
    if (out.sd[j] > 1e-12 * scale) {
      out.z.col(j) = centered.col(j) / out.sd[j];
    } else {
      out.sd[j] = 0.0;
    }
  }
  return out;
}

}  // namespace tfec
