#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tfec/synth.hpp"
#include "tfec/types.hpp"

namespace tfec {

// ---------------------------------------------------------------------------
// Run configuration: flat key = value text, '#' comments, every key known in
// advance (unknown keys are rejected so typos cannot silently fall back to a
// default). Each key can be overridden by an environment variable named
// TFEC_<KEY> in upper case. A resolved copy in canonical order is written
// into every output directory.
// ---------------------------------------------------------------------------
struct RunConfig {
  // band selection and edges
  std::string band = "both";  // ripple | fast_ripple | both | full
  double ripple_lo = 80.0;
  double ripple_hi = 250.0;
  double fast_ripple_lo = 250.0;
  double fast_ripple_hi = 500.0;
  // epoching and event extraction
  double epoch_window_s = 1.0;
  double epoch_step_s = 0.5;
  int min_blob_area = 6;
  int connectivity = 8;
  double merge_radius_s = 0.1;
  double crop_s = 0.2;
  double max_foreground_fraction = 0.25;  // 1 disables the concentration gate
  // features and clustering
  double psd_window_s = 1.0;
  std::string linkage = "ward";
  int n_groups = 2;
  std::string feature_subset;  // path to a one-name-per-line subset file
  // scoring
  double ci_s = 0.1;
  int n_perm = 10000;
  int n_boot = 1000;
  // feature selection
  int d_max = 15;
  double sffs_eps = 1e-6;
  // synthesis
  double fs = 2048.0;
  double duration_s = 120.0;
  int n_channels = 8;
  int n_backgrounds = 30;
  int background_id = 0;
  double snr_db = 15.0;
  int events_per_kind = 10;
  double co_occur_fraction = 0.1;
  double bg_amplitude_uv = 25.0;
  double spike_amp_factor = 3.0;
  double min_separation_s = 0.5;
  double edge_margin_s = 0.5;
  std::string event_channels;     // comma-separated indices, empty = all
  std::string resected_channels;  // comma-separated indices, empty = first half
  // shared
  std::uint64_t seed = 12345;
  int threads = 1;

  void validate() const;
  BenchmarkConfig benchmark() const;
};

RunConfig parse_run_config_text(const std::string& text, bool apply_env = true);
RunConfig load_run_config(const std::string& path, bool apply_env = true);
std::string run_config_text(const RunConfig& cfg);  // canonical resolved form
void write_run_config(const std::string& path, const RunConfig& cfg);
std::vector<int> parse_channel_list(const std::string& text);

// ---------------------------------------------------------------------------
// Signal container: a JSON header next to a raw little-endian float32
// payload laid out channel-major. `path` may point at either file or the
// common stem; both names are derived from it.
// ---------------------------------------------------------------------------
std::pair<std::string, std::string> container_paths(const std::string& path);
void write_container(const std::string& path, const SignalRecord& record);
SignalRecord read_container(const std::string& path);

// ---------------------------------------------------------------------------
// CSV tables. All writers emit exactly the documented header row and use
// shortest round-trip number formatting, so equal inputs give equal bytes.
// ---------------------------------------------------------------------------
void write_annotations(const std::string& path,
                       const std::vector<Annotation>& rows);
std::vector<Annotation> read_annotations(const std::string& path);

void write_detections(const std::string& path,
                      const std::vector<Detection>& rows);
std::vector<Detection> read_detections(const std::string& path);

// Feature matrix with per-row event identity, one column per catalog name.
struct FeatureTable {
  std::vector<int> channel;
  std::vector<double> center_s;
  std::vector<Band> band;
  MatrixXd values;  // rows x catalog size
};
void write_feature_table(const std::string& path, const FeatureTable& table);
FeatureTable read_feature_table(const std::string& path);

// Selected-feature subset: one catalog name per line.
void write_feature_subset(const std::string& path,
                          const std::vector<int>& indices);
std::vector<int> read_feature_subset(const std::string& path);

// ---------------------------------------------------------------------------
// Provenance manifest and small file helpers. Writes are atomic
// (temp + rename) so a crashed run never leaves a truncated artifact.
// ---------------------------------------------------------------------------
std::uint64_t fnv1a64(std::string_view bytes);
void atomic_write(const std::string& path, std::string_view bytes);
std::string read_text_file(const std::string& path);   // missing -> ConfigError
std::string read_binary_file(const std::string& path); // missing -> DataError
std::string format_double(double v);                   // shortest round trip

void write_manifest(
    const std::string& path, const RunConfig& cfg,
    const std::vector<std::pair<std::string, std::string>>& inputs,
    const std::vector<std::pair<std::string, std::int64_t>>& counts);

}  // namespace tfec
