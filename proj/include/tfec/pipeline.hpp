#pragma once

#include <string>
#include <vector>

#include "tfec/clustering.hpp"
#include "tfec/events.hpp"
#include "tfec/features.hpp"
#include "tfec/io.hpp"
#include "tfec/types.hpp"

namespace tfec {

// ---------------------------------------------------------------------------
// Detection pipeline: bandpass -> overlapping epochs -> time-frequency
// transform -> blob events -> per-channel pooling -> features -> two-group
// clustering with amplitude labeling. Bands can run separately (each pass
// filtered and transformed over its own edges) or as one full-range pass
// split by blob centroid frequency.
// ---------------------------------------------------------------------------
struct PipelineConfig {
  bool run_ripple = true;
  bool run_fast_ripple = true;
  bool full_band = false;  // one 80-500 Hz pass instead of two band passes
  BandEdges ripple{80.0, 250.0};
  BandEdges fast_ripple{250.0, 500.0};
  double epoch_window_s = 1.0;
  double epoch_step_s = 0.5;
  ExtractConfig extract;
  double psd_window_s = 1.0;
  int n_groups = 2;
  std::vector<int> feature_subset;  // catalog indices; empty = all features
  int threads = 1;
};

// Translate a parsed run configuration, loading the subset file if named.
PipelineConfig pipeline_config(const RunConfig& cfg);

// Everything detected in one output band across all channels, ordered by
// (channel, center). Crops are kept for labeling; TFD patches are dropped
// once features are computed.
struct BandDetections {
  Band band = Band::ripple;
  std::vector<Event> events;
  MatrixXd features;  // rows align with events, full catalog width
  std::vector<std::vector<std::string>> degenerate;  // imputed features per row
  ClusterResult clusters;
  std::vector<char> hfo;  // per event: member of the labeled group
};

struct DetectResult {
  std::vector<BandDetections> bands;  // ripple lane first when present
  double extract_s = 0.0;
  double feature_s = 0.0;
  double cluster_s = 0.0;
};

DetectResult detect(const SignalRecord& record, const PipelineConfig& cfg);

// Flatten to detection rows; feature_row indexes the stacked feature table.
std::vector<Detection> flatten(const DetectResult& result);
FeatureTable feature_table(const DetectResult& result);

}  // namespace tfec
