#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tfec/io.hpp"
#include "tfec/metrics.hpp"
#include "tfec/selection.hpp"
#include "tfec/types.hpp"

namespace tfec {

// ---------------------------------------------------------------------------
// Evaluation: retained (hfo-labeled) detections scored per band against the
// annotations of the matching kind, with a label-permutation p-value over
// the pooled annotation list.
// ---------------------------------------------------------------------------
struct EvalOptions {
  double ci_s = 0.1;
  int n_perm = 10000;
  int n_boot = 1000;
  std::uint64_t seed = 0;
  double snr_db = 0.0;  // tag carried into score rows for downstream plots
};

struct BandEval {
  Band band = Band::ripple;
  int n_reference = 0;
  int n_detected = 0;
  MatchCounts counts;
  Scores score;
  PermutationResult permutation;
};

struct EvalReport {
  std::vector<BandEval> bands;
  EvalOptions options;
};

EvalReport evaluate(const std::vector<Detection>& detections,
                    const std::vector<Annotation>& annotations,
                    const EvalOptions& opts);

void write_eval_report(const std::string& path, const EvalReport& report);
void write_scores_csv(const std::string& path, const EvalReport& report);

// Minimal slice of a scores CSV needed to redraw the score figure.
struct ScoreRow {
  std::string band;
  double snr_db = 0.0;
  double f_score = 0.0;
};
std::vector<ScoreRow> read_scores_csv(const std::string& path);

// ---------------------------------------------------------------------------
// Rates and resected/spared ratios
// ---------------------------------------------------------------------------
void write_rates_csv(const std::string& path, const RateTable& table);
void write_ratios_json(const std::string& path, const RateTable& table);

struct RatioPoint {
  std::string label;  // one mark per evaluated recording
  std::string band;
  double value = 0.0;
};
std::vector<RatioPoint> read_ratios_json(const std::string& path,
                                         const std::string& label);

// ---------------------------------------------------------------------------
// Feature-selection exports
// ---------------------------------------------------------------------------
void write_selection_trace(const std::string& path, const SelectionTrace& trace);
void write_correlation_csv(const std::string& path,
                           const CorrelationRanking& ranking);
std::vector<std::pair<std::string, double>> read_correlation_csv(
    const std::string& path);

// ---------------------------------------------------------------------------
// Figures. Every figure is re-derivable from the CSV it sits beside; an
// empty input still yields a valid SVG with a "no events" placeholder.
// ---------------------------------------------------------------------------
void svg_score_boxes(const std::string& path, const std::vector<ScoreRow>& rows);
void svg_ratio_scatter(const std::string& path,
                       const std::vector<RatioPoint>& points);
void svg_correlation_bars(
    const std::string& path,
    const std::vector<std::pair<std::string, double>>& bars);

}  // namespace tfec
