#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "tfec/rng.hpp"
#include "tfec/types.hpp"

namespace tfec {

// ---------------------------------------------------------------------------
// Detection/reference matching. A detection may claim a reference when their
// centers differ by at most half the agreement window; pairs are accepted
// greedily in order of increasing distance (ties by reference index, then
// detection index), and each side matches at most once.
// ---------------------------------------------------------------------------
struct MatchCounts {
  int tp = 0;
  int fp = 0;
  int fn = 0;
  std::vector<std::pair<int, int>> pairs;  // (detection idx, reference idx)
};

// An event pinned to a channel; matching never pairs across channels.
struct ChannelTime {
  int channel = 0;
  double t = 0.0;
};

inline MatchCounts match_events(const std::vector<ChannelTime>& detected,
                                const std::vector<ChannelTime>& reference,
                                double window_s = 0.1) {
  if (window_s <= 0) throw ConfigError("match_events: window must be positive");
  const double tol = window_s / 2.0;

  struct Candidate {
    double dist;
    int ref, det;
  };
  std::vector<Candidate> cands;
  for (int r = 0; r < static_cast<int>(reference.size()); ++r)
    for (int d = 0; d < static_cast<int>(detected.size()); ++d) {
      if (detected[d].channel != reference[r].channel) continue;
      const double dist = std::abs(detected[d].t - reference[r].t);
      if (dist <= tol) cands.push_back({dist, r, d});
    }
  std::sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
    return std::tie(a.dist, a.ref, a.det) < std::tie(b.dist, b.ref, b.det);
  });

  std::vector<char> ref_used(reference.size(), 0), det_used(detected.size(), 0);
  MatchCounts mc;
  for (const auto& c : cands) {
    if (ref_used[c.ref] || det_used[c.det]) continue;
    ref_used[c.ref] = 1;
    det_used[c.det] = 1;
    mc.pairs.emplace_back(c.det, c.ref);
  }
  mc.tp = static_cast<int>(mc.pairs.size());
  mc.fn = static_cast<int>(reference.size()) - mc.tp;
  mc.fp = static_cast<int>(detected.size()) - mc.tp;
  return mc;
}

inline MatchCounts match_events(const std::vector<double>& detected,
                                const std::vector<double>& reference,
                                double window_s = 0.1) {
  std::vector<ChannelTime> det(detected.size()), ref(reference.size());
  for (std::size_t i = 0; i < detected.size(); ++i) det[i] = {0, detected[i]};
  for (std::size_t i = 0; i < reference.size(); ++i) ref[i] = {0, reference[i]};
  return match_events(det, ref, window_s);
}

// Sensitivity, precision and their harmonic mean, with the empty-side
// conventions: no references -> sensitivity 0, no detections -> precision 0,
// both zero -> F 0.
struct Scores {
  double sensitivity = 0.0;
  double precision = 0.0;
  double f_score = 0.0;
};

inline Scores scores(const MatchCounts& mc) {
  Scores s;
  if (mc.tp + mc.fn > 0)
    s.sensitivity = static_cast<double>(mc.tp) / (mc.tp + mc.fn);
  if (mc.tp + mc.fp > 0)
    s.precision = static_cast<double>(mc.tp) / (mc.tp + mc.fp);
  if (s.sensitivity + s.precision > 0)
    s.f_score = 2.0 * s.sensitivity * s.precision /
                (s.sensitivity + s.precision);
  return s;
}

// ---------------------------------------------------------------------------
// Label permutation test: does the detector's agreement with the references
// of the target kind exceed what arbitrary relabeling of the same reference
// times would produce? Kind labels are shuffled across the pooled reference
// list n_perm times; the p-value is (1 + #{F_perm >= F_obs}) / (n_perm + 1).
// The confidence interval is a percentile bootstrap over the observed
// TP/FN/FP outcome multiset.
// ---------------------------------------------------------------------------
struct PermutationResult {
  double f_observed = 0.0;
  double p_value = 1.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  bool low_n = false;       // fewer than 10 target references
  bool low_n_perm = false;  // n_perm < 100: p-value resolution is coarse
  Scores observed;
};

struct ReferenceEvent {
  int channel = 0;
  double center_s = 0.0;
  EventKind kind = EventKind::ripple;
};

inline PermutationResult permutation_test(
    const std::vector<ChannelTime>& detections,
    const std::vector<ReferenceEvent>& references, EventKind target,
    double window_s = 0.1, int n_perm = 10000, std::uint64_t seed = 0,
    int n_boot = 1000) {
  if (n_perm < 1) throw ConfigError("permutation_test: n_perm must be >= 1");

  std::vector<ChannelTime> target_centers;
  std::vector<EventKind> kinds;
  kinds.reserve(references.size());
  for (const auto& r : references) {
    kinds.push_back(r.kind);
    if (r.kind == target) target_centers.push_back({r.channel, r.center_s});
  }

  PermutationResult res;
  const MatchCounts observed = match_events(detections, target_centers, window_s);
  res.observed = scores(observed);
  res.f_observed = res.observed.f_score;
  res.low_n = static_cast<int>(target_centers.size()) < 10;
  res.low_n_perm = n_perm < 100;

  int n_ge = 0;
  for (int it = 0; it < n_perm; ++it) {
    auto rng = seeded_engine(seed, 0x7065726dULL, static_cast<std::uint64_t>(it));
    std::vector<EventKind> shuffled = kinds;
    fisher_yates_shuffle(shuffled, rng);
    std::vector<ChannelTime> centers;
    for (std::size_t i = 0; i < references.size(); ++i)
      if (shuffled[i] == target)
        centers.push_back({references[i].channel, references[i].center_s});
    const double f = scores(match_events(detections, centers, window_s)).f_score;
    if (f >= res.f_observed - 1e-12) ++n_ge;
  }
  res.p_value = (1.0 + n_ge) / (static_cast<double>(n_perm) + 1.0);

  // Bootstrap the F-score over the outcome multiset (tp 'hits', fn 'misses',
  // fp 'extras').
  const int m = observed.tp + observed.fn + observed.fp;
  if (m == 0 || n_boot < 2) {
    res.ci_lo = res.ci_hi = res.f_observed;
    return res;
  }
  std::vector<double> fs(n_boot);
  for (int b = 0; b < n_boot; ++b) {
    auto rng = seeded_engine(seed, 0x626f6f74ULL, static_cast<std::uint64_t>(b));
    MatchCounts mc;
    for (int i = 0; i < m; ++i) {
      const auto pick = static_cast<int>(uniform_below(rng, m));
      if (pick < observed.tp)
        ++mc.tp;
      else if (pick < observed.tp + observed.fn)
        ++mc.fn;
      else
        ++mc.fp;
    }
    fs[b] = scores(mc).f_score;
  }
  std::sort(fs.begin(), fs.end());
  auto percentile = [&fs](double q) {
    const double pos = q * static_cast<double>(fs.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, fs.size() - 1);
    const double frac = pos - std::floor(pos);
    return fs[lo] * (1.0 - frac) + fs[hi] * frac;
  };
  res.ci_lo = percentile(0.025);
  res.ci_hi = percentile(0.975);
  return res;
}

inline PermutationResult permutation_test(
    const std::vector<double>& detections,
    const std::vector<ReferenceEvent>& references, EventKind target,
    double window_s = 0.1, int n_perm = 10000, std::uint64_t seed = 0,
    int n_boot = 1000) {
  std::vector<ChannelTime> det(detections.size());
  for (std::size_t i = 0; i < detections.size(); ++i)
    det[i] = {0, detections[i]};
  return permutation_test(det, references, target, window_s, n_perm, seed,
                          n_boot);
}

// ---------------------------------------------------------------------------
// Per-channel event rates and the resected/spared asymmetry ratio
// (sum of resected-channel rates - sum of spared-channel rates) over the
// sum of all rates, in [-1, 1]. With no events at all the ratio is
// undefined and flagged instead of fabricated.
// ---------------------------------------------------------------------------
struct RateRow {
  int channel = 0;
  Band band = Band::ripple;
  int count = 0;
  double duration_min = 0.0;
  double rate_per_min = 0.0;
  bool resected = false;
};

struct RateTable {
  std::vector<RateRow> rows;
};

inline RateTable build_rate_table(const std::vector<Detection>& detections,
                                  const SignalRecord& record,
                                  bool hfo_only = true) {
  record.validate();
  if (record.resected.empty())
    throw ConfigError("build_rate_table: record has no resection labels");
  const double duration_min = record.duration_s() / 60.0;
  if (duration_min <= 0)
    throw DataError("build_rate_table: empty recording");

  RateTable table;
  std::map<std::pair<int, Band>, int> counts;
  for (const auto& d : detections) {
    if (hfo_only && !d.hfo) continue;
    if (d.channel < 0 || d.channel >= record.n_channels())
      throw DataError("build_rate_table: detection channel out of range");
    ++counts[{d.channel, d.band}];
  }
  for (Eigen::Index ch = 0; ch < record.n_channels(); ++ch) {
    for (const Band band : {Band::ripple, Band::fast_ripple}) {
      RateRow row;
      row.channel = static_cast<int>(ch);
      row.band = band;
      const auto it = counts.find({static_cast<int>(ch), band});
      row.count = it == counts.end() ? 0 : it->second;
      row.duration_min = duration_min;
      row.rate_per_min = static_cast<double>(row.count) / duration_min;
      row.resected = record.resected[static_cast<std::size_t>(ch)];
      table.rows.push_back(row);
    }
  }
  return table;
}

struct RateRatio {
  bool no_events = true;
  double value = 0.0;
};

inline RateRatio rate_ratio(const RateTable& table, Band band) {
  double resected = 0.0, spared = 0.0;
  for (const auto& row : table.rows) {
    if (row.band != band) continue;
    (row.resected ? resected : spared) += row.rate_per_min;
  }
  RateRatio r;
  const double total = resected + spared;
  if (total > 0) {
    r.no_events = false;
    r.value = (resected - spared) / total;
  }
  return r;
}

}  // namespace tfec
