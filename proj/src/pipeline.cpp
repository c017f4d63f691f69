#include "tfec/pipeline.hpp"

#include <atomic>
#include <chrono>
#include <exception>
#include <numeric>
#include <thread>

#include "tfec/signal.hpp"
#include "tfec/stockwell.hpp"

namespace tfec {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Same epoch grid as epoch_signal, but over an already-filtered channel.
std::vector<Epoch> make_epochs(const VectorXd& x, int channel, double fs,
                               double window_s, double step_s) {
  const auto window = static_cast<Eigen::Index>(std::llround(window_s * fs));
  const auto step = static_cast<Eigen::Index>(std::llround(step_s * fs));
  if (window <= 0 || step <= 0)
    throw ConfigError("pipeline: epoch window and step must be positive");
  std::vector<Epoch> epochs;
  for (Eigen::Index start = 0; start + window <= x.size(); start += step) {
    Epoch e;
    e.channel = channel;
    e.start_sample = start;
    e.samples = x.segment(start, window);
    e.fs = fs;
    epochs.push_back(std::move(e));
  }
  return epochs;
}

struct Pass {
  BandEdges edges;
  bool force_band = false;  // split-band runs pin the lane
  Band band = Band::ripple;
};

struct ChannelOutput {
  std::vector<Event> events[2];
  std::vector<VectorXd> features[2];
  std::vector<std::vector<std::string>> degenerate[2];
};

int lane_of(Band b) { return b == Band::ripple ? 0 : 1; }

void process_channel(const SignalRecord& record, int channel,
                     const PipelineConfig& cfg, const std::vector<Pass>& passes,
                     ChannelOutput& out, std::atomic<long long>& extract_us,
                     std::atomic<long long>& feature_us) {
  const double fs = record.fs;
  for (const Pass& pass : passes) {
    const auto t0 = Clock::now();
    const VectorXd filtered = bandpass(record.samples.row(channel).transpose(),
                                       fs, pass.edges.lo_hz, pass.edges.hi_hz);
    const auto epochs =
        make_epochs(filtered, channel, fs, cfg.epoch_window_s, cfg.epoch_step_s);

    std::vector<Event> raw;
    for (std::size_t i = 0; i < epochs.size(); ++i) {
      const TfdMatrix tfd = stransform(epochs[i], pass.edges.lo_hz, pass.edges.hi_hz);
      auto evs = extract_events(tfd, epochs[i], filtered, cfg.extract,
                                static_cast<int>(i), /*fill_windows=*/false);
      for (auto& e : evs) {
        if (pass.force_band) e.band = pass.band;
        raw.push_back(std::move(e));
      }
    }
    auto pooled = pool_and_dedup(std::move(raw), cfg.extract.merge_radius_s);
    extract_us += static_cast<long long>(seconds_since(t0) * 1e6);

    // Survivors get their windows rebuilt epoch by epoch, so each epoch's
    // transform is recomputed at most once.
    const auto t1 = Clock::now();
    std::vector<int> by_epoch(pooled.size());
    std::iota(by_epoch.begin(), by_epoch.end(), 0);
    std::sort(by_epoch.begin(), by_epoch.end(), [&pooled](int a, int b) {
      return pooled[static_cast<std::size_t>(a)].source_epoch <
             pooled[static_cast<std::size_t>(b)].source_epoch;
    });
    std::size_t pos = 0;
    while (pos < by_epoch.size()) {
      const int ep = pooled[static_cast<std::size_t>(by_epoch[pos])].source_epoch;
      const auto& epoch = epochs[static_cast<std::size_t>(ep)];
      const TfdMatrix tfd = stransform(epoch, pass.edges.lo_hz, pass.edges.hi_hz);
      for (; pos < by_epoch.size() &&
             pooled[static_cast<std::size_t>(by_epoch[pos])].source_epoch == ep;
           ++pos) {
        Event& ev = pooled[static_cast<std::size_t>(by_epoch[pos])];
        fill_event_window(ev, tfd, epoch, filtered, cfg.extract.crop_s);
      }
    }
    for (auto& ev : pooled) {
      const FeatureVector fv = assemble_features(ev, fs, cfg.psd_window_s);
      ev.tfd_patch.resize(0, 0);
      const int lane = lane_of(ev.band);
      out.features[lane].push_back(fv.values);
      out.degenerate[lane].push_back(fv.degenerate);
      out.events[lane].push_back(std::move(ev));
    }
    feature_us += static_cast<long long>(seconds_since(t1) * 1e6);
  }
}

}  // namespace

PipelineConfig pipeline_config(const RunConfig& cfg) {
  cfg.validate();
  PipelineConfig p;
  p.run_ripple = cfg.band == "ripple" || cfg.band == "both" || cfg.band == "full";
  p.run_fast_ripple =
      cfg.band == "fast_ripple" || cfg.band == "both" || cfg.band == "full";
  p.full_band = cfg.band == "full";
  p.ripple = {cfg.ripple_lo, cfg.ripple_hi};
  p.fast_ripple = {cfg.fast_ripple_lo, cfg.fast_ripple_hi};
  p.epoch_window_s = cfg.epoch_window_s;
  p.epoch_step_s = cfg.epoch_step_s;
  p.extract.min_blob_area = cfg.min_blob_area;
  p.extract.connectivity = cfg.connectivity;
  p.extract.crop_s = cfg.crop_s;
  p.extract.merge_radius_s = cfg.merge_radius_s;
  p.extract.band_split_hz = cfg.fast_ripple_lo;
  p.extract.max_foreground_fraction = cfg.max_foreground_fraction;
  p.psd_window_s = cfg.psd_window_s;
  p.n_groups = cfg.n_groups;
  p.threads = cfg.threads;
  if (!cfg.feature_subset.empty())
    p.feature_subset = read_feature_subset(cfg.feature_subset);
  return p;
}

DetectResult detect(const SignalRecord& record, const PipelineConfig& cfg) {
  record.validate();
  if (!cfg.run_ripple && !cfg.run_fast_ripple)
    throw ConfigError("detect: no band selected");

  std::vector<Pass> passes;
  if (cfg.full_band) {
    passes.push_back({{cfg.ripple.lo_hz, cfg.fast_ripple.hi_hz}, false, Band::ripple});
  } else {
    if (cfg.run_ripple) passes.push_back({cfg.ripple, true, Band::ripple});
    if (cfg.run_fast_ripple)
      passes.push_back({cfg.fast_ripple, true, Band::fast_ripple});
  }
  for (const Pass& pass : passes)
    if (pass.edges.hi_hz >= record.fs / 2.0)
      throw DataError("detect: sampling rate " + std::to_string(record.fs) +
                      " Hz too low for a band reaching " +
                      std::to_string(pass.edges.hi_hz) + " Hz");

  const int n_channels = static_cast<int>(record.n_channels());
  std::vector<ChannelOutput> slots(static_cast<std::size_t>(n_channels));
  std::atomic<long long> extract_us{0}, feature_us{0};

  const int n_threads = std::max(1, std::min(cfg.threads, n_channels));
  if (n_threads <= 1) {
    for (int ch = 0; ch < n_channels; ++ch)
      process_channel(record, ch, cfg, passes, slots[static_cast<std::size_t>(ch)],
                      extract_us, feature_us);
  } else {
    std::atomic<int> next{0};
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n_threads));
    std::vector<std::thread> workers;
    for (int t = 0; t < n_threads; ++t)
      workers.emplace_back([&, t] {
        try {
          while (true) {
            const int ch = next.fetch_add(1);
            if (ch >= n_channels) return;
            process_channel(record, ch, cfg, passes,
                            slots[static_cast<std::size_t>(ch)], extract_us,
                            feature_us);
          }
        } catch (...) {
          errors[static_cast<std::size_t>(t)] = std::current_exception();
        }
      });
    for (auto& w : workers) w.join();
    for (const auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  DetectResult result;
  result.extract_s = static_cast<double>(extract_us.load()) / 1e6;
  result.feature_s = static_cast<double>(feature_us.load()) / 1e6;

  const auto t_cluster = Clock::now();
  const int n_features = static_cast<int>(feature_names().size());
  for (const Band band : {Band::ripple, Band::fast_ripple}) {
    if (band == Band::ripple && !cfg.run_ripple) continue;
    if (band == Band::fast_ripple && !cfg.run_fast_ripple) continue;
    const int lane = lane_of(band);

    BandDetections bd;
    bd.band = band;
    Eigen::Index n_rows = 0;
    for (int ch = 0; ch < n_channels; ++ch)
      n_rows += static_cast<Eigen::Index>(
          slots[static_cast<std::size_t>(ch)].features[lane].size());
    bd.features.resize(n_rows, n_features);
    Eigen::Index row = 0;
    for (int ch = 0; ch < n_channels; ++ch) {
      auto& slot = slots[static_cast<std::size_t>(ch)];
      for (auto& e : slot.events[lane]) bd.events.push_back(std::move(e));
      for (auto& f : slot.features[lane]) bd.features.row(row++) = f.transpose();
      for (auto& d : slot.degenerate[lane])
        bd.degenerate.push_back(std::move(d));
    }
    const auto n = static_cast<int>(bd.events.size());

    if (n == 1) {
      // Too few events to separate; a lone event is reported as retained.
      bd.clusters.assignment = {0};
      bd.clusters.n_groups = 1;
      bd.clusters.hfo_group = 0;
      bd.clusters.group_mean_range = {
          bd.events[0].crop.size() > 0
              ? bd.events[0].crop.maxCoeff() - bd.events[0].crop.minCoeff()
              : 0.0};
      bd.hfo = {1};
    } else if (n >= 2) {
      MatrixXd sub;
      if (cfg.feature_subset.empty()) {
        sub = bd.features;
      } else {
        sub.resize(n, static_cast<Eigen::Index>(cfg.feature_subset.size()));
        for (std::size_t j = 0; j < cfg.feature_subset.size(); ++j)
          sub.col(static_cast<Eigen::Index>(j)) =
              bd.features.col(cfg.feature_subset[j]);
      }
      const ZScore z = zscore(sub);
      bd.clusters = hierarchical_cluster(z.z, cfg.n_groups);

      MatrixXd crops(n, bd.events[0].crop.size());
      for (int i = 0; i < n; ++i)
        crops.row(i) = bd.events[static_cast<std::size_t>(i)].crop.transpose();
      label_clusters(bd.clusters, crops);
      bd.hfo.resize(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i)
        bd.hfo[static_cast<std::size_t>(i)] =
            bd.clusters.assignment[static_cast<std::size_t>(i)] ==
            bd.clusters.hfo_group;
    }
    result.bands.push_back(std::move(bd));
  }
  result.cluster_s = seconds_since(t_cluster);
  return result;
}

std::vector<Detection> flatten(const DetectResult& result) {
  std::vector<Detection> out;
  int base = 0;
  for (const auto& bd : result.bands) {
    for (std::size_t i = 0; i < bd.events.size(); ++i) {
      Detection d;
      d.channel = bd.events[i].channel;
      d.center_s = bd.events[i].center_s;
      d.band = bd.band;
      d.hfo = bd.hfo[i] != 0;
      d.feature_row = base + static_cast<int>(i);
      out.push_back(d);
    }
    base += static_cast<int>(bd.events.size());
  }
  return out;
}

FeatureTable feature_table(const DetectResult& result) {
  FeatureTable table;
  Eigen::Index total = 0;
  for (const auto& bd : result.bands) total += bd.features.rows();
  table.values.resize(total, static_cast<Eigen::Index>(feature_names().size()));
  Eigen::Index row = 0;
  for (const auto& bd : result.bands) {
    for (std::size_t i = 0; i < bd.events.size(); ++i) {
      table.channel.push_back(bd.events[i].channel);
      table.center_s.push_back(bd.events[i].center_s);
      table.band.push_back(bd.band);
      table.values.row(row) = bd.features.row(static_cast<Eigen::Index>(i));
      ++row;
    }
  }
  return table;
}

}  // namespace tfec
