// Command-line front end: simulate / detect / evaluate / select-features /
// rate-ratio / report. Exit codes: 0 success, 2 configuration or input
// schema error, 3 data-contract error, 1 internal error.
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tfec/io.hpp"
#include "tfec/pipeline.hpp"
#include "tfec/report.hpp"
#include "tfec/synth.hpp"
#include "tfec/version.hpp"

namespace fs = std::filesystem;
using namespace tfec;

namespace {

struct CommonFlags {
  std::string config_path;
  std::string out_dir;
  std::string band;
  std::uint64_t seed = 0;
  int threads = 0;
};

void add_common(CLI::App* cmd, CommonFlags& flags, bool with_band = true) {
  cmd->add_option("--config", flags.config_path, "run configuration file");
  cmd->add_option("--out", flags.out_dir, "output directory")->required();
  if (with_band)
    cmd->add_option("--band", flags.band,
                    "band selection: ripple|fast_ripple|both|full");
  cmd->add_option("--seed", flags.seed, "override the config seed");
  cmd->add_option("--threads", flags.threads, "override config threads");
}

RunConfig resolve_config(CLI::App* cmd, const CommonFlags& flags) {
  RunConfig cfg = flags.config_path.empty()
                      ? parse_run_config_text("", true)
                      : load_run_config(flags.config_path, true);
  // Not every subcommand registers --band; look it up without throwing.
  const CLI::Option* band = cmd->get_option_no_throw("--band");
  if (band && band->count()) cfg.band = flags.band;
  if (cmd->count("--seed")) cfg.seed = flags.seed;
  if (cmd->count("--threads")) cfg.threads = flags.threads;
  cfg.validate();
  return cfg;
}

std::string prepare_out_dir(const std::string& out_dir, const RunConfig& cfg) {
  fs::create_directories(out_dir);
  write_run_config((fs::path(out_dir) / "config_resolved.txt").string(), cfg);
  return out_dir;
}

std::string out_path(const std::string& dir, const char* name) {
  return (fs::path(dir) / name).string();
}

void write_merge_tree(const std::string& path, const ClusterResult& clusters) {
  std::string out = "node_a,node_b,distance\n";
  for (const auto& m : clusters.merge_tree) {
    out += std::to_string(m.node_a);
    out += ',';
    out += std::to_string(m.node_b);
    out += ',';
    out += format_double(m.distance);
    out += '\n';
  }
  atomic_write(path, out);
}

// ---------------------------------------------------------------------------
void cmd_simulate(CLI::App* cmd, const CommonFlags& flags) {
  const RunConfig cfg = resolve_config(cmd, flags);
  const Benchmark bench = build_benchmark(cfg.benchmark());
  const std::string dir = prepare_out_dir(flags.out_dir, cfg);
  write_container(out_path(dir, "container"), bench.record);
  write_annotations(out_path(dir, "annotations.csv"), bench.annotations);
  std::printf("simulate: %lld channels, %.1f s, %zu annotated events -> %s\n",
              static_cast<long long>(bench.record.n_channels()),
              bench.record.duration_s(), bench.annotations.size(),
              dir.c_str());
}

// ---------------------------------------------------------------------------
void cmd_detect(CLI::App* cmd, const CommonFlags& flags,
                const std::string& container_path) {
  const RunConfig cfg = resolve_config(cmd, flags);
  const PipelineConfig pc = pipeline_config(cfg);
  const SignalRecord record = read_container(container_path);

  const DetectResult result = detect(record, pc);
  const std::vector<Detection> dets = flatten(result);
  const FeatureTable table = feature_table(result);

  const std::string dir = prepare_out_dir(flags.out_dir, cfg);
  write_detections(out_path(dir, "detections.csv"), dets);
  write_feature_table(out_path(dir, "features.csv"), table);
  std::int64_t n_hfo = 0;
  std::vector<std::pair<std::string, std::int64_t>> counts;
  for (const auto& bd : result.bands) {
    if (!bd.clusters.merge_tree.empty()) {
      const std::string name =
          std::string("merge_tree_") + band_name(bd.band) + ".csv";
      write_merge_tree(out_path(dir, name.c_str()), bd.clusters);
    }
    counts.emplace_back(std::string("events_") + band_name(bd.band),
                        static_cast<std::int64_t>(bd.events.size()));
    for (const char h : bd.hfo) n_hfo += h ? 1 : 0;
  }
  counts.emplace_back("events_total", static_cast<std::int64_t>(dets.size()));
  counts.emplace_back("events_hfo", n_hfo);
  write_manifest(out_path(dir, "manifest.json"), cfg,
                 {{"container", container_path}}, counts);

  std::string timing = "extract_s " + format_double(result.extract_s) +
                       "\nfeature_s " + format_double(result.feature_s) +
                       "\ncluster_s " + format_double(result.cluster_s) + "\n";
  atomic_write(out_path(dir, "timings.log"), timing);
  std::printf("detect: %zu events (%lld retained as HFO) -> %s\n", dets.size(),
              static_cast<long long>(n_hfo), dir.c_str());
}

// ---------------------------------------------------------------------------
void cmd_evaluate(CLI::App* cmd, const CommonFlags& flags,
                  const std::string& detections_path,
                  const std::string& annotations_path) {
  const RunConfig cfg = resolve_config(cmd, flags);
  const std::vector<Detection> dets = read_detections(detections_path);
  const std::vector<Annotation> anns = read_annotations(annotations_path);

  EvalOptions opts;
  opts.ci_s = cfg.ci_s;
  opts.n_perm = cfg.n_perm;
  opts.n_boot = cfg.n_boot;
  opts.seed = cfg.seed;
  opts.snr_db = cfg.snr_db;
  const EvalReport report = evaluate(dets, anns, opts);

  const std::string dir = prepare_out_dir(flags.out_dir, cfg);
  write_eval_report(out_path(dir, "eval_report.json"), report);
  write_scores_csv(out_path(dir, "scores.csv"), report);
  for (const auto& be : report.bands)
    std::printf("evaluate: %s F=%.3f (sens %.3f, prec %.3f, p=%.4g)\n",
                band_name(be.band), be.score.f_score, be.score.sensitivity,
                be.score.precision, be.permutation.p_value);
}

// ---------------------------------------------------------------------------
void cmd_select_features(CLI::App* cmd, const CommonFlags& flags,
                         const std::string& features_path,
                         const std::string& annotations_path) {
  const RunConfig cfg = resolve_config(cmd, flags);
  const FeatureTable table = read_feature_table(features_path);
  const std::vector<Annotation> anns = read_annotations(annotations_path);

  // Label each feature row by whether it matches an annotated oscillation of
  // its own band within the agreement window.
  const auto n = static_cast<int>(table.values.rows());
  std::vector<int> labels(static_cast<std::size_t>(n), 0);
  for (const Band band : {Band::ripple, Band::fast_ripple}) {
    const EventKind target =
        band == Band::ripple ? EventKind::ripple : EventKind::fast_ripple;
    std::vector<ChannelTime> dets, refs;
    std::vector<int> rows;
    for (int i = 0; i < n; ++i)
      if (table.band[static_cast<std::size_t>(i)] == band) {
        dets.push_back({table.channel[static_cast<std::size_t>(i)],
                        table.center_s[static_cast<std::size_t>(i)]});
        rows.push_back(i);
      }
    for (const auto& a : anns)
      if (a.kind == target) refs.push_back({a.channel, a.center_s});
    const MatchCounts mc = match_events(dets, refs, cfg.ci_s);
    for (const auto& [det, ref] : mc.pairs)
      labels[static_cast<std::size_t>(rows[static_cast<std::size_t>(det)])] = 1;
  }

  const SubsetCost cost = cluster_f_cost(table.values, labels);
  const SelectionTrace trace =
      sffs(static_cast<int>(feature_names().size()), cost, cfg.d_max,
           cfg.sffs_eps);
  const CorrelationRanking ranking = correlation_ranking(table.values, labels);

  const std::string dir = prepare_out_dir(flags.out_dir, cfg);
  write_selection_trace(out_path(dir, "sffs_trace.csv"), trace);
  write_feature_subset(out_path(dir, "selected_features.txt"),
                       trace.best_subset);
  write_correlation_csv(out_path(dir, "correlation.csv"), ranking);
  std::printf("select-features: best subset size %zu, score %.4f -> %s\n",
              trace.best_subset.size(), trace.best_score, dir.c_str());
}

// ---------------------------------------------------------------------------
void cmd_rate_ratio(CLI::App* cmd, const CommonFlags& flags,
                    const std::string& detections_path,
                    const std::string& container_path) {
  const RunConfig cfg = resolve_config(cmd, flags);
  const std::vector<Detection> dets = read_detections(detections_path);
  const SignalRecord record = read_container(container_path);
  const RateTable table = build_rate_table(dets, record, /*hfo_only=*/true);

  const std::string dir = prepare_out_dir(flags.out_dir, cfg);
  write_rates_csv(out_path(dir, "rates.csv"), table);
  write_ratios_json(out_path(dir, "ratios.json"), table);
  for (const Band band : {Band::ripple, Band::fast_ripple}) {
    const RateRatio r = rate_ratio(table, band);
    if (r.no_events)
      std::printf("rate-ratio: %s no events\n", band_name(band));
    else
      std::printf("rate-ratio: %s %+0.3f\n", band_name(band), r.value);
  }
}

// ---------------------------------------------------------------------------
void cmd_report(CLI::App* cmd, const CommonFlags& flags,
                const std::vector<std::string>& scores_paths,
                const std::vector<std::string>& ratios_paths,
                const std::string& correlation_path) {
  const RunConfig cfg = resolve_config(cmd, flags);
  const std::string dir = prepare_out_dir(flags.out_dir, cfg);

  std::vector<ScoreRow> rows;
  for (const auto& p : scores_paths)
    for (const auto& r : read_scores_csv(p)) rows.push_back(r);
  std::string scores_csv = "band,snr_db,f_score\n";
  for (const auto& r : rows) {
    scores_csv += r.band;
    scores_csv += ',';
    scores_csv += format_double(r.snr_db);
    scores_csv += ',';
    scores_csv += format_double(r.f_score);
    scores_csv += '\n';
  }
  atomic_write(out_path(dir, "fig_scores.csv"), scores_csv);
  svg_score_boxes(out_path(dir, "fig_scores.svg"), rows);

  std::vector<RatioPoint> points;
  for (std::size_t i = 0; i < ratios_paths.size(); ++i) {
    const std::string label = "p" + std::to_string(i + 1);
    for (const auto& pt : read_ratios_json(ratios_paths[i], label))
      points.push_back(pt);
  }
  std::string ratios_csv = "label,band,value,source\n";
  for (std::size_t i = 0; i < ratios_paths.size(); ++i)
    for (const auto& pt : read_ratios_json(ratios_paths[i],
                                           "p" + std::to_string(i + 1))) {
      ratios_csv += pt.label;
      ratios_csv += ',';
      ratios_csv += pt.band;
      ratios_csv += ',';
      ratios_csv += format_double(pt.value);
      ratios_csv += ',';
      ratios_csv += ratios_paths[i];
      ratios_csv += '\n';
    }
  atomic_write(out_path(dir, "fig_ratios.csv"), ratios_csv);
  svg_ratio_scatter(out_path(dir, "fig_ratios.svg"), points);

  std::vector<std::pair<std::string, double>> bars;
  if (!correlation_path.empty()) bars = read_correlation_csv(correlation_path);
  std::string corr_csv = "name,r\n";
  for (const auto& [name, r] : bars) {
    corr_csv += name;
    corr_csv += ',';
    corr_csv += format_double(r);
    corr_csv += '\n';
  }
  atomic_write(out_path(dir, "fig_correlation.csv"), corr_csv);
  svg_correlation_bars(out_path(dir, "fig_correlation.svg"), bars);
  std::printf("report: %zu score rows, %zu ratio points -> %s\n", rows.size(),
              points.size(), dir.c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"time-frequency event clustering for high-frequency "
               "oscillations"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  CommonFlags sim_flags, det_flags, eval_flags, sel_flags, rate_flags,
      rep_flags;
  std::string container_path, detections_path, annotations_path, features_path,
      correlation_path;
  std::vector<std::string> scores_paths, ratios_paths;

  CLI::App* sim = app.add_subcommand("simulate", "generate a benchmark");
  add_common(sim, sim_flags, /*with_band=*/false);

  CLI::App* det = app.add_subcommand("detect", "run the detection pipeline");
  add_common(det, det_flags);
  det->add_option("--container", container_path, "signal container path")
      ->required();

  CLI::App* eval = app.add_subcommand("evaluate", "score detections");
  add_common(eval, eval_flags, /*with_band=*/false);
  eval->add_option("--detections", detections_path, "detections CSV")
      ->required();
  eval->add_option("--annotations", annotations_path, "annotations CSV")
      ->required();

  CLI::App* sel = app.add_subcommand("select-features", "run subset search");
  add_common(sel, sel_flags, /*with_band=*/false);
  sel->add_option("--features", features_path, "feature table CSV")->required();
  sel->add_option("--annotations", annotations_path, "annotations CSV")
      ->required();

  CLI::App* rate = app.add_subcommand("rate-ratio", "per-channel rate table");
  add_common(rate, rate_flags, /*with_band=*/false);
  rate->add_option("--detections", detections_path, "detections CSV")
      ->required();
  rate->add_option("--container", container_path, "signal container path")
      ->required();

  CLI::App* rep = app.add_subcommand("report", "emit figures from run CSVs");
  add_common(rep, rep_flags, /*with_band=*/false);
  rep->add_option("--scores", scores_paths, "scores CSV (repeatable)");
  rep->add_option("--ratios", ratios_paths, "ratios JSON (repeatable)");
  rep->add_option("--correlation", correlation_path, "correlation CSV");

  sim->callback([&] { cmd_simulate(sim, sim_flags); });
  det->callback([&] { cmd_detect(det, det_flags, container_path); });
  eval->callback(
      [&] { cmd_evaluate(eval, eval_flags, detections_path, annotations_path); });
  sel->callback([&] {
    cmd_select_features(sel, sel_flags, features_path, annotations_path);
  });
  rate->callback(
      [&] { cmd_rate_ratio(rate, rate_flags, detections_path, container_path); });
  rep->callback([&] {
    cmd_report(rep, rep_flags, scores_paths, ratios_paths, correlation_path);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const DataError& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return 1;
  }
  return 0;
}
