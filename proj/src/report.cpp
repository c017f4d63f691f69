#include "tfec/report.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <sstream>

#include "json.hpp"
#include "tfec/features.hpp"

namespace tfec {
namespace {

using ordered_json = nlohmann::ordered_json;

EventKind band_kind(Band b) {
  return b == Band::ripple ? EventKind::ripple : EventKind::fast_ripple;
}

std::string fmt2(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

}  // namespace

EvalReport evaluate(const std::vector<Detection>& detections,
                    const std::vector<Annotation>& annotations,
                    const EvalOptions& opts) {
  if (opts.ci_s <= 0) throw ConfigError("evaluate: ci_s must be positive");
  EvalReport report;
  report.options = opts;

  std::vector<ReferenceEvent> all_refs;
  all_refs.reserve(annotations.size());
  for (const auto& a : annotations)
    all_refs.push_back({a.channel, a.center_s, a.kind});

  for (const Band band : {Band::ripple, Band::fast_ripple}) {
    const EventKind target = band_kind(band);
    bool band_present = false;
    for (const auto& d : detections)
      if (d.band == band) {
        band_present = true;
        break;
      }
    std::vector<ChannelTime> refs;
    for (const auto& a : annotations)
      if (a.kind == target) refs.push_back({a.channel, a.center_s});
    if (!band_present && refs.empty()) continue;

    BandEval be;
    be.band = band;
    be.n_reference = static_cast<int>(refs.size());
    std::vector<ChannelTime> dets;
    for (const auto& d : detections)
      if (d.band == band && d.hfo) dets.push_back({d.channel, d.center_s});
    be.n_detected = static_cast<int>(dets.size());
    be.counts = match_events(dets, refs, opts.ci_s);
    be.score = scores(be.counts);
    be.permutation = permutation_test(dets, all_refs, target, opts.ci_s,
                                      opts.n_perm, opts.seed, opts.n_boot);
    report.bands.push_back(std::move(be));
  }
  return report;
}

void write_eval_report(const std::string& path, const EvalReport& report) {
  ordered_json j;
  j["options"] = {{"ci_s", report.options.ci_s},
                  {"n_perm", report.options.n_perm},
                  {"n_boot", report.options.n_boot},
                  {"seed", report.options.seed},
                  {"snr_db", report.options.snr_db}};
  ordered_json bands = ordered_json::array();
  for (const auto& be : report.bands) {
    ordered_json b;
    b["band"] = band_name(be.band);
    b["n_reference"] = be.n_reference;
    b["n_detected"] = be.n_detected;
    b["tp"] = be.counts.tp;
    b["fp"] = be.counts.fp;
    b["fn"] = be.counts.fn;
    b["sensitivity"] = be.score.sensitivity;
    b["precision"] = be.score.precision;
    b["f_score"] = be.score.f_score;
    b["p_value"] = be.permutation.p_value;
    b["ci_lo"] = be.permutation.ci_lo;
    b["ci_hi"] = be.permutation.ci_hi;
    b["low_n"] = be.permutation.low_n;
    b["low_n_perm"] = be.permutation.low_n_perm;
    bands.push_back(b);
  }
  j["bands"] = bands;
  atomic_write(path, j.dump(2) + "\n");
}

namespace {
constexpr const char* kScoresHeader =
    "band,snr_db,n_reference,n_detected,tp,fp,fn,sensitivity,precision,"
    "f_score,p_value,ci_lo,ci_hi,low_n,low_n_perm";
}

void write_scores_csv(const std::string& path, const EvalReport& report) {
  std::string out(kScoresHeader);
  out += '\n';
  for (const auto& be : report.bands) {
    out += band_name(be.band);
    out += ',';
    out += format_double(report.options.snr_db);
    out += ',';
    out += std::to_string(be.n_reference);
    out += ',';
    out += std::to_string(be.n_detected);
    out += ',';
    out += std::to_string(be.counts.tp);
    out += ',';
    out += std::to_string(be.counts.fp);
    out += ',';
    out += std::to_string(be.counts.fn);
    out += ',';
    out += format_double(be.score.sensitivity);
    out += ',';
    out += format_double(be.score.precision);
    out += ',';
    out += format_double(be.score.f_score);
    out += ',';
    out += format_double(be.permutation.p_value);
    out += ',';
    out += format_double(be.permutation.ci_lo);
    out += ',';
    out += format_double(be.permutation.ci_hi);
    out += ',';
    out += be.permutation.low_n ? "1" : "0";
    out += ',';
    out += be.permutation.low_n_perm ? "1" : "0";
    out += '\n';
  }
  atomic_write(path, out);
}

std::vector<ScoreRow> read_scores_csv(const std::string& path) {
  const std::string text = read_text_file(path);
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw ConfigError(path + ": empty scores CSV");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kScoresHeader)
    throw ConfigError(path + ": unexpected scores CSV header");
  std::vector<ScoreRow> rows;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      const std::size_t pos = line.find(',', start);
      if (pos == std::string::npos) {
        fields.push_back(line.substr(start));
        break;
      }
      fields.push_back(line.substr(start, pos - start));
      start = pos + 1;
    }
    if (fields.size() != 15)
      throw ConfigError(path + ": wrong scores CSV field count");
    ScoreRow r;
    r.band = fields[0];
    r.snr_db = std::stod(fields[1]);
    r.f_score = std::stod(fields[9]);
    rows.push_back(std::move(r));
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Rates and ratios
// ---------------------------------------------------------------------------
void write_rates_csv(const std::string& path, const RateTable& table) {
  std::string out = "channel,band,count,duration_min,rate_per_min,resected\n";
  for (const auto& row : table.rows) {
    out += std::to_string(row.channel);
    out += ',';
    out += band_name(row.band);
    out += ',';
    out += std::to_string(row.count);
    out += ',';
    out += format_double(row.duration_min);
    out += ',';
    out += format_double(row.rate_per_min);
    out += ',';
    out += row.resected ? "1" : "0";
    out += '\n';
  }
  atomic_write(path, out);
}

void write_ratios_json(const std::string& path, const RateTable& table) {
  ordered_json j;
  for (const Band band : {Band::ripple, Band::fast_ripple}) {
    const RateRatio r = rate_ratio(table, band);
    j[band_name(band)] = {{"no_events", r.no_events}, {"value", r.value}};
  }
  atomic_write(path, j.dump(2) + "\n");
}

std::vector<RatioPoint> read_ratios_json(const std::string& path,
                                         const std::string& label) {
  ordered_json j;
  try {
    j = ordered_json::parse(read_text_file(path));
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(path + ": invalid ratios JSON: " + e.what());
  }
  std::vector<RatioPoint> points;
  for (const char* band : {"ripple", "fast_ripple"}) {
    if (!j.contains(band)) continue;
    const auto& entry = j.at(band);
    if (entry.value("no_events", true)) continue;
    points.push_back({label, band, entry.at("value").get<double>()});
  }
  return points;
}

// ---------------------------------------------------------------------------
// Selection exports
// ---------------------------------------------------------------------------
void write_selection_trace(const std::string& path,
                           const SelectionTrace& trace) {
  std::string out = "step,action,feature,name,score,subset_size\n";
  for (std::size_t i = 0; i < trace.steps.size(); ++i) {
    const auto& s = trace.steps[i];
    out += std::to_string(i);
    out += ',';
    out += s.added ? "add" : "remove";
    out += ',';
    out += std::to_string(s.feature);
    out += ',';
    out += s.feature_name;
    out += ',';
    out += format_double(s.score);
    out += ',';
    out += std::to_string(s.subset_size);
    out += '\n';
  }
  atomic_write(path, out);
}

void write_correlation_csv(const std::string& path,
                           const CorrelationRanking& ranking) {
  const auto& names = feature_names();
  std::string out = "rank,feature,name,r\n";
  for (std::size_t i = 0; i < ranking.order.size(); ++i) {
    const int f = ranking.order[i];
    out += std::to_string(i);
    out += ',';
    out += std::to_string(f);
    out += ',';
    out += names[static_cast<std::size_t>(f)];
    out += ',';
    out += format_double(ranking.r[f]);
    out += '\n';
  }
  atomic_write(path, out);
}

std::vector<std::pair<std::string, double>> read_correlation_csv(
    const std::string& path) {
  const std::string text = read_text_file(path);
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw ConfigError(path + ": empty CSV");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "rank,feature,name,r")
    throw ConfigError(path + ": unexpected correlation CSV header");
  std::vector<std::pair<std::string, double>> out;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::size_t start = 0;
    while (true) {
      const std::size_t pos = line.find(',', start);
      if (pos == std::string::npos) {
        f.push_back(line.substr(start));
        break;
      }
      f.push_back(line.substr(start, pos - start));
      start = pos + 1;
    }
    if (f.size() != 4) throw ConfigError(path + ": wrong field count");
    out.emplace_back(f[2], std::stod(f[3]));
  }
  return out;
}

// ---------------------------------------------------------------------------
// SVG figures
// ---------------------------------------------------------------------------
namespace {

void svg_open(std::string& s, int w, int h) {
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
       std::to_string(w) + "\" height=\"" + std::to_string(h) +
       "\" viewBox=\"0 0 " + std::to_string(w) + " " + std::to_string(h) +
       "\">\n";
  s += "<rect x=\"0\" y=\"0\" width=\"" + std::to_string(w) + "\" height=\"" +
       std::to_string(h) + "\" fill=\"white\"/>\n";
}

void svg_line(std::string& s, double x1, double y1, double x2, double y2,
              const char* stroke = "#333", double width = 1.0) {
  s += "<line x1=\"" + fmt2(x1) + "\" y1=\"" + fmt2(y1) + "\" x2=\"" +
       fmt2(x2) + "\" y2=\"" + fmt2(y2) + "\" stroke=\"" + stroke +
       "\" stroke-width=\"" + fmt2(width) + "\"/>\n";
}

void svg_rect(std::string& s, double x, double y, double w, double h,
              const char* fill, const char* stroke = "#333") {
  s += "<rect x=\"" + fmt2(x) + "\" y=\"" + fmt2(y) + "\" width=\"" + fmt2(w) +
       "\" height=\"" + fmt2(h) + "\" fill=\"" + fill + "\" stroke=\"" +
       stroke + "\"/>\n";
}

void svg_circle(std::string& s, double cx, double cy, double r,
                const char* fill) {
  s += "<circle cx=\"" + fmt2(cx) + "\" cy=\"" + fmt2(cy) + "\" r=\"" +
       fmt2(r) + "\" fill=\"" + fill + "\"/>\n";
}

void svg_text(std::string& s, double x, double y, const std::string& text,
              const char* anchor = "middle", int size = 12) {
  std::string escaped;
  for (const char c : text) {
    if (c == '&')
      escaped += "&amp;";
    else if (c == '<')
      escaped += "&lt;";
    else if (c == '>')
      escaped += "&gt;";
    else
      escaped += c;
  }
  s += "<text x=\"" + fmt2(x) + "\" y=\"" + fmt2(y) + "\" text-anchor=\"" +
       anchor + "\" font-family=\"sans-serif\" font-size=\"" +
       std::to_string(size) + "\">" + escaped + "</text>\n";
}

void write_placeholder(const std::string& path, const char* title) {
  std::string s;
  svg_open(s, 640, 400);
  svg_text(s, 320, 30, title, "middle", 16);
  svg_text(s, 320, 200, "no events", "middle", 20);
  s += "</svg>\n";
  atomic_write(path, s);
}

double percentile_sorted(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return 0.0;
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(pos);
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

const char* band_color(const std::string& band) {
  return band == "ripple" ? "#3b6fb5" : "#c44e52";
}

}  // namespace

void svg_score_boxes(const std::string& path,
                     const std::vector<ScoreRow>& rows) {
  if (rows.empty()) {
    write_placeholder(path, "detection score by band and SNR");
    return;
  }
  std::map<std::pair<std::string, double>, std::vector<double>> groups;
  for (const auto& r : rows) groups[{r.band, r.snr_db}].push_back(r.f_score);

  const int n = static_cast<int>(groups.size());
  const int width = std::max(640, 140 + n * 80);
  const int height = 400;
  const double x0 = 70, y_top = 40, y_bot = 330;
  std::string s;
  svg_open(s, width, height);
  svg_text(s, width / 2.0, 24, "detection score by band and SNR", "middle", 15);

  svg_line(s, x0, y_top, x0, y_bot);
  for (int t = 0; t <= 4; ++t) {
    const double f = t / 4.0;
    const double y = y_bot - f * (y_bot - y_top);
    svg_line(s, x0 - 4, y, x0, y);
    svg_text(s, x0 - 8, y + 4, fmt2(f), "end", 11);
  }
  svg_text(s, 22, (y_top + y_bot) / 2, "F", "middle", 13);
  svg_line(s, x0, y_bot, width - 30.0, y_bot);

  int k = 0;
  for (auto& [key, values] : groups) {
    std::sort(values.begin(), values.end());
    const double cx = x0 + 50 + k * 80.0;
    const double q1 = percentile_sorted(values, 0.25);
    const double med = percentile_sorted(values, 0.5);
    const double q3 = percentile_sorted(values, 0.75);
    const double lo = values.front(), hi = values.back();
    auto y_of = [&](double f) { return y_bot - f * (y_bot - y_top); };

    svg_line(s, cx, y_of(lo), cx, y_of(q1));
    svg_line(s, cx, y_of(q3), cx, y_of(hi));
    svg_line(s, cx - 10, y_of(lo), cx + 10, y_of(lo));
    svg_line(s, cx - 10, y_of(hi), cx + 10, y_of(hi));
    svg_rect(s, cx - 20, y_of(q3), 40, std::max(0.5, y_of(q1) - y_of(q3)),
             key.first == "ripple" ? "#b9cce6" : "#e8b8ba");
    svg_line(s, cx - 20, y_of(med), cx + 20, y_of(med),
             band_color(key.first), 2.0);

    svg_text(s, cx, y_bot + 18, key.first, "middle", 11);
    svg_text(s, cx, y_bot + 33, fmt2(key.second) + " dB", "middle", 11);
    ++k;
  }
  s += "</svg>\n";
  atomic_write(path, s);
}

void svg_ratio_scatter(const std::string& path,
                       const std::vector<RatioPoint>& points) {
  if (points.empty()) {
    write_placeholder(path, "resected/spared rate ratio per recording");
    return;
  }
  std::vector<std::string> labels;
  for (const auto& p : points)
    if (std::find(labels.begin(), labels.end(), p.label) == labels.end())
      labels.push_back(p.label);

  const int n = static_cast<int>(labels.size());
  const int width = std::max(640, 140 + n * 70);
  const int height = 400;
  const double x0 = 70, y_top = 40, y_bot = 330;
  auto y_of = [&](double v) {
    return y_bot - (v + 1.0) / 2.0 * (y_bot - y_top);
  };
  std::string s;
  svg_open(s, width, height);
  svg_text(s, width / 2.0, 24, "resected/spared rate ratio per recording",
           "middle", 15);
  svg_line(s, x0, y_top, x0, y_bot);
  for (int t = -2; t <= 2; ++t) {
    const double v = t / 2.0;
    svg_line(s, x0 - 4, y_of(v), x0, y_of(v));
    svg_text(s, x0 - 8, y_of(v) + 4, fmt2(v), "end", 11);
  }
  svg_line(s, x0, y_of(0.0), width - 30.0, y_of(0.0), "#bbb");

  for (const auto& p : points) {
    const auto idx = static_cast<int>(
        std::find(labels.begin(), labels.end(), p.label) - labels.begin());
    const double cx =
        x0 + 45 + idx * 70.0 + (p.band == "ripple" ? -8.0 : 8.0);
    svg_circle(s, cx, y_of(p.value), 5, band_color(p.band));
  }
  for (int i = 0; i < n; ++i)
    svg_text(s, x0 + 45 + i * 70.0, y_bot + 18, labels[static_cast<std::size_t>(i)],
             "middle", 10);
  svg_circle(s, width - 130.0, 50, 5, band_color("ripple"));
  svg_text(s, width - 120.0, 54, "ripple", "start", 11);
  svg_circle(s, width - 130.0, 68, 5, band_color("fast_ripple"));
  svg_text(s, width - 120.0, 72, "fast ripple", "start", 11);
  s += "</svg>\n";
  atomic_write(path, s);
}

void svg_correlation_bars(
    const std::string& path,
    const std::vector<std::pair<std::string, double>>& bars) {
  if (bars.empty()) {
    write_placeholder(path, "feature correlation with event labels");
    return;
  }
  const int n = std::min<int>(20, static_cast<int>(bars.size()));
  const int height = 80 + n * 22;
  const int width = 640;
  const double x_mid = 380, half = 200;
  std::string s;
  svg_open(s, width, height);
  svg_text(s, width / 2.0, 24, "feature correlation with event labels",
           "middle", 15);
  svg_line(s, x_mid, 40, x_mid, 50.0 + n * 22, "#bbb");
  svg_text(s, x_mid - half, height - 12.0, "-1", "middle", 11);
  svg_text(s, x_mid, height - 12.0, "0", "middle", 11);
  svg_text(s, x_mid + half, height - 12.0, "+1", "middle", 11);

  for (int i = 0; i < n; ++i) {
    const auto& [name, r] = bars[static_cast<std::size_t>(i)];
    const double y = 48 + i * 22.0;
    const double w = std::abs(r) * half;
    const double x = r >= 0 ? x_mid : x_mid - w;
    svg_rect(s, x, y, std::max(0.5, w), 14, r >= 0 ? "#3b6fb5" : "#c44e52",
             "none");
    svg_text(s, x_mid - half - 8, y + 11,
             name.size() > 26 ? name.substr(0, 26) : name, "end", 11);
  }
  s += "</svg>\n";
  atomic_write(path, s);
}

}  // namespace tfec
