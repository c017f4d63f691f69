#include "tfec/io.hpp"

#include <bit>
#include <cctype>
#include <charconv>
#include <climits>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

#include "json.hpp"
#include "tfec/features.hpp"
#include "tfec/version.hpp"

namespace tfec {
namespace {

static_assert(std::endian::native == std::endian::little,
              "payload writer assumes a little-endian host");

using ordered_json = nlohmann::ordered_json;

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(',', start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

double parse_double_value(const std::string& text, const std::string& what) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto* end = t.data() + t.size();
  const auto res = std::from_chars(t.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end)
    throw ConfigError(what + ": not a number: '" + text + "'");
  return v;
}

long long parse_int_value(const std::string& text, const std::string& what) {
  const std::string t = trim(text);
  long long v = 0;
  const auto* end = t.data() + t.size();
  const auto res = std::from_chars(t.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end)
    throw ConfigError(what + ": not an integer: '" + text + "'");
  return v;
}

std::uint64_t parse_u64_value(const std::string& text, const std::string& what) {
  const std::string t = trim(text);
  std::uint64_t v = 0;
  const auto* end = t.data() + t.size();
  const auto res = std::from_chars(t.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end)
    throw ConfigError(what + ": not an unsigned integer: '" + text + "'");
  return v;
}

// One config key: canonical name plus symmetric get/set accessors.
struct KeySpec {
  const char* name;
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, const std::string&)> set;
};

KeySpec str_key(const char* name, std::string RunConfig::*field) {
  return {name, [field](const RunConfig& c) { return c.*field; },
          [field](RunConfig& c, const std::string& v) { c.*field = trim(v); }};
}

KeySpec dbl_key(const char* name, double RunConfig::*field) {
  return {name,
          [field](const RunConfig& c) { return format_double(c.*field); },
          [name, field](RunConfig& c, const std::string& v) {
            c.*field = parse_double_value(v, name);
          }};
}

KeySpec int_key(const char* name, int RunConfig::*field) {
  return {name, [field](const RunConfig& c) { return std::to_string(c.*field); },
          [name, field](RunConfig& c, const std::string& v) {
            const long long x = parse_int_value(v, name);
            if (x < INT_MIN || x > INT_MAX)
              throw ConfigError(std::string(name) + ": out of range");
            c.*field = static_cast<int>(x);
          }};
}

KeySpec u64_key(const char* name, std::uint64_t RunConfig::*field) {
  return {name, [field](const RunConfig& c) { return std::to_string(c.*field); },
          [name, field](RunConfig& c, const std::string& v) {
            c.*field = parse_u64_value(v, name);
          }};
}

const std::vector<KeySpec>& key_table() {
  static const std::vector<KeySpec> table = {
      str_key("band", &RunConfig::band),
      dbl_key("ripple_lo", &RunConfig::ripple_lo),
      dbl_key("ripple_hi", &RunConfig::ripple_hi),
      dbl_key("fast_ripple_lo", &RunConfig::fast_ripple_lo),
      dbl_key("fast_ripple_hi", &RunConfig::fast_ripple_hi),
      dbl_key("epoch_window_s", &RunConfig::epoch_window_s),
      dbl_key("epoch_step_s", &RunConfig::epoch_step_s),
      int_key("min_blob_area", &RunConfig::min_blob_area),
      int_key("connectivity", &RunConfig::connectivity),
      dbl_key("merge_radius_s", &RunConfig::merge_radius_s),
      dbl_key("crop_s", &RunConfig::crop_s),
      dbl_key("max_foreground_fraction", &RunConfig::max_foreground_fraction),
      dbl_key("psd_window_s", &RunConfig::psd_window_s),
      str_key("linkage", &RunConfig::linkage),
      int_key("n_groups", &RunConfig::n_groups),
      str_key("feature_subset", &RunConfig::feature_subset),
      dbl_key("ci_s", &RunConfig::ci_s),
      int_key("n_perm", &RunConfig::n_perm),
      int_key("n_boot", &RunConfig::n_boot),
      int_key("d_max", &RunConfig::d_max),
      dbl_key("sffs_eps", &RunConfig::sffs_eps),
      dbl_key("fs", &RunConfig::fs),
      dbl_key("duration_s", &RunConfig::duration_s),
      int_key("n_channels", &RunConfig::n_channels),
      int_key("n_backgrounds", &RunConfig::n_backgrounds),
      int_key("background_id", &RunConfig::background_id),
      dbl_key("snr_db", &RunConfig::snr_db),
      int_key("events_per_kind", &RunConfig::events_per_kind),
      dbl_key("co_occur_fraction", &RunConfig::co_occur_fraction),
      dbl_key("bg_amplitude_uv", &RunConfig::bg_amplitude_uv),
      dbl_key("spike_amp_factor", &RunConfig::spike_amp_factor),
      dbl_key("min_separation_s", &RunConfig::min_separation_s),
      dbl_key("edge_margin_s", &RunConfig::edge_margin_s),
      str_key("event_channels", &RunConfig::event_channels),
      str_key("resected_channels", &RunConfig::resected_channels),
      u64_key("seed", &RunConfig::seed),
      int_key("threads", &RunConfig::threads),
  };
  return table;
}

const KeySpec* find_key(const std::string& name) {
  for (const auto& k : key_table())
    if (name == k.name) return &k;
  return nullptr;
}

void apply_env_overrides(RunConfig& cfg) {
  for (const auto& k : key_table()) {
    std::string env_name = "TFEC_";
    for (const char* p = k.name; *p; ++p)
      env_name += static_cast<char>(std::toupper(static_cast<unsigned char>(*p)));
    if (const char* v = std::getenv(env_name.c_str())) k.set(cfg, v);
  }
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::vector<int> parse_channel_list(const std::string& text) {
  std::vector<int> out;
  const std::string t = trim(text);
  if (t.empty()) return out;
  for (const auto& item : split_csv_line(t))
    out.push_back(static_cast<int>(parse_int_value(item, "channel list")));
  return out;
}

void RunConfig::validate() const {
  if (band != "ripple" && band != "fast_ripple" && band != "both" &&
      band != "full")
    throw ConfigError("band: expected ripple|fast_ripple|both|full, got '" +
                      band + "'");
  if (linkage != "ward")
    throw ConfigError("linkage: only 'ward' is available, got '" + linkage +
                      "'");
  if (connectivity != 4 && connectivity != 8)
    throw ConfigError("connectivity: expected 4 or 8");
  if (!(ripple_lo > 0 && ripple_lo < ripple_hi))
    throw ConfigError("ripple band edges must satisfy 0 < lo < hi");
  if (!(fast_ripple_lo > 0 && fast_ripple_lo < fast_ripple_hi))
    throw ConfigError("fast ripple band edges must satisfy 0 < lo < hi");
  if (epoch_window_s <= 0 || epoch_step_s <= 0)
    throw ConfigError("epoch window and step must be positive");
  if (min_blob_area < 1) throw ConfigError("min_blob_area must be >= 1");
  if (merge_radius_s < 0) throw ConfigError("merge_radius_s must be >= 0");
  if (crop_s <= 0) throw ConfigError("crop_s must be positive");
  if (max_foreground_fraction <= 0 || max_foreground_fraction > 1)
    throw ConfigError("max_foreground_fraction must be in (0, 1]");
  if (psd_window_s <= 0) throw ConfigError("psd_window_s must be positive");
  if (n_groups < 2) throw ConfigError("n_groups must be >= 2");
  if (ci_s <= 0) throw ConfigError("ci_s must be positive");
  if (n_perm < 1) throw ConfigError("n_perm must be >= 1");
  if (n_boot < 0) throw ConfigError("n_boot must be >= 0");
  if (d_max < 1) throw ConfigError("d_max must be >= 1");
  if (sffs_eps < 0) throw ConfigError("sffs_eps must be >= 0");
  if (threads < 1) throw ConfigError("threads must be >= 1");
  parse_channel_list(event_channels);
  parse_channel_list(resected_channels);
}

BenchmarkConfig RunConfig::benchmark() const {
  BenchmarkConfig b;
  b.n_channels = n_channels;
  b.duration_s = duration_s;
  b.fs = fs;
  b.snr_db = snr_db;
  b.n_backgrounds = n_backgrounds;
  b.background_id = background_id;
  b.seed = seed;
  b.events_per_kind = events_per_kind;
  b.co_occur_fraction = co_occur_fraction;
  b.bg_amplitude_uv = bg_amplitude_uv;
  b.spike_amp_factor = spike_amp_factor;
  b.min_separation_s = min_separation_s;
  b.edge_margin_s = edge_margin_s;
  b.event_channels = parse_channel_list(event_channels);
  b.resected_channels = parse_channel_list(resected_channels);
  b.ripple = {ripple_lo, ripple_hi};
  b.fast_ripple = {fast_ripple_lo, fast_ripple_hi};
  return b;
}

RunConfig parse_run_config_text(const std::string& text, bool apply_env) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const std::size_t eq = body.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": expected key = value");
    const std::string key = trim(body.substr(0, eq));
    const std::string value = trim(body.substr(eq + 1));
    const KeySpec* spec = find_key(key);
    if (!spec)
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": unknown key '" + key + "'");
    spec->set(cfg, value);
  }
  if (apply_env) apply_env_overrides(cfg);
  cfg.validate();
  return cfg;
}

RunConfig load_run_config(const std::string& path, bool apply_env) {
  return parse_run_config_text(read_text_file(path), apply_env);
}

std::string run_config_text(const RunConfig& cfg) {
  std::string out;
  for (const auto& k : key_table()) {
    out += k.name;
    out += " = ";
    out += k.get(cfg);
    out += '\n';
  }
  return out;
}

void write_run_config(const std::string& path, const RunConfig& cfg) {
  atomic_write(path, run_config_text(cfg));
}

// ---------------------------------------------------------------------------
// Signal container
// ---------------------------------------------------------------------------
std::pair<std::string, std::string> container_paths(const std::string& path) {
  std::string stem = path;
  if (stem.size() > 5 && stem.substr(stem.size() - 5) == ".json")
    stem.erase(stem.size() - 5);
  else if (stem.size() > 4 && stem.substr(stem.size() - 4) == ".f32")
    stem.erase(stem.size() - 4);
  return {stem + ".json", stem + ".f32"};
}

void write_container(const std::string& path, const SignalRecord& record) {
  record.validate();
  const auto [header_path, payload_path] = container_paths(path);

  ordered_json j;
  j["version"] = kContainerVersion;
  j["dtype"] = "f32le";
  j["endianness"] = "little";
  j["layout"] = "channel_major";
  j["fs"] = record.fs;
  j["n_channels"] = record.n_channels();
  j["n_samples"] = record.n_samples();
  j["duration_s"] = record.duration_s();
  j["channel_names"] = record.channel_names;
  std::vector<int> res;
  for (const bool b : record.resected) res.push_back(b ? 1 : 0);
  j["resected"] = res;
  atomic_write(header_path, j.dump(2) + "\n");

  std::string payload;
  payload.resize(static_cast<std::size_t>(4 * record.n_channels() *
                                          record.n_samples()));
  std::size_t off = 0;
  for (Eigen::Index ch = 0; ch < record.n_channels(); ++ch)
    for (Eigen::Index s = 0; s < record.n_samples(); ++s) {
      const float v = static_cast<float>(record.samples(ch, s));
      std::memcpy(payload.data() + off, &v, 4);
      off += 4;
    }
  atomic_write(payload_path, payload);
}

SignalRecord read_container(const std::string& path) {
  const auto [header_path, payload_path] = container_paths(path);
  const std::string header_text = read_binary_file(header_path);
  ordered_json j;
  try {
    j = ordered_json::parse(header_text);
  } catch (const std::exception& e) {
    throw DataError("container header is not valid JSON: " +
                    std::string(e.what()));
  }

  SignalRecord record;
  Eigen::Index n_channels = 0, n_samples = 0;
  try {
    if (j.at("version").get<int>() != kContainerVersion)
      throw DataError("container version mismatch");
    if (j.at("dtype").get<std::string>() != "f32le")
      throw DataError("container dtype must be f32le");
    if (j.at("endianness").get<std::string>() != "little")
      throw DataError("container endianness must be little");
    if (j.at("layout").get<std::string>() != "channel_major")
      throw DataError("container layout must be channel_major");
    record.fs = j.at("fs").get<double>();
    n_channels = j.at("n_channels").get<Eigen::Index>();
    n_samples = j.at("n_samples").get<Eigen::Index>();
    record.channel_names = j.at("channel_names").get<std::vector<std::string>>();
    for (const int b : j.at("resected").get<std::vector<int>>())
      record.resected.push_back(b != 0);
  } catch (const DataError&) {
    throw;
  } catch (const std::exception& e) {
    throw DataError("container header field error: " + std::string(e.what()));
  }
  if (record.fs <= 0) throw DataError("container fs must be positive");
  if (n_channels < 1 || n_samples < 0)
    throw DataError("container dimensions invalid");

  const std::string payload = read_binary_file(payload_path);
  const std::size_t expected =
      static_cast<std::size_t>(4) * static_cast<std::size_t>(n_channels) *
      static_cast<std::size_t>(n_samples);
  if (payload.size() != expected)
    throw DataError("container payload size " + std::to_string(payload.size()) +
                    " != expected " + std::to_string(expected));

  record.samples.resize(n_channels, n_samples);
  std::size_t off = 0;
  for (Eigen::Index ch = 0; ch < n_channels; ++ch)
    for (Eigen::Index s = 0; s < n_samples; ++s) {
      float v = 0.0f;
      std::memcpy(&v, payload.data() + off, 4);
      record.samples(ch, s) = static_cast<double>(v);
      off += 4;
    }
  record.validate();
  return record;
}

// ---------------------------------------------------------------------------
// CSV tables
// ---------------------------------------------------------------------------
namespace {

constexpr const char* kAnnotationHeader = "channel,center_s,kind,band,amplitude";
constexpr const char* kDetectionHeader =
    "channel,center_s,kind,band,cluster,feature_row";

std::vector<std::string> read_csv_lines(const std::string& path) {
  const std::string text = read_text_file(path);
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!trim(line).empty()) lines.push_back(line);
  }
  if (lines.empty()) throw ConfigError(path + ": empty CSV");
  return lines;
}

void expect_header(const std::string& path, const std::string& got,
                   const std::string& want) {
  if (got != want)
    throw ConfigError(path + ": header mismatch, expected '" + want +
                      "', got '" + got + "'");
}

}  // namespace

void write_annotations(const std::string& path,
                       const std::vector<Annotation>& rows) {
  std::string out(kAnnotationHeader);
  out += '\n';
  for (const auto& a : rows) {
    out += std::to_string(a.channel);
    out += ',';
    out += format_double(a.center_s);
    out += ',';
    out += kind_name(a.kind);
    out += ',';
    out += kind_band_name(a.kind);
    out += ',';
    out += format_double(a.amplitude_uv);
    out += '\n';
  }
  atomic_write(path, out);
}

std::vector<Annotation> read_annotations(const std::string& path) {
  const auto lines = read_csv_lines(path);
  expect_header(path, lines[0], kAnnotationHeader);
  std::vector<Annotation> rows;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto fields = split_csv_line(lines[i]);
    if (fields.size() != 5)
      throw ConfigError(path + " row " + std::to_string(i) +
                        ": expected 5 fields");
    Annotation a;
    a.channel = static_cast<int>(parse_int_value(fields[0], path + " channel"));
    a.center_s = parse_double_value(fields[1], path + " center_s");
    a.kind = parse_kind(trim(fields[2]));
    if (trim(fields[3]) != kind_band_name(a.kind))
      throw ConfigError(path + " row " + std::to_string(i) +
                        ": band does not match kind");
    a.amplitude_uv = parse_double_value(fields[4], path + " amplitude");
    if (a.channel < 0)
      throw ConfigError(path + " row " + std::to_string(i) +
                        ": negative channel");
    if (a.center_s < 0)
      throw ConfigError(path + " row " + std::to_string(i) +
                        ": negative center_s");
    rows.push_back(a);
  }
  return rows;
}

void write_detections(const std::string& path,
                      const std::vector<Detection>& rows) {
  std::string out(kDetectionHeader);
  out += '\n';
  for (const auto& d : rows) {
    const EventKind kind =
        d.band == Band::ripple ? EventKind::ripple : EventKind::fast_ripple;
    out += std::to_string(d.channel);
    out += ',';
    out += format_double(d.center_s);
    out += ',';
    out += kind_name(kind);
    out += ',';
    out += band_name(d.band);
    out += ',';
    out += d.hfo ? "hfo" : "non_hfo";
    out += ',';
    out += std::to_string(d.feature_row);
    out += '\n';
  }
  atomic_write(path, out);
}

std::vector<Detection> read_detections(const std::string& path) {
  const auto lines = read_csv_lines(path);
  expect_header(path, lines[0], kDetectionHeader);
  std::vector<Detection> rows;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto fields = split_csv_line(lines[i]);
    if (fields.size() != 6)
      throw ConfigError(path + " row " + std::to_string(i) +
                        ": expected 6 fields");
    Detection d;
    d.channel = static_cast<int>(parse_int_value(fields[0], path + " channel"));
    d.center_s = parse_double_value(fields[1], path + " center_s");
    d.band = parse_band(trim(fields[3]));
    const EventKind kind = parse_kind(trim(fields[2]));
    if ((kind == EventKind::ripple) != (d.band == Band::ripple))
      throw ConfigError(path + " row " + std::to_string(i) +
                        ": kind does not match band");
    const std::string cluster = trim(fields[4]);
    if (cluster == "hfo")
      d.hfo = true;
    else if (cluster == "non_hfo")
      d.hfo = false;
    else
      throw ConfigError(path + " row " + std::to_string(i) +
                        ": cluster must be hfo or non_hfo");
    d.feature_row =
        static_cast<int>(parse_int_value(fields[5], path + " feature_row"));
    rows.push_back(d);
  }
  return rows;
}

void write_feature_table(const std::string& path, const FeatureTable& table) {
  const auto& names = feature_names();
  const auto n = static_cast<std::size_t>(table.values.rows());
  if (table.channel.size() != n || table.center_s.size() != n ||
      table.band.size() != n)
    throw ConfigError("feature table: identity column size mismatch");
  if (table.values.cols() != static_cast<Eigen::Index>(names.size()))
    throw ConfigError("feature table: column count mismatch");

  std::string out = "channel,center_s,band";
  for (const auto& name : names) {
    out += ',';
    out += name;
  }
  out += '\n';
  for (std::size_t i = 0; i < n; ++i) {
    out += std::to_string(table.channel[i]);
    out += ',';
    out += format_double(table.center_s[i]);
    out += ',';
    out += band_name(table.band[i]);
    for (Eigen::Index c = 0; c < table.values.cols(); ++c) {
      out += ',';
      out += format_double(table.values(static_cast<Eigen::Index>(i), c));
    }
    out += '\n';
  }
  atomic_write(path, out);
}

FeatureTable read_feature_table(const std::string& path) {
  const auto lines = read_csv_lines(path);
  const auto& names = feature_names();
  std::string want = "channel,center_s,band";
  for (const auto& name : names) {
    want += ',';
    want += name;
  }
  expect_header(path, lines[0], want);

  FeatureTable table;
  const auto n_rows = lines.size() - 1;
  table.values.resize(static_cast<Eigen::Index>(n_rows),
                      static_cast<Eigen::Index>(names.size()));
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto fields = split_csv_line(lines[i]);
    if (fields.size() != names.size() + 3)
      throw ConfigError(path + " row " + std::to_string(i) +
                        ": wrong field count");
    table.channel.push_back(
        static_cast<int>(parse_int_value(fields[0], path + " channel")));
    table.center_s.push_back(parse_double_value(fields[1], path + " center_s"));
    table.band.push_back(parse_band(trim(fields[2])));
    for (std::size_t c = 0; c < names.size(); ++c)
      table.values(static_cast<Eigen::Index>(i - 1),
                   static_cast<Eigen::Index>(c)) =
          parse_double_value(fields[c + 3], path + " " + names[c]);
  }
  return table;
}

void write_feature_subset(const std::string& path,
                          const std::vector<int>& indices) {
  const auto& names = feature_names();
  std::string out;
  for (const int idx : indices) {
    if (idx < 0 || idx >= static_cast<int>(names.size()))
      throw ConfigError("feature subset: index out of range");
    out += names[static_cast<std::size_t>(idx)];
    out += '\n';
  }
  atomic_write(path, out);
}

std::vector<int> read_feature_subset(const std::string& path) {
  const std::string text = read_text_file(path);
  std::istringstream in(text);
  std::string line;
  std::vector<int> out;
  std::vector<char> seen(feature_names().size(), 0);
  while (std::getline(in, line)) {
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string name = trim(line);
    if (name.empty()) continue;
    const int idx = feature_index(name);
    if (idx < 0)
      throw ConfigError(path + ": unknown feature name '" + name + "'");
    if (seen[static_cast<std::size_t>(idx)])
      throw ConfigError(path + ": duplicate feature name '" + name + "'");
    seen[static_cast<std::size_t>(idx)] = 1;
    out.push_back(idx);
  }
  if (out.empty()) throw ConfigError(path + ": empty feature subset");
  return out;
}

// ---------------------------------------------------------------------------
// Provenance and file helpers
// ---------------------------------------------------------------------------
std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

void atomic_write(const std::string& path, std::string_view bytes) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + tmp);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("write failed: " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec)
    throw std::runtime_error("rename failed: " + tmp + " -> " + path + ": " +
                             ec.message());
}

namespace {
std::string slurp(const std::string& path, bool* ok) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    *ok = false;
    return {};
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  *ok = true;
  return buf.str();
}
}  // namespace

std::string read_text_file(const std::string& path) {
  bool ok = false;
  std::string text = slurp(path, &ok);
  if (!ok) throw ConfigError("cannot read file: " + path);
  return text;
}

std::string read_binary_file(const std::string& path) {
  bool ok = false;
  std::string text = slurp(path, &ok);
  if (!ok) throw DataError("cannot read file: " + path);
  return text;
}

void write_manifest(
    const std::string& path, const RunConfig& cfg,
    const std::vector<std::pair<std::string, std::string>>& inputs,
    const std::vector<std::pair<std::string, std::int64_t>>& counts) {
  ordered_json j;
  j["tool"] = "tfec";
  j["version"] = kVersion;
  char hex[17];
  std::snprintf(hex, sizeof(hex), "%016llx",
                static_cast<unsigned long long>(fnv1a64(run_config_text(cfg))));
  j["config_hash"] = hex;
  ordered_json in_obj = ordered_json::object();
  for (const auto& [k, v] : inputs) in_obj[k] = v;
  j["inputs"] = in_obj;
  ordered_json count_obj = ordered_json::object();
  for (const auto& [k, v] : counts) count_obj[k] = v;
  j["counts"] = count_obj;
  atomic_write(path, j.dump(2) + "\n");
}

}  // namespace tfec
