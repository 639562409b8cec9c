#include "lager/io.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include <json.hpp>

namespace lager::io {
namespace {

using json = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& path, const std::string& message) {
  throw FormatError((path.empty() ? std::string("document") : path) + ": " + message);
}

std::string child(const std::string& path, std::string_view key) {
  return path.empty() ? std::string(key) : path + "." + std::string(key);
}

std::string element(const std::string& path, std::size_t index) {
  return path + "[" + std::to_string(index) + "]";
}

json parse_json(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    std::size_t line = 1;
    std::size_t column = 1;
    const std::size_t end = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < end; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    std::string detail = e.what();
    if (auto pos = detail.find("syntax error"); pos != std::string::npos) detail = detail.substr(pos);
    throw FormatError("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + detail);
  }
}

void expect_object(const json& j, const std::string& path, std::initializer_list<std::string_view> allowed) {
  if (!j.is_object()) fail(path, "expected an object");
  for (const auto& [key, value] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      fail(child(path, key), "unknown field");
    }
  }
}

const json& require(const json& j, std::string_view key, const std::string& path) {
  auto it = j.find(std::string(key));
  if (it == j.end()) fail(child(path, key), "missing field");
  return *it;
}

const json& require_array(const json& j, std::string_view key, const std::string& path) {
  const json& value = require(j, key, path);
  if (!value.is_array()) fail(child(path, key), "expected an array");
  return value;
}

double as_number(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(path, "expected a finite number");
  return v;
}

std::string as_string(const json& j, const std::string& path) {
  if (!j.is_string()) fail(path, "expected a string");
  return j.get<std::string>();
}

bool as_bool(const json& j, const std::string& path) {
  if (!j.is_boolean()) fail(path, "expected true or false");
  return j.get<bool>();
}

std::uint64_t as_u64(const json& j, const std::string& path) {
  if (!j.is_number_unsigned()) fail(path, "expected a non-negative integer");
  return j.get<std::uint64_t>();
}

Vec3 as_vec3(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 3) fail(path, "expected an array of 3 numbers");
  return Vec3(as_number(j[0], element(path, 0)), as_number(j[1], element(path, 1)), as_number(j[2], element(path, 2)));
}

double number_field(const json& j, std::string_view key, const std::string& path) {
  return as_number(require(j, key, path), child(path, key));
}

std::string string_field(const json& j, std::string_view key, const std::string& path) {
  return as_string(require(j, key, path), child(path, key));
}

void check_header(const json& j, const std::string& path, bool with_units) {
  const std::string version = string_field(j, "format_version", path);
  if (version != kFormatVersion) {
    fail(child(path, "format_version"), "unsupported version '" + version + "' (expected '" +
                                            std::string(kFormatVersion) + "')");
  }
  if (with_units) {
    const std::string units = string_field(j, "units", path);
    if (units != "mm") fail(child(path, "units"), "units must be \"mm\", got \"" + units + "\"");
  }
}

json vec3_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

// ---- landmark sets

json set_body(const LandmarkSet& set) {
  json out = json::object();
  out["unpaired"] = json::array();
  for (const auto& l : set.unpaired) {
    out["unpaired"].push_back({{"name", l.name}, {"xyz", vec3_json(l.position)}});
  }
  out["pairs"] = json::array();
  for (const auto& p : set.pairs) {
    out["pairs"].push_back({{"name", p.name}, {"right_xyz", vec3_json(p.right)}, {"left_xyz", vec3_json(p.left)}});
  }
  return out;
}

// Reads the unpaired/pairs arrays of an object whose other keys the caller
// has already checked.
LandmarkSet read_set_body(const json& j, const std::string& path) {
  LandmarkSet set;
  const json& unpaired = require_array(j, "unpaired", path);
  for (std::size_t i = 0; i < unpaired.size(); ++i) {
    const std::string p = element(child(path, "unpaired"), i);
    expect_object(unpaired[i], p, {"name", "xyz"});
    set.unpaired.push_back({string_field(unpaired[i], "name", p), as_vec3(require(unpaired[i], "xyz", p), child(p, "xyz"))});
  }
  const json& pairs = require_array(j, "pairs", path);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const std::string p = element(child(path, "pairs"), i);
    expect_object(pairs[i], p, {"name", "right_xyz", "left_xyz"});
    set.pairs.push_back({string_field(pairs[i], "name", p), as_vec3(require(pairs[i], "right_xyz", p), child(p, "right_xyz")),
                         as_vec3(require(pairs[i], "left_xyz", p), child(p, "left_xyz"))});
  }

  const auto violations = find_violations(set);
  if (!violations.empty()) {
    std::string message = "invalid landmark set:";
    for (const auto& v : violations) message += " " + v.message + ";";
    message.pop_back();
    fail(path, message);
  }
  return set;
}

LandmarkSet read_set_object(const json& j, const std::string& path) {
  expect_object(j, path, {"unpaired", "pairs"});
  return read_set_body(j, path);
}

// ---- planes

json plane_json(const Plane& plane) {
  return {{"normal", vec3_json(plane.normal())}, {"offset", plane.offset()}};
}

Plane read_plane_object(const json& j, const std::string& path, std::initializer_list<std::string_view> allowed) {
  expect_object(j, path, allowed);
  const Vec3 normal = as_vec3(require(j, "normal", path), child(path, "normal"));
  const double offset = number_field(j, "offset", path);
  try {
    return canonicalize_plane(normal, offset);
  } catch (const InputError& e) {
    fail(child(path, "normal"), e.what());
  }
}

std::string format_double(double v) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.17g", v);
  return buffer;
}

// ---- enums

std::string_view side_name(Side side) {
  switch (side) {
    case Side::Right:
      return "right";
    case Side::Left:
      return "left";
    case Side::Midline:
      return "midline";
  }
  return "midline";
}

Side read_side(const json& j, const std::string& path) {
  const std::string s = as_string(j, path);
  if (s == "right") return Side::Right;
  if (s == "left") return Side::Left;
  fail(path, "side must be \"left\" or \"right\"");
}

Severity read_severity(const json& j, const std::string& path) {
  const std::string s = as_string(j, path);
  for (auto sev : {Severity::Normal, Severity::MildModerate, Severity::Severe}) {
    if (s == to_string(sev)) return sev;
  }
  fail(path, "unknown severity '" + s + "'");
}

std::string_view unit_kind_name(DroppableUnit::Kind kind) {
  return kind == DroppableUnit::Kind::Pair ? "pair" : "unpaired";
}

json unit_json(const DroppableUnit& unit) { return {{"name", unit.name}, {"kind", unit_kind_name(unit.kind)}}; }

DroppableUnit read_unit(const json& j, const std::string& path, bool with_t = false) {
  if (with_t) {
    expect_object(j, path, {"name", "kind", "t"});
  } else {
    expect_object(j, path, {"name", "kind"});
  }
  DroppableUnit unit;
  unit.name = string_field(j, "name", path);
  const std::string kind = string_field(j, "kind", path);
  if (kind == "pair") {
    unit.kind = DroppableUnit::Kind::Pair;
  } else if (kind != "unpaired") {
    fail(child(path, "kind"), "kind must be \"unpaired\" or \"pair\"");
  }
  return unit;
}

std::vector<DroppableUnit> read_units(const json& j, std::string_view key, const std::string& path) {
  const json& array = require_array(j, key, path);
  std::vector<DroppableUnit> out;
  for (std::size_t i = 0; i < array.size(); ++i) out.push_back(read_unit(array[i], element(child(path, key), i)));
  return out;
}

std::vector<std::string> read_strings(const json& j, std::string_view key, const std::string& path) {
  const json& array = require_array(j, key, path);
  std::vector<std::string> out;
  for (std::size_t i = 0; i < array.size(); ++i) out.push_back(as_string(array[i], element(child(path, key), i)));
  return out;
}

// ---- deformity specs and metrics

json spec_json(const synth::DeformitySpec& spec) {
  return {{"kind", synth::to_string(spec.kind)},
          {"side", side_name(spec.side)},
          {"magnitude", spec.magnitude},
          {"affected", spec.affected}};
}

synth::DeformitySpec read_spec(const json& j, const std::string& path) {
  expect_object(j, path, {"kind", "side", "magnitude", "affected"});
  synth::DeformitySpec spec;
  const std::string kind = string_field(j, "kind", path);
  const auto parsed = synth::parse_deformity_kind(kind);
  if (!parsed) fail(child(path, "kind"), "unknown deformity kind '" + kind + "'");
  spec.kind = *parsed;
  spec.side = read_side(require(j, "side", path), child(path, "side"));
  spec.magnitude = number_field(j, "magnitude", path);
  spec.affected = read_strings(j, "affected", path);
  return spec;
}

json metrics_json(const synth::ValidationMetrics& m) {
  return {{"theta_deg", m.theta}, {"dist_n", m.dist_n}, {"dist_u1", m.dist_u1}, {"dist_pg", m.dist_pg}, {"pass", m.pass}};
}

json optional_metrics_json(const std::optional<synth::ValidationMetrics>& m) {
  return m ? metrics_json(*m) : json(nullptr);
}

synth::ValidationMetrics read_metrics(const json& j, const std::string& path) {
  expect_object(j, path, {"theta_deg", "dist_n", "dist_u1", "dist_pg", "pass"});
  synth::ValidationMetrics m;
  m.theta = number_field(j, "theta_deg", path);
  m.dist_n = number_field(j, "dist_n", path);
  m.dist_u1 = number_field(j, "dist_u1", path);
  m.dist_pg = number_field(j, "dist_pg", path);
  m.pass = as_bool(require(j, "pass", path), child(path, "pass"));
  return m;
}

}  // namespace

LandmarkSet parse_landmark_file(std::string_view text) {
  const json j = parse_json(text);
  expect_object(j, "", {"format_version", "units", "unpaired", "pairs"});
  check_header(j, "", true);
  return read_set_body(j, "");
}

std::string write_landmark_file(const LandmarkSet& set) {
  json out = {{"format_version", kFormatVersion}, {"units", "mm"}};
  const json body = set_body(set);
  for (const auto& [key, value] : body.items()) out[key] = value;
  return out.dump(2) + "\n";
}

std::string write_plane(const Plane& plane) {
  const Plane p = canonicalize_plane(plane.normal(), plane.offset());
  std::ostringstream os;
  os << "{\n"
     << "  \"format_version\": \"" << kFormatVersion << "\",\n"
     << "  \"units\": \"mm\",\n"
     << "  \"normal\": [" << format_double(p.normal().x()) << ", " << format_double(p.normal().y()) << ", "
     << format_double(p.normal().z()) << "],\n"
     << "  \"offset\": " << format_double(p.offset()) << "\n"
     << "}\n";
  return os.str();
}

Plane parse_plane(std::string_view text) {
  const json j = parse_json(text);
  if (!j.is_object()) fail("", "expected an object");
  check_header(j, "", true);
  return read_plane_object(j, "", {"format_version", "units", "normal", "offset"});
}

std::string write_case(const synth::DeformityCase& c) {
  json out = {{"format_version", kFormatVersion},
              {"units", "mm"},
              {"spec", spec_json(c.spec)},
              {"noise_seed", c.noise_seed},
              {"noise_sd", c.noise_sd},
              {"ground_truth_plane", plane_json(c.ground_truth_plane)},
              {"ground_truth_set", set_body(c.ground_truth_set)},
              {"deformed_set", set_body(c.deformed_set)}};
  return out.dump(2) + "\n";
}

synth::DeformityCase parse_case(std::string_view text) {
  const json j = parse_json(text);
  expect_object(j, "", {"format_version", "units", "spec", "noise_seed", "noise_sd", "ground_truth_plane",
                        "ground_truth_set", "deformed_set"});
  check_header(j, "", true);
  synth::DeformityCase c;
  c.spec = read_spec(require(j, "spec", ""), "spec");
  c.noise_seed = as_u64(require(j, "noise_seed", ""), "noise_seed");
  c.noise_sd = number_field(j, "noise_sd", "");
  c.ground_truth_plane = read_plane_object(require(j, "ground_truth_plane", ""), "ground_truth_plane",
                                           {"normal", "offset"});
  c.ground_truth_set = read_set_object(require(j, "ground_truth_set", ""), "ground_truth_set");
  c.deformed_set = read_set_object(require(j, "deformed_set", ""), "deformed_set");
  return c;
}

Plane parse_ground_truth(std::string_view text) {
  const json j = parse_json(text);
  if (j.is_object() && j.contains("ground_truth_plane")) return parse_case(text).ground_truth_plane;
  return parse_plane(text);
}

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buffer[17];
  std::snprintf(buffer, sizeof buffer, "%016" PRIx64, h);
  return buffer;
}

RunReport make_report(const PipelineResult& result, const PipelineOptions& options, std::string_view input_text,
                      const std::optional<synth::ValidationMetrics>& metrics) {
  RunReport r;
  r.input_digest = fnv1a_hex(input_text);
  r.drop_outliers = options.drop_outliers;
  r.min_points = options.min_points;
  r.severity = result.severity;
  r.mean_t = result.mean_t;
  r.elimination_order = result.trace.elimination_order;
  for (std::size_t k = 0; k < result.trace.stage_tscores.size(); ++k) {
    r.stages.push_back({k, result.trace.stage_systems[k].point_count(), result.trace.stage_tscores[k].scores});
  }
  if (result.selection) {
    r.stage_stats = result.selection->stage_stats;
    r.selected_stage = result.selection->selected_stage;
  }
  r.dropped_outliers = result.dropped_outliers;
  r.plane = result.plane;
  r.initial_plane = result.fit.initial_plane;
  const FitDiagnostics& d = result.fit.diagnostics;
  r.fit = {options.fit.gamma, d.iterations, d.initial_objective, d.final_objective,
           d.gradient_norm,   d.converged, std::string(to_string(d.stop_reason))};
  r.metrics = metrics;
  r.warnings = result.warnings;
  return r;
}

std::string write_report(const RunReport& r) {
  json out = {{"format_version", kFormatVersion}, {"input_digest", r.input_digest}};
  out["options"] = {{"drop_outliers", r.drop_outliers}, {"min_points", r.min_points}, {"gamma", r.fit.gamma}};
  out["severity"] = to_string(r.severity);
  out["mean_t"] = r.mean_t;
  out["elimination_order"] = json::array();
  for (const auto& u : r.elimination_order) out["elimination_order"].push_back(unit_json(u));
  out["stages"] = json::array();
  for (const auto& s : r.stages) {
    json scores = json::array();
    for (const auto& u : s.scores) {
      json entry = unit_json(u.unit);
      entry["t"] = u.t;
      scores.push_back(entry);
    }
    out["stages"].push_back({{"index", s.index}, {"point_count", s.point_count}, {"scores", scores}});
  }
  out["stage_stats"] = json::array();
  for (const auto& s : r.stage_stats) {
    out["stage_stats"].push_back(
        {{"stage", s.stage_index}, {"mean", s.mean}, {"variance", s.variance}, {"skewness", s.skewness}});
  }
  out["selected_stage"] = r.selected_stage ? json(*r.selected_stage) : json(nullptr);
  out["dropped_outliers"] = json::array();
  for (const auto& u : r.dropped_outliers) out["dropped_outliers"].push_back(unit_json(u));
  out["plane"] = plane_json(r.plane);
  out["initial_plane"] = plane_json(r.initial_plane);
  out["fit"] = {{"iterations", r.fit.iterations},
                {"initial_objective", r.fit.initial_objective},
                {"final_objective", r.fit.final_objective},
                {"gradient_norm", r.fit.gradient_norm},
                {"converged", r.fit.converged},
                {"stop_reason", r.fit.stop_reason}};
  out["metrics"] = optional_metrics_json(r.metrics);
  out["warnings"] = r.warnings;
  return out.dump(2) + "\n";
}

RunReport parse_report(std::string_view text) {
  const json j = parse_json(text);
  expect_object(j, "", {"format_version", "input_digest", "options", "severity", "mean_t", "elimination_order",
                        "stages", "stage_stats", "selected_stage", "dropped_outliers", "plane", "initial_plane",
                        "fit", "metrics", "warnings"});
  check_header(j, "", false);

  RunReport r;
  r.input_digest = string_field(j, "input_digest", "");
  const json& options = require(j, "options", "");
  expect_object(options, "options", {"drop_outliers", "min_points", "gamma"});
  r.drop_outliers = as_bool(require(options, "drop_outliers", "options"), "options.drop_outliers");
  r.min_points = as_u64(require(options, "min_points", "options"), "options.min_points");
  r.fit.gamma = number_field(options, "gamma", "options");
  r.severity = read_severity(require(j, "severity", ""), "severity");
  r.mean_t = number_field(j, "mean_t", "");
  r.elimination_order = read_units(j, "elimination_order", "");

  const json& stages = require_array(j, "stages", "");
  for (std::size_t k = 0; k < stages.size(); ++k) {
    const std::string p = element("stages", k);
    expect_object(stages[k], p, {"index", "point_count", "scores"});
    ReportStage s;
    s.index = as_u64(require(stages[k], "index", p), child(p, "index"));
    s.point_count = as_u64(require(stages[k], "point_count", p), child(p, "point_count"));
    const json& scores = require_array(stages[k], "scores", p);
    for (std::size_t i = 0; i < scores.size(); ++i) {
      const std::string sp = element(child(p, "scores"), i);
      UnitScore u;
      u.unit = read_unit(scores[i], sp, true);
      u.t = number_field(scores[i], "t", sp);
      s.scores.push_back(u);
    }
    r.stages.push_back(std::move(s));
  }

  const json& stats = require_array(j, "stage_stats", "");
  for (std::size_t k = 0; k < stats.size(); ++k) {
    const std::string p = element("stage_stats", k);
    expect_object(stats[k], p, {"stage", "mean", "variance", "skewness"});
    StageStats s;
    s.stage_index = as_u64(require(stats[k], "stage", p), child(p, "stage"));
    s.mean = number_field(stats[k], "mean", p);
    s.variance = number_field(stats[k], "variance", p);
    s.skewness = number_field(stats[k], "skewness", p);
    r.stage_stats.push_back(s);
  }

  const json& selected = require(j, "selected_stage", "");
  if (!selected.is_null()) r.selected_stage = as_u64(selected, "selected_stage");
  r.dropped_outliers = read_units(j, "dropped_outliers", "");
  r.plane = read_plane_object(require(j, "plane", ""), "plane", {"normal", "offset"});
  r.initial_plane = read_plane_object(require(j, "initial_plane", ""), "initial_plane", {"normal", "offset"});

  const json& fit = require(j, "fit", "");
  expect_object(fit, "fit",
                {"iterations", "initial_objective", "final_objective", "gradient_norm", "converged", "stop_reason"});
  r.fit.iterations = as_u64(require(fit, "iterations", "fit"), "fit.iterations");
  r.fit.initial_objective = number_field(fit, "initial_objective", "fit");
  r.fit.final_objective = number_field(fit, "final_objective", "fit");
  r.fit.gradient_norm = number_field(fit, "gradient_norm", "fit");
  r.fit.converged = as_bool(require(fit, "converged", "fit"), "fit.converged");
  r.fit.stop_reason = string_field(fit, "stop_reason", "fit");

  const json& metrics = require(j, "metrics", "");
  if (!metrics.is_null()) r.metrics = read_metrics(metrics, "metrics");
  r.warnings = read_strings(j, "warnings", "");
  return r;
}

std::string write_benchmark_report(const synth::BenchmarkReport& report) {
  json rows = json::array();
  for (const auto& row : report.rows) {
    rows.push_back({{"subject", row.subject},
                    {"spec", spec_json(row.spec)},
                    {"noise_seed", row.noise_seed},
                    {"mean_t", row.mean_t},
                    {"severity", to_string(row.severity)},
                    {"dropped", row.dropped},
                    {"metrics", optional_metrics_json(row.metrics)},
                    {"no_drop_metrics", optional_metrics_json(row.no_drop_metrics)},
                    {"warnings", row.warnings},
                    {"error", row.error}});
  }
  json out = {{"format_version", kFormatVersion}, {"all_pass", report.all_pass()}, {"rows", rows}};
  return out.dump(2) + "\n";
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path.string() + "' for reading");
  std::ostringstream os;
  os << in.rdbuf();
  if (in.bad()) throw InputError("error reading '" + path.string() + "'");
  return os.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot open '" + path.string() + "' for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw InputError("error writing '" + path.string() + "'");
}

}  // namespace lager::io
