#include "cli.hpp"

#include <algorithm>
#include <filesystem>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lager/catalog.hpp"
#include "lager/io.hpp"
#include "lager/pipeline.hpp"
#include "lager/synth.hpp"

namespace lager::cli {
namespace {

namespace fs = std::filesystem;

constexpr std::string_view kCaseSuffix = ".case.json";
constexpr std::string_view kLandmarkSuffix = ".landmarks.json";

struct FitFlags {
  double gamma = 480.0;
  std::size_t min_points = kDefaultMinPoints;
  bool no_drop = false;
};

void add_fit_flags(CLI::App* cmd, FitFlags& flags) {
  cmd->add_option("--gamma", flags.gamma, "Weight of the pair-angle term")->capture_default_str();
  cmd->add_option("--min-points", flags.min_points, "Stop ranking before fewer points than this remain")
      ->capture_default_str();
  cmd->add_flag("--no-drop", flags.no_drop, "Keep every landmark at weight 1");
}

PipelineOptions pipeline_options(const FitFlags& flags) {
  PipelineOptions options;
  options.fit.gamma = flags.gamma;
  options.min_points = flags.min_points;
  options.drop_outliers = !flags.no_drop;
  return options;
}

std::string unit_label(const DroppableUnit& unit) {
  return unit.kind == DroppableUnit::Kind::Pair ? unit.name + "(R/L)" : unit.name;
}

std::string join_units(const std::vector<DroppableUnit>& units) {
  if (units.empty()) return "none";
  std::string s;
  for (const auto& u : units) s += (s.empty() ? "" : ", ") + unit_label(u);
  return s;
}

void print_warnings(const std::vector<std::string>& warnings, std::ostream& err) {
  for (const auto& w : warnings) err << "warning: " << w << "\n";
}

// Non-convergence counts as a numerical failure.
void require_converged(const PipelineResult& result) {
  const auto& d = result.fit.diagnostics;
  if (!d.converged) {
    std::ostringstream os;
    os << "plane fit did not converge (" << to_string(d.stop_reason) << " after " << d.iterations
       << " iterations, gradient " << d.gradient_norm << ")";
    throw NumericalError(os.str());
  }
}

void print_fit_summary(const PipelineResult& r, std::ostream& out) {
  const auto& n = r.plane.normal();
  out << std::setprecision(17) << "plane: normal " << n.x() << " " << n.y() << " " << n.z() << " offset "
      << r.plane.offset() << "\n";
  out << std::setprecision(6) << "severity: " << to_string(r.severity) << " (mean T " << r.mean_t << ")\n";
  if (r.selection) out << "selected stage: " << r.selection->selected_stage << "\n";
  out << "dropped outliers: " << join_units(r.dropped_outliers) << "\n";
  const auto& d = r.fit.diagnostics;
  out << "fit: " << d.iterations << " iterations, objective " << d.initial_objective << " -> " << d.final_objective
      << ", " << to_string(d.stop_reason) << "\n";
}

void print_metrics(const synth::ValidationMetrics& m, std::ostream& out) {
  out << std::fixed << std::setprecision(3) << "theta " << m.theta << " deg, DistN " << m.dist_n << " mm, DistU1 "
      << m.dist_u1 << " mm, DistPg " << m.dist_pg << " mm: " << (m.pass ? "pass" : "fail") << "\n";
  out.unsetf(std::ios::floatfield);
}

struct FitOutputs {
  std::string plane_out;
  std::string report_out;
  bool json = false;
};

void add_output_flags(CLI::App* cmd, FitOutputs& outputs) {
  cmd->add_option("--plane-out", outputs.plane_out, "Write the fitted plane document here");
  cmd->add_option("--report-out", outputs.report_out, "Write the run report here");
  cmd->add_flag("--json", outputs.json, "Print the run report instead of the summary");
}

void emit(const PipelineResult& result, const PipelineOptions& options, const std::string& input_text,
          const std::optional<synth::ValidationMetrics>& metrics, const FitOutputs& outputs, std::ostream& out) {
  const io::RunReport report = io::make_report(result, options, input_text, metrics);
  if (!outputs.plane_out.empty()) io::write_text_file(outputs.plane_out, io::write_plane(result.plane));
  if (!outputs.report_out.empty()) io::write_text_file(outputs.report_out, io::write_report(report));
  if (outputs.json) {
    out << io::write_report(report);
    return;
  }
  print_fit_summary(result, out);
  if (metrics) print_metrics(*metrics, out);
}

int run_rank(const std::string& path, std::size_t min_points, std::ostream& out) {
  const LandmarkSet set = io::parse_landmark_file(io::read_text_file(path));
  const AsymmetryTrace trace = rank_landmarks(set, min_points);
  const TScores& first = trace.stage_tscores.front();
  out << "severity: " << to_string(classify_mean_t(first.mean())) << " (mean T " << first.mean() << ")\n";
  out << std::left << std::setw(7) << "stage" << std::setw(12) << "removed" << std::setw(8) << "points"
      << std::setw(14) << "T(removed)"
      << "mean T\n";
  for (std::size_t k = 0; k < trace.stage_tscores.size(); ++k) {
    const TScores& scores = trace.stage_tscores[k];
    out << std::setw(7) << k;
    if (k < trace.elimination_order.size()) {
      const DroppableUnit& unit = trace.elimination_order[k];
      out << std::setw(12) << unit_label(unit) << std::setw(8) << trace.stage_systems[k].point_count()
          << std::setw(14) << scores.find(unit.name)->t;
    } else {
      out << std::setw(12) << "-" << std::setw(8) << trace.stage_systems[k].point_count() << std::setw(14) << "-";
    }
    out << scores.mean() << "\n";
  }
  out << std::right;
  return kExitOk;
}

int run_fit(const std::string& path, const FitFlags& flags, const FitOutputs& outputs, std::ostream& out,
            std::ostream& err) {
  const std::string text = io::read_text_file(path);
  const LandmarkSet set = io::parse_landmark_file(text);
  const PipelineOptions options = pipeline_options(flags);
  const PipelineResult result = lager_pipeline(set, options);
  require_converged(result);
  emit(result, options, text, std::nullopt, outputs, out);
  print_warnings(result.warnings, err);
  return kExitOk;
}

int run_pipeline(const std::string& path, const std::string& truth_path, const FitFlags& flags,
                 const FitOutputs& outputs, std::ostream& out, std::ostream& err) {
  const std::string text = io::read_text_file(path);
  const LandmarkSet set = io::parse_landmark_file(text);
  const std::string truth_text = io::read_text_file(truth_path);
  const Plane truth = io::parse_ground_truth(truth_text);
  // A case document carries its symmetric model; for a bare plane the
  // input set mirrored about the ground truth stands in for it.
  LandmarkSet reference;
  try {
    reference = io::parse_case(truth_text).ground_truth_set;
  } catch (const io::FormatError&) {
    reference = synth::symmetrize(set, truth);
  }

  const PipelineOptions options = pipeline_options(flags);
  const PipelineResult result = lager_pipeline(set, options);
  require_converged(result);
  emit(result, options, text, synth::outcome_metrics(result.plane, truth, reference), outputs, out);
  print_warnings(result.warnings, err);
  return kExitOk;
}

struct SynthFlags {
  std::size_t subjects = 5;
  std::vector<std::string> kinds;
  double noise_sd = 3.0;
  std::uint64_t seed = 20180611;
  std::string side = "right";
  std::optional<double> magnitude;
  std::string out_dir;
};

std::string case_stem(std::size_t subject, const synth::DeformitySpec& spec) {
  std::ostringstream os;
  os << "s" << std::setw(2) << std::setfill('0') << subject << "_" << synth::to_string(spec.kind) << "_"
     << (spec.side == Side::Left ? "left" : "right");
  return os.str();
}

int run_synth(const SynthFlags& flags, std::ostream& out) {
  const Side side = flags.side == "left" ? Side::Left : Side::Right;
  synth::BenchmarkConfig config;
  config.n_subjects = flags.subjects;
  config.noise_sd = flags.noise_sd;
  config.seed = flags.seed;
  std::vector<std::string> kinds = flags.kinds;
  if (kinds.empty()) {
    for (auto kind : synth::all_deformity_kinds()) kinds.emplace_back(synth::to_string(kind));
  }
  for (const auto& name : kinds) {
    const auto kind = synth::parse_deformity_kind(name);
    if (!kind) throw InputError("unknown deformity kind '" + name + "'");
    synth::DeformitySpec spec = synth::default_deformity(*kind, side);
    if (flags.magnitude) spec.magnitude = *flags.magnitude;
    config.templates.push_back(spec);
  }

  const auto cases = synth::generate_cases(config);
  std::error_code ec;
  fs::create_directories(flags.out_dir, ec);
  if (ec) throw InputError("cannot create '" + flags.out_dir + "': " + ec.message());
  const std::size_t per_subject = config.templates.size();
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const std::string stem = case_stem(i / per_subject + 1, cases[i].spec);
    const fs::path dir(flags.out_dir);
    io::write_text_file(dir / (stem + std::string(kCaseSuffix)), io::write_case(cases[i]));
    io::write_text_file(dir / (stem + std::string(kLandmarkSuffix)), io::write_landmark_file(cases[i].deformed_set));
  }
  out << "wrote " << cases.size() << " cases to " << flags.out_dir << "\n";
  return kExitOk;
}

void print_validation_table(const std::vector<std::string>& names, const synth::BenchmarkReport& report,
                            std::ostream& out) {
  std::size_t width = 4;
  for (const auto& n : names) width = std::max(width, n.size());
  out << std::left << std::setw(static_cast<int>(width) + 2) << "case" << std::right << std::setw(8) << "meanT"
      << std::setw(6) << "drop" << std::setw(8) << "theta" << std::setw(8) << "DistN" << std::setw(8) << "DistU1"
      << std::setw(8) << "DistPg" << std::setw(6) << "pass" << std::setw(12) << "theta(all)" << "\n";
  std::size_t passed = 0;
  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    const auto& row = report.rows[i];
    out << std::left << std::setw(static_cast<int>(width) + 2) << names[i] << std::right;
    if (!row.error.empty()) {
      out << "error: " << row.error << "\n";
      continue;
    }
    const auto& m = *row.metrics;
    passed += m.pass ? 1 : 0;
    out << std::fixed << std::setprecision(4) << std::setw(8) << row.mean_t << std::setw(6) << row.dropped
        << std::setprecision(3) << std::setw(8) << m.theta << std::setw(8) << m.dist_n << std::setw(8) << m.dist_u1
        << std::setw(8) << m.dist_pg << std::setw(6) << (m.pass ? "yes" : "no") << std::setw(12)
        << row.no_drop_metrics->theta << "\n";
  }
  out.unsetf(std::ios::floatfield);
  out << passed << "/" << report.rows.size() << " cases meet the clinical criteria\n";
}

int run_validate(const std::string& dir, const FitFlags& flags, const std::string& json_out, std::ostream& out,
                 std::ostream& err) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw InputError("'" + dir + "' is not a directory");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (entry.is_regular_file() && name.size() > kCaseSuffix.size() && name.ends_with(kCaseSuffix)) {
      files.push_back(entry.path());
    }
  }
  if (files.empty()) throw InputError("no *" + std::string(kCaseSuffix) + " files in '" + dir + "'");
  std::sort(files.begin(), files.end());

  const PipelineOptions options = pipeline_options(flags);
  synth::BenchmarkReport report;
  std::vector<std::string> names;
  for (const auto& file : files) {
    synth::DeformityCase c;
    try {
      c = io::parse_case(io::read_text_file(file));
    } catch (const InputError& e) {
      throw InputError(file.string() + ": " + e.what());
    }
    std::string name = file.filename().string();
    name.resize(name.size() - kCaseSuffix.size());
    names.push_back(name);
    report.rows.push_back(synth::evaluate_case(c, options));
    report.rows.back().subject = names.size();
    for (const auto& w : report.rows.back().warnings) err << "warning: " << name << ": " << w << "\n";
  }
  print_validation_table(names, report, out);
  if (!json_out.empty()) io::write_text_file(json_out, io::write_benchmark_report(report));
  return kExitOk;
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Midsagittal plane estimation from 3D cephalometric landmarks", "lager"};
  app.require_subcommand(1);

  std::string landmarks;
  std::size_t rank_min_points = kDefaultMinPoints;
  auto* rank = app.add_subcommand("rank", "Rank landmarks by asymmetry and classify severity");
  rank->add_option("landmarks", landmarks, "Landmark file")->required();
  rank->add_option("--min-points", rank_min_points, "Stop ranking before fewer points than this remain")
      ->capture_default_str();

  FitFlags fit_flags;
  FitOutputs fit_outputs;
  auto* fit = app.add_subcommand("fit", "Estimate the midsagittal plane");
  fit->add_option("landmarks", landmarks, "Landmark file")->required();
  add_fit_flags(fit, fit_flags);
  add_output_flags(fit, fit_outputs);

  std::string truth;
  auto* pipeline = app.add_subcommand("pipeline", "Estimate the plane and score it against a ground truth");
  pipeline->add_option("landmarks", landmarks, "Landmark file")->required();
  pipeline->add_option("--ground-truth", truth, "Plane or case document")->required();
  add_fit_flags(pipeline, fit_flags);
  add_output_flags(pipeline, fit_outputs);

  SynthFlags synth_flags;
  auto* synth_cmd = app.add_subcommand("synth", "Write synthetic deformity cases");
  synth_cmd->add_option("--subjects", synth_flags.subjects, "Number of symmetric base subjects")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  synth_cmd->add_option("--kinds", synth_flags.kinds, "Deformity kinds (hch, vch, type1, type2 or full names)")
      ->delimiter(',');
  synth_cmd->add_option("--noise-sd", synth_flags.noise_sd, "Noise standard deviation per coordinate, mm")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  synth_cmd->add_option("--seed", synth_flags.seed, "Run seed")->capture_default_str();
  synth_cmd->add_option("--side", synth_flags.side, "Affected side")
      ->capture_default_str()
      ->check(CLI::IsMember({"left", "right"}));
  synth_cmd->add_option("--magnitude", synth_flags.magnitude, "Override the default magnitude, mm")
      ->check(CLI::NonNegativeNumber);
  synth_cmd->add_option("--out", synth_flags.out_dir, "Output directory")->required();

  std::string case_dir;
  std::string json_out;
  auto* validate = app.add_subcommand("validate", "Run every case in a directory and tabulate the outcome");
  validate->add_option("case-dir", case_dir, "Directory written by `synth`")->required();
  validate->add_option("--json", json_out, "Also write the table as a JSON report");
  add_fit_flags(validate, fit_flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInputError;
  }

  try {
    if (rank->parsed()) return run_rank(landmarks, rank_min_points, out);
    if (fit->parsed()) return run_fit(landmarks, fit_flags, fit_outputs, out, err);
    if (pipeline->parsed()) return run_pipeline(landmarks, truth, fit_flags, fit_outputs, out, err);
    if (synth_cmd->parsed()) return run_synth(synth_flags, out);
    if (validate->parsed()) return run_validate(case_dir, fit_flags, json_out, out, err);
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << "\n";
    return kExitNumericalError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitNumericalError;
  }
  return kExitInputError;
}

}  // namespace lager::cli
