#pragma once

// Command-line front end. Exit codes: 0 success / PASS, 1 verification
// FAIL, 2 usage, I/O or corpus errors.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "parsebench/corpus_io.hpp"
#include "parsebench/layout_map.hpp"
#include "parsebench/report.hpp"
#include "parsebench/teds.hpp"

namespace parsebench::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitError = 2;

inline constexpr const char* kWorkersEnv = "PARSEBENCH_WORKERS";

enum class OutputFormat { Text, Json, Csv };

struct RunConfig {
  std::string command;
  std::string gt_path;
  std::string pred_path;
  std::vector<std::string> submissions;  // rank: [name=]path
  std::string task = "table";
  std::string phase = "format-verification";
  std::string ignore_styles;
  bool ignore_bold = false;
  bool structure_only = false;
  bool strict_ids = false;
  bool per_threshold = false;
  bool json = false;
  bool csv = false;
  std::size_t workers = 1;

  OutputFormat format() const {
    if (json) return OutputFormat::Json;
    if (csv) return OutputFormat::Csv;
    return OutputFormat::Text;
  }

  TedsOptions teds_options() const {
    TedsOptions opts;
    opts.ignored_styles = StyleSet::parse(ignore_styles);
    if (ignore_bold) opts.ignored_styles.insert(StyleTag::Bold);
    opts.structure_only = structure_only;
    return opts;
  }
};

inline std::size_t default_workers() {
  if (const char* env = std::getenv(kWorkersEnv)) {
    try {
      const long v = std::stol(env);
      if (v >= 1) return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
    }
  }
  return 1;
}

namespace detail {

struct Submission {
  std::string name;
  std::string path;
};

inline Submission parse_submission(const std::string& arg) {
  const auto eq = arg.find('=');
  if (eq != std::string::npos && eq > 0) return {arg.substr(0, eq), arg.substr(eq + 1)};
  return {std::filesystem::path(arg).stem().string(), arg};
}

inline int cmd_teds(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const TedsOptions opts = cfg.teds_options();
  const TableCorpus gt = load_table_gt(cfg.gt_path);
  const TablePredictions pred = load_table_results(cfg.pred_path);
  const TedsReport report =
      batch_teds(gt, pred, opts, BatchOptions{cfg.workers, cfg.strict_ids});
  for (const auto& w : report.warnings) err << "warning: " << w << "\n";
  switch (cfg.format()) {
    case OutputFormat::Json: out << teds_json(report, opts).dump(2) << "\n"; break;
    case OutputFormat::Csv: out << teds_csv(report); break;
    case OutputFormat::Text: out << teds_text(report, opts); break;
  }
  return kExitOk;
}

inline int cmd_layout(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const LayoutGroundTruth gt = load_layout_gt(cfg.gt_path);
  const std::vector<Detection> dets = load_layout_results(cfg.pred_path);
  const LayoutReport report = mean_ap(dets, gt, LayoutOptions{cfg.strict_ids});
  for (const auto& w : report.warnings) err << "warning: " << w << "\n";
  switch (cfg.format()) {
    case OutputFormat::Json: out << layout_json(report).dump(2) << "\n"; break;
    case OutputFormat::Csv: out << layout_csv(report, cfg.per_threshold); break;
    case OutputFormat::Text: out << layout_text(report, cfg.per_threshold); break;
  }
  return kExitOk;
}

inline int cmd_verify(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  const auto phase = parse_phase(cfg.phase);
  const auto task = parse_task(cfg.task);
  if (!phase || !task) throw std::invalid_argument("bad --phase or --task");
  const PhaseSpec spec = *task == Task::TableRecognition
                             ? PhaseSpec::for_tables(*phase, load_table_gt(cfg.gt_path))
                             : PhaseSpec::for_layout(*phase, load_layout_gt(cfg.gt_path));
  const VerificationReport report = verify_format(cfg.pred_path, spec);
  if (cfg.json) {
    out << verification_json(report).dump(2) << "\n";
  } else {
    out << verification_text(report);
  }
  return report.passed() ? kExitOk : kExitFail;
}

inline int cmd_rank(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto task = parse_task(cfg.task);
  if (!task) throw std::invalid_argument("bad --task");
  std::vector<std::string> columns;
  std::vector<LeaderboardRow> rows;
  const bool tables = *task == Task::TableRecognition;
  if (tables) {
    columns = {"TEDS Simple", "TEDS Complex", "TEDS all"};
    const TedsOptions opts = cfg.teds_options();
    const TableCorpus gt = load_table_gt(cfg.gt_path);
    for (const auto& arg : cfg.submissions) {
      const auto sub = parse_submission(arg);
      const TedsReport r = batch_teds(gt, load_table_results(sub.path), opts,
                                      BatchOptions{cfg.workers, cfg.strict_ids});
      for (const auto& w : r.warnings) err << "warning: " << sub.name << ": " << w << "\n";
      rows.push_back({sub.name, {r.simple.mean, r.complex.mean, r.all.mean},
                      r.all.mean.value_or(0.0)});
    }
  } else {
    for (auto name : kCategoryNames) columns.emplace_back(name);
    columns.emplace_back("Overall");
    const LayoutGroundTruth gt = load_layout_gt(cfg.gt_path);
    for (const auto& arg : cfg.submissions) {
      const auto sub = parse_submission(arg);
      const LayoutReport r =
          mean_ap(load_layout_results(sub.path), gt, LayoutOptions{cfg.strict_ids});
      for (const auto& w : r.warnings) err << "warning: " << sub.name << ": " << w << "\n";
      LeaderboardRow row{sub.name, {}, r.overall_map};
      row.values.assign(r.per_category_ap.begin(), r.per_category_ap.end());
      row.values.emplace_back(r.overall_map);
      rows.push_back(std::move(row));
    }
  }
  sort_leaderboard(rows);
  switch (cfg.format()) {
    case OutputFormat::Json: out << leaderboard_json(columns, rows).dump(2) << "\n"; break;
    case OutputFormat::Csv: out << leaderboard_csv(columns, rows, tables); break;
    case OutputFormat::Text: out << leaderboard_text(columns, rows, tables); break;
  }
  return kExitOk;
}

}  // namespace detail

// Parses argv and runs one command, writing results to `out` and
// diagnostics to `err`.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Scoring and submission checks for table recognition (TEDS) and "
               "layout detection (mAP)",
               "parsebench"};
  app.require_subcommand(1);
  app.fallthrough();

  RunConfig cfg;
  cfg.workers = default_workers();
  app.add_flag("--json", cfg.json, "Machine-readable JSON output");
  app.add_flag("--csv", cfg.csv, "CSV output (per-sample rows for score-teds)");
  app.add_option("--workers", cfg.workers,
                 std::string("Worker threads for batch scoring (default from ") +
                     kWorkersEnv + " or 1)")
      ->check(CLI::PositiveNumber);
  app.add_flag("--strict-ids", cfg.strict_ids,
               "Treat missing or unexpected ids as errors instead of scoring them 0");
  app.add_flag("--ignore-bold", cfg.ignore_bold, "Alias for --ignore-styles b");
  app.add_option("--ignore-styles", cfg.ignore_styles,
                 "Comma separated style tags to drop before scoring (b,i,strike,sup,sub)");
  app.add_flag("--per-threshold", cfg.per_threshold, "Print the IoU threshold sweep");
  app.add_flag("--structure-only", cfg.structure_only, "Ignore cell content in TEDS");

  auto* verify = app.add_subcommand("verify", "Check a results file against a phase");
  verify->add_option("--gt", cfg.gt_path, "Ground truth defining the phase's ids")->required();
  verify->add_option("--pred", cfg.pred_path, "Results file to check")->required();
  verify->add_option("--task", cfg.task, "table or layout")
      ->check(CLI::IsMember({"table", "layout"}));
  verify->add_option("--phase", cfg.phase, "Phase name")
      ->check(CLI::IsMember({"format-verification", "development", "final-evaluation"}));

  auto* teds_cmd = app.add_subcommand("score-teds", "Score table predictions with TEDS");
  teds_cmd->add_option("--gt", cfg.gt_path, "Table ground truth (JSONL)")->required();
  teds_cmd->add_option("--pred", cfg.pred_path, "Table predictions (JSONL)")->required();

  auto* layout_cmd = app.add_subcommand("score-layout", "Score layout detections with mAP");
  layout_cmd->add_option("--gt", cfg.gt_path, "COCO-style ground truth")->required();
  layout_cmd->add_option("--pred", cfg.pred_path, "Detection results (JSON array)")->required();

  auto* rank_cmd = app.add_subcommand("rank", "Rank several submissions into a leaderboard");
  rank_cmd->add_option("--gt", cfg.gt_path, "Ground truth")->required();
  rank_cmd->add_option("--task", cfg.task, "table or layout")
      ->check(CLI::IsMember({"table", "layout"}));
  rank_cmd->add_option("submissions", cfg.submissions, "[name=]path for each submission")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitError;
  }

  try {
    if (verify->parsed()) return detail::cmd_verify(cfg, out, err);
    if (teds_cmd->parsed()) return detail::cmd_teds(cfg, out, err);
    if (layout_cmd->parsed()) return detail::cmd_layout(cfg, out, err);
    if (rank_cmd->parsed()) return detail::cmd_rank(cfg, out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}

}  // namespace parsebench::cli
