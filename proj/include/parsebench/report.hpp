#pragma once

// Text, JSON and CSV renderings of the score and verification reports.
// TEDS is shown as a percentage with 2 decimals, AP/mAP as fractions with 4
// decimals, in the column layouts of the competition leaderboards.

#include <algorithm>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "parsebench/corpus_io.hpp"
#include "parsebench/layout_map.hpp"
#include "parsebench/teds.hpp"

namespace parsebench {

inline std::string fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

inline std::string percent(const std::optional<double>& v) {
  return v ? fixed(*v * 100.0, 2) : "n/a";
}

inline std::string fraction(const std::optional<double>& v) {
  return v ? fixed(*v, 4) : "n/a";
}

namespace detail {

inline nlohmann::json optional_json(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// TEDS

inline std::string teds_text(const TedsReport& r, const TedsOptions& opts) {
  std::size_t failed = 0;
  for (const auto& [id, s] : r.per_sample) failed += s.error ? 1 : 0;
  std::string out = "TEDS over " + std::to_string(r.all.count) + " samples";
  if (!opts.ignored_styles.empty()) {
    out += " (ignored styles: " + opts.ignored_styles.to_string() + ")";
  }
  if (opts.structure_only) out += " (structure only)";
  out += "\n";
  out += "Simple: " + percent(r.simple.mean) + " (n=" + std::to_string(r.simple.count) + ")\n";
  out += "Complex: " + percent(r.complex.mean) + " (n=" + std::to_string(r.complex.count) + ")\n";
  out += "All: " + percent(r.all.mean) + " (n=" + std::to_string(r.all.count) + ")\n";
  if (failed > 0) {
    out += std::to_string(failed) + " samples scored 0 (missing or unparseable)\n";
  }
  return out;
}

inline std::string teds_csv(const TedsReport& r) {
  std::string out = "id,complexity,teds,error\n";
  for (const auto& [id, s] : r.per_sample) {
    out += detail::csv_field(id) + ',' + std::string(complexity_name(s.complexity)) +
           ',' + fixed(s.score, 4) + ',' + detail::csv_field(s.error.value_or("")) + '\n';
  }
  return out;
}

inline nlohmann::json teds_json(const TedsReport& r, const TedsOptions& opts) {
  using nlohmann::json;
  json samples = json::array();
  for (const auto& [id, s] : r.per_sample) {
    json item = {{"id", id},
                 {"complexity", complexity_name(s.complexity)},
                 {"teds", s.score}};
    if (s.error) item["error"] = *s.error;
    samples.push_back(std::move(item));
  }
  auto summary = [](const ClassSummary& c) {
    return json{{"count", c.count}, {"mean", detail::optional_json(c.mean)}};
  };
  return json{{"metric", "teds"},
              {"ignored_styles", opts.ignored_styles.to_string()},
              {"structure_only", opts.structure_only},
              {"simple", summary(r.simple)},
              {"complex", summary(r.complex)},
              {"all", summary(r.all)},
              {"warnings", r.warnings},
              {"samples", std::move(samples)}};
}

// ---------------------------------------------------------------------------
// Layout mAP

inline std::string layout_header_row(const std::string& first_col) {
  std::string out = detail::pad(first_col, 10);
  for (auto name : kCategoryNames) out += detail::pad(std::string(name), 8);
  return out + "Overall\n";
}

inline std::string layout_text(const LayoutReport& r, bool per_threshold) {
  std::string out = "mAP@IoU[0.50:0.95] over " + std::to_string(r.num_images) +
                    " images, " + std::to_string(r.num_gt_boxes) + " boxes, " +
                    std::to_string(r.num_detections) + " detections\n";
  out += layout_header_row("");
  std::string row = detail::pad("", 10);
  for (const auto& ap : r.per_category_ap) row += detail::pad(fraction(ap), 8);
  out += row + fixed(r.overall_map, 4) + "\n";
  if (per_threshold) {
    out += "\n" + layout_header_row("IoU");
    for (std::size_t t = 0; t < kNumThresholds; ++t) {
      std::string line = detail::pad(fixed(r.thresholds[t], 2), 10);
      for (const auto& ap : r.per_threshold_ap[t]) line += detail::pad(fraction(ap), 8);
      out += line + fraction(r.per_threshold_map[t]) + "\n";
    }
  }
  return out;
}

inline std::string layout_csv(const LayoutReport& r, bool per_threshold) {
  std::string out = "iou";
  for (auto name : kCategoryNames) out += "," + std::string(name);
  out += ",Overall\n";
  out += "0.50:0.95";
  for (const auto& ap : r.per_category_ap) out += "," + fraction(ap);
  out += "," + fixed(r.overall_map, 4) + "\n";
  if (per_threshold) {
    for (std::size_t t = 0; t < kNumThresholds; ++t) {
      out += fixed(r.thresholds[t], 2);
      for (const auto& ap : r.per_threshold_ap[t]) out += "," + fraction(ap);
      out += "," + fraction(r.per_threshold_map[t]) + "\n";
    }
  }
  return out;
}

inline nlohmann::json layout_json(const LayoutReport& r) {
  using nlohmann::json;
  json per_category = json::object();
  for (std::size_t c = 0; c < kCategoryNames.size(); ++c) {
    per_category[std::string(kCategoryNames[c])] =
        detail::optional_json(r.per_category_ap[c]);
  }
  json sweep = json::array();
  for (std::size_t t = 0; t < kNumThresholds; ++t) {
    json row = {{"iou", r.thresholds[t]}, {"map", detail::optional_json(r.per_threshold_map[t])}};
    for (std::size_t c = 0; c < kCategoryNames.size(); ++c) {
      row[std::string(kCategoryNames[c])] = detail::optional_json(r.per_threshold_ap[t][c]);
    }
    sweep.push_back(std::move(row));
  }
  return json{{"metric", "map@iou[0.50:0.95]"},
              {"overall", r.overall_map},
              {"per_category", std::move(per_category)},
              {"per_threshold", std::move(sweep)},
              {"images", r.num_images},
              {"ground_truth_boxes", r.num_gt_boxes},
              {"detections", r.num_detections},
              {"warnings", r.warnings}};
}

// ---------------------------------------------------------------------------
// Verification

inline std::string verification_text(const VerificationReport& r) {
  std::string out = std::string(r.passed() ? "PASS" : "FAIL") + " " + r.path + " (" +
                    std::string(task_name(r.task)) + ", " +
                    std::string(phase_name(r.phase)) + "): " +
                    std::to_string(r.records) + " records, " +
                    std::to_string(r.expected) + " expected ids, " +
                    std::to_string(r.violations.size()) +
                    (r.violations.size() == 1 ? " violation\n" : " violations\n");
  for (const auto& v : r.violations) {
    out += "  " + std::string(violation_kind_name(v.kind));
    if (!v.location.empty()) out += " at " + v.location;
    if (!v.id.empty()) out += " [" + v.id + "]";
    out += ": " + v.message + "\n";
  }
  return out;
}

inline nlohmann::json verification_json(const VerificationReport& r) {
  using nlohmann::json;
  json items = json::array();
  for (const auto& v : r.violations) {
    items.push_back({{"kind", violation_kind_name(v.kind)},
                     {"location", v.location},
                     {"id", v.id},
                     {"message", v.message}});
  }
  return json{{"verdict", r.passed() ? "PASS" : "FAIL"},
              {"path", r.path},
              {"task", task_name(r.task)},
              {"phase", phase_name(r.phase)},
              {"records", r.records},
              {"expected_ids", r.expected},
              {"violations", std::move(items)}};
}

// ---------------------------------------------------------------------------
// Leaderboards

struct LeaderboardRow {
  std::string name;
  std::vector<std::optional<double>> values;
  double key = 0.0;  // sort key, descending
};

inline void sort_leaderboard(std::vector<LeaderboardRow>& rows) {
  std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    if (a.key != b.key) return a.key > b.key;
    return a.name < b.name;
  });
}

// `as_percent` selects the TEDS rendering; otherwise 4-decimal fractions.
inline std::string leaderboard_text(const std::vector<std::string>& columns,
                                    const std::vector<LeaderboardRow>& rows,
                                    bool as_percent) {
  std::size_t width = 10;
  for (const auto& r : rows) width = std::max(width, r.name.size() + 2);
  std::string out = detail::pad("Team Name", width);
  for (const auto& c : columns) out += detail::pad(c, 14);
  out.erase(out.find_last_not_of(' ') + 1);
  out += "\n";
  for (const auto& r : rows) {
    std::string line = detail::pad(r.name, width);
    for (const auto& v : r.values) {
      line += detail::pad(as_percent ? percent(v) : fraction(v), 14);
    }
    line.erase(line.find_last_not_of(' ') + 1);
    out += line + "\n";
  }
  return out;
}

inline std::string leaderboard_csv(const std::vector<std::string>& columns,
                                   const std::vector<LeaderboardRow>& rows,
                                   bool as_percent) {
  std::string out = "team";
  for (const auto& c : columns) out += "," + detail::csv_field(c);
  out += "\n";
  for (const auto& r : rows) {
    out += detail::csv_field(r.name);
    for (const auto& v : r.values) out += "," + (as_percent ? percent(v) : fraction(v));
    out += "\n";
  }
  return out;
}

inline nlohmann::json leaderboard_json(const std::vector<std::string>& columns,
                                       const std::vector<LeaderboardRow>& rows) {
  using nlohmann::json;
  json out = json::array();
  std::size_t rank = 0;
  for (const auto& r : rows) {
    json item = {{"rank", ++rank}, {"team", r.name}};
    for (std::size_t c = 0; c < columns.size(); ++c) {
      item[columns[c]] = detail::optional_json(r.values[c]);
    }
    out.push_back(std::move(item));
  }
  return out;
}

}  // namespace parsebench
