#pragma once

// Loaders for table and layout corpora, and submission format verification.
//
// File formats:
//   table ground truth   JSONL, {"id", "html", "split"?, "complexity"?, "cells"?}
//   table predictions    JSONL, {"id", "html"}
//   layout ground truth  COCO-style JSON {"images", "annotations", "categories"?}
//   layout results       JSON array of {"image_id", "category_id", "bbox", "score"}
// bbox is [x, y, width, height] in pixels. Ids may be strings or
// non-negative integers and are compared as strings.

#include <cmath>
#include <cstddef>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "parsebench/errors.hpp"
#include "parsebench/layout_map.hpp"
#include "parsebench/records.hpp"
#include "parsebench/table_model.hpp"

namespace parsebench {

using json = nlohmann::json;

namespace detail {

inline std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  return in;
}

inline bool blank(std::string_view line) {
  return line.find_first_not_of(" \t\r\n") == std::string_view::npos;
}

// Streams a JSONL file, calling fn(line_number, text) for each non-blank line.
template <class Fn>
void for_each_line(const std::string& path, Fn&& fn) {
  auto in = open_input(path);
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (blank(line)) continue;
    fn(number, line);
  }
  if (in.bad()) throw IoError("read error on '" + path + "'");
}

inline json read_json_document(const std::string& path) {
  auto in = open_input(path);
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return json::parse(buf.str());
  } catch (const json::parse_error& e) {
    throw SchemaError("document", std::string("invalid JSON: ") + e.what());
  }
}

// Field validation shared by the loaders (which throw on the first problem)
// and verify_format (which collects every problem).
using Problem = std::optional<std::string>;

inline Problem read_id(const json& obj, const char* field, std::string& out) {
  const auto it = obj.find(field);
  if (it == obj.end()) return std::string("missing '") + field + "'";
  if (it->is_string()) {
    out = it->get<std::string>();
  } else if (it->is_number_unsigned() ||
             (it->is_number_integer() && it->get<std::int64_t>() >= 0)) {
    out = std::to_string(it->get<std::uint64_t>());
  } else {
    return std::string("'") + field + "' must be a string or non-negative integer";
  }
  return std::nullopt;
}

inline Problem read_string(const json& obj, const char* field, std::string& out) {
  const auto it = obj.find(field);
  if (it == obj.end()) return std::string("missing '") + field + "'";
  if (!it->is_string()) return std::string("'") + field + "' must be a string";
  out = it->get<std::string>();
  return std::nullopt;
}

inline Problem read_number(const json& obj, const char* field, double& out) {
  const auto it = obj.find(field);
  if (it == obj.end()) return std::string("missing '") + field + "'";
  if (!it->is_number()) return std::string("'") + field + "' must be a number";
  out = it->get<double>();
  if (!std::isfinite(out)) return std::string("'") + field + "' must be finite";
  return std::nullopt;
}

inline Problem read_bbox(const json& obj, BoundingBox& out) {
  const auto it = obj.find("bbox");
  if (it == obj.end()) return std::string("missing 'bbox'");
  if (!it->is_array() || it->size() != 4) {
    return std::string("'bbox' must be an array [x, y, width, height]");
  }
  double v[4];
  for (std::size_t k = 0; k < 4; ++k) {
    if (!(*it)[k].is_number()) return std::string("'bbox' entries must be numbers");
    v[k] = (*it)[k].get<double>();
    if (!std::isfinite(v[k])) return std::string("'bbox' entries must be finite");
  }
  out = BoundingBox{v[0], v[1], v[2], v[3]};
  return std::nullopt;
}

inline Problem check_box(const BoundingBox& b) {
  if (b.w < 0 || b.h < 0) return std::string("bbox width and height must be >= 0");
  return std::nullopt;
}

inline Problem check_score(double score) {
  if (score < 0.0 || score > 1.0) return std::string("score out of [0,1]");
  return std::nullopt;
}

inline Problem check_category(int id) {
  if (!valid_category(id)) {
    return "unknown category " + std::to_string(id);
  }
  return std::nullopt;
}

inline Problem read_category(const json& obj, int& out) {
  const auto it = obj.find("category_id");
  if (it == obj.end()) return std::string("missing 'category_id'");
  if (!it->is_number_integer()) return std::string("'category_id' must be an integer");
  const auto v = it->get<std::int64_t>();
  if (v < -1000000 || v > 1000000) return "unknown category " + std::to_string(v);
  out = static_cast<int>(v);
  return std::nullopt;
}

// Parses one layout result record. Structural problems come back as
// `schema`; range problems are classified so verify_format can report them
// by kind.
struct DetectionProblems {
  Problem schema;
  Problem box;
  Problem score;
  Problem category;

  bool any() const { return schema || box || score || category; }
  const std::string& first() const {
    if (schema) return *schema;
    if (category) return *category;
    if (score) return *score;
    return *box;
  }
};

inline DetectionProblems read_detection(const json& rec, Detection& out) {
  DetectionProblems p;
  if (!rec.is_object()) {
    p.schema = "record must be an object";
    return p;
  }
  if ((p.schema = read_id(rec, "image_id", out.image_id))) return p;
  if ((p.schema = read_category(rec, out.category_id))) return p;
  if ((p.schema = read_bbox(rec, out.box))) return p;
  if ((p.schema = read_number(rec, "score", out.score))) return p;
  p.category = check_category(out.category_id);
  p.score = check_score(out.score);
  p.box = check_box(out.box);
  return p;
}

inline std::vector<std::array<double, 4>> read_cells(const json& cells,
                                                      std::size_t line) {
  std::vector<std::array<double, 4>> out;
  if (!cells.is_array()) throw SchemaError::at_line(line, "'cells' must be an array");
  for (const auto& c : cells) {
    const json* box = &c;
    if (c.is_object()) {
      const auto it = c.find("bbox");
      if (it == c.end()) continue;  // empty cells carry no box
      box = &*it;
    }
    if (!box->is_array() || box->size() != 4) {
      throw SchemaError::at_line(line, "cell box must be an array of 4 numbers");
    }
    std::array<double, 4> b{};
    for (std::size_t k = 0; k < 4; ++k) {
      if (!(*box)[k].is_number()) {
        throw SchemaError::at_line(line, "cell box entries must be numbers");
      }
      b[k] = (*box)[k].get<double>();
    }
    out.push_back(b);
  }
  return out;
}

inline json parse_line(std::size_t line, const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError::at_line(line, std::string("invalid JSON: ") + e.what());
  }
}

}  // namespace detail

// Table ground truth. Every html fragment must parse; a file with no
// records raises EmptyCorpus.
inline TableCorpus load_table_gt(const std::string& path) {
  TableCorpus corpus;
  detail::for_each_line(path, [&](std::size_t line, const std::string& text) {
    const json rec = detail::parse_line(line, text);
    if (!rec.is_object()) throw SchemaError::at_line(line, "record must be an object");
    TableRecord out;
    if (auto p = detail::read_id(rec, "id", out.id)) throw SchemaError::at_line(line, *p);
    if (auto p = detail::read_string(rec, "html", out.html)) {
      throw SchemaError::at_line(line, *p);
    }
    if (rec.contains("split")) {
      if (auto p = detail::read_string(rec, "split", out.split)) {
        throw SchemaError::at_line(line, *p);
      }
    }
    if (rec.contains("complexity")) {
      std::string c;
      if (auto p = detail::read_string(rec, "complexity", c)) {
        throw SchemaError::at_line(line, *p);
      }
      if (c != "simple" && c != "complex") {
        throw SchemaError::at_line(line, "'complexity' must be \"simple\" or \"complex\"");
      }
      out.complexity = c;
    }
    if (rec.contains("cells")) out.cell_boxes = detail::read_cells(rec["cells"], line);
    try {
      (void)parse_table_html(out.html);
    } catch (const MalformedHtml& e) {
      throw SchemaError::at_line(line, "id '" + out.id + "': " + e.what());
    }
    const std::string id = out.id;
    if (!corpus.emplace(id, std::move(out)).second) {
      throw SchemaError::at_line(line, "duplicate id '" + id + "'");
    }
  });
  if (corpus.empty()) throw EmptyCorpus("'" + path + "' contains no table records");
  return corpus;
}

// Table predictions. The html is kept verbatim; unparseable fragments are
// scored 0 later rather than rejected here.
inline TablePredictions load_table_results(const std::string& path) {
  TablePredictions preds;
  detail::for_each_line(path, [&](std::size_t line, const std::string& text) {
    const json rec = detail::parse_line(line, text);
    if (!rec.is_object()) throw SchemaError::at_line(line, "record must be an object");
    std::string id, html;
    if (auto p = detail::read_id(rec, "id", id)) throw SchemaError::at_line(line, *p);
    if (auto p = detail::read_string(rec, "html", html)) throw SchemaError::at_line(line, *p);
    if (!preds.emplace(id, std::move(html)).second) {
      throw SchemaError::at_line(line, "duplicate id '" + id + "'");
    }
  });
  return preds;
}

inline LayoutGroundTruth load_layout_gt(const std::string& path) {
  const json doc = detail::read_json_document(path);
  if (!doc.is_object()) throw SchemaError("document", "must be a JSON object");
  const auto images = doc.find("images");
  const auto annotations = doc.find("annotations");
  if (images == doc.end() || !images->is_array()) {
    throw SchemaError("document", "missing 'images' array");
  }
  if (annotations == doc.end() || !annotations->is_array()) {
    throw SchemaError("document", "missing 'annotations' array");
  }

  LayoutGroundTruth gt;
  for (std::size_t k = 0; k < images->size(); ++k) {
    const json& img = (*images)[k];
    const std::string where = "images[" + std::to_string(k) + "]";
    if (!img.is_object()) throw SchemaError(where, "must be an object");
    std::string id;
    if (auto p = detail::read_id(img, "id", id)) throw SchemaError(where, *p);
    ImageInfo info;
    if (img.contains("file_name")) {
      if (auto p = detail::read_string(img, "file_name", info.file_name)) {
        throw SchemaError(where, *p);
      }
    }
    if (img.contains("width")) {
      if (auto p = detail::read_number(img, "width", info.width)) throw SchemaError(where, *p);
    }
    if (img.contains("height")) {
      if (auto p = detail::read_number(img, "height", info.height)) {
        throw SchemaError(where, *p);
      }
    }
    if (!gt.images.emplace(id, info).second) {
      throw SchemaError(where, "duplicate image id '" + id + "'");
    }
  }

  if (const auto cats = doc.find("categories"); cats != doc.end()) {
    if (!cats->is_array()) throw SchemaError("categories", "must be an array");
    for (std::size_t k = 0; k < cats->size(); ++k) {
      const std::string where = "categories[" + std::to_string(k) + "]";
      int id = 0;
      const json& cat = (*cats)[k];
      if (!cat.is_object() || !cat.contains("id") || !cat["id"].is_number_integer()) {
        throw SchemaError(where, "category needs an integer 'id'");
      }
      id = cat["id"].get<int>();
      if (auto p = detail::check_category(id)) throw SchemaError(where, *p);
    }
  }

  std::set<std::pair<std::string, std::string>> seen;
  for (std::size_t k = 0; k < annotations->size(); ++k) {
    const json& ann = (*annotations)[k];
    const std::string where = "annotations[" + std::to_string(k) + "]";
    if (!ann.is_object()) throw SchemaError(where, "must be an object");
    GroundTruthBox box;
    if (auto p = detail::read_id(ann, "id", box.annotation_id)) throw SchemaError(where, *p);
    if (auto p = detail::read_id(ann, "image_id", box.image_id)) throw SchemaError(where, *p);
    if (auto p = detail::read_category(ann, box.category_id)) throw SchemaError(where, *p);
    if (auto p = detail::check_category(box.category_id)) throw SchemaError(where, *p);
    if (auto p = detail::read_bbox(ann, box.box)) throw SchemaError(where, *p);
    if (auto p = detail::check_box(box.box)) throw SchemaError(where, *p);
    if (!gt.images.contains(box.image_id)) {
      throw SchemaError(where, "unknown image_id '" + box.image_id + "'");
    }
    if (!seen.emplace(box.image_id, box.annotation_id).second) {
      throw SchemaError(where, "duplicate annotation id '" + box.annotation_id +
                                   "' for image '" + box.image_id + "'");
    }
    gt.boxes.push_back(std::move(box));
  }
  if (gt.images.empty()) throw EmptyCorpus("'" + path + "' contains no images");
  return gt;
}

inline std::vector<Detection> load_layout_results(const std::string& path) {
  const json doc = detail::read_json_document(path);
  if (!doc.is_array()) throw SchemaError("document", "must be a JSON array of detections");
  std::vector<Detection> out;
  out.reserve(doc.size());
  for (std::size_t k = 0; k < doc.size(); ++k) {
    Detection det;
    const auto problems = detail::read_detection(doc[k], det);
    if (problems.any()) throw SchemaError("[" + std::to_string(k) + "]", problems.first());
    out.push_back(std::move(det));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Format verification

enum class Phase { FormatVerification, Development, FinalEvaluation };
enum class Task { LayoutDetection, TableRecognition };

inline std::string_view phase_name(Phase p) {
  switch (p) {
    case Phase::FormatVerification: return "format-verification";
    case Phase::Development: return "development";
    case Phase::FinalEvaluation: return "final-evaluation";
  }
  return "?";
}

inline std::optional<Phase> parse_phase(std::string_view s) {
  for (Phase p : {Phase::FormatVerification, Phase::Development, Phase::FinalEvaluation}) {
    if (phase_name(p) == s) return p;
  }
  return std::nullopt;
}

inline std::string_view task_name(Task t) {
  return t == Task::LayoutDetection ? "layout" : "table";
}

inline std::optional<Task> parse_task(std::string_view s) {
  if (s == "layout") return Task::LayoutDetection;
  if (s == "table") return Task::TableRecognition;
  return std::nullopt;
}

// What a submission for one phase must cover.
class PhaseSpec {
 public:
  PhaseSpec(Phase phase, Task task, std::set<std::string> expected_ids)
      : phase_(phase), task_(task), expected_ids_(std::move(expected_ids)) {
    if (expected_ids_.empty()) {
      throw std::invalid_argument("a phase needs at least one expected id");
    }
  }

  static PhaseSpec for_tables(Phase phase, const TableCorpus& gt) {
    std::set<std::string> ids;
    for (const auto& [id, rec] : gt) ids.insert(id);
    return PhaseSpec(phase, Task::TableRecognition, std::move(ids));
  }

  static PhaseSpec for_layout(Phase phase, const LayoutGroundTruth& gt) {
    std::set<std::string> ids;
    for (const auto& [id, info] : gt.images) ids.insert(id);
    return PhaseSpec(phase, Task::LayoutDetection, std::move(ids));
  }

  Phase phase() const { return phase_; }
  Task task() const { return task_; }
  const std::set<std::string>& expected_ids() const { return expected_ids_; }

 private:
  Phase phase_;
  Task task_;
  std::set<std::string> expected_ids_;
};

enum class ViolationKind {
  Parse,
  Schema,
  MissingId,
  DuplicateId,
  UnexpectedId,
  InvalidBox,
  ScoreRange,
  CategoryRange,
  MalformedHtml,
};

inline std::string_view violation_kind_name(ViolationKind k) {
  switch (k) {
    case ViolationKind::Parse: return "parse";
    case ViolationKind::Schema: return "schema";
    case ViolationKind::MissingId: return "missing-id";
    case ViolationKind::DuplicateId: return "duplicate-id";
    case ViolationKind::UnexpectedId: return "unexpected-id";
    case ViolationKind::InvalidBox: return "invalid-box";
    case ViolationKind::ScoreRange: return "score-range";
    case ViolationKind::CategoryRange: return "category-range";
    case ViolationKind::MalformedHtml: return "malformed-html";
  }
  return "?";
}

struct Violation {
  ViolationKind kind;
  std::string location;  // "line 7", "[12]", or empty for file-level checks
  std::string id;        // offending sample/image id when known
  std::string message;
};

struct VerificationReport {
  Phase phase = Phase::FormatVerification;
  Task task = Task::TableRecognition;
  std::string path;
  std::size_t records = 0;
  std::size_t expected = 0;
  std::vector<Violation> violations;

  bool passed() const { return violations.empty(); }
};

namespace detail {

// Assembles violations in check order: parse/schema, missing ids,
// duplicates, unexpected ids, then content checks.
struct ViolationSink {
  std::vector<Violation> parse, missing, duplicate, unexpected, content;

  std::vector<Violation> merged() && {
    std::vector<Violation> out;
    for (auto* v : {&parse, &missing, &duplicate, &unexpected, &content}) {
      out.insert(out.end(), std::make_move_iterator(v->begin()),
                 std::make_move_iterator(v->end()));
    }
    return out;
  }
};

inline void verify_tables(const std::string& path, const PhaseSpec& phase,
                          VerificationReport& report, ViolationSink& sink) {
  std::set<std::string> seen;
  for_each_line(path, [&](std::size_t line, const std::string& text) {
    ++report.records;
    const std::string where = "line " + std::to_string(line);
    json rec;
    try {
      rec = json::parse(text);
    } catch (const json::parse_error& e) {
      sink.parse.push_back({ViolationKind::Parse, where, "", e.what()});
      return;
    }
    if (!rec.is_object()) {
      sink.parse.push_back({ViolationKind::Schema, where, "", "record must be an object"});
      return;
    }
    std::string id, html;
    if (auto p = read_id(rec, "id", id)) {
      sink.parse.push_back({ViolationKind::Schema, where, "", *p});
      return;
    }
    if (auto p = read_string(rec, "html", html)) {
      sink.parse.push_back({ViolationKind::Schema, where, id, *p});
      return;
    }
    if (!seen.insert(id).second) {
      sink.duplicate.push_back({ViolationKind::DuplicateId, where, id,
                                "duplicate id '" + id + "'"});
      return;
    }
    if (!phase.expected_ids().contains(id)) {
      sink.unexpected.push_back({ViolationKind::UnexpectedId, where, id,
                                 "id '" + id + "' is not part of this phase"});
    }
    try {
      (void)parse_table_html(html);
    } catch (const parsebench::MalformedHtml& e) {
      sink.content.push_back({ViolationKind::MalformedHtml, where, id, e.what()});
    }
  });
  for (const auto& id : phase.expected_ids()) {
    if (!seen.contains(id)) {
      sink.missing.push_back({ViolationKind::MissingId, "", id,
                              "no prediction for id '" + id + "'"});
    }
  }
}

inline void verify_layout(const std::string& path, const PhaseSpec& phase,
                          VerificationReport& report, ViolationSink& sink) {
  auto in = open_input(path);
  std::stringstream buf;
  buf << in.rdbuf();
  json doc;
  try {
    doc = json::parse(buf.str());
  } catch (const json::parse_error& e) {
    sink.parse.push_back({ViolationKind::Parse, "document", "", e.what()});
    return;
  }
  if (!doc.is_array()) {
    sink.parse.push_back({ViolationKind::Schema, "document", "",
                          "results must be a JSON array of detections"});
    return;
  }
  std::set<std::string> seen_images;
  std::set<std::tuple<std::string, int, double, double, double, double, double>> seen;
  for (std::size_t k = 0; k < doc.size(); ++k) {
    ++report.records;
    const std::string where = "[" + std::to_string(k) + "]";
    Detection det;
    const auto p = read_detection(doc[k], det);
    if (p.schema) {
      sink.parse.push_back({ViolationKind::Schema, where, det.image_id, *p.schema});
      continue;
    }
    if (p.category) {
      sink.content.push_back({ViolationKind::CategoryRange, where, det.image_id, *p.category});
    }
    if (p.score) {
      sink.content.push_back({ViolationKind::ScoreRange, where, det.image_id, *p.score});
    }
    if (p.box) sink.content.push_back({ViolationKind::InvalidBox, where, det.image_id, *p.box});
    if (!seen.emplace(det.image_id, det.category_id, det.box.x, det.box.y, det.box.w,
                      det.box.h, det.score)
             .second) {
      sink.duplicate.push_back({ViolationKind::DuplicateId, where, det.image_id,
                                "duplicate detection record for image '" +
                                    det.image_id + "'"});
    }
    if (seen_images.insert(det.image_id).second &&
        !phase.expected_ids().contains(det.image_id)) {
      sink.unexpected.push_back({ViolationKind::UnexpectedId, where, det.image_id,
                                 "image '" + det.image_id + "' is not part of this phase"});
    }
  }
  for (const auto& id : phase.expected_ids()) {
    if (!seen_images.contains(id)) {
      sink.missing.push_back({ViolationKind::MissingId, "", id,
                              "no detections for image '" + id + "'"});
    }
  }
}

}  // namespace detail

// Checks a results file against a phase. Problems are collected into the
// report; only an unreadable file throws (IoError).
inline VerificationReport verify_format(const std::string& results_path,
                                        const PhaseSpec& phase) {
  VerificationReport report;
  report.phase = phase.phase();
  report.task = phase.task();
  report.path = results_path;
  report.expected = phase.expected_ids().size();
  detail::ViolationSink sink;
  if (phase.task() == Task::TableRecognition) {
    detail::verify_tables(results_path, phase, report, sink);
  } else {
    detail::verify_layout(results_path, phase, report, sink);
  }
  report.violations = std::move(sink).merged();
  return report;
}

}  // namespace parsebench
