// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Every check runs at its stated tolerance and time budget.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "parsebench/cli.hpp"
#include "parsebench/corpus_io.hpp"
#include "parsebench/report.hpp"
#include "parsebench/teds.hpp"
#include "support/oracles.hpp"
#include "support/synthetic.hpp"
#include "support/temp_dir.hpp"

using namespace parsebench;
using Clock = std::chrono::steady_clock;

namespace {

struct Verdict {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      detail = what;
    }
  }
};

struct Criterion {
  const char* name;
  double budget_seconds;  // 0 means no time limit
  std::function<Verdict()> check;
};

std::string fmt(double v, int digits = 12) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

int run_cli(std::vector<std::string> args, std::string* out = nullptr) {
  args.insert(args.begin(), "parsebench");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream o, e;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), o, e);
  if (out) *out = o.str();
  return code;
}

std::size_t worker_count() {
  return std::max(1u, std::thread::hardware_concurrency());
}

Verdict identity() {
  Verdict v;
  const TableCorpus gt = load_table_gt(testing::data_file("table_mini_dev_gt.jsonl"));
  v.require(gt.size() == 20, "fixture has " + std::to_string(gt.size()) + " tables");
  for (const auto& [id, rec] : gt) {
    const TableTree t = parse_table_html(rec.html);
    const double s = teds(t, t);
    v.require(s == 1.0, id + " scored " + fmt(s, 17));
  }
  v.detail = v.ok ? "20/20 tables score exactly 1" : v.detail;
  return v;
}

Verdict tree_edit_oracle() {
  Verdict v;
  synth::Rng rng(2021);
  const TedsCost cost;
  double worst = 0.0;
  for (int k = 0; k < 200; ++k) {
    const TreeNode a = synth::random_small_tree(rng, 6);
    const TreeNode b = synth::random_small_tree(rng, 6);
    const double got = tree_edit_distance(a, b, cost);
    const double want = oracle::brute_force_tree_distance(a, b, cost);
    worst = std::max(worst, std::abs(got - want));
    v.require(std::abs(got - want) <= 1e-9,
              "pair " + std::to_string(k) + ": " + fmt(got) + " vs oracle " + fmt(want));
  }
  if (v.ok) v.detail = "200 pairs, max |diff| " + fmt(worst, 3);
  return v;
}

Verdict levenshtein_oracle() {
  Verdict v;
  synth::Rng rng(7);
  for (int k = 0; k < 500; ++k) {
    const TokenSeq a = synth::random_tokens(rng, 12);
    const TokenSeq b = synth::random_tokens(rng, 12);
    const std::size_t got = levenshtein_distance(a, b);
    const std::size_t want = oracle::levenshtein(a, b);
    v.require(got == want, "pair " + std::to_string(k) + ": " + std::to_string(got) +
                               " vs oracle " + std::to_string(want));
  }
  const double classic = normalized_levenshtein(std::string_view("kitten"),
                                                std::string_view("sitting"));
  v.require(classic == 3.0 / 7.0, "kitten/sitting gave " + fmt(classic));
  if (v.ok) v.detail = "500 pairs exact, kitten/sitting = " + fmt(classic, 6);
  return v;
}

Verdict hand_computed() {
  Verdict v;
  const double one = teds(parse_table_html("<table><tr><td>ab</td></tr></table>"),
                          parse_table_html("<table><tr><td>ax</td></tr></table>"));
  const double two = teds(parse_table_html("<table><tr><td>a</td><td>b</td></tr></table>"),
                          parse_table_html("<table><tr><td>a</td></tr></table>"));
  v.require(std::abs(one - (1.0 - 0.5 / 3.0)) <= 1e-6, "first example gave " + fmt(one));
  v.require(std::abs(two - 0.75) <= 1e-6, "second example gave " + fmt(two));
  if (v.ok) v.detail = fmt(one, 6) + " and " + fmt(two, 6);
  return v;
}

Verdict ignore_bold() {
  Verdict v;
  testing::TempDir dir;
  const auto gt = dir.write(
      "gt.jsonl",
      R"({"id":"t","html":"<table><thead><tr><td><b>Model</b></td><td><b>F1</b></td></tr></thead><tbody><tr><td>A</td><td>0.91</td></tr></tbody></table>"})"
      "\n");
  const auto pred = dir.write(
      "pred.jsonl",
      R"({"id":"t","html":"<table><thead><tr><td>Model</td><td>F1</td></tr></thead><tbody><tr><td>A</td><td>0.91</td></tr></tbody></table>"})"
      "\n");
  std::string with, without;
  v.require(run_cli({"--json", "--ignore-bold", "score-teds", "--gt", gt, "--pred", pred}, &with) == 0,
            "score-teds --ignore-bold failed");
  v.require(run_cli({"--json", "score-teds", "--gt", gt, "--pred", pred}, &without) == 0,
            "score-teds failed");
  if (!v.ok) return v;
  const double a = nlohmann::json::parse(with)["all"]["mean"].get<double>();
  const double b = nlohmann::json::parse(without)["all"]["mean"].get<double>();
  v.require(a == 1.0, "with --ignore-bold: " + fmt(a));
  v.require(b < 1.0, "without: " + fmt(b));
  if (v.ok) v.detail = "with " + fmt(a, 6) + ", without " + fmt(b, 6);
  return v;
}

Verdict symmetry_and_range() {
  Verdict v;
  synth::Rng rng(1000);
  double worst = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const TableTree a = synth::random_table(rng);
    const TableTree b = k % 2 ? synth::perturb(rng, a, 0.2) : synth::random_table(rng);
    const double ab = teds(a, b), ba = teds(b, a);
    worst = std::max(worst, std::abs(ab - ba));
    v.require(std::abs(ab - ba) <= 1e-12,
              "pair " + std::to_string(k) + ": " + fmt(ab, 17) + " vs " + fmt(ba, 17));
    v.require(ab >= 0.0 && ab <= 1.0, "pair " + std::to_string(k) + " out of range: " + fmt(ab));
  }
  if (v.ok) v.detail = "1000 pairs, max asymmetry " + fmt(worst, 3);
  return v;
}

Detection det(const std::string& image, int cat, BoundingBox b, double score) {
  return Detection{image, cat, b, score};
}

Verdict map_sanity() {
  Verdict v;
  const LayoutGroundTruth gt = load_layout_gt(testing::data_file("layout_mini_dev_gt.json"));
  std::vector<Detection> perfect;
  for (const auto& g : gt.boxes) perfect.push_back({g.image_id, g.category_id, g.box, 1.0});
  const LayoutReport p = mean_ap(perfect, gt);
  v.require(fixed(p.overall_map, 4) == "1.0000", "perfect predictions gave " + fixed(p.overall_map, 4));

  // Text: 4 boxes over three images, detections either coincide with a box
  // or miss it entirely, so the PR curve is the same at every threshold:
  //   ranks  TP FP TP TP FP FP  -> precision 1, .5, .67, .75, .6, .5 ; recall .25 .25 .5 .75 .75 .75
  // Title: one detection at IoU exactly 0.8, a hit for 7 of the 10 thresholds.
  LayoutGroundTruth scene;
  for (const char* id : {"a", "b", "c"}) scene.images[id] = {};
  scene.boxes = {{"a", "1", 1, {0, 0, 50, 20}},
                 {"a", "2", 1, {0, 40, 50, 20}},
                 {"b", "3", 1, {10, 10, 30, 30}},
                 {"c", "4", 1, {5, 5, 20, 20}},
                 {"c", "5", 2, {0, 0, 100, 100}}};
  const std::vector<Detection> dets = {
      det("a", 1, {0, 0, 50, 20}, 0.95),  det("c", 1, {200, 200, 9, 9}, 0.90),
      det("b", 1, {10, 10, 30, 30}, 0.80), det("a", 1, {0, 40, 50, 20}, 0.70),
      det("b", 1, {10, 10, 30, 30}, 0.60), det("a", 1, {300, 0, 5, 5}, 0.50),
      det("c", 2, {0, 0, 100, 80}, 0.90)};
  const double text_closed_form = (26.0 + 50.0 * 0.75) / 101.0;
  const double text_oracle =
      oracle::interpolated_ap({true, false, true, true, false, false}, 4);
  const double expected = (text_closed_form + 0.7) / 2.0;
  const double reference = oracle::reference_map(dets, scene.boxes);
  const LayoutReport r = mean_ap(dets, scene);
  v.require(std::abs(text_oracle - text_closed_form) <= 1e-9, "oracle disagrees with closed form");
  v.require(std::abs(*r.per_category_ap[0] - text_oracle) <= 1e-9,
            "Text AP " + fmt(*r.per_category_ap[0]) + " vs oracle " + fmt(text_oracle));
  v.require(std::abs(*r.per_category_ap[1] - 0.7) <= 1e-9,
            "Title AP " + fmt(*r.per_category_ap[1]) + " vs 0.7");
  v.require(std::abs(r.overall_map - reference) <= 1e-9,
            "mAP " + fmt(r.overall_map) + " vs reference " + fmt(reference));
  v.require(std::abs(r.overall_map - expected) <= 1e-9,
            "mAP " + fmt(r.overall_map) + " vs closed form " + fmt(expected));
  v.require(iou_thresholds().size() == 10, "threshold list has " +
                                               std::to_string(iou_thresholds().size()));
  if (v.ok) {
    v.detail = "perfect 1.0000, scene mAP " + fmt(r.overall_map, 10) + ", 10 thresholds";
  }
  return v;
}

Verdict determinism() {
  Verdict v;
  synth::Rng rng(99);
  TableCorpus gt;
  TablePredictions pred;
  for (int k = 0; k < 1000; ++k) {
    char id[32];
    std::snprintf(id, sizeof id, "det_%04d.png", k);
    const TableTree t = synth::random_table(rng);
    gt[id] = TableRecord{id, to_html(t), "val", {}, {}};
    if (k % 97 == 0) continue;
    pred[id] = k % 89 == 0 ? "<table><tr><td>x</table>" : to_html(synth::perturb(rng, t, 0.1));
  }
  const TedsOptions opts;
  const TedsReport one = batch_teds(gt, pred, opts, BatchOptions{1, false});
  const TedsReport eight = batch_teds(gt, pred, opts, BatchOptions{8, false});
  v.require(teds_json(one, opts).dump(2) == teds_json(eight, opts).dump(2), "JSON reports differ");
  v.require(teds_csv(one) == teds_csv(eight), "CSV reports differ");
  v.require(teds_text(one, opts) == teds_text(eight, opts), "text reports differ");
  if (v.ok) v.detail = "1000 samples, text/CSV/JSON identical (all " + percent(one.all.mean) + ")";
  return v;
}

Verdict format_verification() {
  Verdict v;
  const std::string gt = testing::data_file("table_mini_dev_gt.jsonl");
  const PhaseSpec phase = PhaseSpec::for_tables(Phase::FormatVerification, load_table_gt(gt));
  struct Case {
    const char* file;
    int exit_code;
    std::size_t violations;
    ViolationKind kind;
  };
  const Case cases[] = {
      {"table_mini_dev_pred.jsonl", 0, 0, ViolationKind::Parse},
      {"table_mini_dev_pred_missing3.jsonl", 1, 3, ViolationKind::MissingId},
      {"table_mini_dev_pred_bad_tr.jsonl", 1, 1, ViolationKind::MalformedHtml},
  };
  std::string codes;
  for (const auto& c : cases) {
    const std::string path = testing::data_file(c.file);
    std::string out;
    const int code = run_cli({"verify", "--gt", gt, "--pred", path}, &out);
    codes += (codes.empty() ? "" : "/") + std::to_string(code);
    v.require(code == c.exit_code, std::string(c.file) + " exit " + std::to_string(code));
    const VerificationReport r = verify_format(path, phase);
    v.require(r.violations.size() == c.violations,
              std::string(c.file) + ": " + std::to_string(r.violations.size()) + " violations");
    for (const auto& viol : r.violations) {
      v.require(viol.kind == c.kind && !viol.id.empty() && !viol.message.empty(),
                std::string(c.file) + ": unexpected violation " + viol.message);
      v.require(out.find(viol.id) != std::string::npos,
                std::string(c.file) + ": id " + viol.id + " not itemized in output");
    }
  }
  const VerificationReport bad =
      verify_format(testing::data_file("table_mini_dev_pred_bad_tr.jsonl"), phase);
  v.require(!bad.violations.empty() && bad.violations[0].id == "PMC_minidev_07.png",
            "malformed record not attributed to PMC_minidev_07.png");
  if (v.ok) v.detail = "exit codes " + codes;
  return v;
}

Verdict scale() {
  Verdict v;
  synth::Rng rng(9000);
  TableCorpus gt;
  TablePredictions pred;
  // up to 12 columns and 30 body rows, capped at 300 nodes per tree
  synth::TableShape shape;
  shape.max_cols = 12;
  shape.max_body_rows = 30;
  shape.max_content = 20;
  std::size_t largest = 0, total = 0;
  for (int k = 0; k < 9000; ++k) {
    char id[32];
    std::snprintf(id, sizeof id, "scale_%04d.png", k);
    TableTree t = synth::random_table(rng, shape);
    TableTree p = synth::perturb(rng, t, 0.1);
    while (p.size() > shape.max_nodes) {
      t = synth::random_table(rng, shape);
      p = synth::perturb(rng, t, 0.1);
    }
    largest = std::max({largest, t.size(), p.size()});
    total += t.size();
    gt[id] = TableRecord{id, to_html(t), "val", {}, {}};
    pred[id] = to_html(p);
  }
  v.require(largest <= 300, "a table has " + std::to_string(largest) + " nodes");
  const auto start = Clock::now();
  const TedsReport r = batch_teds(gt, pred, {}, BatchOptions{worker_count(), false});
  const double secs = std::chrono::duration<double>(Clock::now() - start).count();
  v.require(r.all.count == 9000, "scored " + std::to_string(r.all.count) + " samples");
  if (v.ok) {
    v.detail = "9000 pairs, mean " + std::to_string(total / 9000) + " nodes, max " +
               std::to_string(largest) + ", " + std::to_string(worker_count()) +
               " worker(s), scoring " + fmt(secs, 4) + " s";
  }
  return v;
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {"identity", 5, identity},
      {"tree-edit-oracle", 60, tree_edit_oracle},
      {"levenshtein-oracle", 0, levenshtein_oracle},
      {"hand-computed-teds", 0, hand_computed},
      {"ignore-bold", 0, ignore_bold},
      {"symmetry-and-range", 0, symmetry_and_range},
      {"map-sanity", 0, map_sanity},
      {"determinism", 0, determinism},
      {"format-verification", 0, format_verification},
      {"scale", 600, scale},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = Clock::now();
    Verdict v;
    try {
      v = c.check();
    } catch (const std::exception& e) {
      v.ok = false;
      v.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(Clock::now() - start).count();
    if (c.budget_seconds > 0 && secs >= c.budget_seconds && v.ok) {
      v.ok = false;
      v.detail = "took " + fmt(secs, 4) + " s, budget " + fmt(c.budget_seconds, 4) + " s";
    }
    failures += !v.ok;
    std::printf("%s  %-20s %8.2fs  %s\n", v.ok ? "PASS" : "FAIL", c.name, secs, v.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}
