#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace parsebench {

// One ground-truth table sample. Cell boxes are carried through from the
// annotation file but play no part in TEDS.
struct TableRecord {
  std::string id;
  std::string html;
  std::string split;
  std::optional<std::string> complexity;  // as declared by the file, if any
  std::vector<std::array<double, 4>> cell_boxes;
};

// Keyed by sample id; std::map keeps byte-wise ascending id order.
using TableCorpus = std::map<std::string, TableRecord>;
using TablePredictions = std::map<std::string, std::string>;

}  // namespace parsebench
