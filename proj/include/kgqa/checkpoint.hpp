#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "kgqa/rcnn.hpp"
#include "kgqa/selection.hpp"

namespace kgqa {

// Trained system state. Relation names pin the classifier output order so a
// checkpoint can be validated against the KG it is used with.
struct Models {
  int embed_dim = 150;
  int lstm_hidden = 100;
  std::string weight_mode = "rcnn";  // "rcnn" | "uniform"
  std::uint64_t seed = 0;
  std::vector<std::string> relation_names;
  bool has_rcnn = false;
  RcnnParams rcnn;
  SelectorParams selector;
};

// Self-describing JSON checkpoint; doubles round-trip exactly.
std::string models_to_json(const Models& models);
Models models_from_json(const std::string& text);

void save_models(const Models& models, const std::string& path);
Models load_models(const std::string& path);

}  // namespace kgqa
