#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/margins.hpp"
#include "core/nest.hpp"

// JSON model descriptions. A model is either a list of explicit levels
// ("levels": [{"u": [...], "x": [...]}, ...]) or a builder recipe
// ("builder": {"method": ..., ...}); exactly one of the two must be present.
//
// Vertex-indexed arrays (a level's "x") use the upper-window convention: bit
// i-1 of the index is set when coordinate i sits in the released part. Builder
// arrays "a" and "b" are indexed by face instead: bit i-1 of the index is set
// when coordinate i spans the face, so entry 0 is the empty face and the last
// entry is the joint corner. Unknown keys are rejected everywhere.

namespace tailnest {

struct Model {
  NestSequence seq;
  MarginSpec margins;
  std::uint64_t seed = 0;
};

// Extra facts about how a builder-backed model was realized.
struct LoadInfo {
  double base = 0.0;           // split scale chosen by halving builders
  std::vector<int> retained;   // target indices kept by the subsequence builder
};

Model load_model_json(const std::string& text, LoadInfo* info = nullptr);
Model load_model_file(const std::string& path, LoadInfo* info = nullptr);

// Explicit form: dimension, order, seed, levels with split and corner profile
// per level, margins. Loading the output reproduces every stored double bit
// for bit, so serialize(load(serialize(m))) == serialize(m).
std::string serialize_model(const Model& m);

struct ValidationReport {
  bool valid = false;
  std::string message;  // one-line summary or the failure description
};

ValidationReport validate_model_json(const std::string& text);
ValidationReport validate_model_file(const std::string& path);

}  // namespace tailnest
