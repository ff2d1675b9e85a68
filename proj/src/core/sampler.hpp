#pragma once

#include <cstdint>
#include <vector>

#include "core/nest.hpp"

namespace tailnest {

struct WorkStats {
  std::uint64_t samples = 0;
  std::uint64_t vertex_draws = 0;
  // Upper bound on the per-level probability that the recursion continues past
  // another vertex draw; average_draws() <= 1 / (1 - deep_mass_bound).
  double deep_mass_bound = 0.0;

  double average_draws() const {
    return samples ? double(vertex_draws) / double(samples) : 0.0;
  }
};

struct SampleOptions {
  std::uint64_t seed = 0;
  int threads = 1;
};

// Draws count points of the sequence law, row-major count x dimension, each
// coordinate in [0, 1). Output is a pure function of (sequence, count, seed):
// the thread count changes work partitioning only, never the values.
std::vector<double> sample(const NestSequence& seq, std::size_t count,
                           const SampleOptions& opt = {}, WorkStats* stats = nullptr);

// Draws from the depth-limited self-similar law of a single vertex copula:
// every cell is refined by the copula itself, not only the corner cell, and
// each of the `depth` levels costs exactly one vertex draw.
std::vector<double> sample_iterated_nest(const VertexCopula& c, int depth, std::size_t count,
                                         const SampleOptions& opt = {},
                                         WorkStats* stats = nullptr);

}  // namespace tailnest
