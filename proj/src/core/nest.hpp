#pragma once
#include <span>
#include <vector>

#include "vertex.hpp"

// Iterated nesting of vertex measures towards the lower-left corner.
//
// A sequence of vertex measures (z_1, z_2, ...) defines one measure on the
// cube: z_1 splits the cube at its split point; the box at vertex v keeps the
// coordinates where v is 0 "active" and releases the others to be uniform;
// inside that box the remaining measures act, projected onto the active
// coordinates, and so on.  Truncating after the stored levels fills every
// still-active window uniformly, so all finite-depth queries are exact.

namespace tailnest {

struct Level {
  std::vector<double> u;  // split point
  std::vector<double> z;  // vertex weights
  std::vector<double> x;  // cached corner masses, s_inverse(z)
};

class NestSequence {
 public:
  // levels must all share dimension r and pass the order-k check
  static NestSequence build(int r, int k, std::vector<VertexCopula> levels);
  static NestSequence uniform(int r, int k);  // zero levels

  // as build, but each level arrives as a (split, corner profile) pair; the
  // profile is stored verbatim as the level's x and the weights are derived
  // from it, so serialized profiles survive a load bit for bit
  static NestSequence build_from_profiles(
      int r, int k, std::vector<std::pair<std::vector<double>, std::vector<double>>> levels);

  int dimension() const { return r_; }
  int order() const { return k_; }
  int depth() const { return static_cast<int>(levels_.size()); }
  const Level& level(int index) const { return levels_.at(index); }  // 0-based

  // corner of the shrinking lower-left box after n levels
  std::vector<double> corner(int n) const;

  // mass the measure projected onto the zero-coordinates of v assigns to its
  // own lower-left box after n levels: the product of the corner masses
  // x_l(v) over l <= n
  double corner_mass(int n, Vertex v) const;

  // exact distribution function of the depth-truncated measure
  double cdf(std::span<const double> w, int depth) const;
  double cdf(std::span<const double> w) const { return cdf(w, depth()); }

  // sequence of projections onto the zero-coordinates of v; v must leave at
  // least one coordinate
  NestSequence project(Vertex v) const;

  // largest per-level mass on vertices with more than k zero bits; the
  // sampler's expected level count is bounded by 1/(1 - this)
  double deep_mass_bound() const;

 private:
  int r_ = 0;
  int k_ = 0;
  std::vector<Level> levels_;
};

// Dense piecewise-uniform measure on the level-by-level product grid.  Cell
// index packs one vertex per level, level 1 in the lowest r bits.
struct GridMeasure {
  int r = 0;
  int depth = 0;
  std::vector<std::vector<double>> splits;  // one split point per level
  std::vector<double> mass;                 // size 2^(r*depth)

  std::size_t cell_count() const { return mass.size(); }
  std::size_t index(std::span<const Vertex> cell) const;
  // [lo, hi) extent of a cell along one 0-based coordinate
  std::pair<double, double> interval(int coord, std::span<const Vertex> cell) const;
  double cell_volume(std::span<const Vertex> cell) const;
  double total() const;

  // collapse onto the coordinates set in keep (at least one)
  GridMeasure project_onto(Vertex keep) const;
};

// Exact cell masses of the depth-truncated sequence; throws Errc::budget when
// 2^(r*depth) exceeds the cell budget.
GridMeasure refine_to_grid(const NestSequence& seq, int depth,
                           std::size_t cell_budget = kGridCellBudget);

// Replace the (uniform) content of one full-resolution cell of `outer` by an
// affinely rescaled copy of `inner`; every other cell is refined uniformly.
// The result lives on the concatenated grid, so nesting the uniform grid
// changes the measure by nothing.  `cell` must name a cell at outer's stored
// resolution, where content is uniform by construction; coarser prefixes are
// rejected.
GridMeasure nest_grid(const GridMeasure& outer, std::span<const Vertex> cell,
                      const GridMeasure& inner);

// Grid of the measure obtained by nesting the single vertex measure into
// every cell of itself, depth times.  This self-similar family keeps the full
// dependence structure in every branch, unlike the corner-directed sequence
// above, and serves as a reference law in tests.
GridMeasure self_nest_grid(const VertexCopula& c, int depth,
                           std::size_t cell_budget = kGridCellBudget);

}  // namespace tailnest
