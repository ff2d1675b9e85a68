#include "nest.hpp"

#include <cmath>
#include <string>

namespace tailnest {

namespace {

void validate_point(std::span<const double> w, int r) {
  require(static_cast<int>(w.size()) == r, Errc::bounds, "query point dimension mismatch");
  for (double v : w) {
    require(v >= 0.0 && v <= 1.0, Errc::bounds, "query point outside the unit cube");
  }
}

void validate_depth(int n, int stored) {
  require(n >= 0 && n <= stored, Errc::bounds,
          "depth " + std::to_string(n) + " outside stored range [0, " + std::to_string(stored) + "]");
}

std::size_t checked_cell_count(int r, int depth, std::size_t budget) {
  const int bits = r * depth;
  require(bits < 63, Errc::budget, "grid resolution overflows the index space");
  const std::size_t cells = std::size_t{1} << bits;
  require(cells <= budget, Errc::budget,
          "grid with 2^" + std::to_string(bits) + " cells exceeds the cell budget");
  return cells;
}

}  // namespace

NestSequence NestSequence::build(int r, int k, std::vector<VertexCopula> levels) {
  require(r >= 1 && r <= kMaxDimensionHard, Errc::bounds, "dimension out of range");
  require(k >= 0 && k <= r, Errc::bounds, "order must lie in [0, r]");
  NestSequence out;
  out.r_ = r;
  out.k_ = k;
  out.levels_.reserve(levels.size());
  for (std::size_t i = 0; i < levels.size(); ++i) {
    VertexCopula& c = levels[i];
    require(c.dimension() == r, Errc::validation,
            "level " + std::to_string(i + 1) + " has dimension " + std::to_string(c.dimension()) +
                ", expected " + std::to_string(r));
    const OrderCheck check = check_order(c.z, c.u, k);
    if (!check.ok) {
      fail(Errc::validation, "level " + std::to_string(i + 1) + ": " + check.describe(r));
    }
    Level lv;
    lv.u = std::move(c.u);
    lv.z = std::move(c.z);
    lv.x = s_inverse(lv.z);
    out.levels_.push_back(std::move(lv));
  }
  return out;
}

NestSequence NestSequence::uniform(int r, int k) { return build(r, k, {}); }

NestSequence NestSequence::build_from_profiles(
    int r, int k, std::vector<std::pair<std::vector<double>, std::vector<double>>> levels) {
  require(r >= 1 && r <= kMaxDimensionHard, Errc::bounds, "dimension out of range");
  require(k >= 0 && k <= r, Errc::bounds, "order must lie in [0, r]");
  NestSequence out;
  out.r_ = r;
  out.k_ = k;
  out.levels_.reserve(levels.size());
  for (std::size_t i = 0; i < levels.size(); ++i) {
    auto& [u, x] = levels[i];
    require(static_cast<int>(u.size()) == r, Errc::validation,
            "level " + std::to_string(i + 1) + ": split needs one entry per coordinate");
    require(x.size() == (std::size_t{1} << r), Errc::validation,
            "level " + std::to_string(i + 1) + ": profile needs one entry per vertex");
    validate_split(u);
    std::vector<double> z = s_transform(x);
    const OrderCheck check = check_order(z, u, k);
    if (!check.ok) {
      fail(Errc::validation, "level " + std::to_string(i + 1) + ": " + check.describe(r));
    }
    Level lv;
    lv.u = std::move(u);
    lv.z = std::move(z);
    lv.x = std::move(x);
    out.levels_.push_back(std::move(lv));
  }
  return out;
}

std::vector<double> NestSequence::corner(int n) const {
  validate_depth(n, depth());
  std::vector<double> d(r_, 1.0);
  for (int l = 0; l < n; ++l) {
    for (int i = 0; i < r_; ++i) d[i] *= levels_[l].u[i];
  }
  return d;
}

double NestSequence::corner_mass(int n, Vertex v) const {
  validate_depth(n, depth());
  require(v <= full_mask(r_), Errc::bounds, "vertex outside the cube");
  double m = 1.0;
  for (int l = 0; l < n; ++l) m *= levels_[l].x[v];
  return m;
}

// One pass per level.  Coordinates whose query value reached 1 are dropped
// (the measure is marginalized over them); coordinates above the split
// contribute a closed-form uniform factor on the released part and also drop;
// coordinates at or below the split rescale into the lower box and stay.  The
// per-level factor sums, over vertices putting no mass below any staying
// coordinate, the weight times the covered fraction of each released
// coordinate.  Once at most `order` coordinates stay, every deeper projection
// is uniform and the remaining factor is the plain volume.
double NestSequence::cdf(std::span<const double> w, int n) const {
  validate_point(w, r_);
  validate_depth(n, depth());
  std::vector<double> wcur(w.begin(), w.end());
  Vertex active = full_mask(r_);
  double factor = 1.0;

  for (int l = 0; l < n; ++l) {
    Vertex alive = 0;
    for (int i = 0; i < r_; ++i) {
      if ((active >> i & 1u) && wcur[i] < 1.0) alive |= Vertex{1} << i;
    }
    active = alive;
    if (!active) return factor;
    if (popcount(active) <= k_) break;

    const Level& lv = levels_[l];
    Vertex stay = 0;
    for (int i = 0; i < r_; ++i) {
      if ((active >> i & 1u) && wcur[i] <= lv.u[i]) stay |= Vertex{1} << i;
    }
    const Vertex released = active & ~stay;

    double frac[kMaxDimensionHard];
    for (int i = 0; i < r_; ++i) {
      if (released >> i & 1u) frac[i] = (wcur[i] - lv.u[i]) / (1.0 - lv.u[i]);
    }

    double s = 0.0;
    const std::size_t count = lv.z.size();
    for (std::size_t v = 0; v < count; ++v) {
      if (v & stay) continue;  // vertex sits above a coordinate we descend into
      double term = lv.z[v];
      if (term == 0.0) continue;
      Vertex up = Vertex(v) & released;
      while (up) {
        const int i = std::countr_zero(up);
        term *= frac[i];
        up &= up - 1;
      }
      s += term;
    }
    factor *= s;
    if (factor == 0.0) return 0.0;

    for (int i = 0; i < r_; ++i) {
      if (stay >> i & 1u) wcur[i] /= lv.u[i];
    }
    active = stay;
    if (!active) return factor;
  }

  double volume = 1.0;
  for (int i = 0; i < r_; ++i) {
    if (active >> i & 1u) volume *= wcur[i];
  }
  return factor * volume;
}

NestSequence NestSequence::project(Vertex v) const {
  require(v <= full_mask(r_), Errc::bounds, "vertex outside the cube");
  const Vertex keep = vertex_complement(v, r_);
  require(keep != 0, Errc::bounds, "projection must keep at least one coordinate");
  const int rp = popcount(keep);
  std::vector<VertexCopula> levels;
  levels.reserve(levels_.size());
  const int kp = std::min(k_, rp);
  for (const Level& lv : levels_) {
    std::vector<double> up;
    up.reserve(rp);
    for (int i = 0; i < r_; ++i) {
      if (keep >> i & 1u) up.push_back(lv.u[i]);
    }
    levels.push_back(VertexCopula::make(std::move(up), project_onto(lv.z, keep, r_), kp));
  }
  return build(rp, kp, std::move(levels));
}

double NestSequence::deep_mass_bound() const {
  double worst = 0.0;
  for (const Level& lv : levels_) {
    double deep = 0.0;
    for (std::size_t v = 0; v < lv.z.size(); ++v) {
      if (zero_count(Vertex(v), r_) > k_) deep += lv.z[v];
    }
    worst = std::max(worst, deep);
  }
  return worst;
}

std::size_t GridMeasure::index(std::span<const Vertex> cell) const {
  require(static_cast<int>(cell.size()) == depth, Errc::bounds, "cell index depth mismatch");
  std::size_t idx = 0;
  for (int l = 0; l < depth; ++l) {
    require(cell[l] <= full_mask(r), Errc::bounds, "cell vertex outside the cube");
    idx |= std::size_t{cell[l]} << (r * l);
  }
  return idx;
}

std::pair<double, double> GridMeasure::interval(int coord, std::span<const Vertex> cell) const {
  require(coord >= 0 && coord < r, Errc::bounds, "coordinate out of range");
  double lo = 0.0, hi = 1.0;
  for (int l = 0; l < static_cast<int>(cell.size()); ++l) {
    const double mid = lo + splits[l][coord] * (hi - lo);
    if (cell[l] >> coord & 1u) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return {lo, hi};
}

double GridMeasure::cell_volume(std::span<const Vertex> cell) const {
  double vol = 1.0;
  for (int l = 0; l < static_cast<int>(cell.size()); ++l) {
    for (int i = 0; i < r; ++i) {
      vol *= (cell[l] >> i & 1u) ? 1.0 - splits[l][i] : splits[l][i];
    }
  }
  return vol;
}

double GridMeasure::total() const {
  double t = 0.0;
  for (double m : mass) t += m;
  return t;
}

GridMeasure GridMeasure::project_onto(Vertex keep) const {
  require(keep != 0 && keep <= full_mask(r), Errc::bounds, "projection mask outside the cube");
  GridMeasure out;
  out.r = popcount(keep);
  out.depth = depth;
  for (const auto& u : splits) {
    std::vector<double> up;
    for (int i = 0; i < r; ++i) {
      if (keep >> i & 1u) up.push_back(u[i]);
    }
    out.splits.push_back(std::move(up));
  }
  out.mass.assign(std::size_t{1} << (out.r * depth), 0.0);
  for (std::size_t idx = 0; idx < mass.size(); ++idx) {
    if (mass[idx] == 0.0) continue;
    std::size_t packed = 0;
    for (int l = 0; l < depth; ++l) {
      const Vertex v = Vertex(idx >> (r * l)) & full_mask(r);
      packed |= std::size_t{pack_bits(v, keep)} << (out.r * l);
    }
    out.mass[packed] += mass[idx];
  }
  return out;
}

namespace {

// depth-first cell enumeration carrying the active-coordinate mask and the
// accumulated mass factor
void refine_recurse(const NestSequence& seq, int depth, int level, std::size_t base, Vertex active,
                    double acc, GridMeasure& g) {
  if (level == depth) {
    g.mass[base] = acc;
    return;
  }
  const Level& lv = seq.level(level);
  const int r = g.r;
  const std::vector<double> proj =
      active == full_mask(r) ? lv.z : project_onto(lv.z, active, r);
  const std::size_t count = std::size_t{1} << r;
  for (std::size_t v = 0; v < count; ++v) {
    double f = proj[pack_bits(Vertex(v), active)];
    if (f == 0.0) continue;
    for (int i = 0; i < r; ++i) {
      if (active >> i & 1u) continue;
      f *= (v >> i & 1u) ? 1.0 - lv.u[i] : lv.u[i];
    }
    if (f == 0.0) continue;
    refine_recurse(seq, depth, level + 1, base | (v << (r * level)), active & ~Vertex(v), acc * f,
                   g);
  }
}

}  // namespace

GridMeasure refine_to_grid(const NestSequence& seq, int depth, std::size_t cell_budget) {
  require(depth >= 0 && depth <= seq.depth(), Errc::bounds, "depth outside stored range");
  GridMeasure g;
  g.r = seq.dimension();
  g.depth = depth;
  for (int l = 0; l < depth; ++l) g.splits.push_back(seq.level(l).u);
  g.mass.assign(checked_cell_count(g.r, depth, cell_budget), 0.0);
  refine_recurse(seq, depth, 0, 0, full_mask(g.r), 1.0, g);
  return g;
}

GridMeasure nest_grid(const GridMeasure& outer, std::span<const Vertex> cell,
                      const GridMeasure& inner) {
  require(outer.r == inner.r, Errc::bounds, "grids must share the dimension");
  require(static_cast<int>(cell.size()) == outer.depth, Errc::validation,
          "target cell must be given at the stored resolution, where cell content is uniform");
  const std::size_t target = outer.index(cell);
  const int bits = outer.r * (outer.depth + inner.depth);
  require(bits < 63, Errc::budget, "nested grid overflows the index space");
  const std::size_t cells = std::size_t{1} << bits;
  require(cells <= kGridCellBudget, Errc::budget, "nested grid exceeds the cell budget");

  GridMeasure out;
  out.r = outer.r;
  out.depth = outer.depth + inner.depth;
  out.splits = outer.splits;
  out.splits.insert(out.splits.end(), inner.splits.begin(), inner.splits.end());
  out.mass.assign(cells, 0.0);

  // uniform refinement volumes of the inner grid, used away from the target
  std::vector<double> volume(inner.mass.size());
  std::vector<Vertex> decoded(inner.depth);
  for (std::size_t s = 0; s < inner.mass.size(); ++s) {
    for (int l = 0; l < inner.depth; ++l) decoded[l] = Vertex(s >> (inner.r * l)) & full_mask(inner.r);
    volume[s] = inner.cell_volume(decoded);
  }

  const int shift = outer.r * outer.depth;
  for (std::size_t o = 0; o < outer.mass.size(); ++o) {
    const double base = outer.mass[o];
    const bool in_target = o == target;
    if (base == 0.0) continue;
    for (std::size_t s = 0; s < inner.mass.size(); ++s) {
      const double f = in_target ? inner.mass[s] : volume[s];
      if (f != 0.0) out.mass[o | (s << shift)] = base * f;
    }
  }
  return out;
}

GridMeasure self_nest_grid(const VertexCopula& c, int depth, std::size_t cell_budget) {
  require(depth >= 0, Errc::bounds, "depth must be nonnegative");
  GridMeasure g;
  g.r = c.dimension();
  g.depth = depth;
  for (int l = 0; l < depth; ++l) g.splits.push_back(c.u);
  g.mass.assign(checked_cell_count(g.r, depth, cell_budget), 0.0);
  const std::size_t cells = g.mass.size();
  for (std::size_t idx = 0; idx < cells; ++idx) {
    double m = 1.0;
    for (int l = 0; l < depth && m != 0.0; ++l) {
      m *= c.z[(idx >> (g.r * l)) & full_mask(g.r)];
    }
    g.mass[idx] = m;
  }
  return g;
}

}  // namespace tailnest
