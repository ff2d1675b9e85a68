#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "core/nest.hpp"
#include "support.hpp"

using namespace tailnest;

namespace {

NestSequence repeat_level(const VertexCopula& c, int k, int depth) {
  std::vector<VertexCopula> levels(depth, c);
  return NestSequence::build(c.dimension(), k, std::move(levels));
}

// the one-parameter family in two dimensions: corner mass p at the central split
VertexCopula two_dim_family(double p) {
  return VertexCopula::make({0.5, 0.5}, s_transform(std::vector<double>{p, 0.5, 0.5, 1.0}), 1);
}

NestSequence random_sequence(std::mt19937_64& gen, int r, int k, int depth) {
  std::vector<VertexCopula> levels;
  for (int l = 0; l < depth; ++l) levels.push_back(testsupport::random_order_k_copula(gen, r, k));
  return NestSequence::build(r, k, std::move(levels));
}

bool grid_uniform_on_small_faces(const GridMeasure& g, int k, double tol) {
  if (k == 0) return std::abs(g.total() - 1.0) <= tol;
  for (Vertex keep = 1; keep <= full_mask(g.r); ++keep) {
    if (popcount(keep) != k) continue;
    const GridMeasure proj = g.project_onto(keep);
    std::vector<Vertex> cell(proj.depth);
    for (std::size_t idx = 0; idx < proj.mass.size(); ++idx) {
      for (int l = 0; l < proj.depth; ++l) cell[l] = Vertex(idx >> (proj.r * l)) & full_mask(proj.r);
      if (std::abs(proj.mass[idx] - proj.cell_volume(cell)) > tol) return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("sequence construction validates levels") {
  CHECK_THROWS_AS(NestSequence::build(0, 0, {}), Error);
  CHECK_THROWS_AS(NestSequence::build(2, 3, {}), Error);
  // dimension mismatch between declared r and a level
  std::vector<VertexCopula> levels{two_dim_family(0.3)};
  CHECK_THROWS_AS(NestSequence::build(3, 1, std::move(levels)), Error);
  CHECK_NOTHROW(NestSequence::uniform(4, 2));
}

TEST_CASE("empty sequence is the uniform law at any depth") {
  const NestSequence seq = NestSequence::uniform(3, 1);
  CHECK(seq.depth() == 0);
  std::mt19937_64 gen(2);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<double> w(3);
    double expect = 1.0;
    for (auto& v : w) {
      v = testsupport::unit_real(gen);
      expect *= v;
    }
    CHECK(seq.cdf(w) == doctest::Approx(expect).epsilon(kExactTol));
  }
}

TEST_CASE("two-dimensional family: corner chain and dyadic independence") {
  const NestSequence seq = repeat_level(two_dim_family(0.35), 1, 10);
  for (int n = 1; n <= 10; ++n) {
    const double w = std::ldexp(1.0, -n);
    CHECK(seq.cdf(std::vector<double>{w, w}) ==
          doctest::Approx(std::pow(0.35, n)).epsilon(kExactTol));
  }

  const NestSequence unif = repeat_level(two_dim_family(0.25), 1, 6);
  for (int i = 1; i <= 64; ++i) {
    for (int j = 1; j <= 64; j += 7) {
      const std::vector<double> w{i / 64.0, j / 64.0};
      CHECK(std::abs(unif.cdf(w) - w[0] * w[1]) <= kExactTol);
    }
  }
}

TEST_CASE("parity sequence: diagonal decay and corner masses") {
  const VertexCopula par = parity_copula(3);
  const NestSequence seq = repeat_level(par, 2, 8);
  for (int n = 1; n <= 8; ++n) {
    const double w = std::ldexp(1.0, -n);
    CHECK(seq.cdf(std::vector<double>{w, w, w}) ==
          doctest::Approx(std::ldexp(1.0, -2 * n)).epsilon(kExactTol));
  }

  CHECK(seq.corner_mass(5, 0) == doctest::Approx(std::pow(0.25, 5)).epsilon(kExactTol));
  CHECK(seq.corner_mass(8, full_mask(3)) == 1.0);
  // one zero bit: the corner mass follows the single remaining margin
  for (Vertex v : {Vertex(0b011), Vertex(0b101), Vertex(0b110)}) {
    CHECK(seq.corner_mass(4, v) == doctest::Approx(std::ldexp(1.0, -4)).epsilon(kExactTol));
  }

  const std::vector<double> d = seq.corner(6);
  for (double di : d) CHECK(di == doctest::Approx(std::ldexp(1.0, -6)));
}

TEST_CASE("corner masses equal the projected corner distribution") {
  std::mt19937_64 gen(77);
  const NestSequence seq = random_sequence(gen, 3, 1, 6);
  for (int n = 0; n <= 6; ++n) {
    const std::vector<double> d = seq.corner(n);
    for (Vertex v = 0; v <= full_mask(3); ++v) {
      if (v == full_mask(3)) {
        CHECK(seq.corner_mass(n, v) == 1.0);
        continue;
      }
      const NestSequence proj = seq.project(v);
      std::vector<double> w;
      for (int i = 0; i < 3; ++i) {
        if (!(v >> i & 1u)) w.push_back(d[i]);
      }
      CHECK(std::abs(seq.corner_mass(n, v) - proj.cdf(w, n)) <= kExactTol);
    }
  }
}

TEST_CASE("projection drops coordinates of the distribution function") {
  std::mt19937_64 gen(12);
  for (int k : {1, 2}) {
    const NestSequence seq = random_sequence(gen, 3, k, 5);
    for (Vertex v = 1; v < full_mask(3); ++v) {
      const NestSequence proj = seq.project(v);
      CHECK(proj.dimension() == zero_count(v, 3));
      for (int rep = 0; rep < 10; ++rep) {
        std::vector<double> lifted(3, 1.0);
        std::vector<double> small;
        for (int i = 0; i < 3; ++i) {
          if (!(v >> i & 1u)) {
            const double w = testsupport::unit_real(gen);
            lifted[i] = w;
            small.push_back(w);
          }
        }
        CHECK(std::abs(seq.cdf(lifted) - proj.cdf(small)) <= kExactTol);
      }
    }
  }
}

TEST_CASE("parity sequence projects to the uniform law on every single coordinate pair") {
  const NestSequence seq = repeat_level(parity_copula(3), 2, 8);
  for (Vertex v : {Vertex(0b100), Vertex(0b010), Vertex(0b001)}) {
    const NestSequence proj = seq.project(v);
    const GridMeasure g = refine_to_grid(proj, 8);
    const double want = std::ldexp(1.0, -16);  // every depth-8 cell of the halving grid
    for (double m : g.mass) CHECK(std::abs(m - want) <= kExactTol);
  }
  CHECK_THROWS_AS(seq.project(full_mask(3)), Error);
}

TEST_CASE("grid masses agree with inclusion-exclusion over the distribution function") {
  std::mt19937_64 gen(31);
  for (int k : {0, 1, 2}) {
    const NestSequence seq = random_sequence(gen, 3, k, 3);
    const GridMeasure g = refine_to_grid(seq, 3);
    CHECK(g.total() == doctest::Approx(1.0).epsilon(kExactTol));

    auto cdf = [&](std::span<const double> w) { return seq.cdf(w, 3); };
    std::vector<Vertex> cell(3);
    std::vector<double> lo(3), hi(3);
    double worst = 0.0;
    for (std::size_t idx = 0; idx < g.mass.size(); ++idx) {
      for (int l = 0; l < 3; ++l) cell[l] = Vertex(idx >> (3 * l)) & full_mask(3);
      for (int i = 0; i < 3; ++i) std::tie(lo[i], hi[i]) = g.interval(i, cell);
      worst = std::max(worst, std::abs(g.mass[idx] - testsupport::box_mass_from_cdf(cdf, lo, hi)));
    }
    CHECK(worst <= kExactTol);
  }
}

TEST_CASE("refinement budget is enforced") {
  const NestSequence seq = repeat_level(parity_copula(3), 2, 9);
  CHECK_THROWS_AS(refine_to_grid(seq, 9), Error);  // 2^27 cells
  try {
    refine_to_grid(seq, 9);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::budget);
  }
}

TEST_CASE("order-k sequences stay uniform on every small face of the grid") {
  std::mt19937_64 gen(47);
  for (int k : {1, 2}) {
    const NestSequence seq = random_sequence(gen, 3, k, 2);
    const GridMeasure g = refine_to_grid(seq, 2);
    CHECK(grid_uniform_on_small_faces(g, k, 1e-10));
  }
}

TEST_CASE("content within a refined cell is uniform") {
  std::mt19937_64 gen(53);
  const NestSequence seq = random_sequence(gen, 3, 1, 4);
  const GridMeasure g = refine_to_grid(seq, 2);
  auto cdf = [&](std::span<const double> w) { return seq.cdf(w, 2); };
  std::vector<Vertex> cell(2);
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t idx = gen() % g.mass.size();
    for (int l = 0; l < 2; ++l) cell[l] = Vertex(idx >> (3 * l)) & full_mask(3);
    const double density = g.mass[idx] / g.cell_volume(cell);
    // random sub-box of the cell
    std::vector<double> lo(3), hi(3);
    double vol = 1.0;
    for (int i = 0; i < 3; ++i) {
      auto [a, b] = g.interval(i, cell);
      double s = a + (b - a) * testsupport::unit_real(gen);
      double t = a + (b - a) * testsupport::unit_real(gen);
      lo[i] = std::min(s, t);
      hi[i] = std::max(s, t);
      vol *= hi[i] - lo[i];
    }
    CHECK(std::abs(testsupport::box_mass_from_cdf(cdf, lo, hi) - density * vol) <= 1e-10);
  }
}

TEST_CASE("truncation depth only matters inside the shrinking corner box") {
  std::mt19937_64 gen(59);
  const NestSequence seq = random_sequence(gen, 3, 1, 5);
  for (int n = 1; n < 5; ++n) {
    const std::vector<double> d = seq.corner(n);
    for (int rep = 0; rep < 30; ++rep) {
      std::vector<double> lo(3), hi(3);
      for (int i = 0; i < 3; ++i) {
        // keep the box clear of the corner range on every coordinate
        lo[i] = d[i] + (1.0 - d[i]) * testsupport::unit_real(gen);
        hi[i] = lo[i] + (1.0 - lo[i]) * testsupport::unit_real(gen);
      }
      auto shallow = [&](std::span<const double> w) { return seq.cdf(w, n); };
      auto deep = [&](std::span<const double> w) { return seq.cdf(w, n + 1); };
      CHECK(std::abs(testsupport::box_mass_from_cdf(shallow, lo, hi) -
                     testsupport::box_mass_from_cdf(deep, lo, hi)) <= kExactTol);
    }
  }
}

TEST_CASE("query validation") {
  const NestSequence seq = repeat_level(two_dim_family(0.3), 1, 2);
  CHECK_THROWS_AS(seq.cdf(std::vector<double>{0.5}), Error);
  CHECK_THROWS_AS(seq.cdf(std::vector<double>{0.5, 1.5}), Error);
  CHECK_THROWS_AS(seq.cdf(std::vector<double>{-0.1, 0.5}), Error);
  CHECK_THROWS_AS(seq.cdf(std::vector<double>{0.5, 0.5}, 3), Error);
  CHECK_THROWS_AS(seq.corner_mass(3, 0), Error);
  CHECK_THROWS_AS(seq.corner_mass(1, 8), Error);
  CHECK(seq.cdf(std::vector<double>{1.0, 1.0}) == doctest::Approx(1.0));
  CHECK(seq.cdf(std::vector<double>{0.0, 0.7}) == 0.0);
}

TEST_CASE("nesting a uniform grid refines without changing the measure") {
  std::mt19937_64 gen(61);
  const NestSequence seq = random_sequence(gen, 2, 1, 1);
  const GridMeasure outer = refine_to_grid(seq, 1);
  const GridMeasure inner = refine_to_grid(NestSequence::uniform(2, 1), 0);

  // depth-1 uniform inner at a fresh split
  const VertexCopula u = VertexCopula::uniform({0.4, 0.6}, 1);
  const GridMeasure inner1 = refine_to_grid(repeat_level(u, 1, 1), 1);

  for (Vertex target = 0; target < 4; ++target) {
    std::vector<Vertex> cell{target};
    const GridMeasure nested = nest_grid(outer, cell, inner1);
    // independent route: append the uniform level to the sequence itself
    std::vector<VertexCopula> levels{
        VertexCopula::make(seq.level(0).u, seq.level(0).z, 1), u};
    const GridMeasure direct = refine_to_grid(NestSequence::build(2, 1, std::move(levels)), 2);
    CHECK(testsupport::max_abs_diff(nested.mass, direct.mass) <= kExactTol);
  }
  CHECK(inner.depth == 0);
}

TEST_CASE("nesting the family into its own corner cell reproduces the depth-two law") {
  const VertexCopula c = two_dim_family(0.35);
  const GridMeasure g1 = refine_to_grid(repeat_level(c, 1, 1), 1);
  const std::vector<Vertex> corner_cell{0};
  const GridMeasure nested = nest_grid(g1, corner_cell, g1);
  const GridMeasure direct = refine_to_grid(repeat_level(c, 1, 2), 2);
  REQUIRE(nested.mass.size() == direct.mass.size());
  CHECK(testsupport::max_abs_diff(nested.mass, direct.mass) <= kExactTol);
}

TEST_CASE("nesting preserves uniformity on small faces") {
  std::mt19937_64 gen(67);
  for (int k : {1, 2}) {
    const NestSequence a = random_sequence(gen, 3, k, 1);
    // inner measure at the same split and order
    const std::vector<double> zb = testsupport::random_order_k_weights(gen, a.level(0).u, k);
    const GridMeasure outer = refine_to_grid(a, 1);
    GridMeasure inner;
    inner.r = 3;
    inner.depth = 1;
    inner.splits = {a.level(0).u};
    inner.mass = zb;
    for (Vertex target : {Vertex(0), Vertex(0b011), Vertex(0b111)}) {
      const std::vector<Vertex> cell{target};
      const GridMeasure nested = nest_grid(outer, cell, inner);
      CHECK(grid_uniform_on_small_faces(nested, k, 1e-10));
    }
  }
}

TEST_CASE("nest target must name a full-resolution cell") {
  const VertexCopula c = two_dim_family(0.3);
  const GridMeasure g2 = refine_to_grid(repeat_level(c, 1, 2), 2);
  const GridMeasure g1 = refine_to_grid(repeat_level(c, 1, 1), 1);
  const std::vector<Vertex> prefix{0};  // depth-1 index into a depth-2 grid
  CHECK_THROWS_AS(nest_grid(g2, prefix, g1), Error);
  const std::vector<Vertex> bad{0, 7};
  CHECK_THROWS_AS(nest_grid(g2, bad, g1), Error);
}

TEST_CASE("self-similar nesting keeps every branch") {
  const VertexCopula par = parity_copula(3);
  const GridMeasure g = self_nest_grid(par, 2);
  int support = 0;
  for (std::size_t idx = 0; idx < g.mass.size(); ++idx) {
    const Vertex v1 = Vertex(idx) & 7u;
    const Vertex v2 = Vertex(idx >> 3) & 7u;
    const double want =
        (popcount(v1) % 2 == 0 && popcount(v2) % 2 == 0) ? 1.0 / 16.0 : 0.0;
    CHECK(g.mass[idx] == doctest::Approx(want).epsilon(1e-15));
    if (g.mass[idx] > 0) ++support;
  }
  CHECK(support == 16);
  // still a copula with uniform pair projections
  CHECK(grid_uniform_on_small_faces(g, 2, 1e-12));

  // differs from the corner-directed law away from the corner chain:
  // cell (1,1,0) then (0,1,0) carries mass there but none here
  const NestSequence tail = repeat_level(par, 2, 2);
  const GridMeasure tg = refine_to_grid(tail, 2);
  const std::size_t idx = 0b011 | (std::size_t{0b010} << 3);
  CHECK(g.mass[idx] == 0.0);
  CHECK(tg.mass[idx] == doctest::Approx(1.0 / 32.0));
}

TEST_CASE("grid bookkeeping") {
  const VertexCopula c = two_dim_family(0.3);
  const GridMeasure g = refine_to_grid(repeat_level(c, 1, 2), 2);
  const std::vector<Vertex> cell{Vertex(0b01), Vertex(0b10)};
  CHECK(g.index(cell) == (0b01 | (0b10 << 2)));
  auto [lo0, hi0] = g.interval(0, cell);
  CHECK(lo0 == doctest::Approx(0.5));   // high at level 1, low at level 2
  CHECK(hi0 == doctest::Approx(0.75));
  auto [lo1, hi1] = g.interval(1, cell);
  CHECK(lo1 == doctest::Approx(0.25));  // low at level 1, high at level 2
  CHECK(hi1 == doctest::Approx(0.5));
  CHECK(g.cell_volume(cell) == doctest::Approx(1.0 / 16.0));
}
