#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "core/analysis.hpp"
#include "core/sampler.hpp"
#include "core/shaper.hpp"
#include "support.hpp"

using namespace tailnest;

namespace {

NestSequence repeat_level(const VertexCopula& c, int k, int depth) {
  std::vector<VertexCopula> levels(depth, c);
  return NestSequence::build(c.dimension(), k, std::move(levels));
}

NestSequence growing_sequence(int depth) {
  std::vector<double> a(8, 1.0);
  std::vector<double> b{1.8, 1.5, 1.4, 1.0, 1.3, 1.0, 1.0, 0.0};
  return build_increasing(TailSpec::make(3, 1, std::move(a), std::move(b)), depth).seq;
}

std::vector<double> dyadic_scales(int from, int to) {
  std::vector<double> s;
  for (int e = from; e <= to; ++e) s.push_back(std::ldexp(1.0, -e));
  return s;
}

}  // namespace

TEST_CASE("reference distribution functions at hand-computed points") {
  CHECK(reference_cdf(ReferenceFamily::clayton, 1.0, std::vector<double>{0.25, 0.25}) ==
        doctest::Approx(0.14285714285714285).epsilon(1e-14));
  CHECK(reference_cdf(ReferenceFamily::gumbel, 2.0, std::vector<double>{0.3, 0.4}) ==
        doctest::Approx(0.22025040877213556).epsilon(1e-14));
  CHECK(reference_cdf(ReferenceFamily::clayton, 1.0, std::vector<double>{0.2, 0.3, 0.4}) ==
        doctest::Approx(0.11320754716981131).epsilon(1e-14));
  CHECK(reference_cdf(ReferenceFamily::independence, 0.0, std::vector<double>{0.2, 0.5}) ==
        doctest::Approx(0.1).epsilon(1e-14));
  CHECK(reference_cdf(ReferenceFamily::clayton, 2.5, std::vector<double>{0.0, 0.5}) == 0.0);
  CHECK(reference_cdf(ReferenceFamily::gumbel, 1.5, std::vector<double>{1.0, 1.0}) ==
        doctest::Approx(1.0).epsilon(1e-14));
  // gumbel with unit parameter degenerates to independence
  CHECK(reference_cdf(ReferenceFamily::gumbel, 1.0, std::vector<double>{0.3, 0.7}) ==
        doctest::Approx(0.21).epsilon(1e-12));
  CHECK_THROWS_AS(reference_cdf(ReferenceFamily::clayton, 0.0, std::vector<double>{0.5}), Error);
  CHECK_THROWS_AS(reference_cdf(ReferenceFamily::gumbel, 0.5, std::vector<double>{0.5}), Error);
  CHECK_THROWS_AS(reference_cdf(ReferenceFamily::clayton, 1.0, std::vector<double>{1.5}), Error);
}

TEST_CASE("reference diagonals and their fitted tail behaviour") {
  const std::vector<double> scales = dyadic_scales(4, 20);

  const std::vector<double> clay =
      reference_diagonal(ReferenceFamily::clayton, 1.0, 2, scales);
  for (std::size_t i = 0; i < scales.size(); ++i) {
    CHECK(clay[i] == doctest::Approx(scales[i] / (2.0 - scales[i])).epsilon(1e-14));
  }
  const TailFit cfit = fit_tail(scales, clay);
  CHECK(cfit.degree == doctest::Approx(1.0015650041126885).epsilon(1e-10));
  CHECK(cfit.coefficient == doctest::Approx(0.50876774934347679).epsilon(1e-10));
  CHECK(cfit.residual == doctest::Approx(0.0060543217284545143).epsilon(1e-8));
  CHECK(cfit.ratio_spread == doctest::Approx(1.0085933371290099).epsilon(1e-10));

  const std::vector<double> gum =
      reference_diagonal(ReferenceFamily::gumbel, 2.0, 2, scales);
  const TailFit gfit = fit_tail(scales, gum);
  CHECK(gfit.degree == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  CHECK(gfit.coefficient == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(gfit.residual <= 1e-12);
  CHECK(gfit.ratio_spread == doctest::Approx(1.0).epsilon(1e-10));

  const std::vector<double> clay3 =
      reference_diagonal(ReferenceFamily::clayton, 1.0, 3, scales);
  const TailFit c3fit = fit_tail(scales, clay3);
  CHECK(c3fit.degree == doctest::Approx(1.002094864839514).epsilon(1e-10));
  CHECK(c3fit.coefficient == doctest::Approx(0.3411805758705907).epsilon(1e-10));
}

TEST_CASE("tail fitting on exact power data and degenerate data") {
  const std::vector<double> scales = dyadic_scales(2, 12);
  std::vector<double> mass;
  for (double s : scales) mass.push_back(0.7 * std::pow(s, 1.3));
  const TailFit fit = fit_tail(scales, mass);
  CHECK(fit.degree == doctest::Approx(1.3).epsilon(1e-12));
  CHECK(fit.coefficient == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(fit.residual <= 1e-13);
  CHECK(fit.ratio_spread == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(!fit.degenerate);

  mass[4] = 0.0;
  const TailFit degen = fit_tail(scales, mass);
  CHECK(degen.degenerate);
  CHECK(std::isinf(degen.degree));
  CHECK(degen.coefficient == 0.0);

  CHECK_THROWS_AS(fit_tail(std::vector<double>{0.5}, std::vector<double>{0.25}), Error);
  CHECK_THROWS_AS(fit_tail(std::vector<double>{0.5, 0.25}, std::vector<double>{0.25}), Error);
  CHECK_THROWS_AS(fit_tail(std::vector<double>{0.5, 0.5}, std::vector<double>{0.2, 0.2}), Error);
}

TEST_CASE("scans recover the prescribed face exponents exactly on schedule") {
  const NestSequence seq = growing_sequence(12);
  const std::vector<double> schedule = schedule_points(seq, 0);
  REQUIRE(schedule.size() == 12);
  for (int n = 1; n <= 12; ++n) {
    CHECK(schedule[std::size_t(n) - 1] == doctest::Approx(std::ldexp(1.0, -n)).epsilon(1e-14));
  }

  const std::vector<std::pair<Vertex, double>> faces{
      {0, 1.8}, {4, 1.3}, {2, 1.4}, {1, 1.5}, {3, 1.0}};
  for (const auto& [face, want] : faces) {
    const TailScan scan = tail_scan(seq, face, schedule);
    for (std::size_t i = 0; i < schedule.size(); ++i) {
      CHECK(scan.mass[i] ==
            doctest::Approx(std::pow(schedule[i], want)).epsilon(1e-11));
    }
    const TailFit fit = fit_tail(scan.scales, scan.mass);
    CHECK(fit.degree == doctest::Approx(want).epsilon(1e-9));
    CHECK(fit.coefficient == doctest::Approx(1.0).epsilon(1e-9));
  }

  // off-schedule scan points still fit the degree to within a small error
  const std::vector<double> off{0.7, 0.3, 0.11, 0.04, 0.013, 0.0041, 0.0011, 0.00034};
  const TailFit off_fit = fit_tail(off, tail_scan(seq, 0, off).mass);
  CHECK(std::abs(off_fit.degree - 1.8) < 0.05);
}

TEST_CASE("scan bookkeeping and validation") {
  const NestSequence seq = growing_sequence(6);
  const TailScan direct = tail_scan(seq, 4, std::vector<double>{0.5, 0.1, 0.02});
  const TailScan via_projection =
      tail_scan(seq.project(4), 0, std::vector<double>{0.5, 0.1, 0.02});
  CHECK(testsupport::max_abs_diff(direct.mass, via_projection.mass) <= 1e-15);
  CHECK(direct.face == 4);

  CHECK_THROWS_AS(tail_scan(seq, full_mask(3), std::vector<double>{0.5}), Error);
  CHECK_THROWS_AS(tail_scan(seq, 0, std::vector<double>{}), Error);
  CHECK_THROWS_AS(tail_scan(seq, 0, std::vector<double>{0.0}), Error);
  CHECK_THROWS_AS(tail_scan(seq, 0, std::vector<double>{1.5}), Error);

  CHECK(schedule_points(seq, 0, 4).size() == 4);
  CHECK(schedule_points(seq, 3, 0).size() == 6);

  // unequal splits across kept coordinates have no diagonal schedule
  const NestSequence uneven = repeat_level(VertexCopula::uniform({0.3, 0.6}, 1), 1, 3);
  CHECK_THROWS_AS(schedule_points(uneven, 0), Error);
  CHECK(schedule_points(uneven, 1, 0).size() == 3);  // single-coordinate face is fine
}

TEST_CASE("goodness-of-fit report against the exact refinement") {
  const NestSequence seq = repeat_level(parity_copula(3), 2, 6);
  SampleOptions opt;
  opt.seed = 19;
  opt.threads = 2;
  const std::size_t n = 200000;
  const std::vector<double> rows = sample(seq, n, opt);
  const GofReport report = gof_report(seq, rows, 2);
  CHECK(report.samples == n);
  CHECK(report.depth == 2);
  CHECK(report.buckets == 28);
  CHECK(report.dof == 27);
  CHECK(report.off_support_hits == 0);
  CHECK(report.p_value > 1e-3);
  CHECK(report.max_sigma <= 4.0);
  CHECK(report.pass());

  // a shifted cloud lands off support and fails
  std::vector<double> shifted = rows;
  for (double& v : shifted) v *= 0.5;
  const GofReport bad = gof_report(seq, shifted, 1);
  CHECK(!bad.pass());

  CHECK_THROWS_AS(gof_report(seq, std::span<const double>(rows.data(), 3 * 100), 2), Error);
  CHECK_THROWS_AS(gof_report(seq, std::span<const double>(rows.data(), 100), 2), Error);
}

TEST_CASE("goodness-of-fit pools thin cells") {
  // first level: two cells of probability one half permille
  const std::vector<double> x{0.0005, 0.5, 0.5, 1.0};
  const VertexCopula c = VertexCopula::make({0.5, 0.5}, s_transform(x), 1);
  const NestSequence seq = repeat_level(c, 1, 1);
  SampleOptions opt;
  opt.seed = 23;
  const std::size_t n = 5000;
  const std::vector<double> rows = sample(seq, n, opt);
  const GofReport report = gof_report(seq, rows, 1);
  // two heavy cells kept, the two thin ones pooled into a third bucket
  CHECK(report.buckets == 3);
  CHECK(report.dof == 2);
  CHECK(report.pass());
}
