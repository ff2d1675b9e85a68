#include "core/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "core/error.hpp"
#include "core/stats.hpp"

namespace tailnest {

namespace {

void require_scales(std::span<const double> scales) {
  require(!scales.empty(), Errc::validation, "need at least one scan scale");
  for (double s : scales) {
    require(std::isfinite(s) && s > 0.0 && s <= 1.0, Errc::validation,
            "scan scales must lie in (0, 1]");
  }
}

std::size_t locate_cell(const GridMeasure& g, const double* x) {
  std::size_t idx = 0;
  for (int i = 0; i < g.r; ++i) {
    double lo = 0.0, hi = 1.0;
    for (int l = 0; l < g.depth; ++l) {
      const double split = lo + (hi - lo) * g.splits[std::size_t(l)][std::size_t(i)];
      if (x[i] >= split) {
        lo = split;
        idx |= std::size_t(1) << (g.r * l + i);
      } else {
        hi = split;
      }
    }
  }
  return idx;
}

}  // namespace

TailScan tail_scan(const NestSequence& seq, Vertex face, std::span<const double> scales) {
  require_scales(scales);
  require(face != full_mask(seq.dimension()), Errc::bounds,
          "the scanned face must keep at least one coordinate");
  const NestSequence proj = face == 0 ? seq : seq.project(face);
  TailScan scan;
  scan.face = face;
  scan.scales.assign(scales.begin(), scales.end());
  scan.mass.reserve(scales.size());
  std::vector<double> w(std::size_t(proj.dimension()));
  for (double s : scales) {
    std::fill(w.begin(), w.end(), s);
    scan.mass.push_back(proj.cdf(w));
  }
  return scan;
}

std::vector<double> schedule_points(const NestSequence& seq, Vertex face, int max_points) {
  require(face != full_mask(seq.dimension()), Errc::bounds,
          "the scanned face must keep at least one coordinate");
  require(max_points >= 0, Errc::bounds, "max_points must be nonnegative");
  const NestSequence proj = face == 0 ? seq : seq.project(face);
  const int count = max_points == 0 ? proj.depth() : std::min(max_points, proj.depth());
  std::vector<double> points;
  points.reserve(std::size_t(count));
  for (int n = 1; n <= count; ++n) {
    const std::vector<double> corner = proj.corner(n);
    for (double c : corner) {
      require(std::abs(c - corner[0]) <= 1e-12 * std::max(1.0, std::abs(corner[0])),
              Errc::validation, "schedule scan needs equal splits on the scanned face");
    }
    points.push_back(corner[0]);
  }
  return points;
}

TailFit fit_tail(std::span<const double> scales, std::span<const double> mass) {
  const std::size_t n = scales.size();
  require(n >= 2 && mass.size() == n, Errc::validation,
          "fitting needs at least two scan points with one mass each");
  require_scales(scales);
  TailFit fit;
  for (double m : mass) {
    require(std::isfinite(m) && m <= 1.0 + kProbTol, Errc::validation,
            "masses must be probabilities");
    if (m <= 0.0) {
      fit.degenerate = true;
      fit.degree = std::numeric_limits<double>::infinity();
      fit.coefficient = 0.0;
      return fit;
    }
  }

  std::vector<double> lx(n), ly(n);
  for (std::size_t i = 0; i < n; ++i) {
    lx[i] = std::log(scales[i]);
    ly[i] = std::log(mass[i]);
  }
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / double(n);
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / double(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  require(sxx > 0.0, Errc::validation, "scan scales must not all coincide");
  fit.degree = sxy / sxx;
  const double intercept = my - fit.degree * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = ly[i] - (intercept + fit.degree * lx[i]);
    ss += d * d;
  }
  fit.residual = std::sqrt(ss / double(n));

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scales[a] < scales[b]; });
  const std::size_t half = (n + 1) / 2;
  double log_sum = 0.0;
  double vmin = std::numeric_limits<double>::infinity();
  double vmax = 0.0;
  for (std::size_t j = 0; j < half; ++j) {
    const std::size_t i = order[j];
    const double lv = ly[i] - fit.degree * lx[i];
    log_sum += lv;
    vmin = std::min(vmin, std::exp(lv));
    vmax = std::max(vmax, std::exp(lv));
  }
  fit.coefficient = std::exp(log_sum / double(half));
  fit.ratio_spread = vmax / vmin;
  return fit;
}

double reference_cdf(ReferenceFamily family, double theta, std::span<const double> u) {
  require(!u.empty(), Errc::bounds, "reference point must have at least one coordinate");
  for (double ui : u) {
    require(std::isfinite(ui) && ui >= 0.0 && ui <= 1.0, Errc::bounds,
            "reference point coordinates must lie in [0, 1]");
    if (ui == 0.0) return 0.0;
  }
  switch (family) {
    case ReferenceFamily::independence: {
      double p = 1.0;
      for (double ui : u) p *= ui;
      return p;
    }
    case ReferenceFamily::clayton: {
      require(theta > 0.0, Errc::bounds, "clayton parameter must be positive");
      double acc = 1.0 - double(u.size());
      for (double ui : u) acc += std::pow(ui, -theta);
      return std::pow(acc, -1.0 / theta);
    }
    case ReferenceFamily::gumbel: {
      require(theta >= 1.0, Errc::bounds, "gumbel parameter must be at least one");
      double acc = 0.0;
      for (double ui : u) acc += std::pow(-std::log(ui), theta);
      return std::exp(-std::pow(acc, 1.0 / theta));
    }
  }
  fail(Errc::internal, "unknown reference family");
}

std::vector<double> reference_diagonal(ReferenceFamily family, double theta, int dim,
                                       std::span<const double> scales) {
  require(dim >= 1 && dim <= kMaxDimensionHard, Errc::bounds, "dimension out of range");
  require_scales(scales);
  std::vector<double> mass;
  mass.reserve(scales.size());
  std::vector<double> u(std::size_t(dim), 0.0);
  for (double s : scales) {
    std::fill(u.begin(), u.end(), s);
    mass.push_back(reference_cdf(family, theta, u));
  }
  return mass;
}

GofReport gof_report(const NestSequence& seq, std::span<const double> rows, int depth) {
  const int r = seq.dimension();
  require(r >= 1 && rows.size() % std::size_t(r) == 0, Errc::bounds,
          "sample buffer must hold whole rows");
  const std::size_t n = rows.size() / std::size_t(r);
  require(n > 0, Errc::bounds, "need samples to compare");
  const GridMeasure g = refine_to_grid(seq, depth);

  std::size_t support_cells = 0;
  for (double m : g.mass) support_cells += m > 0.0;
  require(support_cells > 0, Errc::internal, "refinement carries no mass");
  require(double(n) / double(support_cells) >= 50.0, Errc::bounds,
          "too few samples per nonempty cell for a stable comparison");

  std::vector<std::uint64_t> hits(g.mass.size(), 0);
  for (std::size_t s = 0; s < n; ++s) ++hits[locate_cell(g, rows.data() + std::size_t(r) * s)];

  GofReport report;
  report.samples = n;
  report.depth = depth;

  double pooled_expected = 0.0;
  std::uint64_t pooled_hits = 0;
  double kept_chi = 0.0;
  int kept = 0;
  double best_expected = 0.0;
  for (std::size_t c = 0; c < g.mass.size(); ++c) {
    const double expected = double(n) * g.mass[c];
    if (g.mass[c] == 0.0) {
      report.off_support_hits += hits[c];
      continue;
    }
    if (expected < 5.0) {
      pooled_expected += expected;
      pooled_hits += hits[c];
      continue;
    }
    const double d = double(hits[c]) - expected;
    kept_chi += d * d / expected;
    ++kept;
    best_expected = std::max(best_expected, expected);
    report.max_sigma = std::max(
        report.max_sigma, std::abs(d) / std::sqrt(expected * (1.0 - g.mass[c])));
  }
  if (pooled_expected > 0.0) {
    if (pooled_expected >= 5.0 || kept == 0) {
      const double d = double(pooled_hits) - pooled_expected;
      kept_chi += d * d / pooled_expected;
      ++kept;
    } else {
      // fold a too-small pooled remainder into the heaviest cell's bucket by
      // recomputing that cell with the remainder attached
      double fold_expected = pooled_expected;
      std::uint64_t fold_hits = pooled_hits;
      for (std::size_t c = 0; c < g.mass.size(); ++c) {
        const double expected = double(n) * g.mass[c];
        if (expected == best_expected) {
          const double d0 = double(hits[c]) - expected;
          kept_chi -= d0 * d0 / expected;
          fold_expected += expected;
          fold_hits += hits[c];
          break;
        }
      }
      const double d = double(fold_hits) - fold_expected;
      kept_chi += d * d / fold_expected;
    }
  }
  report.buckets = kept;
  report.chi_square = kept_chi;
  report.dof = std::max(1, kept - 1);
  report.p_value = chi_square_tail(report.chi_square, report.dof);
  return report;
}

}  // namespace tailnest
