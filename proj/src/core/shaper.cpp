#include "core/shaper.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "core/error.hpp"

namespace tailnest {

namespace {

void require_profile_arrays(int r, int k, std::span<const double> a, std::span<const double> b) {
  require(r >= 1 && r <= kMaxDimensionHard, Errc::bounds, "dimension out of range");
  require(k >= 0 && k <= r, Errc::bounds, "uniformity order out of range");
  const std::size_t n = std::size_t(1) << r;
  require(a.size() == n && b.size() == n, Errc::validation,
          "coefficient and exponent arrays must hold one entry per vertex");
  for (std::size_t v = 0; v < n; ++v) {
    require(std::isfinite(a[v]) && a[v] > 0.0, Errc::validation,
            "coefficients must be positive and finite");
    require(std::isfinite(b[v]) && b[v] >= 0.0, Errc::validation,
            "exponents must be nonnegative and finite");
  }
}

// spread the coefficient a(v) across `depth` levels: level n takes the share
// 2^{-n} / (1 - 2^{-depth}), so the shares sum to one exactly
double level_share(int level, int depth) {
  return std::ldexp(1.0, -level) / (1.0 - std::ldexp(1.0, -depth));
}

VertexCopula validated_level(const std::vector<double>& u, const std::vector<double>& x, int k) {
  std::vector<double> z = s_transform(x);
  const OrderCheck check = check_order(z, u, k);
  if (!check.ok) {
    fail(Errc::validation,
         "refinement level is not a valid vertex copula:\n" + check.describe(int(u.size())));
  }
  return VertexCopula::make(u, std::move(z), k);
}

}  // namespace

std::string SpecCheck::describe(int r) const {
  std::ostringstream out;
  for (const SpecViolation& v : violations) {
    out << "vertex " << vertex_name(v.vertex, r) << ": ";
    switch (v.kind) {
      case SpecViolation::Kind::monotone:
        out << "exponent " << v.value << " exceeds the value " << v.expected
            << " of a larger face";
        break;
      case SpecViolation::Kind::pinned_exponent:
        out << "exponent " << v.value << " but faces of dimension <= k are pinned to "
            << v.expected;
        break;
      case SpecViolation::Kind::pinned_coefficient:
        out << "coefficient " << v.value << " but faces of dimension <= k are pinned to "
            << v.expected;
        break;
      case SpecViolation::Kind::coefficient_sign:
        out << "signed coefficient sum " << v.value
            << " is negative where the exponent is constant below the vertex";
        break;
    }
    out << "\n";
  }
  return out.str();
}

SpecCheck check_tail_spec(int r, int k, std::span<const double> a, std::span<const double> b,
                          double tol) {
  require_profile_arrays(r, k, a, b);
  SpecCheck check;
  const std::size_t n = std::size_t(1) << r;
  // larger masks mean smaller faces, whose decay exponent cannot be larger
  for (std::size_t v = 0; v < n; ++v) {
    for (int i = 0; i < r; ++i) {
      if (!(v >> i & 1u)) continue;
      const std::size_t below = v ^ (std::size_t(1) << i);
      if (b[v] > b[below] + tol) {
        check.violations.push_back(
            {SpecViolation::Kind::monotone, Vertex(v), b[v], b[below]});
      }
    }
    const int zc = zero_count(Vertex(v), r);
    if (zc <= k) {
      if (std::abs(b[v] - double(zc)) > tol) {
        check.violations.push_back(
            {SpecViolation::Kind::pinned_exponent, Vertex(v), b[v], double(zc)});
      }
      if (std::abs(a[v] - 1.0) > tol) {
        check.violations.push_back(
            {SpecViolation::Kind::pinned_coefficient, Vertex(v), a[v], 1.0});
      }
    }
  }
  // where the exponent is flat on the whole down-set (equivalently: equal to
  // its global maximum at the origin), the signed coefficient sums must be
  // nonnegative for the refinement levels to carry nonnegative mass
  const std::vector<double> sa = s_transform(std::vector<double>(a.begin(), a.end()));
  for (std::size_t v = 0; v < n; ++v) {
    if (std::abs(b[v] - b[0]) <= tol && sa[v] < -tol) {
      check.violations.push_back(
          {SpecViolation::Kind::coefficient_sign, Vertex(v), sa[v], 0.0});
    }
  }
  check.ok = check.violations.empty();
  return check;
}

TailSpec TailSpec::make(int r, int k, std::vector<double> a, std::vector<double> b) {
  const SpecCheck check = check_tail_spec(r, k, a, b);
  if (!check.ok) {
    fail(Errc::validation, "tail prescription is not realizable:\n" + check.describe(r));
  }
  TailSpec spec;
  spec.r = r;
  spec.k = k;
  spec.a = std::move(a);
  spec.b = std::move(b);
  return spec;
}

BuildResult build_increasing(const TailSpec& spec, int depth, double base_start) {
  require(depth >= 1 && depth < 63, Errc::bounds, "depth must be between 1 and 62");
  require(base_start > 0.0 && base_start < 1.0, Errc::bounds,
          "split base must lie strictly between 0 and 1");
  const std::size_t n = std::size_t(1) << spec.r;
  double t = base_start;
  while (true) {
    const std::vector<double> u(spec.r, t);
    std::vector<VertexCopula> levels;
    levels.reserve(depth);
    bool ok = true;
    for (int lev = 1; lev <= depth; ++lev) {
      const double share = level_share(lev, depth);
      std::vector<double> x(n);
      for (std::size_t v = 0; v < n; ++v) {
        x[v] = std::pow(spec.a[v], share) * std::pow(t, spec.b[v]);
      }
      std::vector<double> z = s_transform(x);
      if (!check_order(z, u, spec.k).ok) {
        ok = false;
        break;
      }
      levels.push_back(VertexCopula::make(u, std::move(z), spec.k));
    }
    if (ok) {
      return {NestSequence::build(spec.r, spec.k, std::move(levels)), t};
    }
    t *= 0.5;
    require(t >= kMinShaperBase, Errc::validation,
            "no admissible split base realizes the prescribed tails");
  }
}

SubsequenceResult build_subsequence_targets(const TailSpec& spec, std::span<const double> scales,
                                            std::span<const double> coefficients) {
  require(!scales.empty() && scales.size() == coefficients.size(), Errc::validation,
          "need one coefficient per target scale");
  double prev = 1.0;
  for (std::size_t m = 0; m < scales.size(); ++m) {
    require(scales[m] > 0.0 && scales[m] < prev, Errc::validation,
            "target scales must decrease strictly inside (0, 1)");
    require(std::isfinite(coefficients[m]) && coefficients[m] > 0.0, Errc::validation,
            "target coefficients must be positive and finite");
    prev = scales[m];
  }
  const std::size_t n = std::size_t(1) << spec.r;
  for (std::size_t v = 1; v < n; ++v) {
    require(spec.a[v] == 1.0, Errc::validation,
            "per-target coefficients drive the origin; face coefficients must be one");
  }

  std::vector<VertexCopula> levels;
  std::vector<int> retained;
  double prev_s = 1.0;
  double prev_a = 1.0;
  std::size_t i = 0;
  while (i < scales.size()) {
    bool placed = false;
    for (std::size_t j = i; j < scales.size(); ++j) {
      const double t = scales[j] / prev_s;
      const double h = coefficients[j] / prev_a;
      const std::vector<double> u(spec.r, t);
      std::vector<double> x(n);
      for (std::size_t v = 0; v < n; ++v) x[v] = std::pow(t, spec.b[v]);
      x[0] *= h;
      std::vector<double> z = s_transform(x);
      if (check_order(z, u, spec.k).ok) {
        levels.push_back(VertexCopula::make(u, std::move(z), spec.k));
        retained.push_back(int(j));
        prev_s = scales[j];
        prev_a = coefficients[j];
        i = j + 1;
        placed = true;
        break;
      }
    }
    require(placed, Errc::validation,
            "thinning exhausted the targets: no remaining scale admits a valid level");
  }
  return {NestSequence::build(spec.r, spec.k, std::move(levels)), std::move(retained)};
}

NestSequence build_eventually_constant(const TailSpec& spec, std::span<const double> scales) {
  require(!scales.empty(), Errc::validation, "need at least one target scale");
  double prev = 1.0;
  const std::size_t n = std::size_t(1) << spec.r;
  std::vector<VertexCopula> levels;
  levels.reserve(scales.size());
  for (std::size_t m = 0; m < scales.size(); ++m) {
    require(scales[m] > 0.0 && scales[m] < prev, Errc::validation,
            "target scales must decrease strictly inside (0, 1)");
    const double t = scales[m] / prev;
    const std::vector<double> u(spec.r, t);
    std::vector<double> x(n);
    for (std::size_t v = 0; v < n; ++v) {
      x[v] = std::pow(t, spec.b[v]);
      if (m == 0) x[v] *= spec.a[v];
    }
    levels.push_back(validated_level(u, x, spec.k));
    prev = scales[m];
  }
  return NestSequence::build(spec.r, spec.k, std::move(levels));
}

BuildResult build_degree_one(const TailSpec& spec, int depth, double base_start) {
  require(depth >= 1, Errc::bounds, "depth must be positive");
  require(spec.r >= 2, Errc::bounds, "degree-one construction needs at least two dimensions");
  require(spec.k == 1, Errc::validation, "degree-one prescriptions are order-one");
  require(base_start > 0.0 && base_start < 1.0, Errc::bounds,
          "split base must lie strictly between 0 and 1");
  const std::size_t n = std::size_t(1) << spec.r;
  const Vertex full = full_mask(spec.r);
  for (std::size_t v = 0; v < n; ++v) {
    if (Vertex(v) == full) continue;
    require(std::abs(spec.b[v] - 1.0) <= kProbTol, Errc::validation,
            "degree-one construction needs unit exponents on every proper face");
  }

  double t1 = base_start;
  std::vector<double> z1;
  while (true) {
    const std::vector<double> u(spec.r, t1);
    std::vector<double> x(n);
    for (std::size_t v = 0; v < n; ++v) x[v] = spec.a[v] * t1;
    x[full] = 1.0;
    z1 = s_transform(x);
    if (check_order(z1, u, 1).ok) break;
    t1 *= 0.5;
    require(t1 >= kMinShaperBase, Errc::validation,
            "no admissible first split realizes the prescribed coefficients");
  }

  std::vector<VertexCopula> levels;
  levels.reserve(depth);
  levels.push_back(VertexCopula::make(std::vector<double>(spec.r, t1), std::move(z1), 1));
  for (int lev = 2; lev <= depth; ++lev) {
    const double t = double(lev) / double(lev + 1);
    std::vector<double> z(n, 0.0);
    z[0] = t;
    z[full] = 1.0 - t;
    levels.push_back(VertexCopula::make(std::vector<double>(spec.r, t), std::move(z), 1));
  }
  return {NestSequence::build(spec.r, 1, std::move(levels)), t1};
}

ParetoResult build_pareto(std::span<const double> alpha, double scale_base, int k,
                          std::span<const double> a, std::span<const double> b, int depth) {
  const int r = int(alpha.size());
  require_profile_arrays(r, k, a, b);
  require(depth >= 1 && depth < 63, Errc::bounds, "depth must be between 1 and 62");
  require(scale_base > 1.0 && std::isfinite(scale_base), Errc::bounds,
          "scale base must exceed one");
  for (double ai : alpha) {
    require(std::isfinite(ai) && ai > 0.0, Errc::validation,
            "margin tail indices must be positive");
  }

  const std::size_t n = std::size_t(1) << r;
  std::ostringstream problems;
  for (std::size_t v = 0; v < n; ++v) {
    double sum = 0.0;
    double top = 0.0;
    for (int i = 0; i < r; ++i) {
      if (v >> i & 1u) continue;
      sum += alpha[std::size_t(i)];
      top = std::max(top, alpha[std::size_t(i)]);
    }
    const int zc = zero_count(Vertex(v), r);
    if (zc <= k) {
      if (std::abs(b[v] - sum) > kProbTol) {
        problems << "vertex " << vertex_name(Vertex(v), r) << ": exponent " << b[v]
                 << " conflicts with the margin indices, which pin it to " << sum << "\n";
      }
      if (std::abs(a[v] - 1.0) > kProbTol) {
        problems << "vertex " << vertex_name(Vertex(v), r) << ": coefficient " << a[v]
                 << " but faces of dimension <= k are pinned to 1\n";
      }
    } else {
      if (b[v] < top - kProbTol || b[v] > sum + kProbTol) {
        problems << "vertex " << vertex_name(Vertex(v), r) << ": exponent " << b[v]
                 << " must lie in [" << top << ", " << sum << "] set by the margin indices\n";
      }
    }
    for (int i = 0; i < r; ++i) {
      if (!(v >> i & 1u)) continue;
      const std::size_t below = v ^ (std::size_t(1) << i);
      if (!(b[v] < b[below] - kProbTol)) {
        problems << "vertex " << vertex_name(Vertex(v), r) << ": exponent " << b[v]
                 << " must be strictly below the value " << b[below] << " of a larger face\n";
      }
    }
  }
  const std::string report = problems.str();
  if (!report.empty()) {
    fail(Errc::validation, "power-tail prescription is not realizable:\n" + report);
  }

  std::vector<double> u(r);
  for (int i = 0; i < r; ++i) u[std::size_t(i)] = std::pow(scale_base, -alpha[std::size_t(i)]);
  std::vector<VertexCopula> levels;
  levels.reserve(depth);
  for (int lev = 1; lev <= depth; ++lev) {
    const double share = level_share(lev, depth);
    std::vector<double> x(n);
    for (std::size_t v = 0; v < n; ++v) {
      x[v] = std::pow(a[v], share) * std::pow(scale_base, -b[v]);
    }
    levels.push_back(validated_level(u, x, k));
  }
  return {NestSequence::build(r, k, std::move(levels)),
          MarginSpec::pareto(std::vector<double>(alpha.begin(), alpha.end()))};
}

}  // namespace tailnest
