#include "vertex.hpp"

#include <cmath>
#include <sstream>

namespace tailnest {

std::string vertex_name(Vertex v, int r) {
  std::ostringstream os;
  os << '(';
  for (int i = 0; i < r; ++i) {
    if (i) os << ',';
    os << ((v >> i) & 1u);
  }
  os << ')';
  return os.str();
}

int dimension_of(std::size_t weight_count) {
  for (int r = 1; r <= kMaxDimensionHard; ++r) {
    if (weight_count == (std::size_t{1} << r)) return r;
  }
  fail(Errc::bounds, "weight vector size " + std::to_string(weight_count) +
                         " is not 2^r with 1 <= r <= " + std::to_string(kMaxDimensionHard));
}

// Both transforms are one in-place sweep per coordinate; the forward sweep
// subtracts the value at the vertex with that coordinate lowered, the inverse
// sweep adds it back.  Each is O(r 2^r) and they cancel exactly term by term.
void s_transform_in_place(std::span<double> w) {
  const int r = dimension_of(w.size());
  const std::size_t n = w.size();
  for (int i = 0; i < r; ++i) {
    const std::size_t bit = std::size_t{1} << i;
    for (std::size_t m = 0; m < n; ++m) {
      if (m & bit) w[m] -= w[m ^ bit];
    }
  }
}

void s_inverse_in_place(std::span<double> w) {
  const int r = dimension_of(w.size());
  const std::size_t n = w.size();
  for (int i = 0; i < r; ++i) {
    const std::size_t bit = std::size_t{1} << i;
    for (std::size_t m = 0; m < n; ++m) {
      if (m & bit) w[m] += w[m ^ bit];
    }
  }
}

std::vector<double> s_transform(std::span<const double> x) {
  std::vector<double> out(x.begin(), x.end());
  s_transform_in_place(out);
  return out;
}

std::vector<double> s_inverse(std::span<const double> z) {
  std::vector<double> out(z.begin(), z.end());
  s_inverse_in_place(out);
  return out;
}

std::vector<double> project_onto(std::span<const double> w, Vertex keep, int r) {
  require(r == dimension_of(w.size()), Errc::bounds, "projection dimension mismatch");
  require(keep <= full_mask(r), Errc::bounds, "projection mask outside the cube");
  const int m = popcount(keep);
  std::vector<double> out(std::size_t{1} << m, 0.0);
  const std::size_t n = w.size();
  for (std::size_t v = 0; v < n; ++v) out[pack_bits(Vertex(v), keep)] += w[v];
  return out;
}

std::vector<double> project(std::span<const double> w, Vertex along_ones, int r) {
  return project_onto(w, vertex_complement(along_ones, r), r);
}

std::vector<double> uniform_profile(std::span<const double> u) {
  const int r = static_cast<int>(u.size());
  require(r >= 1 && r <= kMaxDimensionHard, Errc::bounds, "split dimension out of range");
  std::vector<double> out(std::size_t{1} << r, 1.0);
  for (int i = 0; i < r; ++i) {
    const std::size_t bit = std::size_t{1} << i;
    for (std::size_t v = 0; v < out.size(); ++v) {
      if (!(v & bit)) out[v] *= u[i];
    }
  }
  return out;
}

std::vector<double> uniform_weights(std::span<const double> u) {
  const int r = static_cast<int>(u.size());
  require(r >= 1 && r <= kMaxDimensionHard, Errc::bounds, "split dimension out of range");
  std::vector<double> out(std::size_t{1} << r, 1.0);
  for (int i = 0; i < r; ++i) {
    const std::size_t bit = std::size_t{1} << i;
    for (std::size_t v = 0; v < out.size(); ++v) {
      out[v] *= (v & bit) ? 1.0 - u[i] : u[i];
    }
  }
  return out;
}

void validate_split(std::span<const double> u) {
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (!(u[i] > 0.0 && u[i] < 1.0)) {
      fail(Errc::validation, "split coordinate " + std::to_string(i + 1) +
                                 " must lie strictly inside (0,1), got " + std::to_string(u[i]));
    }
  }
}

std::string OrderCheck::describe(int r) const {
  if (ok) return "ok";
  std::ostringstream os;
  for (const auto& v : violations) {
    if (&v != &violations.front()) os << "; ";
    switch (v.kind) {
      case OrderViolation::negative_mass:
        os << "weight at " << vertex_name(v.vertex, r) << " is negative (" << v.value << ")";
        break;
      case OrderViolation::excess_mass:
        os << "weight at " << vertex_name(v.vertex, r) << " exceeds 1 (" << v.value << ")";
        break;
      case OrderViolation::total_mass:
        os << "total mass " << v.value << " != 1";
        break;
      case OrderViolation::corner_mismatch:
        os << "corner mass at " << vertex_name(v.vertex, r) << " is " << v.value << ", expected "
           << v.expected;
        break;
    }
  }
  return os.str();
}

OrderCheck check_order(std::span<const double> z, std::span<const double> u, int k, double tol) {
  const int r = dimension_of(z.size());
  require(static_cast<int>(u.size()) == r, Errc::bounds, "split/weight dimension mismatch");
  require(k >= 0 && k <= r, Errc::bounds, "order must lie in [0, r]");
  validate_split(u);

  OrderCheck out;
  double total = 0.0;
  for (std::size_t v = 0; v < z.size(); ++v) {
    total += z[v];
    if (z[v] < -tol)
      out.violations.push_back({OrderViolation::negative_mass, Vertex(v), z[v], 0.0});
    if (z[v] > 1.0 + tol)
      out.violations.push_back({OrderViolation::excess_mass, Vertex(v), z[v], 1.0});
  }
  if (std::abs(total - 1.0) > tol)
    out.violations.push_back({OrderViolation::total_mass, 0, total, 1.0});

  const std::vector<double> corners = s_inverse(z);
  const std::vector<double> pinned = uniform_profile(u);
  for (std::size_t v = 0; v < z.size(); ++v) {
    if (zero_count(Vertex(v), r) > k) continue;
    if (std::abs(corners[v] - pinned[v]) > tol)
      out.violations.push_back({OrderViolation::corner_mismatch, Vertex(v), corners[v], pinned[v]});
  }
  out.ok = out.violations.empty();
  return out;
}

bool gk_member(std::span<const double> w, int k, double tol) {
  const int r = dimension_of(w.size());
  require(k >= 0 && k <= r, Errc::bounds, "order must lie in [0, r]");
  const std::vector<double> corners = s_inverse(w);
  for (std::size_t v = 0; v < w.size(); ++v) {
    if (zero_count(Vertex(v), r) > k) continue;
    if (std::abs(corners[v]) > tol) return false;
  }
  return true;
}

VertexCopula VertexCopula::make(std::vector<double> u, std::vector<double> z, int k) {
  const OrderCheck check = check_order(z, u, k);
  if (!check.ok) {
    fail(Errc::validation,
         "vertex measure fails order-" + std::to_string(k) + " validation: " +
             check.describe(static_cast<int>(u.size())));
  }
  VertexCopula out;
  out.u = std::move(u);
  out.z = std::move(z);
  out.order = k;
  return out;
}

VertexCopula VertexCopula::uniform(std::vector<double> u, int k) {
  std::vector<double> z = uniform_weights(u);
  return make(std::move(u), std::move(z), k);
}

VertexCopula parity_copula(int r) {
  require(r >= 2 && r <= kMaxDimensionHard, Errc::bounds,
          "parity measure needs 2 <= r <= " + std::to_string(kMaxDimensionHard));
  std::vector<double> u(r, 0.5);
  std::vector<double> z(std::size_t{1} << r, 0.0);
  const double even_weight = std::ldexp(1.0, -(r - 1));
  for (std::size_t v = 0; v < z.size(); ++v) {
    if (popcount(Vertex(v)) % 2 == 0) z[v] = even_weight;
  }
  return VertexCopula::make(std::move(u), std::move(z), r - 1);
}

}  // namespace tailnest
