#pragma once
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "core/error.hpp"
#include "core/vertex.hpp"

// Shared helpers for the test binaries.  Random fixtures are generated from
// explicitly seeded engines so every run sees the same data.

namespace testsupport {

inline double unit_real(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

inline std::vector<double> random_split(std::mt19937_64& gen, int r, double lo = 0.3,
                                        double hi = 0.7) {
  std::vector<double> u(r);
  for (auto& v : u) v = lo + (hi - lo) * unit_real(gen);
  return u;
}

// Random measure of order k at split u: perturb the free corner masses of the
// uniform profile, transform, and shrink the perturbation until the weights
// are a probability vector.  rho = 0 reproduces the uniform measure, which is
// valid for every k, so the loop terminates.
inline std::vector<double> random_order_k_weights(std::mt19937_64& gen, std::span<const double> u,
                                                  int k, double rho = 0.5) {
  const int r = static_cast<int>(u.size());
  const std::vector<double> base = tailnest::uniform_profile(u);
  std::vector<double> eta(base.size(), 0.0);
  for (std::size_t v = 0; v < base.size(); ++v) {
    if (tailnest::zero_count(tailnest::Vertex(v), r) > k) eta[v] = 2.0 * unit_real(gen) - 1.0;
  }
  for (int attempt = 0; attempt < 60; ++attempt, rho *= 0.5) {
    std::vector<double> x = base;
    for (std::size_t v = 0; v < x.size(); ++v) x[v] *= 1.0 + rho * eta[v];
    std::vector<double> z = tailnest::s_transform(x);
    if (tailnest::check_order(z, u, k).ok) return z;
  }
  tailnest::fail(tailnest::Errc::internal, "random order-k generator failed to converge");
}

inline tailnest::VertexCopula random_order_k_copula(std::mt19937_64& gen, int r, int k,
                                                    double rho = 0.5) {
  std::vector<double> u = random_split(gen, r);
  std::vector<double> z = random_order_k_weights(gen, u, k, rho);
  return tailnest::VertexCopula::make(std::move(u), std::move(z), k);
}

// inclusion-exclusion over the 2^r corners of [a, b]
template <typename Cdf>
double box_mass_from_cdf(Cdf&& cdf, std::span<const double> a, std::span<const double> b) {
  const int r = static_cast<int>(a.size());
  double mass = 0.0;
  std::vector<double> corner(r);
  for (std::uint32_t s = 0; s < (1u << r); ++s) {
    int low_count = 0;
    for (int i = 0; i < r; ++i) {
      const bool low = s >> i & 1u;
      corner[i] = low ? a[i] : b[i];
      low_count += low;
    }
    mass += (low_count % 2 == 0 ? 1.0 : -1.0) * cdf(corner);
  }
  return mass;
}

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = std::abs(a[i] - b[i]);
    if (d > m) m = d;
  }
  return m;
}

}  // namespace testsupport
