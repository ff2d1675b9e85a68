#pragma once
#include <bit>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "error.hpp"

// Weight algebra on the vertices of the r-cube.
//
// A vertex is a bit mask: bit i-1 set means coordinate i sits at 1, clear
// means it sits at 0.  A weight vector w of length 2^r assigns one number per
// vertex, w[mask].  Two linear transforms connect the two natural coordinate
// systems on such vectors:
//
//   forward  z(v) = sum over submasks m of v of (-1)^popcount(v^m) * x(m)
//   inverse  x(v) = sum over submasks m of v of z(m)
//
// When z is a probability vector, x(v) is the mass of the lower-left box
// spanned by the split point, restricted to the coordinates that are 0 in v.
// A vertex measure at split u has order k when every projection onto k or
// fewer coordinates is the uniform vertex measure, equivalently when
// x(v) = prod_{v_i = 0} u_i for every vertex with at most k zero bits.

namespace tailnest {

using Vertex = std::uint32_t;

inline int popcount(Vertex v) { return std::popcount(v); }

inline Vertex full_mask(int r) { return (Vertex{1} << r) - 1; }

inline Vertex vertex_complement(Vertex v, int r) { return ~v & full_mask(r); }

// number of coordinates sitting at 0
inline int zero_count(Vertex v, int r) { return r - std::popcount(v); }

inline bool is_submask(Vertex sub, Vertex sup) { return (sub & sup) == sub; }

// compress the bits of v selected by mask into the low bits, preserving order
inline Vertex pack_bits(Vertex v, Vertex mask) {
  Vertex out = 0;
  int j = 0;
  while (mask) {
    const int i = std::countr_zero(mask);
    out |= ((v >> i) & 1u) << j;
    ++j;
    mask &= mask - 1;
  }
  return out;
}

// spread the low bits of packed onto the positions selected by mask
inline Vertex unpack_bits(Vertex packed, Vertex mask) {
  Vertex out = 0;
  int j = 0;
  while (mask) {
    const int i = std::countr_zero(mask);
    out |= ((packed >> j) & 1u) << i;
    ++j;
    mask &= mask - 1;
  }
  return out;
}

// "(1,0,1)" style rendering, coordinate 1 first; used in reports.
std::string vertex_name(Vertex v, int r);

// r from a weight vector's size; throws Errc::bounds unless size is 2^r with
// 1 <= r <= kMaxDimensionHard.
int dimension_of(std::size_t weight_count);

void s_transform_in_place(std::span<double> w);
void s_inverse_in_place(std::span<double> w);
std::vector<double> s_transform(std::span<const double> x);
std::vector<double> s_inverse(std::span<const double> z);

// Sums w over the fibers of the projection that drops the coordinates set in
// `along`; the result lives on the remaining coordinates, packed in
// increasing coordinate order.  project(w, v) drops exactly the coordinates
// where v has a 1, so the result indexes the zero-coordinates of v.
std::vector<double> project_onto(std::span<const double> w, Vertex keep, int r);
std::vector<double> project(std::span<const double> w, Vertex along_ones, int r);

// o-box mass profile of the uniform measure: profile(v) = prod_{v_i=0} u_i.
// Its forward transform is uniform_weights(u).
std::vector<double> uniform_profile(std::span<const double> u);

// uniform vertex measure: w(v) = prod_{v_i=0} u_i * prod_{v_i=1} (1-u_i)
std::vector<double> uniform_weights(std::span<const double> u);

void validate_split(std::span<const double> u);  // throws unless all in (0,1)

struct OrderViolation {
  enum Kind { negative_mass, excess_mass, total_mass, corner_mismatch };
  Kind kind;
  Vertex vertex;
  double value;
  double expected;
};

struct OrderCheck {
  bool ok = false;
  std::vector<OrderViolation> violations;
  std::string describe(int r) const;
};

// true iff z is a probability vector and the measure has order k at split u
OrderCheck check_order(std::span<const double> z, std::span<const double> u, int k,
                       double tol = kProbTol);

// member of the k-th difference space: every projection that keeps k or fewer
// coordinates is identically zero, equivalently s_inverse(w)(v) = 0 for every
// vertex with at most k zero bits.  These spaces shrink as k grows; adding a
// member to a measure of order k preserves its order-k projections.
bool gk_member(std::span<const double> w, int k, double tol = kProbTol);

// A validated vertex measure at a split point.
struct VertexCopula {
  std::vector<double> u;  // split, strictly inside (0,1)
  std::vector<double> z;  // weights, probability vector
  int order = 0;

  int dimension() const { return static_cast<int>(u.size()); }

  // throws Errc::validation when z fails check_order(z, u, k)
  static VertexCopula make(std::vector<double> u, std::vector<double> z, int k);
  static VertexCopula uniform(std::vector<double> u, int k);
};

// Half weight on every even-popcount vertex at the central split; order r-1.
// Requires r >= 2.
VertexCopula parity_copula(int r);

}  // namespace tailnest
