#pragma once

#include <span>
#include <string>
#include <vector>

#include "core/margins.hpp"
#include "core/nest.hpp"

namespace tailnest {

// Prescribed corner behaviour, one entry per vertex: the entry at v describes
// the face spanned by the zero coordinates of v. Along that face's diagonal
// the target distribution decays like a(v) * s^{b(v)}. The full-one vertex is
// the empty face (b = 0, a = 1); the origin carries the joint corner decay.
struct TailSpec {
  int r = 0;
  int k = 0;                 // coordinates per face that must stay exactly uniform
  std::vector<double> a, b;  // coefficients and exponents, indexed by vertex

  // Validates shape and realizability conditions, throws on violation.
  static TailSpec make(int r, int k, std::vector<double> a, std::vector<double> b);
};

struct SpecViolation {
  enum class Kind {
    monotone,             // a smaller face must not decay slower than a larger one
    pinned_exponent,      // faces of dimension <= k must have exponent equal to the dimension
    pinned_coefficient,   // faces of dimension <= k must have coefficient one
    coefficient_sign,     // signed coefficient sums must stay nonnegative where the
                          // exponent is constant below the vertex
  };
  Kind kind;
  Vertex vertex;
  double value;
  double expected;
};

struct SpecCheck {
  bool ok = true;
  std::vector<SpecViolation> violations;
  std::string describe(int r) const;
};

SpecCheck check_tail_spec(int r, int k, std::span<const double> a, std::span<const double> b,
                          double tol = kProbTol);

struct BuildResult {
  NestSequence seq;
  double base = 0.0;  // per-level split scale that was actually used
};

// Equal-split construction: every level splits at the same base t, exponents
// drive the corner profile t^{b(v)} and coefficients are spread across levels
// so that depth-n corner masses equal a(v) * (t^n)^{b(v)} at n = depth. The
// base is halved until every level validates.
BuildResult build_increasing(const TailSpec& spec, int depth, double base_start = 0.5);

struct SubsequenceResult {
  NestSequence seq;
  std::vector<int> retained;  // indices of the target scales that were realized
};

// Hits prescribed joint-corner values a_m * s_m^{b(origin)} along a
// subsequence of the given scales, thinning greedily past targets whose
// refinement level would be invalid. Off-origin faces follow coefficient one.
// The spec's coefficients must all be one; the per-target coefficients drive
// the origin instead.
SubsequenceResult build_subsequence_targets(const TailSpec& spec, std::span<const double> scales,
                                            std::span<const double> coefficients);

// Realizes a(v) * s_n^{b(v)} exactly at every given scale: the first level
// carries the coefficients, later levels are pure powers of the scale ratios.
// Intended for specs whose exponents are constant below each vertex; levels
// that fail to validate abort the construction.
NestSequence build_eventually_constant(const TailSpec& spec, std::span<const double> scales);

// All proper faces decay at degree one with prescribed coefficients. Levels
// past the first concentrate on the origin and the full vertex with split
// n/(n+1), so corner scales shrink like 2*base/(n+1). Requires k = 1 and unit
// exponents off the full vertex.
BuildResult build_degree_one(const TailSpec& spec, int depth, double base_start = 0.5);

struct ParetoResult {
  NestSequence seq;
  MarginSpec margins;
};

// Per-coordinate splits at scale_base^{-alpha_i} paired with power margins, so
// coordinate i decays like |x|^{-alpha_i} toward -infinity and the face at v
// decays with exponent b(v). Exponents must be strictly monotone across faces
// and sit between the largest and the sum of the face's alphas.
ParetoResult build_pareto(std::span<const double> alpha, double scale_base, int k,
                          std::span<const double> a, std::span<const double> b, int depth);

}  // namespace tailnest
