#pragma once

#include <span>
#include <vector>

namespace tailnest {

// Marginal quantile transforms applied to copula output. The pareto kind maps
// u to -u^{-1/alpha}, so P(X <= -t) = t^{-alpha}: lower-tail behaviour of the
// copula becomes power-law decay toward -infinity.
struct MarginSpec {
  enum class Kind { identity, pareto };

  Kind kind = Kind::identity;
  std::vector<double> alpha;  // one tail index per coordinate (pareto only)

  static MarginSpec identity() { return {}; }
  static MarginSpec pareto(std::vector<double> alpha);

  double quantile(int coord, double u) const;
};

// In-place transform of row-major samples (count x r).
void apply_margins(std::span<double> data, int r, const MarginSpec& spec);

}  // namespace tailnest
