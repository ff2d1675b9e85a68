#include "core/margins.hpp"

#include <algorithm>
#include <cmath>

#include "core/error.hpp"

namespace tailnest {

MarginSpec MarginSpec::pareto(std::vector<double> alpha) {
  require(!alpha.empty(), Errc::validation, "pareto margins need at least one tail index");
  for (double a : alpha) {
    require(std::isfinite(a) && a > 0.0, Errc::validation, "pareto tail indices must be positive");
  }
  MarginSpec spec;
  spec.kind = Kind::pareto;
  spec.alpha = std::move(alpha);
  return spec;
}

double MarginSpec::quantile(int coord, double u) const {
  if (kind == Kind::identity) return u;
  require(coord >= 0 && coord < int(alpha.size()), Errc::bounds, "margin coordinate out of range");
  const double p = std::clamp(u, kMarginClampEps, 1.0 - kMarginClampEps);
  return -std::pow(p, -1.0 / alpha[coord]);
}

void apply_margins(std::span<double> data, int r, const MarginSpec& spec) {
  if (spec.kind == MarginSpec::Kind::identity) return;
  require(r > 0 && data.size() % std::size_t(r) == 0, Errc::bounds,
          "sample buffer must hold whole rows");
  require(int(spec.alpha.size()) == r, Errc::validation,
          "margins must provide one tail index per coordinate");
  for (std::size_t pos = 0; pos < data.size(); ++pos) {
    data[pos] = spec.quantile(int(pos % std::size_t(r)), data[pos]);
  }
}

}  // namespace tailnest
