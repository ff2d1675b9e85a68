#include "core/stats.hpp"

#include <algorithm>
#include <cmath>

#include "core/error.hpp"

namespace tailnest {

namespace {

// series for P(a, x), converges fast for x < a + 1
double gamma_p_series(double a, double x) {
  double ap = a;
  double term = 1.0 / a;
  double sum = term;
  for (int n = 0; n < 1000; ++n) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::abs(term) < std::abs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Lentz continued fraction for Q(a, x), converges fast for x >= a + 1
double gamma_q_fraction(double a, double x) {
  constexpr double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 1000; ++i) {
    const double an = -double(i) * (double(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double gamma_q(double a, double x) {
  require(a > 0.0 && x >= 0.0, Errc::bounds, "gamma_q needs a > 0 and x >= 0");
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) return std::clamp(1.0 - gamma_p_series(a, x), 0.0, 1.0);
  return std::clamp(gamma_q_fraction(a, x), 0.0, 1.0);
}

double chi_square_tail(double x, int df) {
  require(df >= 1, Errc::bounds, "chi-square needs at least one degree of freedom");
  require(x >= 0.0, Errc::bounds, "chi-square statistic must be nonnegative");
  return gamma_q(0.5 * df, 0.5 * x);
}

double kolmogorov_tail(double lambda) {
  require(lambda >= 0.0, Errc::bounds, "kolmogorov statistic must be nonnegative");
  if (lambda < 1e-4) return 1.0;
  double sum = 0.0;
  double sign = 1.0;
  for (int j = 1; j <= 200; ++j) {
    const double term = std::exp(-2.0 * double(j) * double(j) * lambda * lambda);
    sum += sign * term;
    if (term < 1e-18) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

double ks_uniform_pvalue(std::vector<double> values) {
  const std::size_t n = values.size();
  require(n > 0, Errc::bounds, "ks test needs data");
  std::sort(values.begin(), values.end());
  double d = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    require(values[i] >= 0.0 && values[i] <= 1.0, Errc::bounds, "ks data must lie in [0, 1]");
    const double f = values[i];
    d = std::max(d, double(i + 1) / double(n) - f);
    d = std::max(d, f - double(i) / double(n));
  }
  const double sn = std::sqrt(double(n));
  return kolmogorov_tail((sn + 0.12 + 0.11 / sn) * d);
}

}  // namespace tailnest
