#pragma once

#include <vector>

namespace tailnest {

// Regularized upper incomplete gamma Q(a, x) = Gamma(a, x) / Gamma(a).
double gamma_q(double a, double x);

// P(X > x) for a chi-square variable with df degrees of freedom.
double chi_square_tail(double x, int df);

// Limiting Kolmogorov statistic tail Q(lambda) = 2 sum_j (-1)^{j-1} exp(-2 j^2 lambda^2).
double kolmogorov_tail(double lambda);

// One-sample Kolmogorov-Smirnov p-value against the uniform law on [0, 1].
double ks_uniform_pvalue(std::vector<double> values);

}  // namespace tailnest
