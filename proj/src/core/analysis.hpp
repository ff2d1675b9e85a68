#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "core/nest.hpp"

namespace tailnest {

// Diagonal corner masses of the law projected onto a face. The face is named
// by a vertex whose zero coordinates span it; the origin names the full space.
struct TailScan {
  Vertex face = 0;
  std::vector<double> scales;
  std::vector<double> mass;
};

TailScan tail_scan(const NestSequence& seq, Vertex face, std::span<const double> scales);

// The scan scales at which a sequence hits its refinement corners on the given
// face: point n is the corner coordinate after n levels. Requires the corner
// to be diagonal on the kept coordinates. max_points = 0 takes every level.
std::vector<double> schedule_points(const NestSequence& seq, Vertex face, int max_points = 0);

struct TailFit {
  double degree = 0.0;        // least-squares slope of log mass against log scale
  double coefficient = 0.0;   // geometric mean of mass / scale^degree, small-scale half
  double residual = 0.0;      // rms log deviation from the fitted line
  double ratio_spread = 1.0;  // max over min of mass / scale^degree, small-scale half
  bool degenerate = false;    // some mass vanished: degree is +infinity, coefficient 0
};

TailFit fit_tail(std::span<const double> scales, std::span<const double> mass);

enum class ReferenceFamily { independence, clayton, gumbel };

// Distribution function of a reference copula at a point.
double reference_cdf(ReferenceFamily family, double theta, std::span<const double> u);

// Reference copula evaluated along the main diagonal at each scale.
std::vector<double> reference_diagonal(ReferenceFamily family, double theta, int dim,
                                       std::span<const double> scales);

// Chi-square comparison of samples against the depth-n refinement of the law.
// Cells with expected counts below five are pooled; cells of zero mass must
// stay empty.
struct GofReport {
  std::size_t samples = 0;
  int depth = 0;
  int buckets = 0;  // cells entering the statistic after pooling
  double chi_square = 0.0;
  int dof = 0;
  double p_value = 0.0;
  double max_sigma = 0.0;              // worst standardized deviation of an unpooled cell
  std::uint64_t off_support_hits = 0;  // samples that landed in zero-mass cells

  bool pass(double p_threshold = 1e-3, double sigma_cap = 4.0) const {
    return off_support_hits == 0 && p_value > p_threshold && max_sigma <= sigma_cap;
  }
};

GofReport gof_report(const NestSequence& seq, std::span<const double> rows, int depth);

}  // namespace tailnest
