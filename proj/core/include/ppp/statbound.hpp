#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace ppp {

struct SampleStats {
  std::size_t n = 0;
  double mean = 0;
  double sd = 0;  // sample standard deviation s
  double alpha = 0.05;

  // Throws ArgumentError unless n >= 2, s >= 0 and 0 < alpha < 1.
  void validate() const;
};

// Quantile of Student's t with real-valued degrees of freedom; infinite df
// gives the standard normal quantile.
double t_quantile(double df, double p);

// d = t(1 - alpha/2, n - 1) * s / sqrt(n).
double interval_halfwidth(const SampleStats& stats);

enum class SampleSizeRule {
  // Start from the normal approximation n0 = (z s / d)^2 and substitute
  // n <- (t(1 - alpha/2, n - 1) s / d)^2 three times, then round to nearest.
  kSubstitution,
  // Smallest integer n >= 2 with t(1 - alpha/2, n - 1) s / sqrt(n) <= d.
  kSmallestInteger,
};

struct SampleSize {
  std::size_t n = 0;
  double exact = 0;  // unrounded value before the final rounding
};

SampleSize required_n(const SampleStats& stats, double target_d, SampleSizeRule rule = SampleSizeRule::kSubstitution);

// Mean absolute deviation from the mean. Throws DataError when it is zero.
double mad_from_targets(std::span<const double> targets);

// Back-solves MAD from published (rae, d_hat) pairs whose d_hat was rounded
// to `precision`: the midpoint of the intersection of the intervals
// [(d_hat - precision/2) / rae, (d_hat + precision/2) / rae]. Throws
// DataError when the intervals do not intersect.
double mad_from_published(std::span<const std::pair<double, double>> rae_dhat, double precision = 1e-4);

// d_hat = rae * MAD.
double rae_to_mae(double mad, double rae);
double rae_to_mae(std::span<const double> targets, double rae);

double snr(const SampleStats& stats);

struct BoundRow {
  double rae = 0;
  double d_hat = 0;
  std::size_t n_hat = 0;
  double n_exact = 0;
};

struct BoundTable {
  SampleStats stats;
  double d = 0;
  double mad = 0;
  std::vector<BoundRow> rows;
  // Between consecutive rows: log10(n_hat[i] / n_hat[i+1]) per percentage
  // point of RAE.
  std::vector<double> decades_per_point;
};

// rae_levels must be positive and strictly increasing.
BoundTable bound_table(const SampleStats& stats, double mad, std::span<const double> rae_levels,
                       SampleSizeRule rule = SampleSizeRule::kSubstitution);

// Mean |sample mean - mu| over `trials` normal samples of each size, one
// row per sigma and one column per n.
struct ErrorGrid {
  std::vector<double> sigmas;
  std::vector<std::size_t> ns;
  std::vector<std::vector<double>> error;
};

// Each (sigma, n) cell draws from its own stream derived from the seed, so
// cells can be computed in any order.
ErrorGrid simulate_error_vs_n(double mu, std::span<const double> sigmas, std::span<const std::size_t> ns,
                              std::size_t trials, std::uint64_t seed);

}  // namespace ppp
