#include "ppp/statbound.hpp"

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ppp/errors.hpp"
#include "ppp/rng.hpp"

namespace ppp {

void SampleStats::validate() const {
  if (n < 2) throw ArgumentError("sample stats need n >= 2");
  if (!(sd >= 0) || !std::isfinite(sd)) throw ArgumentError("sample sd must be finite and >= 0");
  if (!std::isfinite(mean)) throw ArgumentError("sample mean must be finite");
  if (!(alpha > 0 && alpha < 1)) throw ArgumentError("alpha must lie in (0, 1)");
}

double t_quantile(double df, double p) {
  if (!(p > 0 && p < 1)) throw ArgumentError("t quantile needs 0 < p < 1");
  if (!(df > 0)) throw ArgumentError("t quantile needs df > 0");
  if (std::isinf(df)) return boost::math::quantile(boost::math::normal_distribution<double>(), p);
  return boost::math::quantile(boost::math::students_t_distribution<double>(df), p);
}

double interval_halfwidth(const SampleStats& stats) {
  stats.validate();
  const double n = static_cast<double>(stats.n);
  return t_quantile(n - 1, 1 - stats.alpha / 2) * stats.sd / std::sqrt(n);
}

SampleSize required_n(const SampleStats& stats, double target_d, SampleSizeRule rule) {
  stats.validate();
  if (!(target_d > 0) || !std::isfinite(target_d)) throw ArgumentError("target d must be finite and > 0");
  const double p = 1 - stats.alpha / 2;
  const double s = stats.sd;
  if (s == 0) return {2, 2};

  if (rule == SampleSizeRule::kSubstitution) {
    const double z = t_quantile(std::numeric_limits<double>::infinity(), p);
    double n = std::pow(z * s / target_d, 2);
    for (int k = 0; k < 3; ++k) {
      // Below two observations the t distribution has no degrees of freedom
      // left; clamp so the substitution stays defined.
      const double t = t_quantile(std::max(n - 1, 1.0), p);
      n = std::pow(t * s / target_d, 2);
    }
    n = std::max(n, 2.0);
    return {static_cast<std::size_t>(std::llround(n)), n};
  }

  // t(n-1) s / sqrt(n) is decreasing in n, so bisect on the integer n.
  const auto ok = [&](std::size_t n) {
    const double nd = static_cast<double>(n);
    return t_quantile(nd - 1, p) * s / std::sqrt(nd) <= target_d;
  };
  std::size_t lo = 2, hi = 2;
  while (!ok(hi)) {
    lo = hi;
    if (hi > (std::size_t{1} << 52)) throw ArgumentError("required sample size overflows");
    hi *= 2;
  }
  if (ok(lo)) return {lo, static_cast<double>(lo)};
  while (hi - lo > 1) {
    const std::size_t mid = lo + (hi - lo) / 2;
    (ok(mid) ? hi : lo) = mid;
  }
  return {hi, static_cast<double>(hi)};
}

double mad_from_targets(std::span<const double> targets) {
  if (targets.empty()) throw DataError("MAD of an empty target list");
  double mean = 0;
  for (double y : targets) mean += y;
  mean /= static_cast<double>(targets.size());
  double mad = 0;
  for (double y : targets) mad += std::abs(mean - y);
  mad /= static_cast<double>(targets.size());
  if (!(mad > 0)) throw DataError("targets are constant: MAD is zero");
  return mad;
}

double mad_from_published(std::span<const std::pair<double, double>> rae_dhat, double precision) {
  if (rae_dhat.empty()) throw ArgumentError("no published (rae, d_hat) pairs");
  double lo = -std::numeric_limits<double>::infinity(), hi = std::numeric_limits<double>::infinity();
  for (const auto& [rae, dhat] : rae_dhat) {
    if (!(rae > 0)) throw ArgumentError("published RAE must be > 0");
    lo = std::max(lo, (dhat - precision / 2) / rae);
    hi = std::min(hi, (dhat + precision / 2) / rae);
  }
  if (lo > hi) throw DataError("published (rae, d_hat) pairs are inconsistent with a single MAD");
  return (lo + hi) / 2;
}

double rae_to_mae(double mad, double rae) {
  if (!(mad > 0)) throw DataError("MAD must be > 0");
  if (!(rae > 0)) throw ArgumentError("RAE must be > 0");
  return rae * mad;
}

double rae_to_mae(std::span<const double> targets, double rae) { return rae_to_mae(mad_from_targets(targets), rae); }

double snr(const SampleStats& stats) {
  stats.validate();
  if (!(stats.sd > 0)) throw ArgumentError("SNR undefined for zero standard deviation");
  return stats.mean / stats.sd;
}

BoundTable bound_table(const SampleStats& stats, double mad, std::span<const double> rae_levels, SampleSizeRule rule) {
  BoundTable t;
  t.stats = stats;
  t.d = interval_halfwidth(stats);
  t.mad = mad;
  double prev = 0;
  for (double rae : rae_levels) {
    if (!(rae > prev)) throw ArgumentError("RAE levels must be positive and strictly increasing");
    prev = rae;
    BoundRow row;
    row.rae = rae;
    row.d_hat = rae_to_mae(mad, rae);
    const SampleSize n = required_n(stats, row.d_hat, rule);
    row.n_hat = n.n;
    row.n_exact = n.exact;
    t.rows.push_back(row);
  }
  for (std::size_t i = 0; i + 1 < t.rows.size(); ++i) {
    const auto& a = t.rows[i];
    const auto& b = t.rows[i + 1];
    t.decades_per_point.push_back(std::log10(static_cast<double>(a.n_hat) / static_cast<double>(b.n_hat)) /
                                  ((b.rae - a.rae) * 100));
  }
  return t;
}

ErrorGrid simulate_error_vs_n(double mu, std::span<const double> sigmas, std::span<const std::size_t> ns,
                              std::size_t trials, std::uint64_t seed) {
  if (trials < 1) throw ArgumentError("simulation needs at least one trial");
  if (!std::isfinite(mu)) throw ArgumentError("mu must be finite");
  ErrorGrid g;
  g.sigmas.assign(sigmas.begin(), sigmas.end());
  g.ns.assign(ns.begin(), ns.end());
  for (std::size_t a = 0; a < sigmas.size(); ++a) {
    const double sigma = sigmas[a];
    if (!(sigma >= 0)) throw ArgumentError("sigma must be >= 0");
    std::vector<double> row;
    for (std::size_t b = 0; b < ns.size(); ++b) {
      const std::size_t n = ns[b];
      if (n < 1) throw ArgumentError("sample size must be >= 1");
      Rng rng = Rng::derive(seed, a * 0x10000 + b);
      double total = 0;
      for (std::size_t k = 0; k < trials; ++k) {
        // Accumulate deviations from mu so that sigma = 0 gives exactly 0.
        double dev = 0;
        for (std::size_t i = 0; i < n; ++i) dev += sigma * rng.normal();
        total += std::abs(dev / static_cast<double>(n));
      }
      row.push_back(total / static_cast<double>(trials));
    }
    g.error.push_back(std::move(row));
  }
  return g;
}

}  // namespace ppp
