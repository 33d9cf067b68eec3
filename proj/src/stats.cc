#include "sdc/stats.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>

#include "sdc/error.h"

namespace sdc {

double NormalUpperQuantile(double tail) {
  if (!(tail > 0 && tail < 1)) {
    throw Error(ErrorCode::kInvalidArgument, "tail probability must lie in (0, 1)");
  }
  return boost::math::quantile(boost::math::complement(boost::math::normal(), tail));
}

ConfidenceInterval WilsonInterval(std::uint64_t successes, std::uint64_t trials,
                                  double confidence) {
  if (trials == 0) return {0.0, 1.0};
  const double z = NormalUpperQuantile((1.0 - confidence) / 2.0);
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double center = (p + z2 / (2 * n)) / (1 + z2 / n);
  const double half = z * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n)) / (1 + z2 / n);
  // Clamp so the interval always contains p despite rounding.
  return {std::min(p, std::max(0.0, center - half)), std::max(p, std::min(1.0, center + half))};
}

int HistogramBin(double x, double lo, double hi, int bins) {
  const double width = hi > lo ? (hi - lo) / bins : 1.0;
  const double b = std::floor((x - lo) / width);
  return static_cast<int>(std::clamp(b, 0.0, static_cast<double>(bins - 1)));
}

Eigen::VectorXd Histogram(std::span<const double> samples, double lo, double hi, int bins) {
  Eigen::VectorXd counts = Eigen::VectorXd::Zero(bins);
  for (double x : samples) counts[HistogramBin(x, lo, hi, bins)] += 1.0;
  return counts;
}

namespace {

std::pair<double, double> PooledRange(std::span<const double> a, std::span<const double> b) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (double x : a) lo = std::min(lo, x), hi = std::max(hi, x);
  for (double x : b) lo = std::min(lo, x), hi = std::max(hi, x);
  return {lo, hi};
}

}  // namespace

double ChiSquareHomogeneityPValue(std::span<const double> a, std::span<const double> b,
                                  int bins) {
  if (a.empty() || b.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "chi-square test needs two non-empty samples");
  }
  const auto [lo, hi] = PooledRange(a, b);
  const Eigen::VectorXd ca = Histogram(a, lo, hi, bins);
  const Eigen::VectorXd cb = Histogram(b, lo, hi, bins);
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  double statistic = 0.0;
  int used = 0;
  for (int i = 0; i < bins; ++i) {
    const double total = ca[i] + cb[i];
    if (total == 0) continue;
    ++used;
    const double ea = total * na / (na + nb);
    const double eb = total * nb / (na + nb);
    statistic += (ca[i] - ea) * (ca[i] - ea) / ea + (cb[i] - eb) * (cb[i] - eb) / eb;
  }
  if (used < 2) return 1.0;
  const boost::math::chi_squared dist(used - 1);
  return boost::math::cdf(boost::math::complement(dist, statistic));
}

LogRatioBins CompareHistograms(std::span<const double> a, std::span<const double> b,
                               int bins, int min_joint_count) {
  if (bins < 1) throw Error(ErrorCode::kInvalidArgument, "bin count must be positive");
  const auto [lo, hi] = PooledRange(a, b);
  const Eigen::VectorXd ca = Histogram(a, lo, hi, bins);
  const Eigen::VectorXd cb = Histogram(b, lo, hi, bins);
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  LogRatioBins out;
  for (int i = 0; i < bins; ++i) {
    if (ca[i] + cb[i] < min_joint_count) continue;
    double ratio;
    double se;
    if (ca[i] == 0 || cb[i] == 0) {
      ratio = std::numeric_limits<double>::infinity();
      se = 0.0;
    } else {
      ratio = std::abs(std::log((ca[i] / na) / (cb[i] / nb)));
      se = std::sqrt(1.0 / ca[i] + 1.0 / cb[i]);
    }
    out.log_ratio.push_back(ratio);
    out.std_error.push_back(se);
    out.count_a.push_back(static_cast<std::int64_t>(ca[i]));
    out.count_b.push_back(static_cast<std::int64_t>(cb[i]));
    out.max_log_ratio = std::max(out.max_log_ratio, ratio);
  }
  return out;
}

double Mean(std::span<const double> x) {
  if (x.empty()) return 0.0;
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

double Variance(std::span<const double> x) {
  if (x.empty()) return 0.0;
  const double m = Mean(x);
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return s / static_cast<double>(x.size());
}

}  // namespace sdc
