#ifndef SDC_STATS_H_
#define SDC_STATS_H_

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace sdc {

struct ConfidenceInterval {
  double lower = 0.0;
  double upper = 0.0;
};

// Wilson score interval for a binomial proportion; `confidence` two-sided.
ConfidenceInterval WilsonInterval(std::uint64_t successes, std::uint64_t trials,
                                  double confidence = 0.95);

// Upper-tail standard normal quantile: P(Z > z) = tail.
double NormalUpperQuantile(double tail);

// Bin of x among `bins` equal-width bins over [lo, hi], edges clamped.
int HistogramBin(double x, double lo, double hi, int bins);

// Equal-width histogram of `samples` over [lo, hi] with `bins` bins; values
// outside are clamped into the edge bins.
Eigen::VectorXd Histogram(std::span<const double> samples, double lo, double hi, int bins);

// Chi-square test of homogeneity between two samples over shared
// equal-width bins of the pooled range. Bins empty in both samples are
// dropped. Returns the p-value.
double ChiSquareHomogeneityPValue(std::span<const double> a, std::span<const double> b,
                                  int bins);

// Bin-wise comparison of two samples: for every equal-width bin over the
// pooled range whose joint count reaches `min_joint_count`, the absolute
// log ratio of the two empirical frequencies and its delta-method standard
// error sqrt(1/c1 + 1/c2).
struct LogRatioBins {
  std::vector<double> log_ratio;   // +inf when one count is zero
  std::vector<double> std_error;
  std::vector<std::int64_t> count_a;
  std::vector<std::int64_t> count_b;
  double max_log_ratio = 0.0;
};
LogRatioBins CompareHistograms(std::span<const double> a, std::span<const double> b,
                               int bins, int min_joint_count);

double Mean(std::span<const double> x);
// Population variance (divides by n).
double Variance(std::span<const double> x);

}  // namespace sdc

#endif  // SDC_STATS_H_
