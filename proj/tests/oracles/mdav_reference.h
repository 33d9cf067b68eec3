#ifndef SDC_TESTS_ORACLES_MDAV_REFERENCE_H_
#define SDC_TESTS_ORACLES_MDAV_REFERENCE_H_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <set>
#include <vector>

namespace sdc::oracle {

using Points = std::vector<std::vector<double>>;
using Groups = std::vector<std::set<std::size_t>>;

// Population z-scores per coordinate.
inline Points Standardize(Points x) {
  if (x.empty()) return x;
  for (std::size_t c = 0; c < x[0].size(); ++c) {
    double mean = 0.0, var = 0.0;
    for (const auto& p : x) mean += p[c];
    mean /= static_cast<double>(x.size());
    for (const auto& p : x) var += (p[c] - mean) * (p[c] - mean);
    var /= static_cast<double>(x.size());
    const double sd = var > 0 ? std::sqrt(var) : 1.0;
    for (auto& p : x) p[c] = (p[c] - mean) / sd;
  }
  return x;
}

inline double Dist2(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t c = 0; c < a.size(); ++c) d += (a[c] - b[c]) * (a[c] - b[c]);
  return d;
}

// Textbook MDAV on distinct points (no tie handling).
inline Groups MdavReference(const Points& raw, std::size_t k) {
  const Points x = Standardize(raw);
  std::vector<std::size_t> left(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) left[i] = i;

  auto farthest = [&](const std::vector<double>& from) {
    std::size_t best = left[0];
    for (std::size_t i : left) {
      if (Dist2(x[i], from) > Dist2(x[best], from)) best = i;
    }
    return best;
  };
  auto centroid = [&] {
    std::vector<double> c(x[0].size(), 0.0);
    for (std::size_t i : left) {
      for (std::size_t d = 0; d < c.size(); ++d) c[d] += x[i][d];
    }
    for (double& v : c) v /= static_cast<double>(left.size());
    return c;
  };
  auto take = [&](std::size_t center) {
    std::vector<std::size_t> order = left;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return Dist2(x[a], x[center]) < Dist2(x[b], x[center]);
    });
    std::set<std::size_t> group(order.begin(), order.begin() + static_cast<long>(k));
    std::erase_if(left, [&](std::size_t i) { return group.contains(i); });
    return group;
  };

  Groups groups;
  while (left.size() >= 3 * k) {
    const std::size_t r = farthest(centroid());
    const std::size_t s = farthest(x[r]);
    groups.push_back(take(r));
    groups.push_back(take(s));
  }
  if (left.size() >= 2 * k) groups.push_back(take(farthest(centroid())));
  if (!left.empty()) groups.emplace_back(left.begin(), left.end());
  return groups;
}

// Exhaustive minimum within-group SSE over partitions into groups of size
// at least k (raw units). Small n only.
inline double MinSseBruteForce(const Points& x, std::size_t k) {
  const std::size_t n = x.size();
  double best = std::numeric_limits<double>::infinity();
  std::vector<int> label(n, -1);
  std::function<void(std::size_t, int)> assign = [&](std::size_t i, int used) {
    if (i == n) {
      double sse = 0.0;
      for (int g = 0; g < used; ++g) {
        std::vector<std::size_t> members;
        for (std::size_t r = 0; r < n; ++r) {
          if (label[r] == g) members.push_back(r);
        }
        if (members.size() < k) return;
        std::vector<double> c(x[0].size(), 0.0);
        for (std::size_t r : members) {
          for (std::size_t d = 0; d < c.size(); ++d) c[d] += x[r][d];
        }
        for (double& v : c) v /= static_cast<double>(members.size());
        for (std::size_t r : members) sse += Dist2(x[r], c);
      }
      best = std::min(best, sse);
      return;
    }
    for (int g = 0; g <= used; ++g) {
      label[i] = g;
      assign(i + 1, std::max(used, g + 1));
    }
    label[i] = -1;
  };
  assign(0, 0);
  return best;
}

}  // namespace sdc::oracle

#endif  // SDC_TESTS_ORACLES_MDAV_REFERENCE_H_
