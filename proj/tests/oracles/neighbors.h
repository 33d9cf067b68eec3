#ifndef SDC_TESTS_ORACLES_NEIGHBORS_H_
#define SDC_TESTS_ORACLES_NEIGHBORS_H_

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace sdc::oracle {

using Query1d = std::function<double(const std::vector<double>&)>;

// Largest |f(x) - f(x')| over neighbors x' of x: removing one record, or
// replacing one by any value on `grid`.
inline double IndividualSensitivityBruteForce(const Query1d& f, const std::vector<double>& x,
                                              const std::vector<double>& grid, bool replace) {
  const double fx = f(x);
  double best = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!replace) {
      std::vector<double> y = x;
      y.erase(y.begin() + static_cast<long>(i));
      best = std::max(best, std::abs(f(y) - fx));
      continue;
    }
    for (double v : grid) {
      std::vector<double> y = x;
      y[i] = v;
      best = std::max(best, std::abs(f(y) - fx));
    }
  }
  return best;
}

// Largest change over every table of at most `max_rows` grid values and its
// neighbors.
inline double GlobalSensitivityBruteForce(const Query1d& f, const std::vector<double>& grid,
                                          std::size_t max_rows, bool replace) {
  double best = 0.0;
  std::vector<double> x;
  std::function<void(std::size_t)> grow = [&](std::size_t start) {
    if (!x.empty()) best = std::max(best, IndividualSensitivityBruteForce(f, x, grid, replace));
    if (x.size() == max_rows) return;
    for (std::size_t g = start; g < grid.size(); ++g) {
      x.push_back(grid[g]);
      grow(g);
      x.pop_back();
    }
  };
  grow(0);
  return best;
}

}  // namespace sdc::oracle

#endif  // SDC_TESTS_ORACLES_NEIGHBORS_H_
