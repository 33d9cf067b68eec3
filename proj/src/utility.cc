#include "sdc/utility.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "sdc/error.h"

namespace sdc {

double EmpiricalEmd1d(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) return 0.0;
  std::vector<double> x(a.begin(), a.end());
  std::vector<double> y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  if (x.size() == y.size()) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += std::abs(x[i] - y[i]);
    return s / static_cast<double>(x.size());
  }
  // Integral of |F_a - F_b| over the merged breakpoints.
  std::vector<double> points = x;
  points.insert(points.end(), y.begin(), y.end());
  std::sort(points.begin(), points.end());
  const double nx = static_cast<double>(x.size());
  const double ny = static_cast<double>(y.size());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    const double t = points[i];
    const double fx = static_cast<double>(std::upper_bound(x.begin(), x.end(), t) - x.begin()) / nx;
    const double fy = static_cast<double>(std::upper_bound(y.begin(), y.end(), t) - y.begin()) / ny;
    total += std::abs(fx - fy) * (points[i + 1] - t);
  }
  return total;
}

MicrodataTable NumericView(const MicrodataTable& original, const MicrodataTable& release) {
  Schema schema = release.schema();
  std::vector<std::vector<Cell>> rows = release.rows();
  for (std::size_t j = 0; j < schema.size(); ++j) {
    const auto oj = original.FindAttribute(schema[j].name);
    if (!oj || schema[j].kind == Kind::kNumeric) continue;
    const AttributeSchema& o = original.attribute(*oj);
    if (o.kind != Kind::kNumeric) continue;
    schema[j] = o;
    const double fallback = o.HasFiniteDomain() ? 0.5 * (o.min + o.max) : 0.0;
    for (auto& row : rows) row[j] = std::clamp(MaskedNumericValue(row[j], fallback), o.min, o.max);
  }
  return MicrodataTable(std::move(schema), std::move(rows), release.row_ids());
}

nlohmann::json UtilityReport::ToJson() const {
  nlohmann::json work = nlohmann::json::array();
  for (const WorkloadError& w : workload) {
    work.push_back({{"query", w.query.ToJson()},
                    {"original", w.original},
                    {"released", w.released ? nlohmann::json(*w.released) : nlohmann::json()},
                    {"abs_error", w.abs_error ? nlohmann::json(*w.abs_error) : nlohmann::json()}});
  }
  return {{"sse", {{"raw", sse.raw}, {"standardized", sse.standardized}}},
          {"marginal_distance", marginal_distance},
          {"workload", std::move(work)}};
}

UtilityReport ComputeUtility(const MicrodataTable& original, const MicrodataTable& release,
                             std::span<const Query> workload) {
  std::vector<std::string> shared;
  for (const AttributeSchema& a : release.schema()) {
    if (original.FindAttribute(a.name)) shared.push_back(a.name);
  }
  UtilityReport report;
  report.sse = Sse(original, release, shared);

  const MicrodataTable view = NumericView(original, release);
  for (const std::string& name : shared) {
    const std::size_t oj = original.AttributeIndex(name);
    const std::size_t rj = view.AttributeIndex(name);
    const AttributeSchema& a = original.attribute(oj);
    if (a.kind == Kind::kNumeric) {
      const Eigen::VectorXd x = original.NumericColumn(oj);
      const Eigen::VectorXd y = view.NumericColumn(rj);
      double width = a.HasFiniteDomain() ? a.Width() : 0.0;
      if (!(width > 0) && x.size() > 0) width = x.maxCoeff() - x.minCoeff();
      const double emd = EmpiricalEmd1d(std::span<const double>(x.data(), static_cast<std::size_t>(x.size())),
                                        std::span<const double>(y.data(), static_cast<std::size_t>(y.size())));
      report.marginal_distance[name] = width > 0 ? emd / width : emd;
    } else {
      std::map<std::string, double> p, q;
      for (std::size_t i = 0; i < original.num_rows(); ++i) p[CellText(original.cell(i, oj))] += 1.0;
      for (std::size_t i = 0; i < view.num_rows(); ++i) q[CellText(view.cell(i, rj))] += 1.0;
      std::set<std::string> support;
      for (const auto& [v, c] : p) support.insert(v);
      for (const auto& [v, c] : q) support.insert(v);
      double tv = 0.0;
      const double np = std::max<double>(1.0, static_cast<double>(original.num_rows()));
      const double nq = std::max<double>(1.0, static_cast<double>(view.num_rows()));
      for (const std::string& v : support) {
        tv += std::abs((p.contains(v) ? p[v] / np : 0.0) - (q.contains(v) ? q[v] / nq : 0.0));
      }
      report.marginal_distance[name] = 0.5 * tv;
    }
  }

  for (const Query& query : workload) {
    WorkloadError w{query, EvaluateQuery(query, original), std::nullopt, std::nullopt};
    try {
      w.released = EvaluateQuery(query, view);
      w.abs_error = std::abs(*w.released - w.original);
    } catch (const Error&) {
      // The release lacks the attribute or row the query needs.
    }
    report.workload.push_back(std::move(w));
  }
  return report;
}

}  // namespace sdc
