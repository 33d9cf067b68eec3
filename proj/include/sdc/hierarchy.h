#ifndef SDC_HIERARCHY_H_
#define SDC_HIERARCHY_H_

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nlohmann/json.hpp"
#include "sdc/table.h"

namespace sdc {

// Value generalization hierarchy for one attribute. Level 0 is the value
// itself, level height() is the root covering the whole domain.
//
// Two backings:
//  * a categorical tree, read from a nested JSON object whose keys are node
//    labels ({"*": {"4300*": {"43007": {}, "43008": {}}, ...}}); every leaf
//    sits at the same depth and every label is unique;
//  * an interval ladder for numeric attributes, one list of [lo, hi]
//    intervals per level, each level nested inside the next and the last
//    one a single interval. Leaves are the grid lo, lo+step, ... of the root.
class GeneralizationHierarchy {
 public:
  struct Interval {
    double lo;
    double hi;
  };

  static GeneralizationHierarchy FromJson(const nlohmann::json& doc);
  static GeneralizationHierarchy Intervals(std::string attribute,
                                           std::vector<std::vector<Interval>> levels,
                                           double leaf_step = 1.0);

  const std::string& attribute() const { return attribute_; }
  int height() const { return height_; }
  bool is_interval() const { return !interval_levels_.empty(); }

  // Label of the ancestor of `value` at `level`. Throws kUnknownValue when
  // the value is not a leaf, kLevelOutOfRange for level outside [0, height].
  std::string Generalize(const Cell& value, int level) const;

  // Level of a released label, if it names a node of this hierarchy. Level 0
  // labels are leaf texts.
  std::optional<int> LevelOf(std::string_view label) const;

  // Leaf texts covered by a label; throws kUnknownValue for foreign labels and
  // kSearchSpaceTooLarge when an interval grid exceeds `limit` points.
  std::vector<std::string> LeavesUnder(std::string_view label,
                                       std::size_t limit = 1'000'000) const;

  bool Covers(std::string_view label, const Cell& value) const;

  nlohmann::json ToJson() const;

 private:
  struct Node {
    std::string label;
    int parent = -1;
    int depth = 0;
    std::vector<int> children;
  };

  double ParseLeaf(const Cell& value) const;
  std::optional<std::size_t> IntervalAt(double x, int level) const;
  static std::string IntervalLabel(const Interval& iv);

  std::string attribute_;
  int height_ = 0;

  // Categorical tree.
  std::vector<Node> nodes_;
  std::map<std::string, int, std::less<>> by_label_;

  // Interval ladder; interval_levels_[l - 1] holds level l.
  std::vector<std::vector<Interval>> interval_levels_;
  double leaf_step_ = 1.0;
};

using HierarchyMap = std::map<std::string, GeneralizationHierarchy, std::less<>>;

}  // namespace sdc

#endif  // SDC_HIERARCHY_H_
