#include "sdc/hierarchy.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <set>

#include "sdc/error.h"

namespace sdc {

GeneralizationHierarchy GeneralizationHierarchy::FromJson(const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("attribute")) {
    throw Error(ErrorCode::kInvalidHierarchy, "hierarchy needs an 'attribute' field");
  }
  const std::string attribute = doc["attribute"].get<std::string>();
  if (doc.contains("intervals")) {
    std::vector<std::vector<Interval>> levels;
    for (const auto& level : doc["intervals"]) {
      std::vector<Interval> ivs;
      for (const auto& iv : level) {
        if (!iv.is_array() || iv.size() != 2) {
          throw Error(ErrorCode::kInvalidHierarchy, attribute + ": interval is [lo, hi]");
        }
        ivs.push_back({iv[0].get<double>(), iv[1].get<double>()});
      }
      levels.push_back(std::move(ivs));
    }
    return Intervals(attribute, std::move(levels), doc.value("leaf_step", 1.0));
  }
  if (!doc.contains("tree") || !doc["tree"].is_object() || doc["tree"].size() != 1) {
    throw Error(ErrorCode::kInvalidHierarchy,
                attribute + ": 'tree' must be an object with exactly one root");
  }

  GeneralizationHierarchy h;
  h.attribute_ = attribute;
  std::function<void(const std::string&, const nlohmann::json&, int, int)> add =
      [&](const std::string& raw_label, const nlohmann::json& children, int parent, int depth) {
        const std::string label = NormalizeNfc(raw_label);
        const int id = static_cast<int>(h.nodes_.size());
        if (!h.by_label_.emplace(label, id).second) {
          throw Error(ErrorCode::kInvalidHierarchy,
                      attribute + ": label '" + label + "' appears twice");
        }
        h.nodes_.push_back({label, parent, depth, {}});
        if (parent >= 0) h.nodes_[static_cast<std::size_t>(parent)].children.push_back(id);
        if (children.is_object()) {
          for (const auto& [child, grandchildren] : children.items()) {
            add(child, grandchildren, id, depth + 1);
          }
        } else if (!children.is_null()) {
          throw Error(ErrorCode::kInvalidHierarchy,
                      attribute + ": children of '" + label + "' must be an object");
        }
      };
  add(doc["tree"].begin().key(), doc["tree"].begin().value(), -1, 0);

  int leaf_depth = -1;
  for (const Node& n : h.nodes_) {
    if (!n.children.empty()) continue;
    if (leaf_depth < 0) leaf_depth = n.depth;
    if (n.depth != leaf_depth) {
      throw Error(ErrorCode::kInvalidHierarchy,
                  attribute + ": leaves must all sit at the same depth ('" + n.label + "')");
    }
  }
  h.height_ = leaf_depth;
  return h;
}

GeneralizationHierarchy GeneralizationHierarchy::Intervals(
    std::string attribute, std::vector<std::vector<Interval>> levels, double leaf_step) {
  if (levels.empty()) {
    throw Error(ErrorCode::kInvalidHierarchy, attribute + ": no interval levels");
  }
  if (!(leaf_step > 0)) {
    throw Error(ErrorCode::kInvalidHierarchy, attribute + ": leaf_step must be positive");
  }
  std::set<std::string> labels;
  for (std::size_t l = 0; l < levels.size(); ++l) {
    auto& level = levels[l];
    std::sort(level.begin(), level.end(),
              [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
    for (std::size_t i = 0; i < level.size(); ++i) {
      if (!(level[i].lo <= level[i].hi)) {
        throw Error(ErrorCode::kInvalidHierarchy, attribute + ": interval with lo > hi");
      }
      if (i > 0 && level[i].lo <= level[i - 1].hi) {
        throw Error(ErrorCode::kInvalidHierarchy,
                    attribute + ": overlapping intervals at level " + std::to_string(l + 1));
      }
      if (!labels.insert(IntervalLabel(level[i])).second) {
        throw Error(ErrorCode::kInvalidHierarchy,
                    attribute + ": interval " + IntervalLabel(level[i]) + " repeats across levels");
      }
    }
    if (l + 1 < levels.size()) {
      for (const Interval& iv : level) {
        const bool nested = std::any_of(levels[l + 1].begin(), levels[l + 1].end(),
                                        [&](const Interval& up) {
                                          return up.lo <= iv.lo && iv.hi <= up.hi;
                                        });
        if (!nested) {
          throw Error(ErrorCode::kInvalidHierarchy,
                      attribute + ": " + IntervalLabel(iv) + " is not nested in level " +
                          std::to_string(l + 2));
        }
      }
    }
  }
  if (levels.back().size() != 1) {
    throw Error(ErrorCode::kInvalidHierarchy, attribute + ": top level must be a single interval");
  }
  GeneralizationHierarchy h;
  h.attribute_ = std::move(attribute);
  h.height_ = static_cast<int>(levels.size());
  h.interval_levels_ = std::move(levels);
  h.leaf_step_ = leaf_step;
  return h;
}

std::string GeneralizationHierarchy::IntervalLabel(const Interval& iv) {
  return "[" + FormatNumber(iv.lo) + "," + FormatNumber(iv.hi) + "]";
}

double GeneralizationHierarchy::ParseLeaf(const Cell& value) const {
  if (const double* d = std::get_if<double>(&value)) return *d;
  const std::string& s = std::get<std::string>(value);
  double x = 0.0;
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (ec != std::errc() || end != s.data() + s.size()) {
    throw Error(ErrorCode::kUnknownValue, attribute_ + ": '" + s + "' is not a leaf");
  }
  return x;
}

std::optional<std::size_t> GeneralizationHierarchy::IntervalAt(double x, int level) const {
  const auto& ivs = interval_levels_[static_cast<std::size_t>(level - 1)];
  for (std::size_t i = 0; i < ivs.size(); ++i) {
    if (ivs[i].lo <= x && x <= ivs[i].hi) return i;
  }
  return std::nullopt;
}

std::string GeneralizationHierarchy::Generalize(const Cell& value, int level) const {
  if (level < 0 || level > height_) {
    throw Error(ErrorCode::kLevelOutOfRange,
                attribute_ + ": level " + std::to_string(level) + " outside [0, " +
                    std::to_string(height_) + "]");
  }
  if (is_interval()) {
    const double x = ParseLeaf(value);
    if (!IntervalAt(x, height_)) {
      throw Error(ErrorCode::kUnknownValue,
                  attribute_ + ": " + FormatNumber(x) + " outside the root interval");
    }
    if (level == 0) return FormatNumber(x);
    const auto i = IntervalAt(x, level);
    if (!i) {
      throw Error(ErrorCode::kUnknownValue,
                  attribute_ + ": " + FormatNumber(x) + " falls between intervals at level " +
                      std::to_string(level));
    }
    return IntervalLabel(interval_levels_[static_cast<std::size_t>(level - 1)][*i]);
  }
  const std::string text = CellText(value);
  auto it = by_label_.find(text);
  if (it == by_label_.end() || !nodes_[static_cast<std::size_t>(it->second)].children.empty()) {
    throw Error(ErrorCode::kUnknownValue, attribute_ + ": '" + text + "' is not a leaf");
  }
  int node = it->second;
  for (int l = 0; l < level; ++l) node = nodes_[static_cast<std::size_t>(node)].parent;
  return nodes_[static_cast<std::size_t>(node)].label;
}

std::optional<int> GeneralizationHierarchy::LevelOf(std::string_view label) const {
  if (is_interval()) {
    for (std::size_t l = 0; l < interval_levels_.size(); ++l) {
      for (const Interval& iv : interval_levels_[l]) {
        if (IntervalLabel(iv) == label) return static_cast<int>(l + 1);
      }
    }
    double x = 0.0;
    auto [end, ec] = std::from_chars(label.data(), label.data() + label.size(), x);
    if (ec == std::errc() && end == label.data() + label.size() && IntervalAt(x, height_)) {
      return 0;
    }
    return std::nullopt;
  }
  auto it = by_label_.find(label);
  if (it == by_label_.end()) return std::nullopt;
  return height_ - nodes_[static_cast<std::size_t>(it->second)].depth;
}

std::vector<std::string> GeneralizationHierarchy::LeavesUnder(std::string_view label,
                                                              std::size_t limit) const {
  const auto level = LevelOf(label);
  if (!level) {
    throw Error(ErrorCode::kUnknownValue,
                attribute_ + ": '" + std::string(label) + "' is not a node");
  }
  std::vector<std::string> out;
  if (is_interval()) {
    if (*level == 0) return {std::string(label)};
    const auto& ivs = interval_levels_[static_cast<std::size_t>(*level - 1)];
    const Interval* iv = nullptr;
    for (const Interval& cand : ivs) {
      if (IntervalLabel(cand) == label) iv = &cand;
    }
    const Interval& root = interval_levels_.back().front();
    const double points = std::floor((iv->hi - iv->lo) / leaf_step_) + 1;
    if (points > static_cast<double>(limit)) {
      throw Error(ErrorCode::kSearchSpaceTooLarge,
                  attribute_ + ": " + std::string(label) + " covers too many leaves");
    }
    // Grid anchored at the root's lower bound.
    const double first = root.lo + std::ceil((iv->lo - root.lo) / leaf_step_) * leaf_step_;
    for (double x = first; x <= iv->hi + 1e-9 * leaf_step_; x += leaf_step_) {
      out.push_back(FormatNumber(x));
    }
    return out;
  }
  std::vector<int> stack = {by_label_.find(label)->second};
  while (!stack.empty()) {
    const Node& n = nodes_[static_cast<std::size_t>(stack.back())];
    stack.pop_back();
    if (n.children.empty()) {
      out.push_back(n.label);
      continue;
    }
    for (auto it = n.children.rbegin(); it != n.children.rend(); ++it) stack.push_back(*it);
  }
  return out;
}

bool GeneralizationHierarchy::Covers(std::string_view label, const Cell& value) const {
  const auto level = LevelOf(label);
  if (!level) return false;
  try {
    return Generalize(value, *level) == label;
  } catch (const Error&) {
    return false;
  }
}

nlohmann::json GeneralizationHierarchy::ToJson() const {
  nlohmann::json doc;
  doc["attribute"] = attribute_;
  if (is_interval()) {
    nlohmann::json levels = nlohmann::json::array();
    for (const auto& level : interval_levels_) {
      nlohmann::json ivs = nlohmann::json::array();
      for (const Interval& iv : level) ivs.push_back({iv.lo, iv.hi});
      levels.push_back(std::move(ivs));
    }
    doc["intervals"] = std::move(levels);
    doc["leaf_step"] = leaf_step_;
    return doc;
  }
  std::function<nlohmann::json(int)> subtree = [&](int id) {
    nlohmann::json children = nlohmann::json::object();
    for (int c : nodes_[static_cast<std::size_t>(id)].children) {
      children[nodes_[static_cast<std::size_t>(c)].label] = subtree(c);
    }
    return children;
  };
  doc["tree"] = {{nodes_.front().label, subtree(0)}};
  return doc;
}

}  // namespace sdc
