/*
   Copyright 2026 The sparsecert Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

        http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "sparsecert/errors.hpp"
#include "sparsecert/rational.hpp"

namespace sparsecert {

// Non-empty sorted set of 1-based variable indices (a block I_j).
class BlockIndexSet {
 public:
  explicit BlockIndexSet(std::vector<int> indices) : indices_(std::move(indices)) {
    std::sort(indices_.begin(), indices_.end());
    indices_.erase(std::unique(indices_.begin(), indices_.end()), indices_.end());
    if (indices_.empty()) throw InputError("block must be non-empty");
    if (indices_.front() < 1) throw InputError("block indices are 1-based");
  }

  const std::vector<int>& indices() const { return indices_; }
  int size() const { return static_cast<int>(indices_.size()); }
  int max_index() const { return indices_.back(); }

  bool contains(int var) const {
    return std::binary_search(indices_.begin(), indices_.end(), var);
  }

  bool contains_all(const std::vector<int>& vars) const {
    for (int v : vars) {
      if (!contains(v)) return false;
    }
    return true;
  }

  bool is_subset_of(const BlockIndexSet& other) const {
    return std::includes(other.indices_.begin(), other.indices_.end(),
                         indices_.begin(), indices_.end());
  }

  // Intersection may be empty, so it is returned as a raw index vector.
  std::vector<int> intersect(const BlockIndexSet& other) const {
    std::vector<int> out;
    std::set_intersection(indices_.begin(), indices_.end(), other.indices_.begin(),
                          other.indices_.end(), std::back_inserter(out));
    return out;
  }

  BlockIndexSet unite(const BlockIndexSet& other) const {
    std::vector<int> out;
    std::set_union(indices_.begin(), indices_.end(), other.indices_.begin(),
                   other.indices_.end(), std::back_inserter(out));
    return BlockIndexSet(std::move(out));
  }

  // Elements of this block not in `other`; may be empty.
  std::vector<int> difference(const std::vector<int>& other) const {
    std::vector<int> out;
    std::set_difference(indices_.begin(), indices_.end(), other.begin(), other.end(),
                        std::back_inserter(out));
    return out;
  }

  bool operator==(const BlockIndexSet& other) const { return indices_ == other.indices_; }
  bool operator!=(const BlockIndexSet& other) const { return !(*this == other); }

  std::string to_string() const {
    std::string s = "{";
    for (size_t i = 0; i < indices_.size(); ++i) {
      if (i) s += ",";
      s += std::to_string(indices_[i]);
    }
    return s + "}";
  }

 private:
  std::vector<int> indices_;
};

struct Interval {
  Rational lo;
  Rational hi;

  Rational width() const { return hi - lo; }
  Rational midpoint() const { return (lo + hi) / 2; }
  bool contains(const Rational& x) const { return lo <= x && x <= hi; }
};

// Product of closed intervals [lo_i, hi_i], one per ambient variable.
class Box {
 public:
  explicit Box(std::vector<Interval> intervals) : intervals_(std::move(intervals)) {
    for (const auto& iv : intervals_) {
      if (iv.lo > iv.hi) throw InputError("box interval has lo > hi");
    }
  }

  static Box uniform(int nvars, Rational lo, Rational hi) {
    if (lo > hi) throw InputError("box interval has lo > hi");
    return Box(std::vector<Interval>(nvars, Interval{std::move(lo), std::move(hi)}));
  }

  int nvars() const { return static_cast<int>(intervals_.size()); }

  const Interval& interval(int var) const {
    if (var < 1 || var > nvars()) {
      throw Error("box: variable " + std::to_string(var) + " out of range");
    }
    return intervals_[var - 1];
  }

  const std::vector<Interval>& intervals() const { return intervals_; }

  bool contains(const std::vector<Rational>& point) const {
    if (static_cast<int>(point.size()) != nvars()) return false;
    for (size_t i = 0; i < point.size(); ++i) {
      if (!intervals_[i].contains(point[i])) return false;
    }
    return true;
  }

  // True when every coordinate shares one interval, the K^n shape.
  bool is_common_interval() const {
    for (const auto& iv : intervals_) {
      if (iv.lo != intervals_[0].lo || iv.hi != intervals_[0].hi) return false;
    }
    return true;
  }

 private:
  std::vector<Interval> intervals_;
};

}  // namespace sparsecert
