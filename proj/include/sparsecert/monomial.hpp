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
#include <utility>
#include <vector>

#include "sparsecert/errors.hpp"

namespace sparsecert {

// Power product of variables X_1, X_2, ... in canonical sparse form: only
// nonzero exponents are stored, sorted by variable index (1-based).
class Monomial {
 public:
  using Factor = std::pair<int, int>;  // (variable index, exponent)

  Monomial() = default;  // the unit monomial (empty product)

  explicit Monomial(std::vector<Factor> factors) {
    std::sort(factors.begin(), factors.end());
    for (const auto& [var, exp] : factors) {
      if (var < 1) throw Error("monomial: variable indices are 1-based");
      if (exp < 0) throw Error("monomial: negative exponent");
      if (exp == 0) continue;
      if (!factors_.empty() && factors_.back().first == var) {
        factors_.back().second += exp;
      } else {
        factors_.emplace_back(var, exp);
      }
    }
  }

  static Monomial variable(int var, int exp = 1) {
    return Monomial({{var, exp}});
  }

  const std::vector<Factor>& factors() const { return factors_; }
  bool is_unit() const { return factors_.empty(); }

  int exponent(int var) const {
    for (const auto& [v, e] : factors_) {
      if (v == var) return e;
      if (v > var) break;
    }
    return 0;
  }

  int total_degree() const {
    int d = 0;
    for (const auto& f : factors_) d += f.second;
    return d;
  }

  int max_var() const { return factors_.empty() ? 0 : factors_.back().first; }

  Monomial times(const Monomial& other) const {
    std::vector<Factor> merged;
    merged.reserve(factors_.size() + other.factors_.size());
    auto a = factors_.begin(), ae = factors_.end();
    auto b = other.factors_.begin(), be = other.factors_.end();
    while (a != ae && b != be) {
      if (a->first < b->first) {
        merged.push_back(*a++);
      } else if (b->first < a->first) {
        merged.push_back(*b++);
      } else {
        merged.emplace_back(a->first, a->second + b->second);
        ++a; ++b;
      }
    }
    merged.insert(merged.end(), a, ae);
    merged.insert(merged.end(), b, be);
    Monomial out;
    out.factors_ = std::move(merged);
    return out;
  }

  bool operator==(const Monomial& other) const {
    return factors_ == other.factors_;
  }
  bool operator!=(const Monomial& other) const { return !(*this == other); }

  std::string to_string() const {
    if (factors_.empty()) return "1";
    std::string s;
    for (const auto& [var, exp] : factors_) {
      if (!s.empty()) s += "*";
      s += "X" + std::to_string(var);
      if (exp != 1) s += "^" + std::to_string(exp);
    }
    return s;
  }

 private:
  std::vector<Factor> factors_;
};

// Graded lexicographic order: compare total degree, then exponents of
// X_1, X_2, ... with a larger exponent on an earlier variable ranking higher.
struct GrlexLess {
  bool operator()(const Monomial& a, const Monomial& b) const {
    const int da = a.total_degree(), db = b.total_degree();
    if (da != db) return da < db;
    auto i = a.factors().begin(), ie = a.factors().end();
    auto j = b.factors().begin(), je = b.factors().end();
    while (i != ie || j != je) {
      const int va = (i != ie) ? i->first : INT_MAX_VAR;
      const int vb = (j != je) ? j->first : INT_MAX_VAR;
      if (va < vb) return false;       // a has the earlier variable: a > b
      if (vb < va) return true;        // b has the earlier variable: a < b
      if (i->second != j->second) return i->second < j->second;
      ++i; ++j;
    }
    return false;
  }

 private:
  static constexpr int INT_MAX_VAR = 1 << 30;
};

}  // namespace sparsecert
