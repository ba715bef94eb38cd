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
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "sparsecert/monomial.hpp"
#include "sparsecert/rational.hpp"

namespace sparsecert {

// Sparse multivariate polynomial with exact rational coefficients over a
// declared ambient variable set X_1..X_nvars. Canonical form: no zero
// coefficients are stored, terms ordered graded-lexicographically. Values
// are immutable in spirit: every operation returns a fresh polynomial.
class Polynomial {
 public:
  using TermMap = std::map<Monomial, Rational, GrlexLess>;

  explicit Polynomial(int nvars = 0) : nvars_(nvars) {
    if (nvars < 0) throw Error("polynomial: negative variable count");
  }

  static Polynomial constant(int nvars, Rational c) {
    Polynomial p(nvars);
    if (c != 0) p.terms_.emplace(Monomial(), std::move(c));
    return p;
  }

  static Polynomial variable(int nvars, int var) {
    return monomial_term(nvars, Monomial::variable(var), Rational(1));
  }

  static Polynomial monomial_term(int nvars, const Monomial& m, Rational c) {
    Polynomial p(nvars);
    if (m.max_var() > nvars) {
      throw Error("polynomial: monomial " + m.to_string() +
                  " exceeds ambient dimension " + std::to_string(nvars));
    }
    if (c != 0) p.terms_.emplace(m, std::move(c));
    return p;
  }

  static Polynomial from_terms(int nvars,
                               const std::vector<std::pair<Monomial, Rational>>& terms) {
    Polynomial p(nvars);
    for (const auto& [m, c] : terms) p.add_term(m, c);
    return p;
  }

  int nvars() const { return nvars_; }
  const TermMap& terms() const { return terms_; }

  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const {
    return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.is_unit());
  }

  Rational constant_value() const {
    if (terms_.empty()) return Rational(0);
    if (!is_constant()) throw Error("constant_value on non-constant polynomial");
    return terms_.begin()->second;
  }

  // -1 for the zero polynomial.
  int degree() const {
    return terms_.empty() ? -1 : terms_.rbegin()->first.total_degree();
  }

  Rational coeff(const Monomial& m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? Rational(0) : it->second;
  }

  // Largest exponent of X_var over all terms.
  int max_exponent(int var) const {
    int d = 0;
    for (const auto& [m, c] : terms_) d = std::max(d, m.exponent(var));
    return d;
  }

  // Variable indices appearing with nonzero exponent in some term; sorted.
  std::vector<int> support_vars() const {
    std::vector<int> vars;
    for (const auto& [m, c] : terms_) {
      for (const auto& [v, e] : m.factors()) vars.push_back(v);
    }
    std::sort(vars.begin(), vars.end());
    vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
    return vars;
  }

  Rational coefficient_max_norm() const {
    Rational n(0);
    for (const auto& [m, c] : terms_) n = std::max(n, abs(c));
    return n;
  }

  Polynomial operator-() const {
    Polynomial out(nvars_);
    for (const auto& [m, c] : terms_) out.terms_.emplace(m, -c);
    return out;
  }

  Polynomial operator+(const Polynomial& other) const {
    check_same_ambient(other);
    Polynomial out = *this;
    for (const auto& [m, c] : other.terms_) out.add_term(m, c);
    return out;
  }

  Polynomial operator-(const Polynomial& other) const {
    check_same_ambient(other);
    Polynomial out = *this;
    for (const auto& [m, c] : other.terms_) out.add_term(m, -c);
    return out;
  }

  Polynomial operator*(const Polynomial& other) const {
    check_same_ambient(other);
    Polynomial out(nvars_);
    for (const auto& [ma, ca] : terms_) {
      for (const auto& [mb, cb] : other.terms_) {
        out.add_term(ma.times(mb), ca * cb);
      }
    }
    return out;
  }

  Polynomial operator*(const Rational& s) const {
    Polynomial out(nvars_);
    if (s == 0) return out;
    for (const auto& [m, c] : terms_) out.terms_.emplace(m, c * s);
    return out;
  }

  Polynomial& operator+=(const Polynomial& other) { return *this = *this + other; }
  Polynomial& operator-=(const Polynomial& other) { return *this = *this - other; }
  Polynomial& operator*=(const Polynomial& other) { return *this = *this * other; }

  // Binary exponentiation; pow(p, 0) is the constant 1.
  Polynomial pow(int e) const {
    if (e < 0) throw Error("polynomial: negative power");
    Polynomial result = constant(nvars_, Rational(1));
    Polynomial base = *this;
    while (e > 0) {
      if (e & 1) result = result * base;
      base = (e >>= 1) ? base * base : base;
    }
    return result;
  }

  // Exact evaluation; point must have exactly nvars coordinates (X_i = point[i-1]).
  Rational eval(const std::vector<Rational>& point) const {
    if (static_cast<int>(point.size()) != nvars_) {
      throw Error("eval: point dimension " + std::to_string(point.size()) +
                  " does not match ambient dimension " + std::to_string(nvars_));
    }
    // Per-variable power tables.
    std::vector<std::vector<Rational>> powers(nvars_ + 1);
    for (const auto& [m, c] : terms_) {
      for (const auto& [v, e] : m.factors()) {
        auto& tab = powers[v];
        if (tab.empty()) tab = {Rational(1), point[v - 1]};
        while (static_cast<int>(tab.size()) <= e) tab.push_back(tab.back() * point[v - 1]);
      }
    }
    Rational sum(0);
    for (const auto& [m, c] : terms_) {
      Rational t = c;
      for (const auto& [v, e] : m.factors()) t *= powers[v][e];
      sum += t;
    }
    return sum;
  }

  // Plug in values for a subset of variables; the result lives in the same
  // ambient space with those variables eliminated from the support.
  Polynomial substitute(const std::map<int, Rational>& values) const {
    Polynomial out(nvars_);
    for (const auto& [m, c] : terms_) {
      Rational factor = c;
      std::vector<Monomial::Factor> kept;
      for (const auto& [v, e] : m.factors()) {
        auto it = values.find(v);
        if (it == values.end()) {
          kept.emplace_back(v, e);
        } else {
          Rational pw(1);
          for (int i = 0; i < e; ++i) pw *= it->second;
          factor *= pw;
        }
      }
      out.add_term(Monomial(kept), factor);
    }
    return out;
  }

  // X_var <- offset + scale * X_var, exactly (binomial expansion per term).
  Polynomial substitute_affine(int var, const Rational& offset,
                               const Rational& scale) const {
    Polynomial out(nvars_);
    for (const auto& [m, c] : terms_) {
      const int e = m.exponent(var);
      if (e == 0) {
        out.add_term(m, c);
        continue;
      }
      std::vector<Monomial::Factor> rest;
      for (const auto& f : m.factors()) {
        if (f.first != var) rest.push_back(f);
      }
      // (offset + scale*X)^e = sum_t C(e,t) offset^(e-t) scale^t X^t
      Rational binom(1);
      Rational off_pow(1);
      std::vector<Rational> off_powers(e + 1);
      off_powers[0] = Rational(1);
      for (int i = 1; i <= e; ++i) off_powers[i] = off_powers[i - 1] * offset;
      Rational scale_pow(1);
      for (int t = 0; t <= e; ++t) {
        if (t > 0) {
          binom = binom * (e - t + 1) / t;
          scale_pow *= scale;
        }
        Rational coef = c * binom * off_powers[e - t] * scale_pow;
        std::vector<Monomial::Factor> factors = rest;
        if (t > 0) factors.emplace_back(var, t);
        out.add_term(Monomial(factors), coef);
      }
    }
    return out;
  }

  Polynomial derivative(int var) const {
    Polynomial out(nvars_);
    for (const auto& [m, c] : terms_) {
      const int e = m.exponent(var);
      if (e == 0) continue;
      std::vector<Monomial::Factor> factors;
      for (const auto& [v, ee] : m.factors()) {
        factors.emplace_back(v, v == var ? ee - 1 : ee);
      }
      out.add_term(Monomial(factors), c * e);
    }
    return out;
  }

  bool operator==(const Polynomial& other) const {
    return nvars_ == other.nvars_ && terms_ == other.terms_;
  }
  bool operator!=(const Polynomial& other) const { return !(*this == other); }

  std::string to_string() const {
    if (terms_.empty()) return "0";
    std::string s;
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
      const auto& [m, c] = *it;
      if (!s.empty()) s += (c > 0) ? " + " : " - ";
      else if (c < 0) s += "-";
      const Rational a = abs(c);
      if (a != 1 || m.is_unit()) {
        s += to_fraction_string(a);
        if (!m.is_unit()) s += "*";
      }
      if (!m.is_unit()) s += m.to_string();
    }
    return s;
  }

 private:
  void check_same_ambient(const Polynomial& other) const {
    if (nvars_ != other.nvars_) {
      throw Error("polynomial arithmetic on mismatched ambient dimensions " +
                  std::to_string(nvars_) + " vs " + std::to_string(other.nvars_));
    }
  }

  void add_term(const Monomial& m, const Rational& c) {
    if (c == 0) return;
    if (m.max_var() > nvars_) {
      throw Error("polynomial: monomial " + m.to_string() +
                  " exceeds ambient dimension " + std::to_string(nvars_));
    }
    auto [it, inserted] = terms_.emplace(m, c);
    if (!inserted) {
      it->second += c;
      if (it->second == 0) terms_.erase(it);
    }
  }

  int nvars_;
  TermMap terms_;
};


}  // namespace sparsecert
