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

#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <cstdint>
#include <string>

#include "sparsecert/errors.hpp"

namespace sparsecert {

// All certificate identities are stated and checked over exact rationals.
// Floating point appears only in the numerical layers (SDP, least squares)
// and is always followed by rationalization plus an exact residual check.
using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline double to_double(const Rational& q) { return q.convert_to<double>(); }

// "5", "-3/4"; denominator is omitted when it is 1.
inline std::string to_fraction_string(const Rational& q) {
  if (denominator(q) == 1) return numerator(q).str();
  return numerator(q).str() + "/" + denominator(q).str();
}

namespace detail {

// Strict base-10 integer parse. A leading zero must not flip the value to
// octal, which Integer's own string constructor would do.
inline Integer parse_decimal_integer(const std::string& text) {
  std::size_t pos = 0;
  bool neg = false;
  if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
    neg = text[pos] == '-';
    ++pos;
  }
  if (pos == text.size()) throw InputError("malformed integer '" + text + "'");
  Integer value(0);
  for (; pos < text.size(); ++pos) {
    if (text[pos] < '0' || text[pos] > '9') {
      throw InputError("malformed integer '" + text + "'");
    }
    value = value * 10 + (text[pos] - '0');
  }
  return neg ? Integer(-value) : value;
}

}  // namespace detail

// Accepts "a", "a/b" and plain decimals like "-1.25" (converted exactly).
inline Rational parse_rational(const std::string& text) {
  if (text.empty()) throw InputError("empty rational literal");
  const auto slash = text.find('/');
  const auto dot = text.find('.');
  if (slash != std::string::npos) {
    const Integer num = detail::parse_decimal_integer(text.substr(0, slash));
    const Integer den = detail::parse_decimal_integer(text.substr(slash + 1));
    if (den == 0) throw InputError("zero denominator in '" + text + "'");
    return Rational(num, den);
  }
  if (dot != std::string::npos) {
    const std::string digits = text.substr(0, dot) + text.substr(dot + 1);
    const std::size_t frac_len = text.size() - dot - 1;
    if (frac_len == 0 || digits.empty() || digits == "-" || digits == "+") {
      throw InputError("malformed decimal '" + text + "'");
    }
    const Integer num = detail::parse_decimal_integer(digits);
    Integer den(1);
    for (std::size_t i = 0; i < frac_len; ++i) den *= 10;
    return Rational(num, den);
  }
  return Rational(detail::parse_decimal_integer(text));
}

// Exact value of the IEEE double (every finite double is rational with a
// power-of-two denominator bounded by 2^53 scaling).
inline Rational rational_from_double(double x) {
  if (!std::isfinite(x)) throw InputError("non-finite number in input");
  return Rational(x);
}

namespace detail {

// Simplest rational (minimal denominator) in the closed interval [a, b],
// a <= b. Continued-fraction bisection.
inline Rational simplest_in_interval(const Rational& a, const Rational& b) {
  if (a > b) throw Error("simplest_in_interval: empty interval");
  if (a <= 0 && 0 <= b) return Rational(0);
  if (b < 0) return -simplest_in_interval(-b, -a);
  // 0 < a <= b
  Integer n = numerator(a) / denominator(a);  // floor, a > 0
  if (Rational(n + 1) <= b) {
    // Some integer lies in [a, b]; the smallest one is ceil(a).
    Integer c = (numerator(a) + denominator(a) - 1) / denominator(a);
    return Rational(c);
  }
  if (Rational(n) == a) return a;  // a itself is an integer inside [a, b]
  Rational fa = a - n, fb = b - n;  // 0 < fa <= fb < 1
  return Rational(n) + 1 / simplest_in_interval(1 / fb, 1 / fa);
}

}  // namespace detail

// Minimal-denominator rational within +/- tol of x. If even that denominator
// exceeds max_den, falls back to the last continued-fraction convergent of x
// whose denominator fits. Used to turn floating-point solver output back
// into exact data.
inline Rational round_to_rational(double x, double tol,
                                  const Integer& max_den = (Integer(1) << 40)) {
  if (!std::isfinite(x)) throw Error("round_to_rational: non-finite value");
  const Rational qx = rational_from_double(x);
  const Rational qtol = rational_from_double(std::abs(tol));
  Rational best = detail::simplest_in_interval(qx - qtol, qx + qtol);
  if (denominator(best) <= max_den) return best;
  // Continued-fraction convergents of qx.
  Integer p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  Rational r = qx;
  bool neg = r < 0;
  if (neg) r = -r;
  for (int iter = 0; iter < 128; ++iter) {
    Integer ai = numerator(r) / denominator(r);
    Integer p2 = ai * p1 + p0, q2 = ai * q1 + q0;
    if (q2 > max_den) break;
    p0 = p1; q0 = q1; p1 = p2; q1 = q2;
    Rational frac = r - ai;
    if (frac == 0) break;
    r = 1 / frac;
  }
  Rational out(p1, q1 == 0 ? Integer(1) : q1);
  return neg ? -out : out;
}

inline Rational abs(const Rational& q) { return q < 0 ? -q : q; }

}  // namespace sparsecert
