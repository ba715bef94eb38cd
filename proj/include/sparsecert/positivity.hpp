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

#include <optional>
#include <string>
#include <vector>

#include "sparsecert/bernstein.hpp"
#include "sparsecert/block_set.hpp"
#include "sparsecert/polynomial.hpp"

namespace sparsecert {

enum class Verdict { positive, disproved, inconclusive };

enum class BoundMethod { bernstein, grid_lipschitz };

inline std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::positive: return "positive";
    case Verdict::disproved: return "disproved";
    default: return "inconclusive";
  }
}

inline std::string to_string(BoundMethod m) {
  return m == BoundMethod::bernstein ? "bernstein" : "grid_lipschitz";
}

struct PositivityReport {
  Verdict verdict = Verdict::inconclusive;
  Rational lower_bound;
  std::optional<Rational> upper_bound;
  std::vector<Rational> witness_point;
  Rational witness_value;
  BoundMethod method = BoundMethod::bernstein;
  int subdivision_depth = 0;
};

struct CertifyOptions {
  int depth_cap = 10;
  // Dense Bernstein tensors above this size fall back to grid bounds.
  Integer tensor_cap = Integer(50000);
  int grid_resolution_cap = 64;
  // Extra subdivision levels explored after positivity is already settled,
  // purely to tighten the reported bound.
  int polish_depths = 3;
};

namespace detail {

// Cap on exact grid evaluations per resolution. Finer resolutions past the
// cap are skipped; the bounds already collected stay valid, only sharpness
// on high-dimensional supports is lost.
inline const Integer kGridEvalBudget(300000);

// Certified bound on |dp/dX_i| over the box: Bernstein when the derivative
// tensor is small, otherwise the coefficient bound
// sum over terms of |c| * e_i * prod_u B_u^(e_u - [u==i]) with
// B_u = max(|lo_u|, |hi_u|).
inline Rational partial_abs_bound(const Polynomial& p, const Box& box, int var) {
  const Polynomial d = p.derivative(var);
  if (d.is_zero()) return Rational(0);
  if (bernstein_tensor_size(d) <= Integer(20000)) {
    const Rational lo = bernstein_lower_bound(d, box, 0);
    const Rational hi = bernstein_upper_bound(d, box, 0);
    return std::max(abs(lo), abs(hi));
  }
  Rational total(0);
  for (const auto& [m, c] : d.terms()) {
    Rational t = abs(c);
    for (const auto& [v, e] : m.factors()) {
      const Interval& iv = box.interval(v);
      const Rational b = std::max(abs(iv.lo), abs(iv.hi));
      for (int i = 0; i < e; ++i) t *= b;
    }
    total += t;
  }
  return total;
}

}  // namespace detail

struct GridMin {
  Rational approx_min;
  Rational certified_lower;
  std::vector<Rational> argmin;
};

// Exact evaluation of p on the uniform grid with `resolution` subdivisions
// per axis. certified_lower = approx_min - L * h, with L the summed
// certified partial-derivative bounds and h the largest grid-cell
// half-width, so certified_lower <= min over the box <= approx_min.
inline GridMin grid_min(const Polynomial& p, const Box& box, int resolution) {
  if (resolution < 1) throw Error("grid_min: resolution must be >= 1");
  const auto support = p.support_vars();
  const int m = static_cast<int>(support.size());
  std::vector<Rational> point(box.nvars());
  for (int v = 1; v <= box.nvars(); ++v) point[v - 1] = box.interval(v).midpoint();

  GridMin out;
  out.argmin = point;
  out.approx_min = p.eval(point);
  std::vector<int> ticks(m, 0);
  bool first = true;
  while (m > 0) {
    for (int i = 0; i < m; ++i) {
      const Interval& iv = box.interval(support[i]);
      point[support[i] - 1] = iv.lo + iv.width() * Rational(ticks[i], resolution);
    }
    const Rational val = p.eval(point);
    if (first || val < out.approx_min) {
      out.approx_min = val;
      out.argmin = point;
      first = false;
    }
    int axis = m - 1;
    while (axis >= 0 && ++ticks[axis] > resolution) ticks[axis--] = 0;
    if (axis < 0) break;
  }

  Rational lipschitz(0);
  Rational half_width(0);
  for (int v : support) {
    const Interval& iv = box.interval(v);
    if (iv.lo == iv.hi) continue;
    lipschitz += detail::partial_abs_bound(p, box, v);
    half_width = std::max(half_width, iv.width() / (2 * resolution));
  }
  out.certified_lower = out.approx_min - lipschitz * half_width;
  return out;
}

// Strict positivity above `margin`, by Bernstein depth escalation when the
// dense tensor is affordable and grid bounds otherwise. Disproof means a
// sampled point with value <= margin was found; inconclusive means the
// escalation cap was reached without either outcome.
inline PositivityReport certify_positive(const Polynomial& p, const Box& box,
                                         const Rational& margin,
                                         const CertifyOptions& options = {}) {
  if (margin < 0) throw Error("certify_positive: negative margin");
  PositivityReport report;
  const bool small = bernstein_tensor_size(p) <= options.tensor_cap;
  if (small) {
    report.method = BoundMethod::bernstein;
    bool first = true;
    for (int depth = 0; depth <= options.depth_cap; ++depth) {
      const BernsteinBound bb = bernstein_lower(p, box, depth);
      if (first || bb.bound > report.lower_bound) report.lower_bound = bb.bound;
      if (first || bb.witness_value < report.witness_value) {
        report.witness_point = bb.witness;
        report.witness_value = bb.witness_value;
      }
      first = false;
      report.subdivision_depth = depth;
      if (report.witness_value <= margin) {
        report.verdict = Verdict::disproved;
        return report;
      }
      if (bb.bound > margin) {
        report.verdict = Verdict::positive;
        const int last = std::min(depth + options.polish_depths, options.depth_cap);
        for (int extra = depth + 1; extra <= last; ++extra) {
          const Rational refined = bernstein_lower_bound(p, box, extra);
          if (refined > report.lower_bound) {
            report.lower_bound = refined;
            report.subdivision_depth = extra;
          }
        }
        return report;
      }
    }
    report.verdict = Verdict::inconclusive;
    return report;
  }
  report.method = BoundMethod::grid_lipschitz;
  bool first = true;
  const size_t active = p.support_vars().size();
  for (int res = 4; res <= options.grid_resolution_cap; res *= 2) {
    if (!first) {
      Integer evals = 1;
      for (size_t i = 0; i < active; ++i) evals *= res + 1;
      if (evals > detail::kGridEvalBudget) break;
    }
    const GridMin gm = grid_min(p, box, res);
    if (first || gm.certified_lower > report.lower_bound) {
      report.lower_bound = gm.certified_lower;
    }
    if (first || gm.approx_min < report.witness_value) {
      report.witness_point = gm.argmin;
      report.witness_value = gm.approx_min;
    }
    first = false;
    report.subdivision_depth = res;
    if (report.witness_value <= margin) {
      report.verdict = Verdict::disproved;
      return report;
    }
    if (gm.certified_lower > margin) {
      report.verdict = Verdict::positive;
      return report;
    }
  }
  report.verdict = Verdict::inconclusive;
  return report;
}

// Positivity of a sum without expanding it into one dense tensor: the sum
// of per-summand certified lower bounds already bounds the sum from below.
// Falls back to joint certification of the expanded sum when the cheap
// route fails.
inline PositivityReport certify_positive_sum(const std::vector<Polynomial>& summands,
                                             const Box& box, const Rational& margin,
                                             const CertifyOptions& options = {}) {
  Polynomial total(box.nvars());
  for (const auto& s : summands) total += s;
  bool blockwise_ok = summands.size() > 1;
  for (const auto& s : summands) {
    if (bernstein_tensor_size(s) > options.tensor_cap) blockwise_ok = false;
  }
  // With an affordable joint fallback available, deep blockwise escalation
  // only delays it; without one, the blockwise route is the only route.
  int blockwise_cap = options.depth_cap;
  if (bernstein_tensor_size(total) <= options.tensor_cap) {
    blockwise_cap = std::min(blockwise_cap, 4);
  }
  if (blockwise_ok) {
    for (int depth = 0; depth <= blockwise_cap; ++depth) {
      Rational sum_bound(0);
      int used_depth = 0;
      for (const auto& s : summands) {
        const BernsteinBound bb = bernstein_lower(s, box, depth);
        sum_bound += bb.bound;
        used_depth = depth;
      }
      if (sum_bound > margin) {
        PositivityReport report;
        report.verdict = Verdict::positive;
        report.lower_bound = sum_bound;
        report.method = BoundMethod::bernstein;
        report.subdivision_depth = used_depth;
        const int last = std::min(depth + options.polish_depths, blockwise_cap);
        for (int extra = depth + 1; extra <= last; ++extra) {
          Rational refined(0);
          for (const auto& s : summands) {
            refined += bernstein_lower_bound(s, box, extra);
          }
          if (refined > report.lower_bound) {
            report.lower_bound = refined;
            report.subdivision_depth = extra;
          }
        }
        std::vector<Rational> mid(box.nvars());
        for (int v = 1; v <= box.nvars(); ++v) mid[v - 1] = box.interval(v).midpoint();
        report.witness_point = mid;
        report.witness_value = total.eval(mid);
        return report;
      }
    }
  }
  return certify_positive(total, box, margin, options);
}

}  // namespace sparsecert
