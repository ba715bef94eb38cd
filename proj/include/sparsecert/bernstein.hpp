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
#include <queue>
#include <vector>

#include "sparsecert/block_set.hpp"
#include "sparsecert/polynomial.hpp"
#include "sparsecert/rational.hpp"

namespace sparsecert {

namespace detail {

// Dense coefficient tensor over the active axes of a polynomial. Axis i has
// degree degs[i], so the extent is degs[i]+1. Row-major with axis 0 slowest.
struct CoeffTensor {
  std::vector<int> degs;
  std::vector<size_t> strides;
  std::vector<Rational> data;

  void init(const std::vector<int>& degrees) {
    degs = degrees;
    strides.assign(degs.size(), 1);
    size_t total = 1;
    for (int i = static_cast<int>(degs.size()) - 1; i >= 0; --i) {
      strides[i] = total;
      total *= static_cast<size_t>(degs[i] + 1);
    }
    data.assign(total, Rational(0));
  }

  size_t size() const { return data.size(); }
};

inline std::vector<std::vector<Rational>> binomial_table(int n) {
  std::vector<std::vector<Rational>> c(n + 1);
  for (int i = 0; i <= n; ++i) {
    c[i].assign(i + 1, Rational(1));
    for (int j = 1; j < i; ++j) c[i][j] = c[i - 1][j - 1] + c[i - 1][j];
  }
  return c;
}

// One subdivision cell: Bernstein coefficients plus its dyadic sub-box of
// the unit cube (kept only to place witness points).
struct BernsteinPatch {
  std::vector<Rational> coeffs;
  std::vector<Interval> cell;
  std::vector<int> split_depth;

  Rational min_coeff() const {
    Rational m = coeffs[0];
    for (const auto& c : coeffs) m = std::min(m, c);
    return m;
  }
};

// In-place per-axis transform of every 1-d line of the tensor.
template <typename LineFn>
void transform_axis(CoeffTensor& t, int axis, LineFn&& fn) {
  const int ext = t.degs[axis] + 1;
  const size_t stride = t.strides[axis];
  const size_t total = t.data.size();
  std::vector<Rational> line(ext);
  const size_t block = stride * static_cast<size_t>(ext);
  for (size_t base = 0; base < total; base += block) {
    for (size_t off = 0; off < stride; ++off) {
      for (int j = 0; j < ext; ++j) line[j] = t.data[base + off + j * stride];
      fn(line);
      for (int j = 0; j < ext; ++j) t.data[base + off + j * stride] = line[j];
    }
  }
}

}  // namespace detail

// Certified one-sided range bound from subdivided Bernstein coefficients.
struct BernsteinBound {
  Rational bound;
  std::vector<Rational> witness;
  Rational witness_value;
};

namespace detail {

// Split work cap, in coefficient operations. A capped run returns the
// frontier minimum, which is still a certified lower bound; only the
// sharpness of near-flat high-degree instances is affected.
constexpr long long kBernsteinWorkBudget = 500000;

// Best-first subdivision. Equivalent to enumerating the full uniform dyadic
// grid at `depth` splits per axis: a popped full-depth cell has the smallest
// coefficient minimum in the queue, and subdivision never lowers a cell's
// minimum, so its minimum equals the minimum over all full-depth cells.
inline BernsteinBound bernstein_lower_on_unit(const Polynomial& q,
                                              const std::vector<int>& axes_vars,
                                              int depth) {
  const int m = static_cast<int>(axes_vars.size());
  std::map<int, int> axis_of;
  std::vector<int> degs(m);
  for (int i = 0; i < m; ++i) {
    axis_of[axes_vars[i]] = i;
    degs[i] = q.max_exponent(axes_vars[i]);
  }
  CoeffTensor t;
  t.init(degs);
  for (const auto& [mono, c] : q.terms()) {
    size_t idx = 0;
    for (const auto& [v, e] : mono.factors()) idx += t.strides[axis_of.at(v)] * e;
    t.data[idx] = c;
  }
  int maxdeg = 0;
  for (int d : degs) maxdeg = std::max(maxdeg, d);
  const auto binom = binomial_table(maxdeg);
  // Power to Bernstein, separately along each axis:
  // b_j = sum_{a<=j} C(j,a)/C(d,a) * coeff_a.
  for (int axis = 0; axis < m; ++axis) {
    const int d = t.degs[axis];
    transform_axis(t, axis, [&](std::vector<Rational>& line) {
      std::vector<Rational> out(d + 1, Rational(0));
      for (int j = 0; j <= d; ++j) {
        for (int a = 0; a <= j; ++a) out[j] += binom[j][a] / binom[d][a] * line[a];
      }
      line = out;
    });
  }

  BernsteinPatch root;
  root.coeffs = t.data;
  root.cell.assign(m, Interval{Rational(0), Rational(1)});
  root.split_depth.assign(m, 0);

  struct QueueEntry {
    Rational key;
    size_t id;
  };
  struct KeyGreater {
    bool operator()(const QueueEntry& a, const QueueEntry& b) const {
      return a.key > b.key;
    }
  };
  std::vector<BernsteinPatch> pool;
  std::priority_queue<QueueEntry, std::vector<QueueEntry>, KeyGreater> queue;
  pool.push_back(std::move(root));
  queue.push({pool[0].min_coeff(), 0});

  const long long cell_cost =
      static_cast<long long>(t.data.size()) * (maxdeg + 1);
  const long long split_budget = std::max<long long>(
      8, kBernsteinWorkBudget / std::max<long long>(1, cell_cost));
  long long splits = 0;

  // The popped cell holds the queue-global minimum, so its coefficient
  // minimum bounds the polynomial over the whole unit cube. A corner
  // coefficient equals the polynomial value there, so the witness prefers
  // corners, where it is exact.
  auto finalize = [&](const BernsteinPatch& patch, const Rational& key) {
    BernsteinBound result;
    result.bound = key;
    const std::vector<size_t>& strides = t.strides;
    auto corner_axes = [&](size_t idx) {
      int score = 0;
      for (int i = 0; i < m; ++i) {
        const size_t bi = (idx / strides[i]) % static_cast<size_t>(degs[i] + 1);
        if (bi == 0 || bi == static_cast<size_t>(degs[i])) ++score;
      }
      return score;
    };
    size_t argmin = 0;
    int argmin_score = corner_axes(0);
    for (size_t i = 1; i < patch.coeffs.size(); ++i) {
      if (patch.coeffs[i] < patch.coeffs[argmin]) {
        argmin = i;
        argmin_score = corner_axes(i);
      } else if (patch.coeffs[i] == patch.coeffs[argmin]) {
        const int score = corner_axes(i);
        if (score > argmin_score) {
          argmin = i;
          argmin_score = score;
        }
      }
    }
    result.witness.assign(m, Rational(0));
    for (int i = 0; i < m; ++i) {
      const size_t bi = (argmin / strides[i]) % static_cast<size_t>(degs[i] + 1);
      const Rational frac = Rational(static_cast<long>(bi), degs[i]);
      result.witness[i] = patch.cell[i].lo + frac * patch.cell[i].width();
    }
    return result;
  };

  while (true) {
    const auto [key, id] = queue.top();
    queue.pop();
    BernsteinPatch patch = std::move(pool[id]);
    int axis = -1;
    for (int i = 0; i < m; ++i) {
      if (patch.split_depth[i] < depth && (axis < 0 || patch.split_depth[i] <
                                                           patch.split_depth[axis])) {
        axis = i;
      }
    }
    if (axis < 0 || splits >= split_budget) return finalize(patch, key);
    ++splits;
    // de Casteljau split at the cell midpoint along `axis`.
    const int d = t.degs[axis];
    CoeffTensor left_t;
    left_t.degs = t.degs;
    left_t.strides = t.strides;
    left_t.data = patch.coeffs;
    CoeffTensor right_t = left_t;
    transform_axis(left_t, axis, [&](std::vector<Rational>& line) {
      std::vector<Rational> tri = line;
      for (int k = 1; k <= d; ++k) {
        for (int j = 0; j <= d - k; ++j) tri[j] = (tri[j] + tri[j + 1]) / 2;
        line[k] = tri[0];
      }
    });
    transform_axis(right_t, axis, [&](std::vector<Rational>& line) {
      std::vector<Rational> tri = line;
      for (int k = 1; k <= d; ++k) {
        for (int j = 0; j <= d - k; ++j) tri[j] = (tri[j] + tri[j + 1]) / 2;
        line[d - k] = tri[d - k];
      }
    });
    const Rational mid = patch.cell[axis].midpoint();
    BernsteinPatch left;
    left.coeffs = std::move(left_t.data);
    left.cell = patch.cell;
    left.cell[axis].hi = mid;
    left.split_depth = patch.split_depth;
    left.split_depth[axis]++;
    BernsteinPatch right;
    right.coeffs = std::move(right_t.data);
    right.cell = patch.cell;
    right.cell[axis].lo = mid;
    right.split_depth = patch.split_depth;
    right.split_depth[axis]++;
    pool.push_back(std::move(left));
    queue.push({pool.back().min_coeff(), pool.size() - 1});
    pool.push_back(std::move(right));
    queue.push({pool.back().min_coeff(), pool.size() - 1});
  }
}

}  // namespace detail

// Product over support variables of (degree+1): the dense tensor size a
// Bernstein conversion of p would need.
inline Integer bernstein_tensor_size(const Polynomial& p) {
  Integer total = 1;
  for (int v : p.support_vars()) total *= p.max_exponent(v) + 1;
  return total;
}

// Certified lower bound on p over box: Bernstein coefficient minimum after
// uniform dyadic subdivision to `depth` splits per axis. Exact rational,
// always <= min over the box, nondecreasing in depth.
inline BernsteinBound bernstein_lower(const Polynomial& p, const Box& box, int depth) {
  if (depth < 0) throw Error("bernstein: negative depth");
  const auto support = p.support_vars();
  for (int v : support) {
    if (v > box.nvars()) throw Error("bernstein: box does not cover variable X" +
                                     std::to_string(v));
  }
  // Affine map onto the unit cube; point intervals are substituted away.
  Polynomial q = p;
  std::vector<int> axes;
  std::map<int, Rational> pinned;
  for (int v : support) {
    const Interval& iv = box.interval(v);
    if (iv.lo == iv.hi) {
      pinned[v] = iv.lo;
    } else {
      axes.push_back(v);
    }
  }
  if (!pinned.empty()) q = q.substitute(pinned);
  for (int v : axes) {
    const Interval& iv = box.interval(v);
    q = q.substitute_affine(v, iv.lo, iv.width());
  }

  BernsteinBound out;
  if (axes.empty() || q.is_constant()) {
    out.bound = q.constant_value();
    out.witness.assign(box.nvars(), Rational(0));
    for (int v = 1; v <= box.nvars(); ++v) out.witness[v - 1] = box.interval(v).midpoint();
    out.witness_value = out.bound;
    return out;
  }
  // Drop axes eliminated by cancellation during mapping.
  std::vector<int> live_axes;
  for (int v : axes) {
    if (q.max_exponent(v) > 0) live_axes.push_back(v);
  }
  BernsteinBound unit = detail::bernstein_lower_on_unit(q, live_axes, depth);
  out.bound = unit.bound;
  out.witness.assign(box.nvars(), Rational(0));
  for (int v = 1; v <= box.nvars(); ++v) out.witness[v - 1] = box.interval(v).midpoint();
  for (size_t i = 0; i < live_axes.size(); ++i) {
    const Interval& iv = box.interval(live_axes[i]);
    out.witness[live_axes[i] - 1] = iv.lo + unit.witness[i] * iv.width();
  }
  out.witness_value = p.eval(out.witness);
  return out;
}

inline BernsteinBound bernstein_upper(const Polynomial& p, const Box& box, int depth) {
  BernsteinBound neg = bernstein_lower(-p, box, depth);
  BernsteinBound out;
  out.bound = -neg.bound;
  out.witness = neg.witness;
  out.witness_value = -neg.witness_value;
  return out;
}

inline Rational bernstein_lower_bound(const Polynomial& p, const Box& box, int depth) {
  return bernstein_lower(p, box, depth).bound;
}

inline Rational bernstein_upper_bound(const Polynomial& p, const Box& box, int depth) {
  return bernstein_upper(p, box, depth).bound;
}

}  // namespace sparsecert
