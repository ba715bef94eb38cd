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

#include <Eigen/Dense>
#include <cmath>
#include <map>
#include <optional>
#include <vector>

#include "sparsecert/positivity.hpp"
#include "sparsecert/sparsity.hpp"

namespace sparsecert {

struct SplitConfig {
  // Certified lower bound for the sum on the box; 0 means compute one.
  Rational epsilon = Rational(0);
  std::vector<int> approx_degree_schedule = {0, 1, 2, 3, 4, 6, 8};
  int envelope_grid_resolution = 8;
  int approx_check_resolution = 16;
  CertifyOptions certify;
};

struct Transfer {
  int source_block = 0;  // summand the transfer was taken out of
  int target_block = 0;  // block whose remainder absorbed it
  Polynomial p;
};

struct SplitResult {
  std::vector<Polynomial> h;
  std::vector<Transfer> transfers;
  std::vector<PositivityReport> margins;
};

// Envelope values over a grid in the shared variables. Each point stores
// one coordinate per entry of `overlap_vars`, in that order.
struct EnvelopeSamples {
  std::vector<int> overlap_vars;
  std::vector<std::vector<Rational>> points;
  std::vector<Rational> values;
};

namespace detail {

// All tuples picking one node per axis.
inline void tensor_product(const std::vector<std::vector<Rational>>& axes,
                           std::vector<std::vector<Rational>>& out) {
  out.assign(1, {});
  for (const auto& nodes : axes) {
    std::vector<std::vector<Rational>> next;
    next.reserve(out.size() * nodes.size());
    for (const auto& prefix : out) {
      for (const auto& v : nodes) {
        auto tuple = prefix;
        tuple.push_back(v);
        next.push_back(std::move(tuple));
      }
    }
    out = std::move(next);
  }
}

inline EnvelopeSamples envelope_on_nodes(
    const Polynomial& f1, const std::vector<int>& overlap, const Box& box,
    const Rational& eps, int inner_resolution,
    const std::vector<std::vector<Rational>>& nodes_per_axis) {
  EnvelopeSamples samples;
  samples.overlap_vars = overlap;
  std::vector<std::vector<Rational>> grid;
  tensor_product(nodes_per_axis, grid);
  const Rational half_eps = eps / 2;
  for (const auto& y : grid) {
    std::map<int, Rational> pin;
    for (size_t i = 0; i < overlap.size(); ++i) pin[overlap[i]] = y[i];
    const Polynomial slice = f1.substitute(pin);
    const GridMin gm = grid_min(slice, box, inner_resolution);
    samples.points.push_back(y);
    samples.values.push_back(gm.approx_min - half_eps);
  }
  return samples;
}

inline std::vector<Rational> uniform_nodes(const Interval& iv, int resolution) {
  std::vector<Rational> nodes;
  if (iv.lo == iv.hi) {
    nodes.push_back(iv.lo);
    return nodes;
  }
  for (int t = 0; t <= resolution; ++t) {
    nodes.push_back(iv.lo + iv.width() * Rational(t, resolution));
  }
  return nodes;
}

inline std::vector<Rational> chebyshev_nodes(const Interval& iv, int count) {
  std::vector<Rational> nodes;
  if (iv.lo == iv.hi || count <= 1) {
    nodes.push_back(iv.midpoint());
    return nodes;
  }
  const Rational mid = iv.midpoint();
  const Rational halfw = iv.width() / 2;
  for (int i = 0; i < count; ++i) {
    const double c = std::cos(M_PI * (2.0 * i + 1.0) / (2.0 * count));
    nodes.push_back(mid + halfw * round_to_rational(c, 1e-12, Integer(1) << 30));
  }
  return nodes;
}

// Multi-indices over m axes with per-axis cap and total degree cap.
inline void degree_multi_indices(const std::vector<int>& caps, int total_cap,
                                 std::vector<std::vector<int>>& out) {
  out.assign(1, {});
  for (int cap : caps) {
    std::vector<std::vector<int>> next;
    for (const auto& prefix : out) {
      int used = 0;
      for (int e : prefix) used += e;
      for (int e = 0; e <= cap && used + e <= total_cap; ++e) {
        auto tuple = prefix;
        tuple.push_back(e);
        next.push_back(std::move(tuple));
      }
    }
    out = std::move(next);
  }
}

}  // namespace detail

// Sampled lower envelope of f1 over the shared variables: at each grid
// point y, (grid minimum of f1 with the shared variables pinned to y)
// minus eps/2. With no unshared variables the inner minimum is just the
// pinned value.
inline EnvelopeSamples lower_envelope(const Polynomial& f1,
                                      const BlockIndexSet& I1,
                                      const std::vector<int>& overlap, const Box& box,
                                      const Rational& eps, int resolution) {
  if (eps <= 0) throw Error("lower_envelope: eps must be positive");
  for (int v : f1.support_vars()) {
    if (!I1.contains(v)) {
      throw Error("lower_envelope: f1 leaves its declared block");
    }
  }
  std::vector<std::vector<Rational>> nodes;
  for (int v : overlap) {
    nodes.push_back(detail::uniform_nodes(box.interval(v), resolution));
  }
  return detail::envelope_on_nodes(f1, overlap, box, eps, resolution, nodes);
}

// Best fit seen during a schedule that missed the deviation gate. The
// signed extremes allow recentring; any use of the fit must re-certify
// positivity exactly, the gate is not a soundness boundary.
struct ApproxFallback {
  std::optional<Polynomial> p;
  Rational deviation;
  Rational overshoot;   // max of fit minus sample over the gate grid
  Rational undershoot;  // max of sample minus fit over the gate grid
};

// Least-squares polynomial fit to envelope samples over the shared
// variables, one degree at a time from `schedule`, accepted when the exact
// deviation at every check sample is at most tol. The fit runs in floating
// point over a Chebyshev product basis; coefficients are rationalized
// before the exact acceptance check, so the returned polynomial is exact
// data with a verified sample deviation.
inline Polynomial approx_poly(const EnvelopeSamples& samples,
                              const std::vector<int>& overlap, const Box& box,
                              const Rational& tol, const std::vector<int>& schedule,
                              const EnvelopeSamples* check = nullptr,
                              Rational* achieved = nullptr,
                              ApproxFallback* fallback = nullptr) {
  if (tol <= 0) throw Error("approx_poly: tol must be positive");
  if (schedule.empty()) throw Error("approx_poly: empty degree schedule");
  if (samples.points.empty()) throw Error("approx_poly: no samples");
  const EnvelopeSamples& gate = check ? *check : samples;
  const int nvars = box.nvars();

  // Axes with real extent; variables pinned to a point contribute nothing.
  std::vector<int> active;
  std::vector<int> active_pos;
  for (size_t i = 0; i < overlap.size(); ++i) {
    const Interval& iv = box.interval(overlap[i]);
    if (iv.lo != iv.hi) {
      active.push_back(overlap[i]);
      active_pos.push_back(static_cast<int>(i));
    }
  }
  const int m = static_cast<int>(active.size());

  // Chebyshev basis in each active variable, exact: u = (2X - lo - hi)/w.
  int max_deg = 0;
  for (int d : schedule) max_deg = std::max(max_deg, d);
  std::vector<std::vector<Polynomial>> cheb(m);
  for (int i = 0; i < m; ++i) {
    const Interval& iv = box.interval(active[i]);
    const Polynomial x = Polynomial::variable(nvars, active[i]);
    const Polynomial u =
        (x * Rational(2) - Polynomial::constant(nvars, iv.lo + iv.hi)) *
        (Rational(1) / iv.width());
    cheb[i].push_back(Polynomial::constant(nvars, Rational(1)));
    if (max_deg >= 1) cheb[i].push_back(u);
    for (int k = 2; k <= max_deg; ++k) {
      cheb[i].push_back(u * cheb[i][k - 1] * Rational(2) - cheb[i][k - 2]);
    }
  }

  Rational best_dev;
  bool have_best = false;
  for (int deg : schedule) {
    std::vector<std::vector<int>> alphas;
    detail::degree_multi_indices(std::vector<int>(m, deg), deg, alphas);
    const int cols = static_cast<int>(alphas.size());
    const int rows = static_cast<int>(samples.points.size());
    if (rows < cols) continue;
    // Numeric Chebyshev values per sample via the double recurrence.
    Eigen::MatrixXd A(rows, cols);
    Eigen::VectorXd b(rows);
    for (int rIdx = 0; rIdx < rows; ++rIdx) {
      std::vector<std::vector<double>> tvals(m);
      for (int i = 0; i < m; ++i) {
        const Interval& iv = box.interval(active[i]);
        const double x = to_double(samples.points[rIdx][active_pos[i]]);
        const double u =
            (2.0 * x - to_double(iv.lo + iv.hi)) / to_double(iv.width());
        tvals[i].resize(max_deg + 1);
        tvals[i][0] = 1.0;
        if (max_deg >= 1) tvals[i][1] = u;
        for (int k = 2; k <= max_deg; ++k) {
          tvals[i][k] = 2.0 * u * tvals[i][k - 1] - tvals[i][k - 2];
        }
      }
      for (int cIdx = 0; cIdx < cols; ++cIdx) {
        double prod = 1.0;
        for (int i = 0; i < m; ++i) prod *= tvals[i][alphas[cIdx][i]];
        A(rIdx, cIdx) = prod;
      }
      b(rIdx) = to_double(samples.values[rIdx]);
    }
    const Eigen::VectorXd sol = A.colPivHouseholderQr().solve(b);
    // Exact polynomial from rationalized coefficients.
    Polynomial p(nvars);
    for (int cIdx = 0; cIdx < cols; ++cIdx) {
      const Rational coef = round_to_rational(sol(cIdx), 1e-9, Integer(1) << 40);
      if (coef == 0) continue;
      Polynomial basis = Polynomial::constant(nvars, Rational(1));
      for (int i = 0; i < m; ++i) {
        if (alphas[cIdx][i] > 0) basis *= cheb[i][alphas[cIdx][i]];
      }
      p += basis * coef;
    }
    // Exact signed deviations on the gate grid.
    Rational dev_up(0);
    Rational dev_dn(0);
    for (size_t s = 0; s < gate.points.size(); ++s) {
      std::map<int, Rational> pin;
      for (size_t i = 0; i < overlap.size(); ++i) {
        pin[overlap[i]] = gate.points[s][i];
      }
      const Polynomial val = p.substitute(pin);
      const Rational diff = Rational(val.constant_value() - gate.values[s]);
      if (diff > dev_up) dev_up = diff;
      if (diff < 0 && -diff > dev_dn) dev_dn = Rational(-diff);
    }
    const Rational dev = std::max(dev_up, dev_dn);
    if (!have_best || dev < best_dev) {
      best_dev = dev;
      have_best = true;
      if (fallback) {
        fallback->p = p;
        fallback->deviation = dev;
        fallback->overshoot = dev_up;
        fallback->undershoot = dev_dn;
      }
    }
    if (dev <= tol) {
      if (achieved) *achieved = dev;
      return p;
    }
  }
  throw CertificationFailure(
      "approx_poly: degree schedule exhausted; best sample deviation " +
      (have_best ? to_fraction_string(best_dev) : std::string("n/a")) +
      " exceeds tolerance " + to_fraction_string(tol));
}

namespace detail {

struct PeelOutcome {
  Polynomial p;
  Polynomial h2;
  PositivityReport h2_report;
};

// One peel step: find a transfer p in the shared variables such that
// f2 + p is certified positive. Escalates envelope resolution when the
// first attempt fails.
inline PeelOutcome peel_block(const Polynomial& f1, const Polynomial& f2,
                              const std::vector<int>& I1_vars,
                              const std::vector<int>& overlap, const Box& box,
                              const Rational& eps, const SplitConfig& config) {
  std::string failure = "split: certification failed";
  for (int attempt = 0; attempt < 3; ++attempt) {
    const int res = config.envelope_grid_resolution << attempt;
    const int check_res = config.approx_check_resolution << attempt;
    std::vector<std::vector<Rational>> fit_nodes;
    std::vector<std::vector<Rational>> check_nodes;
    for (int v : overlap) {
      fit_nodes.push_back(chebyshev_nodes(box.interval(v), res + 1));
      check_nodes.push_back(uniform_nodes(box.interval(v), check_res));
    }
    const EnvelopeSamples fit =
        envelope_on_nodes(f1, overlap, box, eps, res, fit_nodes);
    const EnvelopeSamples gate =
        envelope_on_nodes(f1, overlap, box, eps, res, check_nodes);
    Polynomial p(box.nvars());
    ApproxFallback fb;
    try {
      p = approx_poly(fit, overlap, box, eps / 4, config.approx_degree_schedule,
                      &gate, nullptr, &fb);
    } catch (const CertificationFailure& e) {
      failure = e.what();
      // Escalate resolution while attempts remain; on the last one fall
      // back to the best fit, recentred so its deviation is balanced. The
      // exact certification below decides whether the sloppier transfer
      // works.
      if (!fb.p || attempt < 2) continue;
      p = *fb.p - Polynomial::constant(
                      box.nvars(), Rational(fb.overshoot - fb.undershoot) / 2);
    }
    const Polynomial h2 = f2 + p;
    const PositivityReport rep = certify_positive(h2, box, Rational(0), config.certify);
    if (rep.verdict == Verdict::positive) {
      return PeelOutcome{p, h2, rep};
    }
    failure = "split: remainder positivity failed (best lower bound " +
              to_fraction_string(rep.lower_bound) + ")";
  }
  throw CertificationFailure(failure);
}

}  // namespace detail

struct SplitTwoResult {
  Polynomial h1;
  Polynomial h2;
  Polynomial p;
  PositivityReport h1_report;
  PositivityReport h2_report;
};

// Two-block split: h1 = f1 - p and h2 = f2 + p with p supported on the
// shared variables, both certified strictly positive on the box.
inline SplitTwoResult split_two(const Polynomial& f1, const Polynomial& f2,
                                const BlockIndexSet& I1, const BlockIndexSet& I2,
                                const Box& box, Rational eps,
                                const SplitConfig& config = {}) {
  if (!I1.contains_all(f1.support_vars())) {
    throw InputError("split_two: f1 leaves its block");
  }
  if (!I2.contains_all(f2.support_vars())) {
    throw InputError("split_two: f2 leaves its block");
  }
  if (eps <= 0) {
    const PositivityReport sum =
        certify_positive_sum({f1, f2}, box, Rational(0), config.certify);
    if (sum.verdict != Verdict::positive) {
      throw CertificationFailure("split_two: could not certify f1 + f2 > 0 "
                                 "(best lower bound " +
                                 to_fraction_string(sum.lower_bound) + ")");
    }
    eps = sum.lower_bound;
  }
  const std::vector<int> overlap = I1.intersect(I2);
  detail::PeelOutcome peel =
      detail::peel_block(f1, f2, I1.indices(), overlap, box, eps, config);
  SplitTwoResult out;
  out.p = peel.p;
  out.h1 = f1 - peel.p;
  out.h2 = peel.h2;
  out.h2_report = peel.h2_report;
  out.h1_report = certify_positive(out.h1, box, Rational(0), config.certify);
  if (out.h1_report.verdict != Verdict::positive) {
    throw CertificationFailure("split_two: h1 positivity failed (best lower bound " +
                               to_fraction_string(out.h1_report.lower_bound) + ")");
  }
  return out;
}

// Full split across an RIP-ordered pattern. Processes blocks last to
// first: each step peels block j off the running aggregate with the
// transfer absorbed into the summand named by the RIP witness, so the
// aggregate stays a sum of block-local summands.
inline SplitResult split_many(const std::vector<Polynomial>& summands,
                              const SparsityPattern& pattern, const Box& box,
                              const SplitConfig& config = {}) {
  const int r = pattern.size();
  if (static_cast<int>(summands.size()) != r) {
    throw InputError("split_many: summand count does not match block count");
  }
  for (int j = 1; j <= r; ++j) {
    if (!pattern.block(j).contains_all(summands[j - 1].support_vars())) {
      throw InputError("split_many: summand " + std::to_string(j) +
                       " leaves block " + pattern.block(j).to_string());
    }
  }
  if (config.envelope_grid_resolution < 2 || config.approx_check_resolution < 2) {
    throw InputError("split_many: resolutions must be at least 2");
  }
  const RipReport rip = check_rip(pattern);
  if (!rip.holds) {
    throw InputError("split_many: running intersection fails at block " +
                     std::to_string(rip.violating_index));
  }
  SplitResult result;
  if (r == 0) return result;

  Rational eps = config.epsilon;
  if (eps <= 0) {
    const PositivityReport sum =
        certify_positive_sum(summands, box, Rational(0), config.certify);
    if (sum.verdict != Verdict::positive) {
      throw CertificationFailure("split_many: could not certify the sum positive "
                                 "(best lower bound " +
                                 to_fraction_string(sum.lower_bound) + ")");
    }
    eps = sum.lower_bound;
  }

  std::vector<Polynomial> current = summands;
  result.h.assign(r, Polynomial(pattern.nvars()));
  result.margins.assign(r, PositivityReport{});
  for (int step = r; step >= 2; --step) {
    // Aggregate of everything before `step`, and its variable hull.
    Polynomial f_tilde(pattern.nvars());
    for (int j = 0; j < step - 1; ++j) f_tilde += current[j];
    BlockIndexSet hull = pattern.block(1);
    for (int j = 2; j < step; ++j) hull = hull.unite(pattern.block(j));
    const std::vector<int> overlap = hull.intersect(pattern.block(step));
    detail::PeelOutcome peel = detail::peel_block(
        f_tilde, current[step - 1], hull.indices(), overlap, box, eps, config);
    result.h[step - 1] = peel.h2;
    result.margins[step - 1] = peel.h2_report;
    const int absorb = overlap.empty() ? 1 : rip.witness[step];
    result.transfers.push_back(Transfer{absorb, step, peel.p});
    current[absorb - 1] -= peel.p;
    current[step - 1] = Polynomial(pattern.nvars());
    // Budget for the next level; prefer a certified bound when one is
    // available, it can only be larger than the worst-case cascade.
    Rational next_eps = eps / 4;
    std::vector<Polynomial> rest(current.begin(), current.begin() + (step - 1));
    const PositivityReport rest_rep =
        certify_positive_sum(rest, box, Rational(0), config.certify);
    if (rest_rep.verdict == Verdict::positive && rest_rep.lower_bound > next_eps) {
      next_eps = rest_rep.lower_bound;
    }
    eps = next_eps;
  }
  result.h[0] = current[0];
  result.margins[0] = certify_positive(current[0], box, Rational(0), config.certify);
  if (result.margins[0].verdict != Verdict::positive) {
    throw CertificationFailure("split_many: first remainder positivity failed "
                               "(best lower bound " +
                               to_fraction_string(result.margins[0].lower_bound) + ")");
  }
  std::reverse(result.transfers.begin(), result.transfers.end());
  return result;
}

}  // namespace sparsecert
