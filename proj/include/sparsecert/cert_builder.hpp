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

#include <string>
#include <vector>

#include "sparsecert/box_split.hpp"
#include "sparsecert/positivity.hpp"
#include "sparsecert/sparsity.hpp"

namespace sparsecert {

struct BlockPolynomial {
  int block = 0;  // 1-based index into the pattern
  Polynomial poly;
};

// A sparse certification problem: block-tagged summands f_j, block-tagged
// constraints g_i, an RIP-ordered pattern and the box to certify on.
struct ProblemSpec {
  SparsityPattern pattern;
  Box region;
  std::vector<BlockPolynomial> summands;
  std::vector<BlockPolynomial> constraints;

  ProblemSpec(SparsityPattern pat, Box box, std::vector<BlockPolynomial> fs,
              std::vector<BlockPolynomial> gs)
      : pattern(std::move(pat)),
        region(std::move(box)),
        summands(std::move(fs)),
        constraints(std::move(gs)) {
    if (region.nvars() != pattern.nvars()) {
      throw InputError("problem: box dimension does not match the pattern");
    }
    if (!check_rip(pattern).holds) {
      throw InputError("problem: blocks violate the running intersection property");
    }
    for (const auto& s : summands) validate_entry(s, "summand");
    for (const auto& g : constraints) validate_entry(g, "constraint");
  }

  Polynomial objective() const {
    Polynomial f(pattern.nvars());
    for (const auto& s : summands) f += s.poly;
    return f;
  }

  // Summands aggregated per block.
  std::vector<Polynomial> block_summands() const {
    std::vector<Polynomial> out(pattern.size(), Polynomial(pattern.nvars()));
    for (const auto& s : summands) out[s.block - 1] += s.poly;
    return out;
  }

 private:
  void validate_entry(const BlockPolynomial& e, const char* kind) const {
    if (e.block < 1 || e.block > pattern.size()) {
      throw InputError(std::string("problem: ") + kind + " references block " +
                       std::to_string(e.block) + " out of range");
    }
    if (!pattern.block(e.block).contains_all(e.poly.support_vars())) {
      throw InputError(std::string("problem: ") + kind + " leaves block " +
                       pattern.block(e.block).to_string());
    }
  }
};

struct MultiplierTerm {
  int block = 0;             // j
  int constraint_index = 0;  // i, 1-based within the block
  Polynomial g;
  Polynomial term;  // (1 - lambda*g)^(2k) * g, expanded
};

// The box representation f = sum of multiplier terms + sum of positive
// block remainders.
struct Certificate {
  Rational lambda;
  int k = 1;
  std::vector<MultiplierTerm> multiplier_terms;
  std::vector<Polynomial> remainders;
  std::vector<PositivityReport> remainder_reports;
};

// lambda = min(1, 1/U) for a certified upper bound U on every constraint
// over the region, so lambda*g <= 1 holds certified. Nonpositive bounds
// cost nothing and give lambda = 1.
inline Rational choose_lambda(const std::vector<Polynomial>& constraints,
                              const Box& region, int depth_cap = 6) {
  Rational u(0);
  for (const auto& g : constraints) {
    Rational best = bernstein_upper_bound(g, region, 0);
    for (int depth = 1; depth <= depth_cap; ++depth) {
      const Rational next = bernstein_upper_bound(g, region, depth);
      if (next == best) break;  // stabilized; deeper only re-confirms
      best = next;
    }
    u = std::max(u, best);
  }
  if (u <= 1) return Rational(1);
  return 1 / u;
}

namespace detail {

inline Polynomial multiplier_term(const Polynomial& g, const Rational& lambda,
                                  int k) {
  const Polynomial one = Polynomial::constant(g.nvars(), Rational(1));
  return (one - g * lambda).pow(2 * k) * g;
}

}  // namespace detail

inline Polynomial build_fk(const Polynomial& f, const ProblemSpec& problem,
                           const Rational& lambda, int k) {
  if (k < 0) throw Error("build_fk: negative k");
  Polynomial fk = f;
  for (const auto& c : problem.constraints) {
    fk -= detail::multiplier_term(c.poly, lambda, k);
  }
  return fk;
}

struct FindKResult {
  int k = 0;
  Polynomial fk;
  PositivityReport report;
  std::vector<Rational> bound_trajectory;  // best certified bound per k tried
};

// Smallest k <= k_max whose f_k is certified positive on the region. The
// per-block residuals f_j minus the block's multiplier terms are bounded
// separately, which keeps the certification affordable when the joint
// polynomial is dense.
inline FindKResult find_k(const Polynomial& f, const ProblemSpec& problem,
                          const Rational& lambda, int k_max,
                          const CertifyOptions& options = {}) {
  if (lambda <= 0 || lambda > 1) throw InputError("find_k: lambda must be in (0,1]");
  if (k_max < 1) throw InputError("find_k: k_max must be at least 1");
  FindKResult result;
  const auto block_fs = problem.block_summands();
  for (int k = 1; k <= k_max; ++k) {
    std::vector<Polynomial> residuals = block_fs;
    for (const auto& c : problem.constraints) {
      residuals[c.block - 1] -= detail::multiplier_term(c.poly, lambda, k);
    }
    const PositivityReport rep =
        certify_positive_sum(residuals, problem.region, Rational(0), options);
    result.bound_trajectory.push_back(rep.lower_bound);
    if (rep.verdict == Verdict::positive) {
      result.k = k;
      result.report = rep;
      result.fk = Polynomial(problem.pattern.nvars());
      for (const auto& r : residuals) result.fk += r;
      return result;
    }
  }
  std::string msg = "find_k: no k up to " + std::to_string(k_max) +
                    " certified positive; bound trajectory:";
  for (const auto& b : result.bound_trajectory) msg += " " + to_fraction_string(b);
  throw CertificationFailure(msg);
}

// Full pipeline: pick lambda, find k, split the positive residual across
// blocks, assemble and re-verify the exact identity.
inline Certificate certify(const ProblemSpec& problem, const SplitConfig& config = {},
                           int k_max = 50) {
  const Polynomial f = problem.objective();
  std::vector<Polynomial> gs;
  for (const auto& c : problem.constraints) gs.push_back(c.poly);
  const Rational lambda = choose_lambda(gs, problem.region);

  Certificate cert;
  cert.lambda = lambda;

  // Residual summands, block-local by construction.
  FindKResult fk = find_k(f, problem, lambda, k_max, config.certify);
  cert.k = fk.k;
  std::vector<int> per_block_counter(problem.pattern.size(), 0);
  for (const auto& c : problem.constraints) {
    MultiplierTerm term;
    term.block = c.block;
    term.constraint_index = ++per_block_counter[c.block - 1];
    term.g = c.poly;
    term.term = detail::multiplier_term(c.poly, lambda, fk.k);
    cert.multiplier_terms.push_back(std::move(term));
  }

  std::vector<Polynomial> residuals = problem.block_summands();
  for (const auto& t : cert.multiplier_terms) {
    residuals[t.block - 1] -= t.term;
  }
  const std::vector<Polynomial> assigned =
      assign_summands(residuals, problem.pattern);

  SplitConfig split_config = config;
  if (split_config.epsilon <= 0) split_config.epsilon = fk.report.lower_bound;
  const SplitResult split =
      split_many(assigned, problem.pattern, problem.region, split_config);
  cert.remainders = split.h;
  cert.remainder_reports = split.margins;

  // The identity must close exactly before the certificate leaves here.
  Polynomial check(f.nvars());
  for (const auto& t : cert.multiplier_terms) check += t.term;
  for (const auto& h : cert.remainders) check += h;
  if (check != f) {
    throw Error("certify: internal identity mismatch");
  }
  return cert;
}

struct VerificationItem {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct VerificationReport {
  std::vector<VerificationItem> items;

  bool all_passed() const {
    for (const auto& item : items) {
      if (!item.passed) return false;
    }
    return true;
  }
};

// Re-derives every certificate claim from scratch: the exact identity,
// the lambda range, each multiplier expansion, block confinement, and the
// strict positivity of every remainder.
inline VerificationReport verify_certificate(const Certificate& cert,
                                             const ProblemSpec& problem,
                                             const CertifyOptions& options = {}) {
  VerificationReport report;
  const Polynomial f = problem.objective();

  Polynomial rhs(f.nvars());
  for (const auto& t : cert.multiplier_terms) rhs += t.term;
  for (const auto& h : cert.remainders) rhs += h;
  VerificationItem identity{"identity", rhs == f, ""};
  if (!identity.passed) {
    identity.detail = "difference " + (rhs - f).to_string();
  }
  report.items.push_back(std::move(identity));

  report.items.push_back(
      {"lambda_range", cert.lambda > 0 && cert.lambda <= 1,
       "lambda = " + to_fraction_string(cert.lambda)});

  bool expansions_ok = true;
  std::string expansion_detail;
  for (const auto& t : cert.multiplier_terms) {
    if (t.term != detail::multiplier_term(t.g, cert.lambda, cert.k)) {
      expansions_ok = false;
      expansion_detail = "block " + std::to_string(t.block) + " constraint " +
                         std::to_string(t.constraint_index);
      break;
    }
  }
  report.items.push_back({"multiplier_expansion", expansions_ok, expansion_detail});

  bool confined = true;
  std::string confinement_detail;
  for (const auto& t : cert.multiplier_terms) {
    if (t.block < 1 || t.block > problem.pattern.size() ||
        !problem.pattern.block(t.block).contains_all(t.term.support_vars()) ||
        !problem.pattern.block(t.block).contains_all(t.g.support_vars())) {
      confined = false;
      confinement_detail = "multiplier in block " + std::to_string(t.block);
      break;
    }
  }
  if (confined && cert.remainders.size() != static_cast<size_t>(problem.pattern.size())) {
    confined = false;
    confinement_detail = "remainder count mismatch";
  }
  if (confined) {
    for (size_t j = 0; j < cert.remainders.size(); ++j) {
      if (!problem.pattern.block(static_cast<int>(j) + 1)
               .contains_all(cert.remainders[j].support_vars())) {
        confined = false;
        confinement_detail = "remainder " + std::to_string(j + 1);
        break;
      }
    }
  }
  report.items.push_back({"block_confinement", confined, confinement_detail});

  bool positive = true;
  std::string positivity_detail;
  for (size_t j = 0; j < cert.remainders.size(); ++j) {
    const PositivityReport rep =
        certify_positive(cert.remainders[j], problem.region, Rational(0), options);
    if (rep.verdict != Verdict::positive) {
      positive = false;
      positivity_detail = "remainder " + std::to_string(j + 1) + " " +
                          to_string(rep.verdict) + ", best lower bound " +
                          to_fraction_string(rep.lower_bound);
      break;
    }
  }
  report.items.push_back({"remainder_positivity", positive, positivity_detail});
  return report;
}

}  // namespace sparsecert
