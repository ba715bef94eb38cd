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
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "sparsecert/cert_builder.hpp"
#include "sparsecert/sdp.hpp"

namespace sparsecert {

using RationalMatrix = std::vector<std::vector<Rational>>;

namespace detail {

inline std::optional<Rational> exact_sqrt(const Rational& q) {
  if (q < 0) return std::nullopt;
  const Integer num = boost::multiprecision::numerator(q);
  const Integer den = boost::multiprecision::denominator(q);
  const Integer rn = boost::multiprecision::sqrt(num);
  const Integer rd = boost::multiprecision::sqrt(den);
  if (rn * rn == num && rd * rd == den) return Rational(rn, rd);
  return std::nullopt;
}

struct RationalLdlt {
  bool psd = false;
  RationalMatrix L;          // unit lower triangular
  std::vector<Rational> D;   // nonnegative pivots when psd
};

// Exact LDL^T of a symmetric rational matrix with the PSD zero-pivot rule:
// a zero pivot is only admissible when its entire remaining column is zero.
inline RationalLdlt rational_ldlt(const RationalMatrix& G) {
  const int n = static_cast<int>(G.size());
  RationalLdlt out;
  out.L.assign(n, std::vector<Rational>(n, Rational(0)));
  out.D.assign(n, Rational(0));
  RationalMatrix W = G;
  for (int k = 0; k < n; ++k) {
    out.L[k][k] = 1;
    const Rational d = W[k][k];
    if (d < 0) return out;
    out.D[k] = d;
    if (d == 0) {
      for (int i = k + 1; i < n; ++i) {
        if (W[i][k] != 0) return out;
      }
      continue;
    }
    for (int i = k + 1; i < n; ++i) out.L[i][k] = W[i][k] / d;
    for (int i = k + 1; i < n; ++i) {
      for (int j = k + 1; j <= i; ++j) {
        W[i][j] -= out.L[i][k] * d * out.L[j][k];
        W[j][i] = W[i][j];
      }
    }
  }
  out.psd = true;
  return out;
}

}  // namespace detail

// A PSD-witnessed Gram representation: target ~ basis^T * gram * basis.
struct SOSDecomposition {
  int nvars = 0;
  std::vector<Monomial> basis;
  RationalMatrix gram;          // symmetric, basis x basis
  Polynomial residual{0};       // target - reconstruct()
  RationalMatrix psd_witness;   // lower triangular W, W W^T ~ gram - margin*I
  Rational margin;              // >= 0

  bool is_zero() const {
    for (const auto& row : gram) {
      for (const auto& v : row) {
        if (v != 0) return false;
      }
    }
    return true;
  }

  Polynomial reconstruct() const {
    Polynomial out(nvars);
    const int n = static_cast<int>(basis.size());
    for (int i = 0; i < n; ++i) {
      for (int j = i; j < n; ++j) {
        const Rational c = (i == j) ? gram[i][j] : 2 * gram[i][j];
        if (c != 0) {
          out += Polynomial::monomial_term(nvars, basis[i].times(basis[j]), c);
        }
      }
    }
    return out;
  }

  // Exact entrywise max-norm of W W^T - (gram - margin*I).
  Rational witness_error() const {
    const int n = static_cast<int>(basis.size());
    Rational worst(0);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j <= i; ++j) {
        Rational v(0);
        for (int k = 0; k < n; ++k) v += psd_witness[i][k] * psd_witness[j][k];
        Rational target = gram[i][j];
        if (i == j) target -= margin;
        const Rational gap = v >= target ? Rational(v - target) : Rational(target - v);
        if (gap > worst) worst = gap;
      }
    }
    return worst;
  }
};

struct BallCertificate {
  SOSDecomposition sigma;
  SOSDecomposition tau;
  Rational radius;
  Polynomial residual{0};  // f - sigma - tau*(R^2 - sum of squares)
};

struct MembershipTerm {
  int constraint_index = 0;  // 1-based within the block
  Polynomial g;
  SOSDecomposition sigma;
};

struct BlockMembership {
  int block = 0;
  Polynomial target;  // this block's share of f
  SOSDecomposition sigma0;
  std::vector<MembershipTerm> multipliers;
  Polynomial residual;  // target - sigma0 - sum sigma_i * g_i
};

struct ModuleMembership {
  Rational lambda;
  int k = 1;
  Polynomial objective;
  std::vector<BlockMembership> blocks;
};

namespace detail {

// All monomials over `vars` with total degree <= total_cap and per-variable
// degree <= var_cap[v] when present, in ascending grlex order.
inline std::vector<Monomial> monomials_up_to(int nvars, const std::vector<int>& vars,
                                             int total_cap,
                                             const std::map<int, int>& var_caps = {}) {
  std::vector<Monomial> out;
  std::vector<int> exps(vars.size(), 0);
  while (true) {
    int total = 0;
    for (int e : exps) total += e;
    if (total <= total_cap) {
      std::vector<Monomial::Factor> factors;
      for (size_t i = 0; i < vars.size(); ++i) {
        if (exps[i] > 0) factors.push_back({vars[i], exps[i]});
      }
      out.push_back(Monomial(std::move(factors)));
    }
    int axis = static_cast<int>(vars.size()) - 1;
    while (axis >= 0) {
      const auto cap_it = var_caps.find(vars[axis]);
      const int cap = std::min(total_cap,
                               cap_it == var_caps.end() ? total_cap : cap_it->second);
      if (++exps[axis] <= cap) break;
      exps[axis--] = 0;
    }
    if (axis < 0) break;
  }
  std::sort(out.begin(), out.end(), GrlexLess{});
  out.erase(std::unique(out.begin(), out.end()), out.end());
  (void)nvars;
  return out;
}

struct GramPair {
  int i = 0, j = 0;  // i <= j
};

struct CoeffRow {
  Rational rhs;
  std::vector<GramPair> sigma_pairs;
  // (k, l, c) with k <= l: the tau Gram entry (k, l) contributes
  // c * (k == l ? 1 : 2) * H_kl to this coefficient.
  std::vector<std::tuple<int, int, Rational>> tau_terms;
};

using RowMap = std::map<Monomial, CoeffRow, GrlexLess>;

inline RationalMatrix rationalize_matrix(const Eigen::MatrixXd& m) {
  const int n = static_cast<int>(m.rows());
  RationalMatrix out(n, std::vector<Rational>(n, Rational(0)));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      const Rational v = round_to_rational(0.5 * (m(i, j) + m(j, i)), 1e-9);
      out[i][j] = v;
      out[j][i] = v;
    }
  }
  return out;
}

// Exact residual of one coefficient row under the current Gram matrices.
inline Rational row_residual(const CoeffRow& row, const RationalMatrix& sigma,
                             const RationalMatrix& tau) {
  Rational value(0);
  for (const auto& p : row.sigma_pairs) {
    value += (p.i == p.j ? Rational(1) : Rational(2)) * sigma[p.i][p.j];
  }
  for (const auto& [k, l, c] : row.tau_terms) {
    value += c * (k == l ? Rational(1) : Rational(2)) * tau[k][l];
  }
  return row.rhs - value;
}

// Restores every coefficient equality exactly by spreading each row's
// residual across that row's sigma entries. Each sigma pair belongs to
// exactly one row, so the passes are independent.
inline void project_rows(const RowMap& rows, RationalMatrix& sigma,
                         const RationalMatrix& tau) {
  for (const auto& [mono, row] : rows) {
    if (row.sigma_pairs.empty()) continue;
    const Rational delta = row_residual(row, sigma, tau);
    if (delta == 0) continue;
    Rational weight(0);
    for (const auto& p : row.sigma_pairs) weight += (p.i == p.j ? 1 : 2);
    const Rational bump = delta / weight;
    for (const auto& p : row.sigma_pairs) {
      sigma[p.i][p.j] += bump;
      if (p.i != p.j) sigma[p.j][p.i] += bump;
    }
  }
}

// Margin selection plus the triangular witness. Tries a margin suggested by
// the solver's optimum and backs off to zero; the PSD check is exact.
inline bool finish_decomposition(SOSDecomposition& d, double t_hint) {
  const int n = static_cast<int>(d.basis.size());
  std::vector<Rational> candidates;
  if (t_hint > 1e-7) {
    Rational m = round_to_rational(0.5 * t_hint, 1e-12);
    for (int i = 0; i < 4 && m > 0; ++i) {
      candidates.push_back(m);
      m /= 4;
    }
  }
  candidates.push_back(Rational(0));
  // Boundary Grams can lose semidefiniteness to rounding noise; a diagonal
  // bump restores it and lands in the reported residual, not the identity.
  std::vector<std::pair<Rational, Rational>> attempts;  // margin, bump
  for (const Rational& m : candidates) attempts.emplace_back(m, Rational(0));
  for (int e = 12; e >= 8; e -= 2) {
    attempts.emplace_back(Rational(0), Rational(Integer(1), pow(Integer(10), e)));
  }
  for (const auto& [m, bump] : attempts) {
    RationalMatrix shifted = d.gram;
    for (int i = 0; i < n; ++i) shifted[i][i] += bump - m;
    const RationalLdlt f = rational_ldlt(shifted);
    if (!f.psd) continue;
    if (bump > 0) {
      for (int i = 0; i < n; ++i) d.gram[i][i] += bump;
    }
    d.margin = m;
    d.psd_witness.assign(n, std::vector<Rational>(n, Rational(0)));
    for (int k = 0; k < n; ++k) {
      Rational s;
      if (const auto exact = exact_sqrt(f.D[k])) {
        s = *exact;
      } else {
        s = rational_from_double(std::sqrt(to_double(f.D[k])));
      }
      for (int i = k; i < n; ++i) d.psd_witness[i][k] = f.L[i][k] * s;
    }
    return true;
  }
  return false;
}

inline std::vector<SdpConstraint> rows_to_constraints(const RowMap& rows,
                                                      int tau_block) {
  std::vector<SdpConstraint> constraints;
  for (const auto& [mono, row] : rows) {
    SdpConstraint c;
    c.rhs = to_double(row.rhs);
    for (const auto& p : row.sigma_pairs) {
      c.entries.push_back({0, p.i, p.j, 1.0});
      if (p.i != p.j) c.entries.push_back({0, p.j, p.i, 1.0});
    }
    for (const auto& [k, l, coeff] : row.tau_terms) {
      const double v = to_double(coeff);
      c.entries.push_back({tau_block, k, l, v});
      if (k != l) c.entries.push_back({tau_block, l, k, v});
    }
    constraints.push_back(std::move(c));
  }
  return constraints;
}

}  // namespace detail

// Exact rank-one SOS of a perfect square: w^2 = basis^T (v v^T) basis with v
// the coefficient vector of w. Entirely rational, including the witness.
inline SOSDecomposition rank1_sos(const Polynomial& w) {
  SOSDecomposition d;
  d.nvars = w.nvars();
  std::vector<Rational> v;
  for (const auto& [m, c] : w.terms()) {
    d.basis.push_back(m);
    v.push_back(c);
  }
  const int n = static_cast<int>(v.size());
  d.gram.assign(n, std::vector<Rational>(n, Rational(0)));
  d.psd_witness.assign(n, std::vector<Rational>(n, Rational(0)));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) d.gram[i][j] = v[i] * v[j];
    d.psd_witness[i][0] = v[i];
  }
  d.residual = Polynomial(w.nvars());
  d.margin = 0;
  return d;
}

inline SOSDecomposition constant_sos(int nvars, const Rational& c) {
  if (c < 0) throw Error("constant_sos: negative constant");
  SOSDecomposition d;
  d.nvars = nvars;
  d.basis = {Monomial()};
  d.gram = {{c}};
  d.margin = c;
  d.psd_witness = {{Rational(0)}};  // margin c leaves the zero matrix behind
  d.residual = Polynomial(nvars);
  return d;
}

inline SOSDecomposition zero_sos(int nvars) {
  SOSDecomposition d;
  d.nvars = nvars;
  d.residual = Polynomial(nvars);
  d.margin = 0;
  return d;
}

// Direct sum: reconstructs the sum of the two parts.
inline SOSDecomposition sos_sum(const SOSDecomposition& a, const SOSDecomposition& b) {
  if (a.basis.empty()) return b;
  if (b.basis.empty()) return a;
  if (a.nvars != b.nvars) throw Error("sos_sum: ambient dimension mismatch");
  SOSDecomposition d;
  d.nvars = a.nvars;
  d.basis = a.basis;
  d.basis.insert(d.basis.end(), b.basis.begin(), b.basis.end());
  const int na = static_cast<int>(a.basis.size());
  const int nb = static_cast<int>(b.basis.size());
  const int n = na + nb;
  d.gram.assign(n, std::vector<Rational>(n, Rational(0)));
  d.psd_witness.assign(n, std::vector<Rational>(n, Rational(0)));
  for (int i = 0; i < na; ++i) {
    for (int j = 0; j < na; ++j) {
      d.gram[i][j] = a.gram[i][j];
      d.psd_witness[i][j] = a.psd_witness[i][j];
    }
  }
  for (int i = 0; i < nb; ++i) {
    for (int j = 0; j < nb; ++j) {
      d.gram[na + i][na + j] = b.gram[i][j];
      d.psd_witness[na + i][na + j] = b.psd_witness[i][j];
    }
  }
  d.margin = std::min(a.margin, b.margin);
  // The block-diagonal witness certifies gram - min(margins)*I only when
  // both margins agree; rebuild it at the shared margin otherwise.
  if (a.margin != b.margin) {
    detail::finish_decomposition(d, to_double(d.margin));
  }
  d.residual = a.residual + b.residual;
  return d;
}

// Product: reconstructs the product of the two parts (Kronecker Gram).
inline SOSDecomposition sos_product(const SOSDecomposition& a,
                                    const SOSDecomposition& b) {
  if (a.nvars != b.nvars) throw Error("sos_product: ambient dimension mismatch");
  SOSDecomposition d;
  d.nvars = a.nvars;
  const int na = static_cast<int>(a.basis.size());
  const int nb = static_cast<int>(b.basis.size());
  for (int i = 0; i < na; ++i) {
    for (int k = 0; k < nb; ++k) d.basis.push_back(a.basis[i].times(b.basis[k]));
  }
  const int n = na * nb;
  d.gram.assign(n, std::vector<Rational>(n, Rational(0)));
  for (int i = 0; i < na; ++i) {
    for (int j = 0; j < na; ++j) {
      for (int k = 0; k < nb; ++k) {
        for (int l = 0; l < nb; ++l) {
          d.gram[i * nb + k][j * nb + l] = a.gram[i][j] * b.gram[k][l];
        }
      }
    }
  }
  d.residual = Polynomial(d.nvars);
  d.margin = 0;
  if (!detail::finish_decomposition(d, 0.0)) {
    throw Error("sos_product: product Gram failed the exact PSD check");
  }
  return d;
}

// Gram SOS decomposition of f over the Newton-filtered monomial basis of
// degree <= basis_degree. nullopt means f is provably not representable on
// that basis; numerical breakdown throws instead.
inline std::optional<SOSDecomposition> sos_decompose(const Polynomial& f,
                                                     int basis_degree,
                                                     const SdpOptions& sdp = {}) {
  if (basis_degree < 0) throw InputError("sos_decompose: negative basis degree");
  const int nvars = f.nvars();
  if (f.is_zero()) return zero_sos(nvars);
  if (f.is_constant()) {
    const Rational c = f.constant_value();
    if (c < 0) return std::nullopt;
    return constant_sos(nvars, c);
  }
  if (f.degree() % 2 != 0) return std::nullopt;  // odd degree is never SOS

  const std::vector<int> vars = f.support_vars();
  std::map<int, int> var_caps;
  for (int v : vars) var_caps[v] = (f.max_exponent(v) + 1) / 2;
  const int total_cap = std::min(basis_degree, f.degree() / 2);
  const std::vector<Monomial> basis =
      detail::monomials_up_to(nvars, vars, total_cap, var_caps);
  const int n = static_cast<int>(basis.size());

  detail::RowMap rows;
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      rows[basis[i].times(basis[j])].sigma_pairs.push_back({i, j});
    }
  }
  for (const auto& [m, c] : f.terms()) {
    const auto it = rows.find(m);
    if (it == rows.end()) return std::nullopt;  // monomial not coverable
    it->second.rhs = c;
  }

  const auto constraints = detail::rows_to_constraints(rows, -1);
  const SdpResult sol = solve_sdp(n, constraints, sdp);
  if (sol.status == SdpStatus::infeasible) return std::nullopt;
  if (sol.status != SdpStatus::optimal) {
    throw CertificationFailure("sos_decompose: SDP did not converge");
  }

  SOSDecomposition d;
  d.nvars = nvars;
  d.basis = basis;
  d.gram = detail::rationalize_matrix(sol.matrix);
  detail::project_rows(rows, d.gram, RationalMatrix{});
  if (!detail::finish_decomposition(d, sol.t)) {
    throw CertificationFailure(
        "sos_decompose: rationalized Gram failed the exact PSD check");
  }
  d.residual = f - d.reconstruct();
  if (d.residual.coefficient_max_norm() > Rational(1, 1000000)) {
    throw CertificationFailure("sos_decompose: residual above tolerance");
  }
  return d;
}

struct DegreePair {
  int sigma_basis = 1;
  int tau_basis = 0;
};

inline Polynomial ball_polynomial(int nvars, const Rational& radius,
                                  const std::vector<int>& vars) {
  Polynomial ball = Polynomial::constant(nvars, radius * radius);
  for (int v : vars) {
    ball -= Polynomial::variable(nvars, v) * Polynomial::variable(nvars, v);
  }
  return ball;
}

// Cassier ball certificate: f = sigma + tau * (R^2 - sum_{v in vars} X_v^2)
// with sigma, tau SOS, for f positive on the radius-R ball. Escalates
// through the degree schedule; default starts at half the degree of f.
inline BallCertificate cassier_certificate(const Polynomial& f, const Rational& R,
                                           std::vector<DegreePair> schedule = {},
                                           std::vector<int> vars = {},
                                           const SdpOptions& sdp = {}) {
  if (R <= 0) throw InputError("cassier: radius must be positive");
  const int nvars = f.nvars();
  if (vars.empty()) {
    vars.resize(nvars);
    for (int v = 0; v < nvars; ++v) vars[v] = v + 1;
  }
  for (int v : f.support_vars()) {
    if (std::find(vars.begin(), vars.end(), v) == vars.end()) {
      throw InputError("cassier: f uses a variable outside the ball variables");
    }
  }
  const Polynomial ball = ball_polynomial(nvars, R, vars);

  // Cheap sample gate: a ball point with f <= 0 rules the certificate out.
  {
    const int res = vars.size() <= 2 ? 8 : (vars.size() <= 3 ? 4 : 2);
    std::vector<int> ticks(vars.size(), 0);
    std::vector<Rational> point(nvars, Rational(0));
    while (true) {
      Rational norm2(0);
      for (size_t i = 0; i < vars.size(); ++i) {
        point[vars[i] - 1] = -R + 2 * R * Rational(ticks[i], res);
        norm2 += point[vars[i] - 1] * point[vars[i] - 1];
      }
      if (norm2 <= R * R && f.eval(point) <= 0) {
        throw CertificationFailure("cassier: f is not positive at a sampled ball point");
      }
      int axis = static_cast<int>(vars.size()) - 1;
      while (axis >= 0 && ++ticks[axis] > res) ticks[axis--] = 0;
      if (axis < 0) break;
    }
  }

  if (schedule.empty()) {
    const int h0 = std::max(1, (f.degree() + 1) / 2);
    for (int e = 0; e <= 2; ++e) {
      schedule.push_back({h0 + e, std::max(h0 + e - 1, 0)});
    }
  }

  std::string attempts;
  for (const DegreePair& deg : schedule) {
    const std::vector<Monomial> sbasis =
        detail::monomials_up_to(nvars, vars, deg.sigma_basis);
    const std::vector<Monomial> tbasis =
        detail::monomials_up_to(nvars, vars, deg.tau_basis);
    const int ns = static_cast<int>(sbasis.size());
    const int nt = static_cast<int>(tbasis.size());

    detail::RowMap rows;
    for (int i = 0; i < ns; ++i) {
      for (int j = i; j < ns; ++j) {
        rows[sbasis[i].times(sbasis[j])].sigma_pairs.push_back({i, j});
      }
    }
    for (int k = 0; k < nt; ++k) {
      for (int l = k; l < nt; ++l) {
        const Polynomial prod =
            Polynomial::monomial_term(nvars, tbasis[k].times(tbasis[l]), Rational(1)) *
            ball;
        for (const auto& [m, c] : prod.terms()) {
          rows[m].tau_terms.push_back({k, l, c});
        }
      }
    }
    bool coverable = true;
    for (const auto& [m, c] : f.terms()) {
      auto it = rows.find(m);
      if (it == rows.end()) {
        coverable = false;
        break;
      }
      it->second.rhs = c;
    }
    if (!coverable) {
      attempts += " (" + std::to_string(deg.sigma_basis) + "," +
                  std::to_string(deg.tau_basis) + "): uncoverable";
      continue;
    }

    std::vector<Eigen::MatrixXd> grams;
    const SdpResult sol = [&] {
      const auto constraints = detail::rows_to_constraints(rows, 1);
      SdpResult r = detail::solve_max_t({ns, nt}, constraints, sdp, &grams);
      return r;
    }();
    attempts += " (" + std::to_string(deg.sigma_basis) + "," +
                std::to_string(deg.tau_basis) + "): " + to_string(sol.status);
    if (sol.status != SdpStatus::optimal) continue;

    BallCertificate cert;
    cert.radius = R;
    cert.sigma.nvars = nvars;
    cert.sigma.basis = sbasis;
    cert.sigma.gram = detail::rationalize_matrix(grams[0]);
    cert.tau.nvars = nvars;
    cert.tau.basis = tbasis;
    cert.tau.gram = detail::rationalize_matrix(grams[1]);
    detail::project_rows(rows, cert.sigma.gram, cert.tau.gram);
    if (!detail::finish_decomposition(cert.sigma, sol.t) ||
        !detail::finish_decomposition(cert.tau, sol.t)) {
      attempts += " psd-repair-failed";
      continue;
    }
    cert.sigma.residual = Polynomial(nvars);
    cert.tau.residual = Polynomial(nvars);
    cert.residual = f - cert.sigma.reconstruct() - cert.tau.reconstruct() * ball;
    if (cert.residual.coefficient_max_norm() > Rational(1, 1000000)) {
      attempts += " residual-too-large";
      continue;
    }
    return cert;
  }
  throw CertificationFailure("cassier: degree schedule exhausted;" + attempts);
}

// Membership of the ball polynomial R^2 - sum X_v^2 in the block's quadratic
// module, used to rewrite tau*(R^2 - sum X_v^2) over the block constraints.
struct BallWitness {
  SOSDecomposition sigma0;
  std::vector<std::pair<int, SOSDecomposition>> multipliers;  // local index, sigma
};

struct PutinarOptions {
  std::vector<DegreePair> degrees;  // cassier schedule; empty means default
  int k_max = 50;
  std::map<int, BallWitness> ball_witnesses;  // per block, for the rewrite
  SdpOptions sdp;
};

namespace detail {

inline Polynomial witness_total(const BallWitness& w,
                                const std::vector<Polynomial>& gs, int nvars) {
  Polynomial total = w.sigma0.reconstruct();
  for (const auto& [idx, sigma] : w.multipliers) {
    if (idx < 1 || idx > static_cast<int>(gs.size())) {
      throw InputError("ball witness references a missing constraint");
    }
    total += sigma.reconstruct() * gs[idx - 1];
  }
  (void)nvars;
  return total;
}

}  // namespace detail

// Module-membership pipeline: certify on the enclosing box [-R, R]^n,
// express each positive remainder through a ball certificate on its block,
// and rewrite the ball polynomial through the block constraints so that
// every piece is an SOS multiple of a constraint (or constant 1).
inline ModuleMembership sparse_putinar(const ProblemSpec& problem,
                                       const SplitConfig& config,
                                       const std::vector<Rational>& radii,
                                       const PutinarOptions& options = {}) {
  const int r = problem.pattern.size();
  const int nvars = problem.pattern.nvars();
  if (static_cast<int>(radii.size()) != r) {
    throw InputError("sparse_putinar: need one radius per block");
  }
  Rational R(0);
  for (const Rational& rad : radii) {
    if (rad <= 0) throw InputError("sparse_putinar: radii must be positive");
    R = std::max(R, rad);
  }

  ModuleMembership membership;
  const Polynomial f = problem.objective();
  membership.objective = f;

  // A positive constant needs no machinery at all.
  if (f.is_constant() && f.constant_value() > 0) {
    membership.lambda = 1;
    membership.k = 1;
    for (int j = 1; j <= r; ++j) {
      BlockMembership bm;
      bm.block = j;
      bm.target = j == 1 ? f : Polynomial(nvars);
      bm.sigma0 = j == 1 ? constant_sos(nvars, f.constant_value()) : zero_sos(nvars);
      bm.residual = Polynomial(nvars);
      membership.blocks.push_back(std::move(bm));
    }
    return membership;
  }

  const Box region = Box::uniform(nvars, -R, R);
  const ProblemSpec rebuilt(problem.pattern, region, problem.summands,
                            problem.constraints);
  const Certificate cert = certify(rebuilt, config, options.k_max);
  membership.lambda = cert.lambda;
  membership.k = cert.k;

  for (int j = 1; j <= r; ++j) {
    BlockMembership bm;
    bm.block = j;
    const std::vector<int> block_vars = problem.pattern.block(j).indices();
    std::vector<Polynomial> gs;
    for (const auto& c : problem.constraints) {
      if (c.block == j) gs.push_back(c.poly);
    }
    const Polynomial ball = ball_polynomial(nvars, radii[j - 1], block_vars);

    std::map<int, SOSDecomposition> multipliers;
    const auto add_multiplier = [&](int idx, const SOSDecomposition& s) {
      auto it = multipliers.find(idx);
      if (it == multipliers.end()) {
        multipliers.emplace(idx, s);
      } else {
        it->second = sos_sum(it->second, s);
      }
    };

    // The certificate's own terms are squares times constraints already.
    const Polynomial one = Polynomial::constant(nvars, Rational(1));
    for (const auto& t : cert.multiplier_terms) {
      if (t.block != j) continue;
      add_multiplier(t.constraint_index,
                     rank1_sos((one - t.g * cert.lambda).pow(cert.k)));
    }

    const Polynomial h = cert.remainders[j - 1];
    const BallCertificate bc = cassier_certificate(h, radii[j - 1], options.degrees,
                                                   block_vars, options.sdp);
    bm.sigma0 = bc.sigma;

    if (!bc.tau.is_zero()) {
      int literal = 0;
      for (size_t i = 0; i < gs.size(); ++i) {
        if (gs[i] == ball) {
          literal = static_cast<int>(i) + 1;
          break;
        }
      }
      if (literal > 0) {
        add_multiplier(literal, bc.tau);
      } else {
        const auto wit = options.ball_witnesses.find(j);
        if (wit == options.ball_witnesses.end()) {
          throw InputError("sparse_putinar: ball-witness membership missing for block " +
                           std::to_string(j));
        }
        if (detail::witness_total(wit->second, gs, nvars) != ball) {
          throw InputError(
              "sparse_putinar: ball witness does not reproduce the ball polynomial");
        }
        if (!wit->second.sigma0.is_zero()) {
          bm.sigma0 = sos_sum(bm.sigma0, sos_product(bc.tau, wit->second.sigma0));
        }
        for (const auto& [idx, sig] : wit->second.multipliers) {
          if (!sig.is_zero()) add_multiplier(idx, sos_product(bc.tau, sig));
        }
      }
    }

    bm.target = h;
    for (const auto& t : cert.multiplier_terms) {
      if (t.block == j) bm.target += t.term;
    }
    bm.residual = bm.target - bm.sigma0.reconstruct();
    for (const auto& [idx, sig] : multipliers) {
      bm.multipliers.push_back({idx, gs[idx - 1], sig});
      bm.residual -= sig.reconstruct() * gs[idx - 1];
    }
    membership.blocks.push_back(std::move(bm));
  }
  return membership;
}

}  // namespace sparsecert
