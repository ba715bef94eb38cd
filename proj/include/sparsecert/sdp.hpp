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
#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "sparsecert/errors.hpp"

namespace sparsecert {

enum class SdpStatus { optimal, infeasible, max_iterations };

inline std::string to_string(SdpStatus s) {
  switch (s) {
    case SdpStatus::optimal: return "optimal";
    case SdpStatus::infeasible: return "infeasible";
    default: return "max_iterations";
  }
}

struct SdpOptions {
  int max_iterations = 100;
  double tolerance = 1e-8;
  // Matrix blocks larger than this are refused outright.
  int basis_cap = 60;
};

// One nonzero of a symmetric constraint matrix. Off-diagonal positions must
// be listed for both (row, col) and (col, row).
struct SdpEntry {
  int block = 0;
  int row = 0;
  int col = 0;
  double value = 0.0;
};

struct SdpConstraint {
  std::vector<SdpEntry> entries;
  double rhs = 0.0;
};

namespace detail {

struct CoreSolution {
  SdpStatus status = SdpStatus::max_iterations;
  std::vector<Eigen::MatrixXd> X;
  std::vector<double> y;
  double objective = 0.0;
  int iterations = 0;
};

inline double inner(const std::vector<Eigen::MatrixXd>& a,
                    const std::vector<Eigen::MatrixXd>& b) {
  double total = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    total += (a[i].array() * b[i].array()).sum();
  }
  return total;
}

inline double constraint_value(const SdpConstraint& c,
                               const std::vector<Eigen::MatrixXd>& X) {
  double total = 0.0;
  for (const auto& e : c.entries) total += e.value * X[e.block](e.row, e.col);
  return total;
}

// Largest step keeping M + alpha * dM positive definite, capped at 1.
inline double max_step(const Eigen::LLT<Eigen::MatrixXd>& llt,
                       const Eigen::MatrixXd& dM) {
  const Eigen::MatrixXd y = llt.matrixL().solve(dM);
  const Eigen::MatrixXd z = llt.matrixL().solve(y.transpose());
  const Eigen::MatrixXd sym = 0.5 * (z + z.transpose());
  const double lambda_min =
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(sym, Eigen::EigenvaluesOnly)
          .eigenvalues()
          .minCoeff();
  if (lambda_min >= -1e-14) return 1.0;
  return std::min(1.0, -1.0 / lambda_min);
}

// Primal-dual interior point (HKM direction with a Mehrotra corrector) for
//   minimize <C, X>  subject to  <A_i, X> = b_i,  X block-diagonal PSD.
inline CoreSolution solve_core(const std::vector<int>& dims,
                               const std::vector<Eigen::MatrixXd>& C,
                               const std::vector<SdpConstraint>& constraints,
                               const SdpOptions& options) {
  const int blocks = static_cast<int>(dims.size());
  const int m = static_cast<int>(constraints.size());
  int total_dim = 0;
  for (int d : dims) {
    if (d < 1) throw InputError("sdp: empty block");
    if (d > options.basis_cap) {
      throw InputError("sdp: block size " + std::to_string(d) +
                       " exceeds cap " + std::to_string(options.basis_cap));
    }
    total_dim += d;
  }

  // Dense copies of the constraint matrices, one per block.
  std::vector<std::vector<Eigen::MatrixXd>> A(m);
  for (int i = 0; i < m; ++i) {
    A[i].reserve(blocks);
    for (int b = 0; b < blocks; ++b) A[i].push_back(Eigen::MatrixXd::Zero(dims[b], dims[b]));
    for (const auto& e : constraints[i].entries) {
      if (e.block < 0 || e.block >= blocks || e.row < 0 || e.col < 0 ||
          e.row >= dims[e.block] || e.col >= dims[e.block]) {
        throw InputError("sdp: constraint entry out of range");
      }
      A[i][e.block](e.row, e.col) += e.value;
    }
  }

  double scale = 10.0;
  for (const auto& c : constraints) scale = std::max(scale, 2.0 * std::abs(c.rhs));
  for (const auto& cb : C) {
    if (cb.size() > 0) scale = std::max(scale, 2.0 * cb.cwiseAbs().maxCoeff());
  }

  CoreSolution sol;
  std::vector<Eigen::MatrixXd> X, S;
  for (int b = 0; b < blocks; ++b) {
    X.push_back(scale * Eigen::MatrixXd::Identity(dims[b], dims[b]));
    S.push_back(scale * Eigen::MatrixXd::Identity(dims[b], dims[b]));
  }
  Eigen::VectorXd y = Eigen::VectorXd::Zero(m);

  double b_norm = 1.0, c_norm = 1.0;
  for (const auto& c : constraints) b_norm = std::max(b_norm, std::abs(c.rhs));
  for (const auto& cb : C) {
    if (cb.size() > 0) c_norm = std::max(c_norm, cb.cwiseAbs().maxCoeff());
  }

  for (int iter = 1; iter <= options.max_iterations; ++iter) {
    sol.iterations = iter;

    Eigen::VectorXd rp(m);
    for (int i = 0; i < m; ++i) {
      rp(i) = constraints[i].rhs - constraint_value(constraints[i], X);
    }
    std::vector<Eigen::MatrixXd> Rd(blocks);
    double rd_norm = 0.0;
    for (int b = 0; b < blocks; ++b) {
      Rd[b] = C[b] - S[b];
      for (int i = 0; i < m; ++i) Rd[b] -= y(i) * A[i][b];
      rd_norm = std::max(rd_norm, Rd[b].cwiseAbs().maxCoeff());
    }
    const double gap = inner(X, S);
    const double obj_p = inner(C, X);
    const double obj_d = [&] {
      double v = 0.0;
      for (int i = 0; i < m; ++i) v += constraints[i].rhs * y(i);
      return v;
    }();
    const double pinf = (m == 0 ? 0.0 : rp.cwiseAbs().maxCoeff()) / (1.0 + b_norm);
    const double dinf = rd_norm / (1.0 + c_norm);
    const double relgap =
        std::abs(gap) / (1.0 + std::abs(obj_p) + std::abs(obj_d));
    if (pinf < options.tolerance && dinf < options.tolerance &&
        relgap < options.tolerance) {
      sol.status = SdpStatus::optimal;
      break;
    }

    const double mu = gap / total_dim;

    std::vector<Eigen::LLT<Eigen::MatrixXd>> llt_x, llt_s;
    std::vector<Eigen::MatrixXd> Sinv(blocks);
    bool factor_ok = true;
    for (int b = 0; b < blocks; ++b) {
      llt_x.emplace_back(X[b]);
      llt_s.emplace_back(S[b]);
      if (llt_x.back().info() != Eigen::Success ||
          llt_s.back().info() != Eigen::Success) {
        factor_ok = false;
        break;
      }
      Sinv[b] = llt_s.back().solve(Eigen::MatrixXd::Identity(dims[b], dims[b]));
    }
    if (!factor_ok) break;  // numerical breakdown; report progress so far

    // Schur complement M_pq = sum_b tr(A_p X A_q S^-1).
    std::vector<std::vector<Eigen::MatrixXd>> W(m);
    for (int q = 0; q < m; ++q) {
      W[q].resize(blocks);
      for (int b = 0; b < blocks; ++b) W[q][b] = X[b] * A[q][b] * Sinv[b];
    }
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(m, m);
    for (int p = 0; p < m; ++p) {
      for (int q = 0; q < m; ++q) {
        double v = 0.0;
        for (const auto& e : constraints[p].entries) {
          v += e.value * W[q][e.block](e.row, e.col);
        }
        M(p, q) = v;
      }
    }
    M = 0.5 * (M + M.transpose());
    M.diagonal().array() += 1e-12;
    Eigen::LDLT<Eigen::MatrixXd> mldlt(M);

    const auto solve_direction = [&](double sigma_mu,
                                     const std::vector<Eigen::MatrixXd>* second_order,
                                     std::vector<Eigen::MatrixXd>& dX,
                                     Eigen::VectorXd& dy,
                                     std::vector<Eigen::MatrixXd>& dS) {
      // base = sigma*mu*S^-1 - X - X*Rd*S^-1 - (second order correction)
      std::vector<Eigen::MatrixXd> base(blocks);
      for (int b = 0; b < blocks; ++b) {
        base[b] = sigma_mu * Sinv[b] - X[b] - X[b] * Rd[b] * Sinv[b];
        if (second_order != nullptr) base[b] -= (*second_order)[b] * Sinv[b];
      }
      Eigen::VectorXd rhs(m);
      for (int p = 0; p < m; ++p) {
        double v = 0.0;
        for (const auto& e : constraints[p].entries) {
          v += e.value * base[e.block](e.row, e.col);
        }
        rhs(p) = rp(p) - v;
      }
      dy = mldlt.solve(rhs);
      dS.assign(blocks, Eigen::MatrixXd());
      dX.assign(blocks, Eigen::MatrixXd());
      for (int b = 0; b < blocks; ++b) {
        Eigen::MatrixXd ady = Eigen::MatrixXd::Zero(dims[b], dims[b]);
        for (int i = 0; i < m; ++i) ady += dy(i) * A[i][b];
        dS[b] = Rd[b] - ady;
        dX[b] = base[b] + X[b] * ady * Sinv[b];
        dX[b] = 0.5 * (dX[b] + dX[b].transpose()).eval();
      }
    };

    // Predictor.
    std::vector<Eigen::MatrixXd> dX_aff, dS_aff;
    Eigen::VectorXd dy_aff;
    solve_direction(0.0, nullptr, dX_aff, dy_aff, dS_aff);
    double ap_aff = 1.0, ad_aff = 1.0;
    for (int b = 0; b < blocks; ++b) {
      ap_aff = std::min(ap_aff, max_step(llt_x[b], dX_aff[b]));
      ad_aff = std::min(ad_aff, max_step(llt_s[b], dS_aff[b]));
    }
    double mu_aff = 0.0;
    for (int b = 0; b < blocks; ++b) {
      mu_aff += ((X[b] + ap_aff * dX_aff[b]).array() *
                 (S[b] + ad_aff * dS_aff[b]).array())
                    .sum();
    }
    mu_aff = std::max(mu_aff / total_dim, 0.0);
    const double sigma =
        std::clamp(mu > 0 ? std::pow(mu_aff / mu, 3.0) : 0.0, 0.0, 1.0);

    // Corrector with the Mehrotra second-order term dX_aff * dS_aff.
    std::vector<Eigen::MatrixXd> second(blocks);
    for (int b = 0; b < blocks; ++b) second[b] = dX_aff[b] * dS_aff[b];
    std::vector<Eigen::MatrixXd> dX, dS;
    Eigen::VectorXd dy;
    solve_direction(sigma * mu, &second, dX, dy, dS);

    double ap = 1.0, ad = 1.0;
    for (int b = 0; b < blocks; ++b) {
      ap = std::min(ap, max_step(llt_x[b], dX[b]));
      ad = std::min(ad, max_step(llt_s[b], dS[b]));
    }
    ap = std::min(1.0, 0.98 * ap);
    ad = std::min(1.0, 0.98 * ad);
    for (int b = 0; b < blocks; ++b) {
      X[b] += ap * dX[b];
      S[b] += ad * dS[b];
    }
    y += ad * dy;
  }

  sol.X = std::move(X);
  sol.y.assign(y.data(), y.data() + m);
  sol.objective = inner(C, sol.X);
  return sol;
}

}  // namespace detail

// Solution of the min-eigenvalue maximization over the affine section
// { X symmetric : <A_i, X> = b_i }. `matrix` solves the constraints with
// min-eig ~ t; status infeasible means the certified optimum t is negative,
// so no PSD matrix satisfies the constraints.
struct SdpResult {
  SdpStatus status = SdpStatus::max_iterations;
  Eigen::MatrixXd matrix;
  double t = 0.0;
  std::vector<double> dual;
  int iterations = 0;
};

namespace detail {

// Shared max-t driver over user blocks: X_user[b] = S_b + t*I with S_b PSD
// and t = tp - tm split into two 1x1 blocks. The tiny penalty on tm keeps
// the dual strictly feasible (the raw split has none).
inline SdpResult solve_max_t(const std::vector<int>& dims,
                             const std::vector<SdpConstraint>& constraints,
                             const SdpOptions& options,
                             std::vector<Eigen::MatrixXd>* blocks_out) {
  const int user_blocks = static_cast<int>(dims.size());
  std::vector<int> all_dims = dims;
  all_dims.push_back(1);
  all_dims.push_back(1);
  const int tp = user_blocks, tm = user_blocks + 1;

  std::vector<Eigen::MatrixXd> C;
  for (int d : dims) C.push_back(Eigen::MatrixXd::Zero(d, d));
  C.push_back(-Eigen::MatrixXd::Identity(1, 1));          // minimize -t
  C.push_back((1.0 + 1e-9) * Eigen::MatrixXd::Identity(1, 1));

  std::vector<SdpConstraint> lifted = constraints;
  for (auto& c : lifted) {
    double trace = 0.0;
    for (const auto& e : c.entries) {
      if (e.row == e.col) trace += e.value;
    }
    if (trace != 0.0) {
      c.entries.push_back({tp, 0, 0, trace});
      c.entries.push_back({tm, 0, 0, -trace});
    }
  }

  const detail::CoreSolution core =
      detail::solve_core(all_dims, C, lifted, options);
  SdpResult result;
  result.iterations = core.iterations;
  result.dual = core.y;
  result.t = core.X[tp](0, 0) - core.X[tm](0, 0);
  if (blocks_out != nullptr) {
    blocks_out->clear();
    for (int b = 0; b < user_blocks; ++b) {
      blocks_out->push_back(core.X[b] + result.t * Eigen::MatrixXd::Identity(
                                            dims[b], dims[b]));
    }
  }
  if (core.status != SdpStatus::optimal) {
    result.status = SdpStatus::max_iterations;
  } else if (result.t < -1e-7) {
    result.status = SdpStatus::infeasible;
  } else {
    result.status = SdpStatus::optimal;
  }
  return result;
}

}  // namespace detail

// Feasibility with margin for a single symmetric matrix variable: maximize
// the minimum eigenvalue of X subject to <A_i, X> = b_i. All entries use
// block index 0.
inline SdpResult solve_sdp(int dim, const std::vector<SdpConstraint>& constraints,
                           const SdpOptions& options = {}) {
  std::vector<Eigen::MatrixXd> blocks;
  SdpResult result =
      detail::solve_max_t({dim}, constraints, options, &blocks);
  result.matrix = blocks.empty() ? Eigen::MatrixXd::Zero(dim, dim) : blocks[0];
  return result;
}

}  // namespace sparsecert
