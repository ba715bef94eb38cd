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

#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "sparsecert/sos.hpp"
#include "test_util.hpp"

namespace {

using namespace sparsecert;

Polynomial X(int nvars, int var) { return Polynomial::variable(nvars, var); }

Polynomial C(int nvars, const Rational& value) {
   return Polynomial::constant(nvars, value);
}

const Rational kResidualTol(1, 1000000);   // 1e-6
const Rational kWitnessTol(1, 1000000000); // 1e-9

void check_decomposition(const SOSDecomposition& d) {
   CHECK(d.margin >= 0);
   CHECK(d.witness_error() <= kWitnessTol);
   // Symmetry of the Gram matrix.
   for (size_t i = 0; i < d.gram.size(); ++i) {
      for (size_t j = 0; j < i; ++j) {
         CHECK(d.gram[i][j] == d.gram[j][i]);
      }
   }
}

}  // namespace

TEST_CASE("solve_sdp pins a one-by-one matrix") {
   SdpConstraint c{{{0, 0, 0, 1.0}}, 2.0};
   const SdpResult r = solve_sdp(1, {c});
   REQUIRE(r.status == SdpStatus::optimal);
   CHECK(std::abs(r.matrix(0, 0) - 2.0) < 1e-6);
   CHECK(std::abs(r.t - 2.0) < 1e-6);
}

TEST_CASE("solve_sdp forces the zero matrix from a zero trace") {
   SdpConstraint c{{{0, 0, 0, 1.0}, {0, 1, 1, 1.0}}, 0.0};
   const SdpResult r = solve_sdp(2, {c});
   REQUIRE(r.status == SdpStatus::optimal);
   CHECK(r.matrix.cwiseAbs().maxCoeff() < 1e-6);
   CHECK(std::abs(r.t) < 1e-6);
}

TEST_CASE("solve_sdp recovers the unique Gram matrix of a perfect square") {
   SdpConstraint c1{{{0, 0, 0, 1.0}}, 1.0};
   SdpConstraint c2{{{0, 0, 1, 1.0}, {0, 1, 0, 1.0}}, 2.0};
   SdpConstraint c3{{{0, 1, 1, 1.0}}, 1.0};
   const SdpResult r = solve_sdp(2, {c1, c2, c3});
   REQUIRE(r.status == SdpStatus::optimal);
   CHECK(std::abs(r.matrix(0, 0) - 1.0) < 1e-6);
   CHECK(std::abs(r.matrix(0, 1) - 1.0) < 1e-6);
   CHECK(std::abs(r.matrix(1, 1) - 1.0) < 1e-6);
}

TEST_CASE("solve_sdp reports infeasibility with a negative optimum") {
   SdpConstraint c{{{0, 0, 0, 1.0}}, -1.0};
   const SdpResult r = solve_sdp(1, {c});
   CHECK(r.status == SdpStatus::infeasible);
   CHECK(r.t < -0.5);
}

TEST_CASE("solve_sdp refuses oversized blocks") {
   CHECK_THROWS_AS(solve_sdp(61, {}), InputError);
}

TEST_CASE("sos_decompose writes a binomial square as its rank-one Gram") {
   const Polynomial f = (X(1, 1) + C(1, Rational(1))).pow(2);
   const auto d = sos_decompose(f, 1);
   REQUIRE(d.has_value());
   REQUIRE(d->basis.size() == 2);
   CHECK(d->gram[0][0] == 1);
   CHECK(d->gram[0][1] == 1);
   CHECK(d->gram[1][0] == 1);
   CHECK(d->gram[1][1] == 1);
   CHECK(d->residual.is_zero());
   CHECK(d->reconstruct() == f);
   check_decomposition(*d);
}

TEST_CASE("sos_decompose keeps an interior Gram diagonal") {
   const Polynomial f = X(1, 1).pow(2) + C(1, Rational(1));
   const auto d = sos_decompose(f, 1);
   REQUIRE(d.has_value());
   CHECK(d->gram[0][0] == 1);
   CHECK(d->gram[1][1] == 1);
   CHECK(d->gram[0][1] == 0);
   CHECK(d->reconstruct() == f);
   CHECK(d->margin > 0);
   check_decomposition(*d);
}

TEST_CASE("sos_decompose rejects obvious non-squares") {
   CHECK_FALSE(sos_decompose(C(1, Rational(-1)), 1).has_value());
   CHECK_FALSE(sos_decompose(X(1, 1), 1).has_value());           // odd degree
   CHECK_FALSE(sos_decompose(X(1, 1).pow(2) - C(1, Rational(1)), 1).has_value());
   // X1*X2 alone: the only candidate square is (c*X1*X2-ish) with nothing
   // to cancel the pure squares, so the Gram diagonal is pinned to zero.
   CHECK_FALSE(sos_decompose(X(2, 1) * X(2, 2), 1).has_value());
}

TEST_CASE("sos_decompose handles zero, constants, and rank-deficient squares") {
   const auto zero = sos_decompose(Polynomial(2), 3);
   REQUIRE(zero.has_value());
   CHECK(zero->reconstruct().is_zero());

   const auto constant = sos_decompose(C(2, Rational(7, 4)), 0);
   REQUIRE(constant.has_value());
   CHECK(constant->reconstruct() == C(2, Rational(7, 4)));
   check_decomposition(*constant);

   // (X^2 - 1)^2 touches zero at +-1, so every Gram is singular.
   const Polynomial f = (X(1, 1).pow(2) - C(1, Rational(1))).pow(2);
   const auto d = sos_decompose(f, 2);
   REQUIRE(d.has_value());
   CHECK(d->residual.is_zero());
   CHECK(d->reconstruct() == f);
   check_decomposition(*d);
}

TEST_CASE("sos_decompose matches the exact univariate quadratic criterion") {
   // a*X^2 + b*X + c is SOS iff a >= 0, c >= 0, 4ac >= b^2.
   std::mt19937 rng(52001);
   for (int trial = 0; trial < 60; ++trial) {
      const int a = static_cast<int>(rng() % 9) - 4;
      const int b = static_cast<int>(rng() % 9) - 4;
      const int c = static_cast<int>(rng() % 9) - 4;
      const Polynomial f = C(1, Rational(a)) * X(1, 1).pow(2) +
                           C(1, Rational(b)) * X(1, 1) + C(1, Rational(c));
      if (f.is_zero()) continue;
      const bool sos = a >= 0 && c >= 0 && 4 * a * c >= b * b;
      const auto d = sos_decompose(f, 1);
      INFO("a=", a, " b=", b, " c=", c);
      CHECK(d.has_value() == sos);
      if (d.has_value()) {
         CHECK(d->reconstruct() + d->residual == f);
         CHECK(d->residual.coefficient_max_norm() <= kResidualTol);
         check_decomposition(*d);
      }
   }
}

TEST_CASE("sos_decompose recovers random sums of two squares") {
   std::mt19937 rng(52002);
   for (int trial = 0; trial < 12; ++trial) {
      const int nvars = 1 + static_cast<int>(rng() % 2);
      const Polynomial q1 = testutil::random_polynomial(rng, nvars, 2, 4);
      const Polynomial q2 = testutil::random_polynomial(rng, nvars, 2, 4);
      const Polynomial f = q1 * q1 + q2 * q2;
      if (f.is_zero()) continue;
      const auto d = sos_decompose(f, std::max(1, (f.degree() + 1) / 2));
      REQUIRE(d.has_value());
      CHECK(d->reconstruct() + d->residual == f);
      CHECK(d->residual.coefficient_max_norm() <= kResidualTol);
      check_decomposition(*d);
   }
}

TEST_CASE("rank1_sos is exact in every field") {
   std::mt19937 rng(52003);
   for (int trial = 0; trial < 20; ++trial) {
      const int nvars = 1 + static_cast<int>(rng() % 2);
      const Polynomial w = testutil::random_polynomial(rng, nvars, 3, 5);
      if (w.is_zero()) continue;
      const SOSDecomposition d = rank1_sos(w);
      CHECK(d.reconstruct() == w * w);
      CHECK(d.residual.is_zero());
      CHECK(d.margin == 0);
      CHECK(d.witness_error() == 0);
   }
}

TEST_CASE("sos_sum and sos_product compose reconstructions") {
   std::mt19937 rng(52004);
   for (int trial = 0; trial < 10; ++trial) {
      const Polynomial a = testutil::random_polynomial(rng, 2, 2, 3);
      const Polynomial b = testutil::random_polynomial(rng, 2, 2, 3);
      if (a.is_zero() || b.is_zero()) continue;
      const SOSDecomposition da = rank1_sos(a);
      const SOSDecomposition db = rank1_sos(b);
      const SOSDecomposition sum = sos_sum(da, db);
      CHECK(sum.reconstruct() == a * a + b * b);
      check_decomposition(sum);
      const SOSDecomposition prod = sos_product(da, db);
      CHECK(prod.reconstruct() == (a * a) * (b * b));
      check_decomposition(prod);
   }
}

TEST_CASE("cassier writes the guided ball identity") {
   const Polynomial f = C(1, Rational(2)) - X(1, 1).pow(2);
   const BallCertificate bc = cassier_certificate(f, Rational(1));
   CHECK(bc.residual.coefficient_max_norm() <= kResidualTol);
   check_decomposition(bc.sigma);
   check_decomposition(bc.tau);
   const Polynomial ball = ball_polynomial(1, Rational(1), {1});
   const Polynomial lhs = bc.sigma.reconstruct() + bc.tau.reconstruct() * ball;
   CHECK((f - lhs).coefficient_max_norm() <= kResidualTol);
}

TEST_CASE("cassier handles SOS inputs and constants") {
   const Polynomial f1 = X(1, 1).pow(2) + C(1, Rational(1));
   const BallCertificate b1 = cassier_certificate(f1, Rational(2));
   CHECK(b1.residual.coefficient_max_norm() <= kResidualTol);

   const Polynomial f2 = C(1, Rational(1));
   const BallCertificate b2 = cassier_certificate(f2, Rational(1));
   CHECK(b2.residual.coefficient_max_norm() <= kResidualTol);
   check_decomposition(b2.sigma);
   check_decomposition(b2.tau);
}

TEST_CASE("cassier covers a two-variable ball") {
   const Polynomial f = C(2, Rational(3)) - X(2, 1).pow(2) - X(2, 2).pow(2);
   const BallCertificate bc = cassier_certificate(f, Rational(1));
   CHECK(bc.residual.coefficient_max_norm() <= kResidualTol);
   const Polynomial ball = ball_polynomial(2, Rational(1), {1, 2});
   const Polynomial lhs = bc.sigma.reconstruct() + bc.tau.reconstruct() * ball;
   CHECK((f - lhs).coefficient_max_norm() <= kResidualTol);
}

TEST_CASE("cassier refuses a function that dips on the ball") {
   const Polynomial f = X(1, 1) - C(1, Rational(2));
   CHECK_THROWS_AS(cassier_certificate(f, Rational(1)), CertificationFailure);
}

TEST_CASE("cassier validates the radius and the variable set") {
   const Polynomial f = C(2, Rational(1));
   CHECK_THROWS_AS(cassier_certificate(f, Rational(0)), InputError);
   const Polynomial g = X(2, 2) * X(2, 2) + C(2, Rational(1));
   CHECK_THROWS_AS(cassier_certificate(g, Rational(1), {}, {1}), InputError);
}

TEST_CASE("sparse_putinar realizes the guided single-block membership") {
   SparsityPattern pattern(1, {BlockIndexSet({1})});
   Box box = Box::uniform(1, Rational(-1), Rational(1));
   const Polynomial f = X(1, 1) + C(1, Rational(2));
   const Polynomial g = C(1, Rational(1)) - X(1, 1).pow(2);
   ProblemSpec problem(pattern, box, {{1, f}}, {{1, g}});

   const ModuleMembership m = sparse_putinar(problem, SplitConfig{}, {Rational(1)});
   REQUIRE(m.blocks.size() == 1);
   const BlockMembership& bm = m.blocks[0];
   CHECK(bm.target == f);
   CHECK(bm.residual.coefficient_max_norm() <= kResidualTol);
   REQUIRE(bm.multipliers.size() == 1);
   CHECK(bm.multipliers[0].g == g);
   check_decomposition(bm.sigma0);
   check_decomposition(bm.multipliers[0].sigma);

   // Assembled identity: f = sigma0 + sigma_1 * g + residual, exactly.
   Polynomial rhs = bm.sigma0.reconstruct() + bm.residual;
   for (const auto& t : bm.multipliers) rhs += t.sigma.reconstruct() * t.g;
   CHECK(rhs == f);
}

TEST_CASE("sparse_putinar short-circuits positive constants") {
   SparsityPattern pattern(3, {BlockIndexSet({1, 2}), BlockIndexSet({2, 3})});
   Box box = Box::uniform(3, Rational(-1), Rational(1));
   const Polynomial g1 = ball_polynomial(3, Rational(1), {1, 2});
   const Polynomial g2 = ball_polynomial(3, Rational(1), {2, 3});
   ProblemSpec problem(pattern, box, {{1, C(3, Rational(1))}},
                       {{1, g1}, {2, g2}});
   const ModuleMembership m =
       sparse_putinar(problem, SplitConfig{}, {Rational(1), Rational(1)});
   REQUIRE(m.blocks.size() == 2);
   CHECK(m.blocks[0].sigma0.reconstruct() == C(3, Rational(1)));
   CHECK(m.blocks[0].multipliers.empty());
   CHECK(m.blocks[1].sigma0.reconstruct().is_zero());
   CHECK(m.blocks[1].multipliers.empty());
   CHECK(m.blocks[0].residual.is_zero());
   CHECK(m.blocks[1].residual.is_zero());
}

TEST_CASE("sparse_putinar assembles the two-block unit-ball membership") {
   SparsityPattern pattern(3, {BlockIndexSet({1, 2}), BlockIndexSet({2, 3})});
   Box box = Box::uniform(3, Rational(-1), Rational(1));
   const Polynomial f1 = X(3, 1).pow(2) + X(3, 2) + C(3, Rational(2));
   const Polynomial f2 = X(3, 3).pow(2) - X(3, 2);
   const Polynomial g1 = ball_polynomial(3, Rational(1), {1, 2});
   const Polynomial g2 = ball_polynomial(3, Rational(1), {2, 3});
   ProblemSpec problem(pattern, box, {{1, f1}, {2, f2}}, {{1, g1}, {2, g2}});

   const ModuleMembership m =
       sparse_putinar(problem, SplitConfig{}, {Rational(1), Rational(1)});
   REQUIRE(m.blocks.size() == 2);

   Polynomial total(3);
   for (const BlockMembership& bm : m.blocks) {
      CHECK(bm.residual.coefficient_max_norm() <= kResidualTol);
      check_decomposition(bm.sigma0);
      for (const auto& t : bm.multipliers) check_decomposition(t.sigma);
      Polynomial rhs = bm.sigma0.reconstruct() + bm.residual;
      for (const auto& t : bm.multipliers) rhs += t.sigma.reconstruct() * t.g;
      CHECK(rhs == bm.target);
      total += bm.target;
   }
   CHECK(total == problem.objective());

   // Feasible-sample soundness: the assembled right side tracks f and every
   // SOS factor is nonnegative (exactly, since the Grams are PSD-checked).
   std::mt19937 rng(52005);
   int used = 0;
   for (int s = 0; s < 200 && used < 40; ++s) {
      const auto x = testutil::random_point(rng, box);
      if (g1.eval(x) < 0 || g2.eval(x) < 0) continue;
      ++used;
      Rational rhs(0);
      for (const BlockMembership& bm : m.blocks) {
         const Rational s0 = bm.sigma0.reconstruct().eval(x);
         CHECK(s0 >= 0);
         rhs += s0;
         for (const auto& t : bm.multipliers) {
            const Rational sv = t.sigma.reconstruct().eval(x);
            CHECK(sv >= 0);
            rhs += sv * t.g.eval(x);
         }
      }
      const Rational gap = abs(rhs - problem.objective().eval(x));
      CHECK(gap <= Rational(1, 100000));
   }
   CHECK(used == 40);
}

TEST_CASE("sparse_putinar rewrites through a supplied ball witness") {
   // Block constraint 1 - X^4; the unit ball polynomial 1 - X^2 is not a
   // constraint, but 1 - X^2 = (1/2)(X^2-1)^2 + (1/2)(1 - X^4) witnesses it.
   SparsityPattern pattern(1, {BlockIndexSet({1})});
   Box box = Box::uniform(1, Rational(-1), Rational(1));
   const Polynomial f = X(1, 1) + C(1, Rational(2));
   const Polynomial g = C(1, Rational(1)) - X(1, 1).pow(4);
   ProblemSpec problem(pattern, box, {{1, f}}, {{1, g}});

   SUBCASE("missing witness is refused") {
      CHECK_THROWS_AS(sparse_putinar(problem, SplitConfig{}, {Rational(1)}),
                      InputError);
   }
   SUBCASE("an exact witness completes the membership") {
      BallWitness witness;
      const Polynomial half_sq =
          C(1, Rational(1, 2)) * (X(1, 1).pow(2) - C(1, Rational(1))).pow(2);
      const auto s0 = sos_decompose(half_sq, 2);
      REQUIRE(s0.has_value());
      witness.sigma0 = *s0;
      witness.multipliers = {{1, constant_sos(1, Rational(1, 2))}};

      PutinarOptions options;
      options.ball_witnesses[1] = witness;
      const ModuleMembership m =
          sparse_putinar(problem, SplitConfig{}, {Rational(1)}, options);
      REQUIRE(m.blocks.size() == 1);
      const BlockMembership& bm = m.blocks[0];
      CHECK(bm.residual.coefficient_max_norm() <= kResidualTol);
      Polynomial rhs = bm.sigma0.reconstruct() + bm.residual;
      for (const auto& t : bm.multipliers) rhs += t.sigma.reconstruct() * t.g;
      CHECK(rhs == f);
      check_decomposition(bm.sigma0);
      for (const auto& t : bm.multipliers) check_decomposition(t.sigma);
   }
}

TEST_CASE("sparse_putinar validates radii") {
   SparsityPattern pattern(1, {BlockIndexSet({1})});
   Box box = Box::uniform(1, Rational(-1), Rational(1));
   ProblemSpec problem(pattern, box, {{1, C(1, Rational(2))}}, {});
   CHECK_THROWS_AS(sparse_putinar(problem, SplitConfig{}, {}), InputError);
   CHECK_THROWS_AS(sparse_putinar(problem, SplitConfig{}, {Rational(0)}), InputError);
}
