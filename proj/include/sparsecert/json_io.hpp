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

#include "json.hpp"
#include "sparsecert/cert_builder.hpp"
#include "sparsecert/sos.hpp"

namespace sparsecert {

using Json = nlohmann::json;

// Numbers travel as exact fraction strings. Floats are accepted on input
// and rationalized to the exact value of the IEEE double.
inline Json rational_to_json(const Rational& q) { return to_fraction_string(q); }

inline Rational rational_from_json(const Json& j) {
  if (j.is_string()) return parse_rational(j.get<std::string>());
  if (j.is_number_integer()) return Rational(j.get<long long>());
  if (j.is_number_float()) return rational_from_double(j.get<double>());
  throw InputError("expected a number or fraction string, got " + j.dump());
}

// Polynomial: {"nvars": n, "terms": [{"coeff": "a/b", "exps": [e1..en]}]}
// with terms in the polynomial's canonical (graded lexicographic) order.
inline Json polynomial_to_json(const Polynomial& p) {
  Json terms = Json::array();
  for (const auto& [m, c] : p.terms()) {
    std::vector<int> exps(p.nvars(), 0);
    for (const auto& [v, e] : m.factors()) exps[v - 1] = e;
    terms.push_back(Json{{"coeff", rational_to_json(c)}, {"exps", exps}});
  }
  return Json{{"nvars", p.nvars()}, {"terms", terms}};
}

inline Polynomial polynomial_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("nvars") || !j.contains("terms")) {
    throw InputError("polynomial needs {nvars, terms}");
  }
  const int nvars = j.at("nvars").get<int>();
  if (nvars < 0) throw InputError("polynomial nvars must be nonnegative");
  Polynomial p(nvars);
  for (const Json& t : j.at("terms")) {
    const auto exps = t.at("exps").get<std::vector<int>>();
    if (static_cast<int>(exps.size()) != nvars) {
      throw InputError("polynomial term exponent count does not match nvars");
    }
    std::vector<Monomial::Factor> factors;
    for (int v = 1; v <= nvars; ++v) {
      if (exps[v - 1] < 0) throw InputError("negative exponent in polynomial");
      if (exps[v - 1] > 0) factors.emplace_back(v, exps[v - 1]);
    }
    p += Polynomial::monomial_term(nvars, Monomial(factors),
                                   rational_from_json(t.at("coeff")));
  }
  return p;
}

inline Json box_to_json(const Box& box) {
  Json lo = Json::array();
  Json hi = Json::array();
  for (int v = 1; v <= box.nvars(); ++v) {
    lo.push_back(rational_to_json(box.interval(v).lo));
    hi.push_back(rational_to_json(box.interval(v).hi));
  }
  return Json{{"lo", lo}, {"hi", hi}};
}

inline Box box_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("lo") || !j.contains("hi")) {
    throw InputError("box needs {lo, hi}");
  }
  const Json& lo = j.at("lo");
  const Json& hi = j.at("hi");
  if (!lo.is_array() || lo.size() != hi.size() || lo.empty()) {
    throw InputError("box lo/hi must be nonempty arrays of equal length");
  }
  std::vector<Interval> ivs;
  for (size_t v = 0; v < lo.size(); ++v) {
    ivs.push_back(Interval{rational_from_json(lo[v]), rational_from_json(hi[v])});
  }
  return Box(ivs);
}

struct ProblemOptions {
  int k_max = 50;
  Rational eps = Rational(0);
  int depth_cap = 10;
  std::vector<DegreePair> degrees;  // Gram basis schedule for ball certificates
  std::vector<Rational> radii;      // per-block ball radii for membership runs
};

struct ProblemFile {
  int nvars = 0;
  std::vector<BlockIndexSet> blocks;
  Box box = Box(std::vector<Interval>{});
  std::vector<BlockPolynomial> summands;
  std::vector<BlockPolynomial> constraints;
  ProblemOptions options;

  SparsityPattern pattern() const { return SparsityPattern(nvars, blocks); }
  ProblemSpec spec() const { return ProblemSpec(pattern(), box, summands, constraints); }
};

inline std::vector<BlockPolynomial> tagged_polys_from_json(const Json& j,
                                                           const char* what) {
  std::vector<BlockPolynomial> out;
  if (j.is_null()) return out;
  if (!j.is_array()) throw InputError(std::string(what) + " must be an array");
  for (const Json& e : j) {
    if (!e.contains("block") || !e.contains("poly")) {
      throw InputError(std::string(what) + " entries need {block, poly}");
    }
    out.push_back({e.at("block").get<int>(), polynomial_from_json(e.at("poly"))});
  }
  return out;
}

inline Json tagged_polys_to_json(const std::vector<BlockPolynomial>& v) {
  Json out = Json::array();
  for (const auto& e : v) {
    out.push_back(Json{{"block", e.block}, {"poly", polynomial_to_json(e.poly)}});
  }
  return out;
}

inline ProblemFile problem_from_json(const Json& j) {
  if (!j.is_object()) throw InputError("problem file must be a JSON object");
  ProblemFile pf;
  pf.nvars = j.at("nvars").get<int>();
  if (pf.nvars <= 0) throw InputError("nvars must be positive");
  for (const Json& b : j.at("blocks")) {
    pf.blocks.push_back(BlockIndexSet(b.get<std::vector<int>>()));
  }
  if (pf.blocks.empty()) throw InputError("blocks must be nonempty");
  pf.box = box_from_json(j.at("box"));
  if (pf.box.nvars() != pf.nvars) {
    throw InputError("box dimension does not match nvars");
  }
  pf.summands = tagged_polys_from_json(j.value("summands", Json()), "summands");
  pf.constraints = tagged_polys_from_json(j.value("constraints", Json()), "constraints");
  if (j.contains("options")) {
    const Json& o = j.at("options");
    pf.options.k_max = o.value("k_max", 50);
    if (o.contains("eps")) pf.options.eps = rational_from_json(o.at("eps"));
    pf.options.depth_cap = o.value("depth_cap", 10);
    if (o.contains("degrees")) {
      for (const Json& d : o.at("degrees")) {
        const auto pair = d.get<std::vector<int>>();
        if (pair.size() != 2) throw InputError("degrees entries are [sigma, tau]");
        pf.options.degrees.push_back(DegreePair{pair[0], pair[1]});
      }
    }
    if (o.contains("radii")) {
      for (const Json& r : o.at("radii")) {
        pf.options.radii.push_back(rational_from_json(r));
      }
    }
  }
  return pf;
}

inline Json problem_to_json(const ProblemFile& pf) {
  Json blocks = Json::array();
  for (const auto& b : pf.blocks) blocks.push_back(b.indices());
  Json degrees = Json::array();
  for (const auto& d : pf.options.degrees) {
    degrees.push_back(std::vector<int>{d.sigma_basis, d.tau_basis});
  }
  Json radii = Json::array();
  for (const auto& r : pf.options.radii) radii.push_back(rational_to_json(r));
  return Json{{"nvars", pf.nvars},
              {"blocks", blocks},
              {"box", box_to_json(pf.box)},
              {"summands", tagged_polys_to_json(pf.summands)},
              {"constraints", tagged_polys_to_json(pf.constraints)},
              {"options",
               Json{{"k_max", pf.options.k_max},
                    {"eps", rational_to_json(pf.options.eps)},
                    {"depth_cap", pf.options.depth_cap},
                    {"degrees", degrees},
                    {"radii", radii}}}};
}

inline Json report_to_json(const PositivityReport& r) {
  Json j{{"verdict", to_string(r.verdict)},
         {"lower_bound", rational_to_json(r.lower_bound)},
         {"method", to_string(r.method)},
         {"subdivision_depth", r.subdivision_depth}};
  if (r.upper_bound) j["upper_bound"] = rational_to_json(*r.upper_bound);
  if (!r.witness_point.empty()) {
    Json pt = Json::array();
    for (const auto& x : r.witness_point) pt.push_back(rational_to_json(x));
    j["witness_point"] = pt;
    j["witness_value"] = rational_to_json(r.witness_value);
  }
  return j;
}

inline Json certificate_to_json(const Certificate& c) {
  Json terms = Json::array();
  for (const auto& t : c.multiplier_terms) {
    terms.push_back(Json{{"block", t.block},
                         {"constraint_index", t.constraint_index},
                         {"g", polynomial_to_json(t.g)},
                         {"term", polynomial_to_json(t.term)}});
  }
  Json remainders = Json::array();
  for (const auto& h : c.remainders) remainders.push_back(polynomial_to_json(h));
  Json reports = Json::array();
  for (const auto& r : c.remainder_reports) reports.push_back(report_to_json(r));
  return Json{{"lambda", rational_to_json(c.lambda)},
              {"k", c.k},
              {"multiplier_terms", terms},
              {"remainders", remainders},
              {"remainder_reports", reports}};
}

inline Certificate certificate_from_json(const Json& j) {
  Certificate c;
  c.lambda = rational_from_json(j.at("lambda"));
  c.k = j.at("k").get<int>();
  for (const Json& t : j.at("multiplier_terms")) {
    MultiplierTerm mt;
    mt.block = t.at("block").get<int>();
    mt.constraint_index = t.at("constraint_index").get<int>();
    mt.g = polynomial_from_json(t.at("g"));
    mt.term = polynomial_from_json(t.at("term"));
    c.multiplier_terms.push_back(std::move(mt));
  }
  for (const Json& h : j.at("remainders")) {
    c.remainders.push_back(polynomial_from_json(h));
  }
  return c;
}

inline Json split_result_to_json(const SplitResult& s) {
  Json h = Json::array();
  for (const auto& p : s.h) h.push_back(polynomial_to_json(p));
  Json transfers = Json::array();
  for (const auto& t : s.transfers) {
    transfers.push_back(Json{{"source_block", t.source_block},
                             {"target_block", t.target_block},
                             {"p", polynomial_to_json(t.p)}});
  }
  Json margins = Json::array();
  for (const auto& m : s.margins) margins.push_back(report_to_json(m));
  return Json{{"h", h}, {"transfers", transfers}, {"margins", margins}};
}

inline Json verification_to_json(const VerificationReport& r) {
  Json items = Json::array();
  for (const auto& item : r.items) {
    items.push_back(Json{{"name", item.name},
                         {"passed", item.passed},
                         {"detail", item.detail}});
  }
  return Json{{"items", items}, {"all_passed", r.all_passed()}};
}

inline Json sos_to_json(const SOSDecomposition& d) {
  Json basis = Json::array();
  for (const auto& m : d.basis) {
    std::vector<int> exps(d.nvars, 0);
    for (const auto& [v, e] : m.factors()) exps[v - 1] = e;
    basis.push_back(exps);
  }
  auto matrix = [](const RationalMatrix& g) {
    Json rows = Json::array();
    for (const auto& row : g) {
      Json r = Json::array();
      for (const auto& x : row) r.push_back(rational_to_json(x));
      rows.push_back(r);
    }
    return rows;
  };
  return Json{{"basis", basis},
              {"gram", matrix(d.gram)},
              {"psd_witness", matrix(d.psd_witness)},
              {"margin", rational_to_json(d.margin)},
              {"witness_error", rational_to_json(d.witness_error())}};
}

inline Json membership_to_json(const ModuleMembership& m) {
  Json blocks = Json::array();
  for (const auto& bm : m.blocks) {
    Json mults = Json::array();
    for (const auto& t : bm.multipliers) {
      mults.push_back(Json{{"constraint_index", t.constraint_index},
                           {"g", polynomial_to_json(t.g)},
                           {"sigma", sos_to_json(t.sigma)}});
    }
    blocks.push_back(
        Json{{"block", bm.block},
             {"target", polynomial_to_json(bm.target)},
             {"sigma0", sos_to_json(bm.sigma0)},
             {"multipliers", mults},
             {"residual", polynomial_to_json(bm.residual)},
             {"residual_norm", rational_to_json(bm.residual.coefficient_max_norm())}});
  }
  return Json{{"lambda", rational_to_json(m.lambda)},
              {"k", m.k},
              {"objective", polynomial_to_json(m.objective)},
              {"blocks", blocks}};
}

}  // namespace sparsecert
