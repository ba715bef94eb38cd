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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"
#include "sparsecert/json_io.hpp"

namespace {

using namespace sparsecert;
namespace fs = std::filesystem;

const fs::path kWorkDir = fs::temp_directory_path() / "sparsecert_cli_tests";

fs::path write_file(const std::string& name, const std::string& content) {
   fs::create_directories(kWorkDir);
   const fs::path path = kWorkDir / name;
   std::ofstream out(path);
   out << content;
   return path;
}

fs::path write_json(const std::string& name, const Json& j) {
   return write_file(name, j.dump(2));
}

struct RunResult {
   int exit_code = -1;
   Json stdout_json;
   bool has_json = false;
};

RunResult run_cli(const std::string& args, const std::string& tag) {
   const fs::path out = kWorkDir / (tag + ".out");
   const fs::path err = kWorkDir / (tag + ".err");
   const std::string command = std::string(SPARSECERT_CLI_PATH) + " " + args +
                               " > " + out.string() + " 2> " + err.string();
   const int status = std::system(command.c_str());
   RunResult r;
   REQUIRE(status != -1);
   r.exit_code = WEXITSTATUS(status);
   std::ifstream in(out);
   try {
      in >> r.stdout_json;
      r.has_json = true;
   } catch (...) {
      r.has_json = false;
   }
   return r;
}

Json poly_json(const Polynomial& p) { return polynomial_to_json(p); }

Polynomial X(int nvars, int var) { return Polynomial::variable(nvars, var); }

Polynomial C(int nvars, const Rational& value) {
   return Polynomial::constant(nvars, value);
}

Json guided_problem_json() {
   const Polynomial f = X(1, 1) + C(1, Rational(2));
   const Polynomial g = C(1, Rational(1)) - X(1, 1).pow(2);
   return Json{{"nvars", 1},
               {"blocks", Json::array({Json::array({1})})},
               {"box", Json{{"lo", {"-1"}}, {"hi", {"1"}}}},
               {"summands", Json::array({Json{{"block", 1}, {"poly", poly_json(f)}}})},
               {"constraints", Json::array({Json{{"block", 1}, {"poly", poly_json(g)}}})},
               {"options", Json{{"k_max", 5}, {"radii", {"1"}}}}};
}

Json worked_split_json() {
   const Polynomial f1 = X(3, 1).pow(2) + X(3, 2) + C(3, Rational(1));
   const Polynomial f2 = X(3, 3).pow(2) - X(3, 2);
   return Json{
       {"nvars", 3},
       {"blocks", Json::array({Json::array({1, 2}), Json::array({2, 3})})},
       {"box", Json{{"lo", {"-1", "-1", "-1"}}, {"hi", {"1", "1", "1"}}}},
       {"summands", Json::array({Json{{"block", 1}, {"poly", poly_json(f1)}},
                                 Json{{"block", 2}, {"poly", poly_json(f2)}}})},
       {"constraints", Json::array()},
       {"options", Json{{"eps", "1"}}}};
}

}  // namespace

TEST_CASE("problem JSON round-trips to a canonical form") {
   const Json original = guided_problem_json();
   const ProblemFile pf = problem_from_json(original);
   const Json once = problem_to_json(pf);
   const Json twice = problem_to_json(problem_from_json(once));
   CHECK(once == twice);
   CHECK(pf.spec().objective() == X(1, 1) + C(1, Rational(2)));
}

TEST_CASE("rational JSON forms all parse") {
   CHECK(rational_from_json(Json("3/4")) == Rational(3, 4));
   CHECK(rational_from_json(Json("-2")) == Rational(-2));
   CHECK(rational_from_json(Json(5)) == Rational(5));
   CHECK(rational_from_json(Json(0.25)) == Rational(1, 4));
   CHECK(rational_to_json(Rational(3, 4)) == Json("3/4"));
   CHECK_THROWS_AS(rational_from_json(Json::array()), InputError);
   CHECK_THROWS_AS(rational_from_json(Json("1/0")), InputError);
}

TEST_CASE("polynomial JSON rejects malformed terms") {
   Json j = poly_json(X(2, 1) * X(2, 2));
   j["terms"][0]["exps"] = {1};  // wrong arity
   CHECK_THROWS_AS(polynomial_from_json(j), InputError);
   Json k = poly_json(X(2, 1));
   k["terms"][0]["exps"] = {-1, 0};
   CHECK_THROWS_AS(polynomial_from_json(k), InputError);
}

TEST_CASE("check-rip accepts the chain and rejects the cycle") {
   const auto chain = write_json("chain.json", worked_split_json());
   CHECK(run_cli("check-rip " + chain.string(), "rip_chain").exit_code == 0);

   Json cycle = worked_split_json();
   cycle["nvars"] = 6;
   cycle["blocks"] = Json::array({Json::array({1, 2}), Json::array({3, 4}),
                                  Json::array({5, 6}), Json::array({1, 3}),
                                  Json::array({3, 5}), Json::array({1, 5})});
   cycle["box"] = Json{{"lo", {"-1", "-1", "-1", "-1", "-1", "-1"}},
                       {"hi", {"1", "1", "1", "1", "1", "1"}}};
   cycle["summands"] = Json::array();
   const auto cycle_path = write_json("cycle.json", cycle);

   const RunResult given = run_cli("check-rip " + cycle_path.string(), "rip_cycle");
   CHECK(given.exit_code == 1);
   REQUIRE(given.has_json);
   CHECK(given.stdout_json.at("holds") == false);

   const RunResult search =
       run_cli("check-rip --find-order " + cycle_path.string(), "rip_cycle_order");
   CHECK(search.exit_code == 1);
   REQUIRE(search.has_json);
   CHECK(search.stdout_json.at("order").is_null());

   const RunResult chain_search =
       run_cli("check-rip --find-order " + chain.string(), "rip_chain_order");
   CHECK(chain_search.exit_code == 0);
   REQUIRE(chain_search.has_json);
   CHECK(chain_search.stdout_json.at("order").is_array());
}

TEST_CASE("split reproduces the worked two-block example") {
   const auto path = write_json("worked.json", worked_split_json());
   const RunResult r = run_cli("split " + path.string(), "split_worked");
   CHECK(r.exit_code == 0);
   REQUIRE(r.has_json);
   const Json& out = r.stdout_json;
   REQUIRE(out.at("h").size() == 2);
   const Polynomial h1 = polynomial_from_json(out.at("h")[0]);
   const Polynomial h2 = polynomial_from_json(out.at("h")[1]);
   const Polynomial f1 = X(3, 1).pow(2) + X(3, 2) + C(3, Rational(1));
   const Polynomial f2 = X(3, 3).pow(2) - X(3, 2);
   CHECK(h1 + h2 == f1 + f2);
   for (int v : h1.support_vars()) CHECK((v == 1 || v == 2));
   for (int v : h2.support_vars()) CHECK((v == 2 || v == 3));
   for (const Json& m : out.at("margins")) {
      CHECK(parse_rational(m.at("lower_bound").get<std::string>()) >= Rational(1, 4));
   }
}

TEST_CASE("split passes a single block through unchanged") {
   Json j = guided_problem_json();
   j["constraints"] = Json::array();
   const auto path = write_json("single.json", j);
   const RunResult r = run_cli("split " + path.string(), "split_single");
   CHECK(r.exit_code == 0);
   REQUIRE(r.has_json);
   REQUIRE(r.stdout_json.at("h").size() == 1);
   CHECK(polynomial_from_json(r.stdout_json.at("h")[0]) ==
         X(1, 1) + C(1, Rational(2)));
}

TEST_CASE("split surfaces a disproof witness for a sign-changing sum") {
   Json j = guided_problem_json();
   j["constraints"] = Json::array();
   j["summands"][0]["poly"] = poly_json(X(1, 1));
   const auto path = write_json("negative.json", j);
   const RunResult r = run_cli("split " + path.string(), "split_negative");
   CHECK(r.exit_code == 1);
   REQUIRE(r.has_json);
   const Json& report = r.stdout_json.at("sum_report");
   CHECK(report.at("verdict") == "disproved");
   const Rational witness =
       parse_rational(report.at("witness_value").get<std::string>());
   CHECK(witness < 0);
}

TEST_CASE("split honors the strict common interval flag") {
   Json j = worked_split_json();
   // A lopsided box still splits after enclosure in its common hull.
   j["box"] = Json{{"lo", {"-1", "-1/2", "-1"}}, {"hi", {"1", "1/2", "1"}}};
   const auto path = write_json("lopsided.json", j);
   const RunResult r =
       run_cli("split --strict-common-interval " + path.string(), "split_strict");
   CHECK(r.exit_code == 0);
   REQUIRE(r.has_json);
   const Polynomial h1 = polynomial_from_json(r.stdout_json.at("h")[0]);
   const Polynomial h2 = polynomial_from_json(r.stdout_json.at("h")[1]);
   const Polynomial f1 = X(3, 1).pow(2) + X(3, 2) + C(3, Rational(1));
   const Polynomial f2 = X(3, 3).pow(2) - X(3, 2);
   CHECK(h1 + h2 == f1 + f2);
}

TEST_CASE("certify then verify round-trips through JSON files") {
   const auto path = write_json("guided.json", guided_problem_json());
   const RunResult built = run_cli("certify " + path.string(), "certify_guided");
   CHECK(built.exit_code == 0);
   REQUIRE(built.has_json);
   CHECK(built.stdout_json.at("verification").at("all_passed") == true);

   const auto cert_path =
       write_json("guided_cert.json", built.stdout_json.at("certificate"));
   const RunResult verified =
       run_cli("verify " + path.string() + " " + cert_path.string(), "verify_guided");
   CHECK(verified.exit_code == 0);
   REQUIRE(verified.has_json);
   CHECK(verified.stdout_json.at("all_passed") == true);

   // The unmodified certify output must be accepted as well.
   const auto full_path = write_json("guided_full.json", built.stdout_json);
   const RunResult wrapped =
       run_cli("verify " + path.string() + " " + full_path.string(), "verify_full");
   CHECK(wrapped.exit_code == 0);
}

TEST_CASE("verify rejects a tampered certificate") {
   const auto path = write_json("guided2.json", guided_problem_json());
   const RunResult built = run_cli("certify " + path.string(), "certify_guided2");
   REQUIRE(built.exit_code == 0);
   REQUIRE(built.has_json);

   Json cert = built.stdout_json.at("certificate");
   Json& coeff = cert.at("remainders")[0].at("terms")[0].at("coeff");
   const Rational bumped =
       parse_rational(coeff.get<std::string>()) + Rational(1, 1000000000);
   coeff = to_fraction_string(bumped);
   const auto cert_path = write_json("tampered_cert.json", cert);

   const RunResult verified = run_cli(
       "verify " + path.string() + " " + cert_path.string(), "verify_tampered");
   CHECK(verified.exit_code == 1);
   REQUIRE(verified.has_json);
   CHECK(verified.stdout_json.at("all_passed") == false);
   CHECK(verified.stdout_json.at("items")[0].at("name") == "identity");
   CHECK(verified.stdout_json.at("items")[0].at("passed") == false);
}

TEST_CASE("sos-certify emits a passing membership for the guided problem") {
   const auto path = write_json("guided3.json", guided_problem_json());
   const RunResult r =
       run_cli("sos-certify --seed 11 " + path.string(), "sos_guided");
   CHECK(r.exit_code == 0);
   REQUIRE(r.has_json);
   CHECK(r.stdout_json.at("all_passed") == true);
   for (const Json& block : r.stdout_json.at("blocks")) {
      const Rational norm =
          parse_rational(block.at("residual_norm").get<std::string>());
      CHECK(norm <= Rational(1, 1000000));
   }
   for (const Json& c : r.stdout_json.at("checks")) {
      CHECK(c.at("passed") == true);
   }
}

TEST_CASE("usage and parse failures exit with code 2") {
   const auto bad = write_file("bad.json", "{ not json");
   CHECK(run_cli("certify " + bad.string(), "bad_json").exit_code == 2);
   CHECK(run_cli("check-rip " + bad.string(), "bad_json_rip").exit_code == 2);
   CHECK(run_cli("certify " + (kWorkDir / "missing.json").string(), "no_file")
             .exit_code == 2);
   CHECK(run_cli("frobnicate x.json", "bad_subcommand").exit_code == 2);

   Json no_radii = guided_problem_json();
   no_radii["options"].erase("radii");
   const auto nr = write_json("no_radii.json", no_radii);
   CHECK(run_cli("sos-certify " + nr.string(), "no_radii").exit_code == 2);

   Json bad_block = guided_problem_json();
   bad_block["summands"][0]["block"] = 9;
   const auto bb = write_json("bad_block.json", bad_block);
   CHECK(run_cli("certify " + bb.string(), "bad_block").exit_code == 2);
}

TEST_CASE("certify reports an honest failure for a hopeless objective") {
   Json j = guided_problem_json();
   j["summands"][0]["poly"] = poly_json(X(1, 1));  // changes sign on the box
   j["options"]["k_max"] = 2;
   const auto path = write_json("hopeless.json", j);
   const RunResult r = run_cli("certify " + path.string(), "certify_hopeless");
   CHECK(r.exit_code == 1);
}
