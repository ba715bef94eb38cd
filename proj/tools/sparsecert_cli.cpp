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

#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sparsecert/json_io.hpp"

namespace {

using namespace sparsecert;

// Exit-code contract: 0 success, 1 mathematical failure or inconclusive,
// 2 usage or parse error.
constexpr int kOk = 0;
constexpr int kMathFailure = 1;
constexpr int kInputError = 2;

Json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  Json j;
  try {
    in >> j;
  } catch (const Json::exception& e) {
    throw InputError("parse error in '" + path + "': " + e.what());
  }
  return j;
}

void emit(const Json& j) { std::cout << j.dump(2) << std::endl; }

// Flags override the options block of the problem file when given.
struct CommonFlags {
  int k_max = -1;
  int depth_cap = -1;
  std::vector<std::string> degrees;
  unsigned seed = 7;
  bool strict_common_interval = false;
};

SplitConfig split_config(const ProblemFile& pf, const CommonFlags& flags) {
  SplitConfig config;
  config.epsilon = pf.options.eps;
  config.certify.depth_cap =
      flags.depth_cap > 0 ? flags.depth_cap : pf.options.depth_cap;
  return config;
}

std::vector<DegreePair> degree_schedule(const ProblemFile& pf,
                                        const CommonFlags& flags) {
  if (flags.degrees.empty()) return pf.options.degrees;
  std::vector<DegreePair> out;
  for (const std::string& tok : flags.degrees) {
    const auto colon = tok.find(':');
    if (colon == std::string::npos) {
      throw InputError("--degrees entries look like SIGMA:TAU, got '" + tok + "'");
    }
    DegreePair d;
    d.sigma_basis = std::stoi(tok.substr(0, colon));
    d.tau_basis = std::stoi(tok.substr(colon + 1));
    out.push_back(d);
  }
  return out;
}

// Strict mode encloses the box in the smallest common interval power K^n
// before splitting. The identity is region-free, so the result stays
// valid on the original box.
Box strict_hull(const Box& box) {
  Rational lo = box.interval(1).lo;
  Rational hi = box.interval(1).hi;
  for (int v = 2; v <= box.nvars(); ++v) {
    lo = std::min(lo, box.interval(v).lo);
    hi = std::max(hi, box.interval(v).hi);
  }
  return Box::uniform(box.nvars(), lo, hi);
}

int cmd_check_rip(const std::string& path, bool find_order) {
  const ProblemFile pf = problem_from_json(load_json(path));
  if (find_order) {
    const auto order = find_rip_order(pf.blocks);
    Json out{{"order", order ? Json(*order) : Json(nullptr)}};
    emit(out);
    if (!order) {
      std::cerr << "check-rip: no running-intersection order found\n";
      return kMathFailure;
    }
    return kOk;
  }
  const RipReport report = check_rip(pf.pattern());
  Json out{{"holds", report.holds}};
  if (!report.holds) out["violating_index"] = report.violating_index;
  emit(out);
  if (!report.holds) {
    std::cerr << "check-rip: block " << report.violating_index
              << " overlaps earlier blocks without a single container\n";
    return kMathFailure;
  }
  return kOk;
}

int cmd_split(const std::string& path, const CommonFlags& flags) {
  const ProblemFile pf = problem_from_json(load_json(path));
  const Box box = flags.strict_common_interval ? strict_hull(pf.box) : pf.box;
  const ProblemSpec problem(pf.pattern(), box, pf.summands, pf.constraints);
  const auto summands = problem.block_summands();
  const SplitConfig config = split_config(pf, flags);
  try {
    const SplitResult result = split_many(summands, problem.pattern, box, config);
    emit(split_result_to_json(result));
    return kOk;
  } catch (const CertificationFailure& e) {
    // Emit what the positivity layer can still say about the sum, so a
    // disproof witness is visible in the failure report.
    const PositivityReport why =
        certify_positive_sum(summands, box, Rational(0), config.certify);
    emit(Json{{"error", e.what()}, {"sum_report", report_to_json(why)}});
    std::cerr << "split: " << e.what() << "\n";
    return kMathFailure;
  }
}

int cmd_certify(const std::string& path, const CommonFlags& flags) {
  const ProblemFile pf = problem_from_json(load_json(path));
  const ProblemSpec problem = pf.spec();
  const int k_max = flags.k_max > 0 ? flags.k_max : pf.options.k_max;
  const Certificate cert = certify(problem, split_config(pf, flags), k_max);
  const VerificationReport verification = verify_certificate(cert, problem);
  std::cerr << "certify: lambda = " << to_fraction_string(cert.lambda)
            << ", k = " << cert.k << ", terms = " << cert.multiplier_terms.size()
            << "\n";
  emit(Json{{"certificate", certificate_to_json(cert)},
            {"verification", verification_to_json(verification)}});
  return verification.all_passed() ? kOk : kMathFailure;
}

int cmd_verify(const std::string& problem_path, const std::string& cert_path) {
  const ProblemFile pf = problem_from_json(load_json(problem_path));
  // Accept both a bare certificate object and the full certify output.
  Json cert_json = load_json(cert_path);
  if (!cert_json.contains("lambda") && cert_json.contains("certificate")) {
    cert_json = cert_json.at("certificate");
  }
  const Certificate cert = certificate_from_json(cert_json);
  const VerificationReport report = verify_certificate(cert, pf.spec());
  emit(verification_to_json(report));
  for (const auto& item : report.items) {
    std::cerr << "verify: " << item.name << ": "
              << (item.passed ? "pass" : "FAIL") << "\n";
  }
  return report.all_passed() ? kOk : kMathFailure;
}

int cmd_sos_certify(const std::string& path, const CommonFlags& flags) {
  const ProblemFile pf = problem_from_json(load_json(path));
  if (pf.options.radii.empty()) {
    throw InputError("sos-certify needs options.radii (one ball radius per block)");
  }
  const ProblemSpec problem = pf.spec();
  PutinarOptions options;
  options.degrees = degree_schedule(pf, flags);
  options.k_max = flags.k_max > 0 ? flags.k_max : pf.options.k_max;
  const ModuleMembership membership =
      sparse_putinar(problem, split_config(pf, flags), pf.options.radii, options);

  const Rational residual_tol(1, 1000000);
  const Rational witness_tol(1, 1000000000);
  const Rational sample_tol(1, 100000);
  Json checks = Json::array();
  auto push = [&checks](const std::string& name, bool passed,
                        const std::string& detail) {
    checks.push_back(Json{{"name", name}, {"passed", passed}, {"detail", detail}});
  };

  bool residuals_ok = true;
  bool witness_ok = true;
  bool margins_ok = true;
  Polynomial total(pf.nvars);
  for (const auto& bm : membership.blocks) {
    residuals_ok = residuals_ok &&
                   bm.residual.coefficient_max_norm() <= residual_tol;
    auto scan = [&](const SOSDecomposition& d) {
      witness_ok = witness_ok && d.witness_error() <= witness_tol;
      margins_ok = margins_ok && d.margin >= 0;
    };
    scan(bm.sigma0);
    for (const auto& t : bm.multipliers) scan(t.sigma);
    total += bm.target;
  }
  push("block_residuals", residuals_ok, "coefficient max-norm <= 1e-6 per block");
  push("psd_witnesses", witness_ok, "witness reproduces each Gram within 1e-9");
  push("margins", margins_ok, "all PSD margins nonnegative");
  push("target_sum", total == membership.objective,
       "block targets add up to the objective exactly");

  // Sampled soundness of the assembled right side at feasible points.
  std::mt19937 rng(flags.seed);
  std::uniform_int_distribution<int> tick(0, 256);
  int tested = 0;
  bool samples_ok = true;
  for (int trial = 0; trial < 2000 && tested < 200; ++trial) {
    std::vector<Rational> x(pf.nvars);
    for (int v = 1; v <= pf.nvars; ++v) {
      const Interval& iv = pf.box.interval(v);
      x[v - 1] = iv.lo + iv.width() * Rational(tick(rng), 256);
    }
    bool feasible = true;
    for (const auto& g : pf.constraints) {
      if (g.poly.eval(x) < 0) { feasible = false; break; }
    }
    if (!feasible) continue;
    ++tested;
    Rational rhs(0);
    for (const auto& bm : membership.blocks) {
      const Rational s0 = bm.sigma0.reconstruct().eval(x);
      samples_ok = samples_ok && s0 >= 0;
      rhs += s0;
      for (const auto& t : bm.multipliers) {
        const Rational sv = t.sigma.reconstruct().eval(x);
        samples_ok = samples_ok && sv >= 0;
        rhs += sv * t.g.eval(x);
      }
    }
    const Rational gap = abs(Rational(rhs - membership.objective.eval(x)));
    samples_ok = samples_ok && gap <= sample_tol;
  }
  push("sampled_identity", samples_ok,
       std::to_string(tested) + " feasible samples, gap <= 1e-5, sigmas >= 0");

  bool all = true;
  for (const auto& c : checks) all = all && c.at("passed").get<bool>();
  Json out = membership_to_json(membership);
  out["checks"] = checks;
  out["all_passed"] = all;
  emit(out);
  return all ? kOk : kMathFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sparsity-respecting positivity certificates for polynomials"};
  app.require_subcommand(1);

  CommonFlags flags;
  std::string problem_path;
  std::string cert_path;
  bool find_order = false;

  auto add_common = [&flags](CLI::App* cmd) {
    cmd->add_option("--k-max", flags.k_max, "cap on the exponent search");
    cmd->add_option("--depth-cap", flags.depth_cap, "Bernstein subdivision cap");
    cmd->add_option("--degrees", flags.degrees,
                    "Gram basis schedule entries SIGMA:TAU");
    cmd->add_option("--seed", flags.seed, "seed for sampled report checks");
  };

  CLI::App* check = app.add_subcommand("check-rip",
                                       "test the running intersection property");
  check->add_option("file", problem_path, "problem JSON")->required();
  check->add_flag("--find-order", find_order,
                  "search for a valid block order instead");

  CLI::App* split = app.add_subcommand("split",
                                       "split a sum into positive block pieces");
  split->add_option("file", problem_path, "problem JSON")->required();
  split->add_flag("--strict-common-interval", flags.strict_common_interval,
                  "enclose the box in a common interval power first");
  add_common(split);

  CLI::App* certify = app.add_subcommand("certify",
                                         "build a box positivity certificate");
  certify->add_option("file", problem_path, "problem JSON")->required();
  add_common(certify);

  CLI::App* verify = app.add_subcommand("verify",
                                        "re-check a certificate against a problem");
  verify->add_option("problem", problem_path, "problem JSON")->required();
  verify->add_option("certificate", cert_path, "certificate JSON")->required();

  CLI::App* sos = app.add_subcommand("sos-certify",
                                     "block-wise sum-of-squares membership");
  sos->add_option("file", problem_path, "problem JSON")->required();
  add_common(sos);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return kInputError;
  }

  try {
    if (check->parsed()) return cmd_check_rip(problem_path, find_order);
    if (split->parsed()) return cmd_split(problem_path, flags);
    if (certify->parsed()) return cmd_certify(problem_path, flags);
    if (verify->parsed()) return cmd_verify(problem_path, cert_path);
    if (sos->parsed()) return cmd_sos_certify(problem_path, flags);
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kInputError;
  } catch (const CertificationFailure& e) {
    std::cerr << "certification failure: " << e.what() << "\n";
    return kMathFailure;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kMathFailure;
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << "\n";
    return kInputError;
  }
  return kInputError;
}
