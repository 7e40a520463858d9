#include "ngauss/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "ngauss/entropy.hpp"
#include "ngauss/errors.hpp"
#include "ngauss/fock_diagonal.hpp"
#include "ngauss/state_io.hpp"
#include "ngauss/verifier.hpp"

namespace ngauss::cli {

using nlohmann::json;

namespace {

constexpr double kIdentityTolerance = 1e-5;
constexpr double kNegativeTolerance = 1e-9;
constexpr double kCorollaryTolerance = 1e-9;

struct Failure {
  int code;
  std::string message;
};

json real_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json matrix_json(const RealMatrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

json vector_json(const RealVector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

json params_json(const GaussianParams& p) {
  return {{"occupancies", p.occupancies},
          {"symplectic", matrix_json(p.symplectic)},
          {"displacement", vector_json(p.displacement)}};
}

json check(const std::string& name, double value, double tolerance, bool pass) {
  return {{"name", name}, {"value", real_or_null(value)}, {"tolerance", tolerance}, {"pass", pass}};
}

json single_mode_json(const SingleModeGaussian& g) {
  return {{"nbar", g.nbar}, {"r", g.r}, {"phi", g.phi}, {"alpha", {g.alpha.real(), g.alpha.imag()}}};
}

struct Input {
  std::string digest;
  ParsedState parsed;
};

Input load(const std::string& path, const ParseOptions& opts) {
  std::string text;
  if (path == "-") {
    text.assign(std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>());
  } else {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Failure{kParseError, "cannot read state file " + path};
    text.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  }
  return {sha256_digest(text), parse_state_text(text, opts)};
}

json input_json(const Input& in) {
  json j = {{"digest", in.digest}, {"kind", in.parsed.kind}, {"cutoffs", in.parsed.state.config().cutoffs()}};
  if (!in.parsed.name.empty()) j["name"] = in.parsed.name;
  return j;
}

json diagnostics_json(const Diagnostics& d, const ValidationTolerances& tol) {
  return {{"hermiticity_residual", {{"value", d.hermiticity_residual}, {"tolerance", tol.hermiticity}}},
          {"trace_deviation", {{"value", d.trace_deviation}, {"tolerance", tol.trace}}},
          {"min_eigenvalue", {{"value", d.min_eigenvalue}, {"tolerance", -tol.negativity}}},
          {"tail_mass", {{"value", d.tail_mass}, {"tolerance", tol.tail}}},
          {"tail_mass_top2", {{"value", d.tail_mass_top2}, {"tolerance", kWellTruncatedThreshold}}},
          {"well_truncated", d.well_truncated},
          {"pass", d.pass()}};
}

// Exit code for a state that fails validation, 0 if it passes.
int validation_code(const Diagnostics& d) {
  if (!d.physical()) return kInvalidState;
  if (!d.tail_ok) return kTruncationFailure;
  return kOk;
}

// Closed forms on Fock-diagonal states do not depend on the truncation, so
// `fds` skips the tail test.
void require_valid(const DensityMatrix& rho, bool check_tail = true) {
  Diagnostics d = validate(rho);
  if (!check_tail) d.tail_ok = true;
  if (const int code = validation_code(d); code != kOk) {
    std::ostringstream msg;
    if (code == kInvalidState) {
      msg << "invalid state: hermiticity residual " << d.hermiticity_residual << ", trace deviation "
          << d.trace_deviation << ", min eigenvalue " << d.min_eigenvalue;
    } else {
      msg << "state not resolved at its cutoff: top-level population above " << ValidationTolerances{}.tail
          << "; increase cutoff";
    }
    throw Failure{code, msg.str()};
  }
}

json base_report(const std::string& command, const Input& in) {
  return {{"tool", kToolName}, {"version", kToolVersion}, {"command", command}, {"input", input_json(in)}};
}

struct Common {
  std::string path;
  bool quiet = false;
  std::size_t max_dim = kDefaultMaxDim;
};

int cmd_validate(const Common& c, std::ostream& out, std::ostream& err) {
  const Input in = load(c.path, {std::nullopt, c.max_dim});
  const ValidationTolerances tol;
  const Diagnostics d = validate(in.parsed.state, tol);
  json rep = base_report("validate", in);
  rep["results"] = diagnostics_json(d, tol);
  out << rep.dump(2) << "\n";
  if (!c.quiet) {
    err << "validate: " << (d.pass() ? "pass" : "fail") << " (hermiticity " << d.hermiticity_residual
        << ", trace " << d.trace_deviation << ", min eigenvalue " << d.min_eigenvalue << ")\n";
  }
  return validation_code(d);
}

int cmd_nongauss(const Common& c, std::optional<int> cutoff, bool dense_check, std::ostream& out,
                 std::ostream& err) {
  const Input in = load(c.path, {cutoff, c.max_dim});
  require_valid(in.parsed.state);
  NonGaussOptions opts;
  opts.dense_check = dense_check;
  const NonGaussReport r = nongaussianity(in.parsed.state, opts);

  json rep = base_report("nongauss", in);
  json assoc = params_json(r.associate.params);
  assoc["nu"] = r.associate.nu;
  rep["results"] = {
      {"delta_S", r.delta_s},
      {"entropy_state", r.entropy_state},
      {"entropy_gaussian", r.entropy_gaussian},
      {"associate_gaussian", std::move(assoc)},
      {"boundary_flag", r.boundary_flag},
      {"imaginary_residue", r.imaginary_residue},
      {"truncation_warning", r.truncation_warning},
      {"dense_relative_entropy", r.dense_relative_entropy ? real_or_null(*r.dense_relative_entropy) : json(nullptr)},
      {"identity_residual", r.identity_residual ? json(*r.identity_residual) : json(nullptr)},
      {"gaussian_leakage", r.gaussian_leakage ? json(*r.gaussian_leakage) : json(nullptr)},
      {"dense_check", r.dense_check_note},
  };
  json checks = json::array();
  checks.push_back(check("delta_S_nonnegative", r.delta_s, kNegativeTolerance, r.delta_s >= -kNegativeTolerance));
  if (r.identity_residual) {
    checks.push_back(check("relative_entropy_identity", *r.identity_residual, kIdentityTolerance,
                           *r.identity_residual < kIdentityTolerance));
  }
  rep["checks"] = std::move(checks);
  rep["tolerances"] = {{"eigenvalue_floor", kEigenFloor},
                       {"support", kSupportTolerance},
                       {"occupancy_floor", kOccupancyFloor},
                       {"identity", kIdentityTolerance}};
  out << rep.dump(2) << "\n";
  if (!c.quiet) {
    err << std::setprecision(10) << "delta_S = " << r.delta_s << "  S(rho) = " << r.entropy_state
        << "  S(tau_G) = " << r.entropy_gaussian;
    if (r.identity_residual) err << "  identity residual = " << *r.identity_residual;
    err << "\n";
  }
  return kOk;
}

int cmd_fds(const Common& c, bool dephase_flag, std::ostream& out, std::ostream& err) {
  const Input in = load(c.path, {std::nullopt, c.max_dim});
  const auto& parsed = in.parsed;
  std::optional<FockDiagonal> fds;
  if (parsed.kind == "fock_diagonal") {
    try {
      fds.emplace(parsed.state.config(), *parsed.lambda);
    } catch (const InvalidState& e) {
      throw Failure{kInvalidState, e.what()};
    }
    require_valid(parsed.state, false);
  } else {
    require_valid(parsed.state, false);
    const Matrix& m = parsed.state.data();
    const bool diagonal = (m - Matrix(m.diagonal().asDiagonal())).cwiseAbs().maxCoeff() == 0.0;
    if (!dephase_flag && !(parsed.kind == "named" && diagonal)) {
      throw Failure{kWrongKind, "fds needs a Fock-diagonal state; pass --dephase to dephase a general state"};
    }
    fds.emplace(dephase(parsed.state));
  }

  const MarginalSet marg = marginals(*fds);
  const double full = nongauss_fds(*fds);
  const double prod = nongauss_product(*fds);
  const double tmi = total_mutual_information(*fds);
  const double residual = std::abs(full - prod - tmi);

  json rep = base_report("fds", in);
  rep["results"] = {{"nongauss_fds", full},
                    {"nongauss_product", prod},
                    {"total_mutual_information", tmi},
                    {"marginal_means", marg.means},
                    {"corollary3_residual", residual},
                    {"dephased", parsed.kind != "fock_diagonal"},
                    {"lambda", fds->lambda()}};
  rep["checks"] = json::array({check("corollary3_residual", residual, kCorollaryTolerance, residual <= kCorollaryTolerance),
                               check("tmi_nonnegative", tmi, kNegativeTolerance, tmi >= -kNegativeTolerance),
                               check("product_bound", full - prod, kNegativeTolerance, full - prod >= -kNegativeTolerance)});
  rep["tolerances"] = {{"corollary3", kCorollaryTolerance}, {"nonnegativity", kNegativeTolerance}};
  out << rep.dump(2) << "\n";
  if (!c.quiet) {
    err << std::setprecision(10) << "nongauss_fds = " << full << "  nongauss_product = " << prod
        << "  TMI = " << tmi << "\n";
  }
  return kOk;
}

struct VerifyFlags {
  std::uint64_t seed = 1;
  int grid = 15;
  int rounds = 3;
  int references = 5;
  int perturbations = 200;
};

int cmd_verify(const Common& c, const VerifyFlags& f, std::ostream& out, std::ostream& err) {
  const Input in = load(c.path, {std::nullopt, c.max_dim});
  const DensityMatrix& rho = in.parsed.state;
  require_valid(rho);

  bool all_pass = true;
  json checks = json::array();
  json results = json::object();

  if (rho.config().num_modes() == 1) {
    SearchSpec spec;
    spec.grid_points = f.grid;
    spec.refinement_rounds = f.rounds;
    const ClosestGaussianSearch s = brute_force_closest_gaussian(rho, spec);
    const bool gap_ok = s.gap >= -kNegativeTolerance && s.gap <= s.resolution_bound;
    const bool match_ok = !s.associate_in_domain || s.parameters_match;
    all_pass = all_pass && gap_ok && match_ok;
    results["closest_gaussian"] = {{"best", single_mode_json(s.best)},
                                   {"best_value", s.best_value},
                                   {"associate", single_mode_json(s.associate)},
                                   {"associate_value", s.associate_value},
                                   {"gap", s.gap},
                                   {"resolution", s.resolution},
                                   {"resolution_bound", s.resolution_bound},
                                   {"evaluated", s.evaluated},
                                   {"skipped_divergent", s.skipped_divergent},
                                   {"outside_disc", s.outside_disc},
                                   {"associate_in_domain", s.associate_in_domain},
                                   {"parameters_match", s.parameters_match},
                                   {"claim", "associate Gaussian optimal to within grid resolution"}};
    checks.push_back(check("closest_gaussian_gap", s.gap, s.resolution_bound, gap_ok));
    checks.push_back({{"name", "closest_gaussian_parameters"},
                      {"value", s.parameters_match},
                      {"tolerance", s.resolution},
                      {"pass", match_ok}});
  } else {
    results["closest_gaussian"] = {{"skipped", "grid search covers single-mode states only"}};
  }

  json identity = json::array();
  const auto refs = sample_gaussian_references(rho.config().num_modes(), f.references, f.seed);
  for (std::size_t i = 0; i < refs.size(); ++i) {
    try {
      const Theorem1Residual t = theorem1_identity(rho, refs[i]);
      const bool ok = t.residual < kIdentityTolerance && t.gap >= -kNegativeTolerance;
      all_pass = all_pass && ok;
      identity.push_back({{"reference", params_json(refs[i])},
                          {"lhs", t.lhs},
                          {"rhs", real_or_null(t.rhs)},
                          {"residual", real_or_null(t.residual)},
                          {"gap", real_or_null(t.gap)},
                          {"pass", ok}});
      checks.push_back(check("theorem1_identity_" + std::to_string(i), t.residual, kIdentityTolerance, ok));
    } catch (const TruncationError& e) {
      identity.push_back({{"reference", params_json(refs[i])}, {"skipped", e.what()}});
    } catch (const DomainError& e) {
      identity.push_back({{"reference", params_json(refs[i])}, {"skipped", e.what()}});
    }
  }
  results["theorem1_identity"] = std::move(identity);

  const NearestFdsReport nf = nearest_fds_search(rho, f.perturbations, f.seed);
  all_pass = all_pass && nf.pass;
  results["nearest_fds"] = {{"base_value", nf.base_value},
                            {"min_margin", nf.min_margin},
                            {"perturbations", nf.perturbations},
                            {"divergent", nf.divergent}};
  checks.push_back(check("nearest_fds_margin", nf.min_margin, kNegativeTolerance, nf.pass));

  json rep = base_report("verify", in);
  rep["seed"] = f.seed;
  rep["search"] = {{"grid_points", f.grid}, {"refinement_rounds", f.rounds}, {"shrink", SearchSpec{}.shrink}};
  rep["results"] = std::move(results);
  rep["checks"] = std::move(checks);
  rep["tolerances"] = {{"identity", kIdentityTolerance}, {"nonnegativity", kNegativeTolerance}};
  rep["pass"] = all_pass;
  out << rep.dump(2) << "\n";
  if (!c.quiet) err << "verify: " << (all_pass ? "pass" : "FAIL") << "\n";
  return all_pass ? kOk : kVerificationFailure;
}

std::size_t max_dim_from_env() {
  const char* env = std::getenv("NONGAUSS_MAX_DIM");
  if (env == nullptr || *env == '\0') return kDefaultMaxDim;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(env, &end, 10);
  if (end == env || *end != '\0' || v == 0) throw Failure{kUsage, "NONGAUSS_MAX_DIM must be a positive integer"};
  return static_cast<std::size_t>(v);
}

int emit_failure(const Failure& f, bool quiet, std::ostream& out, std::ostream& err) {
  out << json{{"tool", kToolName}, {"version", kToolVersion}, {"error", f.message}, {"exit_code", f.code}}.dump(2)
      << "\n";
  if (!quiet) err << "error: " << f.message << "\n";
  return f.code;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Entropic non-Gaussianity of truncated bosonic states", "ngauss"};
  app.require_subcommand(1);
  Common common;
  app.add_flag("-q,--quiet", common.quiet, "Suppress the human-readable summary");

  auto add_state = [&](CLI::App* sub) {
    sub->add_option("statefile", common.path, "JSON state file ('-' for stdin)")->required();
    sub->fallthrough();
  };

  CLI::App* nongauss = app.add_subcommand("nongauss", "Entropic non-Gaussianity and associate Gaussian");
  add_state(nongauss);
  std::optional<int> cutoff;
  nongauss->add_option("--cutoff", cutoff, "Fock cutoff for named states")->check(CLI::Range(2, 1 << 20));
  bool no_dense = false;
  nongauss->add_flag("--no-dense-check", no_dense, "Skip the dense relative-entropy cross-check");

  CLI::App* fds = app.add_subcommand("fds", "Closed forms for Fock-diagonal states");
  add_state(fds);
  bool dephase_flag = false;
  fds->add_flag("--dephase", dephase_flag, "Dephase a general state in the Fock basis first");

  CLI::App* verify = app.add_subcommand("verify", "Brute-force checks of the extremal properties");
  add_state(verify);
  VerifyFlags vf;
  verify->add_option("--seed", vf.seed, "Random seed");
  verify->add_option("--grid", vf.grid, "Grid points per search parameter")->check(CLI::Range(2, 101));
  verify->add_option("--rounds", vf.rounds, "Local refinement rounds")->check(CLI::Range(0, 10));
  verify->add_option("--references", vf.references, "Random Gaussian references")->check(CLI::Range(0, 1000));
  verify->add_option("--perturbations", vf.perturbations, "Perturbations of the dephased state")
      ->check(CLI::Range(0, 100000));

  CLI::App* validate_cmd = app.add_subcommand("validate", "Density-matrix diagnostics");
  add_state(validate_cmd);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      err << app.help();
      return kOk;
    }
    err << "error: " << e.what() << "\n" << app.help();
    return kUsage;
  }

  try {
    common.max_dim = max_dim_from_env();
    if (*nongauss) return cmd_nongauss(common, cutoff, !no_dense, out, err);
    if (*fds) return cmd_fds(common, dephase_flag, out, err);
    if (*verify) return cmd_verify(common, vf, out, err);
    return cmd_validate(common, out, err);
  } catch (const Failure& f) {
    return emit_failure(f, common.quiet, out, err);
  } catch (const ParseError& e) {
    return emit_failure({kParseError, e.what()}, common.quiet, out, err);
  } catch (const nlohmann::json::exception& e) {
    return emit_failure({kParseError, e.what()}, common.quiet, out, err);
  } catch (const InvalidArgument& e) {
    return emit_failure({kParseError, e.what()}, common.quiet, out, err);
  } catch (const DimensionError& e) {
    return emit_failure({kParseError, e.what()}, common.quiet, out, err);
  } catch (const TruncationError& e) {
    return emit_failure({kTruncationFailure, e.what()}, common.quiet, out, err);
  } catch (const InvalidState& e) {
    return emit_failure({kInvalidState, e.what()}, common.quiet, out, err);
  } catch (const DomainError& e) {
    return emit_failure({kInvalidState, e.what()}, common.quiet, out, err);
  } catch (const Error& e) {
    return emit_failure({kInvalidState, e.what()}, common.quiet, out, err);
  }
}

}  // namespace ngauss::cli
