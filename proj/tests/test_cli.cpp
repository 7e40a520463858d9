#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ngauss/cli.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
  json report() const { return json::parse(out); }
};

Run run(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = ngauss::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string write_state(const std::string& name, const std::string& body) {
  const fs::path dir = fs::temp_directory_path() / "ngauss_cli_test";
  fs::create_directories(dir);
  const fs::path path = dir / name;
  std::ofstream(path) << body;
  return path.string();
}

const json& find_check(const json& rep, const std::string& name) {
  for (const auto& c : rep["checks"]) {
    if (c["name"] == name) return c;
  }
  throw std::runtime_error("missing check " + name);
}

}  // namespace

TEST_CASE("nongauss") {
  const std::string f1 = write_state("fock1.json", R"({"kind":"named","name":"fock","params":{"n":1}})");
  const Run r = run({"nongauss", f1});
  REQUIRE(r.code == 0);
  const json rep = r.report();
  CHECK(rep["tool"] == "ngauss");
  CHECK(rep["command"] == "nongauss");
  CHECK(rep["input"]["digest"].get<std::string>().rfind("sha256:", 0) == 0);
  CHECK(rep["results"]["delta_S"].get<double>() == doctest::Approx(2 * std::log(2.0)).epsilon(1e-6));
  CHECK(find_check(rep, "relative_entropy_identity")["pass"] == true);
  CHECK(rep["tolerances"].contains("identity"));
  CHECK(r.err.find("delta_S") != std::string::npos);

  const std::string t1 = write_state("thermal1.json", R"({"kind":"named","name":"thermal","params":{"nbar":1}})");
  CHECK(std::abs(run({"nongauss", t1}).report()["results"]["delta_S"].get<double>()) < 1e-6);

  const std::string h = write_state("half.json", R"({"kind":"fock_diagonal","cutoffs":[30],"lambda":[0.5,0.5,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0]})");
  CHECK(run({"nongauss", h}).report()["results"]["delta_S"].get<double>() == doctest::Approx(0.261624).epsilon(1e-6));

  const Run q = run({"--quiet", "nongauss", f1, "--cutoff", "20"});
  CHECK(q.code == 0);
  CHECK(q.err.empty());
  CHECK(q.report()["input"]["cutoffs"][0] == 20);
  CHECK(run({"nongauss", "--quiet", f1}).err.empty());
}

TEST_CASE("fds") {
  const std::string two = write_state("bell.json", R"({"kind":"fock_diagonal","cutoffs":[2,2],"lambda":[0.5,0,0,0.5]})");
  const json rep = run({"fds", two}).report();
  CHECK(rep["results"]["nongauss_fds"].get<double>() == doctest::Approx(1.216396).epsilon(1e-6));
  CHECK(rep["results"]["nongauss_product"].get<double>() == doctest::Approx(0.523248).epsilon(1e-6));
  CHECK(rep["results"]["total_mutual_information"].get<double>() == doctest::Approx(0.693147).epsilon(1e-6));
  CHECK(rep["results"]["marginal_means"] == json::array({0.5, 0.5}));
  CHECK(find_check(rep, "corollary3_residual")["pass"] == true);

  const std::string prod = write_state("prod.json", R"({"kind":"fock_diagonal","cutoffs":[2,2],"lambda":[0.25,0.25,0.25,0.25]})");
  CHECK(std::abs(run({"fds", prod}).report()["results"]["total_mutual_information"].get<double>()) < 1e-15);

  const std::string sup = write_state("sup.json", R"({"kind":"named","name":"superposition_01","params":{"cutoff":4}})");
  CHECK(run({"fds", sup}).code == ngauss::cli::kWrongKind);
  const json d = run({"fds", sup, "--dephase"}).report();
  CHECK(d["results"]["lambda"][0].get<double>() == doctest::Approx(0.5));
  CHECK(d["results"]["lambda"][1].get<double>() == doctest::Approx(0.5));

  const std::string dense = write_state("dense.json", R"({"kind":"dense","cutoffs":[2],"matrix":[[1,0],[0,0],[0,0],[0,0]]})");
  CHECK(run({"fds", dense}).code == ngauss::cli::kWrongKind);
  CHECK(run({"fds", dense, "--dephase"}).code == 0);

  const std::string thermal = write_state("thermal_fds.json", R"({"kind":"named","name":"thermal","params":{"nbar":0.5}})");
  CHECK(run({"fds", thermal}).code == 0);
}

TEST_CASE("verify") {
  const std::string f1 = write_state("fock1.json", R"({"kind":"named","name":"fock","params":{"n":1}})");
  const Run r = run({"-q", "verify", f1, "--seed", "3"});
  CHECK(r.code == 0);
  const json rep = r.report();
  CHECK(rep["seed"] == 3);
  CHECK(rep["pass"] == true);
  const json& best = rep["results"]["closest_gaussian"]["best"];
  CHECK(std::abs(best["nbar"].get<double>() - 1.0) < 0.01);
  CHECK(best["r"].get<double>() < 0.01);
  CHECK(rep["results"]["theorem1_identity"].size() == 5);

  const std::string t1 = write_state("thermal1.json", R"({"kind":"named","name":"thermal","params":{"nbar":1}})");
  const json t = run({"-q", "verify", t1, "--grid", "11"}).report();
  CHECK(t["pass"] == true);
  CHECK(std::abs(t["results"]["closest_gaussian"]["gap"].get<double>()) < 1e-6);

  const std::string two = write_state("bell3.json", R"({"kind":"fock_diagonal","cutoffs":[3,3],"lambda":[0.5,0,0,0,0.5,0,0,0,0]})");
  const json tw = run({"-q", "verify", two, "--references", "0"}).report();
  CHECK(tw["results"]["closest_gaussian"].contains("skipped"));

  const std::string bad = write_state("corrupt.json", R"({"kind":"dense","cutoffs":[2],"matrix":[[0.7,0],[0.5,0],[0.5,0],[0.7,0]]})");
  CHECK(run({"-q", "verify", bad}).code == ngauss::cli::kInvalidState);
}

TEST_CASE("validate") {
  const std::string ok = write_state("vac.json", R"({"kind":"dense","cutoffs":[2],"matrix":[[1,0],[0,0],[0,0],[0,0]]})");
  const Run r = run({"validate", ok});
  CHECK(r.code == 0);
  CHECK(r.report()["results"]["pass"] == true);
  const std::string herm = write_state("herm.json", R"({"kind":"dense","cutoffs":[2],"matrix":[[1,0],[0.001,0],[0,0],[0,0]]})");
  const Run h = run({"validate", herm});
  CHECK(h.code == ngauss::cli::kInvalidState);
  CHECK(h.report()["results"]["hermiticity_residual"]["value"].get<double>() == doctest::Approx(1e-3));
}

TEST_CASE("exit codes") {
  CHECK(run({}).code == ngauss::cli::kUsage);
  CHECK(run({"frobnicate"}).code == ngauss::cli::kUsage);
  CHECK(run({"nongauss"}).code == ngauss::cli::kUsage);
  CHECK(run({"verify", "x.json", "--grid", "banana"}).code == ngauss::cli::kUsage);

  CHECK(run({"nongauss", "/nonexistent/state.json"}).code == ngauss::cli::kParseError);
  const std::string garbage = write_state("garbage.json", "{not json");
  const Run g = run({"nongauss", garbage});
  CHECK(g.code == ngauss::cli::kParseError);
  CHECK(g.report()["exit_code"] == 2);

  const std::string neg = write_state("neg.json", R"({"kind":"dense","cutoffs":[2],"matrix":[[1.1,0],[0,0],[0,0],[-0.1,0]]})");
  CHECK(run({"nongauss", neg}).code == ngauss::cli::kInvalidState);
  const std::string lam = write_state("lam.json", R"({"kind":"fock_diagonal","cutoffs":[2],"lambda":[0.7,0.7]})");
  CHECK(run({"fds", lam}).code == ngauss::cli::kInvalidState);

  const std::string hot = write_state("hot.json", R"({"kind":"named","name":"thermal","params":{"nbar":3,"cutoff":8}})");
  CHECK(run({"nongauss", hot}).code == ngauss::cli::kTruncationFailure);
  CHECK(run({"validate", hot}).code == ngauss::cli::kTruncationFailure);

  const std::string big = write_state("big.json", R"({"kind":"named","name":"product","params":{"factors":[{"name":"fock","params":{"n":1}},{"name":"fock","params":{"n":1}}]}})");
  CHECK(run({"nongauss", big, "--cutoff", "12"}).code == ngauss::cli::kOk);
  setenv("NONGAUSS_MAX_DIM", "100", 1);
  CHECK(run({"nongauss", big, "--cutoff", "12"}).code == ngauss::cli::kParseError);
  setenv("NONGAUSS_MAX_DIM", "zero", 1);
  CHECK(run({"nongauss", big, "--cutoff", "12"}).code == ngauss::cli::kUsage);
  unsetenv("NONGAUSS_MAX_DIM");
}

TEST_CASE("reports are reproducible") {
  const std::string sup = write_state("sup.json", R"({"kind":"named","name":"superposition_01","params":{"cutoff":6}})");
  for (const auto& args : std::vector<std::vector<std::string>>{{"-q", "nongauss", sup},
                                                                {"-q", "fds", sup, "--dephase"},
                                                                {"-q", "verify", sup, "--seed", "5", "--grid", "9"}}) {
    const Run a = run(args);
    const Run b = run(args);
    CHECK(a.code == b.code);
    CHECK(a.out == b.out);
  }
  // The input digest tracks the bytes of the file.
  const std::string sup2 = write_state("sup2.json", R"({"kind":"named","name":"superposition_01","params":{"cutoff":6} })");
  CHECK(run({"-q", "nongauss", sup}).report()["input"]["digest"] != run({"-q", "nongauss", sup2}).report()["input"]["digest"]);
}

TEST_CASE("installed binary") {
  const std::string f1 = write_state("fock1.json", R"({"kind":"named","name":"fock","params":{"n":1}})");
  const std::string cmd = std::string(NGAUSS_CLI_PATH) + " -q nongauss " + f1 + " > /dev/null";
  CHECK(std::system(cmd.c_str()) == 0);
  const std::string bad = std::string(NGAUSS_CLI_PATH) + " -q fds " +
                          write_state("sup.json", R"({"kind":"named","name":"superposition_01","params":{"cutoff":4}})") +
                          " > /dev/null";
  CHECK(WEXITSTATUS(std::system(bad.c_str())) == ngauss::cli::kWrongKind);
}
