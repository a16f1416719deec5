#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
  int code = -1;
  std::string out, err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / ("concentra_cli_" + std::to_string(::getpid()));
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string configs(const std::string& name) { return std::string(std::getenv("CONCENTRA_CONFIGS")) + "/" + name; }

Run run(const std::string& args, const std::string& env = "") {
  static int counter = 0;
  const fs::path o = scratch() / ("stdout" + std::to_string(counter));
  const fs::path e = scratch() / ("stderr" + std::to_string(counter++));
  const std::string cmd =
      env + " '" + std::getenv("CONCENTRA_BIN") + "' " + args + " >'" + o.string() + "' 2>'" + e.string() + "'";
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(o);
  r.err = slurp(e);
  return r;
}

fs::path only_file(const fs::path& dir, const std::string& ext) {
  fs::path found;
  int n = 0;
  for (const auto& f : fs::directory_iterator(dir))
    if (f.path().extension() == ext) {
      found = f.path();
      ++n;
    }
  REQUIRE(n == 1);
  return found;
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(slurp(p));
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> row;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) row.push_back(cell);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

TEST_CASE("environment") {
  REQUIRE(std::getenv("CONCENTRA_BIN") != nullptr);
  REQUIRE(std::getenv("CONCENTRA_CONFIGS") != nullptr);
}

TEST_CASE("identities report") {
  const fs::path out = scratch() / "ident";
  const Run r = run("identities --N 7 --out '" + out.string() + "'");
  CHECK(r.code == 0);
  CHECK(r.out.find("identities: pass") != std::string::npos);
  const json j = json::parse(slurp(only_file(out, ".json")));
  CHECK(j["subcommand"] == "identities");
  CHECK(j["pass"] == true);
  CHECK(j["checks"].size() >= 6);
  for (const auto& c : j["checks"]) CHECK(c["value"].get<double>() <= c["tol"].get<double>());
  // defaults filled in
  CHECK(j["config"]["expansion"]["order"] == 1);
  CHECK(j["config"]["expansion"]["gamma"] == 0.75);
  CHECK(j["config"]["grid"] == 128);
  CHECK(j["config"].contains("seed"));

  // a second run into the same directory rewrites identical bytes
  const std::string first_json = slurp(only_file(out, ".json"));
  const std::string first_csv = slurp(only_file(out, ".csv"));
  CHECK(run("identities --N 7 --out '" + out.string() + "'").code == 0);
  CHECK(slurp(only_file(out, ".json")) == first_json);
  CHECK(slurp(only_file(out, ".csv")) == first_csv);
}

TEST_CASE("mu0 on a config file and on flat data") {
  const fs::path out = scratch() / "mu0";
  const Run r = run("mu0 --config '" + configs("minimal.conf") + "' --out '" + out.string() + "'");
  CHECK(r.code == 0);
  const auto rows = read_csv(only_file(out, ".csv"));
  REQUIRE(rows.size() > 2);
  CHECK(rows[0] == std::vector<std::string>{"y", "hbar", "positivity", "mu0"});
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(std::stod(rows[i][1]) == doctest::Approx(8.0).epsilon(1e-12));

  const Run f = run("mu0 --geometry 'flat(8)' --out '" + (scratch() / "flat").string() + "'");
  CHECK(f.code == 4);
  const json e = json::parse(f.err);
  CHECK(e["error"]["kind"] == "positivity");
  CHECK(e["error"]["exit_code"] == 4);

  const Run fj = run("mu0 --config '" + configs("flat.json") + "' --out '" + (scratch() / "flat2").string() + "'");
  CHECK(fj.code == 4);
}

TEST_CASE("gaps json and csv agree") {
  const fs::path out = scratch() / "gaps";
  const Run r = run("gaps --levels 6..12 --out '" + out.string() + "'");
  CHECK(r.code == 0);
  const json j = json::parse(slurp(only_file(out, ".json")));
  const auto& levels = j["payload"]["levels"];
  REQUIRE(levels.size() == 7);
  const auto rows = read_csv(only_file(out, ".csv"));
  REQUIRE(rows.size() == 8);
  CHECK(rows[0][0] == "l");
  for (int i = 0; i < 7; ++i) {
    CHECK(levels[i]["l"] == 6 + i);
    CHECK(std::stoi(rows[i + 1][0]) == levels[i]["l"].get<int>());
    CHECK(std::stod(rows[i + 1][1]) == levels[i]["sigma_l"].get<double>());
    CHECK(std::stod(rows[i + 1][2]) == levels[i]["eps_l"].get<double>());
    CHECK(std::stod(rows[i + 1][3]) == levels[i]["gap"].get<double>());
    CHECK(levels[i]["crossings"].size() > 0);
  }
}

TEST_CASE("spectrum csv layout") {
  const fs::path out = scratch() / "spec";
  const Run r = run("spectrum --levels 6..8 --out '" + out.string() + "'");
  CHECK(r.code == 0);
  const auto rows = read_csv(only_file(out, ".csv"));
  REQUIRE(rows.size() > 1);
  CHECK(rows[0] == std::vector<std::string>{"sigma", "j", "lambda"});
  CHECK(rows[1].size() == 3);
}

TEST_CASE("validation and parse errors exit with code 2") {
  const Run n5 = run("identities --N 5 --out '" + (scratch() / "n5").string() + "'");
  CHECK(n5.code == 2);
  CHECK(n5.err.find("N") != std::string::npos);
  CHECK(json::parse(n5.err)["error"]["kind"] == "validation");

  const Run g = run("expand --config '" + configs("bad_gamma.conf") + "' --out '" + (scratch() / "g").string() + "'");
  CHECK(g.code == 2);
  CHECK(g.err.find("gamma") != std::string::npos);

  const fs::path bad = scratch() / "bad.conf";
  std::ofstream(bad) << "N = 7\nthis is wrong\n";
  const Run p = run("identities --config '" + bad.string() + "'");
  CHECK(p.code == 2);
  const json e = json::parse(p.err);
  CHECK(e["error"]["kind"] == "parse");
  CHECK(e["error"]["message"].get<std::string>().find("line 2") != std::string::npos);

  CHECK(run("no-such-command").code == 2);
}

TEST_CASE("output directory from the environment") {
  const fs::path out = scratch() / "env_out";
  const Run r = run("constants --N 7", "CONCENTRA_OUT='" + out.string() + "'");
  CHECK(r.code == 0);
  const json j = json::parse(slurp(only_file(out, ".json")));
  CHECK(j["subcommand"] == "constants");
  CHECK(j["payload"]["lambda0"].get<double>() > 0.0);
}

TEST_CASE("a failed check reaches the summary and the exit code") {
  const fs::path out = scratch() / "quick";
  const Run r = run("expand --config '" + configs("quick_expand.conf") + "' --out '" + out.string() + "'");
  const json j = json::parse(slurp(only_file(out, ".json")));
  bool any_failed = false;
  for (const auto& c : j["checks"]) any_failed = any_failed || !c["pass"].get<bool>();
  CHECK(j["pass"].get<bool>() == !any_failed);
  CHECK(r.code == (any_failed ? 3 : 0));
  if (any_failed) CHECK(r.out.find("expand: fail") != std::string::npos);
}

TEST_CASE("cleanup") { fs::remove_all(scratch()); }
