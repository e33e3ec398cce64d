#include <doctest.h>

#include "approx.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cli.hpp"

namespace fs = std::filesystem;
using casimir::cli::run;

namespace {

struct Outcome {
  int code;
  std::string out, err;
};

Outcome call(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path data_dir() {
  const char* d = std::getenv("CASIMIR_TEST_DATA");
  return d ? fs::path(d) : fs::path("tests/data");
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("config hash") {
  CHECK(casimir::cli::fnv1a64("") == "cbf29ce484222325");
  CHECK(casimir::cli::fnv1a64("a") == "af63dc4c8601ec8c");
}

TEST_CASE("compute: vacuum film gives exact zeros") {
  TempDir dir("casimir_cli_vac");
  const auto r = call({"compute", "--film", "vacuum", "--a", "50", "-o", (dir.path / "v.json").string(), "--format",
                       "json"});
  REQUIRE(r.code == 0);
  const auto doc = nlohmann::json::parse(slurp(dir.path / "v.json"));
  for (const auto& row : doc["rows"]) CHECK(row[3].get<double>() == 0.0);
  CHECK(r.out.find("-0.0") == std::string::npos);
}

TEST_CASE("exit codes") {
  auto r = call({"compute", "--film", "Ni", "--a", "-5"});
  CHECK(r.code == 2);
  CHECK(r.err.find("thickness must be positive") != std::string::npos);

  CHECK(call({"compute", "--film", "Ni"}).code == 2);
  CHECK(call({"compute", "--film", "Unobtainium", "--a", "50"}).code == 2);
  CHECK(call({"compute", "--film", "Ni", "--a", "50", "--model", "lorentz"}).code == 2);
  CHECK(call({"scan", "--film", "Ni", "--a-min", "100", "--a-max", "100"}).code == 2);
  CHECK(call({"scan", "--film", "Ni", "--points", "1"}).code == 2);
  CHECK(call({"frobnicate"}).code == 2);
  CHECK(call({"compute", "--help"}).code == 0);

  r = call({"crossing", "--film", "Ni", "--a-min", "40", "--a-max", "200", "--points", "6"});
  CHECK(r.code == 4);
  CHECK(r.err.find("no crossing") != std::string::npos);

  r = call({"compute", "--film", "Ni", "--a", "30", "--max-terms", "3"});
  CHECK(r.code == 3);
}

TEST_CASE("crossing with a bracket") {
  const auto r = call({"crossing", "--plate1", "Cu", "--film", "Ni", "--bracket", "60,150", "--tol", "0.05"});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("changes sign at a = ") != std::string::npos);
}

TEST_CASE("materials list and show") {
  auto r = call({"materials", "list"});
  REQUIRE(r.code == 0);
  for (const char* name : {"Ni", "Fe", "Cu", "Al", "Pt", "sapphire", "vacuum", "Ni_tab"})
    CHECK(r.out.find(name) != std::string::npos);

  r = call({"materials", "show", "Ni"});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("omega_p = 4.89 eV") != std::string::npos);
  CHECK(r.out.find("gamma = 0.0436 eV") != std::string::npos);
  CHECK(r.out.find("mu = 110") != std::string::npos);
  CHECK(call({"materials", "show", "Unobtainium"}).code == 2);
}

TEST_CASE("materials import") {
  TempDir dir("casimir_cli_import");
  const std::string reg = (dir.path / "materials.json").string();
  const std::string table = (data_dir() / "lorentz.csv").string();

  auto r = call({"materials", "import", (data_dir() / "malformed.csv").string(), "--name", "Bad", "--tail", "drude",
                 "--from", "Ni", "--registry", reg});
  CHECK(r.code == 2);
  CHECK(r.err.find("line 3") != std::string::npos);
  CHECK_FALSE(fs::exists(reg));

  CHECK(call({"materials", "import", table, "--name", "Half", "--tail", "drude", "--registry", reg}).code == 2);

  r = call({"materials", "import", table, "--name", "Mine", "--tail", "drude", "--plasma-frequency", "5",
            "--relaxation", "0.05", "--mu", "3", "--registry", reg});
  REQUIRE(r.code == 0);
  r = call({"materials", "show", "Mine", "--registry", reg});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("mu = 3") != std::string::npos);
  CHECK(r.out.find("5 rows") != std::string::npos);

  // the imported entry is usable and embedded in the output config
  const std::string out = (dir.path / "mine.csv").string();
  r = call({"compute", "--film", "Mine", "--a", "80", "--registry", reg, "-o", out});
  REQUIRE(r.code == 0);
  CHECK(slurp(out).find("\"Mine\":{\"kind\":\"tabulated_with_drude_tail\"") != std::string::npos);
}

TEST_CASE("outputs reproduce byte for byte from their embedded config") {
  TempDir dir("casimir_cli_repro");
  const auto p = [&](const char* n) { return (dir.path / n).string(); };

  REQUIRE(call({"scan", "--plate1", "Cu", "--film", "Ni", "--points", "4", "--a-min", "40", "--a-max", "120", "-o",
                p("a.csv")})
              .code == 0);
  REQUIRE(call({"scan", "--plate1", "Cu", "--film", "Ni", "--points", "4", "--a-min", "40", "--a-max", "120", "-o",
                p("b.csv")})
              .code == 0);
  REQUIRE(call({"scan", "--config", p("a.csv"), "-o", p("c.csv")}).code == 0);
  const std::string a = slurp(p("a.csv"));
  CHECK(a == slurp(p("b.csv")));
  CHECK(a == slurp(p("c.csv")));
  CHECK(a.rfind("# casimir-film scan\n# config: {", 0) == 0);
  CHECK(a.find("# config_hash: fnv1a64:") != std::string::npos);
  CHECK(a.find("\na_nm,") != std::string::npos);

  REQUIRE(call({"compare", "--film", "Ni", "--plate1", "sapphire", "--plate3", "sapphire", "--a", "60", "--format",
                "json", "-o", p("d.json")})
              .code == 0);
  REQUIRE(call({"compare", "--config", p("d.json"), "-o", p("e.json")}).code == 0);
  CHECK(slurp(p("d.json")) == slurp(p("e.json")));
  const auto doc = nlohmann::json::parse(slurp(p("d.json")));
  CHECK(doc["config"]["film"] == "Ni");
  CHECK(doc["config_hash"].get<std::string>() == "fnv1a64:" + casimir::cli::fnv1a64(doc["config"].dump()));

  // flags override the embedded config
  REQUIRE(call({"scan", "--config", p("a.csv"), "--points", "3", "-o", p("f.csv")}).code == 0);
  CHECK(slurp(p("f.csv")).find("\"points\":3") != std::string::npos);

  // stdout and file outputs agree
  const auto r = call({"scan", "--config", p("a.csv")});
  CHECK(r.out == a);
}
