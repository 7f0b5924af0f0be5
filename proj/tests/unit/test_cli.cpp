#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support/run_cli.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>

using nlohmann::json;

namespace {

json run_json(const std::string& args, int expected_status = 0) {
  const auto r = testcli::run(args);
  REQUIRE(r.status == expected_status);
  return json::parse(r.out);
}

}  // namespace

TEST_CASE("cocycle analyze") {
  const auto j = run_json("cocycle analyze --group Z4xZ4 --matrix '[[0,0],[1/4,0]]'");
  CHECK(j["schema"] == "twistfix/1");
  CHECK(j["command"] == "cocycle analyze");
  CHECK(j["passed"] == true);
  CHECK(j["symmetrizer_order"] == 1);
  CHECK(j["blocks"] == json::array({4}));
  CHECK(j["center_dim"] == 1);

  const auto triv = run_json("cocycle analyze --group Z2xZ3 --matrix '[[0,0],[0,0]]'");
  CHECK(triv["blocks"] == json::array({1, 1, 1, 1, 1, 1}));
}

TEST_CASE("cocycle input errors exit 1") {
  CHECK(testcli::run("cocycle analyze --group Z4xZ4 --matrix '[[0,0],[1/3,0]]'").status == 1);
  CHECK(testcli::run("cocycle analyze --cocycle '{\"group\": \"Z2\", \"matrix\": [[0]], \"extra\": 1}'").status == 1);
  CHECK(testcli::run("cocycle analyze --cocycle '{\"group\": '").status == 1);
  CHECK(testcli::run("cocycle analyze --cocycle /nonexistent/file.json").status == 1);
  CHECK(testcli::run("frobnicate").status == 1);
}

TEST_CASE("cocycle similar") {
  const auto j = run_json("cocycle similar --group Z4xZ4 --matrix '[[0,0],[1/4,0]]' --matrix2 '[[0,3/4],[0,0]]'");
  CHECK(j["similar"] == true);
  CHECK(j["witness_found"] == true);
  const auto k = run_json("cocycle similar --group Z4xZ4 --matrix '[[0,0],[1/4,0]]' --matrix2 '[[0,0],[1/2,0]]'");
  CHECK(k["similar"] == false);
}

TEST_CASE("twisted commands") {
  const auto d = run_json("twisted decompose --group Z3xZ3 --matrix '[[0,0],[1/3,0]]'");
  CHECK(d["blocks"] == json::array({3}));
  const auto f = run_json("twisted fixedpoints --group Z2xZ2 --matrix '[[0,0],[1/2,0]]'");
  CHECK(f["passed"] == true);
}

TEST_CASE("proper commands") {
  const auto a = run_json("proper analyze --preset dual:Z2");
  CHECK(a["saturated"] == true);
  CHECK(a["fix_blocks"] == json::array({1}));
  CHECK(a["crossed_dim"] == 4);

  const auto t = run_json("proper tensor --preset dual:Z2 --preset2 dual:Z3");
  CHECK(t["crossed_dim"] == 36);

  const auto i = run_json("proper inflate --preset swap --group Z4");
  CHECK(i["passed"] == true);
  CHECK(i["saturated"] == false);

  const auto custom = run_json(
      "proper analyze --action '{\"group\": \"Z2\", \"blocks\": [1, 1], \"action\": [[[0, 1], [1, 0]]]}'");
  CHECK(custom["passed"] == true);
  CHECK(custom["fix_blocks"] == json::array({1}));

  // A non-unitary implementing matrix is an input error.
  CHECK(testcli::run("proper analyze --action '{\"group\": \"Z2\", \"blocks\": [2], \"action\": [[[2, 0], [0, 1]]]}'")
            .status == 1);
  CHECK(testcli::run("proper analyze --preset nonsense").status == 1);
}

TEST_CASE("deform commands") {
  const auto p = run_json("deform product --N 64 --L 12 --theta 0");
  CHECK(p["passed"] == true);
  CHECK(p["equals_pointwise"] == true);

  const std::string csv = "twistfix_test_product.csv";
  CHECK(testcli::run("deform product --N 16 --L 8 --out " + csv).status == 0);
  std::ifstream in(csv);
  std::string header;
  std::getline(in, header);
  CHECK(header == "x0,x1,re,im");
  std::size_t rows = 0;
  for (std::string line; std::getline(in, line);) ++rows;
  CHECK(rows == 256);
  std::remove(csv.c_str());

  CHECK(testcli::run("deform product --N 48").status == 1);
  CHECK(testcli::run("cocycle analyze --group Z2 --matrix '[[0]]' --format csv").status == 1);
}

TEST_CASE("torus commands") {
  const auto s = run_json("torus subset --mask disk:0.2");
  CHECK(s["passed"] == true);
  const auto b = run_json("torus bundle --m 2");
  CHECK(b["chern"] == 2);
  const auto bad = testcli::run("torus bundle --m 1 --sections 1");
  CHECK(bad.status == 2);
  CHECK(json::parse(bad.out)["passed"] == false);
}

TEST_CASE("config files") {
  const std::string path = "twistfix_test_config.json";
  {
    std::ofstream out(path);
    out << R"({"group": "Z2xZ2", "matrix": "[[0,0],[1/2,0]]"})";
  }
  CHECK(testcli::run("cocycle analyze --config " + path).status == 0);
  {
    std::ofstream out(path);
    out << R"({"group": "Z2", "colour": "red"})";
  }
  CHECK(testcli::run("cocycle analyze --config " + path).status == 1);
  std::remove(path.c_str());
}

TEST_CASE("reports are deterministic") {
  const std::string args = "deform check --N 32 --L 8 --seed 7";
  const auto a = testcli::run(args);
  const auto b = testcli::run(args);
  CHECK(a.status == b.status);
  CHECK(a.out == b.out);
  CHECK(json::parse(a.out)["seed"] == 7);
}
