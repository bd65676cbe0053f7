#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "doctest.h"
#include "towerforge/errors.hpp"
#include "towerforge/run.hpp"

using namespace towerforge;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int status = -1;
  std::string out;
};

Outcome cli(const std::string& args) {
  const std::string cmd = std::string(TOWERFORGE_CLI_PATH) + " " + args + " 2>/dev/null";
  Outcome o;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) o.out.append(buf, n);
  int raw = pclose(pipe);
  o.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return o;
}

std::string fixture(const std::string& rel) { return std::string(TOWERFORGE_FIXTURE_DIR) + "/" + rel; }

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / "towerforge_test_cli";
  fs::create_directories(dir);
  return dir / name;
}

const Json* find_result(const Json& report, const std::string& suite) {
  for (const auto& r : report["results"])
    if (r["suite"] == suite) return &r;
  return nullptr;
}

}  // namespace

TEST_CASE("subgroups reports 35 for p = 2, n = 2") {
  auto o = cli("subgroups --p 2 --n 2");
  REQUIRE(o.status == 0);
  auto j = Json::parse(o.out);
  auto r = find_result(j, "subgroups");
  REQUIRE(r);
  CHECK((*r)["data"]["count"] == 35);
  CHECK((*r)["data"]["enumerated"] == 35);
  CHECK((*r)["verdict"] == "pass");
}

TEST_CASE("ring-dichotomy on the cubic fixture takes the Frattini branch") {
  auto o = cli("ring-dichotomy --input " + fixture("rings/cubic_to_square_p2.json"));
  REQUIRE(o.status == 0);
  auto j = Json::parse(o.out);
  auto r = find_result(j, "ring-dichotomy");
  REQUIRE(r);
  CHECK((*r)["data"]["branch"] == "frattini");
}

TEST_CASE("ring-dichotomy on a square-zero fixture") {
  auto o = cli("ring-dichotomy --input " + fixture("rings/square_zero_p3.json"));
  REQUIRE(o.status == 0);
  auto j = Json::parse(o.out);
  auto r = find_result(j, "ring-dichotomy");
  REQUIRE(r);
  CHECK((*r)["data"]["branch"] == "square-zero");
  CHECK((*r)["data"]["iso_verified"] == true);
}

TEST_CASE("lift-search reports an exhausted search with a certificate") {
  auto o = cli("lift-search --input " + fixture("rings/cubic_to_square_p2.json"));
  REQUIRE(o.status == 0);
  auto j = Json::parse(o.out);
  auto r = find_result(j, "lift-search");
  REQUIRE(r);
  CHECK((*r)["data"]["found"] == false);
  CHECK((*r)["data"]["search_space"] == 256);
  CHECK((*r)["data"]["examined"] == 256);
  CHECK((*r)["data"]["certificate"]["gamma_S_order"] == 256);
}

TEST_CASE("every command is reachable with its defaults") {
  for (const auto& name : command_names()) {
    if (name == "verify-all") continue;
    CAPTURE(name);
    auto o = cli(name);
    CHECK(o.status == 0);
    auto j = Json::parse(o.out);
    CHECK(j["command"] == name);
    CHECK(!j["results"].empty());
  }
}

TEST_CASE("verify-all passes and is byte-identical for the same seed") {
  auto a = scratch("a.json"), b = scratch("b.json");
  auto o1 = cli("verify-all --seed 7 --output " + a.string());
  auto o2 = cli("verify-all --seed 7 --output " + b.string());
  CHECK(o1.status == 0);
  CHECK(o2.status == 0);
  const std::string ja = slurp(a.string()), jb = slurp(b.string());
  CHECK(!ja.empty());
  CHECK(ja == jb);
  CHECK(slurp(scratch("a.txt").string()) == slurp(scratch("b.txt").string()));
  auto j = Json::parse(ja);
  CHECK(j["summary"]["failed"] == 0);
  std::set<std::string> suites;
  for (const auto& r : j["results"]) suites.insert(r["suite"].get<std::string>());
  for (const char* s : {"subgroups", "congruence-plans", "wedge-check", "projectors", "filtration", "ring-dichotomy",
                        "frattini-identity", "ring-split", "lift-search", "property-p"})
    CHECK(suites.count(s) == 1);
}

TEST_CASE("different seeds change sampled checks only") {
  auto a = Json::parse(cli("congruence-plans --p 3 --n 1 --seed 1").out);
  auto b = Json::parse(cli("congruence-plans --p 3 --n 1 --seed 2").out);
  CHECK(a["config"]["seed"] == 1);
  CHECK(b["config"]["seed"] == 2);
  CHECK(a["results"][0] == b["results"][0]);
}

TEST_CASE("timing is opt-in") {
  auto plain = Json::parse(cli("subgroups").out);
  CHECK_FALSE(plain["results"][0].contains("millis"));
  auto timed = Json::parse(cli("subgroups --timing").out);
  CHECK(timed["results"][0].contains("millis"));
}

TEST_CASE("exit codes") {
  CHECK(cli("no-such-command").status == 2);
  CHECK(cli("subgroups --p 4").status == 2);
  CHECK(cli("subgroups --p 3 --n 3 --guard-max 10").status == 3);
  CHECK(cli("ring-split --input /nonexistent/file.json").status == 2);

  auto bad = scratch("bad.json");
  std::ofstream(bad) << "{ not json";
  CHECK(cli("ring-split --input " + bad.string()).status == 2);

  // A fixture whose recorded expectation is wrong is a verification failure.
  auto j = read_json_file(fixture("rings/cubic_to_square_p2.json"));
  j["expect"]["branch"] = "square-zero";
  auto wrong = scratch("wrong.json");
  std::ofstream(wrong) << j.dump();
  CHECK(cli("ring-dichotomy --input " + wrong.string()).status == 1);

  // Not a ring homomorphism.
  j = read_json_file(fixture("rings/cubic_to_square_p2.json"));
  j["images"][1] = {1, 1};
  auto nothom = scratch("nothom.json");
  std::ofstream(nothom) << j.dump();
  CHECK(cli("ring-split --input " + nothom.string()).status == 2);

  CHECK(cli("subgroups --output /nonexistent/dir/report.json").status == 2);
}

TEST_CASE("property-p accepts tuples and JSON lists") {
  auto o = Json::parse(cli("property-p --e 2 --q 17 --n 4").out);
  REQUIRE(o["results"].size() == 1);
  CHECK(o["results"][0]["data"]["criterion"] == "holds");
  o = Json::parse(cli("property-p --e 2 --q 5 --n 4").out);
  CHECK(o["results"][0]["data"]["criterion"] == "fails");
  o = Json::parse(cli("property-p --e 2 --q 4 --tame false").out);
  CHECK(o["results"][0]["data"]["criterion"] == "does-not-apply");
  CHECK(o["results"][0]["data"]["property_p"] == false);

  auto list = scratch("pp.json");
  std::ofstream(list) << R"([{"e": 3, "q": 7}, {"e": 3, "q": 5}, {"e": 1, "q": 8}])";
  o = Json::parse(cli("property-p --p 2 --input " + list.string()).out);
  REQUIRE(o["results"].size() == 3);
  CHECK(o["results"][0]["data"]["property_p"] == true);
  CHECK(o["results"][0]["data"]["base_change"]["residue_degree"] == 2);
  CHECK(o["results"][1]["data"]["property_p"] == false);
  CHECK(o["results"][2]["data"]["property_p"] == true);
  CHECK(cli("property-p --e 3").status == 2);
}

TEST_CASE("projectors over a named group and from a module file") {
  auto o = Json::parse(cli("projectors --group symmetric:3 --p 5").out);
  REQUIRE(o["results"].size() == 1);
  CHECK(o["results"][0]["verdict"] == "pass");
  CHECK(o["results"][0]["data"]["simples"].size() == 3);
  CHECK(cli("projectors --group symmetric:3 --p 3").status == 2);

  auto m = scratch("module.json");
  std::ofstream(m) << R"({"p": 3, "group": "cyclic:2", "action": [[[0, 1], [1, 0]]]})";
  o = Json::parse(cli("projectors --input " + m.string()).out);
  REQUIRE(o["results"].size() == 1);
  CHECK(o["results"][0]["data"]["simples"].size() == 2);
}

TEST_CASE("filtration on a shipped action") {
  auto o = Json::parse(cli("filtration --input " + fixture("actions/z3_on_v4_p2.json")).out);
  REQUIRE(o["results"].size() == 2);
  CHECK(o["results"][0]["data"]["kernel_dims"] == Json::array({2}));
  CHECK(o["results"][1]["data"]["modules"]["socle_hull_dim"] == 12);
}

TEST_CASE("emit_report on empty and single results") {
  Report empty;
  empty.command = "subgroups";
  auto j = report_to_json(empty);
  CHECK(j["schema"] == "towerforge-report");
  CHECK(j["schema_version"] == kReportSchemaVersion);
  CHECK(j["results"].empty());
  CHECK(j["summary"]["total"] == 0);
  CHECK(exit_status(empty) == 0);

  Report one = empty;
  Verdict v;
  v.suite = "s";
  v.lemma = "l";
  v.instance = "i";
  v.pass = false;
  one.results.push_back(v);
  auto path = scratch("one.json");
  emit_report(one, path.string());
  auto back = Json::parse(slurp(path.string()));
  REQUIRE(back["results"].size() == 1);
  CHECK(back["results"][0]["verdict"] == "fail");
  CHECK(exit_status(one) == 1);
  CHECK(slurp(scratch("one.txt").string()).find("[FAIL] i") != std::string::npos);
  CHECK_THROWS_AS(emit_report(one, "/nonexistent/dir/x.json"), std::runtime_error);
}

TEST_CASE("command names round-trip") {
  for (const auto& name : command_names()) CHECK(to_string(parse_command(name)) == name);
  CHECK_THROWS_AS(parse_command("bogus"), ParseError);
}
