#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "ssgp/cli.hpp"
#include "ssgp/config.hpp"

using namespace ssgp;

namespace {

namespace fs = std::filesystem;

struct Run {
  int code;
  std::string out, err;
};

Run run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) { return fs::temp_directory_path() / ("ssgp_cli_" + name); }

std::string write(const std::string& name, const std::string& text) {
  const fs::path p = scratch(name);
  std::ofstream(p) << text;
  return p.string();
}

std::string read(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

const std::string SMALL = R"({"m": 1, "group": "full-q", "h": {"torsion_orders": [2]},
  "budget": {"max_level": 1, "enum_count": 5}, "sample_budget": 100, "rng_seed": 3})";

InstanceConfig parse(const std::string& text) { return parse_config(Json::parse(text)); }

}  // namespace

TEST_CASE("config parsing") {
  const InstanceConfig c = parse(SMALL);
  CHECK(c.inst.g.m() == 1);
  CHECK(c.inst.h.torsion == std::vector<std::int64_t>{2});
  CHECK(c.budget == Budget{1, 5});
  CHECK(c.sampling.budget == 100);
  CHECK(c.sampling.seed == 3);
  CHECK(c.sampling.bound == 12);

  const InstanceConfig w = load_config(std::string(SSGP_SOURCE_DIR) + "/configs/worked.json");
  REQUIRE(w.requests.size() == 2);
  CHECK(w.requests[0].request.kind == DenseRequest::Kind::Primes);
  CHECK(w.requests[1].request.x == w.inst.space().parse("1/3;0"));

  const InstanceConfig loc = parse(R"({"m": 2, "group": {"localized": {"residue": 1, "modulus": 4}}})");
  CHECK(loc.inst.g.kind() == WideGroup::Kind::Localized);
  CHECK(loc.inst.h.trivial());
}

TEST_CASE("config errors") {
  CHECK_THROWS_AS(parse(R"({"m": 1, "group": "full-q", "h": {"torsion_orders": [1]}})"), ConfigError);
  CHECK_THROWS_AS(parse(R"({"m": 1, "group": {"localized": {"residue": 0, "modulus": 4}}})"), ConfigError);
  CHECK_THROWS_AS(parse(R"({"m": 1, "group": {"localized": {"residue": 2, "modulus": 4}}})"), ConfigError);
  CHECK_THROWS_AS(parse(R"({"m": 0, "group": "full-q"})"), ConfigError);
  CHECK_THROWS_AS(parse(R"({"m": 1, "group": "z"})"), ConfigError);
  CHECK_THROWS_AS(parse(R"({"m": 1, "group": "full-q", "colour": 1})"), ConfigError);
  CHECK_THROWS_AS(parse(R"({"m": 1, "group": "full-q", "budget": {"enum_count": 0}})"), ConfigError);
  CHECK_THROWS_AS(parse(R"({"m": 1, "group": "full-q", "rng_seed": -1})"), ConfigError);
  CHECK_THROWS_AS(parse(R"({"m": 1, "group": "full-q", "requests": [{"kind": "ssgp", "x": "1/0"}]})"), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent.json"), ConfigError);

  const std::string bad = write("bad_torsion.json", R"({"m": 1, "group": "full-q", "h": {"torsion_orders": [1]}})");
  const Run r = run({"build", "--config", bad, "--out", scratch("unused.json").string()});
  CHECK(r.code == kUsageError);
  CHECK_FALSE(fs::exists(scratch("unused.json")));
}

TEST_CASE("usage errors and help") {
  CHECK(run({}).code == kUsageError);
  CHECK(run({"build", "--config"}).code == kUsageError);
  CHECK(run({"show", "--chain", "x", "--bogus"}).code == kUsageError);
  CHECK(run({"query", "lookup", "--chain", "x", "--element", "0"}).code == kUsageError);
  const Run h = run({"--help"});
  CHECK(h.code == kOk);
  for (const char* word : {"build", "query", "verify", "show"}) CHECK(h.out.find(word) != std::string::npos);
  const Run qh = run({"query", "--help"});
  for (const char* flag : {"--chain", "--element", "--level"}) CHECK(qh.out.find(flag) != std::string::npos);
}

TEST_CASE("worked chain queries") {
  const std::string chain = scratch("worked_chain.json").string();
  const Run b = run({"build", "--config", std::string(SSGP_SOURCE_DIR) + "/configs/worked.json", "--out", chain});
  REQUIRE(b.code == kOk);

  const Run q = run({"query", "ssgp", "--chain", chain, "--element", "1/3;0", "--level", "0"});
  CHECK(q.code == kOk);
  const Json w = Json::parse(q.out).at("witness");
  CHECK(w.at("head") == Json::array({"-1/105", "0"}));
  CHECK(w.at("parts") == Json::parse(R"([["1/5", "0"], ["1/7", "0"]])"));

  const Run m = run({"query", "member", "--chain", chain, "--element", "0;0", "--level", "0"});
  CHECK(m.code == kOk);
  CHECK(Json::parse(m.out).at("member") == true);
  const Run m5 = run({"query", "member", "--chain", chain, "--element", "1/5;0", "--level", "0"});
  CHECK(Json::parse(m5.out).at("member") == true);
  const Run m2 = run({"query", "member", "--chain", chain, "--element", "1/2;0", "--level", "0"});
  CHECK(Json::parse(m2.out).at("member") == false);

  CHECK(run({"query", "separate", "--chain", chain, "--element", "0;0"}).code == kUsageError);
  CHECK(run({"query", "separate", "--chain", chain, "--element", "1/3;0"}).code == kInsufficientBudget);
  CHECK(run({"query", "member", "--chain", chain, "--element", "0;0", "--level", "4"}).code == kInsufficientBudget);
  CHECK(run({"query", "member", "--chain", chain, "--element", "0;0"}).code == kUsageError);
  CHECK(run({"query", "member", "--chain", chain, "--element", "1/3", "--level", "0"}).code == kUsageError);
  fs::remove(chain);
}

TEST_CASE("build, verify and show a small chain") {
  const std::string config = write("small.json", SMALL);
  const std::string a = scratch("small_a.json").string(), b = scratch("small_b.json").string();
  const Run ba = run({"build", "--config", config, "--out", a});
  REQUIRE(ba.code == kOk);
  const Json summary = Json::parse(ba.out);
  CHECK(summary.at("separation_certificates") == 4);
  CHECK(summary.at("ssgp_certificates") == 10);
  REQUIRE(run({"build", "--config", config, "--out", b}).code == kOk);
  CHECK(read(a) == read(b));

  const Run v1 = run({"verify", "--chain", a, "--samples", "50", "--seed", "9"});
  const Run v2 = run({"verify", "--chain", a, "--samples", "50", "--seed", "9"});
  CHECK(v1.code == kOk);
  CHECK(v1.out == v2.out);
  CHECK(Json::parse(v1.out).at("ok") == true);
  CHECK(v1.err.find("timings") != std::string::npos);

  const Run s = run({"show", "--chain", a});
  CHECK(s.code == kOk);
  CHECK(Json::parse(s.out).at("conditions").size() == summary.at("chain_length"));

  // A deleted atom must surface as a failed check, either on load or in the report.
  Json j = Json::parse(read(a));
  Json& top = j.at("conditions").back().at("u").back().at("atoms");
  REQUIRE(top.size() >= 2);
  top.erase(top.size() - 1);
  const std::string broken = write("small_broken.json", j.dump());
  CHECK(run({"verify", "--chain", broken}).code == kCheckFailure);

  write("small_garbage.json", "{ not json");
  CHECK(run({"show", "--chain", scratch("small_garbage.json").string()}).code == kUsageError);
  for (const auto& p : {a, b, config, broken}) fs::remove(p);
  fs::remove(scratch("small_garbage.json"));
}
