#include <cstdio>
#include <filesystem>

#include "doctest.h"
#include "ssgp/driver.hpp"

using namespace ssgp;

namespace {

const Instance INST{WideGroup::full_q(1), HSpec{0, {2}}};
const KSpace KS = INST.space();
const SampleConfig CFG{200, 0, 12};

KElem el(const char* s) { return KS.parse(s); }

std::vector<ScheduledRequest> worked_requests() {
  return {{DenseRequest::make_primes(PrimeSet{3}), 0}, {DenseRequest::make_ssgp(el("1/3;0")), 0}};
}

const FilterChain& small_chain() {
  static const FilterChain c = build_chain(INST, Budget{1, 9}, CFG);
  return c;
}

void expect_clean(const Report& r) {
  for (const auto& c : r.checks) CHECK_MESSAGE(c.pass, c.name << ": " << c.detail);
}

}  // namespace

TEST_CASE("single zero request") {
  const FilterChain c = build_chain(INST, Budget{0, 1}, CFG);
  CHECK(c.conditions.size() == 1);
  REQUIRE(c.met.size() == 1);
  const SSGPWitness w = ssgp_certificate(c, KS.zero(), 0);
  CHECK(w.head == KS.zero());
  CHECK(w.parts.empty());
  expect_clean(verify_chain(c, CFG));
}

TEST_CASE("worked chain") {
  const FilterChain c = build_chain(INST, Budget{0, 1}, CFG, worked_requests());
  REQUIRE(c.conditions.size() == 3);
  CHECK(c.conditions[1].pi == PrimeSet{3});
  CHECK(c.conditions[2].pi == PrimeSet({3, 5, 7}));
  const SSGPWitness w = ssgp_certificate(c, el("1/3;0"), 0);
  CHECK(w.head == el("-1/105;0"));
  CHECK(w.parts == std::vector<KElem>{el("1/5;0"), el("1/7;0")});
  const SymSet u0 = stage_set(c, 0);
  CHECK(member(KS, el("1/5;0"), u0));
  CHECK(member(KS, el("-1/105;0"), u0));
  CHECK(member(KS, el("7;0"), u0));
  CHECK_FALSE(member(KS, el("1/2;0"), u0));
  expect_clean(verify_chain(c, CFG));
}

TEST_CASE("separation and ssgp certificates on a small chain") {
  const FilterChain& c = small_chain();
  // Avoidance steps may deepen the chain past the requested levels.
  CHECK(c.max_level() >= 1);
  for (std::size_t i = 0; i <= c.max_level(); ++i) CHECK(member(KS, KS.zero(), stage_set(c, i)));
  for (const auto& x : enumerate_prefix(INST, 9)) {
    if (!KS.is_zero(x)) {
      const std::size_t n = separation_certificate(c, x);
      CHECK_FALSE(member(KS, x, stage_set(c, n)));
    }
    for (std::size_t i = 0; i <= 1; ++i) {
      const SSGPWitness w = ssgp_certificate(c, x, i);
      CHECK(witness_identity(KS, w));
      CHECK(w.target == x);
    }
  }
  CHECK(separation_certificate(c, el("-1/2;0")) <= c.max_level());
  CHECK_THROWS_AS(separation_certificate(c, KS.zero()), QueryError);
  CHECK_THROWS_AS(separation_certificate(c, el("1/11;0")), InsufficientBudget);
  CHECK_THROWS_AS(ssgp_certificate(c, el("1/11;0"), 0), InsufficientBudget);
  CHECK_THROWS_AS(ssgp_certificate(c, el("1;0"), 2), InsufficientBudget);
  CHECK_THROWS_AS(stage_set(c, c.max_level() + 1), InsufficientBudget);
}

TEST_CASE("chain is decreasing and verifies") {
  const FilterChain& c = small_chain();
  CHECK(c.conditions.front() == root(INST));
  for (std::size_t i = 1; i < c.conditions.size(); ++i) expect_clean(leq(INST, c.conditions[i], c.conditions[i - 1], CFG));
  expect_clean(verify_chain(c, CFG));
}

TEST_CASE("stage sets grow along the chain") {
  const FilterChain& c = small_chain();
  FilterChain prefix = c;
  prefix.conditions.resize(c.conditions.size() / 2);
  const std::size_t top = prefix.max_level();
  for (std::size_t i = 0; i <= top; ++i) {
    const SymSet small = stage_set(prefix, i), big = stage_set(c, i);
    Sampler sm(i + 3, 12);
    for (int t = 0; t < 100; ++t) CHECK(member(KS, sm.point(KS, small), big));
  }
}

TEST_CASE("build is deterministic and the report is byte-stable") {
  const FilterChain a = build_chain(INST, Budget{1, 6}, CFG), b = build_chain(INST, Budget{1, 6}, CFG);
  CHECK(chain_to_json(a).dump() == chain_to_json(b).dump());
  CHECK(verify_chain(a, CFG).to_json().dump() == verify_chain(b, CFG).to_json().dump());
}

TEST_CASE("round trip through JSON and files") {
  const FilterChain& c = small_chain();
  const Json j = chain_to_json(c);
  const FilterChain back = chain_from_json(j);
  CHECK(chain_to_json(back).dump() == j.dump());
  CHECK(back.conditions == c.conditions);

  const auto path = std::filesystem::temp_directory_path() / "ssgp_driver_roundtrip.json";
  save_chain(c, path.string());
  const FilterChain loaded = load_chain(path.string());
  CHECK(chain_to_json(loaded).dump() == j.dump());
  expect_clean(verify_chain(loaded, CFG));
  std::filesystem::remove(path);
}

TEST_CASE("corrupt files are rejected") {
  const auto path = std::filesystem::temp_directory_path() / "ssgp_driver_corrupt.json";
  {
    std::FILE* f = std::fopen(path.string().c_str(), "w");
    std::fputs("{\"format\": \"ssgp-chain/1\",\n  \"instance\": [1, 2", f);
    std::fclose(f);
  }
  try {
    load_chain(path.string());
    FAIL("expected a parse error");
  } catch (const ArgumentError& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
  std::filesystem::remove(path);
  CHECK_THROWS_AS(load_chain("/nonexistent/chain.json"), ArgumentError);
}

TEST_CASE("tampered s-list is reported on load") {
  Json j = chain_to_json(small_chain());
  bool tampered = false;
  for (auto& p : j["conditions"]) {
    if (p["s"].size() >= 2) {
      // s_0 = s_1 + 1 keeps every lattice absorbed but cannot divide s_1.
      p["s"][0] = p["s"][1].get<std::int64_t>() + 1;
      tampered = true;
      break;
    }
  }
  REQUIRE(tampered);
  try {
    chain_from_json(j);
    FAIL("expected a validation failure");
  } catch (const ConstructionError& e) {
    CHECK(std::string(e.what()).find("fails 8 (level 0") != std::string::npos);
  }
}

TEST_CASE("a dropped atom is detected") {
  const FilterChain& c = small_chain();
  FilterChain bad = c;
  // Drop the head atoms x + sZ of the last SSGP step from its top level.
  Condition& last = bad.conditions.back();
  SymSet& top = last.u[last.n];
  REQUIRE(top.atoms.size() >= 2);
  top.atoms.pop_back();
  CHECK_FALSE(verify_chain(bad, CFG).ok());
}

TEST_CASE("torsion-only elements") {
  const FilterChain& c = small_chain();
  const KElem t = el("0;1");
  const std::size_t n = separation_certificate(c, t);
  CHECK_FALSE(member(KS, t, stage_set(c, n)));
  const SSGPWitness w = ssgp_certificate(c, t, 1);
  CHECK(witness_identity(KS, w));
}

TEST_CASE("instance descriptor round trip") {
  const Instance loc{WideGroup::localized(2, 1, 4), HSpec{1, {3, 4}}};
  const Json j = instance_to_json(loc);
  CHECK(j.dump() == R"({"m":2,"group":{"localized":{"residue":1,"modulus":4}},"h":{"free_rank":1,"torsion_orders":[3,4]}})");
  CHECK(instance_to_json(instance_from_json(j)) == j);
}
