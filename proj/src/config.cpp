#include "ssgp/config.hpp"

#include <fstream>
#include <set>

namespace ssgp {

namespace {

void only_keys(const Json& j, const std::string& where, std::set<std::string> allowed) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [k, v] : j.items())
    if (!allowed.contains(k)) throw ConfigError("unknown key '" + k + "' in " + where);
}

template <typename T>
T natural(const Json& j, const std::string& key, T fallback) {
  if (!j.contains(key)) return fallback;
  const Json& v = j.at(key);
  if (!v.is_number_integer() || v.get<std::int64_t>() < 0) throw ConfigError(key + " must be a non-negative integer");
  return v.get<T>();
}

ScheduledRequest parse_request(const KSpace& ks, const Json& r) {
  only_keys(r, "request", {"kind", "level", "primes", "x"});
  const std::string kind = r.at("kind").get<std::string>();
  const std::size_t level = natural<std::size_t>(r, "level", 0);
  if (kind == "level") return {DenseRequest::make_level(level), level};
  if (kind == "primes") return {DenseRequest::make_primes(PrimeSet(r.at("primes").get<std::vector<Prime>>())), 0};
  if (kind == "avoid") return {DenseRequest::make_avoid(ks.parse(r.at("x").get<std::string>())), 0};
  if (kind == "ssgp") return {DenseRequest::make_ssgp(ks.parse(r.at("x").get<std::string>())), level};
  throw ConfigError("unknown request kind '" + kind + "'");
}

}  // namespace

InstanceConfig parse_config(const Json& j) {
  try {
    only_keys(j, "config", {"m", "group", "h", "budget", "sample_budget", "sample_bound", "rng_seed", "requests"});
    if (!j.contains("m") || !j.contains("group")) throw ConfigError("config needs 'm' and 'group'");
    if (j.contains("h")) only_keys(j.at("h"), "h", {"free_rank", "torsion_orders"});
    if (j.at("group").is_object()) {
      only_keys(j.at("group"), "group", {"localized"});
      only_keys(j.at("group").at("localized"), "localized", {"residue", "modulus"});
    }
    InstanceConfig c;
    c.inst = instance_from_json(j);
    if (j.contains("budget")) {
      only_keys(j.at("budget"), "budget", {"max_level", "enum_count"});
      c.budget.max_level = natural<std::size_t>(j.at("budget"), "max_level", c.budget.max_level);
      c.budget.enum_count = natural<std::size_t>(j.at("budget"), "enum_count", c.budget.enum_count);
    }
    if (c.budget.enum_count < 1) throw ConfigError("enum_count must be at least 1");
    c.sampling.budget = natural<std::size_t>(j, "sample_budget", c.sampling.budget);
    c.sampling.bound = natural<std::int64_t>(j, "sample_bound", c.sampling.bound);
    c.sampling.seed = natural<std::uint64_t>(j, "rng_seed", c.sampling.seed);
    if (c.sampling.bound < 1) throw ConfigError("sample_bound must be positive");
    if (j.contains("requests")) {
      const KSpace ks = c.inst.space();
      for (const auto& r : j.at("requests")) c.requests.push_back(parse_request(ks, r));
    }
    return c;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(e.what());
  }
}

InstanceConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path);
  try {
    return parse_config(Json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

}  // namespace ssgp
