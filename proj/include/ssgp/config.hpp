#pragma once

// Instance configuration files: strict JSON with the instance descriptor,
// the budget, sampling parameters and optional explicit requests.

#include <string>
#include <vector>

#include "ssgp/driver.hpp"

namespace ssgp {

/// Invalid configuration; maps to the usage/config exit code.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct InstanceConfig {
  Instance inst;
  Budget budget;
  SampleConfig sampling;
  std::vector<ScheduledRequest> requests;
};

/// Recognised keys: m, group, h, budget, sample_budget, sample_bound,
/// rng_seed, requests. Anything else is rejected.
InstanceConfig parse_config(const Json& j);
InstanceConfig load_config(const std::string& path);

}  // namespace ssgp
