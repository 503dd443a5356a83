#pragma once

// Conditions of the forcing poset, their validator, the order relation and
// the one-step extension that pushes a nonzero element out of a new level.

#include <cstdint>
#include <string>
#include <vector>

#include "ssgp/symsets.hpp"

namespace ssgp {

struct Condition {
  PrimeSet pi;
  std::size_t n = 0;
  std::vector<SymSet> u;  ///< U_0 ... U_n
  std::vector<std::int64_t> s;  ///< s_0 ... s_n

  friend bool operator==(const Condition&, const Condition&) = default;
};

struct CheckResult {
  std::string name;
  bool pass = true;
  std::string detail;
};

struct Report {
  std::vector<CheckResult> checks;

  bool ok() const;
  const CheckResult* find(const std::string& name) const;
  void add(std::string name, bool pass, std::string detail = {});
  /// Appends the other report's checks with a name prefix.
  void merge(const Report& other, const std::string& prefix);
  Json to_json() const;
};

struct SampleConfig {
  std::size_t budget = 200;
  std::uint64_t seed = 0;
  std::int64_t bound = 12;
};

Condition root(const Instance& inst);

/// Checks (1)-(8) and the two corollaries U_{i+1} in U_i and s_i Z^m in U_i.
/// Structural checks are exact; the sum-closure and corollaries are sampled.
Report validate(const Instance& inst, const Condition& p, const SampleConfig& cfg);

/// q <= p: prime sets grow, depth grows, s-lists agree, and U_i^q meets
/// Q^m_{pi^p} + H exactly in U_i^p (inclusion of U_i^p by inspection, the
/// reverse by filtered sampling).
Report leq(const Instance& inst, const Condition& q, const Condition& p, const SampleConfig& cfg);

/// Adds level n+1 with U_{n+1} = s_{n+1} Z^m, s_{n+1} = k s_n for the smallest
/// k >= 1 keeping x out. Requires x != 0, x.q in G and in Q^m_pi + Z^m.
Condition extend_with_avoidance(const Instance& inst, const Condition& p, const KElem& x);

Json to_json(const Instance& inst, const Condition& p, PoolTable* table = nullptr);
Condition condition_from_json(const Instance& inst, const Json& j, const PoolTable* table = nullptr);

}  // namespace ssgp
