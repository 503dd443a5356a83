#pragma once

// Generic-filter engine: walks a finite prefix of the dense family, keeps the
// decreasing chain of conditions, and answers separation and SSGP queries
// against the assembled stage sets.

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ssgp/density.hpp"

namespace ssgp {

/// A query that the chain cannot answer yet; more budget might answer it.
class InsufficientBudget : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A query that can never succeed (e.g. separating 0).
class QueryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Budget {
  std::size_t max_level = 2;
  std::size_t enum_count = 10;
  friend bool operator==(const Budget&, const Budget&) = default;
};

/// A request processed before the enumeration. For Ssgp, `level` is the n of
/// the combined request A_n cap D_x.
struct ScheduledRequest {
  DenseRequest request;
  std::size_t level = 0;
};

struct MetRecord {
  std::size_t index = 0;  ///< condition meeting the request
  DenseRequest request;
  std::size_t level = 0;  ///< Avoid: the separating level; Ssgp: the requested n
  std::optional<SSGPWitness> witness;
};

struct FilterChain {
  Instance inst;
  Budget budget;
  SampleConfig sampling;
  std::vector<ScheduledRequest> requests;
  std::vector<Condition> conditions;
  std::vector<MetRecord> met;

  std::size_t max_level() const;
};

/// Builds the chain, certifying each new condition (validate, leq against its
/// predecessor) and each met request. Throws ConstructionError naming the
/// violated property.
FilterChain build_chain(const Instance& inst, const Budget& budget, const SampleConfig& sampling,
                        const std::vector<ScheduledRequest>& requests = {});

/// Union of U_i^p over chain conditions with i <= n^p.
SymSet stage_set(const FilterChain& chain, std::size_t i);

/// Level n with x outside the stage set U_n, re-checked on the stage set.
std::size_t separation_certificate(const FilterChain& chain, const KElem& x);

/// Witness for x at level i, re-checked on the stage set U_i.
SSGPWitness ssgp_certificate(const FilterChain& chain, const KElem& x, std::size_t i);

struct CertificateTally {
  std::size_t separation = 0;
  std::size_t ssgp = 0;
  std::string first_separation_failure;
  std::string first_ssgp_failure;
};

/// Issues every certificate the budget promises: separation for each
/// enumerated x != 0, SSGP for each enumerated x and each level <= L.
CertificateTally issue_certificates(const FilterChain& chain);

/// Full check: every condition, the order along the chain (and over two
/// steps), every recorded request, the neighbourhood-base axioms on the stage
/// sets, and a certificate for every enumerated element.
Report verify_chain(const FilterChain& chain, const SampleConfig& cfg);

Json chain_to_json(const FilterChain& chain);
/// Runs the exact (non-sampled) condition checks and throws ConstructionError
/// naming the first condition that fails them.
FilterChain chain_from_json(const Json& j);
void save_chain(const FilterChain& chain, const std::string& path);
/// Throws ArgumentError with the parser's location on malformed files.
FilterChain load_chain(const std::string& path);

Json instance_to_json(const Instance& inst);
Instance instance_from_json(const Json& j);

}  // namespace ssgp
