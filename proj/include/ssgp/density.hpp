#pragma once

// Extensions landing in the four families of dense sets, and the exhaustive
// checker for the properties of prime-avoiding generator sequences.

#include <utility>

#include "ssgp/poset.hpp"

namespace ssgp {

struct DenseRequest {
  enum class Kind { Level, Primes, Avoid, Ssgp };
  Kind kind = Kind::Level;
  std::size_t level = 0;  ///< Level
  PrimeSet primes;        ///< Primes
  KElem x;                ///< Avoid, Ssgp

  static DenseRequest make_level(std::size_t n);
  static DenseRequest make_primes(PrimeSet pi);
  static DenseRequest make_avoid(KElem x);
  static DenseRequest make_ssgp(KElem x);
};

std::string kind_name(DenseRequest::Kind k);

/// p itself if n <= n^p, otherwise repeated avoidance of the first unit vector.
Condition extend_to_level(const Instance& inst, const Condition& p, std::size_t n);
Condition extend_primes(const Condition& p, const PrimeSet& pi);
/// Adds the denominator primes of x, then a level that excludes x.
Condition extend_avoid(const Instance& inst, const Condition& p, const KElem& x);

/// Extension q with x in U_n^q + <Cyc(U_n^q)>_k, n = n^p, k = 2^n + 1. The top
/// level gains the atoms +-(g_0 + h) + sZ^m and Z g_j + sZ^m; each lower level
/// gains U_{i+1}^q + U_{i+1}^q + s_i Z^m. Throws ConstructionError if any
/// post-check fails.
std::pair<Condition, SSGPWitness> extend_ssgp(const Instance& inst, const Condition& p, const KElem& x);

/// Exhaustive check of the iterative lemma over coefficient boxes [-bound, bound]:
///   A(i)   <g_1..g_i> + Q_{pi_0} inside Q_{pi_i}
///   A(ii)  <g_i..g_k> meeting Q_{pi_{i-1}} only inside sZ^m
///   B      l g_0 outside <g_j : j in J> + Q_{pi_0} for proper J and 0 < |l| <= k,
///          decided exactly, with g_0 = g - sum g_j.
/// Q_{pi} is read as Q_{pi} + Z^m throughout, which only differs for pi empty.
Report check_lemma_iterative(const std::vector<PrimeSet>& pis, const std::vector<QVec>& gs, std::int64_t s,
                             const QVec& g, long bound);

}  // namespace ssgp
