#pragma once

// The ambient group K = G + H: H finitely generated, G a wide subgroup of Q^m,
// an enumeration of K, and the element finders for the prime-avoiding
// cyclic subgroups.

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "ssgp/arith.hpp"

namespace ssgp {

class ConstructionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// H = Z^free_rank + Z/torsion[0] + ... ; every torsion order is >= 2.
struct HSpec {
  std::size_t free_rank = 0;
  std::vector<std::int64_t> torsion;

  void validate() const;
  bool trivial() const { return free_rank == 0 && torsion.empty(); }
  friend bool operator==(const HSpec&, const HSpec&) = default;
};

/// Torsion entries are kept reduced into [0, d_j).
struct HElem {
  std::vector<std::int64_t> free;
  std::vector<std::int64_t> torsion;

  friend auto operator<=>(const HElem&, const HElem&) = default;
};

struct KElem {
  QVec q;
  HElem h;

  friend auto operator<=>(const KElem&, const KElem&) = default;
};

/// Arithmetic in K for a fixed (m, H).
class KSpace {
 public:
  KSpace() = default;
  KSpace(std::size_t m, HSpec h);

  std::size_t m() const { return m_; }
  const HSpec& h() const { return h_; }

  KElem zero() const;
  KElem from_q(QVec q) const;
  KElem make(QVec q, std::vector<std::int64_t> free, std::vector<std::int64_t> torsion) const;
  KElem add(const KElem& a, const KElem& b) const;
  KElem sub(const KElem& a, const KElem& b) const;
  KElem neg(const KElem& a) const;
  KElem scale(std::int64_t c, const KElem& a) const;
  bool is_zero(const KElem& a) const;
  bool h_is_zero(const HElem& h) const;
  /// Throws ArgumentError if the shape does not match (m, H).
  void check_shape(const KElem& a) const;
  /// Height used by the enumeration: max of |numerators|, denominators,
  /// |free coordinates| and torsion residues.
  BigInt height(const KElem& a) const;

  /// "q_1,...,q_m;h_1,...": q-part fractions, then free coordinates and
  /// torsion residues. The ";..." part may be omitted when H is trivial.
  KElem parse(std::string_view text) const;
  std::string str(const KElem& a) const;

 private:
  void reduce(HElem& h) const;

  std::size_t m_ = 1;
  HSpec h_;
};

/// A wide subgroup of Q^m: all of Q^m, or the vectors whose denominators only
/// involve primes p = residue (mod modulus).
class WideGroup {
 public:
  enum class Kind { FullQ, Localized };

  static WideGroup full_q(std::size_t m);
  /// Throws ArgumentError unless gcd(residue, modulus) = 1 and the class holds
  /// at least five primes below 10^4.
  static WideGroup localized(std::size_t m, std::int64_t residue, std::int64_t modulus);

  std::size_t m() const { return m_; }
  Kind kind() const { return kind_; }
  std::int64_t residue() const { return residue_; }
  std::int64_t modulus() const { return modulus_; }

  bool admits_prime(Prime p) const;
  bool contains(const QVec& x) const;
  /// (1/p, 0, ..., 0) with p the smallest admitted prime outside pi.
  QVec witness(const PrimeSet& pi) const;
  std::string describe() const;

  friend bool operator==(const WideGroup&, const WideGroup&) = default;

 private:
  std::size_t m_ = 1;
  Kind kind_ = Kind::FullQ;
  std::int64_t residue_ = 0;
  std::int64_t modulus_ = 1;
};

struct Instance {
  WideGroup g;
  HSpec h;

  KSpace space() const { return KSpace(g.m(), h); }
  friend bool operator==(const Instance&, const Instance&) = default;
};

/// The first `count` elements of K (intersected with G + H): zero first, then
/// by increasing height, lexicographically within a height.
std::vector<KElem> enumerate_prefix(const Instance& inst, std::size_t count);
KElem enumerate_k(const Instance& inst, std::size_t i);

/// g in G with <g> cap Q^m_pi inside sZ^m and l*g outside Q^m_pi for 0 < |l| <= k.
/// Both properties are re-checked exactly; a failure throws ConstructionError.
QVec find_g(const WideGroup& g, const PrimeSet& pi, std::int64_t k, std::int64_t s);

struct GSequence {
  std::vector<PrimeSet> pis;  ///< pi_0, ..., pi_k
  std::vector<QVec> gs;       ///< g_1, ..., g_k stored at indices 0..k-1
};

/// Iterates find_g, growing pi_j by exactly the denominator primes of g_j.
GSequence find_g_sequence(const WideGroup& g, const PrimeSet& pi0, std::int64_t k, std::int64_t s);

/// Generator of <g> cap Q^m_pi, i.e. D*g with D the outside-pi part of the
/// denominators. With pi empty, Q_emptyset = {0} makes it the zero vector.
QVec cyclic_cap_qpi(const QVec& g, const PrimeSet& pi);
/// Generator of <g> cap (Q^m_pi + Z^m); agrees with cyclic_cap_qpi for non-empty pi.
QVec cyclic_cap_ambient(const QVec& g, const PrimeSet& pi);

}  // namespace ssgp
