#pragma once

// Symbolic subsets of K with decidable membership.
//
// An atom is b + Z*g_1 + ... + Z*g_r + sZ^m, the lattice living in the q-part
// with zero h-part (s = 0 means no lattice). A SymSet is a finite union of flat
// atoms and sum terms. A sum term is offset + P_1*c_1 + ... where P*c is the
// set of all sums of exactly c elements drawn (with repetition) from the atoms
// of pool P. Pools are shared immutable atom lists, so the repeated sums
// U + U + ... of the downward closure stay linear in size.

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <vector>

#include "json.hpp"

#include "ssgp/groups.hpp"

namespace ssgp {

using Json = nlohmann::ordered_json;

struct Atom {
  KElem base;
  std::vector<KElem> gens;  ///< sign-normalized, sorted, unique, nonzero
  std::int64_t modulus = 1; ///< >= 0; 0 means no lattice summand

  friend auto operator<=>(const Atom&, const Atom&) = default;
};

/// Normalizes generators: each g is replaced by the smaller of g and -g, zeros
/// are dropped, the list is sorted and deduplicated.
Atom make_atom(const KSpace& ks, KElem base, std::vector<KElem> gens, std::int64_t modulus);
Atom lattice_atom(const KSpace& ks, std::int64_t s);
/// a is contained in b by inspection: same base, generators of a among those
/// of b, lattice of a inside lattice of b.
bool atom_subsumed(const Atom& a, const Atom& b);

struct Pool {
  std::vector<Atom> atoms;        ///< sorted, unique
  std::vector<BigInt> den;        ///< lcm of all q-denominators of base and generators
  std::vector<char> h_active;     ///< base or some generator has nonzero h-part
  std::vector<char> base_zero;    ///< base is the zero element
  int closer = -1;                ///< base-zero atom with fewest generators, -1 if none

  bool has_zero_atom() const { return closer >= 0; }
};
using PoolPtr = std::shared_ptr<const Pool>;

PoolPtr make_pool(const KSpace& ks, std::vector<Atom> atoms);

struct Part {
  PoolPtr pool;
  int count = 1;
};

struct SumTerm {
  Atom offset;
  std::vector<Part> parts;  ///< distinct pools of size >= 2, canonical order
};

struct SymSet {
  std::vector<Atom> atoms;
  std::vector<SumTerm> sums;

  static SymSet of(Atom a);
  bool empty() const { return atoms.empty() && sums.empty(); }
  /// Flat atoms, plus one per sum term and one per pooled atom it references.
  std::size_t description_size() const;
};

bool operator==(const SumTerm& a, const SumTerm& b);
bool operator==(const SymSet& a, const SymSet& b);

/// Exact membership.
bool member(const KSpace& ks, const KElem& x, const Atom& a);
bool member(const KSpace& ks, const KElem& x, const SumTerm& t);
bool member(const KSpace& ks, const KElem& x, const SymSet& s);

/// {x + y : x in S, y in T}.
SymSet sum(const KSpace& ks, const SymSet& s, const SymSet& t);
/// S u T with duplicates and inspection-subsumed terms removed.
SymSet unite(const KSpace& ks, const SymSet& s, const SymSet& t);
SymSet negate(const KSpace& ks, const SymSet& s);
/// Every term's negation is present (up to inspection subsumption).
bool is_symmetric(const KSpace& ks, const SymSet& s);
/// Every term of `small` is subsumed by a term of `big`; a sound certificate
/// of small being contained in big.
bool covers(const SymSet& big, const SymSet& small);

/// All sums of at most k elements of A, including the empty sum, sorted.
std::vector<KElem> grp_bounded(const KSpace& ks, const std::vector<KElem>& a, int k);

enum class CyclicMode { Syntactic, Bounded };
/// Syntactic: Z*g is visibly contained in one term of S. Bounded: n*g in S
/// for all |n| <= bound.
bool cyclic_in_set(const KSpace& ks, const KElem& g, const SymSet& s, CyclicMode mode, int bound = 25);

/// x in Z*gens + Q^m_pi, with Q_emptyset = {0}.
bool member_mod_qpi(const QVec& x, const std::vector<QVec>& gens, const PrimeSet& pi);

/// Deterministic sampler: random term, then coefficients in [-bound, bound].
class Sampler {
 public:
  Sampler(std::uint64_t seed, std::int64_t bound = 12) : rng_(seed), bound_(bound) {}

  std::int64_t coefficient();
  std::size_t index(std::size_t n);
  KElem point(const KSpace& ks, const Atom& a);
  KElem point(const KSpace& ks, const SumTerm& t);
  /// Throws ArgumentError for the empty set.
  KElem point(const KSpace& ks, const SymSet& s);

 private:
  std::mt19937_64 rng_;
  std::int64_t bound_;
};

struct SSGPWitness {
  KElem target;
  std::size_t level = 0;
  KElem head;
  std::vector<KElem> parts;
};

/// head + sum of parts == target.
bool witness_identity(const KSpace& ks, const SSGPWitness& w);

// Canonical JSON. KElems are arrays of strings: q-fractions, then free
// coordinates and torsion residues.
Json to_json(const KSpace& ks, const KElem& x);
KElem kelem_from_json(const KSpace& ks, const Json& j);
Json to_json(const KSpace& ks, const Atom& a);
Atom atom_from_json(const KSpace& ks, const Json& j);

/// Pools shared between sets are written once and referenced by index.
class PoolTable {
 public:
  std::size_t intern(const PoolPtr& p);
  PoolPtr at(std::size_t i) const;
  Json to_json(const KSpace& ks) const;
  static PoolTable from_json(const KSpace& ks, const Json& j);
  std::size_t size() const { return pools_.size(); }

 private:
  std::vector<PoolPtr> pools_;
};

/// With a table, pools are referenced by index; without one they are inlined.
Json to_json(const KSpace& ks, const SymSet& s, PoolTable* table = nullptr);
SymSet symset_from_json(const KSpace& ks, const Json& j, const PoolTable* table = nullptr);
Json to_json(const KSpace& ks, const SSGPWitness& w);
SSGPWitness witness_from_json(const KSpace& ks, const Json& j);

}  // namespace ssgp
