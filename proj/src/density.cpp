#include "ssgp/density.hpp"

#include <algorithm>

namespace ssgp {

DenseRequest DenseRequest::make_level(std::size_t n) {
  DenseRequest r;
  r.kind = Kind::Level;
  r.level = n;
  return r;
}

DenseRequest DenseRequest::make_primes(PrimeSet pi) {
  DenseRequest r;
  r.kind = Kind::Primes;
  r.primes = std::move(pi);
  return r;
}

DenseRequest DenseRequest::make_avoid(KElem x) {
  DenseRequest r;
  r.kind = Kind::Avoid;
  r.x = std::move(x);
  return r;
}

DenseRequest DenseRequest::make_ssgp(KElem x) {
  DenseRequest r;
  r.kind = Kind::Ssgp;
  r.x = std::move(x);
  return r;
}

std::string kind_name(DenseRequest::Kind k) {
  switch (k) {
    case DenseRequest::Kind::Level: return "level";
    case DenseRequest::Kind::Primes: return "primes";
    case DenseRequest::Kind::Avoid: return "avoid";
    case DenseRequest::Kind::Ssgp: return "ssgp";
  }
  return "?";
}

Condition extend_to_level(const Instance& inst, const Condition& p, std::size_t n) {
  const KSpace ks = inst.space();
  const KElem dummy = ks.from_q(unit_qvec(ks.m(), 0));
  Condition q = p;
  while (q.n < n) q = extend_with_avoidance(inst, q, dummy);
  return q;
}

Condition extend_primes(const Condition& p, const PrimeSet& pi) {
  Condition q = p;
  q.pi = p.pi.united(pi);
  return q;
}

Condition extend_avoid(const Instance& inst, const Condition& p, const KElem& x) {
  if (inst.space().is_zero(x)) throw ArgumentError("cannot avoid the zero element");
  if (!inst.g.contains(x.q)) throw ArgumentError("element is outside G + H");
  return extend_with_avoidance(inst, extend_primes(p, denominator_primes(x.q)), x);
}

std::pair<Condition, SSGPWitness> extend_ssgp(const Instance& inst, const Condition& p, const KElem& x) {
  const KSpace ks = inst.space();
  ks.check_shape(x);
  if (!inst.g.contains(x.q)) throw ArgumentError("element is outside G + H");
  const Condition base = qpi_contains(x.q, p.pi) ? p : extend_primes(p, denominator_primes(x.q));

  const std::size_t n = base.n;
  if (n >= 62) throw ArgumentError("level too deep for k = 2^n + 1");
  const auto k = static_cast<std::int64_t>((std::uint64_t{1} << n) + 1);
  const std::int64_t s = base.s[n];
  const GSequence seq = find_g_sequence(inst.g, base.pi, k, s);

  QVec g0 = x.q;
  for (const auto& g : seq.gs) g0 = g0 - g;
  const KElem head{g0, x.h};

  Condition q = base;
  q.pi = seq.pis.back();
  SymSet top = SymSet::of(make_atom(ks, head, {}, s));
  top = unite(ks, top, SymSet::of(make_atom(ks, ks.neg(head), {}, s)));
  SSGPWitness w{x, n, head, {}};
  for (const auto& g : seq.gs) {
    const KElem gj = ks.from_q(g);
    top = unite(ks, top, SymSet::of(make_atom(ks, ks.zero(), {gj}, s)));
    w.parts.push_back(gj);
  }
  q.u[n] = unite(ks, base.u[n], top);
  for (std::size_t i = n; i-- > 0;) {
    const SymSet doubled = sum(ks, sum(ks, q.u[i + 1], q.u[i + 1]), SymSet::of(lattice_atom(ks, base.s[i])));
    q.u[i] = unite(ks, base.u[i], doubled);
    const std::size_t above = q.u[i + 1].description_size();
    if (q.u[i].description_size() > above * above + base.u[i].description_size() + 1)
      throw ConstructionError("downward closure grew beyond its bound at level " + std::to_string(i));
  }

  if (!witness_identity(ks, w)) throw ConstructionError("witness does not sum to its target");
  if (!member(ks, head, q.u[n])) throw ConstructionError("witness head is outside the top level");
  for (const auto& gj : w.parts)
    if (!cyclic_in_set(ks, gj, q.u[n], CyclicMode::Syntactic))
      throw ConstructionError("a witness part has no cyclic certificate");
  return {std::move(q), std::move(w)};
}

namespace {

using Wide = __int128;

Wide to_wide(const BigInt& v) {
  BigInt hi = v >> 64;
  BigInt lo = v - (hi << 64);
  return (static_cast<Wide>(hi.get_si()) << 64) + static_cast<Wide>(lo.get_ui());
}

bool wide_divides(Wide d, Wide v) { return v % d == 0; }
bool wide_divides(const BigInt& d, const BigInt& v) { return mpz_divisible_p(v.get_mpz_t(), d.get_mpz_t()) != 0; }

// Walks every coefficient tuple in [-bound, bound]^r, maintaining the scaled
// sums incrementally; stops early when visit returns false.
template <class T, class F>
bool for_each_combination(const std::vector<std::vector<T>>& gens, std::size_t m, long bound, F&& visit) {
  const std::size_t r = gens.size();
  std::vector<long> n(r, -bound);
  std::vector<T> acc(m, T(0));
  for (std::size_t j = 0; j < r; ++j)
    for (std::size_t c = 0; c < m; ++c) acc[c] -= T(bound) * gens[j][c];
  std::size_t index = 0;
  for (;;) {
    if (!visit(acc, index++)) return false;
    std::size_t p = 0;
    for (; p < r; ++p) {
      if (n[p] < bound) {
        ++n[p];
        for (std::size_t c = 0; c < m; ++c) acc[c] += gens[p][c];
        break;
      }
      n[p] = -bound;
      for (std::size_t c = 0; c < m; ++c) acc[c] -= T(2 * bound) * gens[p][c];
    }
    if (p == r) return true;
  }
}

template <class T>
T convert(const BigInt& v) {
  if constexpr (std::is_same_v<T, BigInt>) return v;
  else return to_wide(v);
}

template <class T>
Report check_boxes(const std::vector<PrimeSet>& pis, const std::vector<QVec>& gs, std::int64_t s, long bound,
                   const BigInt& d, const std::vector<QVec>& q0_points) {
  const std::size_t k = gs.size(), m = gs.empty() ? 0 : gs[0].size();
  Report r;
  std::vector<std::vector<T>> scaled;
  for (const auto& g : gs) {
    std::vector<T> v;
    for (const auto& c : g) v.push_back(convert<T>((c * Rat(d)).num()));
    scaled.push_back(std::move(v));
  }
  std::vector<std::vector<T>> points;
  for (const auto& p : q0_points) {
    std::vector<T> v;
    for (const auto& c : p) v.push_back(convert<T>((c * Rat(d)).num()));
    points.push_back(std::move(v));
  }

  std::string bad;
  for (std::size_t i = 1; i <= k && bad.empty(); ++i) {
    const T mi = convert<T>(part_outside(d, pis[i]));
    const std::vector<std::vector<T>> prefix(scaled.begin(), scaled.begin() + static_cast<long>(i));
    for_each_combination<T>(prefix, m, bound, [&](const std::vector<T>& acc, std::size_t idx) {
      const auto& pt = points[idx % points.size()];
      for (std::size_t c = 0; c < m; ++c)
        if (!wide_divides(mi, acc[c] + pt[c])) {
          bad = "combination of g_1..g_" + std::to_string(i) + " leaves Q_{pi_" + std::to_string(i) + "}";
          return false;
        }
      return true;
    });
  }
  r.add("A(i)", bad.empty(), bad);

  bad.clear();
  const T ds = convert<T>(d * s);
  for (std::size_t i = 1; i <= k && bad.empty(); ++i) {
    const T mprev = convert<T>(part_outside(d, pis[i - 1]));
    const std::vector<std::vector<T>> suffix(scaled.begin() + static_cast<long>(i - 1), scaled.end());
    for_each_combination<T>(suffix, m, bound, [&](const std::vector<T>& acc, std::size_t) {
      for (std::size_t c = 0; c < m; ++c)
        if (!wide_divides(mprev, acc[c])) return true;
      for (std::size_t c = 0; c < m; ++c)
        if (!wide_divides(ds, acc[c])) {
          bad = "combination of g_" + std::to_string(i) + "..g_k lies in Q_{pi_" + std::to_string(i - 1) +
                "} outside sZ^m";
          return false;
        }
      return true;
    });
  }
  r.add("A(ii)", bad.empty(), bad);
  return r;
}

}  // namespace

Report check_lemma_iterative(const std::vector<PrimeSet>& pis, const std::vector<QVec>& gs, std::int64_t s,
                             const QVec& g, long bound) {
  const std::size_t k = gs.size();
  if (pis.size() != k + 1) throw ArgumentError("check_lemma_iterative: need pi_0..pi_k");
  if (k == 0) throw ArgumentError("check_lemma_iterative: empty sequence");
  if (k > 20) throw ArgumentError("check_lemma_iterative: sequence too long for exhaustive subsets");
  const std::size_t m = gs[0].size();

  // A few points of Q_{pi_0} + Z^m added to the combinations in A(i).
  std::vector<QVec> q0_points{zero_qvec(m), unit_qvec(m, m - 1)};
  BigInt prod = 1;
  for (Prime p : pis[0].primes()) {
    q0_points.push_back(Rat(BigInt(1), BigInt(static_cast<unsigned long>(p))) * unit_qvec(m, 0));
    prod *= static_cast<unsigned long>(p);
  }
  if (prod > 1) q0_points.push_back(Rat(BigInt(1), prod * prod) * unit_qvec(m, m - 1));

  BigInt d = 1;
  for (const auto& x : gs) d = lcm(d, denominator_lcm(x));
  for (const auto& x : q0_points) d = lcm(d, denominator_lcm(x));
  // Sums stay below (k * bound + 1) * d * max|numerator| in absolute value.
  BigInt mag = 1;
  for (const auto& x : gs)
    for (const auto& c : x) mag = std::max(mag, BigInt(abs((c * Rat(d)).num())));
  const BigInt limit = BigInt(1) << 100;
  Report r = (mag * d * s * (static_cast<long>(k) * bound + 2) < limit)
                 ? check_boxes<Wide>(pis, gs, s, bound, d, q0_points)
                 : check_boxes<BigInt>(pis, gs, s, bound, d, q0_points);

  QVec g0 = g;
  for (const auto& x : gs) g0 = g0 - x;
  std::string bad;
  for (std::size_t mask = 0; mask + 1 < (std::size_t{1} << k) && bad.empty(); ++mask) {
    std::vector<QVec> sub;
    for (std::size_t i = 0; i < m; ++i) sub.push_back(unit_qvec(m, i));
    for (std::size_t j = 0; j < k; ++j)
      if (mask >> j & 1) sub.push_back(gs[j]);
    for (long l = 1; l <= static_cast<long>(k) && bad.empty(); ++l)
      if (member_mod_qpi(Rat(l) * g0, sub, pis[0]))
        bad = std::to_string(l) + " g_0 falls into a proper subgroup plus Q_{pi_0}";
  }
  r.add("B", bad.empty(), bad);
  return r;
}

}  // namespace ssgp
