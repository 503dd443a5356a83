#include "ssgp/symsets.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "ssgp/snf.hpp"

namespace ssgp {

namespace {

KElem canonical_sign(const KSpace& ks, const KElem& g) {
  KElem n = ks.neg(g);
  return n < g ? n : g;
}

std::int64_t gcd0(std::int64_t a, std::int64_t b) { return std::gcd(a, b); }

BigInt q_den(const QVec& q) { return denominator_lcm(q); }

BigInt gens_den(const std::vector<KElem>& gens) {
  BigInt l = 1;
  for (const auto& g : gens) l = lcm(l, q_den(g.q));
  return l;
}

std::vector<KElem> merge_gens(const std::vector<KElem>& a, const std::vector<KElem>& b) {
  std::vector<KElem> out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

// d in Z*gens + s*Z^m (s = 0: no lattice), h-parts compared exactly on the free
// coordinates and modulo the torsion orders.
bool coset_contains(const KSpace& ks, const KElem& d, const std::vector<KElem>& gens, std::int64_t s,
                    const BigInt& gen_den) {
  const std::size_t m = ks.m();
  for (const auto& x : d.q)
    if (!mpz_divisible_p(gen_den.get_mpz_t(), x.den().get_mpz_t())) return false;
  if (gens.empty()) {
    if (!ks.h_is_zero(d.h)) return false;
    const BigInt bs(static_cast<long>(s));
    for (const auto& x : d.q) {
      if (s == 0 ? !x.is_zero() : !mpz_divisible_p(x.num().get_mpz_t(), bs.get_mpz_t())) return false;
    }
    return true;
  }
  const std::size_t a = ks.h().free_rank, b = ks.h().torsion.size(), r = gens.size();
  const std::size_t lat = s ? m : 0;
  IntMatrix mat(m + a + b, r + lat + b);
  std::vector<BigInt> rhs(m + a + b);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < r; ++j) {
      const Rat v = gens[j].q[i] * Rat(gen_den);
      mat(i, j) = v.num();
    }
    if (s) mat(i, r + i) = gen_den * s;
    rhs[i] = (d.q[i] * Rat(gen_den)).num();
  }
  for (std::size_t k = 0; k < a; ++k) {
    for (std::size_t j = 0; j < r; ++j) mat(m + k, j) = static_cast<long>(gens[j].h.free[k]);
    rhs[m + k] = static_cast<long>(d.h.free[k]);
  }
  for (std::size_t k = 0; k < b; ++k) {
    for (std::size_t j = 0; j < r; ++j) mat(m + a + k, j) = static_cast<long>(gens[j].h.torsion[k]);
    mat(m + a + k, r + lat + k) = static_cast<long>(ks.h().torsion[k]);
    rhs[m + a + k] = static_cast<long>(d.h.torsion[k]);
  }
  return snf_solve(mat, rhs).has_value();
}

// h in the subgroup of H spanned by the h-parts of gens.
bool h_in_span(const KSpace& ks, const HElem& h, const std::vector<KElem>& gens) {
  if (ks.h_is_zero(h)) return true;
  const std::size_t a = ks.h().free_rank, b = ks.h().torsion.size(), r = gens.size();
  IntMatrix mat(a + b, r + b);
  std::vector<BigInt> rhs(a + b);
  for (std::size_t k = 0; k < a; ++k) {
    for (std::size_t j = 0; j < r; ++j) mat(k, j) = static_cast<long>(gens[j].h.free[k]);
    rhs[k] = static_cast<long>(h.free[k]);
  }
  for (std::size_t k = 0; k < b; ++k) {
    for (std::size_t j = 0; j < r; ++j) mat(a + k, j) = static_cast<long>(gens[j].h.torsion[k]);
    mat(a + k, r + k) = static_cast<long>(ks.h().torsion[k]);
    rhs[a + k] = static_cast<long>(h.torsion[k]);
  }
  return snf_solve(mat, rhs).has_value();
}

bool h_active(const KSpace& ks, const Atom& a) {
  if (!ks.h_is_zero(a.base.h)) return true;
  return std::any_of(a.gens.begin(), a.gens.end(), [&](const KElem& g) { return !ks.h_is_zero(g.h); });
}

bool pool_less(const PoolPtr& a, const PoolPtr& b) {
  if (a == b) return false;
  return a->atoms < b->atoms;
}

bool pool_same(const PoolPtr& a, const PoolPtr& b) { return a == b || a->atoms == b->atoms; }

bool pool_subsumed(const PoolPtr& small, const PoolPtr& big) {
  if (pool_same(small, big)) return true;
  const auto& bs = big->atoms;
  for (const auto& a : small->atoms) {
    if (std::binary_search(bs.begin(), bs.end(), a)) continue;
    // Candidates share the base; atoms are sorted by base first.
    auto it = std::lower_bound(bs.begin(), bs.end(), a.base, [](const Atom& x, const KElem& b) { return x.base < b; });
    bool found = false;
    for (; it != bs.end() && it->base == a.base && !found; ++it) found = atom_subsumed(a, *it);
    if (!found) return false;
  }
  return true;
}

bool term_subsumed(const SumTerm& small, const SumTerm& big) {
  if (!atom_subsumed(small.offset, big.offset)) return false;
  std::vector<char> used(big.parts.size(), 0);
  for (const auto& p : small.parts) {
    bool matched = false;
    for (std::size_t j = 0; j < big.parts.size() && !matched; ++j) {
      if (used[j]) continue;
      const auto& q = big.parts[j];
      const bool count_ok = p.count == q.count || (p.count < q.count && q.pool->has_zero_atom());
      if (count_ok && pool_subsumed(p.pool, q.pool)) used[j] = matched = true;
    }
    if (!matched) return false;
  }
  for (std::size_t j = 0; j < big.parts.size(); ++j)
    if (!used[j] && !big.parts[j].pool->has_zero_atom()) return false;
  return true;
}

bool term_less(const SumTerm& a, const SumTerm& b) {
  if (a.offset != b.offset) return a.offset < b.offset;
  const std::size_t n = std::min(a.parts.size(), b.parts.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (!pool_same(a.parts[i].pool, b.parts[i].pool)) return pool_less(a.parts[i].pool, b.parts[i].pool);
    if (a.parts[i].count != b.parts[i].count) return a.parts[i].count < b.parts[i].count;
  }
  return a.parts.size() < b.parts.size();
}

Atom add_atoms(const KSpace& ks, const Atom& a, const Atom& b) {
  Atom r;
  r.base = ks.add(a.base, b.base);
  r.gens = merge_gens(a.gens, b.gens);
  r.modulus = gcd0(a.modulus, b.modulus);
  return r;
}

Atom scale_base(const KSpace& ks, const Atom& a, int c) {
  Atom r = a;
  r.base = ks.scale(c, a.base);
  return r;
}

// Folds single-atom pools into the offset and merges equal pools. Returns
// nullopt if some pool is empty (the term is then the empty set).
std::optional<SumTerm> normalize(const KSpace& ks, SumTerm t) {
  std::vector<Part> parts;
  for (auto& p : t.parts) {
    if (p.count <= 0) continue;
    if (p.pool->atoms.empty()) return std::nullopt;
    if (p.pool->atoms.size() == 1) {
      t.offset = add_atoms(ks, t.offset, scale_base(ks, p.pool->atoms[0], p.count));
      continue;
    }
    auto it = std::find_if(parts.begin(), parts.end(), [&](const Part& q) { return pool_same(q.pool, p.pool); });
    if (it != parts.end()) it->count += p.count;
    else parts.push_back(p);
  }
  std::sort(parts.begin(), parts.end(), [](const Part& a, const Part& b) {
    if (!pool_same(a.pool, b.pool)) return pool_less(a.pool, b.pool);
    return a.count < b.count;
  });
  t.parts = std::move(parts);
  return t;
}

std::vector<SumTerm> terms_of(const KSpace& ks, const SymSet& s) {
  std::vector<SumTerm> out;
  if (s.atoms.size() == 1) {
    out.push_back(SumTerm{s.atoms[0], {}});
  } else if (s.atoms.size() > 1) {
    Atom zero{ks.zero(), {}, 0};
    out.push_back(SumTerm{zero, {Part{make_pool(ks, s.atoms), 1}}});
  }
  out.insert(out.end(), s.sums.begin(), s.sums.end());
  return out;
}

Atom negate_atom(const KSpace& ks, const Atom& a) {
  Atom r = a;
  r.base = ks.neg(a.base);
  return r;
}

// Exact membership in one sum term by a search over which pool atoms the
// picks use. Each branching rule names a set of atoms at least one of which
// must occur among the remaining picks of any decomposition.
class TermSearch {
 public:
  TermSearch(const KSpace& ks, const SumTerm& t) : ks_(ks), t_(t) {}

  bool run(const KElem& x) {
    State s;
    s.r = ks_.sub(x, t_.offset.base);
    s.gens = t_.offset.gens;
    s.gen_den = gens_den(s.gens);
    s.modulus = t_.offset.modulus;
    for (const auto& p : t_.parts) s.rem.push_back(p.count);
    return visit(s);
  }

 private:
  struct State {
    KElem r;
    std::vector<KElem> gens;
    BigInt gen_den;
    std::int64_t modulus = 0;
    std::vector<int> rem;
    std::vector<std::uint32_t> chosen;  // sorted (part << 20 | atom)
  };
  struct Cand {
    std::size_t part;
    std::size_t atom;
  };

  bool visit(const State& s) {
    if (!seen_.insert(s.chosen).second) return false;
    bool open = false, closable = true;
    std::vector<KElem> close_gens = s.gens;
    std::int64_t close_mod = s.modulus;
    for (std::size_t p = 0; p < s.rem.size(); ++p) {
      if (s.rem[p] == 0) continue;
      open = true;
      const Pool& pool = *t_.parts[p].pool;
      if (!pool.has_zero_atom()) {
        closable = false;
        break;
      }
      const Atom& c = pool.atoms[static_cast<std::size_t>(pool.closer)];
      close_gens = merge_gens(close_gens, c.gens);
      close_mod = gcd0(close_mod, c.modulus);
    }
    if (!open) return coset_contains(ks_, s.r, s.gens, s.modulus, s.gen_den);
    if (closable && coset_contains(ks_, s.r, close_gens, close_mod, gens_den(close_gens))) return true;

    std::vector<Cand> cands;
    if (!denominator_candidates(s, cands)) {
      if (!h_in_span(ks_, s.r.h, s.gens)) {
        for_each_open(s, [&](std::size_t p, std::size_t a) {
          if (t_.parts[p].pool->h_active[a]) cands.push_back({p, a});
        });
      } else {
        for_each_open(s, [&](std::size_t p, std::size_t a) {
          if (!absorbed(s, t_.parts[p].pool->atoms[a], t_.parts[p].pool->base_zero[a])) cands.push_back({p, a});
        });
      }
    }
    for (const auto& c : cands)
      if (visit(step(s, c))) return true;
    return false;
  }

  template <class F>
  void for_each_open(const State& s, F&& f) const {
    for (std::size_t p = 0; p < s.rem.size(); ++p)
      if (s.rem[p] > 0)
        for (std::size_t a = 0; a < t_.parts[p].pool->atoms.size(); ++a) f(p, a);
  }

  // An atom whose pick cannot change the reachable set.
  static bool absorbed(const State& s, const Atom& a, bool base_zero) {
    if (!base_zero) return false;
    if (gcd0(s.modulus, a.modulus) != s.modulus) return false;
    return std::includes(s.gens.begin(), s.gens.end(), a.gens.begin(), a.gens.end());
  }

  // A denominator prime of r not covered by the chosen generators must come
  // from a remaining pick. Returns false when every denominator is covered;
  // otherwise fills the smallest candidate list (possibly empty).
  bool denominator_candidates(const State& s, std::vector<Cand>& out) const {
    BigInt u = q_den(s.r.q);
    for (;;) {
      BigInt g;
      mpz_gcd(g.get_mpz_t(), u.get_mpz_t(), s.gen_den.get_mpz_t());
      if (g == 1) break;
      u /= g;
    }
    if (u == 1) return false;
    std::vector<BigInt> factors;
    for (unsigned long p = 2; p < 10000 && u > 1 && BigInt(p) * p <= u; ++p) {
      if (!mpz_divisible_ui_p(u.get_mpz_t(), p)) continue;
      factors.emplace_back(p);
      while (mpz_divisible_ui_p(u.get_mpz_t(), p)) u /= p;
    }
    if (u > 1) factors.push_back(u);
    bool first = true;
    for (const auto& f : factors) {
      std::vector<Cand> c;
      for_each_open(s, [&](std::size_t p, std::size_t a) {
        BigInt g;
        mpz_gcd(g.get_mpz_t(), f.get_mpz_t(), t_.parts[p].pool->den[a].get_mpz_t());
        if (g > 1) c.push_back({p, a});
      });
      if (first || c.size() < out.size()) out = std::move(c);
      first = false;
      if (out.empty()) break;
    }
    return true;
  }

  State step(const State& s, const Cand& c) const {
    const Atom& a = t_.parts[c.part].pool->atoms[c.atom];
    State n;
    n.r = ks_.sub(s.r, a.base);
    n.gens = merge_gens(s.gens, a.gens);
    n.gen_den = a.gens.empty() ? s.gen_den : lcm(s.gen_den, gens_den(a.gens));
    n.modulus = gcd0(s.modulus, a.modulus);
    n.rem = s.rem;
    --n.rem[c.part];
    n.chosen = s.chosen;
    const auto key = static_cast<std::uint32_t>(c.part << 20 | c.atom);
    n.chosen.insert(std::upper_bound(n.chosen.begin(), n.chosen.end(), key), key);
    return n;
  }

  const KSpace& ks_;
  const SumTerm& t_;
  std::set<std::vector<std::uint32_t>> seen_;
};

}  // namespace

Atom make_atom(const KSpace& ks, KElem base, std::vector<KElem> gens, std::int64_t modulus) {
  if (modulus < 0) throw ArgumentError("lattice modulus must be non-negative");
  ks.check_shape(base);
  Atom a;
  a.base = std::move(base);
  a.modulus = modulus;
  for (auto& g : gens) {
    ks.check_shape(g);
    if (!ks.is_zero(g)) a.gens.push_back(canonical_sign(ks, g));
  }
  std::sort(a.gens.begin(), a.gens.end());
  a.gens.erase(std::unique(a.gens.begin(), a.gens.end()), a.gens.end());
  return a;
}

Atom lattice_atom(const KSpace& ks, std::int64_t s) { return make_atom(ks, ks.zero(), {}, s); }

bool atom_subsumed(const Atom& a, const Atom& b) {
  if (a.base != b.base) return false;
  if (b.modulus == 0 ? a.modulus != 0 : a.modulus % b.modulus != 0) return false;
  return std::includes(b.gens.begin(), b.gens.end(), a.gens.begin(), a.gens.end());
}

PoolPtr make_pool(const KSpace& ks, std::vector<Atom> atoms) {
  auto pool = std::make_shared<Pool>();
  std::sort(atoms.begin(), atoms.end());
  atoms.erase(std::unique(atoms.begin(), atoms.end()), atoms.end());
  pool->atoms = std::move(atoms);
  for (std::size_t i = 0; i < pool->atoms.size(); ++i) {
    const Atom& a = pool->atoms[i];
    pool->den.push_back(lcm(q_den(a.base.q), gens_den(a.gens)));
    pool->h_active.push_back(h_active(ks, a));
    const bool bz = ks.is_zero(a.base);
    pool->base_zero.push_back(bz);
    if (bz && (pool->closer < 0 || a.gens.size() < pool->atoms[static_cast<std::size_t>(pool->closer)].gens.size()))
      pool->closer = static_cast<int>(i);
  }
  return pool;
}

SymSet SymSet::of(Atom a) {
  SymSet s;
  s.atoms.push_back(std::move(a));
  return s;
}

std::size_t SymSet::description_size() const {
  std::size_t n = atoms.size();
  for (const auto& t : sums) {
    ++n;
    for (const auto& p : t.parts) n += p.pool->atoms.size();
  }
  return n;
}

bool operator==(const SumTerm& a, const SumTerm& b) {
  if (a.offset != b.offset || a.parts.size() != b.parts.size()) return false;
  for (std::size_t i = 0; i < a.parts.size(); ++i)
    if (a.parts[i].count != b.parts[i].count || !pool_same(a.parts[i].pool, b.parts[i].pool)) return false;
  return true;
}

bool operator==(const SymSet& a, const SymSet& b) { return a.atoms == b.atoms && a.sums == b.sums; }

bool member(const KSpace& ks, const KElem& x, const Atom& a) {
  return coset_contains(ks, ks.sub(x, a.base), a.gens, a.modulus, gens_den(a.gens));
}

bool member(const KSpace& ks, const KElem& x, const SumTerm& t) {
  if (t.parts.empty()) return member(ks, x, t.offset);
  return TermSearch(ks, t).run(x);
}

bool member(const KSpace& ks, const KElem& x, const SymSet& s) {
  for (const auto& a : s.atoms)
    if (member(ks, x, a)) return true;
  for (const auto& t : s.sums)
    if (member(ks, x, t)) return true;
  return false;
}

SymSet unite(const KSpace&, const SymSet& s, const SymSet& t) {
  SymSet out;
  out.atoms = s.atoms;
  out.atoms.insert(out.atoms.end(), t.atoms.begin(), t.atoms.end());
  std::sort(out.atoms.begin(), out.atoms.end());
  out.atoms.erase(std::unique(out.atoms.begin(), out.atoms.end()), out.atoms.end());
  {
    std::vector<char> drop(out.atoms.size(), 0);
    for (std::size_t i = 0; i < out.atoms.size();) {
      std::size_t j = i;
      while (j < out.atoms.size() && out.atoms[j].base == out.atoms[i].base) ++j;
      for (std::size_t a = i; a < j; ++a)
        for (std::size_t b = i; b < j && !drop[a]; ++b)
          if (a != b && !drop[b] && atom_subsumed(out.atoms[a], out.atoms[b])) drop[a] = 1;
      i = j;
    }
    std::vector<Atom> kept;
    for (std::size_t i = 0; i < out.atoms.size(); ++i)
      if (!drop[i]) kept.push_back(std::move(out.atoms[i]));
    out.atoms = std::move(kept);
  }

  std::vector<SumTerm> sums = s.sums;
  sums.insert(sums.end(), t.sums.begin(), t.sums.end());
  std::sort(sums.begin(), sums.end(), term_less);
  sums.erase(std::unique(sums.begin(), sums.end()), sums.end());
  std::vector<char> drop(sums.size(), 0);
  for (std::size_t a = 0; a < sums.size(); ++a)
    for (std::size_t b = 0; b < sums.size() && !drop[a]; ++b)
      if (a != b && !drop[b] && term_subsumed(sums[a], sums[b])) drop[a] = 1;
  for (std::size_t i = 0; i < sums.size(); ++i)
    if (!drop[i]) out.sums.push_back(std::move(sums[i]));
  return out;
}

SymSet sum(const KSpace& ks, const SymSet& s, const SymSet& t) {
  const auto ts = terms_of(ks, s), tt = terms_of(ks, t);
  SymSet raw;
  for (const auto& a : ts)
    for (const auto& b : tt) {
      SumTerm c{add_atoms(ks, a.offset, b.offset), a.parts};
      c.parts.insert(c.parts.end(), b.parts.begin(), b.parts.end());
      auto n = normalize(ks, std::move(c));
      if (!n) continue;
      if (n->parts.empty()) raw.atoms.push_back(std::move(n->offset));
      else raw.sums.push_back(std::move(*n));
    }
  return unite(ks, raw, SymSet{});
}

SymSet negate(const KSpace& ks, const SymSet& s) {
  SymSet out;
  for (const auto& a : s.atoms) out.atoms.push_back(negate_atom(ks, a));
  for (const auto& t : s.sums) {
    SumTerm n{negate_atom(ks, t.offset), {}};
    for (const auto& p : t.parts) {
      std::vector<Atom> atoms;
      for (const auto& a : p.pool->atoms) atoms.push_back(negate_atom(ks, a));
      PoolPtr np = make_pool(ks, std::move(atoms));
      n.parts.push_back(Part{np->atoms == p.pool->atoms ? p.pool : np, p.count});
    }
    out.sums.push_back(*normalize(ks, std::move(n)));
  }
  return unite(ks, out, SymSet{});
}

bool covers(const SymSet& big, const SymSet& small) {
  for (const auto& a : small.atoms) {
    bool ok = std::any_of(big.atoms.begin(), big.atoms.end(), [&](const Atom& b) { return atom_subsumed(a, b); });
    const SumTerm as{a, {}};
    ok = ok || std::any_of(big.sums.begin(), big.sums.end(), [&](const SumTerm& b) { return term_subsumed(as, b); });
    if (!ok) return false;
  }
  for (const auto& t : small.sums)
    if (!std::any_of(big.sums.begin(), big.sums.end(), [&](const SumTerm& b) { return term_subsumed(t, b); }))
      return false;
  return true;
}

bool is_symmetric(const KSpace& ks, const SymSet& s) { return covers(s, negate(ks, s)); }

std::vector<KElem> grp_bounded(const KSpace& ks, const std::vector<KElem>& a, int k) {
  if (k < 1) throw ArgumentError("grp_bounded: k must be positive");
  std::set<KElem> all{ks.zero()};
  std::set<KElem> frontier{ks.zero()};
  for (int j = 1; j <= k; ++j) {
    std::set<KElem> next;
    for (const auto& x : frontier)
      for (const auto& y : a) next.insert(ks.add(x, y));
    all.insert(next.begin(), next.end());
    frontier = std::move(next);
  }
  return {all.begin(), all.end()};
}

bool cyclic_in_set(const KSpace& ks, const KElem& g, const SymSet& s, CyclicMode mode, int bound) {
  if (mode == CyclicMode::Bounded) {
    for (int n = -bound; n <= bound; ++n)
      if (!member(ks, ks.scale(n, g), s)) return false;
    return true;
  }
  if (ks.is_zero(g)) return member(ks, g, s);
  const KElem c = canonical_sign(ks, g);
  auto lists = [&](const Atom& a) {
    if (std::binary_search(a.gens.begin(), a.gens.end(), c)) return true;
    if (a.modulus == 0 || !ks.h_is_zero(g.h)) return false;
    const BigInt bs(static_cast<long>(a.modulus));
    return std::all_of(g.q.begin(), g.q.end(), [&](const Rat& x) {
      return x.is_integer() && mpz_divisible_p(x.num().get_mpz_t(), bs.get_mpz_t());
    });
  };
  for (const auto& a : s.atoms)
    if (ks.is_zero(a.base) && lists(a)) return true;
  for (const auto& t : s.sums) {
    if (!ks.is_zero(t.offset.base)) continue;
    if (!std::all_of(t.parts.begin(), t.parts.end(), [](const Part& p) { return p.pool->has_zero_atom(); })) continue;
    if (lists(t.offset)) return true;
    for (const auto& p : t.parts)
      for (std::size_t i = 0; i < p.pool->atoms.size(); ++i)
        if (p.pool->base_zero[i] && lists(p.pool->atoms[i])) return true;
  }
  return false;
}

bool member_mod_qpi(const QVec& x, const std::vector<QVec>& gens, const PrimeSet& pi) {
  const std::size_t m = x.size();
  BigInt d = denominator_lcm(x);
  for (const auto& g : gens) d = lcm(d, denominator_lcm(g));
  // With Q_emptyset = {0} the remainder must vanish exactly.
  const BigInt mod = pi.empty() ? BigInt(0) : part_outside(d, pi);
  if (mod == 1) return true;
  const std::size_t r = gens.size();
  const std::size_t slack = pi.empty() ? 0 : m;
  IntMatrix a(m, r + slack);
  std::vector<BigInt> rhs(m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < r; ++j) a(i, j) = (gens[j][i] * Rat(d)).num();
    if (slack) a(i, r + i) = mod;
    rhs[i] = (x[i] * Rat(d)).num();
  }
  return snf_solve(a, rhs).has_value();
}

std::int64_t Sampler::coefficient() {
  const auto span = static_cast<std::uint64_t>(2 * bound_ + 1);
  return static_cast<std::int64_t>(rng_() % span) - bound_;
}

std::size_t Sampler::index(std::size_t n) { return static_cast<std::size_t>(rng_() % n); }

KElem Sampler::point(const KSpace& ks, const Atom& a) {
  KElem x = a.base;
  for (const auto& g : a.gens) x = ks.add(x, ks.scale(coefficient(), g));
  if (a.modulus != 0) {
    const Rat s(static_cast<long>(a.modulus));
    for (auto& c : x.q) c += s * Rat(static_cast<long>(coefficient()));
  }
  return x;
}

KElem Sampler::point(const KSpace& ks, const SumTerm& t) {
  KElem x = point(ks, t.offset);
  for (const auto& p : t.parts)
    for (int c = 0; c < p.count; ++c) x = ks.add(x, point(ks, p.pool->atoms[index(p.pool->atoms.size())]));
  return x;
}

KElem Sampler::point(const KSpace& ks, const SymSet& s) {
  const std::size_t n = s.atoms.size() + s.sums.size();
  if (n == 0) throw ArgumentError("cannot sample the empty set");
  const std::size_t i = index(n);
  return i < s.atoms.size() ? point(ks, s.atoms[i]) : point(ks, s.sums[i - s.atoms.size()]);
}

bool witness_identity(const KSpace& ks, const SSGPWitness& w) {
  KElem acc = w.head;
  for (const auto& p : w.parts) acc = ks.add(acc, p);
  return acc == w.target;
}

Json to_json(const KSpace&, const KElem& x) {
  Json j = Json::array();
  for (const auto& c : x.q) j.push_back(c.str());
  for (auto v : x.h.free) j.push_back(std::to_string(v));
  for (auto v : x.h.torsion) j.push_back(std::to_string(v));
  return j;
}

KElem kelem_from_json(const KSpace& ks, const Json& j) {
  const std::size_t a = ks.h().free_rank, b = ks.h().torsion.size();
  if (!j.is_array() || j.size() != ks.m() + a + b) throw ArgumentError("element has wrong length: " + j.dump());
  QVec q;
  std::vector<std::int64_t> free, tors;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string s = j[i].get<std::string>();
    if (i < ks.m()) {
      q.push_back(Rat::parse(s));
      continue;
    }
    const Rat v = Rat::parse(s);
    if (!v.is_integer() || !v.num().fits_slong_p()) throw ArgumentError("h-coordinate must be a small integer: " + s);
    (i < ks.m() + a ? free : tors).push_back(v.num().get_si());
  }
  KElem x = ks.make(std::move(q), std::move(free), std::move(tors));
  for (std::size_t k = 0; k < b; ++k)
    if (j[ks.m() + a + k].get<std::string>() != std::to_string(x.h.torsion[k]))
      throw ArgumentError("torsion residue not reduced: " + j.dump());
  return x;
}

Json to_json(const KSpace& ks, const Atom& a) {
  Json j;
  j["base"] = to_json(ks, a.base);
  j["gens"] = Json::array();
  for (const auto& g : a.gens) j["gens"].push_back(to_json(ks, g));
  j["modulus"] = a.modulus;
  return j;
}

Atom atom_from_json(const KSpace& ks, const Json& j) {
  std::vector<KElem> gens;
  for (const auto& g : j.at("gens")) gens.push_back(kelem_from_json(ks, g));
  Atom a = make_atom(ks, kelem_from_json(ks, j.at("base")), gens, j.at("modulus").get<std::int64_t>());
  if (a.gens.size() != gens.size() || !std::equal(a.gens.begin(), a.gens.end(), gens.begin()))
    throw ArgumentError("atom generators are not in canonical form");
  return a;
}

std::size_t PoolTable::intern(const PoolPtr& p) {
  for (std::size_t i = 0; i < pools_.size(); ++i)
    if (pool_same(pools_[i], p)) return i;
  pools_.push_back(p);
  return pools_.size() - 1;
}

PoolPtr PoolTable::at(std::size_t i) const {
  if (i >= pools_.size()) throw ArgumentError("pool index " + std::to_string(i) + " out of range");
  return pools_[i];
}

Json PoolTable::to_json(const KSpace& ks) const {
  Json j = Json::array();
  for (const auto& p : pools_) {
    Json atoms = Json::array();
    for (const auto& a : p->atoms) atoms.push_back(ssgp::to_json(ks, a));
    j.push_back(std::move(atoms));
  }
  return j;
}

PoolTable PoolTable::from_json(const KSpace& ks, const Json& j) {
  PoolTable t;
  for (const auto& atoms : j) {
    std::vector<Atom> v;
    for (const auto& a : atoms) v.push_back(atom_from_json(ks, a));
    t.pools_.push_back(make_pool(ks, std::move(v)));
  }
  return t;
}

Json to_json(const KSpace& ks, const SymSet& s, PoolTable* table) {
  Json j;
  j["atoms"] = Json::array();
  for (const auto& a : s.atoms) j["atoms"].push_back(to_json(ks, a));
  j["sums"] = Json::array();
  for (const auto& t : s.sums) {
    Json jt;
    jt["offset"] = to_json(ks, t.offset);
    jt["parts"] = Json::array();
    for (const auto& p : t.parts) {
      Json jp;
      if (table) {
        jp["pool"] = table->intern(p.pool);
      } else {
        jp["pool"] = Json::array();
        for (const auto& a : p.pool->atoms) jp["pool"].push_back(to_json(ks, a));
      }
      jp["count"] = p.count;
      jt["parts"].push_back(std::move(jp));
    }
    j["sums"].push_back(std::move(jt));
  }
  return j;
}

SymSet symset_from_json(const KSpace& ks, const Json& j, const PoolTable* table) {
  SymSet s;
  for (const auto& a : j.at("atoms")) s.atoms.push_back(atom_from_json(ks, a));
  for (const auto& jt : j.at("sums")) {
    SumTerm t{atom_from_json(ks, jt.at("offset")), {}};
    for (const auto& jp : jt.at("parts")) {
      PoolPtr pool;
      const Json& ref = jp.at("pool");
      if (ref.is_number_unsigned()) {
        if (!table) throw ArgumentError("pool reference without a pool table");
        pool = table->at(ref.get<std::size_t>());
      } else {
        std::vector<Atom> atoms;
        for (const auto& a : ref) atoms.push_back(atom_from_json(ks, a));
        pool = make_pool(ks, std::move(atoms));
      }
      const int count = jp.at("count").get<int>();
      if (count < 1) throw ArgumentError("part count must be positive");
      t.parts.push_back(Part{pool, count});
    }
    s.sums.push_back(std::move(t));
  }
  return s;
}

Json to_json(const KSpace& ks, const SSGPWitness& w) {
  Json j;
  j["target"] = to_json(ks, w.target);
  j["level"] = w.level;
  j["head"] = to_json(ks, w.head);
  j["parts"] = Json::array();
  for (const auto& p : w.parts) j["parts"].push_back(to_json(ks, p));
  return j;
}

SSGPWitness witness_from_json(const KSpace& ks, const Json& j) {
  SSGPWitness w;
  w.target = kelem_from_json(ks, j.at("target"));
  w.level = j.at("level").get<std::size_t>();
  w.head = kelem_from_json(ks, j.at("head"));
  for (const auto& p : j.at("parts")) w.parts.push_back(kelem_from_json(ks, p));
  return w;
}

}  // namespace ssgp
