#include "ssgp/poset.hpp"

#include <algorithm>
#include <sstream>

namespace ssgp {

namespace {

// Independent sample streams per check and level.
std::uint64_t stream(std::uint64_t seed, std::uint64_t check, std::uint64_t level) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (check * 131 + level + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

bool atom_in_subgroup(const Instance& inst, const Atom& a, const PrimeSet& pi) {
  auto ok = [&](const KElem& x) { return inst.g.contains(x.q) && qpi_contains(x.q, pi); };
  return ok(a.base) && std::all_of(a.gens.begin(), a.gens.end(), ok);
}

bool set_in_subgroup(const Instance& inst, const SymSet& s, const PrimeSet& pi) {
  for (const auto& a : s.atoms)
    if (!atom_in_subgroup(inst, a, pi)) return false;
  for (const auto& t : s.sums) {
    if (!atom_in_subgroup(inst, t.offset, pi)) return false;
    for (const auto& p : t.parts)
      for (const auto& a : p.pool->atoms)
        if (!atom_in_subgroup(inst, a, pi)) return false;
  }
  return true;
}

bool divides(std::int64_t d, std::int64_t n) { return d != 0 && n % d == 0; }

// Every term visibly absorbs s Z^m.
bool absorbs_lattice(const SymSet& u, std::int64_t s) {
  for (const auto& a : u.atoms)
    if (!divides(a.modulus, s)) return false;
  for (const auto& t : u.sums)
    if (!divides(t.offset.modulus, s)) return false;
  return true;
}

std::string level_note(std::size_t i, const std::string& what) {
  return "level " + std::to_string(i) + ": " + what;
}

}  // namespace

bool Report::ok() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

const CheckResult* Report::find(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

void Report::add(std::string name, bool pass, std::string detail) {
  checks.push_back(CheckResult{std::move(name), pass, std::move(detail)});
}

void Report::merge(const Report& other, const std::string& prefix) {
  for (const auto& c : other.checks) checks.push_back(CheckResult{prefix + c.name, c.pass, c.detail});
}

Json Report::to_json() const {
  Json j = Json::array();
  for (const auto& c : checks) {
    Json e;
    e["check"] = c.name;
    e["pass"] = c.pass;
    if (!c.detail.empty()) e["detail"] = c.detail;
    j.push_back(std::move(e));
  }
  return j;
}

Condition root(const Instance& inst) {
  const KSpace ks = inst.space();
  Condition p;
  p.n = 0;
  p.u.push_back(SymSet::of(lattice_atom(ks, 1)));
  p.s.push_back(1);
  return p;
}

Report validate(const Instance& inst, const Condition& p, const SampleConfig& cfg) {
  const KSpace ks = inst.space();
  Report r;
  r.add("1", true);

  const bool shape = p.u.size() == p.n + 1 && p.s.size() == p.n + 1;
  r.add("2", shape, shape ? "" : "U and s lists must have n+1 entries");
  if (!shape) return r;
  {
    std::string bad;
    for (std::size_t i = 0; i <= p.n; ++i)
      if (p.s[i] < 1) bad = level_note(i, "s_i is not positive");
    r.add("3", bad.empty(), bad);
  }
  {
    std::string bad;
    for (std::size_t i = 0; i <= p.n && bad.empty(); ++i) {
      if (!member(ks, ks.zero(), p.u[i])) bad = level_note(i, "0 is missing");
      else if (!set_in_subgroup(inst, p.u[i], p.pi)) bad = level_note(i, "an atom leaves (G cap Q_pi) + H");
    }
    r.add("4", bad.empty(), bad);
  }
  {
    std::string bad;
    for (std::size_t i = 0; i <= p.n && bad.empty(); ++i)
      if (!is_symmetric(ks, p.u[i])) bad = level_note(i, "not visibly symmetric");
    r.add("5", bad.empty(), bad);
  }
  {
    std::string bad;
    for (std::size_t i = 0; i <= p.n && bad.empty(); ++i)
      if (p.s[i] >= 1 && !absorbs_lattice(p.u[i], p.s[i])) bad = level_note(i, "a lattice modulus does not divide s_i");
    r.add("6", bad.empty(), bad);
  }
  {
    std::string bad;
    for (std::size_t i = 0; i + 1 <= p.n && bad.empty(); ++i) {
      Sampler sm(stream(cfg.seed, 7, i), cfg.bound);
      // An empty level has nothing to sample; (4) already flags it.
      for (std::size_t t = 0; t < cfg.budget && bad.empty() && !p.u[i + 1].empty(); ++t) {
        const KElem x = sm.point(ks, p.u[i + 1]), y = sm.point(ks, p.u[i + 1]);
        if (!member(ks, ks.add(x, y), p.u[i]))
          bad = level_note(i, ks.str(x) + " + " + ks.str(y) + " not in U_" + std::to_string(i));
      }
    }
    r.add("7", bad.empty(), bad);
  }
  {
    std::string bad;
    for (std::size_t i = 0; i < p.n && bad.empty(); ++i)
      if (!divides(p.s[i], p.s[i + 1])) bad = level_note(i, "s_i does not divide s_{i+1}");
    r.add("8", bad.empty(), bad);
  }
  {
    std::string bad;
    for (std::size_t i = 0; i < p.n && bad.empty(); ++i) {
      Sampler sm(stream(cfg.seed, 9, i), cfg.bound);
      for (std::size_t t = 0; t < cfg.budget && bad.empty() && !p.u[i + 1].empty(); ++t) {
        const KElem x = sm.point(ks, p.u[i + 1]);
        if (!member(ks, x, p.u[i])) bad = level_note(i, ks.str(x) + " in U_{i+1} but not in U_i");
      }
    }
    r.add("nested", bad.empty(), bad);
  }
  {
    std::string bad;
    for (std::size_t i = 0; i <= p.n && bad.empty(); ++i) {
      Sampler sm(stream(cfg.seed, 10, i), cfg.bound);
      for (std::size_t t = 0; t < cfg.budget && bad.empty(); ++t) {
        KElem x = ks.zero();
        for (auto& c : x.q) c = Rat(static_cast<long>(p.s[i] * sm.coefficient()));
        if (!member(ks, x, p.u[i])) bad = level_note(i, ks.str(x) + " in s_i Z^m but not in U_i");
      }
    }
    r.add("lattice", bad.empty(), bad);
  }
  return r;
}

Report leq(const Instance& inst, const Condition& q, const Condition& p, const SampleConfig& cfg) {
  const KSpace ks = inst.space();
  Report r;
  r.add("i", p.pi.subset_of(q.pi), p.pi.subset_of(q.pi) ? "" : p.pi.str() + " not inside " + q.pi.str());
  const bool deeper = p.n <= q.n && q.u.size() > p.n && q.s.size() > p.n;
  r.add("ii", deeper);
  if (!deeper) return r;
  {
    std::string bad;
    std::size_t filtered = 0;
    for (std::size_t i = 0; i <= p.n && bad.empty(); ++i) {
      if (!covers(q.u[i], p.u[i])) {
        bad = level_note(i, "a term of U_i^p is not visibly inside U_i^q");
        break;
      }
      Sampler sm(stream(cfg.seed, 3, i), cfg.bound);
      for (std::size_t t = 0; t < cfg.budget && bad.empty(); ++t) {
        const KElem x = sm.point(ks, q.u[i]);
        if (!qpi_contains(x.q, p.pi)) continue;
        ++filtered;
        if (!member(ks, x, p.u[i])) bad = level_note(i, ks.str(x) + " is in U_i^q and Q_pi + H but not in U_i^p");
      }
    }
    r.add("iii", bad.empty(), bad.empty() ? std::to_string(filtered) + " filtered samples" : bad);
  }
  bool same_s = true;
  for (std::size_t i = 0; i <= p.n; ++i) same_s = same_s && q.s[i] == p.s[i];
  r.add("iv", same_s);
  return r;
}

Condition extend_with_avoidance(const Instance& inst, const Condition& p, const KElem& x) {
  const KSpace ks = inst.space();
  ks.check_shape(x);
  if (ks.is_zero(x)) throw ArgumentError("cannot avoid the zero element");
  if (!inst.g.contains(x.q)) throw ArgumentError("element is outside G + H");
  if (!qpi_contains(x.q, p.pi)) throw ArgumentError("element q-part is outside Q_pi for pi = " + p.pi.str());

  const std::int64_t sn = p.s.back();
  std::int64_t k = 1;
  if (ks.h_is_zero(x.h) && is_integral(x.q)) {
    auto in_lattice = [&](std::int64_t mod) {
      const BigInt bm(static_cast<long>(mod));
      return std::all_of(x.q.begin(), x.q.end(),
                         [&](const Rat& c) { return mpz_divisible_p(c.num().get_mpz_t(), bm.get_mpz_t()); });
    };
    while (in_lattice(k * sn)) ++k;
  }
  Condition q = p;
  q.n = p.n + 1;
  q.s.push_back(k * sn);
  q.u.push_back(SymSet::of(lattice_atom(ks, k * sn)));
  if (member(ks, x, q.u.back())) throw ConstructionError("avoidance failed for " + ks.str(x));
  return q;
}

Json to_json(const Instance& inst, const Condition& p, PoolTable* table) {
  const KSpace ks = inst.space();
  Json j;
  j["pi"] = p.pi.primes();
  j["n"] = p.n;
  j["s"] = p.s;
  j["u"] = Json::array();
  for (const auto& u : p.u) j["u"].push_back(to_json(ks, u, table));
  return j;
}

Condition condition_from_json(const Instance& inst, const Json& j, const PoolTable* table) {
  const KSpace ks = inst.space();
  Condition p;
  p.pi = PrimeSet(j.at("pi").get<std::vector<Prime>>());
  p.n = j.at("n").get<std::size_t>();
  p.s = j.at("s").get<std::vector<std::int64_t>>();
  for (const auto& u : j.at("u")) p.u.push_back(symset_from_json(ks, u, table));
  return p;
}

}  // namespace ssgp
