// Acceptance gate: one PASS/FAIL line per criterion. The oracles here are
// written independently of the library (plain int64 residues, trial
// division) and only call into it for the objects under test.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "ssgp/config.hpp"
#include "ssgp/driver.hpp"

using namespace ssgp;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::int64_t to_i64(const BigInt& v) { return v.get_si(); }

std::int64_t mod(std::int64_t a, std::int64_t n) { return ((a % n) + n) % n; }

// ---------------------------------------------------------------------------
// Criterion 1: atom membership against exhaustive residue enumeration.

// All residues of b + <g_1..g_r> modulo D*s Z^m (q-part scaled by D) and the
// torsion orders. Complete because every generator has finite order there.
class AtomOracle {
 public:
  AtomOracle(const Atom& a, const std::vector<std::int64_t>& torsion, std::size_t m) : torsion_(torsion), m_(m) {
    d_ = 1;
    auto absorb = [&](const KElem& e) {
      for (const auto& c : e.q) d_ = std::lcm(d_, to_i64(c.den()));
    };
    absorb(a.base);
    for (const auto& g : a.gens) absorb(g);
    l_ = d_ * a.modulus;
    std::vector<std::vector<std::int64_t>> gens;
    for (const auto& g : a.gens) gens.push_back(scaled(g));
    std::vector<std::int64_t> orders;
    for (const auto& g : gens) orders.push_back(order(g));
    std::vector<std::int64_t> c(gens.size(), 0);
    const std::vector<std::int64_t> base = scaled(a.base);
    while (true) {
      std::vector<std::int64_t> v = base;
      for (std::size_t j = 0; j < gens.size(); ++j)
        for (std::size_t t = 0; t < v.size(); ++t) v[t] += c[j] * gens[j][t];
      residues_.insert(normalize(v));
      std::size_t j = 0;
      while (j < c.size() && ++c[j] == orders[j]) c[j++] = 0;
      if (j == c.size()) break;
    }
  }

  std::int64_t max_order(const Atom& a) const {
    std::int64_t o = 1;
    for (const auto& g : a.gens) o = std::max(o, order(scaled(g)));
    return o;
  }

  bool member(const KElem& x) const {
    for (const auto& c : x.q)
      if ((to_i64(c.num()) * d_) % to_i64(c.den()) != 0) return false;
    return residues_.contains(normalize(scaled(x)));
  }

 private:
  std::vector<std::int64_t> scaled(const KElem& e) const {
    std::vector<std::int64_t> v;
    for (const auto& c : e.q) v.push_back(to_i64(c.num()) * d_ / to_i64(c.den()));
    for (auto t : e.h.torsion) v.push_back(t);
    return v;
  }

  std::vector<std::int64_t> normalize(std::vector<std::int64_t> v) const {
    for (std::size_t t = 0; t < v.size(); ++t) v[t] = mod(v[t], t < m_ ? l_ : torsion_[t - m_]);
    return v;
  }

  std::int64_t order(const std::vector<std::int64_t>& g) const {
    for (std::int64_t t = 1;; ++t) {
      bool zero = true;
      for (std::size_t i = 0; i < g.size() && zero; ++i) zero = mod(t * g[i], i < m_ ? l_ : torsion_[i - m_]) == 0;
      if (zero) return t;
    }
  }

  std::vector<std::int64_t> torsion_;
  std::size_t m_;
  std::int64_t d_ = 1, l_ = 1;
  std::set<std::vector<std::int64_t>> residues_;
};

Outcome criterion_membership() {
  std::mt19937_64 rng(2024);
  auto pick = [&](std::int64_t lo, std::int64_t hi) { return lo + static_cast<std::int64_t>(rng() % (hi - lo + 1)); };
  const std::vector<std::vector<std::int64_t>> hs = {{}, {2}, {3}, {2, 2}};
  const std::vector<std::int64_t> gen_dens = {1, 2, 3, 4, 6};
  std::size_t atoms = 0, points = 0, agree = 0, members = 0;
  std::string first;
  while (atoms < 500) {
    const std::size_t m = static_cast<std::size_t>(pick(1, 3));
    const auto& torsion = hs[static_cast<std::size_t>(pick(0, 3))];
    const KSpace ks(m, HSpec{0, torsion});
    auto random_elem = [&](std::int64_t box, const std::vector<std::int64_t>& dens) {
      QVec q;
      for (std::size_t i = 0; i < m; ++i)
        q.push_back(Rat(BigInt(pick(-box, box)), BigInt(dens[static_cast<std::size_t>(pick(0, static_cast<std::int64_t>(dens.size()) - 1))])));
      std::vector<std::int64_t> t;
      for (auto d : torsion) t.push_back(pick(0, d - 1));
      return ks.make(q, {}, t);
    };
    std::vector<KElem> gens;
    for (std::int64_t r = pick(0, 3); r > 0; --r) gens.push_back(random_elem(6, gen_dens));
    const Atom a = make_atom(ks, random_elem(15, {1, 2, 3, 4, 5, 6}), gens, pick(1, 12));
    const AtomOracle oracle(a, torsion, m);
    if (oracle.max_order(a) > 31) continue;
    ++atoms;
    for (int t = 0; t < 16; ++t) {
      KElem x = a.base;
      for (const auto& g : a.gens) x = ks.add(x, ks.scale(pick(-15, 15), g));
      QVec lattice;
      for (std::size_t i = 0; i < m; ++i) lattice.push_back(Rat(a.modulus * pick(-15, 15)));
      x = ks.add(x, ks.from_q(lattice));
      if (t % 2) x = ks.add(x, random_elem(3, {1, 2, 3, 5, 7}));
      const bool want = oracle.member(x), got = member(ks, x, a);
      ++points;
      members += want;
      if (want == got) ++agree;
      else if (first.empty()) first = ks.str(x) + " vs atom at " + ks.str(a.base);
    }
  }
  std::ostringstream d;
  d << atoms << " atoms, " << points << " points (" << members << " members), " << agree << " agree";
  if (!first.empty()) d << "; first mismatch " << first;
  return {agree == points, d.str()};
}

// ---------------------------------------------------------------------------
// Shared number-theory oracle: x in Q_pi + Z^m iff every denominator prime
// lies in pi.

BigInt strip(BigInt d, const std::vector<Prime>& pi) {
  for (Prime p : pi)
    while (mpz_divisible_ui_p(d.get_mpz_t(), p)) d /= p;
  return d;
}

bool in_qpi_plus_z(const QVec& x, const std::vector<Prime>& pi) {
  for (const auto& c : x)
    if (strip(c.den(), pi) != 1) return false;
  return true;
}

bool in_s_lattice(const QVec& x, std::int64_t s) {
  for (const auto& c : x)
    if (!c.is_integer() || !mpz_divisible_ui_p(c.num().get_mpz_t(), static_cast<unsigned long>(s))) return false;
  return true;
}

std::vector<Prime> factor(BigInt n) {
  std::vector<Prime> out;
  for (Prime p = 2; p * p <= n; ++p)
    if (mpz_divisible_ui_p(n.get_mpz_t(), p)) {
      out.push_back(p);
      while (mpz_divisible_ui_p(n.get_mpz_t(), p)) n /= p;
    }
  if (n > 1) out.push_back(n.get_ui());
  return out;
}

std::vector<Prime> random_subset(std::mt19937_64& rng, const std::vector<Prime>& from) {
  std::vector<Prime> out;
  for (Prime p : from)
    if (rng() % 2) out.push_back(p);
  return out;
}

// ---------------------------------------------------------------------------
// Criterion 2: find_g postconditions.

Outcome criterion_find_g() {
  std::mt19937_64 rng(7);
  const WideGroup full = WideGroup::full_q(2), loc = WideGroup::localized(2, 2, 3);
  std::size_t calls = 0, failures = 0;
  std::string first;
  for (int t = 0; t < 240; ++t) {
    const WideGroup& grp = t % 2 ? loc : full;
    const std::vector<Prime> pi = random_subset(rng, {2, 3, 5, 7, 11, 13});
    const std::int64_t k = 1 + static_cast<std::int64_t>(rng() % 4), s = 1 + static_cast<std::int64_t>(rng() % 6);
    const QVec g = find_g(grp, PrimeSet(pi), k, s);
    ++calls;
    std::string bad;
    if (!in_s_lattice(cyclic_cap_qpi(g, PrimeSet(pi)), s) || !in_s_lattice(cyclic_cap_ambient(g, PrimeSet(pi)), s))
      bad = "(i) cap generator outside sZ^m";
    for (long n = -60; n <= 60 && bad.empty(); ++n) {
      const QVec y = Rat(n) * g;
      if (in_qpi_plus_z(y, pi) && !in_s_lattice(y, s)) bad = "(i) fails at n = " + std::to_string(n);
    }
    for (long l = 1; l <= k && bad.empty(); ++l)
      if (in_qpi_plus_z(Rat(l) * g, pi) || in_qpi_plus_z(Rat(-l) * g, pi)) bad = "(ii) fails at l = " + std::to_string(l);
    for (const auto& c : g)
      for (Prime p : factor(c.den()))
        if (bad.empty() && &grp == &loc && p % 3 != 2) bad = "g outside G";
    if (!bad.empty()) {
      ++failures;
      if (first.empty()) first = bad + " for g = " + to_string(g);
    }
  }
  return {failures == 0, std::to_string(calls) + " calls, " + std::to_string(failures) + " failures" + (first.empty() ? "" : "; " + first)};
}

// ---------------------------------------------------------------------------
// Criterion 3: the iterative lemma on generated sequences.

Outcome criterion_lemma() {
  std::mt19937_64 rng(11);
  std::size_t runs = 0, failures = 0, brute = 0;
  std::string first;
  const std::int64_t ks[] = {2, 3, 5};
  for (int t = 0; t < 60; ++t) {
    const std::int64_t k = ks[t % 3], s = 1 + static_cast<std::int64_t>(rng() % 4);
    const std::size_t m = 1 + static_cast<std::size_t>(t % 2);
    const std::vector<Prime> pi0 = random_subset(rng, {2, 3, 5, 7});
    const GSequence seq = find_g_sequence(WideGroup::full_q(m), PrimeSet(pi0), k, s);
    QVec g;
    for (std::size_t i = 0; i < m; ++i) {
      BigInt den = 1;
      for (Prime p : pi0)
        if (rng() % 2) den *= p;
      g.push_back(Rat(BigInt(static_cast<long>(rng() % 21) - 10), den));
    }
    const Report r = check_lemma_iterative(seq.pis, seq.gs, s, g, 10);
    ++runs;
    std::string bad;
    for (const auto& c : r.checks)
      if (!c.pass && bad.empty()) bad = c.name + ": " + c.detail;
    if (r.checks.size() != 3) bad = "expected three checks";
    if (k == 2 && bad.empty()) {
      // Independent brute force over |a|,|b| <= 10 for A(ii) and B.
      ++brute;
      const QVec g0 = g - seq.gs[0] - seq.gs[1];
      for (long a = -10; a <= 10 && bad.empty(); ++a) {
        const QVec y = Rat(a) * seq.gs[1];
        if (in_qpi_plus_z(y, seq.pis[1].primes()) && !in_s_lattice(y, s)) bad = "A(ii) brute force";
        for (long l = 1; l <= 2 && bad.empty(); ++l)
          for (const QVec& gj : seq.gs)
            if (in_qpi_plus_z(Rat(l) * g0 - Rat(a) * gj, pi0)) bad = "B brute force";
        if (bad.empty() && in_qpi_plus_z(g0, pi0)) bad = "B brute force, empty J";
      }
    }
    if (!bad.empty()) {
      ++failures;
      if (first.empty()) first = bad;
    }
  }
  return {failures == 0, std::to_string(runs) + " sequences (" + std::to_string(brute) + " brute-forced), " +
                             std::to_string(failures) + " failures" + (first.empty() ? "" : "; " + first)};
}

// ---------------------------------------------------------------------------
// Criteria 4-7 share the chains they build.

const Instance E2E{WideGroup::full_q(1), HSpec{0, {2}}};
const SampleConfig SAMPLING{200, 0, 12};

struct Produced {
  Instance inst;
  std::vector<Condition> conditions;  ///< each one extends its predecessor
};
std::vector<Produced> produced;

bool witness_sums(const KSpace& ks, const SSGPWitness& w) {
  QVec q = w.head.q;
  std::vector<std::int64_t> t = w.head.h.torsion, f = w.head.h.free;
  for (const auto& g : w.parts) {
    q = q + g.q;
    for (std::size_t j = 0; j < t.size(); ++j) t[j] += g.h.torsion[j];
    for (std::size_t j = 0; j < f.size(); ++j) f[j] += g.h.free[j];
  }
  for (std::size_t j = 0; j < t.size(); ++j)
    if (mod(t[j] - w.target.h.torsion[j], ks.h().torsion[j]) != 0) return false;
  return q == w.target.q && f == w.target.h.free;
}

Outcome criterion_end_to_end() {
  const auto t0 = std::chrono::steady_clock::now();
  const FilterChain chain = build_chain(E2E, Budget{2, 10}, SAMPLING);
  const KSpace ks = E2E.space();
  produced.push_back({E2E, chain.conditions});

  std::string bad;
  std::size_t seps = 0, ssgps = 0;
  std::vector<SymSet> stages;
  for (std::size_t i = 0; i <= chain.max_level(); ++i) stages.push_back(stage_set(chain, i));
  for (const auto& x : enumerate_prefix(E2E, 10)) {
    if (!ks.is_zero(x)) {
      const std::size_t n = separation_certificate(chain, x);
      if (member(ks, x, stages[n])) bad = "separation of " + ks.str(x);
      ++seps;
    }
    for (std::size_t i = 0; i <= 2; ++i) {
      const SSGPWitness w = ssgp_certificate(chain, x, i);
      if (w.target != x || !witness_sums(ks, w)) bad = "witness identity for " + ks.str(x);
      ++ssgps;
    }
  }
  std::size_t violations = 0;
  for (std::size_t i = 0; i + 1 < stages.size(); ++i) {
    Sampler sm(100 + i, SAMPLING.bound);
    for (int t = 0; t < 200; ++t) {
      const KElem x = sm.point(ks, stages[i + 1]), y = sm.point(ks, stages[i + 1]);
      violations += !member(ks, ks.add(x, y), stages[i]);
      violations += !member(ks, ks.neg(x), stages[i + 1]);
      violations += !member(ks, x, stages[i]);
    }
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (violations) bad = std::to_string(violations) + " stage-axiom violations";
  if (seps != 9 || ssgps != 30) bad = "certificate count";
  if (secs >= 60) bad = "over the 60 s budget";
  std::ostringstream d;
  d << chain.conditions.size() << " conditions, " << seps << " separation and " << ssgps << " SSGP certificates, "
    << violations << " stage-axiom violations over " << stages.size() - 1 << " level pairs at 200 samples each";
  if (!bad.empty()) d << "; " << bad;
  return {bad.empty(), d.str()};
}

Outcome criterion_worked_example() {
  const KSpace ks = E2E.space();
  const Condition p0 = root(E2E), p1 = extend_primes(p0, PrimeSet{3});
  const auto [q, w] = extend_ssgp(E2E, p1, ks.parse("1/3;0"));
  produced.push_back({E2E, {p0, p1, q}});
  const std::vector<KElem> parts{ks.parse("1/5;0"), ks.parse("1/7;0")};
  std::string bad;
  if (w.parts.size() != 2) bad = "k = " + std::to_string(w.parts.size());
  else if (w.parts != parts) bad = "parts " + ks.str(w.parts[0]) + ", " + ks.str(w.parts[1]);
  if (w.head != ks.parse("-1/105;0")) bad += " head " + ks.str(w.head);
  if (!(q.pi == PrimeSet{3, 5, 7})) bad += " pi " + q.pi.str();
  return {bad.empty(), bad.empty() ? "k=2, g_1=1/5, g_2=1/7, g_0=-1/105, pi={3,5,7}" : bad};
}

Outcome criterion_poset() {
  // Two more instances so the checks see free H, several torsion factors and
  // a localized G.
  for (const Instance& inst : {Instance{WideGroup::localized(2, 1, 4), HSpec{0, {3}}}, Instance{WideGroup::full_q(1), HSpec{1, {}}}})
    produced.push_back({inst, build_chain(inst, Budget{1, 4}, SAMPLING).conditions});

  std::size_t conds = 0, pairs = 0, bad_valid = 0, bad_leq = 0, mutations = 0, detected = 0, redundant = 0;
  std::string first;
  for (const auto& run : produced) {
    const KSpace ks = run.inst.space();
    for (std::size_t i = 0; i < run.conditions.size(); ++i) {
      const Condition& q = run.conditions[i];
      ++conds;
      if (!validate(run.inst, q, SAMPLING).ok()) ++bad_valid;
      if (q.n >= 1) {
        Condition broken = q;
        broken.s[0] = broken.s[1] + 1;
        ++mutations;
        detected += !validate(run.inst, broken, SAMPLING).ok();
      }
      if (i == 0) continue;
      const Condition& p = run.conditions[i - 1];
      ++pairs;
      if (!leq(run.inst, q, p, SAMPLING).ok()) ++bad_leq;
      // Per level, drop the first flat atom inherited from p whose removal
      // really shrinks the set.
      for (std::size_t lv = 0; lv <= p.n; ++lv) {
        bool dropped = false;
        for (std::size_t a = 0; a < q.u[lv].atoms.size() && !dropped; ++a) {
          const Atom& atom = q.u[lv].atoms[a];
          if (std::find(p.u[lv].atoms.begin(), p.u[lv].atoms.end(), atom) == p.u[lv].atoms.end()) continue;
          Condition broken = q;
          broken.u[lv].atoms.erase(broken.u[lv].atoms.begin() + static_cast<std::ptrdiff_t>(a));
          Sampler sm(lv * 31 + a, SAMPLING.bound);
          bool shrank = false;
          for (int t = 0; t < 200 && !shrank; ++t) shrank = !member(ks, sm.point(ks, atom), broken.u[lv]);
          if (!shrank) {
            ++redundant;
            continue;
          }
          ++mutations;
          dropped = true;
          const bool caught = !leq(run.inst, broken, p, SAMPLING).ok() || !validate(run.inst, broken, SAMPLING).ok();
          detected += caught;
          if (!caught && first.empty()) first = "dropped atom at level " + std::to_string(lv) + " not detected";
        }
      }
    }
  }
  std::ostringstream d;
  d << conds << " conditions (" << bad_valid << " invalid), " << pairs << " pairs (" << bad_leq << " not ordered), "
    << detected << "/" << mutations << " mutations detected, " << redundant << " redundant drops skipped";
  if (!first.empty()) d << "; " << first;
  return {bad_valid == 0 && bad_leq == 0 && detected == mutations && mutations > 0, d.str()};
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

Outcome criterion_persistence() {
  const InstanceConfig cfg = load_config(std::string(SSGP_SOURCE_DIR) + "/configs/example.json");
  const auto dir = std::filesystem::temp_directory_path();
  const std::string a = (dir / "ssgp_accept_a.json").string(), b = (dir / "ssgp_accept_b.json").string();
  const FilterChain first = build_chain(cfg.inst, cfg.budget, cfg.sampling, cfg.requests);
  save_chain(first, a);
  save_chain(build_chain(cfg.inst, cfg.budget, cfg.sampling, cfg.requests), b);
  const std::string bytes = slurp(a);
  const bool identical = bytes == slurp(b);
  const FilterChain loaded = load_chain(a);
  const bool same = chain_to_json(loaded).dump() == chain_to_json(first).dump() && loaded.conditions == first.conditions;
  const Report r = verify_chain(loaded, cfg.sampling);
  std::size_t failed = 0;
  for (const auto& c : r.checks) failed += !c.pass;
  std::filesystem::remove(a);
  std::filesystem::remove(b);
  std::ostringstream d;
  d << "rebuild " << (identical ? "byte-identical" : "DIFFERS") << " (" << bytes.size() << " bytes), round trip "
    << (same ? "exact" : "DIFFERS") << ", re-verification " << r.checks.size() - failed << "/" << r.checks.size() << " checks pass";
  return {identical && same && failed == 0, d.str()};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
    double limit_s;  ///< 0: no runtime bound
  };
  // 4 runs after 5 and 6 because it re-checks the conditions they produce.
  const std::vector<Criterion> order = {
      {1, "atom membership vs brute force", criterion_membership, 30},
      {2, "find_g postconditions", criterion_find_g, 10},
      {3, "iterative lemma on sequences", criterion_lemma, 0},
      {5, "end-to-end instance", criterion_end_to_end, 60},
      {6, "worked example golden values", criterion_worked_example, 0},
      {4, "poset soundness and mutations", criterion_poset, 0},
      {7, "determinism and persistence", criterion_persistence, 0},
  };
  std::map<int, std::string> lines;
  bool all = true;
  for (const auto& c : order) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.limit_s > 0 && secs >= c.limit_s) o = {false, o.detail + "; exceeded " + std::to_string(static_cast<int>(c.limit_s)) + " s"};
    char buf[64];
    std::snprintf(buf, sizeof buf, " [%.2f s]", secs);
    lines[c.id] = "criterion " + std::to_string(c.id) + " " + (o.pass ? "PASS" : "FAIL") + ": " + c.name + ": " + o.detail + buf;
    std::cerr << lines[c.id] << '\n';
    all = all && o.pass;
  }
  for (const auto& [id, line] : lines) std::cout << line << '\n';
  return all ? 0 : 1;
}
