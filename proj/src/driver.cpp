#include "ssgp/driver.hpp"

#include <fstream>
#include <map>
#include <sstream>

namespace ssgp {

namespace {

std::string failures(const Report& r) {
  std::string out;
  for (const auto& c : r.checks)
    if (!c.pass) out += (out.empty() ? "" : "; ") + c.name + (c.detail.empty() ? "" : " (" + c.detail + ")");
  return out;
}

// Post-hoc check that the recorded condition lies in the requested dense set.
std::string met_violation(const FilterChain& chain, const MetRecord& rec) {
  const KSpace ks = chain.inst.space();
  if (rec.index >= chain.conditions.size()) return "condition index out of range";
  const Condition& q = chain.conditions[rec.index];
  switch (rec.request.kind) {
    case DenseRequest::Kind::Level:
      return q.n >= rec.request.level ? "" : "depth below the requested level";
    case DenseRequest::Kind::Primes:
      return rec.request.primes.subset_of(q.pi) ? "" : "prime set not contained";
    case DenseRequest::Kind::Avoid: {
      const KElem& x = rec.request.x;
      if (ks.is_zero(x)) return "zero cannot be avoided";
      if (!qpi_contains(x.q, q.pi)) return "element outside Q_pi + H";
      if (rec.level != q.n) return "recorded level is not the top level";
      if (member(ks, x, q.u[q.n])) return "element still in the top level";
      return "";
    }
    case DenseRequest::Kind::Ssgp: {
      if (!rec.witness) return "missing witness";
      const SSGPWitness& w = *rec.witness;
      if (w.target != rec.request.x) return "witness target differs from the request";
      if (q.n < rec.level) return "depth below the requested level";
      if (w.level != q.n) return "witness not taken at the top level";
      if (!witness_identity(ks, w)) return "head + parts != target";
      if (!member(ks, w.head, q.u[q.n])) return "head outside the top level";
      for (const auto& g : w.parts)
        if (!cyclic_in_set(ks, g, q.u[q.n], CyclicMode::Syntactic)) return "part without a cyclic certificate";
      return "";
    }
  }
  return "unknown request";
}

class ChainBuilder {
 public:
  ChainBuilder(FilterChain& chain) : c_(chain), ks_(chain.inst.space()) {}

  void run_request(const ScheduledRequest& r) {
    switch (r.request.kind) {
      case DenseRequest::Kind::Level: to_level(r.request.level); record(r.request, r.request.level, {}); break;
      case DenseRequest::Kind::Primes: primes(r.request.primes); break;
      case DenseRequest::Kind::Avoid: avoid(r.request.x); break;
      case DenseRequest::Kind::Ssgp: ssgp(r.request.x, r.level); break;
    }
  }

  void avoid(const KElem& x) {
    if (ks_.is_zero(x)) throw ArgumentError("cannot avoid the zero element");
    if (!qpi_contains(x.q, last().pi)) push(extend_primes(last(), denominator_primes(x.q)), "B_pi for " + ks_.str(x));
    if (member(ks_, x, last().u[last().n])) push(extend_with_avoidance(c_.inst, last(), x), "C_x for " + ks_.str(x));
    record(DenseRequest::make_avoid(x), last().n, {});
  }

  void ssgp(const KElem& x, std::size_t n) {
    to_level(n);
    const std::size_t top = last().n;
    auto it = witnesses_.find(x);
    if (it == witnesses_.end() || it->second.level != top) {
      SSGPWitness w;
      if (member(ks_, x, last().u[top])) {
        w = SSGPWitness{x, top, x, {}};
      } else {
        auto [q, wq] = extend_ssgp(c_.inst, last(), x);
        push(std::move(q), "D_x for " + ks_.str(x));
        w = std::move(wq);
      }
      it = witnesses_.insert_or_assign(x, std::move(w)).first;
    }
    record(DenseRequest::make_ssgp(x), n, it->second);
  }

  void primes(const PrimeSet& pi) {
    if (!pi.subset_of(last().pi)) push(extend_primes(last(), pi), "B_pi");
    record(DenseRequest::make_primes(pi), 0, {});
  }

  void to_level(std::size_t n) {
    while (last().n < n) push(extend_to_level(c_.inst, last(), last().n + 1), "A_" + std::to_string(last().n + 1));
  }

 private:
  const Condition& last() const { return c_.conditions.back(); }

  void push(Condition q, const std::string& why) {
    const Report v = validate(c_.inst, q, c_.sampling);
    if (!v.ok()) throw ConstructionError(why + ": new condition invalid: " + failures(v));
    const Report o = leq(c_.inst, q, last(), c_.sampling);
    if (!o.ok()) throw ConstructionError(why + ": not an extension: " + failures(o));
    c_.conditions.push_back(std::move(q));
  }

  void record(DenseRequest r, std::size_t level, std::optional<SSGPWitness> w) {
    MetRecord rec{c_.conditions.size() - 1, std::move(r), level, std::move(w)};
    const std::string bad = met_violation(c_, rec);
    if (!bad.empty()) throw ConstructionError(kind_name(rec.request.kind) + " request not met: " + bad);
    c_.met.push_back(std::move(rec));
  }

  FilterChain& c_;
  KSpace ks_;
  std::map<KElem, SSGPWitness> witnesses_;
};

void absorb(Report& r, const Report& sub, const std::string& tag) {
  for (const auto& c : sub.checks) r.add(tag + ":(" + c.name + ")", c.pass, c.detail);
}

const MetRecord* find_met(const FilterChain& chain, DenseRequest::Kind kind, const KElem& x,
                          std::optional<std::size_t> level) {
  for (const auto& r : chain.met)
    if (r.request.kind == kind && r.request.x == x && (!level || r.level == *level)) return &r;
  return nullptr;
}

Json request_to_json(const KSpace& ks, const DenseRequest& r) {
  Json j;
  j["kind"] = kind_name(r.kind);
  switch (r.kind) {
    case DenseRequest::Kind::Level: j["level"] = r.level; break;
    case DenseRequest::Kind::Primes: j["primes"] = r.primes.primes(); break;
    case DenseRequest::Kind::Avoid:
    case DenseRequest::Kind::Ssgp: j["x"] = to_json(ks, r.x); break;
  }
  return j;
}

DenseRequest request_from_json(const KSpace& ks, const Json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "level") return DenseRequest::make_level(j.at("level").get<std::size_t>());
  if (kind == "primes") return DenseRequest::make_primes(PrimeSet(j.at("primes").get<std::vector<Prime>>()));
  if (kind == "avoid") return DenseRequest::make_avoid(kelem_from_json(ks, j.at("x")));
  if (kind == "ssgp") return DenseRequest::make_ssgp(kelem_from_json(ks, j.at("x")));
  throw ArgumentError("unknown request kind '" + kind + "'");
}

}  // namespace

std::size_t FilterChain::max_level() const { return conditions.empty() ? 0 : conditions.back().n; }

FilterChain build_chain(const Instance& inst, const Budget& budget, const SampleConfig& sampling,
                        const std::vector<ScheduledRequest>& requests) {
  if (budget.enum_count < 1) throw ArgumentError("enum_count must be at least 1");
  FilterChain chain{inst, budget, sampling, requests, {root(inst)}, {}};
  ChainBuilder b(chain);
  for (const auto& r : requests) b.run_request(r);
  const KSpace ks = inst.space();
  for (const auto& x : enumerate_prefix(inst, budget.enum_count)) {
    if (!ks.is_zero(x)) b.avoid(x);
    for (std::size_t n = 0; n <= budget.max_level; ++n) b.ssgp(x, n);
  }
  return chain;
}

SymSet stage_set(const FilterChain& chain, std::size_t i) {
  const KSpace ks = chain.inst.space();
  if (i > chain.max_level()) throw InsufficientBudget("level " + std::to_string(i) + " was never reached");
  SymSet u;
  for (const auto& p : chain.conditions)
    if (i <= p.n) u = unite(ks, u, p.u[i]);
  return u;
}

std::size_t separation_certificate(const FilterChain& chain, const KElem& x) {
  const KSpace ks = chain.inst.space();
  ks.check_shape(x);
  if (ks.is_zero(x)) throw QueryError("zero is never separated");
  const MetRecord* rec = find_met(chain, DenseRequest::Kind::Avoid, x, std::nullopt);
  if (!rec) throw InsufficientBudget("no avoidance step recorded for " + ks.str(x));
  if (member(ks, x, stage_set(chain, rec->level)))
    throw ConstructionError("separation of " + ks.str(x) + " fails on the stage set; the chain is not linear");
  return rec->level;
}

SSGPWitness ssgp_certificate(const FilterChain& chain, const KElem& x, std::size_t i) {
  const KSpace ks = chain.inst.space();
  ks.check_shape(x);
  const MetRecord* rec = find_met(chain, DenseRequest::Kind::Ssgp, x, i);
  if (!rec || !rec->witness) throw InsufficientBudget("no SSGP step recorded for " + ks.str(x) + " at level " + std::to_string(i));
  const SSGPWitness& w = *rec->witness;
  const SymSet u = stage_set(chain, i);
  if (!witness_identity(ks, w)) throw ConstructionError("recorded witness does not sum to its target");
  if (!member(ks, w.head, u)) throw ConstructionError("witness head is outside the stage set");
  for (const auto& g : w.parts)
    if (!cyclic_in_set(ks, g, u, CyclicMode::Syntactic) && !cyclic_in_set(ks, g, u, CyclicMode::Bounded, 25))
      throw ConstructionError("witness part " + ks.str(g) + " has no cyclic certificate on the stage set");
  return w;
}

CertificateTally issue_certificates(const FilterChain& chain) {
  const KSpace ks = chain.inst.space();
  CertificateTally t;
  for (const auto& x : enumerate_prefix(chain.inst, chain.budget.enum_count)) {
    if (!ks.is_zero(x)) {
      try {
        separation_certificate(chain, x);
        ++t.separation;
      } catch (const std::exception& e) {
        if (t.first_separation_failure.empty()) t.first_separation_failure = ks.str(x) + ": " + e.what();
      }
    }
    for (std::size_t i = 0; i <= chain.budget.max_level; ++i) {
      try {
        ssgp_certificate(chain, x, i);
        ++t.ssgp;
      } catch (const std::exception& e) {
        if (t.first_ssgp_failure.empty()) t.first_ssgp_failure = ks.str(x) + " at level " + std::to_string(i) + ": " + e.what();
      }
    }
  }
  return t;
}

Report verify_chain(const FilterChain& chain, const SampleConfig& cfg) {
  const KSpace ks = chain.inst.space();
  Report r;
  r.add("root", !chain.conditions.empty() && chain.conditions.front() == root(chain.inst));
  for (std::size_t i = 0; i < chain.conditions.size(); ++i) {
    const std::string tag = "p" + std::to_string(i);
    absorb(r, validate(chain.inst, chain.conditions[i], cfg), tag);
    for (std::size_t back = 1; back <= 2 && back <= i; ++back)
      absorb(r, leq(chain.inst, chain.conditions[i], chain.conditions[i - back], cfg), tag + "<=p" + std::to_string(i - back));
  }

  for (std::size_t i = 0; i < chain.met.size(); ++i) {
    const auto& rec = chain.met[i];
    const std::string bad = met_violation(chain, rec);
    r.add("met " + std::to_string(i) + " " + kind_name(rec.request.kind), bad.empty(), bad);
  }

  const std::size_t top = chain.max_level();
  std::vector<SymSet> stages;
  for (std::size_t i = 0; i <= top; ++i) stages.push_back(stage_set(chain, i));
  for (std::size_t i = 0; i + 1 <= top; ++i) {
    Sampler sm(cfg.seed * 7919 + i, cfg.bound);
    std::string bad_sum, bad_neg, bad_nest;
    for (std::size_t t = 0; t < cfg.budget; ++t) {
      const KElem x = sm.point(ks, stages[i + 1]), y = sm.point(ks, stages[i + 1]);
      if (bad_sum.empty() && !member(ks, ks.add(x, y), stages[i])) bad_sum = ks.str(x) + " + " + ks.str(y);
      if (bad_neg.empty() && !member(ks, ks.neg(x), stages[i + 1])) bad_neg = ks.str(x);
      if (bad_nest.empty() && !member(ks, x, stages[i])) bad_nest = ks.str(x);
    }
    const std::string lv = "U_" + std::to_string(i + 1);
    r.add("stage " + lv + " + " + lv + " in U_" + std::to_string(i), bad_sum.empty(), bad_sum);
    r.add("stage -" + lv + " = " + lv, bad_neg.empty(), bad_neg);
    r.add("stage " + lv + " in U_" + std::to_string(i), bad_nest.empty(), bad_nest);
  }
  {
    std::string bad;
    for (std::size_t i = 0; i <= top && bad.empty(); ++i)
      if (!member(ks, ks.zero(), stages[i])) bad = "0 missing from U_" + std::to_string(i);
    r.add("stage 0 in every U_i", bad.empty(), bad);
  }

  const CertificateTally t = issue_certificates(chain);
  const bool sep_ok = t.first_separation_failure.empty(), ssgp_ok = t.first_ssgp_failure.empty();
  r.add("separation certificates", sep_ok, sep_ok ? std::to_string(t.separation) + " issued" : t.first_separation_failure);
  r.add("ssgp certificates", ssgp_ok, ssgp_ok ? std::to_string(t.ssgp) + " issued" : t.first_ssgp_failure);
  return r;
}

Json instance_to_json(const Instance& inst) {
  Json j;
  j["m"] = inst.g.m();
  if (inst.g.kind() == WideGroup::Kind::FullQ) {
    j["group"] = "full-q";
  } else {
    Json loc;
    loc["residue"] = inst.g.residue();
    loc["modulus"] = inst.g.modulus();
    j["group"] = Json{{"localized", loc}};
  }
  j["h"] = Json{{"free_rank", inst.h.free_rank}, {"torsion_orders", inst.h.torsion}};
  return j;
}

Instance instance_from_json(const Json& j) {
  const auto m = j.at("m").get<std::size_t>();
  if (m == 0) throw ArgumentError("m must be positive");
  const Json& g = j.at("group");
  WideGroup group = WideGroup::full_q(m);
  if (g.is_string()) {
    if (g.get<std::string>() != "full-q") throw ArgumentError("unknown group '" + g.get<std::string>() + "'");
  } else {
    const Json& loc = g.at("localized");
    group = WideGroup::localized(m, loc.at("residue").get<std::int64_t>(), loc.at("modulus").get<std::int64_t>());
  }
  HSpec h;
  if (j.contains("h")) {
    h.free_rank = j.at("h").value("free_rank", std::size_t{0});
    h.torsion = j.at("h").value("torsion_orders", std::vector<std::int64_t>{});
  }
  h.validate();
  return Instance{group, h};
}

Json chain_to_json(const FilterChain& chain) {
  const KSpace ks = chain.inst.space();
  PoolTable table;
  Json conds = Json::array();
  for (const auto& p : chain.conditions) conds.push_back(to_json(chain.inst, p, &table));
  Json met = Json::array();
  for (const auto& rec : chain.met) {
    Json e;
    e["index"] = rec.index;
    e["request"] = request_to_json(ks, rec.request);
    e["level"] = rec.level;
    if (rec.witness) e["witness"] = to_json(ks, *rec.witness);
    met.push_back(std::move(e));
  }
  Json reqs = Json::array();
  for (const auto& r : chain.requests) {
    Json e = request_to_json(ks, r.request);
    e["at_level"] = r.level;
    reqs.push_back(std::move(e));
  }
  Json j;
  j["format"] = "ssgp-chain/1";
  j["instance"] = instance_to_json(chain.inst);
  j["budget"] = Json{{"max_level", chain.budget.max_level}, {"enum_count", chain.budget.enum_count}};
  j["sampling"] = Json{{"samples", chain.sampling.budget}, {"seed", chain.sampling.seed}, {"bound", chain.sampling.bound}};
  j["requests"] = std::move(reqs);
  j["pools"] = table.to_json(ks);
  j["conditions"] = std::move(conds);
  j["met"] = std::move(met);
  return j;
}

FilterChain chain_from_json(const Json& j) {
  try {
    if (j.at("format").get<std::string>() != "ssgp-chain/1") throw ArgumentError("unsupported chain format");
    FilterChain c;
    c.inst = instance_from_json(j.at("instance"));
    const KSpace ks = c.inst.space();
    c.budget = Budget{j.at("budget").at("max_level").get<std::size_t>(), j.at("budget").at("enum_count").get<std::size_t>()};
    c.sampling = SampleConfig{j.at("sampling").at("samples").get<std::size_t>(), j.at("sampling").at("seed").get<std::uint64_t>(),
                              j.at("sampling").at("bound").get<std::int64_t>()};
    for (const auto& r : j.at("requests")) c.requests.push_back(ScheduledRequest{request_from_json(ks, r), r.at("at_level").get<std::size_t>()});
    const PoolTable table = PoolTable::from_json(ks, j.at("pools"));
    for (const auto& p : j.at("conditions")) c.conditions.push_back(condition_from_json(c.inst, p, &table));
    for (const auto& e : j.at("met")) {
      MetRecord rec{e.at("index").get<std::size_t>(), request_from_json(ks, e.at("request")), e.at("level").get<std::size_t>(), {}};
      if (e.contains("witness")) rec.witness = witness_from_json(ks, e.at("witness"));
      c.met.push_back(std::move(rec));
    }
    if (c.conditions.empty()) throw ArgumentError("chain has no conditions");
    // Exact checks only; the sampled ones belong to verify_chain.
    const SampleConfig exact{0, c.sampling.seed, c.sampling.bound};
    for (std::size_t i = 0; i < c.conditions.size(); ++i) {
      const Report v = validate(c.inst, c.conditions[i], exact);
      if (!v.ok()) throw ConstructionError("condition " + std::to_string(i) + " fails " + failures(v));
    }
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw ArgumentError(std::string("malformed chain: ") + e.what());
  }
}

void save_chain(const FilterChain& chain, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ArgumentError("cannot write " + path);
  out << chain_to_json(chain).dump(1) << '\n';
  if (!out) throw ArgumentError("write to " + path + " failed");
}

FilterChain load_chain(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ArgumentError("cannot read " + path);
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ArgumentError(path + ": " + e.what());
  }
  return chain_from_json(j);
}

}  // namespace ssgp
