#include "ssgp/cli.hpp"

#include <algorithm>
#include <chrono>
#include <optional>

#include "CLI11.hpp"
#include "ssgp/config.hpp"

namespace ssgp {

namespace {

class Stopwatch {
 public:
  double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count(); }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

Json stage_sizes(const FilterChain& chain) {
  Json sizes = Json::array();
  for (std::size_t i = 0; i <= chain.max_level(); ++i) sizes.push_back(stage_set(chain, i).description_size());
  return sizes;
}

int cmd_build(const std::string& config_path, const std::string& out_path, std::ostream& out, std::ostream& err) {
  const InstanceConfig cfg = load_config(config_path);
  Stopwatch sw;
  const FilterChain chain = build_chain(cfg.inst, cfg.budget, cfg.sampling, cfg.requests);
  const double t_build = sw.seconds();
  const CertificateTally t = issue_certificates(chain);
  save_chain(chain, out_path);

  Json s;
  s["chain_length"] = chain.conditions.size();
  s["max_level"] = chain.max_level();
  s["stage_sizes"] = stage_sizes(chain);
  s["met_requests"] = chain.met.size();
  s["separation_certificates"] = t.separation;
  s["ssgp_certificates"] = t.ssgp;
  out << s.dump(2) << '\n';
  err << "build " << t_build << " s, certificates " << sw.seconds() - t_build << " s\n";
  if (!t.first_separation_failure.empty() || !t.first_ssgp_failure.empty()) {
    err << "certificate failure: " << t.first_separation_failure << t.first_ssgp_failure << '\n';
    return kCheckFailure;
  }
  return kOk;
}

int cmd_query(const std::string& kind, const std::string& chain_path, const std::string& element,
              std::optional<std::size_t> level, std::ostream& out) {
  const FilterChain chain = load_chain(chain_path);
  const KSpace ks = chain.inst.space();
  const KElem x = ks.parse(element);
  Json a;
  a["element"] = ks.str(x);
  if (kind == "separate") {
    a["level"] = separation_certificate(chain, x);
  } else {
    if (!level) throw ArgumentError("--level is required for " + kind);
    a["level"] = *level;
    if (kind == "member") a["member"] = member(ks, x, stage_set(chain, *level));
    else a["witness"] = to_json(ks, ssgp_certificate(chain, x, *level));
  }
  out << a.dump(2) << '\n';
  return kOk;
}

int cmd_verify(const std::string& chain_path, std::optional<std::size_t> samples, std::optional<std::uint64_t> seed,
               std::ostream& out, std::ostream& err) {
  Stopwatch sw;
  const FilterChain chain = load_chain(chain_path);
  const double t_load = sw.seconds();
  SampleConfig cfg = chain.sampling;
  if (samples) cfg.budget = *samples;
  if (seed) cfg.seed = *seed;
  const Report r = verify_chain(chain, cfg);
  Json j;
  j["ok"] = r.ok();
  j["samples"] = cfg.budget;
  j["seed"] = cfg.seed;
  j["checks"] = r.to_json();
  out << j.dump(2) << '\n';
  // Timings stay off stdout so the report is byte-stable.
  err << Json{{"timings", {{"load_s", t_load}, {"verify_s", sw.seconds() - t_load}}}}.dump() << '\n';
  return r.ok() ? kOk : kCheckFailure;
}

int cmd_show(const std::string& chain_path, std::ostream& out) {
  const FilterChain chain = load_chain(chain_path);
  Json conds = Json::array();
  for (const auto& p : chain.conditions) {
    Json sizes = Json::array();
    for (const auto& u : p.u) sizes.push_back(u.description_size());
    conds.push_back(Json{{"n", p.n}, {"pi", p.pi.primes()}, {"s", p.s}, {"sizes", sizes}});
  }
  Json met = Json::array();
  const KSpace ks = chain.inst.space();
  for (const auto& rec : chain.met) {
    Json e{{"index", rec.index}, {"kind", kind_name(rec.request.kind)}, {"level", rec.level}};
    if (rec.request.kind == DenseRequest::Kind::Avoid || rec.request.kind == DenseRequest::Kind::Ssgp) e["x"] = ks.str(rec.request.x);
    met.push_back(std::move(e));
  }
  Json j;
  j["instance"] = instance_to_json(chain.inst);
  j["budget"] = Json{{"max_level", chain.budget.max_level}, {"enum_count", chain.budget.enum_count}};
  j["conditions"] = std::move(conds);
  j["stage_sizes"] = stage_sizes(chain);
  j["met"] = std::move(met);
  out << j.dump(2) << '\n';
  return kOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Finite stages of an SSGP group topology on G + H, with certificates", "ssgp"};
  app.require_subcommand(1);

  std::string config_path, chain_path, out_path, element, kind;
  std::optional<std::size_t> level, samples;
  std::optional<std::uint64_t> seed;

  auto* build = app.add_subcommand("build", "Build a filter chain from a config and write the chain file");
  build->add_option("--config", config_path, "Instance config (JSON)")->required();
  build->add_option("--out", out_path, "Chain file to write")->required();

  auto* query = app.add_subcommand("query", "Answer a membership, separation or SSGP query");
  query->add_option("kind", kind, "member | separate | ssgp")->required()->check(CLI::IsMember({"member", "separate", "ssgp"}));
  query->add_option("--chain", chain_path, "Chain file")->required();
  query->add_option("--element", element, "Element literal \"q1,...,qm;h1,...\"")->required();
  query->add_option("--level", level, "Stage level (member, ssgp)");

  auto* verify = app.add_subcommand("verify", "Re-run every check on a chain and print the report");
  verify->add_option("--chain", chain_path, "Chain file")->required();
  verify->add_option("--samples", samples, "Samples per sampled check (default: the chain's)");
  verify->add_option("--seed", seed, "Sampling seed (default: the chain's)");

  auto* show = app.add_subcommand("show", "Summarize a chain file");
  show->add_option("--chain", chain_path, "Chain file")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsageError;
  }

  try {
    if (*build) return cmd_build(config_path, out_path, out, err);
    if (*query) return cmd_query(kind, chain_path, element, level, out);
    if (*verify) return cmd_verify(chain_path, samples, seed, out, err);
    return cmd_show(chain_path, out);
  } catch (const InsufficientBudget& e) {
    err << "insufficient budget: " << e.what() << '\n';
    return kInsufficientBudget;
  } catch (const QueryError& e) {
    err << "invalid query: " << e.what() << '\n';
    return kUsageError;
  } catch (const ConstructionError& e) {
    err << "check failed: " << e.what() << '\n';
    return kCheckFailure;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  }
}

}  // namespace ssgp
