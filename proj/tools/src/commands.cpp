#include "forge_cli/commands.hpp"

#include <algorithm>
#include <ostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "forge/blowup.hpp"
#include "forge/constants.hpp"
#include "forge/embed.hpp"
#include "forge/expansion.hpp"
#include "forge/generator.hpp"
#include "forge/graph_io.hpp"
#include "forge/power_embed.hpp"
#include "forge/pseudorandom.hpp"
#include "forge/ramsey.hpp"
#include "forge/rng.hpp"
#include "forge/transversal.hpp"
#include "forge/tree.hpp"

namespace forge_cli {

using forge::Rational;
using nlohmann::json;
using VT = ValueType;

namespace {

// Schemas. Fields: name, type, default, help, input file, required.
const std::map<std::string, Schema>& schemas() {
  static const std::map<std::string, Schema> all = {
      {"generate",
       {{"a", VT::kRational, "3", "vertex multiplier, |V| = a n"},
        {"b", VT::kRational, "", "maximum degree", false, true},
        {"c", VT::kRational, "", "density: p = c / (a n)", false, true},
        {"ell", VT::kRational, "", "girth must exceed 2 ell", false, true},
        {"theta", VT::kRational, "", "bijumbledness constant", false, true},
        {"n", VT::kInt, "", "scale parameter", false, true},
        {"seed", VT::kUint, "", "RNG seed (generated and printed when omitted)"},
        {"retries", VT::kInt, "32", "attempts before giving up"},
        {"delta", VT::kInt, "2", "tree degree for the goodness precondition"},
        {"k", VT::kInt, "1", "power for the goodness precondition"},
        {"desk", VT::kBool, "false", "allow parameters outside the proof's hypotheses"},
        {"jumbled", VT::kString, "sampled", "bijumbledness check: exact | sampled"},
        {"trials", VT::kInt, "10000", "sampled-check trials"},
        {"require-jumbled", VT::kBool, "false", "retry when the jumbledness check fails"}}},
      {"certify",
       {{"graph", VT::kString, "", "graph file", true, true},
        {"class", VT::kBool, "false", "check membership in P_n(a,b,c,ell,theta)"},
        {"p", VT::kRational, "", "edge density (defaults to c/(a n) with --class)"},
        {"theta", VT::kRational, "", "bijumbledness constant", false, true},
        {"a", VT::kRational, "3", "class: vertex multiplier"},
        {"b", VT::kRational, "", "class: maximum degree"},
        {"c", VT::kRational, "", "class: density numerator"},
        {"ell", VT::kRational, "", "class: girth parameter"},
        {"n", VT::kInt, "", "class: scale parameter"},
        {"mode", VT::kString, "exact", "exact | sampled"},
        {"trials", VT::kInt, "10000", "sampled-check trials"},
        {"exact-cap", VT::kInt, "16", "largest graph for exact checks"},
        {"seed", VT::kUint, "", "sampled-mode seed"}}},
      {"decompose",
       {{"graph", VT::kString, "", "graph file", true, true},
        {"f", VT::kRational, "2", "expansion factor"},
        {"D", VT::kRational, "", "expansion degree", false, true},
        {"ell", VT::kInt, "", "number of separated parts", false, true},
        {"eta", VT::kRational, "", "part size fraction", false, true},
        {"n", VT::kInt, "", "scale parameter", false, true},
        {"mode", VT::kString, "auto", "expansion certification: auto | exact | heuristic"},
        {"budget", VT::kInt, "20000000", "exact-mode subset budget"},
        {"desk", VT::kBool, "false", "record hypothesis failures instead of stopping"}}},
      {"embed-tree",
       {{"tree", VT::kString, "", "tree as a graph file", true, true},
        {"root", VT::kInt, "0", "root vertex"},
        {"host", VT::kString, "", "host graph file", true, true},
        {"budget", VT::kInt, "-1", "placements tried, -1 for no limit"}}},
      {"power-embed",
       {{"variant", VT::kString, "blowup", "aux | blowup | greedy"},
        {"tree", VT::kString, "", "tree as a graph file", true, true},
        {"root", VT::kInt, "0", "root vertex"},
        {"k", VT::kInt, "1", "power"},
        {"r0", VT::kInt, "", "blowup: biclique size (default Delta^{4k})"},
        {"ell", VT::kInt, "", "clique size (blowup: r0, greedy: Delta^k + 1)"},
        {"placement", VT::kString, "aligned", "blowup: biclique sides, aligned | seeded"},
        {"seed", VT::kUint, "", "seeded placement seed"},
        {"graph", VT::kString, "", "greedy: base graph file", true},
        {"budget", VT::kInt, "-1", "greedy: tree search budget"},
        {"desk", VT::kBool, "false", "allow cliques below the required size"}}},
      {"transversal",
       {{"graph", VT::kString, "", "graph file", true, true},
        {"classes", VT::kString, "", "class file, one class per line", true, true},
        {"gamma", VT::kRational, "1/2", "gamma"},
        {"target", VT::kInt, "", "path length in vertices", false, true},
        {"budget", VT::kInt, "-1", "search budget"}}},
      {"pipeline",
       {{"k", VT::kInt, "1", "power of the tree"},
        {"delta", VT::kInt, "2", "maximum degree of the tree"},
        {"s", VT::kInt, "", "number of colours", false, true},
        {"n", VT::kInt, "", "tree size", false, true},
        {"seed", VT::kUint, "", "RNG seed (generated and printed when omitted)"},
        {"constants", VT::kString, "", "constant overrides file ([level.N] sections)", true},
        {"convention", VT::kString, "level-index", "h bookkeeping: level-index | shifted"},
        {"coloring", VT::kString, "adversary:random", "colouring file or adversary:NAME"},
        {"graph", VT::kString, "", "top-level graph file (generated when omitted)", true},
        {"tree", VT::kString, "", "tree file (random when omitted)", true},
        {"root", VT::kInt, "0", "tree root"},
        {"desk", VT::kBool, "false", "desk mode: relax hypotheses, record violations"},
        {"membership", VT::kString, "sampled", "class checks: exact | sampled"},
        {"trials", VT::kInt, "2000", "sampled-check trials"},
        {"retries", VT::kInt, "32", "sparsification and generation attempts"},
        {"search-budget", VT::kInt, "5000000", "tree and path search budget"},
        {"lll-factor", VT::kInt, "1000", "resamples allowed per event"}}},
  };
  return all;
}

constexpr const char* kAdversaryPrefix = "adversary:";

std::uint64_t fresh_seed() {
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

bool needs_seed(const RunConfig& cfg) {
  if (cfg.subcommand == "generate" || cfg.subcommand == "pipeline") return true;
  if (cfg.subcommand == "certify") return cfg.str("mode") == "sampled";
  if (cfg.subcommand == "power-embed") return cfg.str("variant") == "blowup" && cfg.str("placement") == "seeded";
  return false;
}

std::string read_input(RunConfig& cfg, const std::string& key) {
  const std::string& path = cfg.str(key);
  const std::string text = forge::read_file(path);
  const std::string hash = forge::fnv1a_hex(text);
  auto it = cfg.inputs.find(key);
  if (it != cfg.inputs.end() && it->second.second != hash) {
    throw InputDrift("input '" + key + "' (" + path + ") changed since the run: hash " + hash + ", recorded " +
                     it->second.second);
  }
  cfg.inputs[key] = {path, hash};
  return text;
}

forge::Graph input_graph(RunConfig& cfg, const std::string& key) {
  std::istringstream in(read_input(cfg, key));
  return forge::read_graph(in);
}

forge::RootedTree input_tree(RunConfig& cfg, const std::string& key) {
  return forge::RootedTree::from_graph(input_graph(cfg, key), static_cast<forge::Vertex>(cfg.integer("root")));
}

forge::CheckMode check_mode(const std::string& name, std::int64_t trials, std::uint64_t seed, int cap = 16) {
  if (name == "exact") return forge::CheckMode::exact(cap);
  if (name == "sampled") return forge::CheckMode::sampled(trials, seed);
  throw ConfigError("mode", 0, "expected exact or sampled, got '" + name + "'");
}

std::int64_t ipow_sat(std::int64_t b, int e) {
  std::int64_t r = 1;
  for (int i = 0; i < e; ++i) {
    if (r > (std::int64_t{1} << 40) / std::max<std::int64_t>(b, 1)) return std::int64_t{1} << 40;
    r *= b;
  }
  return r;
}

std::vector<forge::VertexSet> parse_classes(const std::string& text) {
  std::vector<forge::VertexSet> classes;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
    std::istringstream ls(line);
    forge::VertexSet cls;
    std::string tok;
    while (ls >> tok) {
      try {
        std::size_t used = 0;
        const long v = std::stol(tok, &used);
        if (used != tok.size() || v < 0) throw std::invalid_argument(tok);
        cls.push_back(static_cast<forge::Vertex>(v));
      } catch (const std::exception&) {
        throw forge::ParseError(line_no, "class file: bad vertex '" + tok + "'");
      }
    }
    if (!cls.empty()) {
      std::sort(cls.begin(), cls.end());
      classes.push_back(std::move(cls));
    }
  }
  if (classes.empty()) throw forge::ParseError(0, "class file: no classes");
  return classes;
}

Outcome run_generate(RunConfig& cfg) {
  forge::PnParams pp;
  pp.a = cfg.rational("a");
  pp.b = cfg.rational("b");
  pp.c = cfg.rational("c");
  pp.ell = cfg.rational("ell");
  pp.theta = cfg.rational("theta");
  pp.n = cfg.integer("n");
  const std::uint64_t seed = cfg.uinteger("seed");
  forge::GenOptions go;
  go.delta = static_cast<int>(cfg.integer("delta"));
  go.k = static_cast<int>(cfg.integer("k"));
  go.desk = cfg.flag("desk");
  go.max_retries = static_cast<int>(cfg.integer("retries"));
  go.jumbled = check_mode(cfg.str("jumbled"), cfg.integer("trials"), forge::derive_seed(seed, forge::stage::kCertify, 0));
  go.require_jumbled = cfg.flag("require-jumbled");
  Outcome out;
  try {
    const forge::Generated g = forge::generate_pn(pp, seed, go);
    std::ostringstream os;
    forge::write_graph(os, g.graph);
    out.graph_text = os.str();
    out.result["trace"] = forge::to_json(g.trace);
    out.result["graph"] = {{"n", g.graph.order()}, {"m", g.graph.size()}, {"fnv1a", forge::fnv1a_hex(out.graph_text)}};
    out.message = "generated " + std::to_string(g.graph.order()) + " vertices, " + std::to_string(g.graph.size()) +
                  " edges after " + std::to_string(g.trace.attempts) + " attempt(s)";
  } catch (const forge::GenerationError& e) {
    out.result["trace"] = forge::to_json(e.trace());
    out.result["error"] = e.what();
    out.exit_code = kExitStage;
    out.message = e.what();
  }
  return out;
}

forge::PnParams class_params(const RunConfig& cfg) {
  forge::PnParams pp;
  pp.a = cfg.rational("a");
  pp.b = cfg.rational("b");
  pp.c = cfg.rational("c");
  pp.ell = cfg.rational("ell");
  pp.theta = cfg.rational("theta");
  pp.n = cfg.integer("n");
  return pp;
}

Outcome run_certify(RunConfig& cfg) {
  const forge::Graph g = input_graph(cfg, "graph");
  const std::uint64_t seed = cfg.has("seed") ? cfg.uinteger("seed") : 0;
  const forge::CheckMode mode =
      check_mode(cfg.str("mode"), cfg.integer("trials"), seed, static_cast<int>(cfg.integer("exact-cap")));
  Outcome out;
  if (cfg.flag("class")) {
    const forge::MembershipReport rep = forge::class_membership(g, class_params(cfg), mode);
    out.result["membership"] = forge::to_json(rep);
    out.result["verdict"] = rep.passed() ? (rep.jumbled.verdict == forge::Verdict::kUnknown ? "unknown" : "pass") : "fail";
    out.exit_code = rep.passed() ? kExitOk : kExitNegative;
    out.message = rep.passed() ? "in class" : "not in class: condition " + std::to_string(rep.first_failure) + " fails";
  } else {
    if (!cfg.has("p")) throw ConfigError("p", 0, "required unless --class is set");
    const forge::CertReport rep = forge::is_bijumbled(g, cfg.rational("p"), cfg.rational("theta"), mode);
    out.result["report"] = forge::to_json(rep);
    out.result["verdict"] = forge::to_string(rep.verdict);
    out.exit_code = rep.verdict == forge::Verdict::kFail ? kExitNegative : kExitOk;
    out.message = "bijumbled: " + forge::to_string(rep.verdict);
  }
  return out;
}

forge::DecompParams decomp_params(const RunConfig& cfg) {
  forge::DecompParams p;
  p.f = cfg.rational("f");
  p.d = cfg.rational("D");
  p.ell = static_cast<int>(cfg.integer("ell"));
  p.eta = cfg.rational("eta");
  p.n = cfg.integer("n");
  return p;
}

forge::ExpansionMode expansion_mode(const RunConfig& cfg) {
  const std::string& m = cfg.str("mode");
  if (m == "auto") {
    forge::ExpansionMode e;
    e.budget = cfg.integer("budget");
    return e;
  }
  if (m == "exact") return forge::ExpansionMode::exact(cfg.integer("budget"));
  if (m == "heuristic") return forge::ExpansionMode::heuristic();
  throw ConfigError("mode", 0, "expected auto, exact or heuristic, got '" + m + "'");
}

Outcome run_decompose(RunConfig& cfg) {
  const forge::Graph g = input_graph(cfg, "graph");
  forge::DecompOptions opt;
  opt.mode = expansion_mode(cfg);
  opt.desk = cfg.flag("desk");
  Outcome out;
  const forge::DecompResult r = forge::decompose_alternatives(g, decomp_params(cfg), opt);
  out.result["decomposition"] = forge::to_json(r);
  out.exit_code = r.certified() ? kExitOk : kExitStage;
  out.message = std::string(r.kind == forge::DecompResult::Kind::kExpander ? "expanding subgraph" : "separated parts") +
                (r.certified() ? ", certified" : ", not certified: " + forge::to_string(r.certification.verdict));
  return out;
}

Outcome run_embed_tree(RunConfig& cfg) {
  const forge::RootedTree t = input_tree(cfg, "tree");
  const forge::Graph host = input_graph(cfg, "host");
  const forge::TreeEmbedResult r = forge::embed_tree(t, host, cfg.integer("budget"));
  Outcome out;
  out.result = {{"found", r.found()}, {"nodes", r.nodes}, {"exhausted", r.exhausted}};
  if (r.embedding) out.result["embedding"] = forge::to_json(*r.embedding);
  out.exit_code = r.found() ? kExitOk : kExitStage;
  out.message = r.found() ? "embedded" : (r.exhausted ? "search budget exhausted" : "no embedding exists");
  return out;
}

forge::Placement placement(const RunConfig& cfg) {
  const std::string& p = cfg.str("placement");
  if (p == "aligned") return forge::Placement::index_aligned();
  if (p == "seeded") return forge::Placement::seeded(cfg.uinteger("seed"));
  throw ConfigError("placement", 0, "expected aligned or seeded, got '" + p + "'");
}

struct PowerHost {
  forge::AuxTree aux;
  forge::Graph j;
  forge::BlowUp host;
  int r0 = 0;
  int ell = 0;
};

PowerHost power_blowup_host(const RunConfig& cfg, const forge::RootedTree& t) {
  PowerHost h;
  const int k = static_cast<int>(cfg.integer("k"));
  h.aux = forge::auxiliary_tree(t, k);
  h.j = h.aux.aux.as_graph();
  h.r0 = cfg.has("r0") ? static_cast<int>(cfg.integer("r0"))
                       : static_cast<int>(std::min<std::int64_t>(forge::power_embed_r0(h.aux.delta(), k), 1 << 16));
  h.ell = cfg.has("ell") ? static_cast<int>(cfg.integer("ell")) : h.r0;
  h.host = forge::lr_blowup(h.j, h.ell, h.r0, placement(cfg));
  return h;
}

forge::BlowUp greedy_host(const RunConfig& cfg, const forge::RootedTree& t, const forge::Graph& g) {
  const int k = static_cast<int>(cfg.integer("k"));
  const int ell = cfg.has("ell") ? static_cast<int>(cfg.integer("ell"))
                                 : static_cast<int>(ipow_sat(std::max(2, t.max_degree()), k) + 1);
  return forge::sheared_blowup(forge::power(g, k), ell);
}

Outcome run_power_embed(RunConfig& cfg) {
  const std::string& variant = cfg.str("variant");
  const forge::RootedTree t = input_tree(cfg, "tree");
  const int k = static_cast<int>(cfg.integer("k"));
  forge::LiftOptions lo;
  lo.desk = cfg.flag("desk");
  Outcome out;
  if (variant == "aux") {
    const forge::AuxTree a = forge::auxiliary_tree(t, k);
    out.result["aux"] = forge::to_json(a);
    out.result["violations"] = forge::aux_tree_violations(a);
    out.exit_code = out.result["violations"].empty() ? kExitOk : kExitNegative;
    out.message = "auxiliary tree on " + std::to_string(a.aux.order()) + " vertices";
    return out;
  }
  if (variant == "blowup") {
    const PowerHost h = power_blowup_host(cfg, t);
    const forge::Embedding et = [&] {
      forge::Embedding e;
      for (int i = 0; i < h.j.order(); ++i) e.map.push_back(i);
      return e;
    }();
    out.result["aux"] = forge::to_json(h.aux);
    out.result["r0"] = h.r0;
    out.result["ell"] = h.ell;
    out.result["host"] = {{"n", h.host.graph.order()}, {"m", h.host.graph.size()}};
    const forge::LiftResult r = forge::embed_power_via_blowup(h.aux, h.j, et, h.host.graph, h.host.map, lo);
    out.result["phi"] = forge::to_json(r.phi);
    out.result["warnings"] = r.warnings;
    out.message = "T^" + std::to_string(k) + " embedded into the (" + std::to_string(h.ell) + "," +
                  std::to_string(h.r0) + ")-blow-up of T'";
    return out;
  }
  if (variant == "greedy") {
    if (!cfg.has("graph")) throw ConfigError("graph", 0, "required for the greedy variant");
    const forge::Graph g = input_graph(cfg, "graph");
    const forge::TreeEmbedResult te = forge::embed_tree(t, g, cfg.integer("budget"));
    if (!te.embedding) {
      out.result = {{"found", false}, {"nodes", te.nodes}, {"exhausted", te.exhausted}};
      out.exit_code = kExitStage;
      out.message = "tree does not embed into the base graph";
      return out;
    }
    const forge::BlowUp b = greedy_host(cfg, t, g);
    const forge::LiftResult r = forge::greedy_power_embed_base(t, k, g, *te.embedding, b, lo);
    out.result["tree_embedding"] = forge::to_json(*te.embedding);
    out.result["ell"] = b.map.clique_size;
    out.result["phi"] = forge::to_json(r.phi);
    out.result["warnings"] = r.warnings;
    out.message = "T^" + std::to_string(k) + " embedded into G^" + std::to_string(k) + "{" +
                  std::to_string(b.map.clique_size) + "}";
    return out;
  }
  throw ConfigError("variant", 0, "expected aux, blowup or greedy, got '" + variant + "'");
}

forge::TransversalSpec transversal_spec(RunConfig& cfg) {
  forge::TransversalSpec spec;
  spec.classes = parse_classes(read_input(cfg, "classes"));
  spec.gamma = cfg.rational("gamma");
  spec.target_length = cfg.integer("target");
  return spec;
}

Outcome run_transversal(RunConfig& cfg) {
  const forge::Graph g = input_graph(cfg, "graph");
  const forge::TransversalSpec spec = transversal_spec(cfg);
  const forge::TransversalResult r = forge::find_transversal_path(g, spec, cfg.integer("budget"));
  Outcome out;
  out.result = {{"found", r.found()}, {"nodes", r.nodes}, {"exhausted", r.exhausted}};
  if (r.path) out.result["segmented"] = forge::to_json(forge::split_path(*r.path, spec.ell()));
  out.exit_code = r.found() ? kExitOk : kExitStage;
  out.message = r.found() ? "path of " + std::to_string(r.path->size()) + " vertices"
                          : (r.exhausted ? "search budget exhausted" : "no transversal path exists");
  return out;
}

forge::ConstantSet pipeline_constants(const RunConfig& cfg) {
  forge::ConstantOverrides o;
  for (const auto& [lvl, kv] : cfg.levels)
    for (const auto& [k, v] : kv) o[lvl][k] = Rational::parse(v);
  const std::string& conv = cfg.str("convention");
  forge::HConvention hc;
  if (conv == "level-index")
    hc = forge::HConvention::kLevelIndex;
  else if (conv == "shifted")
    hc = forge::HConvention::kShifted;
  else
    throw ConfigError("convention", 0, "expected level-index or shifted, got '" + conv + "'");
  return forge::derive_constants(static_cast<int>(cfg.integer("k")), static_cast<int>(cfg.integer("delta")),
                                 static_cast<int>(cfg.integer("s")), o, hc);
}

Outcome run_pipeline(RunConfig& cfg) {
  const int k = static_cast<int>(cfg.integer("k"));
  const int delta = static_cast<int>(cfg.integer("delta"));
  const int s = static_cast<int>(cfg.integer("s"));
  const std::int64_t n = cfg.integer("n");
  const std::uint64_t seed = cfg.uinteger("seed");
  if (cfg.has("constants")) read_input(cfg, "constants");  // overrides already merged into levels; pin the file
  const forge::ConstantSet cs = pipeline_constants(cfg);
  const forge::LevelParams top = forge::level_params(cs, s);

  forge::EngineOptions eo;
  eo.desk = cfg.flag("desk");
  eo.membership = check_mode(cfg.str("membership"), cfg.integer("trials"), forge::derive_seed(seed, forge::stage::kCertify, 0));
  eo.max_retries = static_cast<int>(cfg.integer("retries"));
  eo.search_budget = cfg.integer("search-budget");
  eo.lll_factor = cfg.integer("lll-factor");

  Outcome out;
  forge::Graph g;
  if (cfg.has("graph")) {
    g = input_graph(cfg, "graph");
  } else {
    forge::PnParams pp;
    pp.a = Rational(top.a);
    pp.b = top.b;
    pp.c = top.c;
    pp.ell = Rational(top.ell);
    pp.theta = top.theta;
    pp.n = n;
    forge::GenOptions go;
    go.delta = delta;
    go.k = k;
    go.desk = eo.desk;
    go.max_retries = eo.max_retries;
    go.jumbled = eo.membership;
    try {
      forge::Generated gen = forge::generate_pn(pp, forge::derive_seed(seed, forge::stage::kGenerate, 0), go);
      out.result["generation"] = forge::to_json(gen.trace);
      g = std::move(gen.graph);
    } catch (const forge::GenerationError& e) {
      out.result["generation"] = forge::to_json(e.trace());
      out.result["outcome"] = "failure";
      out.result["error"] = e.what();
      out.exit_code = kExitStage;
      out.message = e.what();
      return out;
    }
  }
  const forge::RootedTree tree = cfg.has("tree")
                                     ? input_tree(cfg, "tree")
                                     : forge::random_bounded_degree_tree(static_cast<int>(n), delta,
                                                                         forge::derive_seed(seed, forge::stage::kGenerate, 1));
  const forge::BlowUp host = forge::level_host(g, top.r, top.ell);
  const std::string& col = cfg.str("coloring");
  forge::Coloring chi;
  if (col.rfind(kAdversaryPrefix, 0) == 0) {
    const auto kind = forge::adversary_from_name(col.substr(std::string(kAdversaryPrefix).size()));
    if (!kind) throw ConfigError("coloring", 0, "unknown adversary '" + col + "'");
    chi = forge::adversary_coloring(*kind, host, s, seed);
  } else {
    std::istringstream in(read_input(cfg, "coloring"));
    chi = forge::read_coloring(in, host.graph);
  }

  const forge::Chain chain = forge::run_pipeline(tree, k, cs, g, chi, seed, eo);
  const forge::ChainVerdict v = forge::verify_chain(chain);
  out.result["chain"] = forge::to_json(chain);
  out.result["outcome"] = chain.succeeded() ? "monochromatic-copy" : "failure";
  out.result["self_check"] = {{"valid", v.valid}, {"copy", v.copy}, {"problems", v.problems}};
  out.result["constant_failures"] = json::array();
  for (const auto& c : cs.failures())
    out.result["constant_failures"].push_back({{"level", c.level}, {"name", c.name}, {"holds", forge::to_string(c.holds)}});
  if (!v.valid) {
    out.exit_code = kExitNegative;
    out.message = "chain does not verify: " + (v.problems.empty() ? std::string("?") : v.problems.front());
  } else if (chain.succeeded()) {
    out.message = "monochromatic copy of T^" + std::to_string(k) + " in colour " + std::to_string(chain.top_color) +
                  " (" + std::to_string(chain.links.size()) + " link(s), verified)";
  } else {
    const auto& last = chain.links.back();
    out.exit_code = kExitStage;
    out.message = "stage failure at level " + std::to_string(last.level) + ": " + last.message;
  }
  return out;
}

void record_problem(VerifyReport& r, const std::string& p) {
  r.valid = false;
  r.problems.push_back(p);
}

// Recorded inputs must still exist and hash the same.
void check_inputs(const RunConfig& cfg, VerifyReport& r) {
  for (const auto& [key, pv] : cfg.inputs) {
    std::string text;
    try {
      text = forge::read_file(pv.first);
    } catch (const forge::Error&) {
      record_problem(r, "input '" + key + "' (" + pv.first + ") is missing");
      continue;
    }
    if (forge::fnv1a_hex(text) != pv.second) record_problem(r, "input '" + key + "' (" + pv.first + ") has drifted");
  }
}

VerifyReport verify_pipeline(RunConfig cfg, const json& result) {
  VerifyReport r;
  check_inputs(cfg, r);
  if (!result.contains("chain")) {
    // Generation failed before the chain started; nothing beyond replay to check.
    r.summary = "failure before the chain (" + result.value("error", std::string("?")) + ")";
    return r;
  }
  const forge::Chain chain = forge::chain_from_json(result.at("chain"));
  const forge::ChainVerdict v = forge::verify_chain(chain);
  for (const auto& p : v.problems) record_problem(r, p);
  if (r.valid && !chain.links.empty()) {
    if (cfg.has("graph") && !(forge::read_graph_file(cfg.str("graph")) == chain.links[0].g))
      record_problem(r, "first link graph differs from the graph file");
    const std::string& col = cfg.str("coloring");
    if (col.rfind(kAdversaryPrefix, 0) != 0) {
      const forge::Graph host = forge::level_host(chain.links[0].g, chain.links[0].r, chain.links[0].ell).graph;
      if (!(forge::read_coloring_file(col, host).colors == chain.links[0].chi.colors))
        record_problem(r, "first link colouring differs from the colouring file");
    }
  }
  if (chain.succeeded())
    r.summary = "monochromatic copy in colour " + std::to_string(chain.top_color);
  else if (!chain.links.empty())
    r.summary = "failure chain ending at stage '" + chain.links.back().stage + "'";
  return r;
}

VerifyReport verify_by_witness(RunConfig cfg, const json& result) {
  VerifyReport r;
  check_inputs(cfg, r);
  if (!r.valid) return r;
  if (cfg.subcommand == "embed-tree") {
    if (!result.value("found", false)) {
      r.summary = "no embedding claimed";
      return r;
    }
    const forge::Embedding m = forge::embedding_from_json(result.at("embedding"));
    if (!forge::verify_embedding(input_tree(cfg, "tree").as_graph(), input_graph(cfg, "host"), m))
      record_problem(r, "embedding is not a copy of the tree in the host");
    r.summary = "tree embedding";
  } else if (cfg.subcommand == "transversal") {
    if (!result.value("found", false)) {
      r.summary = "no path claimed";
      return r;
    }
    const forge::Graph g = input_graph(cfg, "graph");
    const forge::TransversalSpec spec = transversal_spec(cfg);
    const auto path = result.at("segmented").at("path").get<forge::Path>();
    if (static_cast<std::int64_t>(path.size()) != spec.target_length) record_problem(r, "path has the wrong length");
    if (!forge::is_transversal(g, spec, path)) record_problem(r, "path is not transversal");
    r.summary = "transversal path";
  } else if (cfg.subcommand == "decompose") {
    const forge::Graph g = input_graph(cfg, "graph");
    const forge::DecompResult d = forge::decomp_result_from_json(result.at("decomposition"));
    forge::DecompOptions opt;
    opt.mode = expansion_mode(cfg);
    const forge::CertReport c = forge::certify_decomposition(g, decomp_params(cfg), d, opt.mode);
    if (d.certified() && c.verdict != forge::Verdict::kPass) record_problem(r, "decomposition does not re-certify");
    r.summary = "decomposition re-certified: " + forge::to_string(c.verdict);
  } else if (cfg.subcommand == "power-embed" && cfg.str("variant") != "aux") {
    const forge::RootedTree t = input_tree(cfg, "tree");
    const int k = static_cast<int>(cfg.integer("k"));
    const forge::Embedding phi = forge::embedding_from_json(result.at("phi"));
    forge::Graph host;
    if (cfg.str("variant") == "blowup") {
      host = power_blowup_host(cfg, t).host.graph;
    } else {
      if (!result.contains("phi")) return r;
      host = greedy_host(cfg, t, input_graph(cfg, "graph")).graph;
    }
    if (!forge::verify_embedding(forge::power(t.as_graph(), k), host, phi))
      record_problem(r, "phi is not a copy of T^k in the host");
    r.summary = "power embedding";
  }
  return r;
}

}  // namespace

const std::vector<std::string>& run_subcommands() {
  static const std::vector<std::string> names = {"generate",    "certify",     "decompose", "embed-tree",
                                                 "power-embed", "transversal", "pipeline"};
  return names;
}

const Schema& schema_for(const std::string& subcommand) {
  auto it = schemas().find(subcommand);
  if (it == schemas().end()) throw ConfigError(subcommand, 0, "unknown subcommand");
  return it->second;
}

Outcome execute(RunConfig& cfg) {
  if (cfg.subcommand == "generate") return run_generate(cfg);
  if (cfg.subcommand == "certify") return run_certify(cfg);
  if (cfg.subcommand == "decompose") return run_decompose(cfg);
  if (cfg.subcommand == "embed-tree") return run_embed_tree(cfg);
  if (cfg.subcommand == "power-embed") return run_power_embed(cfg);
  if (cfg.subcommand == "transversal") return run_transversal(cfg);
  if (cfg.subcommand == "pipeline") return run_pipeline(cfg);
  throw ConfigError(cfg.subcommand, 0, "unknown subcommand");
}

json make_artifact(const RunConfig& cfg, const Outcome& outcome) {
  return {{"schema", kSchemaVersion},
          {"kind", cfg.subcommand},
          {"exit_code", outcome.exit_code},
          {"run_config", cfg.to_json()},
          {"result", outcome.result}};
}

std::string dump_artifact(const json& artifact) { return artifact.dump(1) + "\n"; }

VerifyReport verify_artifact(const json& artifact) {
  VerifyReport r;
  try {
    if (artifact.value("schema", 0) != kSchemaVersion) {
      record_problem(r, "unsupported schema version");
      return r;
    }
    RunConfig cfg = RunConfig::from_json(artifact.at("run_config"));
    const json& result = artifact.at("result");
    if (cfg.subcommand == "pipeline") return verify_pipeline(cfg, result);
    if (cfg.subcommand == "embed-tree" || cfg.subcommand == "transversal" || cfg.subcommand == "decompose" ||
        (cfg.subcommand == "power-embed" && cfg.str("variant") != "aux")) {
      r = verify_by_witness(cfg, result);
      if (!r.valid) return r;
    }
    // Everything else (and, in addition, the above): replay and compare.
    RunConfig replay = cfg;
    const Outcome o = execute(replay);
    if (make_artifact(replay, o) != artifact) record_problem(r, "replaying the run config gives a different result");
    if (r.summary.empty()) r.summary = cfg.subcommand + " result replays";
  } catch (const InputDrift& e) {
    record_problem(r, e.what());
  } catch (const std::exception& e) {
    record_problem(r, std::string("could not check: ") + e.what());
  }
  return r;
}

namespace {

struct CliState {
  std::map<std::string, std::string> flags;
  std::string config_path, replay_path, out_path, trace_path, constants_path;
};

RunConfig resolve(const std::string& sub, const CliState& st, std::ostream& err) {
  RunConfig cfg;
  cfg.subcommand = sub;
  const Schema& schema = schema_for(sub);
  if (!st.replay_path.empty()) {
    if (!st.flags.empty() || !st.config_path.empty())
      throw ConfigError("replay", 0, "--replay takes its parameters from the artifact; drop the other options");
    const json a = json::parse(forge::read_file(st.replay_path), nullptr, false);
    if (a.is_discarded() || !a.contains("run_config")) throw forge::ParseError(0, st.replay_path + ": not an artifact");
    cfg = RunConfig::from_json(a.at("run_config"));
    if (cfg.subcommand != sub) throw ConfigError("replay", 0, "artifact was produced by '" + cfg.subcommand + "'");
    return cfg;
  }
  for (const auto& k : schema)
    if (!k.fallback.empty()) cfg.values[k.name] = k.fallback;
  if (!st.config_path.empty()) {
    ConfigFile f = parse_config(forge::read_file(st.config_path), schema);
    for (auto& [k, v] : f.values) cfg.values[k] = v;
    if (!f.levels.empty() && sub != "pipeline")
      throw ConfigError("level", 0, "[level.N] sections only apply to pipeline");
    cfg.levels = std::move(f.levels);
  }
  for (const auto& [k, v] : st.flags) {
    const auto spec = std::find_if(schema.begin(), schema.end(), [&](const KeySpec& s) { return s.name == k; });
    cfg.values[k] = canonical_value(spec->type, k, v);
  }
  if (sub == "pipeline" && cfg.has("constants")) {
    // Flags and config levels win over the constants file.
    ConfigFile f = parse_config(forge::read_file(cfg.str("constants")), {});
    for (auto& [lvl, kv] : f.levels)
      for (auto& [k, v] : kv) cfg.levels[lvl].emplace(k, v);
  }
  for (const auto& k : schema)
    if (k.required && !cfg.has(k.name)) throw ConfigError(k.name, 0, "required");
  if (needs_seed(cfg) && !cfg.has("seed")) {
    cfg.values["seed"] = std::to_string(fresh_seed());
    err << "seed = " << cfg.values["seed"] << "\n";
  }
  return cfg;
}

int run_verify(const std::string& path, std::ostream& out, std::ostream& err) {
  json a;
  try {
    a = json::parse(forge::read_file(path));
  } catch (const std::exception& e) {
    err << "verify: " << e.what() << "\n";
    return kExitUsage;
  }
  const VerifyReport r = verify_artifact(a);
  out << (r.valid ? "valid" : "INVALID") << ": " << (r.summary.empty() ? a.value("kind", std::string("?")) : r.summary)
      << "\n";
  for (const auto& p : r.problems) out << "  " << p << "\n";
  return r.valid ? kExitOk : kExitNegative;
}

}  // namespace

int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"forge: size-Ramsey constructions for powers of bounded-degree trees"};
  app.require_subcommand(1);
  std::map<std::string, CliState> state;
  std::map<std::string, std::map<std::string, std::string>> raw;
  std::string verify_path;

  for (const auto& name : run_subcommands()) {
    CLI::App* sub = app.add_subcommand(name, "");
    CliState& st = state[name];
    for (const auto& k : schema_for(name)) {
      std::string help = k.help;
      if (!k.fallback.empty()) help += " [" + k.fallback + "]";
      sub->add_option("--" + k.name, raw[name][k.name], help);
    }
    sub->add_option("--config", st.config_path, "key = value file; flags override it");
    sub->add_option("--replay", st.replay_path, "rerun from the run config embedded in an artifact");
    if (name == "generate") {
      sub->add_option("--out", st.out_path, "graph file to write")->required();
      sub->add_option("--trace", st.trace_path, "artifact JSON (default: <out>.json)");
    } else {
      sub->add_option("--out", st.out_path, "artifact JSON (default: stdout)");
    }
  }
  app.get_subcommand("generate")->description("sample a graph from the class P_n(a,b,c,ell,theta)");
  app.get_subcommand("certify")->description("check bijumbledness or class membership of a graph");
  app.get_subcommand("decompose")->description("expanding subgraph or separated parts");
  app.get_subcommand("embed-tree")->description("embed a tree into a host graph");
  app.get_subcommand("power-embed")->description("lift tree embeddings to tree powers in blow-ups");
  app.get_subcommand("transversal")->description("long path cycling through vertex classes");
  app.get_subcommand("pipeline")->description("find a monochromatic T^k or a certified failure");
  CLI::App* verify = app.add_subcommand("verify", "re-check an artifact against its inputs");
  verify->add_option("artifact", verify_path, "artifact JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  if (verify->parsed()) return run_verify(verify_path, out, err);

  std::string sub;
  for (const auto& name : run_subcommands())
    if (app.get_subcommand(name)->parsed()) sub = name;
  CliState& st = state[sub];
  for (const auto& [k, v] : raw[sub])
    if (app.get_subcommand(sub)->count("--" + k) > 0) st.flags[k] = v;

  try {
    RunConfig cfg = resolve(sub, st, err);
    const Outcome o = execute(cfg);
    const std::string artifact = dump_artifact(make_artifact(cfg, o));
    if (sub == "generate") {
      if (!o.graph_text.empty()) forge::write_file_atomic(st.out_path, o.graph_text);
      forge::write_file_atomic(st.trace_path.empty() ? st.out_path + ".json" : st.trace_path, artifact);
    } else if (!st.out_path.empty()) {
      forge::write_file_atomic(st.out_path, artifact);
    } else {
      out << artifact;
    }
    (o.exit_code == kExitOk ? (st.out_path.empty() && sub != "generate" ? err : out) : err)
        << sub << ": " << o.message << "\n";
    return o.exit_code;
  } catch (const ConfigError& e) {
    err << sub << ": " << e.what() << "\n" << app.get_subcommand(sub)->help();
    return kExitUsage;
  } catch (const InputDrift& e) {
    err << sub << ": " << e.what() << "\n";
    return kExitNegative;
  } catch (const forge::StageFailure& e) {
    err << sub << ": " << e.what() << "\n";
    return kExitStage;
  } catch (const forge::CapacityError& e) {
    err << sub << ": " << e.what() << "\n";
    return kExitStage;
  } catch (const forge::Error& e) {
    err << sub << ": " << e.what() << "\n";
    return kExitUsage;
  }
}

}  // namespace forge_cli
