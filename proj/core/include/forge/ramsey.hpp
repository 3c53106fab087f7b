#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "forge/blowup.hpp"
#include "forge/constants.hpp"
#include "forge/embed.hpp"
#include "forge/errors.hpp"
#include "forge/expansion.hpp"
#include "forge/graph.hpp"
#include "forge/pseudorandom.hpp"
#include "forge/tree.hpp"

namespace forge {

/// The host of a level: G^r{l}, sheared with the index-aligned matching.
BlowUp level_host(const Graph& g, int r, int ell);

/// t vertices of `clique` (positions in list order, lexicographically least)
/// spanning only host edges of colour `color`.
std::optional<std::vector<Vertex>> find_mono_clique(const Graph& host, const Coloring& chi,
                                                    std::span<const Vertex> clique, int t, int color);

struct MonoClique {
  int color = 0;
  std::vector<Vertex> vertices;
};

/// Lowest colour first. Empty when no colour has a t-clique, which can only
/// happen below |clique| >= r_s(t).
std::optional<MonoClique> mono_clique_in_clique(const Graph& host, const Coloring& chi,
                                                std::span<const Vertex> clique, int t);

/// W, the blue cliques C'(w) and the graph J of one induction step.
///
/// J lives on W (J vertex i is G vertex w[i]); its edges are the G^{r'}
/// edges between W vertices whose blue cliques span a blue K_{r0,r0}.
/// `j_map` is the matching (t, r0)-blow-up: clique_of[i] = C'(w[i]) and the
/// biclique sides as positions into those lists, in j.edges() order.
struct RamseyState {
  int blue = 0;
  std::vector<int> available;  // per colour: G vertices whose clique holds a mono t-clique
  std::vector<Vertex> w;
  std::vector<int> w_index;  // G vertex -> J id, -1 outside W
  Graph j;
  BlowUpMap j_map;
  std::int64_t kst_checked = 0;  // non-J pairs whose blue edge count was compared to the KST bound
  std::vector<std::string> warnings;
};

/// Majority colour by availability (ties: lowest id), W, C'(w) and J.
/// Throws StageFailure("majority") when |W| < |V(G)|/s.
RamseyState build_majority_j(const BlowUp& host, const Coloring& chi, int t, int r0);

/// Moser-Tardos resampling over variables with finite candidate lists.
/// Event e is the variable pair events[e]; it is violated when
/// bad(choice[u], choice[v]) holds. The lowest violated event is resampled.
struct LllProblem {
  std::vector<std::vector<Vertex>> candidates;
  std::vector<std::pair<int, int>> events;
  std::function<bool(Vertex, Vertex)> bad;
};

struct LllResult {
  std::vector<Vertex> choice;
  bool converged = false;
  std::int64_t resamples = 0;
  std::int64_t events = 0;
};

LllResult lll_select(const LllProblem& problem, std::uint64_t seed, std::int64_t max_resamples);

/// 40 (b^{r+1} l + l^2) t^{-1/r0}, evaluated in logs (may be +inf).
double lll_condition(double b, int r, double ell, double t, int r0);

/// Pattern edges all mapped to host edges of one colour.
bool verify_monochromatic_copy(const Graph& pattern, const Graph& host, const Coloring& chi, const Embedding& m,
                               int color);

/// Executable integer view of one level of a ConstantSet.
struct LevelParams {
  int level = 1;
  int r = 1;
  int ell = 1;
  std::int64_t a = 3;
  Rational b{1}, c{1}, theta{1};
  // Step data, present for level >= 2.
  int t = 0;
  int r0 = 0;
  Rational c_star{0}, d0{0}, eta{0};
};

/// Throws PreconditionError naming the first constant that is symbolic or
/// does not fit the executable ranges.
LevelParams level_params(const ConstantSet& cs, int level);

struct EngineOptions {
  bool desk = false;
  CheckMode membership = CheckMode::sampled(2000);
  ExpansionMode expansion = ExpansionMode{};
  int max_retries = 32;
  std::int64_t search_budget = 5'000'000;
  std::int64_t lll_factor = 1000;  // resample budget per event
};

/// One stage of the chain. A reduced link hands (h, x, next colouring) to
/// the next link; the others end the chain.
struct ChainLink {
  enum class Kind { kReduced, kMonochromatic, kBase, kFailure };
  Kind kind = Kind::kFailure;
  int level = 1;
  Graph g;
  int r = 1;
  int ell = 1;
  Coloring chi;
  int blue = -1;
  std::vector<Vertex> x;  // reduced: next host vertex -> this host vertex
  int color = -1;
  Embedding phi;  // monochromatic/base: T^k into this host
  std::string stage;
  std::string message;
  nlohmann::json trace = nlohmann::json::object();
};

std::string to_string(ChainLink::Kind kind);

struct Chain {
  RootedTree tree;
  int k = 1;
  int delta = 2;
  int s = 1;
  std::vector<ChainLink> links;
  std::optional<Embedding> top_phi;  // T^k into the first host
  int top_color = -1;
  bool succeeded() const noexcept { return top_phi.has_value(); }
};

nlohmann::json to_json(const Chain& chain);
Chain chain_from_json(const nlohmann::json& j);

struct ChainVerdict {
  bool valid = true;         // every recorded claim re-checks
  bool copy = false;         // and the chain ends in a monochromatic copy
  std::vector<std::string> problems;
};

/// Rebuilds every host from the serialized graphs and re-checks each link.
ChainVerdict verify_chain(const Chain& chain);

/// A stage failure inside the induction step, carrying the trace gathered
/// before it.
class TracedFailure : public StageFailure {
 public:
  TracedFailure(const std::string& stage, const std::string& what, nlohmann::json trace)
      : StageFailure(stage, what), trace_(std::move(trace)) {}
  const nlohmann::json& trace() const noexcept { return trace_; }

 private:
  nlohmann::json trace_;
};

struct StepResult {
  ChainLink link;
  Graph h;           // reduced only: the next level's graph
  Coloring chi_next;  // and its colouring of level_host(h, r, l)
};

/// The induction step on instance (g, chi) at `here.level` >= 2, with the
/// unprimed constants from `below`. Stage failures propagate as exceptions.
StepResult induction_step(const Graph& g, const Coloring& chi, const RootedTree& tree, int k, int delta,
                          const LevelParams& here, const LevelParams& below, std::uint64_t seed,
                          const EngineOptions& options = {});

/// The gray branch on parts V_1..V_l of J (J ids): transversal path,
/// quotient H', sparsified and trimmed H, template check, LLL selection.
StepResult gray_branch(const Graph& g, const BlowUp& host, const Coloring& chi, const RamseyState& state,
                       const std::vector<VertexSet>& parts, std::int64_t n, const LevelParams& here,
                       const LevelParams& below, std::uint64_t seed, const EngineOptions& options = {});

/// Expanding subgraph, tree embedding, greedy lift into G^r{l}.
ChainLink base_case(const Graph& g, const Coloring& chi, const RootedTree& tree, int k, int delta,
                    const LevelParams& here, const EngineOptions& options = {});

/// Outer induction from level s down to 1, stopping at the first
/// monochromatic copy or stage failure.
Chain run_pipeline(const RootedTree& tree, int k, const ConstantSet& cs, const Graph& g, const Coloring& chi,
                   std::uint64_t seed, const EngineOptions& options = {});

/// Built-in colourings of a level host.
enum class Adversary { kAllOneColor, kRandom, kCliqueAlternating };
std::optional<Adversary> adversary_from_name(const std::string& name);
Coloring adversary_coloring(Adversary kind, const BlowUp& host, int s, std::uint64_t seed);

}  // namespace forge
