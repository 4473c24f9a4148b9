#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "advim/graph.hpp"

namespace advim {

// Thrown when an exact computation would enumerate more configurations than
// the caller allowed.
class EnumCapExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::uint64_t kDefaultEnumCap = std::uint64_t{1} << 24;

// Per-node live in-edge draw: selected[v] is an in-edge id or kNoEdge.
struct LiveEdgeGraph {
  std::vector<EdgeId> selected;
};

// Forward simulation can run on the live-edge draw directly or on the
// equivalent threshold process; both sample the same activation law.
enum class SimSemantics { kLiveEdge, kThreshold };

struct SpreadEstimate {
  double mean = 0;
  double std_error = 0;
  std::size_t samples = 0;
};

struct ReductionEstimate {
  double mean = 0;
  double std_error = 0;
  double before_mean = 0;  // spread on the intact graph
  double after_mean = 0;   // spread with the attack applied
  std::size_t samples = 0;
  bool paired = true;
};

LiveEdgeGraph sample_live_edge_graph(const Graph& g, Rng& rng);

// Nodes reachable from the seeds along selected live edges (seeds included).
std::vector<NodeId> reachable_in_live_graph(const Graph& g, const SeedSet& s,
                                            const LiveEdgeGraph& l);

// One diffusion run from the seed set; returns the activated nodes.
std::vector<NodeId> forward_simulate(const Graph& g, const SeedSet& s, Rng& rng,
                                     SimSemantics sem = SimSemantics::kLiveEdge);

// Monte Carlo mean activated-set size over `sims` runs.
SpreadEstimate estimate_spread(const Graph& g, const SeedSet& s,
                               std::size_t sims, Rng& rng,
                               SimSemantics sem = SimSemantics::kLiveEdge);

// Spread drop caused by removing `a`. Paired mode reuses one live-edge draw
// for both graphs per run (every per-run difference is >= 0); unpaired mode
// differences two independent spread estimates.
ReductionEstimate estimate_reduction(const Graph& g, const SeedSet& s,
                                     const AttackSet& a, std::size_t sims,
                                     bool paired, Rng& rng);

// Exact expected spread by enumerating every combination of per-node live
// in-edge choices over non-seed nodes. Throws EnumCapExceeded if the product
// of (indeg+1) over those nodes exceeds `cap`.
double exact_spread(const Graph& g, const SeedSet& s,
                    std::uint64_t cap = kDefaultEnumCap);

// Exact expected reduction, enumerated with the same coupling as the paired
// estimator. Equals exact_spread(g,s) - exact_spread(remove_elements(g,a),s).
double exact_reduction(const Graph& g, const SeedSet& s, const AttackSet& a,
                       std::uint64_t cap = kDefaultEnumCap);

}  // namespace advim
