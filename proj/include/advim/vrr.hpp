#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "advim/graph.hpp"

namespace advim {

class CycleDetected : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class MaxAttemptsExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Why a reverse walk ends: it reached a seed (the path is valid), the last
// node drew no live in-edge, or the drawn in-edge led back onto the path.
enum class PathEnd { kSeed, kNoLiveEdge, kLoopBack };

// Reverse-reachable path. nodes[0] is the root; edges[i] connects
// nodes[i+1] -> nodes[i]. work is the binary-search cost of the walk:
// ceil(log2(indeg+1)) per non-seed node on the path.
struct RRPath {
  NodeId root = kNoNode;
  std::vector<NodeId> nodes;
  std::vector<EdgeId> edges;
  bool valid = false;
  PathEnd end = PathEnd::kNoLiveEdge;
  double work = 0;
};

struct SamplerStats {
  std::size_t paths_returned = 0;
  std::size_t rr_attempts = 0;  // reverse walks started, rejected ones included
  std::size_t forests = 0;      // forward forests grown, empty ones included
  double omega_work = 0;        // cumulative RRPath::work over all walks
  double activated_sum = 0;     // non-seed activations summed over forests
  double wall_ms = 0;
};

// Activated non-seed nodes of one forward diffusion run, in activation
// order, each with the live in-edge that fired for it.
struct ForwardForest {
  std::vector<NodeId> nodes;
  std::vector<NodeId> parent;      // may be a seed
  std::vector<EdgeId> parent_edge;
};

// Work-unit charge for one live-edge draw at a node of in-degree d.
inline int node_work(std::size_t d) {
  int bits = 0;
  while (d > 0) {
    ++bits;
    d >>= 1;
  }
  return bits;  // ceil(log2(d+1))
}

// Shared scratch for the reverse and forward samplers on one (graph, seeds)
// pair. Construct once per run; all methods are deterministic in the Rng.
class RrSampler {
 public:
  RrSampler(const Graph& g, const SeedSet& s);

  // One reverse walk from `root` (must be a present non-seed node).
  RRPath walk_from(NodeId root, Rng& rng);

  // Rejection sampler: uniform random root, walk, retry until a walk reaches
  // a seed. Throws MaxAttemptsExceeded after max_attempts rejections.
  RRPath sample_valid(Rng& rng);

  // Forward diffusion recording parents.
  ForwardForest grow_forest(Rng& rng);

  // Grows forests until one activates a non-seed node, then returns the
  // reverse parent chain from a uniformly chosen activated non-seed node.
  RRPath sample_forward_backward(Rng& rng);

  const SamplerStats& stats() const { return stats_; }
  SamplerStats& stats() { return stats_; }

  std::size_t max_attempts = 1'000'000;

 private:
  const Graph& g_;
  const SeedSet& s_;
  std::vector<NodeId> roots_;  // present non-seed nodes
  std::vector<char> on_path_;
  std::vector<std::uint32_t> path_stamp_;
  std::vector<EdgeId> sel_;
  std::vector<std::uint32_t> sel_stamp_;
  std::vector<NodeId> fparent_;
  std::vector<EdgeId> fparent_edge_;
  std::vector<char> factive_;
  std::vector<std::uint32_t> fact_stamp_;
  std::vector<NodeId> fqueue_;
  std::uint32_t round_ = 0;
  SamplerStats stats_;
};

// Convenience wrappers matching the sampler surface one call at a time.
RRPath sample_rr_path(const Graph& g, const SeedSet& s, NodeId root, Rng& rng);
RRPath naive_vrr(const Graph& g, const SeedSet& s, Rng& rng,
                 SamplerStats* stats = nullptr,
                 std::size_t max_attempts = 1'000'000);
ForwardForest sample_forward_forest(const Graph& g, const SeedSet& s, Rng& rng);
RRPath fb_vrr(const Graph& g, const SeedSet& s, Rng& rng,
              SamplerStats* stats = nullptr,
              std::size_t max_attempts = 1'000'000);

struct ActivationProbabilities {
  std::vector<double> ap;  // 1 for seeds, else sum over in-edges of ap*w
  double sigma_minus = 0;  // sum of ap over non-seed present nodes
};

// One pass in topological order; requires an acyclic graph.
ActivationProbabilities compute_activation_probabilities(const Graph& g,
                                                         const SeedSet& s);

// Sampling tables for the exact re-weighted reverse walk on a DAG: roots are
// drawn proportionally to ap, reverse steps from v pick in-edge (u,v) with
// mass ap(u) * w(u,v) / ap(v). Walks never reject.
class DagModel {
 public:
  DagModel(const Graph& dag, const SeedSet& s);

  RRPath sample(Rng& rng) const;
  double sigma_minus() const { return ap_.sigma_minus; }
  const std::vector<double>& ap() const { return ap_.ap; }
  double total_work() const { return tau_total_; }  // sum of node_work, non-seeds

  const Graph& graph() const { return g_; }
  const SeedSet& seeds() const { return s_; }

 private:
  const Graph& g_;
  const SeedSet& s_;
  ActivationProbabilities ap_;
  std::vector<NodeId> root_nodes_;
  std::vector<double> root_cum_;
  std::vector<std::size_t> step_off_;
  std::vector<EdgeId> step_edge_;
  std::vector<double> step_cum_;
  std::vector<int> tau_;
  double tau_total_ = 0;
};

inline DagModel build_dag_model(const Graph& dag, const SeedSet& s) {
  return DagModel(dag, s);
}
inline RRPath dag_vrr(const DagModel& m, Rng& rng, SamplerStats* stats = nullptr) {
  RRPath p = m.sample(rng);
  if (stats) {
    ++stats->paths_returned;
    ++stats->rr_attempts;
    stats->omega_work += p.work;
  }
  return p;
}

// Shortest-path DAG rooted at the seed set: run Dijkstra from all seeds with
// edge length -ln w, then keep edge (u,v) iff d(u) < d(v), breaking distance
// ties toward the lower node id. Unreachable nodes are dropped. Node and
// edge ids are preserved (dropped elements are marked removed).
Graph extract_dag(const Graph& g, const SeedSet& s);

}  // namespace advim
