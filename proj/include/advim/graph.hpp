#pragma once

#include <cstdint>
#include <istream>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "advim/rng.hpp"

namespace advim {

using NodeId = std::uint32_t;
using EdgeId = std::uint32_t;

inline constexpr NodeId kNoNode = std::numeric_limits<NodeId>::max();
inline constexpr EdgeId kNoEdge = std::numeric_limits<EdgeId>::max();
inline constexpr double kUnsetWeight = -1.0;

// Incoming weight sums may exceed 1 by at most this much before a graph is
// rejected as inadmissible.
inline constexpr double kWeightSumTolerance = 1e-9;

struct EdgeRec {
  NodeId src = kNoNode;
  NodeId dst = kNoNode;
  double weight = kUnsetWeight;
};

enum class DuplicatePolicy { kReject, kKeepFirst, kSumThenClamp };
enum class WeightScheme { kWeightedCascade, kUniform, kExplicit };

struct AttackSet;

// Directed influence graph. Node and edge ids are dense and stable: removing
// elements marks them and rebuilds adjacency, it never renumbers, so seed
// sets and attack sets stay meaningful across derived graphs.
class Graph {
 public:
  Graph() = default;

  // Builds a graph over ids 0..n-1. Labels default to "v<id>". Rejects
  // self-loops, duplicate edges, out-of-range endpoints and weights outside
  // [0,1] (kUnsetWeight means "not assigned yet"; it must be used on all
  // edges or none).
  static Graph from_edges(std::size_t n, std::vector<EdgeRec> edges,
                          std::vector<std::string> labels = {});

  std::size_t num_nodes() const { return labels_.size(); }  // id space
  std::size_t num_present_nodes() const { return present_nodes_; }
  std::size_t num_edges() const { return present_edges_; }  // live edges
  std::size_t num_edge_slots() const { return edges_.size(); }

  bool node_removed(NodeId v) const { return node_removed_[v] != 0; }
  bool edge_removed(EdgeId e) const { return edge_removed_[e] != 0; }
  bool weighted() const { return weighted_; }

  const EdgeRec& edge(EdgeId e) const { return edges_[e]; }
  std::span<const EdgeId> in_edges(NodeId v) const {
    return {in_edge_ids_.data() + in_off_[v], in_off_[v + 1] - in_off_[v]};
  }
  std::span<const EdgeId> out_edges(NodeId v) const {
    return {out_edge_ids_.data() + out_off_[v], out_off_[v + 1] - out_off_[v]};
  }
  std::size_t in_degree(NodeId v) const { return in_off_[v + 1] - in_off_[v]; }
  std::size_t out_degree(NodeId v) const {
    return out_off_[v + 1] - out_off_[v];
  }
  double in_weight_sum(NodeId v) const {
    const std::size_t lo = in_off_[v], hi = in_off_[v + 1];
    return lo == hi ? 0.0 : in_cum_weight_[hi - 1];
  }

  // Live-edge draw for v: in-edge (u,v) is selected with probability w(u,v),
  // no edge with the residual mass. Requires assigned weights.
  EdgeId sample_live_in_edge(NodeId v, Rng& rng) const;

  // Edge id of (src,dst) among live edges, kNoEdge if absent.
  EdgeId find_edge(NodeId src, NodeId dst) const;

  const std::string& label(NodeId v) const { return labels_[v]; }
  NodeId id_of(const std::string& label) const;

  // Copy with additional removals applied (union with existing marks) and
  // adjacency rebuilt. Used by remove_elements and the DAG extraction.
  Graph masked_copy(const std::vector<char>& drop_node,
                    const std::vector<char>& drop_edge) const;

  // Copy with per-edge weights replaced; validates domain and admissibility.
  Graph reweighted(std::vector<double> edge_weights) const;

 private:
  void rebuild_adjacency();
  void validate_weights() const;

  std::vector<std::string> labels_;
  std::unordered_map<std::string, NodeId> label_to_id_;
  std::vector<EdgeRec> edges_;
  std::vector<char> node_removed_;
  std::vector<char> edge_removed_;
  std::size_t present_nodes_ = 0;
  std::size_t present_edges_ = 0;
  bool weighted_ = false;

  std::vector<std::size_t> in_off_, out_off_;
  std::vector<EdgeId> in_edge_ids_, out_edge_ids_;
  // Cumulative in-weights aligned with in_edge_ids_, per-node runs.
  std::vector<double> in_cum_weight_;
};

// Parses "src dst [weight]" lines; '#' starts a comment line, blank lines are
// skipped. Labels are arbitrary whitespace-free tokens, ids assigned in
// first-appearance order. Either every line carries a weight or none does.
Graph load_edge_list(std::istream& in,
                     DuplicatePolicy policy = DuplicatePolicy::kReject);

// kWeightedCascade: w(u,v) = 1/indeg(v). kUniform: w = p, with any node whose
// incoming sum would exceed 1 rescaled to sum exactly 1. kExplicit: keeps
// loaded weights, failing if any edge has none.
Graph assign_weights(const Graph& g, WeightScheme scheme, double uniform_p = 0);

// Non-empty set of present nodes, validated against a graph at construction.
class SeedSet {
 public:
  SeedSet(const Graph& g, std::vector<NodeId> ids);
  const std::vector<NodeId>& ids() const { return ids_; }
  std::size_t size() const { return ids_.size(); }
  bool contains(NodeId v) const { return mask_[v] != 0; }

 private:
  std::vector<NodeId> ids_;
  std::vector<char> mask_;
};

inline std::size_t non_seed_count(const Graph& g, const SeedSet& s) {
  return g.num_present_nodes() - s.size();
}

// Removal target: a set of nodes plus a set of edges. Node and edge ids refer
// to the graph the set was built against.
struct AttackSet {
  std::vector<NodeId> nodes;
  std::vector<EdgeId> edges;

  bool empty() const { return nodes.empty() && edges.empty(); }
  std::size_t size() const { return nodes.size() + edges.size(); }
  void normalize();  // sort + dedupe both parts

  // Existence against g; disjointness from the seed set when one is given.
  void validate(const Graph& g, const SeedSet* seeds = nullptr) const;
};

struct Budgets {
  std::size_t max_nodes = 0;
  std::size_t max_edges = 0;
};

// New graph with the attack applied: listed nodes disappear together with all
// incident edges, listed edges disappear individually. Weights of surviving
// edges are untouched. Removal is idempotent within one call (an edge may be
// listed alongside an endpoint).
Graph remove_elements(const Graph& g, const AttackSet& a);

// Topological order over present nodes, or nullopt if a cycle exists.
std::optional<std::vector<NodeId>> topological_order(const Graph& g);

}  // namespace advim
