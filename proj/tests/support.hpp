#pragma once

// Shared fixtures and independent oracles for the test suite. Everything in
// here recomputes quantities by enumeration so library results can be
// checked against a second code path.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "advim/bench.hpp"
#include "advim/lt.hpp"
#include "advim/vrr.hpp"

namespace support {

using namespace advim;

// s -> b -> c, both edges weight 1: fully deterministic diffusion.
inline Graph make_g1() {
  return Graph::from_edges(3, {{0, 1, 1.0}, {1, 2, 1.0}}, {"s", "b", "c"});
}

// s -> b (0.5), s -> c (0.3), b -> c (0.5): the standard hand-checked case.
inline Graph make_g2() {
  return Graph::from_edges(3, {{0, 1, 0.5}, {0, 2, 0.3}, {1, 2, 0.5}},
                           {"s", "b", "c"});
}

// ---------------------------------------------------------------------------
// Path oracle: every live chain from a seed to a non-seed node, with its
// exact mass (product of edge weights). A node's activation probability is
// the mass sum of its chains, and the drop from removing an attack set is
// the mass of the chains the attack touches.

struct PathInfo {
  std::vector<NodeId> nodes;  // root first, seed last
  std::vector<EdgeId> edges;  // edges[i] connects nodes[i+1] -> nodes[i]
  double mass = 0;
  std::uint64_t ve = 0;  // node bits 0..7, edge bits 8..63 (seeds excluded)
};

class BruteOracle {
 public:
  BruteOracle(const Graph& g, const SeedSet& s) : g_(g), s_(s) {
    if (g.num_nodes() > 8 || g.num_edge_slots() > 56)
      throw std::invalid_argument("BruteOracle: graph too large for masks");
    std::vector<char> on_path(g.num_nodes(), 0);
    PathInfo cur;
    for (NodeId root = 0; root < g.num_nodes(); ++root) {
      if (g.node_removed(root) || s.contains(root)) continue;
      cur.nodes = {root};
      cur.edges.clear();
      cur.mass = 1.0;
      cur.ve = std::uint64_t{1} << root;
      on_path[root] = 1;
      extend(cur, root, on_path);
      on_path[root] = 0;
    }
    for (const PathInfo& p : paths_) sigma_minus_ += p.mass;
  }

  const std::vector<PathInfo>& paths() const { return paths_; }
  double sigma_minus() const { return sigma_minus_; }
  double spread() const { return sigma_minus_ + static_cast<double>(s_.size()); }

  std::uint64_t attack_mask(const AttackSet& a) const {
    std::uint64_t m = 0;
    for (NodeId v : a.nodes) m |= std::uint64_t{1} << v;
    for (EdgeId e : a.edges) m |= std::uint64_t{1} << (8 + e);
    return m;
  }

  double rho(const AttackSet& a) const { return rho_mask(attack_mask(a)); }

  double rho_mask(std::uint64_t amask) const {
    double total = 0;
    for (const PathInfo& p : paths_)
      if (p.ve & amask) total += p.mass;
    return total;
  }

 private:
  void extend(PathInfo& cur, NodeId at, std::vector<char>& on_path) {
    for (EdgeId e : g_.in_edges(at)) {
      const EdgeRec& rec = g_.edge(e);
      if (rec.weight <= 0) continue;
      const NodeId u = rec.src;
      if (s_.contains(u)) {
        PathInfo done = cur;
        done.nodes.push_back(u);
        done.edges.push_back(e);
        done.mass *= rec.weight;
        done.ve |= std::uint64_t{1} << (8 + e);
        paths_.push_back(std::move(done));
        continue;
      }
      if (on_path[u]) continue;
      cur.nodes.push_back(u);
      cur.edges.push_back(e);
      const double saved_mass = cur.mass;
      const std::uint64_t saved_ve = cur.ve;
      cur.mass *= rec.weight;
      cur.ve |= std::uint64_t{1} << u;
      cur.ve |= std::uint64_t{1} << (8 + e);
      on_path[u] = 1;
      extend(cur, u, on_path);
      on_path[u] = 0;
      cur.nodes.pop_back();
      cur.edges.pop_back();
      cur.mass = saved_mass;
      cur.ve = saved_ve;
    }
  }

  const Graph& g_;
  const SeedSet& s_;
  std::vector<PathInfo> paths_;
  double sigma_minus_ = 0;
};

// A sampler path and an oracle path describe the same chain when the node
// sequences match.
inline std::string path_key(const std::vector<NodeId>& nodes) {
  std::string k;
  for (NodeId v : nodes) {
    k += std::to_string(v);
    k += '>';
  }
  return k;
}

// ---------------------------------------------------------------------------
// Configuration oracle: odometer over each non-seed node's live in-edge
// choice ("none" included), fixed-point reachability per configuration.
// Slower than the path oracle but yields joint quantities like the spread
// variance.

struct SpreadLaw {
  double mean = 0;      // E[activated count], seeds included
  double variance = 0;  // Var[activated count]
};

namespace detail {

template <class Visit>
void odometer(const Graph& g, const SeedSet& s, Visit&& visit) {
  std::vector<NodeId> free_nodes;
  for (NodeId v = 0; v < g.num_nodes(); ++v)
    if (!g.node_removed(v) && !s.contains(v) && g.in_degree(v) > 0)
      free_nodes.push_back(v);
  std::vector<std::size_t> choice(free_nodes.size(), 0);
  std::vector<EdgeId> sel(g.num_nodes(), kNoEdge);
  for (;;) {
    double prob = 1.0;
    for (std::size_t i = 0; i < free_nodes.size(); ++i) {
      const NodeId v = free_nodes[i];
      const auto in = g.in_edges(v);
      if (choice[i] < in.size()) {
        sel[v] = in[choice[i]];
        prob *= g.edge(in[choice[i]]).weight;
      } else {
        sel[v] = kNoEdge;
        prob *= std::max(0.0, 1.0 - g.in_weight_sum(v));
      }
    }
    if (prob > 0) visit(sel, prob);
    std::size_t i = 0;
    for (; i < free_nodes.size(); ++i) {
      if (++choice[i] <= g.in_degree(free_nodes[i])) break;
      choice[i] = 0;
    }
    if (i == free_nodes.size()) return;
  }
}

// Reusable per-configuration reachability (fixed-point over the selected
// in-edges). One instance per enumeration keeps allocations out of the loop.
class ConfigReach {
 public:
  ConfigReach(const Graph& g, const SeedSet& s, const AttackSet* block)
      : g_(g),
        s_(s),
        active_(g.num_nodes(), 0),
        attacked_node_(g.num_nodes(), 0),
        attacked_edge_(g.num_edge_slots(), 0) {
    if (block) {
      for (NodeId v : block->nodes) attacked_node_[v] = 1;
      for (EdgeId e : block->edges) attacked_edge_[e] = 1;
    }
  }

  std::size_t run(const std::vector<EdgeId>& sel, bool blocked) {
    std::fill(active_.begin(), active_.end(), 0);
    std::size_t count = 0;
    for (NodeId v : s_.ids()) {
      active_[v] = 1;
      ++count;
    }
    for (bool changed = true; changed;) {
      changed = false;
      for (NodeId v = 0; v < g_.num_nodes(); ++v) {
        if (active_[v] || g_.node_removed(v) || s_.contains(v)) continue;
        if (blocked && attacked_node_[v]) continue;
        const EdgeId e = sel[v];
        if (e == kNoEdge) continue;
        if (blocked && attacked_edge_[e]) continue;
        const NodeId u = g_.edge(e).src;
        if (blocked && attacked_node_[u]) continue;
        if (!active_[u]) continue;
        active_[v] = 1;
        ++count;
        changed = true;
      }
    }
    return count;
  }

 private:
  const Graph& g_;
  const SeedSet& s_;
  std::vector<char> active_;
  std::vector<char> attacked_node_;
  std::vector<char> attacked_edge_;
};

}  // namespace detail

inline SpreadLaw enumerate_spread_law(const Graph& g, const SeedSet& s) {
  SpreadLaw law;
  double ex = 0, ex2 = 0;
  detail::ConfigReach reach(g, s, nullptr);
  detail::odometer(g, s, [&](const std::vector<EdgeId>& sel, double p) {
    const double r = static_cast<double>(reach.run(sel, false));
    ex += p * r;
    ex2 += p * r * r;
  });
  law.mean = ex;
  law.variance = ex2 - ex * ex;
  return law;
}

inline double enumerate_reduction(const Graph& g, const SeedSet& s,
                                  const AttackSet& a) {
  double total = 0;
  detail::ConfigReach reach(g, s, &a);
  detail::odometer(g, s, [&](const std::vector<EdgeId>& sel, double p) {
    const std::size_t full = reach.run(sel, false);
    const std::size_t cut = reach.run(sel, true);
    total += p * static_cast<double>(full - cut);
  });
  return total;
}

// ---------------------------------------------------------------------------
// Plain greedy over a fixed path sample: gains recounted from scratch every
// round. node_edge_selection must produce exactly this under its tie rule.

inline SelectionResult plain_greedy(const std::vector<RRPath>& paths,
                                    const Graph& g, const SeedSet& s,
                                    const Budgets& b) {
  std::vector<std::vector<std::uint32_t>> node_pids(g.num_nodes());
  std::vector<std::vector<std::uint32_t>> edge_pids(g.num_edge_slots());
  for (std::uint32_t pid = 0; pid < paths.size(); ++pid) {
    for (NodeId v : paths[pid].nodes)
      if (!s.contains(v)) node_pids[v].push_back(pid);
    for (EdgeId e : paths[pid].edges) edge_pids[e].push_back(pid);
  }
  std::vector<char> covered(paths.size(), 0);
  std::size_t covered_count = 0;
  SelectionResult out;
  std::size_t left_nodes = b.max_nodes, left_edges = b.max_edges;
  while (left_nodes > 0 || left_edges > 0) {
    std::size_t best_gain = 0;
    bool best_is_node = true;
    NodeId best_a = 0, best_b = 0;
    std::uint32_t best_elem = 0;
    auto consider = [&](std::size_t gain, bool is_node, NodeId a, NodeId bb,
                        std::uint32_t elem) {
      if (gain == 0) return;
      bool better;
      if (best_gain == 0)
        better = true;
      else if (gain != best_gain)
        better = gain > best_gain;
      else if (is_node != best_is_node)
        better = is_node;
      else if (a != best_a)
        better = a < best_a;
      else
        better = bb < best_b;
      if (better) {
        best_gain = gain;
        best_is_node = is_node;
        best_a = a;
        best_b = bb;
        best_elem = elem;
      }
    };
    auto uncovered = [&](const std::vector<std::uint32_t>& pids) {
      std::size_t n = 0;
      for (std::uint32_t pid : pids) n += !covered[pid];
      return n;
    };
    if (left_nodes > 0)
      for (NodeId v = 0; v < g.num_nodes(); ++v)
        consider(uncovered(node_pids[v]), true, v, 0, v);
    if (left_edges > 0)
      for (EdgeId e = 0; e < g.num_edge_slots(); ++e)
        if (!edge_pids[e].empty())
          consider(uncovered(edge_pids[e]), false, g.edge(e).src,
                   g.edge(e).dst, e);
    if (best_gain == 0) break;
    const auto& pids = best_is_node ? node_pids[best_elem] : edge_pids[best_elem];
    for (std::uint32_t pid : pids)
      if (!covered[pid]) {
        covered[pid] = 1;
        ++covered_count;
      }
    if (best_is_node) {
      out.attack.nodes.push_back(best_elem);
      --left_nodes;
    } else {
      out.attack.edges.push_back(best_elem);
      --left_edges;
    }
  }
  out.attack.normalize();
  out.coverage = paths.empty() ? 0.0
                               : static_cast<double>(covered_count) /
                                     static_cast<double>(paths.size());
  return out;
}

// ---------------------------------------------------------------------------
// Random small-graph corpus.

struct CaseOpts {
  std::size_t min_n = 3;
  std::size_t max_n = 8;
  bool dag_only = false;
  std::size_t max_seeds = 2;
  std::size_t min_non_seed = 2;
};

struct SmallCase {
  Graph g;
  std::vector<NodeId> seed_ids;
};

namespace detail {

inline bool reaches_non_seed(const Graph& g, const std::vector<NodeId>& seeds) {
  std::vector<char> is_seed(g.num_nodes(), 0), seen(g.num_nodes(), 0);
  for (NodeId v : seeds) is_seed[v] = seen[v] = 1;
  std::vector<NodeId> queue = seeds;
  for (std::size_t head = 0; head < queue.size(); ++head)
    for (EdgeId e : g.out_edges(queue[head])) {
      if (g.edge(e).weight <= 0) continue;
      const NodeId v = g.edge(e).dst;
      if (seen[v]) continue;
      if (!is_seed[v]) return true;
      seen[v] = 1;
      queue.push_back(v);
    }
  return false;
}

}  // namespace detail

// Weighted graph plus seed ids such that the seeds can activate at least one
// non-seed node and at least min_non_seed non-seeds exist.
inline SmallCase random_case(std::mt19937_64& eng, const CaseOpts& o = {}) {
  std::uniform_int_distribution<std::size_t> n_dist(o.min_n, o.max_n);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int tries = 0; tries < 2000; ++tries) {
    const std::size_t n = n_dist(eng);
    const double pe = o.dag_only ? 0.45 : 0.3;
    std::vector<EdgeRec> edges;
    for (NodeId i = 0; i < n; ++i)
      for (NodeId j = 0; j < n; ++j) {
        if (i == j) continue;
        if (o.dag_only && i > j) continue;
        if (unit(eng) < pe)
          edges.push_back({i, j, kUnsetWeight});
      }
    if (edges.empty()) continue;
    Graph g = Graph::from_edges(n, std::move(edges));
    if (unit(eng) < 0.5) {
      g = assign_weights(g, WeightScheme::kWeightedCascade);
    } else {
      std::uniform_real_distribution<double> p_dist(0.15, 0.6);
      g = assign_weights(g, WeightScheme::kUniform, p_dist(eng));
    }
    std::uniform_int_distribution<std::size_t> k_dist(
        1, std::min(o.max_seeds, n - o.min_non_seed));
    const std::size_t k = k_dist(eng);
    std::vector<NodeId> ids(n);
    std::iota(ids.begin(), ids.end(), NodeId{0});
    std::shuffle(ids.begin(), ids.end(), eng);
    ids.resize(k);
    std::sort(ids.begin(), ids.end());
    if (!detail::reaches_non_seed(g, ids)) continue;
    return SmallCase{std::move(g), std::move(ids)};
  }
  throw std::runtime_error("random_case: no viable case after 2000 tries");
}

// Non-empty random attack set within the budgets.
inline AttackSet random_attack(std::mt19937_64& eng, const Graph& g,
                               const SeedSet& s, std::size_t max_nodes = 2,
                               std::size_t max_edges = 2) {
  std::vector<NodeId> cand_nodes;
  for (NodeId v = 0; v < g.num_nodes(); ++v)
    if (!g.node_removed(v) && !s.contains(v)) cand_nodes.push_back(v);
  std::vector<EdgeId> cand_edges;
  for (EdgeId e = 0; e < g.num_edge_slots(); ++e)
    if (!g.edge_removed(e)) cand_edges.push_back(e);
  std::shuffle(cand_nodes.begin(), cand_nodes.end(), eng);
  std::shuffle(cand_edges.begin(), cand_edges.end(), eng);
  AttackSet a;
  for (int tries = 0; tries < 100 && a.empty(); ++tries) {
    std::uniform_int_distribution<std::size_t> qn_dist(
        0, std::min(max_nodes, cand_nodes.size()));
    std::uniform_int_distribution<std::size_t> qe_dist(
        0, std::min(max_edges, cand_edges.size()));
    a.nodes.assign(cand_nodes.begin(), cand_nodes.begin() + qn_dist(eng));
    a.edges.assign(cand_edges.begin(), cand_edges.begin() + qe_dist(eng));
  }
  if (a.empty() && !cand_nodes.empty()) a.nodes.push_back(cand_nodes[0]);
  if (a.empty() && !cand_edges.empty()) a.edges.push_back(cand_edges[0]);
  a.normalize();
  return a;
}

}  // namespace support
