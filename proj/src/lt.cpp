#include "advim/lt.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

namespace advim {

namespace {

// Scratch arrays shared across simulation runs. Stamps avoid clearing
// n-sized vectors on every run.
struct SimScratch {
  explicit SimScratch(const Graph& g)
      : sel(g.num_nodes(), kNoEdge),
        sel_stamp(g.num_nodes(), 0),
        thr(g.num_nodes(), 0),
        acc(g.num_nodes(), 0),
        active(g.num_nodes(), 0),
        act_stamp(g.num_nodes(), 0) {}

  std::vector<EdgeId> sel;
  std::vector<std::uint32_t> sel_stamp;
  std::vector<double> thr;  // thresholds / accumulators for kThreshold
  std::vector<double> acc;
  std::vector<char> active;
  std::vector<std::uint32_t> act_stamp;
  std::vector<NodeId> queue;
  std::uint32_t draw_round = 0;  // one per live-edge sample of the graph
  std::uint32_t pass_round = 0;  // one per reachability pass

  void next_draw() { ++draw_round; }
  void next_pass() { ++pass_round; }

  bool sel_known(NodeId v) const { return sel_stamp[v] == draw_round; }
  EdgeId selection(const Graph& g, NodeId v, Rng& rng) {
    if (!sel_known(v)) {
      sel[v] = g.sample_live_in_edge(v, rng);
      sel_stamp[v] = draw_round;
    }
    return sel[v];
  }
  double threshold(NodeId v, Rng& rng) {
    if (sel_stamp[v] != draw_round) {
      thr[v] = 1.0 - rng.next_unit();  // (0,1]: zero-weight edges never fire
      acc[v] = 0;
      sel_stamp[v] = draw_round;
    }
    return thr[v];
  }
  bool is_active(NodeId v) const {
    return act_stamp[v] == pass_round && active[v];
  }
  void mark_active(NodeId v) {
    act_stamp[v] = pass_round;
    active[v] = 1;
  }
};

struct BlockMask {
  std::vector<char> node;
  std::vector<char> edge;

  BlockMask(const Graph& g, const AttackSet& a)
      : node(g.num_nodes(), 0), edge(g.num_edge_slots(), 0) {
    for (NodeId v : a.nodes) node[v] = 1;
    for (EdgeId e : a.edges) edge[e] = 1;
    // Edges incident to removed nodes die with them.
    for (EdgeId e = 0; e < g.num_edge_slots(); ++e) {
      if (g.edge_removed(e)) continue;
      if (node[g.edge(e).src] || node[g.edge(e).dst]) edge[e] = 1;
    }
  }
};

// Forward pass over one live-edge draw. Selections are sampled lazily on
// first touch and reused by later passes of the same draw, which is what
// makes the paired estimator share randomness between the intact and the
// attacked graph. Returns the number of activated nodes.
std::size_t live_edge_pass(const Graph& g, const SeedSet& s, SimScratch& ws,
                           Rng& rng, const BlockMask* blocked,
                           std::vector<NodeId>* out) {
  ws.next_pass();
  ws.queue.clear();
  for (NodeId v : s.ids()) {
    ws.mark_active(v);
    ws.queue.push_back(v);
  }
  std::size_t count = s.size();
  for (std::size_t head = 0; head < ws.queue.size(); ++head) {
    const NodeId u = ws.queue[head];
    for (EdgeId e : g.out_edges(u)) {
      const NodeId v = g.edge(e).dst;
      if (ws.is_active(v)) continue;
      if (blocked && blocked->node[v]) continue;
      if (ws.selection(g, v, rng) != e) continue;
      if (blocked && blocked->edge[e]) continue;
      ws.mark_active(v);
      ws.queue.push_back(v);
      ++count;
    }
  }
  if (out) *out = ws.queue;
  return count;
}

std::size_t threshold_pass(const Graph& g, const SeedSet& s, SimScratch& ws,
                           Rng& rng, std::vector<NodeId>* out) {
  ws.next_pass();
  ws.queue.clear();
  for (NodeId v : s.ids()) {
    ws.mark_active(v);
    ws.queue.push_back(v);
  }
  std::size_t count = s.size();
  for (std::size_t head = 0; head < ws.queue.size(); ++head) {
    const NodeId u = ws.queue[head];
    for (EdgeId e : g.out_edges(u)) {
      const NodeId v = g.edge(e).dst;
      if (ws.is_active(v)) continue;
      const double thr = ws.threshold(v, rng);
      ws.acc[v] += g.edge(e).weight;
      if (ws.acc[v] < thr) continue;
      ws.mark_active(v);
      ws.queue.push_back(v);
      ++count;
    }
  }
  if (out) *out = ws.queue;
  return count;
}

struct Welford {
  double mean = 0, m2 = 0;
  std::size_t count = 0;
  void add(double x) {
    ++count;
    const double d = x - mean;
    mean += d / static_cast<double>(count);
    m2 += d * (x - mean);
  }
  double std_error() const {
    if (count < 2) return 0;
    const double var = m2 / static_cast<double>(count - 1);
    return std::sqrt(var / static_cast<double>(count));
  }
};

void require_weighted(const Graph& g, const char* who) {
  if (!g.weighted())
    throw std::invalid_argument(std::string(who) + ": graph has no weights");
}

// Resolves activation per node by chasing selected in-edges until a seed, a
// dead end, a known node or a cycle is hit. Statuses: 0 unknown, 1 active,
// 2 inactive. Used by the exact enumerators where every node is queried.
struct ChaseScratch {
  std::vector<char> status;
  std::vector<std::uint32_t> stamp;
  std::vector<NodeId> stack;
  std::vector<char> on_stack;
  std::vector<std::uint32_t> stack_stamp;
  std::uint32_t round = 0;

  explicit ChaseScratch(std::size_t n)
      : status(n, 0), stamp(n, 0), on_stack(n, 0), stack_stamp(n, 0) {}

  void next_round() { ++round; }

  std::size_t count_reached(const Graph& g, const SeedSet& s,
                            const std::vector<EdgeId>& sel,
                            const BlockMask* blocked) {
    next_round();
    std::size_t count = 0;
    for (NodeId v = 0; v < g.num_nodes(); ++v) {
      if (g.node_removed(v)) continue;
      if (resolve(g, s, sel, blocked, v) == 1) ++count;
    }
    return count;
  }

  char resolve(const Graph& g, const SeedSet& s, const std::vector<EdgeId>& sel,
               const BlockMask* blocked, NodeId v) {
    stack.clear();
    char result = 0;
    NodeId cur = v;
    for (;;) {
      if (stamp[cur] == round && status[cur] != 0) {
        result = status[cur];
        break;
      }
      if (s.contains(cur)) {
        result = 1;
        break;
      }
      if (stack_stamp[cur] == round && on_stack[cur]) {
        result = 2;  // walked into the current chain: a cycle feeds itself
        break;
      }
      if (blocked && blocked->node[cur]) {
        result = 2;
        break;
      }
      const EdgeId e = sel[cur];
      if (e == kNoEdge || (blocked && blocked->edge[e])) {
        result = 2;
        break;
      }
      stack.push_back(cur);
      stack_stamp[cur] = round;
      on_stack[cur] = 1;
      cur = g.edge(e).src;
    }
    for (NodeId w : stack) {
      status[w] = result;
      stamp[w] = round;
      on_stack[w] = 0;
    }
    if (!s.contains(v)) {
      status[v] = result;
      stamp[v] = round;
    }
    return result;
  }
};

// Depth-first product over per-node live in-edge choices. Seeds never
// influence reachability through their own in-edges, so only non-seed nodes
// with at least one in-edge are enumerated; everyone else keeps kNoEdge.
// Calls leaf(sel, prob) once per configuration.
template <class Leaf>
void enumerate_configs(const Graph& g, const SeedSet& s, std::uint64_t cap,
                       Leaf&& leaf) {
  require_weighted(g, "exact enumeration");
  std::vector<NodeId> vars;
  std::uint64_t total = 1;
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    if (g.node_removed(v) || s.contains(v) || g.in_degree(v) == 0) continue;
    const std::uint64_t choices = g.in_degree(v) + 1;
    if (total > cap / choices)
      throw EnumCapExceeded("exact enumeration needs more than " +
                            std::to_string(cap) + " configurations");
    total *= choices;
    vars.push_back(v);
  }

  std::vector<EdgeId> sel(g.num_nodes(), kNoEdge);
  auto rec = [&](auto&& self, std::size_t depth, double p) -> void {
    if (depth == vars.size()) {
      leaf(sel, p);
      return;
    }
    const NodeId v = vars[depth];
    for (EdgeId e : g.in_edges(v)) {
      sel[v] = e;
      self(self, depth + 1, p * g.edge(e).weight);
    }
    sel[v] = kNoEdge;
    const double none = 1.0 - g.in_weight_sum(v);
    self(self, depth + 1, p * (none > 0 ? none : 0.0));
  };
  rec(rec, 0, 1.0);
}

}  // namespace

LiveEdgeGraph sample_live_edge_graph(const Graph& g, Rng& rng) {
  require_weighted(g, "sample_live_edge_graph");
  LiveEdgeGraph l;
  l.selected.assign(g.num_nodes(), kNoEdge);
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    if (g.node_removed(v)) continue;
    l.selected[v] = g.sample_live_in_edge(v, rng);
  }
  return l;
}

std::vector<NodeId> reachable_in_live_graph(const Graph& g, const SeedSet& s,
                                            const LiveEdgeGraph& l) {
  std::vector<char> active(g.num_nodes(), 0);
  std::vector<NodeId> queue(s.ids().begin(), s.ids().end());
  for (NodeId v : queue) active[v] = 1;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    for (EdgeId e : g.out_edges(queue[head])) {
      const NodeId v = g.edge(e).dst;
      if (active[v]) continue;
      if (l.selected[v] != e) continue;
      active[v] = 1;
      queue.push_back(v);
    }
  }
  return queue;
}

std::vector<NodeId> forward_simulate(const Graph& g, const SeedSet& s, Rng& rng,
                                     SimSemantics sem) {
  require_weighted(g, "forward_simulate");
  SimScratch ws(g);
  ws.next_draw();
  std::vector<NodeId> out;
  if (sem == SimSemantics::kLiveEdge)
    live_edge_pass(g, s, ws, rng, nullptr, &out);
  else
    threshold_pass(g, s, ws, rng, &out);
  return out;
}

SpreadEstimate estimate_spread(const Graph& g, const SeedSet& s,
                               std::size_t sims, Rng& rng, SimSemantics sem) {
  require_weighted(g, "estimate_spread");
  if (sims == 0) throw std::invalid_argument("estimate_spread: sims == 0");
  SimScratch ws(g);
  Welford acc;
  for (std::size_t i = 0; i < sims; ++i) {
    ws.next_draw();
    const std::size_t size =
        sem == SimSemantics::kLiveEdge
            ? live_edge_pass(g, s, ws, rng, nullptr, nullptr)
            : threshold_pass(g, s, ws, rng, nullptr);
    acc.add(static_cast<double>(size));
  }
  return {acc.mean, acc.std_error(), sims};
}

ReductionEstimate estimate_reduction(const Graph& g, const SeedSet& s,
                                     const AttackSet& a, std::size_t sims,
                                     bool paired, Rng& rng) {
  require_weighted(g, "estimate_reduction");
  if (sims == 0) throw std::invalid_argument("estimate_reduction: sims == 0");
  a.validate(g, &s);
  if (!paired) {
    const SpreadEstimate before = estimate_spread(g, s, sims, rng);
    const Graph cut = remove_elements(g, a);
    const SpreadEstimate after = estimate_spread(cut, s, sims, rng);
    ReductionEstimate r;
    r.mean = before.mean - after.mean;
    r.std_error = std::sqrt(before.std_error * before.std_error +
                            after.std_error * after.std_error);
    r.before_mean = before.mean;
    r.after_mean = after.mean;
    r.samples = sims;
    r.paired = false;
    return r;
  }
  const BlockMask blocked(g, a);
  SimScratch ws(g);
  Welford acc;
  std::uint64_t full_sum = 0;
  std::uint64_t cut_sum = 0;
  for (std::size_t i = 0; i < sims; ++i) {
    ws.next_draw();
    const std::size_t full = live_edge_pass(g, s, ws, rng, nullptr, nullptr);
    const std::size_t cut = live_edge_pass(g, s, ws, rng, &blocked, nullptr);
    assert(cut <= full);
    full_sum += full;
    cut_sum += cut;
    acc.add(static_cast<double>(full - cut));
  }
  ReductionEstimate r;
  r.mean = acc.mean;
  r.std_error = acc.std_error();
  r.before_mean = static_cast<double>(full_sum) / static_cast<double>(sims);
  r.after_mean = static_cast<double>(cut_sum) / static_cast<double>(sims);
  r.samples = sims;
  r.paired = true;
  return r;
}

double exact_spread(const Graph& g, const SeedSet& s, std::uint64_t cap) {
  ChaseScratch chase(g.num_nodes());
  double total = 0;
  enumerate_configs(g, s, cap, [&](const std::vector<EdgeId>& sel, double p) {
    total += p * static_cast<double>(chase.count_reached(g, s, sel, nullptr));
  });
  return total;
}

double exact_reduction(const Graph& g, const SeedSet& s, const AttackSet& a,
                       std::uint64_t cap) {
  a.validate(g, &s);
  const BlockMask blocked(g, a);
  ChaseScratch chase(g.num_nodes());
  double total = 0;
  enumerate_configs(g, s, cap, [&](const std::vector<EdgeId>& sel, double p) {
    const std::size_t full = chase.count_reached(g, s, sel, nullptr);
    const std::size_t cut = chase.count_reached(g, s, sel, &blocked);
    total += p * static_cast<double>(full - cut);
  });
  return total;
}

}  // namespace advim
