#include "advim/vrr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

namespace advim {

RrSampler::RrSampler(const Graph& g, const SeedSet& s)
    : g_(g),
      s_(s),
      on_path_(g.num_nodes(), 0),
      path_stamp_(g.num_nodes(), 0),
      sel_(g.num_nodes(), kNoEdge),
      sel_stamp_(g.num_nodes(), 0),
      fparent_(g.num_nodes(), kNoNode),
      fparent_edge_(g.num_nodes(), kNoEdge),
      factive_(g.num_nodes(), 0),
      fact_stamp_(g.num_nodes(), 0) {
  if (!g.weighted())
    throw std::invalid_argument("RrSampler: graph has no weights");
  for (NodeId v = 0; v < g.num_nodes(); ++v)
    if (!g.node_removed(v) && !s.contains(v)) roots_.push_back(v);
}

RRPath RrSampler::walk_from(NodeId root, Rng& rng) {
  if (root >= g_.num_nodes() || g_.node_removed(root) || s_.contains(root))
    throw std::invalid_argument("walk_from: root must be a present non-seed");
  ++round_;
  ++stats_.rr_attempts;
  RRPath p;
  p.root = root;
  p.nodes.push_back(root);
  on_path_[root] = 1;
  path_stamp_[root] = round_;
  NodeId cur = root;
  for (;;) {
    p.work += node_work(g_.in_degree(cur));
    const EdgeId e = g_.sample_live_in_edge(cur, rng);
    if (e == kNoEdge) {
      p.end = PathEnd::kNoLiveEdge;
      break;
    }
    const NodeId u = g_.edge(e).src;
    if (path_stamp_[u] == round_ && on_path_[u]) {
      p.end = PathEnd::kLoopBack;
      break;
    }
    p.edges.push_back(e);
    p.nodes.push_back(u);
    if (s_.contains(u)) {
      p.end = PathEnd::kSeed;
      p.valid = true;
      break;
    }
    on_path_[u] = 1;
    path_stamp_[u] = round_;
    cur = u;
  }
  stats_.omega_work += p.work;
  return p;
}

RRPath RrSampler::sample_valid(Rng& rng) {
  if (roots_.empty())
    throw std::invalid_argument("sample_valid: every node is a seed");
  for (std::size_t attempt = 0; attempt < max_attempts; ++attempt) {
    const NodeId root =
        roots_[static_cast<std::size_t>(rng.next_below(roots_.size()))];
    RRPath p = walk_from(root, rng);
    if (p.valid) {
      ++stats_.paths_returned;
      return p;
    }
  }
  throw MaxAttemptsExceeded(
      "no valid reverse path after " + std::to_string(max_attempts) +
      " attempts; the seed set may be unable to reach any non-seed");
}

ForwardForest RrSampler::grow_forest(Rng& rng) {
  ++round_;
  ++stats_.forests;
  fqueue_.clear();
  for (NodeId v : s_.ids()) {
    factive_[v] = 1;
    fact_stamp_[v] = round_;
    fqueue_.push_back(v);
  }
  ForwardForest f;
  for (std::size_t head = 0; head < fqueue_.size(); ++head) {
    const NodeId u = fqueue_[head];
    for (EdgeId e : g_.out_edges(u)) {
      const NodeId v = g_.edge(e).dst;
      if (fact_stamp_[v] == round_ && factive_[v]) continue;
      if (sel_stamp_[v] != round_) {
        sel_[v] = g_.sample_live_in_edge(v, rng);
        sel_stamp_[v] = round_;
      }
      if (sel_[v] != e) continue;
      factive_[v] = 1;
      fact_stamp_[v] = round_;
      fparent_[v] = u;
      fparent_edge_[v] = e;
      fqueue_.push_back(v);
      f.nodes.push_back(v);
      f.parent.push_back(u);
      f.parent_edge.push_back(e);
    }
  }
  stats_.activated_sum += static_cast<double>(f.nodes.size());
  return f;
}

RRPath RrSampler::sample_forward_backward(Rng& rng) {
  for (std::size_t attempt = 0; attempt < max_attempts; ++attempt) {
    const ForwardForest f = grow_forest(rng);
    if (f.nodes.empty()) continue;
    const NodeId pick =
        f.nodes[static_cast<std::size_t>(rng.next_below(f.nodes.size()))];
    RRPath p;
    p.root = pick;
    p.valid = true;
    p.end = PathEnd::kSeed;
    NodeId cur = pick;
    for (;;) {
      p.nodes.push_back(cur);
      if (s_.contains(cur)) break;
      p.work += node_work(g_.in_degree(cur));
      p.edges.push_back(fparent_edge_[cur]);
      cur = fparent_[cur];
    }
    ++stats_.paths_returned;
    stats_.omega_work += p.work;
    return p;
  }
  throw MaxAttemptsExceeded(
      "no forest activated a non-seed node after " +
      std::to_string(max_attempts) + " attempts");
}

RRPath sample_rr_path(const Graph& g, const SeedSet& s, NodeId root, Rng& rng) {
  RrSampler sampler(g, s);
  return sampler.walk_from(root, rng);
}

RRPath naive_vrr(const Graph& g, const SeedSet& s, Rng& rng, SamplerStats* stats,
                 std::size_t max_attempts) {
  RrSampler sampler(g, s);
  sampler.max_attempts = max_attempts;
  RRPath p = sampler.sample_valid(rng);
  if (stats) {
    stats->paths_returned += sampler.stats().paths_returned;
    stats->rr_attempts += sampler.stats().rr_attempts;
    stats->omega_work += sampler.stats().omega_work;
  }
  return p;
}

ForwardForest sample_forward_forest(const Graph& g, const SeedSet& s, Rng& rng) {
  RrSampler sampler(g, s);
  return sampler.grow_forest(rng);
}

RRPath fb_vrr(const Graph& g, const SeedSet& s, Rng& rng, SamplerStats* stats,
              std::size_t max_attempts) {
  RrSampler sampler(g, s);
  sampler.max_attempts = max_attempts;
  RRPath p = sampler.sample_forward_backward(rng);
  if (stats) {
    stats->paths_returned += sampler.stats().paths_returned;
    stats->forests += sampler.stats().forests;
    stats->omega_work += sampler.stats().omega_work;
    stats->activated_sum += sampler.stats().activated_sum;
  }
  return p;
}

ActivationProbabilities compute_activation_probabilities(const Graph& g,
                                                         const SeedSet& s) {
  if (!g.weighted())
    throw std::invalid_argument(
        "compute_activation_probabilities: graph has no weights");
  const auto order = topological_order(g);
  if (!order)
    throw CycleDetected("activation probabilities need an acyclic graph");
  ActivationProbabilities r;
  r.ap.assign(g.num_nodes(), 0.0);
  for (NodeId v : *order) {
    if (s.contains(v)) {
      r.ap[v] = 1.0;
      continue;
    }
    double acc = 0;
    for (EdgeId e : g.in_edges(v)) acc += r.ap[g.edge(e).src] * g.edge(e).weight;
    r.ap[v] = acc;
    r.sigma_minus += acc;
  }
  return r;
}

DagModel::DagModel(const Graph& dag, const SeedSet& s)
    : g_(dag), s_(s), ap_(compute_activation_probabilities(dag, s)) {
  if (!(ap_.sigma_minus > 0.0))
    throw std::invalid_argument(
        "DagModel: seed set cannot reach any non-seed node");
  double acc = 0;
  for (NodeId v = 0; v < g_.num_nodes(); ++v) {
    if (g_.node_removed(v) || s.contains(v) || ap_.ap[v] <= 0.0) continue;
    acc += ap_.ap[v];
    root_nodes_.push_back(v);
    root_cum_.push_back(acc);
  }

  tau_.assign(g_.num_nodes(), 0);
  step_off_.assign(g_.num_nodes() + 1, 0);
  for (NodeId v = 0; v < g_.num_nodes(); ++v) {
    step_off_[v + 1] = step_off_[v];
    if (g_.node_removed(v)) continue;
    tau_[v] = node_work(g_.in_degree(v));
    if (s.contains(v)) continue;
    tau_total_ += tau_[v];
    if (ap_.ap[v] <= 0.0) continue;
    for (EdgeId e : g_.in_edges(v)) {
      const double mass = ap_.ap[g_.edge(e).src] * g_.edge(e).weight;
      if (mass <= 0.0) continue;
      step_edge_.push_back(e);
      step_off_[v + 1] = step_edge_.size();
    }
  }
  step_cum_.assign(step_edge_.size(), 0.0);
  for (NodeId v = 0; v < g_.num_nodes(); ++v) {
    double cum = 0;
    for (std::size_t i = step_off_[v]; i < step_off_[v + 1]; ++i) {
      const EdgeRec& rec = g_.edge(step_edge_[i]);
      cum += ap_.ap[rec.src] * rec.weight;
      step_cum_[i] = cum;
    }
  }
}

RRPath DagModel::sample(Rng& rng) const {
  RRPath p;
  // Root v with probability ap(v) / sigma_minus.
  const double rx = rng.next_unit() * root_cum_.back();
  const auto rit = std::upper_bound(root_cum_.begin(), root_cum_.end(), rx);
  std::size_t ri = static_cast<std::size_t>(rit - root_cum_.begin());
  if (ri >= root_nodes_.size()) ri = root_nodes_.size() - 1;
  NodeId cur = root_nodes_[ri];
  p.root = cur;
  p.nodes.push_back(cur);
  while (!s_.contains(cur)) {
    p.work += tau_[cur];
    const std::size_t lo = step_off_[cur], hi = step_off_[cur + 1];
    const double total = step_cum_[hi - 1];
    const double x = rng.next_unit() * total;
    const auto it =
        std::upper_bound(step_cum_.begin() + lo, step_cum_.begin() + hi, x);
    std::size_t i = static_cast<std::size_t>(it - step_cum_.begin());
    if (i >= hi) i = hi - 1;
    const EdgeId e = step_edge_[i];
    p.edges.push_back(e);
    cur = g_.edge(e).src;
    p.nodes.push_back(cur);
  }
  p.valid = true;
  p.end = PathEnd::kSeed;
  return p;
}

Graph extract_dag(const Graph& g, const SeedSet& s) {
  if (!g.weighted())
    throw std::invalid_argument("extract_dag: graph has no weights");
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(g.num_nodes(), inf);
  using Item = std::pair<double, NodeId>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
  for (NodeId v : s.ids()) {
    dist[v] = 0;
    pq.emplace(0.0, v);
  }
  while (!pq.empty()) {
    const auto [d, u] = pq.top();
    pq.pop();
    if (d > dist[u]) continue;
    for (EdgeId e : g.out_edges(u)) {
      const EdgeRec& rec = g.edge(e);
      if (rec.weight <= 0.0) continue;
      const double nd = d - std::log(rec.weight);
      if (nd < dist[rec.dst]) {
        dist[rec.dst] = nd;
        pq.emplace(nd, rec.dst);
      }
    }
  }

  // Strict order on nodes: distance, then seeds first so that distance
  // ties (weight-1.0 edges) never orphan the frontier, then id. Keeping
  // only order-increasing edges guarantees acyclicity.
  const auto before = [&](NodeId a, NodeId b) {
    if (dist[a] != dist[b]) return dist[a] < dist[b];
    const bool sa = s.contains(a), sb = s.contains(b);
    if (sa != sb) return sa;
    return a < b;
  };

  std::vector<char> drop_node(g.num_nodes(), 0);
  std::vector<char> drop_edge(g.num_edge_slots(), 0);
  for (NodeId v = 0; v < g.num_nodes(); ++v)
    if (!g.node_removed(v) && dist[v] == inf) drop_node[v] = 1;
  for (EdgeId e = 0; e < g.num_edge_slots(); ++e) {
    if (g.edge_removed(e)) continue;
    const EdgeRec& rec = g.edge(e);
    const double du = dist[rec.src], dv = dist[rec.dst];
    const bool keep = du < inf && dv < inf && before(rec.src, rec.dst);
    if (!keep) drop_edge[e] = 1;
  }
  return g.masked_copy(drop_node, drop_edge);
}

}  // namespace advim
