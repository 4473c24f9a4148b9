#include "advim/graph.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace advim {

namespace {

[[noreturn]] void fail(const std::string& msg) {
  throw std::runtime_error("graph: " + msg);
}

}  // namespace

Graph Graph::from_edges(std::size_t n, std::vector<EdgeRec> edges,
                        std::vector<std::string> labels) {
  Graph g;
  if (labels.empty()) {
    labels.reserve(n);
    for (std::size_t v = 0; v < n; ++v) labels.push_back("v" + std::to_string(v));
  }
  if (labels.size() != n) fail("label count does not match node count");
  g.labels_ = std::move(labels);
  for (std::size_t v = 0; v < n; ++v) {
    if (!g.label_to_id_.emplace(g.labels_[v], static_cast<NodeId>(v)).second)
      fail("duplicate label '" + g.labels_[v] + "'");
  }

  std::size_t with_weight = 0;
  for (const EdgeRec& e : edges) {
    if (e.src >= n || e.dst >= n) fail("edge endpoint out of range");
    if (e.src == e.dst) fail("self-loop at node " + g.labels_[e.src]);
    if (e.weight != kUnsetWeight) {
      if (!(e.weight >= 0.0 && e.weight <= 1.0))
        fail("edge weight outside [0,1]");
      ++with_weight;
    }
  }
  if (with_weight != 0 && with_weight != edges.size())
    fail("mixed weighted and unweighted edges");
  g.weighted_ = !edges.empty() && with_weight == edges.size();
  g.edges_ = std::move(edges);
  g.node_removed_.assign(n, 0);
  g.edge_removed_.assign(g.edges_.size(), 0);
  g.rebuild_adjacency();
  if (g.weighted_) g.validate_weights();
  return g;
}

void Graph::rebuild_adjacency() {
  const std::size_t n = labels_.size();
  in_off_.assign(n + 1, 0);
  out_off_.assign(n + 1, 0);
  present_edges_ = 0;
  for (EdgeId e = 0; e < edges_.size(); ++e) {
    if (edge_removed_[e]) continue;
    ++in_off_[edges_[e].dst + 1];
    ++out_off_[edges_[e].src + 1];
    ++present_edges_;
  }
  for (std::size_t v = 0; v < n; ++v) {
    in_off_[v + 1] += in_off_[v];
    out_off_[v + 1] += out_off_[v];
  }
  in_edge_ids_.assign(present_edges_, kNoEdge);
  out_edge_ids_.assign(present_edges_, kNoEdge);
  std::vector<std::size_t> in_pos(in_off_.begin(), in_off_.end() - 1);
  std::vector<std::size_t> out_pos(out_off_.begin(), out_off_.end() - 1);
  // Edge ids ascend within each adjacency run, keeping iteration and
  // duplicate detection deterministic.
  for (EdgeId e = 0; e < edges_.size(); ++e) {
    if (edge_removed_[e]) continue;
    in_edge_ids_[in_pos[edges_[e].dst]++] = e;
    out_edge_ids_[out_pos[edges_[e].src]++] = e;
  }
  for (EdgeId e = 0; e < edges_.size(); ++e) {
    if (edge_removed_[e]) continue;
    const EdgeRec& rec = edges_[e];
    const EdgeId dup = find_edge(rec.src, rec.dst);
    if (dup != e) fail("duplicate edge " + labels_[rec.src] + " -> " + labels_[rec.dst]);
  }
  in_cum_weight_.assign(present_edges_, 0.0);
  if (weighted_) {
    for (std::size_t v = 0; v < n; ++v) {
      double acc = 0.0;
      for (std::size_t i = in_off_[v]; i < in_off_[v + 1]; ++i) {
        acc += edges_[in_edge_ids_[i]].weight;
        in_cum_weight_[i] = acc;
      }
    }
  }
  present_nodes_ = 0;
  for (std::size_t v = 0; v < n; ++v)
    if (!node_removed_[v]) ++present_nodes_;
}

void Graph::validate_weights() const {
  for (std::size_t v = 0; v < labels_.size(); ++v) {
    const double sum = in_weight_sum(static_cast<NodeId>(v));
    if (sum > 1.0 + kWeightSumTolerance)
      fail("incoming weights of node " + labels_[v] + " sum to " +
           std::to_string(sum) + " > 1");
  }
}

EdgeId Graph::sample_live_in_edge(NodeId v, Rng& rng) const {
  const std::size_t lo = in_off_[v], hi = in_off_[v + 1];
  if (lo == hi) return kNoEdge;
  const double x = rng.next_unit();
  if (x >= in_cum_weight_[hi - 1]) return kNoEdge;
  const auto it = std::upper_bound(in_cum_weight_.begin() + lo,
                                   in_cum_weight_.begin() + hi, x);
  return in_edge_ids_[static_cast<std::size_t>(it - in_cum_weight_.begin())];
}

EdgeId Graph::find_edge(NodeId src, NodeId dst) const {
  if (src >= num_nodes() || dst >= num_nodes()) return kNoEdge;
  for (EdgeId e : in_edges(dst))
    if (edges_[e].src == src) return e;
  return kNoEdge;
}

NodeId Graph::id_of(const std::string& label) const {
  const auto it = label_to_id_.find(label);
  if (it == label_to_id_.end()) fail("unknown node label '" + label + "'");
  return it->second;
}

Graph Graph::masked_copy(const std::vector<char>& drop_node,
                         const std::vector<char>& drop_edge) const {
  Graph g = *this;
  for (std::size_t v = 0; v < g.node_removed_.size(); ++v)
    if (v < drop_node.size() && drop_node[v]) g.node_removed_[v] = 1;
  for (std::size_t e = 0; e < g.edge_removed_.size(); ++e) {
    if (e < drop_edge.size() && drop_edge[e]) g.edge_removed_[e] = 1;
    if (g.node_removed_[g.edges_[e].src] || g.node_removed_[g.edges_[e].dst])
      g.edge_removed_[e] = 1;
  }
  g.rebuild_adjacency();
  return g;
}

Graph Graph::reweighted(std::vector<double> edge_weights) const {
  if (edge_weights.size() != edges_.size())
    fail("weight vector size does not match edge count");
  Graph g = *this;
  for (EdgeId e = 0; e < g.edges_.size(); ++e) {
    if (g.edge_removed_[e]) continue;
    if (!(edge_weights[e] >= 0.0 && edge_weights[e] <= 1.0))
      fail("edge weight outside [0,1]");
    g.edges_[e].weight = edge_weights[e];
  }
  g.weighted_ = true;
  g.rebuild_adjacency();
  g.validate_weights();
  return g;
}

Graph load_edge_list(std::istream& in, DuplicatePolicy policy) {
  std::vector<std::string> labels;
  std::unordered_map<std::string, NodeId> ids;
  auto intern = [&](const std::string& tok) -> NodeId {
    const auto it = ids.find(tok);
    if (it != ids.end()) return it->second;
    const NodeId v = static_cast<NodeId>(labels.size());
    labels.push_back(tok);
    ids.emplace(tok, v);
    return v;
  };

  std::vector<EdgeRec> edges;
  std::unordered_map<std::uint64_t, std::size_t> seen;  // (src,dst) -> index
  std::string line;
  std::size_t line_no = 0;
  int weighted = -1;  // unknown until the first data line
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string src_tok, dst_tok, w_tok, extra;
    if (!(ls >> src_tok)) continue;  // blank
    if (src_tok[0] == '#') continue;
    if (!(ls >> dst_tok))
      fail("line " + std::to_string(line_no) + ": expected 'src dst [weight]'");
    const bool has_w = static_cast<bool>(ls >> w_tok);
    if (ls >> extra)
      fail("line " + std::to_string(line_no) + ": trailing token '" + extra + "'");
    if (weighted == -1) weighted = has_w ? 1 : 0;
    if (has_w != (weighted == 1))
      fail("line " + std::to_string(line_no) +
           ": mixed weighted and unweighted lines");

    EdgeRec rec;
    rec.src = intern(src_tok);
    rec.dst = intern(dst_tok);
    if (rec.src == rec.dst)
      fail("line " + std::to_string(line_no) + ": self-loop on '" + src_tok + "'");
    if (has_w) {
      std::size_t used = 0;
      try {
        rec.weight = std::stod(w_tok, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != w_tok.size())
        fail("line " + std::to_string(line_no) + ": bad weight '" + w_tok + "'");
      if (!(rec.weight >= 0.0 && rec.weight <= 1.0))
        fail("line " + std::to_string(line_no) + ": weight outside [0,1]");
    }

    const std::uint64_t key =
        (static_cast<std::uint64_t>(rec.src) << 32) | rec.dst;
    const auto dup = seen.find(key);
    if (dup == seen.end()) {
      seen.emplace(key, edges.size());
      edges.push_back(rec);
      continue;
    }
    switch (policy) {
      case DuplicatePolicy::kReject:
        fail("line " + std::to_string(line_no) + ": duplicate edge " + src_tok +
             " -> " + dst_tok);
      case DuplicatePolicy::kKeepFirst:
        break;
      case DuplicatePolicy::kSumThenClamp:
        if (weighted == 1) {
          EdgeRec& first = edges[dup->second];
          first.weight = std::min(1.0, first.weight + rec.weight);
        }
        break;
    }
  }
  const std::size_t n = labels.size();
  return Graph::from_edges(n, std::move(edges), std::move(labels));
}

Graph assign_weights(const Graph& g, WeightScheme scheme, double uniform_p) {
  std::vector<double> w(g.num_edge_slots(), 0.0);
  switch (scheme) {
    case WeightScheme::kWeightedCascade: {
      for (NodeId v = 0; v < g.num_nodes(); ++v) {
        const auto in = g.in_edges(v);
        for (EdgeId e : in) w[e] = 1.0 / static_cast<double>(in.size());
      }
      return g.reweighted(std::move(w));
    }
    case WeightScheme::kUniform: {
      if (!(uniform_p > 0.0 && uniform_p <= 1.0))
        throw std::invalid_argument("assign_weights: uniform p must be in (0,1]");
      for (NodeId v = 0; v < g.num_nodes(); ++v) {
        const auto in = g.in_edges(v);
        const double sum = uniform_p * static_cast<double>(in.size());
        const double each = sum > 1.0 ? uniform_p / sum : uniform_p;
        for (EdgeId e : in) w[e] = each;
      }
      return g.reweighted(std::move(w));
    }
    case WeightScheme::kExplicit: {
      if (!g.weighted())
        throw std::invalid_argument(
            "assign_weights: explicit scheme but the graph has no weights");
      return g;
    }
  }
  throw std::invalid_argument("assign_weights: unknown scheme");
}

SeedSet::SeedSet(const Graph& g, std::vector<NodeId> ids) : ids_(std::move(ids)) {
  if (ids_.empty()) throw std::invalid_argument("seed set is empty");
  std::sort(ids_.begin(), ids_.end());
  ids_.erase(std::unique(ids_.begin(), ids_.end()), ids_.end());
  mask_.assign(g.num_nodes(), 0);
  for (NodeId v : ids_) {
    if (v >= g.num_nodes())
      throw std::invalid_argument("seed node id out of range");
    if (g.node_removed(v))
      throw std::invalid_argument("seed node " + g.label(v) + " is removed");
    mask_[v] = 1;
  }
}

void AttackSet::normalize() {
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
}

void AttackSet::validate(const Graph& g, const SeedSet* seeds) const {
  for (NodeId v : nodes) {
    if (v >= g.num_nodes() || g.node_removed(v))
      throw std::invalid_argument("attack node not in graph");
    if (seeds && seeds->contains(v))
      throw std::invalid_argument("attack set touches seed node " + g.label(v));
  }
  for (EdgeId e : edges) {
    if (e >= g.num_edge_slots() || g.edge_removed(e))
      throw std::invalid_argument("attack edge not in graph");
  }
}

Graph remove_elements(const Graph& g, const AttackSet& a) {
  a.validate(g);
  std::vector<char> drop_node(g.num_nodes(), 0);
  std::vector<char> drop_edge(g.num_edge_slots(), 0);
  for (NodeId v : a.nodes) drop_node[v] = 1;
  for (EdgeId e : a.edges) drop_edge[e] = 1;
  return g.masked_copy(drop_node, drop_edge);
}

std::optional<std::vector<NodeId>> topological_order(const Graph& g) {
  const std::size_t n = g.num_nodes();
  std::vector<std::size_t> pending(n, 0);
  std::vector<NodeId> order;
  order.reserve(g.num_present_nodes());
  for (NodeId v = 0; v < n; ++v)
    if (!g.node_removed(v)) pending[v] = g.in_degree(v);
  for (NodeId v = 0; v < n; ++v)
    if (!g.node_removed(v) && pending[v] == 0) order.push_back(v);
  for (std::size_t head = 0; head < order.size(); ++head) {
    for (EdgeId e : g.out_edges(order[head])) {
      const NodeId w = g.edge(e).dst;
      if (--pending[w] == 0) order.push_back(w);
    }
  }
  if (order.size() != g.num_present_nodes()) return std::nullopt;
  return order;
}

}  // namespace advim
