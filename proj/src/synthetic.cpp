#include "advim/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <unordered_set>
#include <vector>

#include "advim/rng.hpp"

namespace advim {

namespace {

Graph from_sorted(std::size_t n, std::vector<EdgeRec> edges) {
  std::sort(edges.begin(), edges.end(), [](const EdgeRec& a, const EdgeRec& b) {
    return a.src != b.src ? a.src < b.src : a.dst < b.dst;
  });
  return Graph::from_edges(n, std::move(edges));
}

Graph random_dag(std::size_t n, std::size_t m, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("random-dag: nodes must be >= 1");
  const std::uint64_t max_edges =
      static_cast<std::uint64_t>(n) * (n - 1) / 2;
  if (m > max_edges)
    throw std::invalid_argument(
        "random-dag: " + std::to_string(m) + " edges infeasible for " +
        std::to_string(n) + " nodes (max " + std::to_string(max_edges) + ")");
  Rng rng(seed);
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(m * 2);
  std::vector<EdgeRec> edges;
  edges.reserve(m);
  while (edges.size() < m) {
    const auto a = static_cast<std::uint64_t>(rng.next_below(n));
    const auto b = static_cast<std::uint64_t>(rng.next_below(n));
    if (a == b) continue;
    const std::uint64_t lo = std::min(a, b);
    const std::uint64_t hi = std::max(a, b);
    if (!seen.insert(lo * n + hi).second) continue;
    edges.push_back({static_cast<NodeId>(lo), static_cast<NodeId>(hi),
                     kUnsetWeight});
  }
  return from_sorted(n, std::move(edges));
}

Graph power_law(std::size_t n, std::size_t m, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("power-law: nodes must be >= 1");
  const std::uint64_t max_edges = static_cast<std::uint64_t>(n) * (n - 1);
  if (m > max_edges)
    throw std::invalid_argument(
        "power-law: " + std::to_string(m) + " edges infeasible for " +
        std::to_string(n) + " nodes (max " + std::to_string(max_edges) + ")");
  // Endpoint popularity falls off as 1/rank, giving a heavy-tailed degree
  // profile without any preferential-attachment bookkeeping.
  std::vector<double> cum(n);
  double total = 0;
  for (std::size_t i = 0; i < n; ++i) {
    total += 1.0 / static_cast<double>(i + 1);
    cum[i] = total;
  }
  Rng rng(seed);
  auto draw = [&]() -> std::uint64_t {
    const double u = rng.next_unit() * total;
    return static_cast<std::uint64_t>(
        std::upper_bound(cum.begin(), cum.end(), u) - cum.begin());
  };
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(m * 2);
  std::vector<EdgeRec> edges;
  edges.reserve(m);
  std::size_t attempts = 0;
  const std::size_t attempt_cap = 200 * m + 10000;
  while (edges.size() < m) {
    if (++attempts > attempt_cap)
      throw std::runtime_error(
          "power-law: edge draws keep colliding; request fewer edges");
    std::uint64_t a = draw();
    std::uint64_t b = draw();
    if (a >= n) a = n - 1;
    if (b >= n) b = n - 1;
    if (a == b) continue;
    if (!seen.insert(a * n + b).second) continue;
    edges.push_back(
        {static_cast<NodeId>(a), static_cast<NodeId>(b), kUnsetWeight});
  }
  return from_sorted(n, std::move(edges));
}

Graph grid(std::size_t rows, std::size_t cols) {
  if (rows < 1 || cols < 1)
    throw std::invalid_argument("grid: rows and cols must be >= 1");
  const std::size_t n = rows * cols;
  std::vector<EdgeRec> edges;
  edges.reserve(2 * n);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const auto id = static_cast<NodeId>(r * cols + c);
      if (c + 1 < cols) edges.push_back({id, id + 1, kUnsetWeight});
      if (r + 1 < rows)
        edges.push_back({id, static_cast<NodeId>(id + cols), kUnsetWeight});
    }
  }
  return from_sorted(n, std::move(edges));
}

}  // namespace

Graph generate_synthetic(const SynthSpec& spec, std::uint64_t seed) {
  switch (spec.kind) {
    case SynthKind::kRandomDag:
      return random_dag(spec.nodes, spec.edges, seed);
    case SynthKind::kPowerLaw:
      return power_law(spec.nodes, spec.edges, seed);
    case SynthKind::kGrid:
      return grid(spec.rows, spec.cols);
  }
  throw std::invalid_argument("generate_synthetic: unknown kind");
}

void write_edge_list(std::ostream& os, const Graph& g) {
  char buf[32];
  for (EdgeId e = 0; e < g.num_edge_slots(); ++e) {
    if (g.edge_removed(e)) continue;
    const EdgeRec& rec = g.edge(e);
    os << g.label(rec.src) << ' ' << g.label(rec.dst);
    if (g.weighted()) {
      std::snprintf(buf, sizeof buf, "%.17g", rec.weight);
      os << ' ' << buf;
    }
    os << '\n';
  }
}

}  // namespace advim
