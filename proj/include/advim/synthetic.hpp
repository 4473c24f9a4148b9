#pragma once

#include <cstdint>
#include <iosfwd>

#include "advim/graph.hpp"

namespace advim {

enum class SynthKind { kRandomDag, kPowerLaw, kGrid };

// Size request for one synthetic graph. random-dag and power-law use nodes
// and edges; grid uses rows and cols (its edge count is implied).
struct SynthSpec {
  SynthKind kind = SynthKind::kRandomDag;
  std::size_t nodes = 0;
  std::size_t edges = 0;
  std::size_t rows = 0;
  std::size_t cols = 0;
};

// Deterministic in (spec, seed). random-dag draws distinct pairs i < j so
// every edge runs from lower to higher id; power-law draws endpoints with
// popularity ~ 1/rank and keeps distinct non-loop pairs; grid wires each
// cell to its right and down neighbors. Edges come out sorted by (src, dst)
// and weights are left unset. Throws on infeasible node/edge combinations.
Graph generate_synthetic(const SynthSpec& spec, std::uint64_t seed);

// "src dst" or "src dst weight" lines using node labels, one edge per line
// in edge-id order.
void write_edge_list(std::ostream& os, const Graph& g);

}  // namespace advim
