#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "advim/attack.hpp"
#include "advim/forest.hpp"
#include "advim/graph.hpp"
#include "advim/lt.hpp"

namespace advim {

// Deterministic seed pickers. top_degree ranks by out-degree, ties to the
// lower id; random_seeds uses its own rng so the pick is independent of the
// master stream.
SeedSet top_degree_seeds(const Graph& g, std::size_t k);
SeedSet random_seeds(const Graph& g, std::size_t k, std::uint64_t seed);

// One label per whitespace-separated token; '#' starts a comment.
SeedSet load_seed_list(const Graph& g, std::istream& in);

// Sidecar attack-set format: "node <label>" and "edge <src> <dst>" lines.
void write_attack_file(std::ostream& os, const Graph& g, const AttackSet& a);
AttackSet parse_attack_file(const Graph& g, std::istream& in);

struct RunConfig {
  std::string dataset;
  std::vector<std::string> algorithms;  // aaimm-naive|aaimm-fb|aaimm-dag|aaff
  std::vector<std::size_t> qn_list{0};
  std::vector<std::size_t> qe_list{0};
  AccuracyParams acc;
  std::size_t eval_sims = 10000;
  std::uint64_t master_seed = 0;
  std::size_t theta = 10000;  // aaff forest count
  std::size_t memory_cap_bytes = std::size_t{1} << 31;
  std::string attack_out;  // sidecar path prefix; empty skips the files
};

struct ResultRow {
  std::string dataset;
  std::string algorithm;
  std::string sampler;
  std::size_t k = 0;
  std::size_t q_n = 0;
  std::size_t q_e = 0;
  double epsilon = 0;
  double ell = 0;
  double spread_before = 0;
  double spread_after = 0;
  double reduction = 0;
  double reduction_stderr = 0;
  double theta = 0;
  std::size_t paths_or_forests = 0;
  double wall_ms = 0;
  std::uint64_t master_seed = 0;
  // bench-only columns
  std::size_t attempts = 0;
  std::size_t forests = 0;
  double omega_work = 0;
  std::string status = "ok";
};

std::string csv_header(bool bench_columns);
std::string csv_line(const ResultRow& row, bool bench_columns);

// One algorithm over the full qn x qe grid. A (0,0) point records the empty
// attack. Each row is evaluated with fresh paired simulations on an rng
// derived from the master seed and the row's grid position, written, and
// flushed before the next point starts. Requires exactly one algorithm.
std::vector<ResultRow> run_attack_command(const Graph& g, const SeedSet& s,
                                          const RunConfig& cfg,
                                          std::ostream& csv);

// Two or more algorithms on one fixed budget point, one row each with the
// sampler stats columns. A forest-memory abort becomes a status=memory-cap
// row instead of ending the sweep.
std::vector<ResultRow> run_bench_command(const Graph& g, const SeedSet& s,
                                         const RunConfig& cfg,
                                         std::ostream& csv);

struct BruteForceResult {
  AttackSet best;
  double value = 0;
  std::size_t evaluated = 0;
};

// Exhaustive optimum by exact_reduction over every attack set that uses the
// full clamped budgets (the objective is monotone, so nothing smaller can
// win). Only viable on small graphs; the enumeration cap guards the rest.
BruteForceResult brute_force_opt(const Graph& g, const SeedSet& s,
                                 const Budgets& b,
                                 std::uint64_t cap = kDefaultEnumCap);

}  // namespace advim
