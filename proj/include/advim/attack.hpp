#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "advim/graph.hpp"
#include "advim/vrr.hpp"

namespace advim {

// Estimation accuracy knobs. epsilon is the relative error target in (0,1);
// ell scales the failure probability (1/n^ell).
struct AccuracyParams {
  double epsilon = 0.1;
  double ell = 1.0;
};

// ln C(n, k) via lgamma.
double log_choose(std::uint64_t n, std::uint64_t k);

// Per-path sample requirement for the doubling phase, scaled by the solution
// space size C(n_minus, q_n) * C(m, q_e). Requires n_minus >= 2.
double lambda_prime(std::size_t n_minus, std::size_t m, std::size_t q_n,
                    std::size_t q_e, double eps_prime, double ell);

// Final sample requirement; divided by the lower bound to give theta.
double lambda_star(std::size_t n, std::size_t n_minus, std::size_t m,
                   std::size_t q_n, std::size_t q_e, double eps, double ell);

// Multiset of valid reverse paths with an element -> paths inverted index.
// Elements are the non-seed nodes and all edges appearing on a path; a path
// is covered by an attack set when they share at least one element.
class PathCollection {
 public:
  PathCollection(const Graph& g, const SeedSet& s);

  void add(const RRPath& p);          // p.valid must hold
  void note_attempts(std::size_t k);  // raw walks behind the stored paths

  std::size_t size() const { return n_paths_; }
  std::size_t attempts() const { return attempts_; }

  // Fraction of stored paths covered by `a`.
  double coverage_fraction(const AttackSet& a) const;

  const std::vector<std::vector<std::uint32_t>>& node_paths() const {
    return node_paths_;
  }
  const std::vector<std::vector<std::uint32_t>>& edge_paths() const {
    return edge_paths_;
  }

 private:
  const Graph& g_;
  const SeedSet& s_;
  std::vector<std::vector<std::uint32_t>> node_paths_;
  std::vector<std::vector<std::uint32_t>> edge_paths_;
  std::size_t n_paths_ = 0;
  std::size_t attempts_ = 0;
};

struct SelectionResult {
  AttackSet attack;
  double coverage = 0;  // covered fraction of the collection
};

// Lazy greedy maximum coverage under separate node and edge budgets.
// Produces exactly the plain-greedy solution under the tie rule: higher gain
// first, then nodes before edges, then lower node id / lower (src,dst).
// Elements with zero marginal gain are never taken.
SelectionResult node_edge_selection(const PathCollection& r, const Graph& g,
                                    const Budgets& b);

enum class SamplerKind { kNaive, kForwardBackward, kDag };

const char* sampler_name(SamplerKind k);

struct RunReport {
  std::string algorithm;
  std::string sampler;
  double theta = 0;            // final sample target
  std::size_t samples = 0;     // stored paths (or forests)
  double lower_bound = 1.0;
  double epsilon = 0;
  double ell_input = 0;
  double ell_adjusted = 0;
  double coverage = 0;
  double est_reduction = 0;    // sigma_minus_est * coverage
  double sigma_minus_est = 0;
  double theta_guarantee = 0;     // forest-greedy only; see forest.hpp
  std::size_t forest_bytes = 0;   // forest-greedy only; resident forest size
  double wall_ms = 0;
  bool dag_extracted = false;
  bool budgets_clamped = false;
  SamplerStats stats;

  std::string to_kv() const;  // one "key=value" per line
};

struct AttackOutcome {
  AttackSet attack;
  RunReport report;
};

struct AaimmOptions {
  std::size_t max_attempts = 1'000'000;  // per-path rejection cap
};

// Samples reverse paths until the two-phase schedule is satisfied, then runs
// the greedy selection over the final collection. For the kDag sampler a
// non-acyclic input is first reduced with extract_dag (reported via
// dag_extracted); ids are stable, so the result is valid for the original
// graph. Budgets above n_minus / m are clamped and flagged.
AttackOutcome aaimm_attack(const Graph& g, const SeedSet& s, const Budgets& b,
                           const AccuracyParams& acc, SamplerKind sampler,
                           Rng& rng, const AaimmOptions& opt = {});

}  // namespace advim
