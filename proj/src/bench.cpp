#include "advim/bench.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "advim/rng.hpp"

namespace advim {

namespace {

std::string fmt_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

struct AlgoSpec {
  bool forest = false;
  SamplerKind sampler = SamplerKind::kNaive;
};

AlgoSpec parse_algorithm(const std::string& name) {
  if (name == "aaimm-naive") return {false, SamplerKind::kNaive};
  if (name == "aaimm-fb") return {false, SamplerKind::kForwardBackward};
  if (name == "aaimm-dag") return {false, SamplerKind::kDag};
  if (name == "aaff") return {true, SamplerKind::kNaive};
  throw std::invalid_argument(
      "unknown algorithm '" + name +
      "' (expected aaimm-naive, aaimm-fb, aaimm-dag or aaff)");
}

const char* default_sampler_label(const AlgoSpec& spec) {
  return spec.forest ? "forest" : sampler_name(spec.sampler);
}

AttackOutcome run_one(const Graph& g, const SeedSet& s, const AlgoSpec& spec,
                      const Budgets& b, const RunConfig& cfg, Rng& rng) {
  if (spec.forest)
    return aaff_attack(g, s, b, cfg.acc, rng,
                       AaffOptions{cfg.theta, cfg.memory_cap_bytes});
  return aaimm_attack(g, s, b, cfg.acc, spec.sampler, rng);
}

std::vector<std::string> tokens_of(const std::string& line) {
  const std::size_t hash = line.find('#');
  std::istringstream is(hash == std::string::npos ? line
                                                  : line.substr(0, hash));
  std::vector<std::string> toks;
  std::string t;
  while (is >> t) toks.push_back(t);
  return toks;
}

// Lexicographic k-subsets of {0..n-1}; fn sees the index vector.
template <class F>
void for_each_combo(std::size_t n, std::size_t k, F&& fn) {
  if (k > n) return;
  std::vector<std::size_t> idx(k);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (;;) {
    fn(idx);
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == n - k + i - 1) --i;
    if (i == 0) return;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

}  // namespace

SeedSet top_degree_seeds(const Graph& g, std::size_t k) {
  std::vector<NodeId> present;
  for (NodeId v = 0; v < g.num_nodes(); ++v)
    if (!g.node_removed(v)) present.push_back(v);
  if (k == 0 || k > present.size())
    throw std::invalid_argument("top_degree_seeds: k out of range");
  std::sort(present.begin(), present.end(), [&](NodeId a, NodeId b) {
    const std::size_t da = g.out_degree(a);
    const std::size_t db = g.out_degree(b);
    return da != db ? da > db : a < b;
  });
  present.resize(k);
  return SeedSet(g, std::move(present));
}

SeedSet random_seeds(const Graph& g, std::size_t k, std::uint64_t seed) {
  std::vector<NodeId> present;
  for (NodeId v = 0; v < g.num_nodes(); ++v)
    if (!g.node_removed(v)) present.push_back(v);
  if (k == 0 || k > present.size())
    throw std::invalid_argument("random_seeds: k out of range");
  Rng rng(seed);
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j =
        i + static_cast<std::size_t>(rng.next_below(present.size() - i));
    std::swap(present[i], present[j]);
  }
  present.resize(k);
  return SeedSet(g, std::move(present));
}

SeedSet load_seed_list(const Graph& g, std::istream& in) {
  std::vector<NodeId> ids;
  std::string line;
  while (std::getline(in, line))
    for (const std::string& tok : tokens_of(line)) ids.push_back(g.id_of(tok));
  return SeedSet(g, std::move(ids));
}

void write_attack_file(std::ostream& os, const Graph& g, const AttackSet& a) {
  for (NodeId v : a.nodes) os << "node " << g.label(v) << '\n';
  for (EdgeId e : a.edges) {
    const EdgeRec& rec = g.edge(e);
    os << "edge " << g.label(rec.src) << ' ' << g.label(rec.dst) << '\n';
  }
}

AttackSet parse_attack_file(const Graph& g, std::istream& in) {
  AttackSet a;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::vector<std::string> toks = tokens_of(line);
    if (toks.empty()) continue;
    if (toks[0] == "node" && toks.size() == 2) {
      a.nodes.push_back(g.id_of(toks[1]));
    } else if (toks[0] == "edge" && toks.size() == 3) {
      const EdgeId e = g.find_edge(g.id_of(toks[1]), g.id_of(toks[2]));
      if (e == kNoEdge)
        throw std::invalid_argument("attack file line " +
                                    std::to_string(lineno) +
                                    ": no such edge " + toks[1] + " -> " +
                                    toks[2]);
      a.edges.push_back(e);
    } else {
      throw std::invalid_argument(
          "attack file line " + std::to_string(lineno) +
          ": expected 'node <label>' or 'edge <src> <dst>'");
    }
  }
  a.normalize();
  return a;
}

std::string csv_header(bool bench_columns) {
  std::string h =
      "dataset,algorithm,sampler,k,q_n,q_e,epsilon,ell,spread_before,"
      "spread_after,reduction,reduction_stderr,theta,paths_or_forests,"
      "wall_ms,master_seed";
  if (bench_columns) h += ",attempts,forests,omega_work,status";
  return h;
}

std::string csv_line(const ResultRow& row, bool bench_columns) {
  std::string out;
  out += row.dataset;
  out += ',';
  out += row.algorithm;
  out += ',';
  out += row.sampler;
  out += ',' + std::to_string(row.k);
  out += ',' + std::to_string(row.q_n);
  out += ',' + std::to_string(row.q_e);
  out += ',' + fmt_double(row.epsilon);
  out += ',' + fmt_double(row.ell);
  out += ',' + fmt_double(row.spread_before);
  out += ',' + fmt_double(row.spread_after);
  out += ',' + fmt_double(row.reduction);
  out += ',' + fmt_double(row.reduction_stderr);
  out += ',' + fmt_double(row.theta);
  out += ',' + std::to_string(row.paths_or_forests);
  out += ',' + fmt_double(row.wall_ms);
  out += ',' + std::to_string(row.master_seed);
  if (bench_columns) {
    out += ',' + std::to_string(row.attempts);
    out += ',' + std::to_string(row.forests);
    out += ',' + fmt_double(row.omega_work);
    out += ',' + row.status;
  }
  return out;
}

namespace {

ResultRow base_row(const RunConfig& cfg, const std::string& algorithm,
                   const SeedSet& s, std::size_t qn, std::size_t qe) {
  ResultRow row;
  row.dataset = cfg.dataset;
  row.algorithm = algorithm;
  row.k = s.size();
  row.q_n = qn;
  row.q_e = qe;
  row.epsilon = cfg.acc.epsilon;
  row.ell = cfg.acc.ell;
  row.master_seed = cfg.master_seed;
  return row;
}

void fill_run(ResultRow& row, const AttackOutcome& out,
              const ReductionEstimate& est) {
  row.sampler = out.report.sampler;
  row.spread_before = est.before_mean;
  row.spread_after = est.after_mean;
  row.reduction = est.mean;
  row.reduction_stderr = est.std_error;
  row.theta = out.report.theta;
  row.paths_or_forests = out.report.samples;
  row.wall_ms = out.report.wall_ms;
  row.attempts = out.report.stats.rr_attempts;
  row.forests = out.report.stats.forests;
  row.omega_work = out.report.stats.omega_work;
}

void write_sidecar(const RunConfig& cfg, const Graph& g, const AttackSet& a,
                   std::size_t qn, std::size_t qe) {
  if (cfg.attack_out.empty()) return;
  const std::string path = cfg.attack_out + "-qn" + std::to_string(qn) +
                           "-qe" + std::to_string(qe) + ".txt";
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write attack file " + path);
  write_attack_file(os, g, a);
}

}  // namespace

std::vector<ResultRow> run_attack_command(const Graph& g, const SeedSet& s,
                                          const RunConfig& cfg,
                                          std::ostream& csv) {
  if (cfg.algorithms.size() != 1)
    throw std::invalid_argument("attack command takes exactly one algorithm");
  if (cfg.qn_list.empty() || cfg.qe_list.empty())
    throw std::invalid_argument("budget sweep lists must be non-empty");
  if (cfg.eval_sims == 0)
    throw std::invalid_argument("eval_sims must be >= 1");
  const AlgoSpec spec = parse_algorithm(cfg.algorithms[0]);
  csv << csv_header(false) << '\n';
  csv.flush();
  std::vector<ResultRow> rows;
  std::size_t row_idx = 0;
  for (const std::size_t qn : cfg.qn_list) {
    for (const std::size_t qe : cfg.qe_list) {
      Rng opt_rng(derive_seed(cfg.master_seed, row_idx, 0));
      Rng eval_rng(derive_seed(cfg.master_seed, row_idx, 1));
      AttackOutcome out;
      if (qn + qe > 0)
        out = run_one(g, s, spec, Budgets{qn, qe}, cfg, opt_rng);
      else
        out.report.sampler = default_sampler_label(spec);
      const ReductionEstimate est =
          estimate_reduction(g, s, out.attack, cfg.eval_sims, true, eval_rng);
      ResultRow row = base_row(cfg, cfg.algorithms[0], s, qn, qe);
      fill_run(row, out, est);
      csv << csv_line(row, false) << '\n';
      csv.flush();
      write_sidecar(cfg, g, out.attack, qn, qe);
      rows.push_back(std::move(row));
      ++row_idx;
    }
  }
  return rows;
}

std::vector<ResultRow> run_bench_command(const Graph& g, const SeedSet& s,
                                         const RunConfig& cfg,
                                         std::ostream& csv) {
  if (cfg.algorithms.size() < 2)
    throw std::invalid_argument("bench command needs at least two algorithms");
  if (cfg.qn_list.size() != 1 || cfg.qe_list.size() != 1)
    throw std::invalid_argument("bench command runs one budget point");
  if (cfg.eval_sims == 0)
    throw std::invalid_argument("eval_sims must be >= 1");
  const std::size_t qn = cfg.qn_list[0];
  const std::size_t qe = cfg.qe_list[0];
  if (qn + qe == 0)
    throw std::invalid_argument("bench command needs a non-zero budget");
  csv << csv_header(true) << '\n';
  csv.flush();
  std::vector<ResultRow> rows;
  for (std::size_t i = 0; i < cfg.algorithms.size(); ++i) {
    const AlgoSpec spec = parse_algorithm(cfg.algorithms[i]);
    Rng opt_rng(derive_seed(cfg.master_seed, i, 0));
    Rng eval_rng(derive_seed(cfg.master_seed, i, 1));
    ResultRow row = base_row(cfg, cfg.algorithms[i], s, qn, qe);
    row.sampler = default_sampler_label(spec);
    try {
      const AttackOutcome out =
          run_one(g, s, spec, Budgets{qn, qe}, cfg, opt_rng);
      const ReductionEstimate est =
          estimate_reduction(g, s, out.attack, cfg.eval_sims, true, eval_rng);
      fill_run(row, out, est);
    } catch (const MemoryCapExceeded&) {
      row.status = "memory-cap";
    }
    csv << csv_line(row, true) << '\n';
    csv.flush();
    rows.push_back(std::move(row));
  }
  return rows;
}

BruteForceResult brute_force_opt(const Graph& g, const SeedSet& s,
                                 const Budgets& b, std::uint64_t cap) {
  std::vector<NodeId> cand_nodes;
  for (NodeId v = 0; v < g.num_nodes(); ++v)
    if (!g.node_removed(v) && !s.contains(v)) cand_nodes.push_back(v);
  std::vector<EdgeId> cand_edges;
  for (EdgeId e = 0; e < g.num_edge_slots(); ++e)
    if (!g.edge_removed(e)) cand_edges.push_back(e);
  const std::size_t qn = std::min(b.max_nodes, cand_nodes.size());
  const std::size_t qe = std::min(b.max_edges, cand_edges.size());

  BruteForceResult best;
  best.value = -std::numeric_limits<double>::infinity();
  for_each_combo(cand_nodes.size(), qn, [&](const std::vector<std::size_t>& ni) {
    AttackSet base;
    for (const std::size_t i : ni) base.nodes.push_back(cand_nodes[i]);
    for_each_combo(cand_edges.size(), qe,
                   [&](const std::vector<std::size_t>& ei) {
                     AttackSet a = base;
                     for (const std::size_t i : ei)
                       a.edges.push_back(cand_edges[i]);
                     if (a.empty()) return;
                     const double v = exact_reduction(g, s, a, cap);
                     ++best.evaluated;
                     if (v > best.value) {
                       best.value = v;
                       best.best = std::move(a);
                     }
                   });
  });
  if (best.evaluated == 0) best.value = 0;
  return best;
}

}  // namespace advim
