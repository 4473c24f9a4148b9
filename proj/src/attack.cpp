#include "advim/attack.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <optional>
#include <queue>

namespace advim {

double log_choose(std::uint64_t n, std::uint64_t k) {
  if (k > n) throw std::invalid_argument("log_choose: k > n");
  return std::lgamma(static_cast<double>(n) + 1.0) -
         std::lgamma(static_cast<double>(k) + 1.0) -
         std::lgamma(static_cast<double>(n - k) + 1.0);
}

double lambda_prime(std::size_t n_minus, std::size_t m, std::size_t q_n,
                    std::size_t q_e, double eps_prime, double ell) {
  if (n_minus < 2)
    throw std::invalid_argument("lambda_prime: needs at least 2 non-seed nodes");
  if (q_n > n_minus || q_e > m)
    throw std::invalid_argument("lambda_prime: budget exceeds element count");
  if (!(eps_prime > 0) || !(ell > 0))
    throw std::invalid_argument("lambda_prime: eps_prime and ell must be > 0");
  const double nm = static_cast<double>(n_minus);
  const double ln_solutions = log_choose(n_minus, q_n) + log_choose(m, q_e);
  return (2.0 + (2.0 / 3.0) * eps_prime) *
         (ln_solutions + ell * std::log(nm) + std::log(std::log2(nm))) * nm /
         (eps_prime * eps_prime);
}

double lambda_star(std::size_t n, std::size_t n_minus, std::size_t m,
                   std::size_t q_n, std::size_t q_e, double eps, double ell) {
  if (n == 0 || n_minus == 0)
    throw std::invalid_argument("lambda_star: empty node set");
  if (q_n > n_minus || q_e > m)
    throw std::invalid_argument("lambda_star: budget exceeds element count");
  if (!(eps > 0 && eps < 1) || !(ell > 0))
    throw std::invalid_argument("lambda_star: need 0 < eps < 1 and ell > 0");
  const double alpha = std::sqrt(ell * std::log(static_cast<double>(n)) +
                                 std::log(2.0));
  const double beta = std::sqrt(
      0.5 * (log_choose(n_minus, q_n) + log_choose(m, q_e) + alpha * alpha));
  const double s = 0.5 * alpha + beta;
  return 2.0 * static_cast<double>(n) * s * s / (eps * eps);
}

PathCollection::PathCollection(const Graph& g, const SeedSet& s)
    : g_(g),
      s_(s),
      node_paths_(g.num_nodes()),
      edge_paths_(g.num_edge_slots()) {}

void PathCollection::add(const RRPath& p) {
  if (!p.valid)
    throw std::invalid_argument("PathCollection: only valid paths are stored");
  const auto pid = static_cast<std::uint32_t>(n_paths_++);
  for (NodeId v : p.nodes)
    if (!s_.contains(v)) node_paths_[v].push_back(pid);
  for (EdgeId e : p.edges) edge_paths_[e].push_back(pid);
}

void PathCollection::note_attempts(std::size_t k) { attempts_ += k; }

double PathCollection::coverage_fraction(const AttackSet& a) const {
  if (n_paths_ == 0) return 0;
  std::vector<char> covered(n_paths_, 0);
  std::size_t count = 0;
  auto mark = [&](const std::vector<std::uint32_t>& pids) {
    for (std::uint32_t pid : pids)
      if (!covered[pid]) {
        covered[pid] = 1;
        ++count;
      }
  };
  for (NodeId v : a.nodes) mark(node_paths_[v]);
  for (EdgeId e : a.edges) mark(edge_paths_[e]);
  return static_cast<double>(count) / static_cast<double>(n_paths_);
}

namespace {

struct Cand {
  std::size_t gain;
  bool is_node;
  NodeId a, b;  // node: (id, 0); edge: (src, dst)
  std::uint32_t elem;
  std::uint32_t stamp;
};

// priority_queue keeps the max; "less" means lower priority.
struct CandLess {
  bool operator()(const Cand& x, const Cand& y) const {
    if (x.gain != y.gain) return x.gain < y.gain;
    if (x.is_node != y.is_node) return !x.is_node;
    if (x.a != y.a) return x.a > y.a;
    return x.b > y.b;
  }
};

}  // namespace

SelectionResult node_edge_selection(const PathCollection& r, const Graph& g,
                                    const Budgets& b) {
  SelectionResult out;
  if (r.size() == 0) return out;

  std::vector<char> covered(r.size(), 0);
  std::size_t covered_count = 0;
  std::priority_queue<Cand, std::vector<Cand>, CandLess> heap;
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    const auto& pids = r.node_paths()[v];
    if (!pids.empty())
      heap.push({pids.size(), true, v, 0, v, 0});
  }
  for (EdgeId e = 0; e < g.num_edge_slots(); ++e) {
    const auto& pids = r.edge_paths()[e];
    if (!pids.empty())
      heap.push({pids.size(), false, g.edge(e).src, g.edge(e).dst, e, 0});
  }

  std::size_t left_nodes = b.max_nodes, left_edges = b.max_edges;
  std::uint32_t round = 0;
  auto uncovered_in = [&](const std::vector<std::uint32_t>& pids) {
    std::size_t n = 0;
    for (std::uint32_t pid : pids) n += !covered[pid];
    return n;
  };
  while ((left_nodes > 0 || left_edges > 0) && !heap.empty()) {
    Cand c = heap.top();
    heap.pop();
    if (c.is_node ? left_nodes == 0 : left_edges == 0) continue;
    const auto& pids =
        c.is_node ? r.node_paths()[c.elem] : r.edge_paths()[c.elem];
    if (c.stamp != round) {
      c.gain = uncovered_in(pids);
      if (c.gain == 0) continue;
      c.stamp = round;
      heap.push(c);
      continue;
    }
    if (c.gain == 0) continue;
    for (std::uint32_t pid : pids)
      if (!covered[pid]) {
        covered[pid] = 1;
        ++covered_count;
      }
    if (c.is_node) {
      out.attack.nodes.push_back(c.elem);
      --left_nodes;
    } else {
      out.attack.edges.push_back(static_cast<EdgeId>(c.elem));
      --left_edges;
    }
    ++round;
  }
  out.attack.normalize();
  out.coverage = static_cast<double>(covered_count) /
                 static_cast<double>(r.size());
  return out;
}

const char* sampler_name(SamplerKind k) {
  switch (k) {
    case SamplerKind::kNaive:
      return "naive";
    case SamplerKind::kForwardBackward:
      return "fb";
    case SamplerKind::kDag:
      return "dag";
  }
  return "?";
}

namespace {

std::string fmt_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

// True iff some non-seed node is reachable from the seeds along edges of
// positive weight, i.e. the expected non-seed spread is positive.
bool seeds_reach_non_seed(const Graph& g, const SeedSet& s) {
  std::vector<char> seen(g.num_nodes(), 0);
  std::vector<NodeId> queue(s.ids().begin(), s.ids().end());
  for (NodeId v : queue) seen[v] = 1;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    for (EdgeId e : g.out_edges(queue[head])) {
      if (g.edge(e).weight <= 0) continue;
      const NodeId v = g.edge(e).dst;
      if (seen[v]) continue;
      if (!s.contains(v)) return true;
      seen[v] = 1;
      queue.push_back(v);
    }
  }
  return false;
}

}  // namespace

std::string RunReport::to_kv() const {
  std::string out;
  auto put = [&](const char* k, const std::string& v) {
    out += k;
    out += '=';
    out += v;
    out += '\n';
  };
  put("algorithm", algorithm);
  put("sampler", sampler);
  put("theta", fmt_double(theta));
  put("samples", std::to_string(samples));
  put("lower_bound", fmt_double(lower_bound));
  put("epsilon", fmt_double(epsilon));
  put("ell_input", fmt_double(ell_input));
  put("ell_adjusted", fmt_double(ell_adjusted));
  put("coverage", fmt_double(coverage));
  put("est_reduction", fmt_double(est_reduction));
  put("sigma_minus_est", fmt_double(sigma_minus_est));
  put("theta_guarantee", fmt_double(theta_guarantee));
  put("forest_bytes", std::to_string(forest_bytes));
  put("rr_attempts", std::to_string(stats.rr_attempts));
  put("forests", std::to_string(stats.forests));
  put("omega_work", fmt_double(stats.omega_work));
  put("dag_extracted", dag_extracted ? "1" : "0");
  put("budgets_clamped", budgets_clamped ? "1" : "0");
  put("wall_ms", fmt_double(wall_ms));
  return out;
}

AttackOutcome aaimm_attack(const Graph& g, const SeedSet& s, const Budgets& b,
                           const AccuracyParams& acc, SamplerKind sampler,
                           Rng& rng, const AaimmOptions& opt) {
  const auto t0 = std::chrono::steady_clock::now();
  if (!(acc.epsilon > 0 && acc.epsilon < 1))
    throw std::invalid_argument("aaimm_attack: epsilon must be in (0,1)");
  if (!(acc.ell > 0))
    throw std::invalid_argument("aaimm_attack: ell must be > 0");
  if (b.max_nodes + b.max_edges == 0)
    throw std::invalid_argument("aaimm_attack: both budgets are zero");

  // Working graph: the dag sampler needs an acyclic input.
  const Graph* work = &g;
  Graph extracted;
  bool dag_extracted = false;
  if (sampler == SamplerKind::kDag && !topological_order(g)) {
    extracted = extract_dag(g, s);
    work = &extracted;
    dag_extracted = true;
  }

  std::optional<DagModel> model;
  std::optional<RrSampler> rr;
  if (sampler == SamplerKind::kDag) {
    model.emplace(*work, s);  // rejects sigma_minus == 0
  } else {
    if (!seeds_reach_non_seed(*work, s))
      throw std::invalid_argument(
          "aaimm_attack: seed set cannot reach any non-seed node");
    rr.emplace(*work, s);
    rr->max_attempts = opt.max_attempts;
  }

  const std::size_t nm = non_seed_count(*work, s);
  const std::size_t m = work->num_edges();
  if (nm == 0)
    throw std::invalid_argument("aaimm_attack: every node is a seed");
  Budgets eff{std::min(b.max_nodes, nm), std::min(b.max_edges, m)};
  const bool clamped =
      eff.max_nodes != b.max_nodes || eff.max_edges != b.max_edges;
  if (eff.max_nodes + eff.max_edges == 0)
    throw std::invalid_argument(
        "aaimm_attack: budgets clamp to zero on this graph");

  const double eps = acc.epsilon;
  const double eps_prime = std::sqrt(2.0) * eps;
  const double nmd = static_cast<double>(nm);

  // Tail correction: bump ell so that theta rounding keeps the stated
  // failure probability, then use the bumped value throughout.
  double ell_adj = acc.ell;
  if (nm >= 2) {
    const double star0 = lambda_star(work->num_present_nodes(), nm, m,
                                     eff.max_nodes, eff.max_edges, eps, acc.ell);
    const double gamma = std::log(std::ceil(star0)) / std::log(nmd);
    ell_adj = acc.ell + gamma + std::log(2.0) / std::log(nmd);
  }
  const double star = lambda_star(work->num_present_nodes(), nm, m,
                                  eff.max_nodes, eff.max_edges, eps, ell_adj);

  PathCollection paths(*work, s);
  SamplerStats dag_stats;
  auto draw = [&]() {
    if (sampler == SamplerKind::kDag)
      paths.add(dag_vrr(*model, rng, &dag_stats));
    else if (sampler == SamplerKind::kNaive)
      paths.add(rr->sample_valid(rng));
    else
      paths.add(rr->sample_forward_backward(rng));
  };

  double lb = 1.0;
  if (nm >= 2) {
    const double prime = lambda_prime(nm, m, eff.max_nodes, eff.max_edges,
                                      eps_prime, ell_adj);
    const int imax = static_cast<int>(std::floor(std::log2(nmd)));
    for (int i = 1; i <= imax; ++i) {
      const double x = nmd / std::exp2(i);
      const double theta_i = prime / x;
      while (static_cast<double>(paths.size()) < theta_i) draw();
      const SelectionResult sel = node_edge_selection(paths, *work, eff);
      if (nmd * sel.coverage >= (1.0 + eps_prime) * x) {
        lb = nmd * sel.coverage / (1.0 + eps_prime);
        break;
      }
    }
  }

  const double theta = star / lb;
  while (static_cast<double>(paths.size()) <= theta) draw();
  const SelectionResult sel = node_edge_selection(paths, *work, eff);

  AttackOutcome out;
  out.attack = sel.attack;
  RunReport& rep = out.report;
  rep.algorithm = "aaimm";
  rep.sampler = sampler_name(sampler);
  rep.theta = theta;
  rep.samples = paths.size();
  rep.lower_bound = lb;
  rep.epsilon = eps;
  rep.ell_input = acc.ell;
  rep.ell_adjusted = ell_adj;
  rep.coverage = sel.coverage;
  rep.dag_extracted = dag_extracted;
  rep.budgets_clamped = clamped;
  rep.stats = sampler == SamplerKind::kDag ? dag_stats : rr->stats();
  paths.note_attempts(rep.stats.rr_attempts);

  if (sampler == SamplerKind::kDag) {
    rep.sigma_minus_est = model->sigma_minus();
  } else if (sampler == SamplerKind::kNaive) {
    rep.sigma_minus_est = nmd * static_cast<double>(paths.size()) /
                          static_cast<double>(rep.stats.rr_attempts);
  } else {
    rep.sigma_minus_est =
        rep.stats.activated_sum / static_cast<double>(rep.stats.forests);
  }
  rep.est_reduction = rep.sigma_minus_est * sel.coverage;

  const auto t1 = std::chrono::steady_clock::now();
  rep.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
  rep.stats.wall_ms = rep.wall_ms;
  return out;
}

}  // namespace advim
