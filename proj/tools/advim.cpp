#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "advim/bench.hpp"
#include "advim/synthetic.hpp"

namespace {

using namespace advim;

struct GraphOpts {
  std::string path;
  std::string weights = "wc";  // wc | uniform | explicit
  double uniform_p = 0.1;
  std::string duplicates = "reject";  // reject | keep-first | sum-clamp
};

struct SeedOpts {
  std::string file;
  std::size_t top_degree = 0;
  std::size_t random_k = 0;
  std::uint64_t pick_seed = 1;
};

void add_graph_options(CLI::App* cmd, GraphOpts& o) {
  cmd->add_option("--graph", o.path, "edge-list file")->required();
  cmd->add_option("--weights", o.weights,
                  "weight scheme: wc (1/indegree), uniform, explicit")
      ->check(CLI::IsMember({"wc", "uniform", "explicit"}));
  cmd->add_option("--uniform-p", o.uniform_p,
                  "edge weight for --weights uniform");
  cmd->add_option("--duplicates", o.duplicates,
                  "duplicate edge policy: reject, keep-first, sum-clamp")
      ->check(CLI::IsMember({"reject", "keep-first", "sum-clamp"}));
}

void add_seed_options(CLI::App* cmd, SeedOpts& o) {
  auto* f = cmd->add_option("--seeds-file", o.file, "seed labels file");
  auto* t = cmd->add_option("--top-degree", o.top_degree,
                            "use the k highest out-degree nodes as seeds");
  auto* r = cmd->add_option("--random-k", o.random_k,
                            "use k uniform random nodes as seeds");
  cmd->add_option("--pick-seed", o.pick_seed, "rng seed for --random-k");
  f->excludes(t)->excludes(r);
  t->excludes(r);
}

Graph load_graph(const GraphOpts& o) {
  std::ifstream in(o.path);
  if (!in) throw std::runtime_error("cannot open graph file " + o.path);
  DuplicatePolicy policy = DuplicatePolicy::kReject;
  if (o.duplicates == "keep-first") policy = DuplicatePolicy::kKeepFirst;
  if (o.duplicates == "sum-clamp") policy = DuplicatePolicy::kSumThenClamp;
  Graph g = load_edge_list(in, policy);
  WeightScheme scheme = WeightScheme::kWeightedCascade;
  if (o.weights == "uniform") scheme = WeightScheme::kUniform;
  if (o.weights == "explicit") scheme = WeightScheme::kExplicit;
  return assign_weights(g, scheme, o.uniform_p);
}

SeedSet make_seeds(const Graph& g, const SeedOpts& o) {
  const int sources = (!o.file.empty() ? 1 : 0) + (o.top_degree > 0 ? 1 : 0) +
                      (o.random_k > 0 ? 1 : 0);
  if (sources != 1)
    throw std::runtime_error(
        "pick exactly one seed source: --seeds-file, --top-degree or "
        "--random-k");
  if (!o.file.empty()) {
    std::ifstream in(o.file);
    if (!in) throw std::runtime_error("cannot open seeds file " + o.file);
    return load_seed_list(g, in);
  }
  if (o.top_degree > 0) return top_degree_seeds(g, o.top_degree);
  return random_seeds(g, o.random_k, o.pick_seed);
}

// Stream sink that hands out std::cout unless a path is given.
struct OutFile {
  explicit OutFile(const std::string& path) {
    if (!path.empty()) {
      file.emplace(path);
      if (!*file) throw std::runtime_error("cannot write " + path);
    }
  }
  std::ostream& get() { return file ? *file : std::cout; }
  std::optional<std::ofstream> file;
};

int run_gen(const std::string& kind, std::size_t nodes, std::size_t edges,
            std::size_t rows, std::size_t cols, std::uint64_t seed,
            const std::string& out) {
  SynthSpec spec;
  if (kind == "random-dag")
    spec = {SynthKind::kRandomDag, nodes, edges, 0, 0};
  else if (kind == "power-law")
    spec = {SynthKind::kPowerLaw, nodes, edges, 0, 0};
  else
    spec = {SynthKind::kGrid, 0, 0, rows, cols};
  const Graph g = generate_synthetic(spec, seed);
  OutFile sink(out);
  write_edge_list(sink.get(), g);
  return 0;
}

int run_verify(const Graph& g, const SeedSet& s, const Budgets& b,
               const AccuracyParams& acc, std::uint64_t master_seed) {
  std::cout << "nodes=" << g.num_present_nodes() << " edges=" << g.num_edges()
            << " seeds=" << s.size() << "\n";
  const double sigma = exact_spread(g, s);
  std::cout << "exact_spread=" << sigma << "\n";
  const BruteForceResult opt = brute_force_opt(g, s, b);
  std::cout << "opt_reduction=" << opt.value
            << " (over " << opt.evaluated << " attack sets)\n";
  const double gate = (0.5 - acc.epsilon) * opt.value;
  bool all_ok = true;
  const std::vector<std::string> algos = {"aaimm-naive", "aaimm-fb",
                                          "aaimm-dag", "aaff"};
  for (std::size_t i = 0; i < algos.size(); ++i) {
    Rng rng(derive_seed(master_seed, i, 0));
    AttackOutcome out;
    if (algos[i] == "aaff")
      out = aaff_attack(g, s, b, acc, rng);
    else
      out = aaimm_attack(g, s, b, acc,
                         algos[i] == "aaimm-naive"
                             ? SamplerKind::kNaive
                             : (algos[i] == "aaimm-fb"
                                    ? SamplerKind::kForwardBackward
                                    : SamplerKind::kDag),
                         rng);
    const double got = exact_reduction(g, s, out.attack);
    const bool ok = got >= gate - 1e-9;
    all_ok = all_ok && ok;
    std::cout << algos[i] << ": exact_reduction=" << got
              << " bound=" << gate << (ok ? " ok" : " BELOW BOUND") << "\n";
  }
  return all_ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"adversarial attacks on influence maximization (LT model)"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "write a synthetic edge list");
  gen->set_config("--config");
  std::string gen_kind = "random-dag";
  std::size_t gen_nodes = 0, gen_edges = 0, gen_rows = 0, gen_cols = 0;
  std::uint64_t gen_seed = 1;
  std::string gen_out;
  gen->add_option("--kind", gen_kind, "random-dag, power-law or grid")
      ->check(CLI::IsMember({"random-dag", "power-law", "grid"}));
  gen->add_option("--nodes", gen_nodes, "node count (random-dag, power-law)");
  gen->add_option("--edges", gen_edges, "edge count (random-dag, power-law)");
  gen->add_option("--rows", gen_rows, "grid rows");
  gen->add_option("--cols", gen_cols, "grid cols");
  gen->add_option("--seed", gen_seed, "generator seed");
  gen->add_option("--out", gen_out, "output file (default stdout)");

  // shared attack/bench state
  GraphOpts atk_graph, bch_graph, evl_graph, vfy_graph;
  SeedOpts atk_seeds, bch_seeds, evl_seeds, vfy_seeds;
  RunConfig atk_cfg, bch_cfg;
  std::string atk_out, bch_out;
  std::size_t atk_cap_mb = 2048, bch_cap_mb = 2048;

  auto add_run_options = [](CLI::App* cmd, RunConfig& cfg, std::string& out,
                            std::size_t& cap_mb) {
    cmd->add_option("--dataset", cfg.dataset, "name for the CSV rows");
    cmd->add_option("--qn", cfg.qn_list, "node budget(s)")
        ->delimiter(',')
        ->required();
    cmd->add_option("--qe", cfg.qe_list, "edge budget(s)")
        ->delimiter(',')
        ->required();
    cmd->add_option("--epsilon", cfg.acc.epsilon, "accuracy target");
    cmd->add_option("--ell", cfg.acc.ell, "failure exponent");
    cmd->add_option("--sims", cfg.eval_sims, "evaluation simulations");
    cmd->add_option("--master-seed", cfg.master_seed, "master rng seed")
        ->required();
    cmd->add_option("--theta", cfg.theta, "aaff forest count");
    cmd->add_option("--memory-cap-mb", cap_mb, "aaff forest memory cap");
    cmd->add_option("--out", out, "CSV output file (default stdout)");
  };

  // attack
  auto* atk = app.add_subcommand("attack", "run one attack over a budget grid");
  atk->set_config("--config");
  add_graph_options(atk, atk_graph);
  add_seed_options(atk, atk_seeds);
  std::string atk_algorithm = "aaimm-dag";
  atk->add_option("--algorithm", atk_algorithm,
                  "aaimm-naive, aaimm-fb, aaimm-dag or aaff");
  atk->add_option("--attack-out", atk_cfg.attack_out,
                  "attack-set file prefix (one file per grid point)");
  add_run_options(atk, atk_cfg, atk_out, atk_cap_mb);

  // bench
  auto* bch = app.add_subcommand(
      "bench", "compare algorithms on one budget point");
  bch->set_config("--config");
  add_graph_options(bch, bch_graph);
  add_seed_options(bch, bch_seeds);
  std::vector<std::string> bch_algorithms;
  bch->add_option("--algorithms", bch_algorithms,
                  "two or more of aaimm-naive, aaimm-fb, aaimm-dag, aaff")
      ->delimiter(',')
      ->required();
  add_run_options(bch, bch_cfg, bch_out, bch_cap_mb);

  // eval
  auto* evl = app.add_subcommand("eval", "re-evaluate a saved attack set");
  evl->set_config("--config");
  add_graph_options(evl, evl_graph);
  add_seed_options(evl, evl_seeds);
  std::string evl_attack_file;
  std::size_t evl_sims = 10000;
  std::uint64_t evl_seed = 1;
  evl->add_option("--attack-file", evl_attack_file, "saved attack set")
      ->required();
  evl->add_option("--sims", evl_sims, "simulations");
  evl->add_option("--seed", evl_seed, "rng seed");

  // verify
  auto* vfy = app.add_subcommand(
      "verify", "exhaustive-optimum check on a small graph");
  vfy->set_config("--config");
  add_graph_options(vfy, vfy_graph);
  add_seed_options(vfy, vfy_seeds);
  std::size_t vfy_qn = 1, vfy_qe = 0;
  AccuracyParams vfy_acc;
  std::uint64_t vfy_seed = 1;
  vfy->add_option("--qn", vfy_qn, "node budget");
  vfy->add_option("--qe", vfy_qe, "edge budget");
  vfy->add_option("--epsilon", vfy_acc.epsilon, "accuracy target");
  vfy->add_option("--ell", vfy_acc.ell, "failure exponent");
  vfy->add_option("--master-seed", vfy_seed, "master rng seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed())
      return run_gen(gen_kind, gen_nodes, gen_edges, gen_rows, gen_cols,
                     gen_seed, gen_out);
    if (atk->parsed()) {
      const Graph g = load_graph(atk_graph);
      const SeedSet s = make_seeds(g, atk_seeds);
      atk_cfg.algorithms = {atk_algorithm};
      atk_cfg.memory_cap_bytes = atk_cap_mb << 20;
      if (atk_cfg.dataset.empty()) atk_cfg.dataset = atk_graph.path;
      OutFile sink(atk_out);
      run_attack_command(g, s, atk_cfg, sink.get());
      return 0;
    }
    if (bch->parsed()) {
      const Graph g = load_graph(bch_graph);
      const SeedSet s = make_seeds(g, bch_seeds);
      bch_cfg.algorithms = bch_algorithms;
      bch_cfg.memory_cap_bytes = bch_cap_mb << 20;
      if (bch_cfg.dataset.empty()) bch_cfg.dataset = bch_graph.path;
      OutFile sink(bch_out);
      run_bench_command(g, s, bch_cfg, sink.get());
      return 0;
    }
    if (evl->parsed()) {
      const Graph g = load_graph(evl_graph);
      const SeedSet s = make_seeds(g, evl_seeds);
      std::ifstream in(evl_attack_file);
      if (!in)
        throw std::runtime_error("cannot open attack file " + evl_attack_file);
      AttackSet a = parse_attack_file(g, in);
      a.validate(g, &s);
      Rng rng(evl_seed);
      const ReductionEstimate est =
          estimate_reduction(g, s, a, evl_sims, true, rng);
      std::cout << "spread_before=" << est.before_mean << "\n"
                << "spread_after=" << est.after_mean << "\n"
                << "reduction=" << est.mean << "\n"
                << "reduction_stderr=" << est.std_error << "\n"
                << "sims=" << est.samples << "\n";
      return 0;
    }
    if (vfy->parsed()) {
      const Graph g = load_graph(vfy_graph);
      const SeedSet s = make_seeds(g, vfy_seeds);
      return run_verify(g, s, Budgets{vfy_qn, vfy_qe}, vfy_acc, vfy_seed);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
