#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "advim/forest.hpp"
#include "advim/lt.hpp"
#include "support.hpp"

using namespace advim;

namespace {

void check_tables_match(const ScoredForestSet& f) {
  const ScoreTables fresh = f.recomputed();
  REQUIRE(fresh.node == f.node_scores());
  REQUIRE(fresh.edge == f.edge_scores());
}

}  // namespace

TEST_CASE("forest scores on the deterministic chain") {
  const Graph g = support::make_g1();
  const SeedSet s(g, {0});
  Rng rng(1);
  ScoredForestSet f(g, s, 10, rng, std::size_t{1} << 30);
  CHECK(f.forest_count() == 10);
  CHECK(f.activated_sum() == doctest::Approx(20.0));
  // every forest is the chain, so b shields two nodes and c one
  CHECK(f.node_scores()[1] == 20);
  CHECK(f.node_scores()[2] == 10);
  CHECK(f.edge_scores()[g.find_edge(0, 1)] == 20);
  CHECK(f.edge_scores()[g.find_edge(1, 2)] == 10);
  check_tables_match(f);
}

TEST_CASE("greedy selection over chain forests") {
  const Graph g = support::make_g1();
  const SeedSet s(g, {0});
  SUBCASE("single node budget takes the shield node") {
    Rng rng(2);
    ScoredForestSet f(g, s, 10, rng, std::size_t{1} << 30);
    const AaffSelection sel = aaff_select(f, {1, 0});
    CHECK(sel.attack.nodes == std::vector<NodeId>{1});
    CHECK(sel.attack.edges.empty());
    CHECK(sel.gain_sum == 20);
    // nothing survives downstream of b
    for (const std::int64_t v : f.node_scores()) CHECK(v == 0);
    for (const std::int64_t v : f.edge_scores()) CHECK(v == 0);
    check_tables_match(f);
  }
  SUBCASE("a second node budget has nothing left to take") {
    Rng rng(3);
    ScoredForestSet f(g, s, 10, rng, std::size_t{1} << 30);
    const AaffSelection sel = aaff_select(f, {2, 0});
    CHECK(sel.attack.nodes == std::vector<NodeId>{1});
    CHECK(sel.gain_sum == 20);
  }
  SUBCASE("ties between a node and its edge go to the node") {
    Rng rng(4);
    ScoredForestSet f(g, s, 10, rng, std::size_t{1} << 30);
    const AaffSelection sel = aaff_select(f, {1, 1});
    CHECK(sel.attack.nodes == std::vector<NodeId>{1});
    CHECK(sel.attack.edges.empty());
  }
  SUBCASE("edge-only budget takes the top edge") {
    Rng rng(5);
    ScoredForestSet f(g, s, 10, rng, std::size_t{1} << 30);
    const AaffSelection sel = aaff_select(f, {0, 1});
    CHECK(sel.attack.nodes.empty());
    CHECK(sel.attack.edges == std::vector<EdgeId>{g.find_edge(0, 1)});
    CHECK(sel.gain_sum == 20);
  }
}

TEST_CASE("edge removal shrinks every ancestor's score") {
  const Graph g = support::make_g1();
  const SeedSet s(g, {0});
  Rng rng(6);
  ScoredForestSet f(g, s, 10, rng, std::size_t{1} << 30);
  const EdgeId bc = g.find_edge(1, 2);
  CHECK(f.remove_edge(bc) == 10);
  CHECK(f.node_scores()[1] == 10);  // b now shields only itself
  CHECK(f.node_scores()[2] == 0);
  CHECK(f.edge_scores()[g.find_edge(0, 1)] == 10);
  CHECK(f.edge_scores()[bc] == 0);
  check_tables_match(f);
  CHECK(f.remove_edge(bc) == 0);  // already gone
  CHECK(f.remove_node(1) == 10);
  check_tables_match(f);
  CHECK(f.remove_node(1) == 0);
  CHECK(f.remove_node(2) == 0);

  CHECK_THROWS_AS(f.remove_node(99), std::exception);
  CHECK_THROWS_AS(f.remove_edge(99), std::exception);
}

TEST_CASE("per-forest scores are unbiased reduction estimates") {
  const Graph g = support::make_g2();
  const SeedSet s(g, {0});
  Rng rng(7);
  const std::size_t theta = 100000;
  ScoredForestSet f(g, s, theta, rng, std::size_t{1} << 30);
  const double t = static_cast<double>(theta);
  // exact reductions: b 0.75, c 0.55, s->b 0.75, s->c 0.30, b->c 0.25,
  // with per-forest variances small enough for tight three-sigma bands
  const auto near = [&](double got, double want, double var) {
    return std::abs(got - want) <= 3 * std::sqrt(var / t);
  };
  CHECK(near(f.node_scores()[1] / t, 0.75, 0.6875));
  CHECK(near(f.node_scores()[2] / t, 0.55, 0.2475));
  CHECK(near(f.edge_scores()[g.find_edge(0, 1)] / t, 0.75, 0.6875));
  CHECK(near(f.edge_scores()[g.find_edge(0, 2)] / t, 0.30, 0.21));
  CHECK(near(f.edge_scores()[g.find_edge(1, 2)] / t, 0.25, 0.1875));
  CHECK(f.activated_sum() / t == doctest::Approx(1.05).epsilon(0.03));
  check_tables_match(f);
}

TEST_CASE("forest marginals track the exact reduction on random graphs") {
  std::mt19937_64 eng(404);
  for (int it = 0; it < 4; ++it) {
    const support::SmallCase c = support::random_case(eng);
    const SeedSet s(c.g, c.seed_ids);
    const support::BruteOracle oracle(c.g, s);
    Rng rng(600 + static_cast<std::uint64_t>(it));
    const std::size_t theta = 20000;
    ScoredForestSet f(c.g, s, theta, rng, std::size_t{1} << 30);
    const double t = static_cast<double>(theta);
    const double slack =
        4.0 * static_cast<double>(c.g.num_present_nodes()) / std::sqrt(t);
    for (NodeId v = 0; v < c.g.num_nodes(); ++v) {
      if (c.g.node_removed(v) || s.contains(v)) continue;
      AttackSet a;
      a.nodes = {v};
      CHECK(std::abs(f.node_scores()[v] / t - oracle.rho(a)) <= slack);
    }
    for (EdgeId e = 0; e < c.g.num_edge_slots(); ++e) {
      if (c.g.edge_removed(e)) continue;
      AttackSet a;
      a.edges = {e};
      CHECK(std::abs(f.edge_scores()[e] / t - oracle.rho(a)) <= slack);
    }
  }
}

TEST_CASE("seeding every node leaves all scores at zero") {
  const Graph g = support::make_g2();
  const SeedSet s(g, {0, 1, 2});
  Rng rng(8);
  ScoredForestSet f(g, s, 100, rng, std::size_t{1} << 30);
  CHECK(f.forest_count() == 100);
  CHECK(f.activated_sum() == 0.0);
  for (const std::int64_t v : f.node_scores()) CHECK(v == 0);
  for (const std::int64_t v : f.edge_scores()) CHECK(v == 0);
  const AaffSelection sel = aaff_select(f, {2, 2});
  CHECK(sel.attack.empty());
  CHECK(sel.gain_sum == 0);
}

TEST_CASE("incremental updates equal a recompute after any trace") {
  std::mt19937_64 eng(909);
  for (int it = 0; it < 60; ++it) {
    const support::SmallCase c = support::random_case(eng);
    const SeedSet s(c.g, c.seed_ids);
    Rng rng(3000 + static_cast<std::uint64_t>(it));
    ScoredForestSet f(c.g, s, 150, rng, std::size_t{1} << 30);
    check_tables_match(f);
    std::uniform_int_distribution<int> len(1, 5);
    std::uniform_int_distribution<int> coin(0, 1);
    const int ops = len(eng);
    for (int op = 0; op < ops; ++op) {
      if (coin(eng) == 0) {
        std::uniform_int_distribution<std::size_t> pick(
            0, c.g.num_nodes() - 1);
        const NodeId v = static_cast<NodeId>(pick(eng));
        const std::int64_t before =
            s.contains(v) ? 0 : f.node_scores()[v];
        CHECK(f.remove_node(v) == before);
      } else {
        std::uniform_int_distribution<std::size_t> pick(
            0, c.g.num_edge_slots() - 1);
        const EdgeId e = static_cast<EdgeId>(pick(eng));
        const std::int64_t before = f.edge_scores()[e];
        CHECK(f.remove_edge(e) == before);
      }
      check_tables_match(f);
      for (const std::int64_t v : f.node_scores()) CHECK(v >= 0);
      for (const std::int64_t v : f.edge_scores()) CHECK(v >= 0);
    }
  }
}

TEST_CASE("the memory cap aborts forest growth") {
  const Graph g = support::make_g1();
  const SeedSet s(g, {0});
  Rng rng(10);
  CHECK_THROWS_AS(ScoredForestSet(g, s, 1000, rng, 500), MemoryCapExceeded);
  Rng rng2(10);
  CHECK_THROWS_AS(ScoredForestSet(g, s, 0, rng2, std::size_t{1} << 30),
                  std::exception);
}

TEST_CASE("forest attack end to end on the deterministic chain") {
  const Graph g = support::make_g1();
  const SeedSet s(g, {0});
  Rng rng(11);
  AaffOptions opt;
  opt.theta = 500;
  const AttackOutcome out = aaff_attack(g, s, {1, 0}, {0.1, 1.0}, rng, opt);
  CHECK(out.attack.nodes == std::vector<NodeId>{1});
  CHECK(out.attack.edges.empty());
  const RunReport& rep = out.report;
  CHECK(rep.algorithm == "aa-ff");
  CHECK(rep.sampler == "forest");
  CHECK(rep.theta == doctest::Approx(500.0));
  CHECK(rep.samples == 500);
  CHECK(rep.est_reduction == doctest::Approx(2.0));
  CHECK(rep.sigma_minus_est == doctest::Approx(2.0));
  CHECK(rep.coverage == doctest::Approx(1.0));
  CHECK(rep.stats.forests == 500);
  CHECK(rep.forest_bytes > 0);
  CHECK(std::isfinite(rep.theta_guarantee));
  CHECK(rep.theta_guarantee > 0);
  CHECK(exact_reduction(g, s, out.attack) == doctest::Approx(2.0));
}

TEST_CASE("forest attack matches the sampled optimum on the two-path graph") {
  const Graph g = support::make_g2();
  const SeedSet s(g, {0});
  Rng rng(12);
  AaffOptions opt;
  opt.theta = 100000;
  const AttackOutcome out = aaff_attack(g, s, {1, 1}, {0.1, 1.0}, rng, opt);
  CHECK(out.attack.nodes == std::vector<NodeId>{1});
  REQUIRE(out.attack.edges.size() == 1);
  CHECK(out.attack.edges[0] == g.find_edge(0, 2));
  CHECK(out.report.est_reduction == doctest::Approx(1.05).epsilon(0.03));
  CHECK(out.report.coverage == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("forest attack validates inputs and clamps budgets") {
  const Graph g = support::make_g2();
  const SeedSet s(g, {0});
  Rng rng(13);
  CHECK_THROWS_AS(aaff_attack(g, s, {0, 0}, {0.1, 1.0}, rng), std::exception);
  CHECK_THROWS_AS(aaff_attack(g, s, {1, 0}, {0.0, 1.0}, rng), std::exception);
  CHECK_THROWS_AS(aaff_attack(g, s, {1, 0}, {0.1, 0.0}, rng), std::exception);
  const SeedSet all(g, {0, 1, 2});
  CHECK_THROWS_AS(aaff_attack(g, all, {1, 0}, {0.1, 1.0}, rng),
                  std::exception);

  AaffOptions tiny;
  tiny.theta = 50;
  const AttackOutcome out = aaff_attack(g, s, {10, 10}, {0.1, 1.0}, rng, tiny);
  CHECK(out.report.budgets_clamped);
  CHECK(out.attack.nodes.size() <= 2);

  AaffOptions capped;
  capped.memory_cap_bytes = 400;
  capped.theta = 5000;
  Rng rng2(14);
  CHECK_THROWS_AS(aaff_attack(g, s, {1, 0}, {0.1, 1.0}, rng2, capped),
                  MemoryCapExceeded);
}

TEST_CASE("a graph that never spreads reports an infinite sample bound") {
  const Graph g = Graph::from_edges(2, {{0, 1, 0.0}}, {"s", "b"});
  const SeedSet s(g, {0});
  Rng rng(15);
  AaffOptions opt;
  opt.theta = 200;
  const AttackOutcome out = aaff_attack(g, s, {1, 0}, {0.1, 1.0}, rng, opt);
  CHECK(out.attack.empty());
  CHECK(out.report.est_reduction == 0.0);
  CHECK(std::isinf(out.report.theta_guarantee));
}
