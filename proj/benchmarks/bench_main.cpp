#include <benchmark/benchmark.h>

#include <progmod/caprese.hpp>
#include <progmod/capri.hpp>
#include <progmod/dataset.hpp>
#include <progmod/eval.hpp>
#include <progmod/patterns.hpp>
#include <progmod/rng.hpp>
#include <progmod/sbcn.hpp>
#include <progmod/suppes.hpp>
#include <progmod/synthgen.hpp>

#include <string>
#include <vector>

using namespace progmod;

namespace {

GenotypeMatrix random_data(std::size_t rows, std::size_t cols, uint64_t seed) {
  TopologySpec spec;
  spec.n_events = cols;
  spec.kind = TopologyKind::tree;
  spec.p_min = 0.4;
  spec.p_max = 0.9;
  spec.seed = seed;
  const GroundTruth gt = random_topology(spec);
  return sample_dataset(gt, rows, derive_seed(seed, 1));
}

void bm_shrinkage_grid(benchmark::State& state) {
  const GenotypeMatrix m = random_data(std::size_t(state.range(0)), 20, 11);
  for (auto _ : state) {
    const ShrinkageScores s = shrinkage_scores(m, 0.5);
    benchmark::DoNotOptimize(s.m_at(0, 1));
  }
}
BENCHMARK(bm_shrinkage_grid)->Arg(250)->Arg(1000)->Arg(5000);

void bm_tree_reconstruct(benchmark::State& state) {
  const GenotypeMatrix m = random_data(1000, std::size_t(state.range(0)), 12);
  for (auto _ : state) {
    const TreeModel t = reconstruct_tree(m, 0.5);
    benchmark::DoNotOptimize(t.edge_score[0]);
  }
}
BENCHMARK(bm_tree_reconstruct)->Arg(10)->Arg(20)->Arg(40);

void bm_mann_whitney_exact(benchmark::State& state) {
  std::vector<double> a, b;
  Rng rng(13);
  for (int i = 0; i < 10; ++i) {
    a.push_back(rng.uniform01());
    b.push_back(rng.uniform01());
  }
  for (auto _ : state) benchmark::DoNotOptimize(mann_whitney_greater(a, b));
}
BENCHMARK(bm_mann_whitney_exact);

void bm_bootstrap_distributions(benchmark::State& state) {
  const GenotypeMatrix m = random_data(300, 10, 14);
  const LiftedMatrix lifted = lift(m, {});
  for (auto _ : state) {
    const auto d = bootstrap_distributions(lifted, 100, 15);
    benchmark::DoNotOptimize(d.marginals(0).size());
  }
}
BENCHMARK(bm_bootstrap_distributions);

void bm_hill_climb(benchmark::State& state) {
  const GenotypeMatrix m = random_data(1000, 10, 16);
  const LiftedMatrix lifted = lift(m, {});
  const auto ds = bootstrap_distributions(lifted, 100, 17);
  const PrimaFacieGraph pf = remove_cycles(prima_facie_graph(lifted, ds, 0.05));
  const ScoreOptions opts{Regularizer::bic, false};
  for (auto _ : state) {
    const HillClimbResult r = hill_climb(pf, lifted, opts, 10000, 10, 18);
    benchmark::DoNotOptimize(r.score);
  }
}
BENCHMARK(bm_hill_climb);

void bm_tree_edit_distance(benchmark::State& state) {
  TopologySpec spec;
  spec.n_events = std::size_t(state.range(0));
  spec.kind = TopologyKind::tree;
  spec.seed = 19;
  const GroundTruth one = random_topology(spec);
  spec.seed = 23;
  const GroundTruth two = random_topology(spec);
  const ModelGraph a = graph_of(one, true), b = graph_of(two, true);
  for (auto _ : state) {
    const EvalReport rep = evaluate(a, b);
    benchmark::DoNotOptimize(rep.ted);
  }
}
BENCHMARK(bm_tree_edit_distance)->Arg(20)->Arg(60);

void bm_personalized_pagerank(benchmark::State& state) {
  Sbcn s;
  const std::size_t n = std::size_t(state.range(0));
  Rng rng(21);
  for (std::size_t i = 0; i < n; ++i) s.nodes.push_back(EventMeta{"n" + std::to_string(i), "g"});
  s.level.assign(n, 0);
  s.decision_neg = 0;
  s.decision_pos = 1;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      if (a != b && rng.bernoulli(0.2)) s.edges.push_back({a, b, 0.1 + 0.8 * rng.uniform01()});
  for (auto _ : state) {
    const auto p = personalized_pagerank(s, {2});
    benchmark::DoNotOptimize(p[0]);
  }
}
BENCHMARK(bm_personalized_pagerank)->Arg(20)->Arg(100);

}  // namespace

BENCHMARK_MAIN();
