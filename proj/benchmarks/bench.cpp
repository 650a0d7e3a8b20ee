// Microbenchmarks for the hot paths: separation deciders, equivalence
// checking, class enumeration, and the Riccati solvers.

#include <benchmark/benchmark.h>

#include "cdgkit/equivalence.hpp"
#include "cdgkit/hardness.hpp"
#include "cdgkit/ou.hpp"
#include "cdgkit/separation.hpp"

using namespace cdgkit;

namespace {

Graph random_cdg(int n, std::uint64_t seed, double pdir = 0.3, double pblunt = 0.3) {
    Graph g;
    for (int i = 0; i < n; ++i) g.add_node("v" + std::to_string(i + 1));
    for (int i = 0; i < n; ++i) g.add_directed(i, i);
    std::uint64_t ctr = 0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            if (ou::uniform01(seed, ctr++) < pdir) g.add_directed(i, j);
            if (i < j && ou::uniform01(seed, ctr++) < pblunt) g.add_blunt(i, j);
        }
    return g;
}

void bm_augmented_separated(benchmark::State& state) {
    int n = (int)state.range(0);
    Graph g = random_cdg(n, 1);
    SeparationQuery q{NodeSet::of(n, {0}), NodeSet::of(n, {n - 1}), NodeSet::of(n, {1})};
    for (auto _ : state) benchmark::DoNotOptimize(augmented_separated(g, q));
}
BENCHMARK(bm_augmented_separated)->Arg(6)->Arg(10)->Arg(14);

void bm_walk_state_separated(benchmark::State& state) {
    int n = (int)state.range(0);
    Graph g = random_cdg(n, 1);
    SeparationQuery q{NodeSet::of(n, {0}), NodeSet::of(n, {n - 1}), NodeSet::of(n, {1})};
    for (auto _ : state) benchmark::DoNotOptimize(walk_state_separated(g, q));
}
BENCHMARK(bm_walk_state_separated)->Arg(6)->Arg(10)->Arg(14);

void bm_markov_equivalent(benchmark::State& state) {
    int n = (int)state.range(0);
    Graph g1 = random_cdg(n, 2);
    Graph g2 = g1; // worst case: full ancestral-set sweep without early exit
    for (auto _ : state) benchmark::DoNotOptimize(markov_equivalent(g1, g2));
}
BENCHMARK(bm_markov_equivalent)->Arg(5)->Arg(7)->Arg(9);

void bm_independence_model(benchmark::State& state) {
    int n = (int)state.range(0);
    Graph g = random_cdg(n, 3);
    for (auto _ : state) benchmark::DoNotOptimize(independence_model(g));
}
BENCHMARK(bm_independence_model)->Arg(4)->Arg(5)->Arg(6);

void bm_enumerate_class(benchmark::State& state) {
    int n = (int)state.range(0);
    Graph g = random_cdg(n, 4, 0.3, 0.4);
    for (auto _ : state) benchmark::DoNotOptimize(enumerate_class(g).members.size());
}
BENCHMARK(bm_enumerate_class)->Arg(4)->Arg(5);

void bm_reduction(benchmark::State& state) {
    DnfFormula f = parse_dnf("(x1 & !x2) | (x2 & x3 & !x1) | (!x3)");
    for (auto _ : state) {
        ReductionPair p = reduce_to_graph_pair(f);
        benchmark::DoNotOptimize(markov_equivalent(p.D, p.D_plus));
    }
}
BENCHMARK(bm_reduction);

void bm_care_solve(benchmark::State& state) {
    int k = (int)state.range(0);
    std::uint64_t ctr = 0;
    auto u = [&] { return 2.0 * ou::uniform01(11, ctr++) - 1.0; };
    ou::Matrix D(k, k), B(k, k), Cq(k, k);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) {
            D(i, j) = u();
            B(i, j) = 0.5 * u();
            Cq(i, j) = u();
        }
    D -= (2.0 + 0.4 * k) * ou::Matrix::Identity(k, k);
    ou::RiccatiSystem sys{D, B * B.transpose(),
                          Cq * Cq.transpose() + 0.2 * ou::Matrix::Identity(k, k), {}, {}};
    for (auto _ : state) benchmark::DoNotOptimize(ou::care_solve(sys).residual);
}
BENCHMARK(bm_care_solve)->Arg(3)->Arg(6)->Arg(10);

void bm_riccati_diff(benchmark::State& state) {
    int k = 4;
    std::uint64_t ctr = 0;
    auto u = [&] { return 2.0 * ou::uniform01(12, ctr++) - 1.0; };
    ou::Matrix D(k, k), B(k, k), Cq(k, k), G(k, k);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) {
            D(i, j) = u();
            B(i, j) = 0.5 * u();
            Cq(i, j) = u();
            G(i, j) = u();
        }
    D -= 3.5 * ou::Matrix::Identity(k, k);
    ou::RiccatiSystem sys{D, B * B.transpose(),
                          Cq * Cq.transpose() + 0.2 * ou::Matrix::Identity(k, k), {}, {}};
    ou::Matrix g0 = G * G.transpose() + 0.3 * ou::Matrix::Identity(k, k);
    std::vector<double> grid;
    for (int i = 0; i <= 100; ++i) grid.push_back(0.05 * i);
    for (auto _ : state) benchmark::DoNotOptimize(ou::riccati_diff(sys, g0, grid).back()(0, 0));
}
BENCHMARK(bm_riccati_diff);

void bm_euler_maruyama(benchmark::State& state) {
    ou::OUModel m;
    m.nodes = {"a", "b", "c"};
    m.M = ou::Matrix::Identity(3, 3) * -1.0;
    m.M(1, 0) = 0.5;
    m.mu = ou::Vector::Zero(3);
    m.sigma0 = ou::Matrix::Identity(3, 3);
    m.gamma0_diag = ou::Vector::Ones(3);
    for (auto _ : state)
        benchmark::DoNotOptimize(ou::euler_maruyama(m, 1.0, 1e-3, 9).X.rows());
}
BENCHMARK(bm_euler_maruyama);

} // namespace

BENCHMARK_MAIN();
