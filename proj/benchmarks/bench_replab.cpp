#include <benchmark/benchmark.h>

#include <random>

#include "replab/dynamics.hpp"
#include "replab/repbuild.hpp"
#include "replab/specgraph.hpp"

using namespace replab;

namespace {

const AlgebraParams& henon() {
    static const AlgebraParams p = henon_preset(5.0, 0.3, 3.0);
    return p;
}

// Haar-like unitary from the QR of a Gaussian matrix; phases are irrelevant for timing.
CMatrix random_unitary(Eigen::Index n, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    CMatrix z(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            z(i, j) = Complex(g(rng), g(rng));
    return Eigen::HouseholderQR<CMatrix>(z).householderQ();
}

} // namespace

static void BM_OrbitSearch(benchmark::State& state) {
    const auto period = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) {
        auto r = find_periodic_orbits(henon(), period, {0, 6, 0, 6}, {.seeds = 4096, .threads = 1});
        benchmark::DoNotOptimize(r.orbits.data());
    }
}
BENCHMARK(BM_OrbitSearch)->DenseRange(1, 8)->Unit(benchmark::kMillisecond);

static void BM_Census(benchmark::State& state) {
    for (auto _ : state) {
        auto c = henon_orbit_census(5.0, 0.3, 3.0, static_cast<std::size_t>(state.range(0)), 4096, 1);
        benchmark::DoNotOptimize(c.rows.data());
    }
}
BENCHMARK(BM_Census)->Arg(8)->Arg(10)->Unit(benchmark::kMillisecond);

static void BM_RelationResidual(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto orbits = find_periodic_orbits(henon(), n, {0, 6, 0, 6}).orbits;
    const auto rep = build_loop_rep(henon(), orbits.front(), 0.3);
    for (auto _ : state)
        benchmark::DoNotOptimize(relation_residual(henon(), rep.W).max());
}
BENCHMARK(BM_RelationResidual)->Arg(4)->Arg(8);

static void BM_Decompose(benchmark::State& state) {
    std::mt19937_64 rng(1);
    std::vector<Representation> parts;
    for (std::size_t n = 1; n <= static_cast<std::size_t>(state.range(0)); ++n)
        parts.push_back(build_loop_rep(henon(), find_periodic_orbits(henon(), n, {0, 6, 0, 6}).orbits.front(), 0.1 * n));
    const Representation sum = direct_sum(parts);
    const CMatrix Q = random_unitary(static_cast<Eigen::Index>(sum.dim()), rng);
    Representation conj;
    conj.W = Q * sum.W * Q.adjoint();
    for (auto _ : state) {
        auto report = decompose(conj, henon());
        benchmark::DoNotOptimize(report.offdiag_leakage);
    }
    state.SetLabel("dim " + std::to_string(sum.dim()));
}
BENCHMARK(BM_Decompose)->Arg(3)->Arg(5)->Arg(6)->Unit(benchmark::kMicrosecond);

static void BM_ShiftConjugation(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(shift_conjugation_residual(5.0, 0.3, 3.0, {1.7, -2.4}, n));
}
BENCHMARK(BM_ShiftConjugation)->Arg(2)->Arg(8);
BENCHMARK_MAIN();
