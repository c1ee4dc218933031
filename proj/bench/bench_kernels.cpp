// Serial reference kernels against their OpenMP counterparts.
//
//   ./drsne_bench --benchmark_filter=Repulsion
//
// OpenMP variants run with omp_get_max_threads() workers (set OMP_NUM_THREADS).

#include <benchmark/benchmark.h>

#include <omp.h>

#include "drsne/affinity.hpp"
#include "drsne/kernels.hpp"
#include "drsne/neighbors.hpp"
#include "drsne/rng.hpp"

namespace {

using namespace drsne;

Matrix random_points(std::size_t n, std::size_t d, std::uint64_t seed) {
    Rng rng(seed);
    NormalSampler normal;
    Matrix m(n, d);
    for (double& v : m.values()) v = normal(rng);
    return m;
}

void BM_RepulsionSerial(benchmark::State& state) {
    const auto z = random_points(static_cast<std::size_t>(state.range(0)), 2, 1);
    std::vector<double> sums(z.rows());
    Matrix rep;
    for (auto _ : state) {
        kernels::serial::student_t_repulsion(z, sums, rep);
        benchmark::DoNotOptimize(rep.data());
    }
    state.SetComplexityN(state.range(0));
}

void BM_RepulsionOmp(benchmark::State& state) {
    const auto z = random_points(static_cast<std::size_t>(state.range(0)), 2, 1);
    std::vector<double> sums(z.rows());
    Matrix rep;
    for (auto _ : state) {
        kernels::omp::student_t_repulsion(z, sums, rep, omp_get_max_threads());
        benchmark::DoNotOptimize(rep.data());
    }
    state.SetComplexityN(state.range(0));
}

void BM_KnnSerial(benchmark::State& state) {
    const auto x = random_points(static_cast<std::size_t>(state.range(0)), 10, 2);
    const std::size_t k = 30;
    std::vector<std::uint32_t> idx(x.rows() * k);
    std::vector<double> dist(x.rows() * k);
    for (auto _ : state) {
        kernels::serial::knn_rows(x, k, idx, dist);
        benchmark::DoNotOptimize(dist.data());
    }
}

void BM_KnnOmp(benchmark::State& state) {
    const auto x = random_points(static_cast<std::size_t>(state.range(0)), 10, 2);
    const std::size_t k = 30;
    std::vector<std::uint32_t> idx(x.rows() * k);
    std::vector<double> dist(x.rows() * k);
    for (auto _ : state) {
        kernels::omp::knn_rows(x, k, idx, dist, omp_get_max_threads());
        benchmark::DoNotOptimize(dist.data());
    }
}

struct DensityFixture {
    Matrix z;
    NeighborGraph graph;
    ReverseAdjacency rev;
    std::vector<double> coef;

    explicit DensityFixture(std::size_t n) : z(random_points(n, 2, 3)), graph(knn(z, 80)), rev(reverse_adjacency(graph)), coef(n, 1e-3) {}
    kernels::NeighborView view() const { return {graph.k, graph.idx, rev.offsets, rev.sources}; }
};

void BM_DensityGatherSerial(benchmark::State& state) {
    const DensityFixture f(static_cast<std::size_t>(state.range(0)));
    Matrix grad;
    for (auto _ : state) {
        kernels::serial::density_gather(f.z, f.view(), f.coef, grad);
        benchmark::DoNotOptimize(grad.data());
    }
}

void BM_DensityGatherOmp(benchmark::State& state) {
    const DensityFixture f(static_cast<std::size_t>(state.range(0)));
    Matrix grad;
    for (auto _ : state) {
        kernels::omp::density_gather(f.z, f.view(), f.coef, grad, omp_get_max_threads());
        benchmark::DoNotOptimize(grad.data());
    }
}

}  // namespace

BENCHMARK(BM_RepulsionSerial)->RangeMultiplier(2)->Range(500, 4000)->Complexity(benchmark::oNSquared);
BENCHMARK(BM_RepulsionOmp)->RangeMultiplier(2)->Range(500, 4000)->Complexity(benchmark::oNSquared);
BENCHMARK(BM_KnnSerial)->Arg(1000)->Arg(2000);
BENCHMARK(BM_KnnOmp)->Arg(1000)->Arg(2000);
BENCHMARK(BM_DensityGatherSerial)->Arg(2000);
BENCHMARK(BM_DensityGatherOmp)->Arg(2000);

BENCHMARK_MAIN();
