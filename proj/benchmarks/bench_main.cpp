#include "tracebo/dominance.hpp"
#include "tracebo/gp.hpp"
#include "tracebo/problem.hpp"

#include <benchmark/benchmark.h>

#include <random>

namespace {

using namespace tracebo;

Matrix random_inputs(int n, int d, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    Matrix X(n, d);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < d; ++j) X(i, j) = unif(rng);
    }
    return X;
}

void bm_kernel(benchmark::State& state) {
    KernelParams p;
    p.lengthscales = Vector::Constant(8, 0.3);
    const Matrix X = random_inputs(2, 8, 1);
    const Vector a = X.row(0);
    const Vector b = X.row(1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(kernel(a, b, p));
    }
}
BENCHMARK(bm_kernel);

void bm_gp_fit(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const Matrix X = random_inputs(n, 2, 2);
    Vector y(n);
    for (int i = 0; i < n; ++i) y[i] = std::sin(5.0 * X(i, 0)) + X(i, 1);
    FitConfig cfg;
    cfg.seed = 3;
    for (auto _ : state) {
        benchmark::DoNotOptimize(GpModel::fit(X, y, cfg));
    }
}
BENCHMARK(bm_gp_fit)->Arg(30)->Arg(80)->Arg(160);

void bm_gp_predict(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const Matrix X = random_inputs(n, 2, 4);
    Vector y(n);
    for (int i = 0; i < n; ++i) y[i] = std::sin(5.0 * X(i, 0)) + X(i, 1);
    KernelParams p;
    p.lengthscales = Vector::Constant(2, 0.3);
    p.noise_variance = 1e-6;
    const GpModel m = GpModel::fit_given_params(X, y, p);
    const Vector q = Vector::Constant(2, 0.37);
    for (auto _ : state) {
        benchmark::DoNotOptimize(m.predict(q));
    }
}
BENCHMARK(bm_gp_predict)->Arg(30)->Arg(80)->Arg(160);

void bm_nondominated_sort(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<Vector> pts(n, Vector(3));
    for (auto& v : pts) {
        for (int k = 0; k < 3; ++k) v[k] = unif(rng);
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(nondominated_sort(pts));
    }
}
BENCHMARK(bm_nondominated_sort)->Arg(60)->Arg(140)->Arg(200);

void bm_latin_hypercube(benchmark::State& state) {
    const SearchSpace space(Vector::Zero(11), Vector::Ones(11));
    for (auto _ : state) {
        benchmark::DoNotOptimize(latin_hypercube(space, 30, 7));
    }
}
BENCHMARK(bm_latin_hypercube);

}  // namespace

BENCHMARK_MAIN();
