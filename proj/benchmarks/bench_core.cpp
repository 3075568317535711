#include <benchmark/benchmark.h>

#include "kdl/bounds.hpp"
#include "kdl/energy.hpp"
#include "kdl/minimax.hpp"
#include "kdl/optimize.hpp"
#include "kdl/solve.hpp"

namespace {

kdl::Problem canonical(int n, bool closed_form) {
    auto spec = kdl::canonical_spec(n, 2.0, -1.0, 0.001);
    if (!closed_form) {
        spec.K_primitive.reset();
        spec.f_primitive.clear();
        spec.g_primitive.clear();
    }
    return kdl::Problem(spec);
}

void BM_Evaluate(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const auto problem = canonical(n, state.range(1) != 0);
    const Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(n, -0.7, 0.9);
    const Eigen::VectorXd mu = Eigen::VectorXd::Constant(n, 0.01);
    for (auto _ : state) {
        benchmark::DoNotOptimize(kdl::energy::value_and_gradient(problem, x, mu, nullptr));
    }
}
BENCHMARK(BM_Evaluate)->ArgsProduct({{1, 4, 16}, {0, 1}});

void BM_ValueAndGradient(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const auto problem = canonical(n, true);
    const Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(n, -0.7, 0.9);
    const Eigen::VectorXd mu = Eigen::VectorXd::Constant(n, 0.01);
    Eigen::VectorXd g(n);
    for (auto _ : state) {
        benchmark::DoNotOptimize(kdl::energy::value_and_gradient(problem, x, mu, &g));
        benchmark::ClobberMemory();
    }
}
BENCHMARK(BM_ValueAndGradient)->Arg(1)->Arg(4)->Arg(16);

void BM_Primitive(benchmark::State& state) {
    const kdl::Primitive F(kdl::ExprFn::parse("1/(1+t^2)"));
    double t = 0.1;
    F(1e3);  // warm the checkpoints
    for (auto _ : state) {
        benchmark::DoNotOptimize(F(t));
        t = t < 500.0 ? t * 1.7 : 0.1;
    }
}
BENCHMARK(BM_Primitive);

void BM_Multistart(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const auto problem = canonical(n, true);
    const Eigen::VectorXd mu = Eigen::VectorXd::Zero(n);
    const kdl::ObjectiveFn objective = [&](const Eigen::VectorXd& x, Eigen::VectorXd* g) {
        return kdl::energy::value_and_gradient(problem, x, mu, g);
    };
    const auto starts = kdl::make_starts(n, 16, 2.0, 1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(kdl::multistart(objective, starts, {}, 1));
    }
}
BENCHMARK(BM_Multistart)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_SolveN4(benchmark::State& state) {
    const auto problem = canonical(4, true);
    const auto bundle = kdl::build_bundle(problem);
    kdl::GapSettings gs;
    gs.starts = 16;
    const auto gap = kdl::compute_delta(problem, bundle, gs);
    kdl::SolveSettings settings;
    settings.starts = 16;
    settings.sweep_points = 64;
    for (auto _ : state) {
        benchmark::DoNotOptimize(kdl::solve(problem, bundle, gap, settings));
    }
}
BENCHMARK(BM_SolveN4)->Unit(benchmark::kSecond)->Iterations(1);

}  // namespace

BENCHMARK_MAIN();
