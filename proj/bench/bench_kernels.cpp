// Serial reference kernels against their OpenMP counterparts.
// Fields are evaluated through finite differences to give each sample real work.

#include <benchmark/benchmark.h>

#include <vector>

#include "heischar/char_analysis.hpp"
#include "heischar/kernels.hpp"
#include "heischar/profiles.hpp"

using namespace heischar;

namespace {

ImplicitDomain fd_ball() {
  ImplicitDomain d = koranyi_ball(HPoint(0.2, -0.1, 0.3), 1.0);
  d.psi = d.psi.without_analytic_derivatives();
  return d;
}

const ImplicitDomain& ball() {
  static const ImplicitDomain d = fd_ball();
  return d;
}

std::vector<Vec3> seeds(int grid) {
  const kernels::Lattice l{ball().box, grid};
  const auto values = kernels::lattice_values(ball().psi, l);
  std::vector<Vec3> out;
  for (const auto& c : kernels::crossing_cells(values, l)) out.push_back(l.node(c[0], c[1], c[2]) + 0.5 * l.spacing());
  return out;
}

template <Exec E>
void BM_LatticeValues(benchmark::State& state) {
  const kernels::Lattice l{ball().box, static_cast<int>(state.range(0))};
  for (auto _ : state) {
    auto v = E == Exec::Serial ? kernels::lattice_values_serial(ball().psi, l) : kernels::lattice_values(ball().psi, l);
    benchmark::DoNotOptimize(v.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(l.nodes()) * l.nodes() * l.nodes());
}

template <Exec E>
void BM_Projection(benchmark::State& state) {
  const std::vector<Vec3> s = seeds(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto p = E == Exec::Serial ? kernels::project_to_zero_set_serial(ball().psi, s, 1e-10)
                               : kernels::project_to_zero_set(ball().psi, s, 1e-10);
    benchmark::DoNotOptimize(p.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(s.size()));
}

template <Exec E>
void BM_EvaluateSamples(benchmark::State& state) {
  const std::vector<Vec3> s = seeds(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto g = E == Exec::Serial ? kernels::evaluate_samples_serial(ball().psi, s)
                               : kernels::evaluate_samples(ball().psi, s);
    benchmark::DoNotOptimize(g.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(s.size()));
}

template <Exec E>
void BM_BoundaryMesh(benchmark::State& state) {
  for (auto _ : state) {
    BoundaryMesh m = boundary_mesh(ball(), static_cast<int>(state.range(0)), E);
    benchmark::DoNotOptimize(m.samples.data());
  }
}

template <Exec E>
void BM_ScanKoranyi(benchmark::State& state) {
  ScanConfig cfg;
  cfg.grid = static_cast<int>(state.range(0));
  cfg.exec = E;
  for (auto _ : state) {
    CharacteristicReport r = scan(ball(), cfg);
    benchmark::DoNotOptimize(r.global_min_m);
  }
}

template <Exec E>
void BM_ScanTorus(benchmark::State& state) {
  const TorusDomain t = TorusDomain::make(ellipse_profile(0.0, 3.0, 2.0, 1.0));
  ScanConfig cfg;
  cfg.n_s = static_cast<int>(state.range(0));
  cfg.n_theta = 64;
  cfg.exec = E;
  for (auto _ : state) {
    CharacteristicReport r = scan(t, cfg);
    benchmark::DoNotOptimize(r.global_min_m);
  }
}

}  // namespace

BENCHMARK(BM_LatticeValues<Exec::Serial>)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_LatticeValues<Exec::Parallel>)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_Projection<Exec::Serial>)->Arg(64)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_Projection<Exec::Parallel>)->Arg(64)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_EvaluateSamples<Exec::Serial>)->Arg(64)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_EvaluateSamples<Exec::Parallel>)->Arg(64)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_BoundaryMesh<Exec::Serial>)->Arg(48)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_BoundaryMesh<Exec::Parallel>)->Arg(48)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_ScanKoranyi<Exec::Serial>)->Arg(48)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_ScanKoranyi<Exec::Parallel>)->Arg(48)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_ScanTorus<Exec::Serial>)->Arg(256)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_ScanTorus<Exec::Parallel>)->Arg(256)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
