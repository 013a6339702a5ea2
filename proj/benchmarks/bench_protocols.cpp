#include <benchmark/benchmark.h>

#include <cmath>

#include "ecsim/analysis.hpp"
#include "ecsim/gates.hpp"
#include "ecsim/optics.hpp"
#include "ecsim/protocol_circuit.hpp"
#include "ecsim/qnd.hpp"
#include "ecsim/rng.hpp"
#include "ecsim/schmidt.hpp"
#include "ecsim/state.hpp"

namespace {

using namespace ecsim;

SchmidtForm input_state(int n_qubits_arg) {
  // cat states give a one-knob way to scale the register size
  return catalog_state(CatalogId::cat(n_qubits_arg), std::sqrt(0.8));
}

void bm_circuit_round(benchmark::State& state) {
  const SchmidtForm form = input_state(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_round(form));
  }
}
BENCHMARK(bm_circuit_round)->Arg(2)->Arg(6)->Arg(10);

void bm_optics_round(benchmark::State& state) {
  const SchmidtForm form = input_state(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_optics(form));
  }
}
BENCHMARK(bm_optics_round)->Arg(2)->Arg(6)->Arg(10);

void bm_qnd_round(benchmark::State& state) {
  const SchmidtForm form = input_state(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(qnd_round(form));
  }
}
BENCHMARK(bm_qnd_round)->Arg(2)->Arg(6)->Arg(10);

void bm_iterate_30(benchmark::State& state) {
  const SchmidtForm form = input_state(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(iterate(form, 30));
  }
}
BENCHMARK(bm_iterate_30)->Arg(2)->Arg(6)->Arg(10);

void bm_schmidt_extract(benchmark::State& state) {
  const PureState joint = assemble(input_state(static_cast<int>(state.range(0))));
  const int cut = joint.num_qubits - 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(schmidt_extract(joint, cut));
  }
}
BENCHMARK(bm_schmidt_extract)->Arg(2)->Arg(6)->Arg(10);

void bm_branch_tree_depth8(benchmark::State& state) {
  const SchmidtForm form = input_state(4);
  const TreeProtocol proto = state.range(0) == 0 ? TreeProtocol::Circuit : TreeProtocol::Qnd;
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_branch_tree(form, 8, proto));
  }
}
BENCHMARK(bm_branch_tree_depth8)->Arg(0)->Arg(1);

void bm_espp(benchmark::State& state) {
  const PureState joint = assemble(input_state(static_cast<int>(state.range(0))));
  const int cut = joint.num_qubits - 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(espp(joint, cut));
  }
}
BENCHMARK(bm_espp)->Arg(2)->Arg(6)->Arg(10);

void bm_sample_branch(benchmark::State& state) {
  const RoundResult round = run_round(input_state(4));
  const std::vector<BranchOutcome> branches = {
      {"fail", round.failure_prob, assemble(round.residual)},
      {"success", round.success_prob, round.success_state},
  };
  std::uint64_t seed = 42;
  for (auto _ : state) {
    auto drawn = sample_branch(branches, seed);
    seed = drawn.second;
    benchmark::DoNotOptimize(drawn);
  }
}
BENCHMARK(bm_sample_branch);

}  // namespace

BENCHMARK_MAIN();
