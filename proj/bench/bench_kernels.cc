// Copyright 2026 The seqpt Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <benchmark/benchmark.h>

#include "seqpt/channels.h"
#include "seqpt/physicality.h"
#include "seqpt/tomography.h"

namespace {

using namespace seqpt;

Execution execution_of(const benchmark::State& state) {
  return state.range(0) == 0 ? Execution::kSerial : Execution::kParallel;
}

LossOperator loss_of(const Channel& ch) {
  ComplexMatrix p = ComplexMatrix::Zero(ch.dim(), ch.dim());
  for (const auto& a : ch.kraus()) p += a.adjoint() * a;
  return LossOperator::from_matrix(p);
}

void BM_full_reconstruct_exact(benchmark::State& state) {
  const Channel ch = make_process(ProcessName::kSwap25, 6, 0.5);
  const SeqptSetup setup = SeqptSetup::bipartite(2, 3);
  const LossOperator p = loss_of(ch);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        full_reconstruct(ch, setup, ReconstructionMode::kBipartiteNtp, p, Estimator::exact(), execution_of(state)));
  }
}
BENCHMARK(BM_full_reconstruct_exact)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);

void BM_full_reconstruct_shots(benchmark::State& state) {
  const Channel ch = make_process(ProcessName::kSwap25, 6, 0.5);
  const SeqptSetup setup = SeqptSetup::bipartite(2, 3);
  const LossOperator p = loss_of(ch);
  const Estimator est = Estimator::with_shots(8192, 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        full_reconstruct(ch, setup, ReconstructionMode::kBipartiteNtp, p, est, execution_of(state)));
  }
}
BENCHMARK(BM_full_reconstruct_shots)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);

void BM_sqpt_shots(benchmark::State& state) {
  const Channel ch = make_process(ProcessName::kSwap25, 6, 0.5);
  const Estimator est = Estimator::with_shots(8192, 1);
  for (auto _ : state) benchmark::DoNotOptimize(sqpt_reconstruct(ch, est, execution_of(state)));
}
BENCHMARK(BM_sqpt_shots)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);

void BM_selective(benchmark::State& state) {
  const Channel ch = make_process(ProcessName::kSwap25, 6, 0.5);
  const SeqptSetup setup = SeqptSetup::bipartite(2, 3);
  const LossOperator p = loss_of(ch);
  const ComplexMatrix theo = kraus_to_chi(ch, setup.basis());
  SelectiveOptions opt;
  opt.elements = nonzero_elements(theo, 1e-9);
  opt.m_max = 200;
  opt.seed = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        selective_reconstruct(ch, setup, ReconstructionMode::kBipartiteNtp, p, opt, theo, execution_of(state)));
  }
}
BENCHMARK(BM_selective)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);

void BM_projection(benchmark::State& state) {
  const OperatorBasis basis = product_basis(sylvester_basis(2), sylvester_basis(3));
  const Channel ch = make_process(ProcessName::kSwap25, 6, 0.5);
  const ComplexMatrix chi = kraus_to_chi(ch, basis);
  ComplexMatrix raw = chi;
  for (int k = 0; k < raw.rows(); ++k) raw(k, k) += (k % 2 == 0 ? 0.02 : -0.02);
  ProjectionOptions opt;
  opt.method = state.range(0) == 0 ? ProjectionOptions::Method::kMatrix : ProjectionOptions::Method::kSpectral;
  for (auto _ : state) benchmark::DoNotOptimize(project_physical(raw, basis, 5.0, opt));
}
BENCHMARK(BM_projection)->Arg(0)->Arg(1)->ArgName("spectral")->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
