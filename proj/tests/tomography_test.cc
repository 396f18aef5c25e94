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

#include "seqpt/tomography.h"

#include <gtest/gtest.h>

#include "seqpt/physicality.h"
#include "test_util.h"

using namespace seqpt;

namespace {

struct LibraryChannel {
  ProcessName name;
  int dim;
  double loss;
};

std::vector<LibraryChannel> library() {
  std::vector<LibraryChannel> out;
  for (double loss : {0.0, 0.5}) {
    for (ProcessName n : {ProcessName::kId, ProcessName::kH01, ProcessName::kH12}) out.push_back({n, 3, loss});
    for (ProcessName n : {ProcessName::kId, ProcessName::kPhase, ProcessName::kSwap25}) out.push_back({n, 6, loss});
  }
  return out;
}

ReconstructionMode correct_mode(int d) { return d == 6 ? ReconstructionMode::kBipartiteNtp : ReconstructionMode::kNtp; }

LossOperator loss_of(const Channel& ch) {
  ComplexMatrix p = ComplexMatrix::Zero(ch.dim(), ch.dim());
  for (const auto& a : ch.kraus()) p += a.adjoint() * a;
  return LossOperator::from_matrix(p);
}

// (1/N) sum_s Tr[Q_s E(E_i^dag P_s E_j)], with Q_s = P_s or a reduced projector.
template <typename Q>
Complex direct_average(const Channel& ch, const SeqptSetup& setup, int i, int j, Q&& q) {
  const StateDesign& x = setup.design();
  Complex sum = 0.0;
  for (int s = 0; s < x.size(); ++s) {
    const ComplexMatrix p = x.pure_state(s).projector();
    const ComplexMatrix in = setup.basis()[i].adjoint() * p * setup.basis()[j];
    sum += (q(s) * seqpt::apply(ch, in)).trace();
  }
  return sum / static_cast<double>(x.size());
}

const SeqptSetup& setup3() {
  static const SeqptSetup s = SeqptSetup::single(3);
  return s;
}

const SeqptSetup& setup6() {
  static const SeqptSetup s = SeqptSetup::bipartite(2, 3);
  return s;
}

}  // namespace

TEST(tomography, exact_reconstruction_matches_analytic_chi) {
  for (const LibraryChannel& c : library()) {
    const Channel ch = make_process(c.name, c.dim, c.loss);
    const SeqptSetup& setup = c.dim == 3 ? setup3() : setup6();
    const ReconstructionResult r =
        full_reconstruct(ch, setup, correct_mode(c.dim), loss_of(ch), Estimator::exact());
    const ComplexMatrix theo = kraus_to_chi(ch, setup.basis());
    EXPECT_LT((r.chi_raw - theo).norm(), 1e-8) << to_string(c.name) << " d=" << c.dim << " loss=" << c.loss;
    EXPECT_GT(process_fidelity(theo, r.chi_raw), 1.0 - 1e-8);
    EXPECT_LT(max_asymmetry(r.chi_raw), 1e-9);
  }
}

TEST(tomography, circuit_counts) {
  const Channel c3 = make_process(ProcessName::kH01, 3, 0.5);
  const ReconstructionResult r3 = full_reconstruct(c3, setup3(), ReconstructionMode::kNtp, loss_of(c3), Estimator::exact());
  EXPECT_EQ(r3.circuits_executed, 36);
  EXPECT_EQ(r3.shots_total, 0);
  EXPECT_EQ(r3.mask.size(), 81u);
  const Channel c6 = make_process(ProcessName::kSwap25, 6, 0.5);
  const ReconstructionResult r6 = full_reconstruct(c6, setup6(), ReconstructionMode::kBipartiteNtp, loss_of(c6),
                                                   Estimator::with_shots(64, 3));
  EXPECT_EQ(r6.circuits_executed, 432);
  EXPECT_EQ(r6.shots_total, 432 * 64);
}

TEST(tomography, avg_fidelity_examples) {
  const Channel id = make_process(ProcessName::kId, 3, 0.0);
  EXPECT_NEAR(std::abs(avg_fidelity(id, 0, 0, setup3(), Estimator::exact()).value - 1.0), 0.0, 1e-12);
  for (int i = 1; i < 9; ++i) {
    const FidelityEstimate f = avg_fidelity(id, i, i, setup3(), Estimator::exact());
    EXPECT_NEAR(std::abs(f.value - 0.25), 0.0, 1e-12);
    EXPECT_EQ(f.element, std::make_pair(i, i));
  }
  const Channel h01 = make_process(ProcessName::kH01, 3, 0.5);
  const ComplexMatrix chi = kraus_to_chi(h01, setup3().basis());
  const Complex expected = (9.0 * chi(0, 0) + 2.5) / 12.0;
  EXPECT_NEAR(std::abs(avg_fidelity(h01, 0, 0, setup3(), Estimator::exact()).value - expected), 0.0, 1e-12);
}

TEST(tomography, exact_diagonal_estimates_are_real_probabilities) {
  Rng rng(41);
  const Channel ch = testutil::random_channel(3, 2, rng);
  for (int i = 0; i < 9; ++i) {
    const Complex f = avg_fidelity(ch, i, i, setup3(), Estimator::exact()).value;
    EXPECT_NEAR(f.imag(), 0.0, 1e-10);
    EXPECT_GE(f.real(), -1e-12);
    EXPECT_LE(f.real(), 1.0 + 1e-12);
  }
}

TEST(tomography, design_fidelity_equals_direct_average) {
  Rng rng(42);
  for (int trial = 0; trial < 3; ++trial) {
    const Channel ch = testutil::random_channel(3, 2, rng);
    for (int i = 0; i < 9; ++i) {
      for (int j = 0; j < 9; ++j) {
        const Complex direct = direct_average(ch, setup3(), i, j, [&](int s) {
          return setup3().design().pure_state(s).projector();
        });
        EXPECT_NEAR(std::abs(avg_fidelity(ch, i, j, setup3(), Estimator::exact()).value - direct), 0.0, 1e-12);
      }
    }
  }
}

TEST(tomography, chi_element_formulas) {
  FidelityEstimate f{1.0, Estimator::Kind::kExact, 0, {0, 0}};
  EXPECT_NEAR(std::abs(chi_element_tp(f, 3) - 1.0), 0.0, 1e-15);
  f = {0.25, Estimator::Kind::kExact, 0, {4, 4}};
  EXPECT_NEAR(std::abs(chi_element_tp(f, 3)), 0.0, 1e-15);

  const OperatorBasis& b = setup3().basis();
  const LossOperator id = LossOperator::identity(3);
  for (int i = 0; i < 9; ++i) {
    for (int j = 0; j < 9; ++j) {
      const FidelityEstimate g{Complex(0.3, -0.1), Estimator::Kind::kExact, 0, {i, j}};
      EXPECT_NEAR(std::abs(chi_element_ntp(g, id, i, j, b) - chi_element_tp(g, 3)), 0.0, 1e-15);
    }
  }
  const FidelityTriple ones{1.0, 1.0, 1.0};
  EXPECT_NEAR(std::abs(chi_element_bipartite(ones, LossOperator::identity(6), 0, 0, 2, 3, setup6().basis()) - 1.0),
              0.0, 1e-14);
  EXPECT_THROW(chi_element_bipartite(ones, LossOperator::identity(6), 0, 0, 2, 2, setup6().basis()),
               std::invalid_argument);
}

TEST(tomography, random_unitary_tp_mode) {
  Rng rng(43);
  const Channel ch = Channel::from_kraus({testutil::random_unitary(3, rng)});
  const ReconstructionResult r = full_reconstruct(ch, ReconstructionMode::kTp, std::nullopt, Estimator::exact());
  EXPECT_LT((r.chi_raw - kraus_to_chi(ch, setup3().basis())).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(tomography, random_channels_ntp_mode) {
  Rng rng(44);
  for (int d : {3, 6}) {
    const SeqptSetup& setup = d == 3 ? setup3() : setup6();
    const Channel ch = testutil::random_channel(d, 3, rng);
    const ReconstructionResult r = full_reconstruct(ch, setup, correct_mode(d), loss_of(ch), Estimator::exact());
    EXPECT_LT((r.chi_raw - kraus_to_chi(ch, setup.basis())).norm(), 1e-8) << d;
  }
}

TEST(tomography, reduced_fidelities_match_direct_evaluation) {
  Rng rng(45);
  const ProductDesign pd = product_design(mub_design(2), mub_design(3));
  const ComplexMatrix i2 = ComplexMatrix::Identity(2, 2);
  const ComplexMatrix i3 = ComplexMatrix::Identity(3, 3);
  std::uniform_int_distribution<int> pick(0, 35);
  for (int trial = 0; trial < 10; ++trial) {
    const Channel ch = testutil::random_channel(6, 2, rng);
    for (int k = 0; k < 6; ++k) {
      const int i = pick(rng);
      const int j = pick(rng);
      const auto [f1, f2] = reduced_fidelities(ch, i, j, setup6(), Estimator::exact());
      const Complex d1 = direct_average(ch, setup6(), i, j, [&](int s) {
        const auto [j1, m1, j2, m2] = pd.label(s);
        const ComplexVector v = pd.left.basis(j1).col(m1);
        return tensor(ComplexMatrix(v * v.adjoint()), i3);
      });
      const Complex d2 = direct_average(ch, setup6(), i, j, [&](int s) {
        const auto [j1, m1, j2, m2] = pd.label(s);
        const ComplexVector v = pd.right.basis(j2).col(m2);
        return tensor(i2, ComplexMatrix(v * v.adjoint()));
      });
      EXPECT_NEAR(std::abs(f1.value - d1), 0.0, 1e-9);
      EXPECT_NEAR(std::abs(f2.value - d2), 0.0, 1e-9);
    }
  }
}

TEST(tomography, reduced_fidelities_of_partial_depolarizer) {
  // identity on the qubit, full depolarization on the qutrit
  const OperatorBasis s3 = sylvester_basis(3);
  std::vector<ComplexMatrix> kraus;
  for (int k = 0; k < 9; ++k) kraus.push_back(tensor(ComplexMatrix::Identity(2, 2), ComplexMatrix(s3[k] / 3.0)));
  const Channel ch = Channel::from_kraus(kraus);
  const auto [f1, f2] = reduced_fidelities(ch, 0, 0, setup6(), Estimator::exact());
  EXPECT_NEAR(std::abs(f1.value - 1.0), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(f2.value - 1.0 / 3.0), 0.0, 1e-12);
  const auto [g1, g2] = reduced_fidelities(make_process(ProcessName::kId, 6, 0.0), 0, 0, setup6(), Estimator::exact());
  EXPECT_NEAR(std::abs(g1.value - 1.0), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(g2.value - 1.0), 0.0, 1e-12);
  EXPECT_THROW(reduced_fidelities(ch, 0, 0, setup3(), Estimator::exact()), std::invalid_argument);
}

TEST(tomography, four_average_relation) {
  Rng rng(46);
  const ProductDesign pd = product_design(mub_design(2), mub_design(3));
  const StateDesign& x = pd.combined;
  const double d = 6.0;
  const double d1 = 2.0;
  const double d2 = 3.0;
  for (int trial = 0; trial < 20; ++trial) {
    const ComplexMatrix a = testutil::random_matrix(6, 6, rng);
    const ComplexMatrix b = testutil::random_matrix(6, 6, rng);
    Complex full = 0.0, red1 = 0.0, red2 = 0.0;
    for (int s = 0; s < x.size(); ++s) {
      const auto [j1, m1, j2, m2] = pd.label(s);
      const ComplexMatrix p = x.pure_state(s).projector();
      const ComplexVector v1 = pd.left.basis(j1).col(m1);
      const ComplexVector v2 = pd.right.basis(j2).col(m2);
      const ComplexMatrix q1 = tensor(ComplexMatrix(v1 * v1.adjoint()), ComplexMatrix::Identity(3, 3));
      const ComplexMatrix q2 = tensor(ComplexMatrix::Identity(2, 2), ComplexMatrix(v2 * v2.adjoint()));
      full += (p * a * p * b).trace();
      red1 += (q1 * a * p * b).trace();
      red2 += (q2 * a * p * b).trace();
    }
    full /= x.size();
    red1 /= x.size();
    red2 /= x.size();
    const Complex haar = (a.trace() * b.trace() + (a * b).trace()) / (d * (d + 1.0));
    const Complex rhs = (d1 + 1.0) * (d2 + 1.0) * full + (2.0 / d) * (a * b).trace() - (d1 + 1.0) * red1 -
                        (d2 + 1.0) * red2;
    EXPECT_NEAR(std::abs((d + 1.0) * haar - rhs), 0.0, 1e-9);
  }
}

TEST(tomography, keyed_plans_reproduce_modified_inputs) {
  for (const SeqptSetup* setup : {&setup3(), &setup6()}) {
    const StateDesign& x = setup->design();
    const int n = setup->basis().size();
    const int stride = setup->dim() == 3 ? 1 : 7;
    for (int i = 0; i < n; i += stride) {
      for (int j = 0; j < n; j += stride) {
        for (int s = 0; s < x.size(); ++s) {
          const KeyedPlan plan = keyed_plan(*setup, i, j, s);
          ComplexMatrix sum = ComplexMatrix::Zero(setup->dim(), setup->dim());
          for (const KeyedTerm& t : plan.terms) {
            const ComplexVector v = circuit_preparation(t.key, x);
            sum += t.coefficient * v * v.adjoint();
          }
          const ComplexMatrix p = x.pure_state(s).projector();
          const ComplexMatrix expected = setup->basis()[i].adjoint() * p * setup->basis()[j];
          EXPECT_LT((sum - expected).norm(), 1e-10);
          EXPECT_EQ(plan.target, x.index_in_basis(s));
          for (const KeyedTerm& t : plan.terms) EXPECT_EQ(t.key.basis, x.basis_of(s));
        }
      }
    }
  }
  EXPECT_EQ(all_circuit_keys(setup3().design()).size(), 36u);
  EXPECT_EQ(all_circuit_keys(setup6().design()).size(), 432u);
}

TEST(tomography, loss_operator_of_reconstruction_matches_assumed) {
  for (const auto& [name, d] : {std::pair{ProcessName::kH01, 3}, std::pair{ProcessName::kSwap25, 6}}) {
    const Channel ch = make_process(name, d, 0.5);
    const SeqptSetup& setup = d == 3 ? setup3() : setup6();
    const LossOperator p = loss_of(ch);
    const ReconstructionResult r = full_reconstruct(ch, setup, correct_mode(d), p, Estimator::exact());
    EXPECT_LT((loss_matrix_from_chi(r.chi_raw, setup.basis()) - p.matrix).norm(), 1e-8);
  }
}

TEST(tomography, tp_mode_penalizes_lossy_channels) {
  for (const LibraryChannel& c : library()) {
    if (c.loss == 0.0) continue;
    const Channel ch = make_process(c.name, c.dim, c.loss);
    const SeqptSetup& setup = c.dim == 3 ? setup3() : setup6();
    const ComplexMatrix theo = kraus_to_chi(ch, setup.basis());
    const LossOperator p = loss_of(ch);
    const auto ntp = full_reconstruct(ch, setup, correct_mode(c.dim), p, Estimator::exact());
    const auto tp = full_reconstruct(ch, setup, ReconstructionMode::kTp, LossOperator::identity(c.dim),
                                     Estimator::exact());
    const double f_ntp = process_fidelity(theo, project_physical(ntp.chi_raw, setup.basis(), p.trace()).chi_opt);
    const double f_tp = process_fidelity(theo, project_physical(tp.chi_raw, setup.basis(), c.dim).chi_opt);
    EXPECT_LT(f_tp, f_ntp) << to_string(c.name);
  }
}

TEST(tomography, serial_and_parallel_agree_bitwise) {
  const Channel ch = make_process(ProcessName::kSwap25, 6, 0.5);
  const LossOperator p = loss_of(ch);
  for (const Estimator& est : {Estimator::exact(), Estimator::with_shots(256, 9)}) {
    const auto a = full_reconstruct(ch, setup6(), ReconstructionMode::kBipartiteNtp, p, est, Execution::kSerial);
    const auto b = full_reconstruct(ch, setup6(), ReconstructionMode::kBipartiteNtp, p, est, Execution::kParallel);
    EXPECT_TRUE(a.chi_raw == b.chi_raw);
  }
  const auto s1 = sqpt_reconstruct(ch, Estimator::with_shots(128, 2), Execution::kSerial);
  const auto s2 = sqpt_reconstruct(ch, Estimator::with_shots(128, 2), Execution::kParallel);
  EXPECT_TRUE(s1.chi_raw == s2.chi_raw);
}

TEST(tomography, shots_are_seeded) {
  const Channel ch = make_process(ProcessName::kH01, 3, 0.5);
  const LossOperator p = loss_of(ch);
  const auto a = full_reconstruct(ch, setup3(), ReconstructionMode::kNtp, p, Estimator::with_shots(100, 1));
  const auto b = full_reconstruct(ch, setup3(), ReconstructionMode::kNtp, p, Estimator::with_shots(100, 1));
  const auto c = full_reconstruct(ch, setup3(), ReconstructionMode::kNtp, p, Estimator::with_shots(100, 2));
  EXPECT_TRUE(a.chi_raw == b.chi_raw);
  EXPECT_FALSE(a.chi_raw == c.chi_raw);
}

TEST(tomography, mitigation_recovers_fidelity_under_readout_error) {
  const Channel ch = make_process(ProcessName::kH01, 3, 0.5);
  const LossOperator p = loss_of(ch);
  const ReadoutModel ro = ReadoutModel::from_register_fidelity(2, 0.85);
  const ComplexMatrix theo = kraus_to_chi(ch, setup3().basis());
  auto fid = [&](bool mitigate) {
    const auto r = full_reconstruct(ch, setup3(), ReconstructionMode::kNtp, p,
                                    Estimator::with_shots(20000, 4, ro, mitigate));
    return process_fidelity(theo, project_physical(r.chi_raw, setup3().basis(), p.trace()).chi_opt);
  };
  EXPECT_GT(fid(true), fid(false));
  EXPECT_GT(fid(true), 0.99);
}

TEST(tomography, selective_converges_to_exact_values) {
  const Channel ch = make_process(ProcessName::kH01, 3, 0.5);
  const LossOperator p = loss_of(ch);
  const ComplexMatrix theo = kraus_to_chi(ch, setup3().basis());
  SelectiveOptions opt;
  opt.elements = nonzero_elements(theo, 1e-9);
  opt.m_max = 4000;
  opt.repetitions = 8;
  opt.seed = 17;
  opt.project = false;
  const SelectiveResult r = selective_reconstruct(ch, setup3(), ReconstructionMode::kNtp, p, opt, theo);
  ASSERT_EQ(r.runs.size(), 8u);
  for (std::size_t e = 0; e < opt.elements.size(); ++e) {
    Complex mean = 0.0;
    for (const auto& run : r.runs) mean += run.elements.back()[e];
    mean /= 8.0;
    double var = 0.0;
    for (const auto& run : r.runs) var += std::norm(run.elements.back()[e] - mean);
    const double sem = std::sqrt(var / 7.0 / 8.0);
    const auto [i, j] = opt.elements[e];
    EXPECT_LT(std::abs(mean - theo(i, j)), 4.0 * sem + 1e-3) << i << "," << j;
  }
}

TEST(tomography, selective_leaves_unlisted_elements_zero) {
  const Channel ch = make_process(ProcessName::kH01, 3, 0.0);
  const ComplexMatrix theo = kraus_to_chi(ch, setup3().basis());
  SelectiveOptions opt;
  opt.elements = {{0, 0}, {0, 1}};
  opt.m_max = 50;
  opt.seed = 3;
  opt.project = false;
  const SelectiveResult r = selective_reconstruct(ch, setup3(), ReconstructionMode::kTp, LossOperator::identity(3),
                                                  opt, theo);
  const ComplexMatrix& chi = r.runs[0].chi_final;
  for (int i = 0; i < 9; ++i) {
    for (int j = 0; j < 9; ++j) {
      const bool listed = (i == 0 && j == 0) || (i == 0 && j == 1) || (i == 1 && j == 0);
      if (listed) continue;
      EXPECT_EQ(chi(i, j), Complex(0.0));
    }
  }
  EXPECT_EQ(chi(1, 0), std::conj(chi(0, 1)));
  EXPECT_EQ(r.runs[0].fidelity.size(), 50u);
  EXPECT_GT(r.runs[0].circuits_executed, 50);
}

TEST(tomography, selective_is_seeded_and_order_independent) {
  const Channel ch = make_process(ProcessName::kSwap25, 6, 0.5);
  const LossOperator p = loss_of(ch);
  const ComplexMatrix theo = kraus_to_chi(ch, setup6().basis());
  SelectiveOptions opt;
  opt.elements = nonzero_elements(theo, 1e-9);
  opt.m_max = 40;
  opt.repetitions = 2;
  opt.seed = 5;
  opt.readout = ReadoutModel::from_register_fidelity(3, 0.938);
  const auto a = selective_reconstruct(ch, setup6(), ReconstructionMode::kBipartiteNtp, p, opt, theo, Execution::kSerial);
  const auto b =
      selective_reconstruct(ch, setup6(), ReconstructionMode::kBipartiteNtp, p, opt, theo, Execution::kParallel);
  EXPECT_EQ(a.mean_fidelity, b.mean_fidelity);
  opt.iterative_mitigation = true;
  const auto c = selective_reconstruct(ch, setup6(), ReconstructionMode::kBipartiteNtp, p, opt, theo);
  EXPECT_NE(a.mean_fidelity, c.mean_fidelity);
}

TEST(tomography, selective_iterative_mitigation_helps_at_large_m) {
  const Channel ch = make_process(ProcessName::kH01, 3, 0.5);
  const LossOperator p = loss_of(ch);
  const ComplexMatrix theo = kraus_to_chi(ch, setup3().basis());
  SelectiveOptions opt;
  opt.elements = nonzero_elements(theo, 1e-9);
  opt.m_max = 3000;
  opt.repetitions = 3;
  opt.seed = 8;
  opt.readout = ReadoutModel::from_register_fidelity(2, 0.85);
  const auto raw = selective_reconstruct(ch, setup3(), ReconstructionMode::kNtp, p, opt, theo);
  opt.iterative_mitigation = true;
  const auto mit = selective_reconstruct(ch, setup3(), ReconstructionMode::kNtp, p, opt, theo);
  EXPECT_GT(mit.mean_fidelity.back(), raw.mean_fidelity.back());
}

TEST(tomography, selective_rejects_bad_options) {
  const Channel ch = make_process(ProcessName::kId, 3, 0.0);
  const ComplexMatrix theo = kraus_to_chi(ch, setup3().basis());
  SelectiveOptions opt;
  opt.m_max = 10;
  const LossOperator id = LossOperator::identity(3);
  EXPECT_THROW(selective_reconstruct(ch, setup3(), ReconstructionMode::kTp, id, opt, theo), std::invalid_argument);
  opt.elements = {{0, 81}};
  EXPECT_THROW(selective_reconstruct(ch, setup3(), ReconstructionMode::kTp, id, opt, theo), std::out_of_range);
  opt.elements = {{0, 0}};
  opt.iterative_mitigation = true;
  EXPECT_THROW(selective_reconstruct(ch, setup3(), ReconstructionMode::kTp, id, opt, theo), std::invalid_argument);
}

TEST(tomography, sqpt_agrees_with_seqpt) {
  for (const LibraryChannel& c : library()) {
    const Channel ch = make_process(c.name, c.dim, c.loss);
    const SeqptSetup& setup = c.dim == 3 ? setup3() : setup6();
    const auto seqpt = full_reconstruct(ch, setup, correct_mode(c.dim), loss_of(ch), Estimator::exact());
    const auto sqpt = sqpt_reconstruct(ch, Estimator::exact());
    EXPECT_LT((sqpt.chi_raw - seqpt.chi_raw).norm(), 1e-8) << to_string(c.name);
    EXPECT_EQ(sqpt.circuits_executed, c.dim == 3 ? 36 : 432);
    EXPECT_EQ(sqpt.basis, setup.basis().name());
  }
}

TEST(tomography, sqpt_identity_and_random_channel) {
  const auto r = sqpt_reconstruct(make_process(ProcessName::kId, 3, 0.0), Estimator::exact());
  EXPECT_NEAR(std::abs(r.chi_raw(0, 0) - 1.0), 0.0, 1e-12);
  EXPECT_NEAR(r.chi_raw.norm(), 1.0, 1e-12);
  Rng rng(47);
  const Channel ch = testutil::random_channel(5, 2, rng);
  const auto s = sqpt_reconstruct(ch, Estimator::exact());
  EXPECT_LT((s.chi_raw - kraus_to_chi(ch, sylvester_basis(5))).norm(), 1e-9);
}

TEST(tomography, setups_and_modes) {
  EXPECT_EQ(setup_for_mode(ReconstructionMode::kTp, 6).factors(), std::make_pair(2, 3));
  EXPECT_FALSE(setup_for_mode(ReconstructionMode::kTp, 3).is_bipartite());
  EXPECT_THROW(setup_for_mode(ReconstructionMode::kNtp, 6), std::invalid_argument);
  EXPECT_THROW(setup_for_mode(ReconstructionMode::kBipartiteNtp, 3), std::invalid_argument);
  EXPECT_THROW(SeqptSetup::for_dim(22), std::invalid_argument);
  EXPECT_EQ(SeqptSetup::for_dim(4).factors(), std::make_pair(2, 2));
  EXPECT_EQ(parse_mode("BIPARTITE-NTP"), ReconstructionMode::kBipartiteNtp);
  EXPECT_THROW(parse_mode("qpt"), std::invalid_argument);
  EXPECT_THROW(assumed_loss(ReconstructionMode::kNtp, std::nullopt, 3), std::invalid_argument);
  EXPECT_THROW(CircuitBank(make_process(ProcessName::kId, 3, 0.0), setup3().design(), Estimator::with_shots(0, 1)),
               std::invalid_argument);
}

TEST(tomography, composite_dimension_four) {
  const SeqptSetup s4 = SeqptSetup::for_dim(4);
  Rng rng(48);
  const Channel ch = testutil::random_channel(4, 2, rng);
  const auto r = full_reconstruct(ch, s4, ReconstructionMode::kBipartiteNtp, loss_of(ch), Estimator::exact());
  EXPECT_LT((r.chi_raw - kraus_to_chi(ch, s4.basis())).norm(), 1e-8);
}

TEST(tomography, reconstruction_json_round_trip) {
  const Channel ch = make_process(ProcessName::kH12, 3, 0.5);
  ReconstructionResult r = full_reconstruct(ch, ReconstructionMode::kNtp, loss_of(ch), Estimator::exact());
  r.fidelity_vs_true = 0.5;
  const ReconstructionResult back = reconstruction_from_json(nlohmann::json::parse(reconstruction_to_json(r).dump()));
  EXPECT_TRUE(back.chi_raw == r.chi_raw);
  EXPECT_EQ(back.mask, r.mask);
  EXPECT_EQ(back.mode, "ntp");
  EXPECT_EQ(back.circuits_executed, 36);
  EXPECT_EQ(back.fidelity_vs_true, 0.5);
}
