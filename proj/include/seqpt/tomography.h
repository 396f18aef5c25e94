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

#ifndef SEQPT_TOMOGRAPHY_H
#define SEQPT_TOMOGRAPHY_H

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <initializer_list>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "seqpt/channels.h"
#include "seqpt/designs.h"
#include "seqpt/encoding.h"
#include "seqpt/opbasis.h"
#include "seqpt/physicality.h"

namespace seqpt {

/// Serial loops are the reference; the parallel path runs the same kernels
/// under OpenMP and must produce identical results.
enum class Execution { kSerial, kParallel };

enum class ReconstructionMode { kTp, kNtp, kBipartiteNtp };

std::string to_string(ReconstructionMode mode);
ReconstructionMode parse_mode(const std::string& text);

struct Estimator {
  enum class Kind { kExact, kShots };
  Kind kind = Kind::kExact;
  std::int64_t shots = 0;
  std::optional<ReadoutModel> readout;
  bool mitigate = false;
  std::uint64_t seed = 0;

  static Estimator exact() { return {}; }
  static Estimator with_shots(std::int64_t shots, std::uint64_t seed, std::optional<ReadoutModel> readout = {},
                              bool mitigate = false) {
    return {Kind::kShots, shots, std::move(readout), mitigate, seed};
  }
};

/// Basis, design and the closure of E_n^dag on the design, for one geometry.
///
/// Single-space setups pair the Sylvester basis with the MUB design in a
/// supported prime dimension. Bipartite setups use D1 x D2 product bases and
/// product designs, with D1 <= D2 both supported primes.
class SeqptSetup {
 public:
  static SeqptSetup single(int d);
  static SeqptSetup bipartite(int d1, int d2);
  /// single(d) for a supported prime, bipartite(p, d/p) otherwise.
  static SeqptSetup for_dim(int d);

  int dim() const { return basis_.dim(); }
  bool is_bipartite() const { return factors_.first > 0; }
  std::pair<int, int> factors() const { return factors_; }
  const OperatorBasis& basis() const { return basis_; }
  const StateDesign& design() const { return design_; }
  /// E_n^dag |psi_s> = phase |psi_target>
  const ClosureEntry& adjoint_action(int n, int s) const { return adjoint_closure_[n][s]; }

 private:
  SeqptSetup(OperatorBasis basis, StateDesign design, std::pair<int, int> factors);

  OperatorBasis basis_;
  StateDesign design_;
  std::pair<int, int> factors_;
  std::vector<std::vector<ClosureEntry>> adjoint_closure_;
};

/// Which state a circuit prepares inside measurement basis `basis`:
/// the basis state a, (|a> + |b>)/sqrt2, or (|a> + i|b>)/sqrt2 with a < b.
struct CircuitKey {
  enum class Kind : int { kSingle = 0, kPlus = 1, kMinus = 2 };
  int basis = 0;
  Kind kind = Kind::kSingle;
  int a = 0;
  int b = 0;

  auto operator<=>(const CircuitKey&) const = default;
};

ComplexVector circuit_preparation(const CircuitKey& key, const StateDesign& design);

/// Every circuit a design can require: per basis d states and d(d-1) superpositions.
std::vector<CircuitKey> all_circuit_keys(const StateDesign& design);

struct KeyedTerm {
  CircuitKey key;
  Complex coefficient;
};

/// E^i P_psi E^j-dag decomposition of design state s on deduplicated circuits.
/// Survival is read at outcome `target` of the measurement in the state's basis.
struct KeyedPlan {
  int target = 0;
  std::vector<KeyedTerm> terms;
};

KeyedPlan keyed_plan(const SeqptSetup& setup, int i, int j, int s);

/// Outcome distributions of the circuits. Entries 0..d-1 are the levels of
/// the measurement basis; entry d is the lost mass.
class CircuitBank {
 public:
  CircuitBank(const Channel& ch, const StateDesign& design, Estimator estimator);

  /// Computes (or samples) every key not yet present.
  void prepare(const std::vector<CircuitKey>& keys, Execution execution = Execution::kSerial);
  const std::vector<double>& distribution(const CircuitKey& key) const;

  /// Noiseless distribution over the raw outcome space (register outcomes
  /// when the channel is encodable, otherwise qudit outcomes + lost).
  std::vector<double> raw_distribution(const CircuitKey& key) const;
  /// Raw outcome -> qudit outcome (d = lost).
  const std::vector<int>& raw_to_qudit() const { return raw_to_qudit_; }
  bool encoded() const { return circuit_.has_value(); }
  const std::optional<QuditEmbedding>& embedding() const { return embedding_; }

  /// Qudit outcomes of one circuit: exact, or sampled on the stream
  /// (role, indices) when the estimator uses shots.
  std::vector<double> execute(const ComplexVector& prep, int basis, std::string_view role,
                              std::initializer_list<std::uint64_t> stream) const;

  int circuits_executed() const { return static_cast<int>(distributions_.size()); }
  std::int64_t shots_total() const;
  const Estimator& estimator() const { return estimator_; }
  const Channel& channel() const { return channel_; }

 private:
  std::vector<double> direct_distribution(const ComplexVector& prep, int basis) const;

  Channel channel_;
  const StateDesign* design_;
  Estimator estimator_;
  std::optional<QuditEmbedding> embedding_;
  std::optional<ComplexMatrix> circuit_;
  std::vector<ComplexMatrix> meas_;  // per basis, register level
  std::vector<int> raw_to_qudit_;
  std::map<CircuitKey, std::vector<double>> distributions_;
};

struct FidelityEstimate {
  Complex value;
  Estimator::Kind mode = Estimator::Kind::kExact;
  std::int64_t shots_used = 0;
  std::pair<int, int> element{0, 0};
};

/// Design-averaged survival through the modified channel E_j^i, and for
/// bipartite setups the two reduced averages read from the same records by
/// ignoring the complementary subsystem's outcome.
struct FidelityTriple {
  Complex full;
  Complex reduced1;
  Complex reduced2;
};

FidelityTriple design_fidelities(const SeqptSetup& setup, const CircuitBank& bank, int i, int j);

/// (1/N) sum_m Tr[P_psi_m E(E^i P_psi_m E_j)].
FidelityEstimate avg_fidelity(const Channel& ch, int i, int j, const SeqptSetup& setup, const Estimator& estimator);

/// (F1, F2) of the bipartite protocol.
std::pair<FidelityEstimate, FidelityEstimate> reduced_fidelities(const Channel& ch, int i, int j,
                                                                 const SeqptSetup& setup, const Estimator& estimator);

/// chi_j^i = F (d+1)/d - delta_ij / d
Complex chi_element_tp(const FidelityEstimate& fid, int d);

/// chi_j^i = (d(d+1) F - Tr[P E_i^dag E_j]) / d^2
Complex chi_element_ntp(const FidelityEstimate& fid, const LossOperator& p, int i, int j, const OperatorBasis& basis);

/// chi = F_x (1+D1)(1+D2)/d + Tr[P E^i E_j]/d^2 - F_1 (1+D1)/d - F_2 (1+D2)/d
Complex chi_element_bipartite(const FidelityTriple& fids, const LossOperator& p, int i, int j, int d1, int d2,
                              const OperatorBasis& basis);

struct ReconstructionResult {
  int dim = 0;
  std::string mode;
  std::string basis;
  ComplexMatrix chi_raw;
  std::vector<std::pair<int, int>> mask;
  int circuits_executed = 0;
  std::int64_t shots_total = 0;
  std::optional<double> fidelity_vs_true;
};

nlohmann::json reconstruction_to_json(const ReconstructionResult& r);
ReconstructionResult reconstruction_from_json(const nlohmann::json& j);

/// Loss operator the mode assumes: identity for kTp, `p` otherwise.
LossOperator assumed_loss(ReconstructionMode mode, const std::optional<LossOperator>& p, int dim);

/// Geometry for a mode: kBipartiteNtp forces the product design; kNtp needs a
/// supported prime; kTp follows SeqptSetup::for_dim.
SeqptSetup setup_for_mode(ReconstructionMode mode, int dim);

/// Estimates every chi element. Circuits are deduplicated by CircuitKey, so
/// circuits_executed counts distinct circuits.
ReconstructionResult full_reconstruct(const Channel& ch, ReconstructionMode mode, const std::optional<LossOperator>& p,
                                      const Estimator& estimator, Execution execution = Execution::kSerial);

/// Same as above on a prebuilt setup.
ReconstructionResult full_reconstruct(const Channel& ch, const SeqptSetup& setup, ReconstructionMode mode,
                                      const LossOperator& p, const Estimator& estimator,
                                      Execution execution = Execution::kSerial);

struct SelectiveOptions {
  std::vector<std::pair<int, int>> elements;
  int m_max = 0;
  int repetitions = 1;
  std::uint64_t seed = 0;
  std::optional<ReadoutModel> readout;
  /// Accumulate per-circuit histograms and mitigate them at every step.
  bool iterative_mitigation = false;
  /// Physicality projection before scoring each step.
  bool project = true;
  ProjectionOptions projection{};
};

struct SelectiveRun {
  std::vector<double> fidelity;                 // per step m = 1..m_max
  std::vector<std::vector<Complex>> elements;   // [m][element] raw estimates
  ComplexMatrix chi_final;                      // projected (if enabled) after m_max
  std::int64_t circuits_executed = 0;           // single-shot executions
};

struct SelectiveResult {
  std::vector<SelectiveRun> runs;
  std::vector<double> mean_fidelity;
};

/// Nonzero entries of chi (|chi_ij| > threshold).
std::vector<std::pair<int, int>> nonzero_elements(const ComplexMatrix& chi, double threshold = 1e-12);

/// Selective sampling: at every step and for every listed element, one design
/// state is drawn uniformly and each circuit in its plan runs once. Running
/// means give chi for the listed elements; all others stay zero. The estimate
/// is projected and scored against `reference` after every step.
SelectiveResult selective_reconstruct(const Channel& ch, const SeqptSetup& setup, ReconstructionMode mode,
                                      const LossOperator& p, const SelectiveOptions& options,
                                      const ComplexMatrix& reference, Execution execution = Execution::kSerial);

/// Standard process tomography by linear inversion: d^2 inputs |k>,
/// (|k>+|k'>)/sqrt2, (|k>+i|k'>)/sqrt2, each output reconstructed from its
/// projections on every design state. Throws std::domain_error when the
/// state-tomography inversion has condition number above 1e8.
ReconstructionResult sqpt_reconstruct(const Channel& ch, const Estimator& estimator,
                                      Execution execution = Execution::kSerial);

}  // namespace seqpt

#endif  // SEQPT_TOMOGRAPHY_H
