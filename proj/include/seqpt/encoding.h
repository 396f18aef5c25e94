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

#ifndef SEQPT_ENCODING_H
#define SEQPT_ENCODING_H

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include <nlohmann/json.hpp>

#include "seqpt/channels.h"
#include "seqpt/qmath.h"
#include "seqpt/rng.h"

namespace seqpt {

/// Placement of a qudit inside an n-qubit register. Register index bits are
/// q_{n-1} ... q_0, so |q1 q0> = |10> is index 2.
struct QuditEmbedding {
  int dim = 0;
  int n_qubits = 0;
  std::vector<int> index_map;     // qudit level -> register index
  std::vector<int> lost_indices;  // register indices that represent loss

  int register_size() const { return 1 << n_qubits; }
  void validate() const;
};

/// d=3: |00>,|01>,|10> = |0>,|1>,|2>, lost |11>.
/// d=6: |q2 q1 q0> with q2 the qubit factor and q1 q0 the qutrit encoding;
///      lost |011> and |111>.
QuditEmbedding product_embedding(int dim);

/// Levels 0..d-1 on indices 0..d-1 of the smallest register with room for
/// `n_lost` extra lost indices, which take the next indices in order.
QuditEmbedding compact_embedding(int dim, int n_lost);

/// product_embedding for d in {3, 6}, compact_embedding(d, 1) otherwise.
QuditEmbedding default_embedding(int dim);

/// Independent per-qubit readout errors. confusion[q](t, r) = P(report r | true t).
struct ReadoutModel {
  std::vector<Eigen::Matrix2d> confusion;

  static ReadoutModel ideal(int n_qubits);
  static ReadoutModel uniform(int n_qubits, double p_flip0, double p_flip1);
  /// Register readout fidelity F = prod_q (1 - (e0+e1)/2) with e1 = 2 e0
  /// (decay during readout makes 1 -> 0 the likelier flip).
  static ReadoutModel from_register_fidelity(int n_qubits, double fidelity);

  int n_qubits() const { return static_cast<int>(confusion.size()); }
  /// Average probability that a prepared computational state reads back correctly.
  double register_fidelity() const;
  void validate() const;
};

struct ShotRecord {
  std::map<int, std::int64_t> counts;  // register outcome -> count
  std::int64_t shots = 0;
  std::vector<int> prepared;        // (J, M) or (J1, M1, J2, M2) label
  std::vector<int> measured_basis;  // J or (J1, J2)
};

/// I_2 (+) [[cos phi, -sin phi], [sin phi, cos phi]] on |q1 q0>; reflectivity sin^2 phi.
ComplexMatrix beamsplitter_unitary(double phi);

/// Identity on `size` levels except a rotation by phi coupling levels a -> b.
ComplexMatrix two_level_rotation(int size, int a, int b, double phi);

/// Register unitary W whose block on the embedded subspace equals the single
/// Kraus operator A = U L (U unitary, L diagonal attenuation). Each attenuated
/// level is coupled to the next free lost index by a beamsplitter rotation
/// before U acts. Throws std::domain_error if A is not of that form.
ComplexMatrix encode_channel(const Channel& ch, const QuditEmbedding& emb);

ComplexVector embed_state(const ComplexVector& qudit_state, const QuditEmbedding& emb);

/// Change of basis that maps the columns of `basis` (qudit states) to the
/// embedded computational states; lost and unused indices are untouched.
ComplexMatrix measurement_unitary(const ComplexMatrix& basis, const QuditEmbedding& emb);

/// |<k| meas circuit |prep>|^2 over register outcomes k.
std::vector<double> exact_distribution(const ComplexVector& register_prep, const ComplexMatrix& circuit,
                                       const ComplexMatrix& meas);

/// Multinomial sample of `shots` outcomes from `probabilities`, then each
/// outcome passed through the readout model when one is given.
ShotRecord sample_distribution(const std::vector<double>& probabilities, std::int64_t shots,
                               const std::optional<ReadoutModel>& readout, Rng& rng);

ShotRecord simulate_shots(const ComplexVector& register_prep, const ComplexMatrix& circuit, const ComplexMatrix& meas,
                          std::int64_t shots, const std::optional<ReadoutModel>& readout, std::uint64_t seed);

/// Applies a bit-flip readout model to an exact register distribution.
std::vector<double> apply_readout(const std::vector<double>& probabilities, const ReadoutModel& readout);

/// Inverts the tensor-product confusion matrix on the empirical frequencies,
/// clips negatives to zero and renormalizes.
std::vector<double> mitigate(const ShotRecord& record, const ReadoutModel& readout);
std::vector<double> mitigate(const std::vector<double>& frequencies, const ReadoutModel& readout);

/// counts[target] / shots; lost outcomes stay in the denominator.
double survival_estimate(const ShotRecord& record, int target);

std::vector<double> frequencies(const ShotRecord& record, int register_size);

/// Register distribution folded onto qudit outcomes: entry k < d is level k,
/// entry d collects every lost or unused register index.
std::vector<double> qudit_outcomes(const std::vector<double>& register_probs, const QuditEmbedding& emb);

nlohmann::json shot_record_to_json(const ShotRecord& record);
ShotRecord shot_record_from_json(const nlohmann::json& j);

}  // namespace seqpt

#endif  // SEQPT_ENCODING_H
