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

#ifndef SEQPT_CHANNELS_H
#define SEQPT_CHANNELS_H

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "seqpt/opbasis.h"
#include "seqpt/qmath.h"

namespace seqpt {

/// A quantum process in Kraus form, chi form, or both.
///
/// chi is stored with rows indexed by i and columns by j, so that
/// E(rho) = sum_ij chi(i, j) E_i rho E_j^dag relative to `chi_basis`.
class Channel {
 public:
  static Channel from_kraus(std::vector<ComplexMatrix> kraus);
  static Channel from_chi(ComplexMatrix chi, const OperatorBasis& basis);

  int dim() const { return dim_; }
  bool has_kraus() const { return !kraus_.empty(); }
  bool has_chi() const { return chi_.has_value(); }
  const std::vector<ComplexMatrix>& kraus() const { return kraus_; }
  const ComplexMatrix& chi() const;
  const std::string& chi_basis_name() const { return chi_basis_name_; }

  /// Attaches the chi matrix computed from the Kraus form.
  Channel with_chi(const OperatorBasis& basis) const;

 private:
  int dim_ = 0;
  std::vector<ComplexMatrix> kraus_;
  std::optional<ComplexMatrix> chi_;
  std::string chi_basis_name_;
};

/// P = sum_k A_k^dag A_k; Tr[E(rho)] = Tr[P rho].
struct LossOperator {
  ComplexMatrix matrix;
  RealVector eigenvalues;  // ascending

  static LossOperator from_matrix(ComplexMatrix p);
  static LossOperator identity(int dim);
  int dim() const { return static_cast<int>(matrix.rows()); }
  double trace() const { return matrix.trace().real(); }
};

/// sum_k A_k rho A_k^dag
ComplexMatrix apply(const Channel& ch, const ComplexMatrix& rho);

/// sum_ij chi(i, j) E_i rho E_j^dag
ComplexMatrix apply_chi(const ComplexMatrix& chi, const OperatorBasis& basis, const ComplexMatrix& rho);

/// chi = sum_k c_k c_k^dag with c_k = expand_operator(A_k, basis).
ComplexMatrix kraus_to_chi(const Channel& ch, const OperatorBasis& basis);

/// P from the Kraus form when present, otherwise sum_ij chi(i,j) E_j^dag E_i.
LossOperator loss_operator(const Channel& ch, const OperatorBasis& basis);

/// sum_ij chi(i,j) E_j^dag E_i for an arbitrary (possibly unphysical) chi.
ComplexMatrix loss_matrix_from_chi(const ComplexMatrix& chi, const OperatorBasis& basis);

/// Worst violation of sum_k A_k^dag A_k <= I (max eigenvalue minus 1, or <= 0).
double trace_condition_excess(const Channel& ch);

struct PlanTerm {
  Complex coefficient;
  PureState state;
};

/// Linear combination of pure-state projectors equal to E^i P_psi E_j
/// (E^i = E_i^dag). Holds at most four terms.
struct ModifiedChannelPlan {
  int i = 0;
  int j = 0;
  std::vector<PlanTerm> terms;

  ComplexMatrix operator_sum() const;
};

/// Proportionality threshold on |<alpha|beta>|.
inline constexpr double kProportionalOverlap = 1.0 - 1e-9;

/// Decomposes |alpha><beta| with alpha = E_i^dag psi, beta = E_j^dag psi.
///
/// For orthonormal alpha, beta:
///   |alpha><beta| = P_+ + i P_- - (1+i)/2 (P_alpha + P_beta),
///   |+> = (alpha + beta)/sqrt2, |-> = (alpha + i beta)/sqrt2.
/// The same identity holds for any pair once each of P_+ and P_- is written
/// as (squared norm) x (normalized projector); that is the oblique branch.
ModifiedChannelPlan modified_channel_plan(int i, int j, const PureState& psi, const OperatorBasis& basis);

/// Same decomposition for an explicit pair (alpha, beta).
std::vector<PlanTerm> outer_product_terms(const ComplexVector& alpha, const ComplexVector& beta);

enum class ProcessName { kId, kH01, kH12, kPhase, kSwap25 };

ProcessName parse_process_name(std::string_view name);
std::string to_string(ProcessName name);

/// Single-Kraus test processes in d = 3 (ID, H01, H12) and d = 6 (ID, PHASE,
/// SWAP25), plus ID in any dimension with loss on the top level. `loss` in [0, 1] is the reflectivity r of the beamsplitter on the
/// designated levels: their amplitude becomes sqrt(1 - r).
Channel make_process(ProcessName name, int dim, double loss);

/// Levels whose amplitude is attenuated by the loss for this process.
std::vector<int> loss_levels(ProcessName name, int dim);

nlohmann::json matrix_to_json(const ComplexMatrix& m);  // {"real": [[..]], "imag": [[..]]}
ComplexMatrix matrix_from_json(const nlohmann::json& j);

/// { dim, basis, kraus: [{real, imag}], chi_real, chi_imag }
nlohmann::json channel_to_json(const Channel& ch);
Channel channel_from_json(const nlohmann::json& j, const OperatorBasis& basis);

}  // namespace seqpt

#endif  // SEQPT_CHANNELS_H
