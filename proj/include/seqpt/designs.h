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

#ifndef SEQPT_DESIGNS_H
#define SEQPT_DESIGNS_H

#include <array>
#include <vector>

#include "seqpt/opbasis.h"
#include "seqpt/qmath.h"

namespace seqpt {

/// A uniform state design built from orthonormal bases.
///
/// State flat index s = basis * dim + M, where `basis` is the measurement
/// basis label and M the position inside it. Each basis is stored as a
/// unitary matrix whose columns are the states. For a single-space MUB design
/// the basis label is J (0..d). Product designs label basis pairs as
/// J1 * (D2 + 1) + J2 and in-basis states as M1 * D2 + M2.
class StateDesign {
 public:
  StateDesign(int dim, std::vector<ComplexMatrix> bases, std::vector<int> factor_dims = {});

  int dim() const { return dim_; }
  int num_bases() const { return static_cast<int>(bases_.size()); }
  int size() const { return num_bases() * dim_; }
  double weight() const { return 1.0 / size(); }

  const ComplexMatrix& basis(int b) const { return bases_[b]; }
  ComplexVector state(int s) const { return bases_[s / dim_].col(s % dim_); }
  PureState pure_state(int s) const { return PureState(state(s)); }
  int basis_of(int s) const { return s / dim_; }
  int index_in_basis(int s) const { return s % dim_; }
  int flat(int basis, int m) const { return basis * dim_ + m; }

  const std::vector<int>& factor_dims() const { return factor_dims_; }
  bool is_product() const { return factor_dims_.size() == 2; }

 private:
  int dim_;
  std::vector<ComplexMatrix> bases_;
  std::vector<int> factor_dims_;
};

/// Tensor-product design X1 (x) X2 with (J1, M1, J2, M2) addressing.
struct ProductDesign {
  StateDesign left;
  StateDesign right;
  StateDesign combined;

  int flat(int j1, int m1, int j2, int m2) const;
  std::array<int, 4> label(int s) const;  // {J1, M1, J2, M2}
};

/// Primes for which mub_design is available.
inline constexpr std::array<int, 4> kSupportedPrimes{2, 3, 5, 7};
bool is_supported_prime(int d);

/// Complete set of d+1 mutually unbiased bases for a supported prime d.
///
/// Basis J=0 is the computational basis (joint eigenbasis of E_{0l}); basis
/// J = 1 + b is the eigenbasis of the abelian set generated by E_{1b}. Its
/// states are |psi_M> = d^{-1/2} sum_m mu_M^m omega^{b m(m-1)/2} |m>, with
/// mu_M = mu_0 omega^M, which reproduces the Fourier order for J=1.
StateDesign mub_design(int d);

ProductDesign product_design(const StateDesign& left, const StateDesign& right);

/// sum_{m,n} |<psi_m|psi_n>|^4
double frame_potential(const StateDesign& design);

/// Value the frame potential takes on a uniform 2-design: 2 N^2 / (d (d+1)).
double two_design_bound(int dim, int num_states);

struct ClosureEntry {
  int target = 0;     // flat index of the image state
  Complex phase{1.0};  // op |psi_s> = phase |psi_target>
};

/// table[n][s]: action of ops[n] on design state s, resolved inside the
/// state's own basis. Throws std::domain_error if some image leaves its basis.
std::vector<std::vector<ClosureEntry>> closure_table(const std::vector<ComplexMatrix>& ops,
                                                     const StateDesign& design);

/// Closure of a Sylvester-type basis on a design: E_n |psi_M^J> = phase |psi_M'^J>.
std::vector<std::vector<ClosureEntry>> mub_closure(const OperatorBasis& basis, const StateDesign& design);

}  // namespace seqpt

#endif  // SEQPT_DESIGNS_H
