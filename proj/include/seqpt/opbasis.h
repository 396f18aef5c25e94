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

#ifndef SEQPT_OPBASIS_H
#define SEQPT_OPBASIS_H

#include <string>
#include <vector>

#include "seqpt/qmath.h"

namespace seqpt {

/// Ordered set of d^2 unitary, trace-orthogonal operators with
/// Tr[E_j^dag E_i] = d * delta_ij and element 0 equal to the identity.
///
/// Single-space Sylvester bases use the flat index n = k*d + l for E_{kl}.
/// Product bases use n = n1 * D2^2 + n2, which fixes the chi row/column order.
class OperatorBasis {
 public:
  OperatorBasis(int dim, std::vector<ComplexMatrix> elements, std::string name,
                std::vector<int> factor_dims = {});

  int dim() const { return dim_; }
  int size() const { return static_cast<int>(elements_.size()); }
  const ComplexMatrix& operator[](int n) const { return elements_[n]; }
  const std::vector<ComplexMatrix>& elements() const { return elements_; }
  const std::string& name() const { return name_; }
  /// Subsystem dimensions for product bases; {dim} otherwise.
  const std::vector<int>& factor_dims() const { return factor_dims_; }
  bool is_product() const { return factor_dims_.size() > 1; }

  /// Worst deviation from E E^dag = I over all elements.
  double unitarity_error() const;
  /// Worst deviation from Tr[E_j^dag E_i] = d delta_ij over all pairs.
  double orthogonality_error() const;

 private:
  int dim_;
  std::vector<ComplexMatrix> elements_;
  std::string name_;
  std::vector<int> factor_dims_;
};

/// E_{kl} = sum_m omega^{m l} |m + k mod d><m|, omega = exp(2 pi i / d).
OperatorBasis sylvester_basis(int d);

/// Elements E_{j1} (x) E_{j2}, flat index j1 * D2^2 + j2.
OperatorBasis product_basis(const OperatorBasis& b1, const OperatorBasis& b2);

/// Coefficients c_i = Tr[E_i^dag a] / d, so that sum_i c_i E_i = a.
ComplexVector expand_operator(const ComplexMatrix& a, const OperatorBasis& basis);

ComplexMatrix reconstruct_operator(const ComplexVector& coefficients, const OperatorBasis& basis);

}  // namespace seqpt

#endif  // SEQPT_OPBASIS_H
