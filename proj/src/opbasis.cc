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

#include "seqpt/opbasis.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace seqpt {

OperatorBasis::OperatorBasis(int dim, std::vector<ComplexMatrix> elements, std::string name,
                             std::vector<int> factor_dims)
    : dim_(dim), elements_(std::move(elements)), name_(std::move(name)), factor_dims_(std::move(factor_dims)) {
  if (dim_ < 1 || static_cast<int>(elements_.size()) != dim_ * dim_) {
    throw std::invalid_argument("OperatorBasis: expected d^2 elements");
  }
  for (const auto& e : elements_) {
    if (e.rows() != dim_ || e.cols() != dim_) {
      throw std::invalid_argument("OperatorBasis: element has wrong shape");
    }
  }
  if (factor_dims_.empty()) factor_dims_ = {dim_};
}

double OperatorBasis::unitarity_error() const {
  double worst = 0.0;
  const ComplexMatrix id = ComplexMatrix::Identity(dim_, dim_);
  for (const auto& e : elements_) {
    worst = std::max(worst, (e * e.adjoint() - id).cwiseAbs().maxCoeff());
  }
  return worst;
}

double OperatorBasis::orthogonality_error() const {
  double worst = 0.0;
  for (int i = 0; i < size(); ++i) {
    for (int j = 0; j < size(); ++j) {
      const Complex t = (elements_[j].adjoint() * elements_[i]).trace();
      const double expected = (i == j) ? dim_ : 0.0;
      worst = std::max(worst, std::abs(t - expected));
    }
  }
  return worst;
}

OperatorBasis sylvester_basis(int d) {
  if (d < 2) {
    throw std::invalid_argument("sylvester_basis: d must be >= 2");
  }
  // omega^p tabulated once from the angle, not by repeated multiplication.
  std::vector<Complex> powers(d);
  for (int p = 0; p < d; ++p) powers[p] = std::polar(1.0, 2.0 * std::numbers::pi * p / d);

  std::vector<ComplexMatrix> elements;
  elements.reserve(d * d);
  for (int k = 0; k < d; ++k) {
    for (int l = 0; l < d; ++l) {
      ComplexMatrix e = ComplexMatrix::Zero(d, d);
      for (int m = 0; m < d; ++m) e((m + k) % d, m) = powers[(m * l) % d];
      elements.push_back(std::move(e));
    }
  }
  return OperatorBasis(d, std::move(elements), "sylvester");
}

OperatorBasis product_basis(const OperatorBasis& b1, const OperatorBasis& b2) {
  std::vector<ComplexMatrix> elements;
  elements.reserve(b1.size() * b2.size());
  for (int j1 = 0; j1 < b1.size(); ++j1) {
    for (int j2 = 0; j2 < b2.size(); ++j2) elements.push_back(tensor(b1[j1], b2[j2]));
  }
  std::vector<int> dims = b1.factor_dims();
  dims.insert(dims.end(), b2.factor_dims().begin(), b2.factor_dims().end());
  return OperatorBasis(b1.dim() * b2.dim(), std::move(elements), b1.name() + "(x)" + b2.name(), std::move(dims));
}

ComplexVector expand_operator(const ComplexMatrix& a, const OperatorBasis& basis) {
  if (a.rows() != basis.dim() || a.cols() != basis.dim()) {
    throw std::invalid_argument("expand_operator: dimension mismatch");
  }
  ComplexVector c(basis.size());
  for (int i = 0; i < basis.size(); ++i) {
    // Tr[E^dag a] = sum_{rc} conj(E_rc) a_rc
    c(i) = basis[i].cwiseProduct(a.conjugate()).sum();
    c(i) = std::conj(c(i)) / static_cast<double>(basis.dim());
  }
  return c;
}

ComplexMatrix reconstruct_operator(const ComplexVector& coefficients, const OperatorBasis& basis) {
  if (coefficients.size() != basis.size()) {
    throw std::invalid_argument("reconstruct_operator: coefficient count mismatch");
  }
  ComplexMatrix out = ComplexMatrix::Zero(basis.dim(), basis.dim());
  for (int i = 0; i < basis.size(); ++i) out += coefficients(i) * basis[i];
  return out;
}

}  // namespace seqpt
