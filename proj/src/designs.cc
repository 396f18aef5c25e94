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

#include "seqpt/designs.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace seqpt {

StateDesign::StateDesign(int dim, std::vector<ComplexMatrix> bases, std::vector<int> factor_dims)
    : dim_(dim), bases_(std::move(bases)), factor_dims_(std::move(factor_dims)) {
  if (bases_.empty()) throw std::invalid_argument("StateDesign: no bases");
  for (const auto& b : bases_) {
    if (b.rows() != dim_ || b.cols() != dim_ || !is_unitary(b, tol::kOrthogonality)) {
      throw std::invalid_argument("StateDesign: basis is not an orthonormal d x d set");
    }
  }
  if (factor_dims_.empty()) factor_dims_ = {dim_};
}

int ProductDesign::flat(int j1, int m1, int j2, int m2) const {
  const int d2 = right.dim();
  return combined.flat(j1 * right.num_bases() + j2, m1 * d2 + m2);
}

std::array<int, 4> ProductDesign::label(int s) const {
  const int b = combined.basis_of(s);
  const int m = combined.index_in_basis(s);
  return {b / right.num_bases(), m / right.dim(), b % right.num_bases(), m % right.dim()};
}

bool is_supported_prime(int d) {
  return std::find(kSupportedPrimes.begin(), kSupportedPrimes.end(), d) != kSupportedPrimes.end();
}

StateDesign mub_design(int d) {
  if (!is_supported_prime(d)) {
    throw std::invalid_argument("mub_design: unsupported dimension " + std::to_string(d));
  }
  const double pi = std::numbers::pi;
  const double norm = 1.0 / std::sqrt(static_cast<double>(d));
  std::vector<ComplexMatrix> bases;
  bases.push_back(ComplexMatrix::Identity(d, d));
  for (int b = 0; b < d; ++b) {
    // mu_0^d omega^{b d(d-1)/2} = 1 makes the eigenvector recurrence close.
    const double mu0_angle = (d % 2 == 0) ? pi * b * (d - 1) / d : 0.0;
    ComplexMatrix basis(d, d);
    for (int big_m = 0; big_m < d; ++big_m) {
      for (int m = 0; m < d; ++m) {
        // Reduce the integer part of the exponent mod d before converting to an angle.
        const long quad = (static_cast<long>(b) * m * (m - 1) / 2 + static_cast<long>(big_m) * m) % d;
        const double angle = 2.0 * pi * static_cast<double>(quad) / d + mu0_angle * m;
        basis(m, big_m) = std::polar(norm, angle);
      }
    }
    bases.push_back(std::move(basis));
  }
  return StateDesign(d, std::move(bases));
}

ProductDesign product_design(const StateDesign& left, const StateDesign& right) {
  std::vector<ComplexMatrix> bases;
  bases.reserve(left.num_bases() * right.num_bases());
  for (int j1 = 0; j1 < left.num_bases(); ++j1) {
    for (int j2 = 0; j2 < right.num_bases(); ++j2) bases.push_back(tensor(left.basis(j1), right.basis(j2)));
  }
  StateDesign combined(left.dim() * right.dim(), std::move(bases), {left.dim(), right.dim()});
  return ProductDesign{left, right, std::move(combined)};
}

double frame_potential(const StateDesign& design) {
  const int n = design.size();
  ComplexMatrix states(design.dim(), n);
  for (int s = 0; s < n; ++s) states.col(s) = design.state(s);
  const ComplexMatrix gram = states.adjoint() * states;
  return gram.cwiseAbs2().cwiseAbs2().sum();
}

double two_design_bound(int dim, int num_states) {
  const double n = num_states;
  return 2.0 * n * n / (static_cast<double>(dim) * (dim + 1));
}

std::vector<std::vector<ClosureEntry>> closure_table(const std::vector<ComplexMatrix>& ops,
                                                     const StateDesign& design) {
  const int d = design.dim();
  std::vector<std::vector<ClosureEntry>> table(ops.size(), std::vector<ClosureEntry>(design.size()));
  for (std::size_t n = 0; n < ops.size(); ++n) {
    if (ops[n].rows() != d || ops[n].cols() != d) {
      throw std::invalid_argument("closure_table: operator/design dimension mismatch");
    }
    for (int b = 0; b < design.num_bases(); ++b) {
      // overlaps(M', M) = <psi_M'| op |psi_M>
      const ComplexMatrix overlaps = design.basis(b).adjoint() * ops[n] * design.basis(b);
      for (int m = 0; m < d; ++m) {
        Eigen::Index best = 0;
        overlaps.col(m).cwiseAbs().maxCoeff(&best);
        const Complex phase = overlaps(best, m);
        if (std::abs(std::abs(phase) - 1.0) > tol::kOrthogonality) {
          throw std::domain_error("closure_table: operator " + std::to_string(n) + " maps state (" +
                                  std::to_string(b) + "," + std::to_string(m) + ") outside its basis");
        }
        table[n][design.flat(b, m)] = {design.flat(b, static_cast<int>(best)), phase};
      }
    }
  }
  return table;
}

std::vector<std::vector<ClosureEntry>> mub_closure(const OperatorBasis& basis, const StateDesign& design) {
  if (basis.dim() != design.dim()) {
    throw std::invalid_argument("mub_closure: basis and design dimensions differ");
  }
  return closure_table(basis.elements(), design);
}

}  // namespace seqpt
