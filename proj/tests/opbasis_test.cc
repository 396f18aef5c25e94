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

#include <gtest/gtest.h>

#include <numbers>

#include "test_util.h"

using namespace seqpt;

TEST(opbasis, sylvester_is_unitary_and_orthogonal) {
  for (int d : {2, 3, 4, 5, 6, 7}) {
    const OperatorBasis b = sylvester_basis(d);
    EXPECT_EQ(b.size(), d * d);
    EXPECT_LT(b.unitarity_error(), tol::kUnitary) << d;
    EXPECT_LT(b.orthogonality_error(), tol::kOrthogonality) << d;
    EXPECT_LT((b[0] - ComplexMatrix::Identity(d, d)).norm(), 1e-15);
    EXPECT_FALSE(b.is_product());
  }
}

TEST(opbasis, sylvester_entries_match_shift_clock) {
  const int d = 3;
  const OperatorBasis b = sylvester_basis(d);
  // X |m> = |m+1>, Z |m> = w^m |m>; E_kl = X^k Z^l.
  ComplexMatrix x = ComplexMatrix::Zero(d, d);
  ComplexMatrix z = ComplexMatrix::Zero(d, d);
  for (int m = 0; m < d; ++m) {
    x((m + 1) % d, m) = 1.0;
    z(m, m) = std::polar(1.0, 2.0 * std::numbers::pi * m / d);
  }
  for (int k = 0; k < d; ++k) {
    for (int l = 0; l < d; ++l) {
      ComplexMatrix e = ComplexMatrix::Identity(d, d);
      for (int r = 0; r < k; ++r) e = x * e;
      ComplexMatrix zl = ComplexMatrix::Identity(d, d);
      for (int r = 0; r < l; ++r) zl = z * zl;
      EXPECT_LT((b[k * d + l] - e * zl).norm(), 1e-12) << k << l;
    }
  }
}

TEST(opbasis, qubit_case_is_pauli_up_to_phase) {
  const OperatorBasis b = sylvester_basis(2);
  ComplexMatrix x(2, 2), z(2, 2);
  x << 0, 1, 1, 0;
  z << 1, 0, 0, -1;
  EXPECT_LT((b[1] - z).norm(), 1e-15);
  EXPECT_LT((b[2] - x).norm(), 1e-15);
  EXPECT_LT((b[3] - x * z).norm(), 1e-15);
}

TEST(opbasis, product_basis_index_order) {
  const OperatorBasis b1 = sylvester_basis(2);
  const OperatorBasis b2 = sylvester_basis(3);
  const OperatorBasis p = product_basis(b1, b2);
  EXPECT_EQ(p.dim(), 6);
  EXPECT_EQ(p.size(), 36);
  EXPECT_TRUE(p.is_product());
  EXPECT_EQ(p.factor_dims(), (std::vector<int>{2, 3}));
  for (int j1 = 0; j1 < 4; ++j1)
    for (int j2 = 0; j2 < 9; ++j2) EXPECT_LT((p[j1 * 9 + j2] - tensor(b1[j1], b2[j2])).norm(), 1e-15);
  EXPECT_LT(p.orthogonality_error(), tol::kOrthogonality);
}

TEST(opbasis, expand_reconstruct_round_trip) {
  Rng rng(7);
  for (int d : {3, 6}) {
    const OperatorBasis b = d == 6 ? product_basis(sylvester_basis(2), sylvester_basis(3)) : sylvester_basis(d);
    const ComplexMatrix a = testutil::random_matrix(d, d, rng);
    const ComplexVector c = expand_operator(a, b);
    EXPECT_LT((reconstruct_operator(c, b) - a).norm(), 1e-12);
  }
  const ComplexVector c = expand_operator(ComplexMatrix::Identity(3, 3), sylvester_basis(3));
  EXPECT_NEAR(std::abs(c(0) - 1.0), 0.0, 1e-15);
  EXPECT_NEAR(c.tail(8).norm(), 0.0, 1e-15);
}

TEST(opbasis, rejects_bad_input) {
  EXPECT_THROW(sylvester_basis(1), std::invalid_argument);
  EXPECT_THROW(expand_operator(ComplexMatrix::Identity(2, 2), sylvester_basis(3)), std::invalid_argument);
  EXPECT_THROW(OperatorBasis(2, {ComplexMatrix::Identity(2, 2)}, "short"), std::invalid_argument);
}
