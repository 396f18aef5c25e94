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

#include "seqpt/qmath.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace seqpt {

PureState::PureState(ComplexVector amplitudes) : amplitudes_(std::move(amplitudes)) {
  if (amplitudes_.size() == 0) {
    throw std::invalid_argument("PureState: empty amplitude vector");
  }
  const double norm2 = amplitudes_.squaredNorm();
  if (std::abs(norm2 - 1.0) > tol::kNormalization) {
    throw std::invalid_argument("PureState: squared norm " + std::to_string(norm2) + " != 1");
  }
}

PureState PureState::normalized(const ComplexVector& v) {
  const double n = v.norm();
  if (n == 0.0) {
    throw std::invalid_argument("PureState::normalized: zero vector");
  }
  return PureState(v / n);
}

PureState PureState::basis(int dim, int level) {
  if (level < 0 || level >= dim) {
    throw std::out_of_range("PureState::basis: level out of range");
  }
  ComplexVector v = ComplexVector::Zero(dim);
  v(level) = 1.0;
  return PureState(std::move(v));
}

ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

ComplexVector tensor(const ComplexVector& a, const ComplexVector& b) {
  ComplexVector out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    out.segment(i * b.size(), b.size()) = a(i) * b;
  }
  return out;
}

ComplexMatrix partial_trace(const ComplexMatrix& m, std::pair<int, int> dims, int keep) {
  const auto [d1, d2] = dims;
  if (d1 <= 0 || d2 <= 0 || m.rows() != m.cols() || m.rows() != d1 * d2) {
    throw std::invalid_argument("partial_trace: matrix is not square of size D1*D2");
  }
  if (keep != 1 && keep != 2) {
    throw std::invalid_argument("partial_trace: keep must be 1 or 2");
  }
  if (keep == 1) {
    ComplexMatrix out = ComplexMatrix::Zero(d1, d1);
    for (int a = 0; a < d1; ++a) {
      for (int b = 0; b < d1; ++b) {
        Complex s = 0.0;
        for (int k = 0; k < d2; ++k) s += m(a * d2 + k, b * d2 + k);
        out(a, b) = s;
      }
    }
    return out;
  }
  ComplexMatrix out = ComplexMatrix::Zero(d2, d2);
  for (int a = 0; a < d2; ++a) {
    for (int b = 0; b < d2; ++b) {
      Complex s = 0.0;
      for (int k = 0; k < d1; ++k) s += m(k * d2 + a, k * d2 + b);
      out(a, b) = s;
    }
  }
  return out;
}

double max_asymmetry(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) return INFINITY;
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

ComplexMatrix hermitian_part(const ComplexMatrix& m) { return 0.5 * (m + m.adjoint()); }

bool is_unitary(const ComplexMatrix& m, double tolerance) {
  if (m.rows() != m.cols()) return false;
  const ComplexMatrix id = ComplexMatrix::Identity(m.rows(), m.cols());
  return (m * m.adjoint() - id).cwiseAbs().maxCoeff() <= tolerance;
}

Eigensystem eigh(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) {
    throw std::invalid_argument("eigh: matrix is not square");
  }
  const double asym = max_asymmetry(m);
  if (asym > tol::kSymmetrize) {
    throw std::invalid_argument("eigh: matrix is not Hermitian (asymmetry " + std::to_string(asym) + ")");
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(hermitian_part(m));
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("eigh: eigensolver did not converge");
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

ComplexMatrix psd_part(const Eigensystem& es) {
  const RealVector clipped = es.values.cwiseMax(0.0);
  return es.vectors * clipped.asDiagonal() * es.vectors.adjoint();
}

ComplexMatrix sqrtm_psd(const ComplexMatrix& m) {
  const Eigensystem es = eigh(m);
  const double top = std::max(es.values.maxCoeff(), 0.0);
  const double bottom = es.values.minCoeff();
  if (bottom < -tol::kClipFloor && bottom < -tol::kNegativeSpectrum * top) {
    throw std::domain_error("sqrtm_psd: significantly negative spectrum (min eigenvalue " +
                            std::to_string(bottom) + ")");
  }
  RealVector roots = es.values.cwiseMax(0.0).cwiseSqrt();
  return es.vectors * roots.asDiagonal() * es.vectors.adjoint();
}

}  // namespace seqpt
