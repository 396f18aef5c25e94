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

#ifndef SEQPT_QMATH_H
#define SEQPT_QMATH_H

#include <complex>
#include <cstddef>
#include <utility>

#include <Eigen/Dense>

namespace seqpt {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr Complex kI{0.0, 1.0};

// Shared numerical thresholds. Production code and tests both read these.
namespace tol {
inline constexpr double kHermitian = 1e-12;        // Hermitian-tagged storage
inline constexpr double kSymmetrize = 1e-10;       // max asymmetry eigh will silently fix
inline constexpr double kNormalization = 1e-12;    // pure-state norm
inline constexpr double kReconstruction = 1e-9;    // eigh residual (Frobenius)
inline constexpr double kSqrtResidual = 1e-8;      // sqrtm_psd residual
inline constexpr double kClipFloor = 1e-9;         // eigenvalues above -kClipFloor are clipped to 0
inline constexpr double kNegativeSpectrum = 1e-6;  // relative negativity rejected by sqrtm_psd
inline constexpr double kUnitary = 1e-10;
inline constexpr double kOrthogonality = 1e-10;
inline constexpr double kTraceCondition = 1e-9;    // sum A^dag A <= I + kTraceCondition
}  // namespace tol

/// A normalized state vector. Construction normalizes nothing: it checks.
class PureState {
 public:
  PureState() = default;
  explicit PureState(ComplexVector amplitudes);

  /// Normalizes `v` first; throws if `v` is the zero vector.
  static PureState normalized(const ComplexVector& v);
  static PureState basis(int dim, int level);

  int dim() const { return static_cast<int>(amplitudes_.size()); }
  const ComplexVector& amplitudes() const { return amplitudes_; }
  ComplexMatrix projector() const { return amplitudes_ * amplitudes_.adjoint(); }

 private:
  ComplexVector amplitudes_;
};

struct Eigensystem {
  RealVector values;      // ascending
  ComplexMatrix vectors;  // columns are eigenvectors
};

ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexVector tensor(const ComplexVector& a, const ComplexVector& b);

/// Reduced matrix of a bipartite operator on `dims`. `keep` is 1 or 2.
ComplexMatrix partial_trace(const ComplexMatrix& m, std::pair<int, int> dims, int keep);

/// Hermitian eigendecomposition. Inputs whose asymmetry is below
/// tol::kSymmetrize are symmetrized; anything larger throws.
Eigensystem eigh(const ComplexMatrix& m);

/// Principal square root of a PSD matrix. Small negative eigenvalues are clipped.
ComplexMatrix sqrtm_psd(const ComplexMatrix& m);

double max_asymmetry(const ComplexMatrix& m);
ComplexMatrix hermitian_part(const ComplexMatrix& m);
bool is_unitary(const ComplexMatrix& m, double tolerance = tol::kUnitary);

/// Clips eigenvalues at zero and rebuilds. Used for PSD projection.
ComplexMatrix psd_part(const Eigensystem& es);

}  // namespace seqpt

#endif  // SEQPT_QMATH_H
