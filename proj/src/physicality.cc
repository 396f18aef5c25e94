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

#include "seqpt/physicality.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace seqpt {

namespace {

// A(i, j) = conj(Tr[E_j^dag E_i]), so that trace_functional(chi) = <A, chi>.
ComplexMatrix functional_normal(const OperatorBasis& basis) {
  const int n = basis.size();
  const int d = basis.dim();
  ComplexMatrix v(d * d, n);
  for (int k = 0; k < n; ++k) v.col(k) = basis[k].reshaped();
  ComplexMatrix gram = v.adjoint() * v;  // gram(j, i) = Tr[E_j^dag E_i]
  return gram.transpose().conjugate();
}

double frobenius_inner(const ComplexMatrix& a, const ComplexMatrix& b) {
  return (a.adjoint() * b).trace().real();
}

struct AffineSet {
  ComplexMatrix normal;
  double norm2;
  double target;

  double value(const ComplexMatrix& chi) const { return frobenius_inner(normal, chi); }
  ComplexMatrix project(const ComplexMatrix& chi) const {
    return chi + ((target - value(chi)) / norm2) * normal;
  }
};

ProjectionReport matrix_dykstra(const ComplexMatrix& start, const AffineSet& affine,
                                const ProjectionOptions& options) {
  const int n = static_cast<int>(start.rows());
  ComplexMatrix x = start;
  ComplexMatrix y = start;
  ComplexMatrix p = ComplexMatrix::Zero(n, n);
  ComplexMatrix q = ComplexMatrix::Zero(n, n);
  ProjectionReport report;
  for (int it = 1; it <= options.max_iter; ++it) {
    ComplexMatrix xp = x + p;
    y = psd_part(eigh(hermitian_part(xp)));
    p = xp - y;
    ComplexMatrix yq = y + q;
    ComplexMatrix x_new = affine.project(yq);
    q = yq - x_new;
    report.final_residual = std::max((x_new - x).norm(), (y - x_new).norm());
    x = std::move(x_new);
    report.iterations = it;
    if (report.final_residual < options.tol) {
      report.converged = true;
      break;
    }
  }
  report.chi_opt = hermitian_part(y);
  return report;
}

// Both projections act on eigenvalues only when the affine normal is a
// multiple of the identity, so Dykstra runs on the spectrum of chi_raw.
ProjectionReport spectral_dykstra(const ComplexMatrix& start, double scale, double target,
                                  const ProjectionOptions& options) {
  const Eigensystem es = eigh(start);
  const int n = static_cast<int>(es.values.size());
  const double shift_target = target / scale;  // required sum of eigenvalues
  RealVector x = es.values;
  RealVector y = x;
  RealVector p = RealVector::Zero(n);
  RealVector q = RealVector::Zero(n);
  ProjectionReport report;
  for (int it = 1; it <= options.max_iter; ++it) {
    RealVector xp = x + p;
    y = xp.cwiseMax(0.0);
    p = xp - y;
    RealVector yq = y + q;
    RealVector x_new = yq.array() + (shift_target - yq.sum()) / n;
    q = yq - x_new;
    report.final_residual = std::max((x_new - x).norm(), (y - x_new).norm());
    x = std::move(x_new);
    report.iterations = it;
    if (report.final_residual < options.tol) {
      report.converged = true;
      break;
    }
  }
  report.chi_opt = es.vectors * y.cast<Complex>().asDiagonal() * es.vectors.adjoint();
  report.chi_opt = hermitian_part(report.chi_opt);
  return report;
}

}  // namespace

double trace_functional(const ComplexMatrix& chi, const OperatorBasis& basis) {
  return frobenius_inner(functional_normal(basis), chi);
}

ProjectionReport project_physical(const ComplexMatrix& chi_raw, const OperatorBasis& basis, double trace_target,
                                  const ProjectionOptions& options) {
  const int n = basis.size();
  if (chi_raw.rows() != n || chi_raw.cols() != n) throw std::invalid_argument("project_physical: shape mismatch");
  const double d = basis.dim();
  if (!(trace_target >= 0.0) || trace_target > d * (1.0 + tol::kTraceCondition)) {
    throw std::invalid_argument("project_physical: trace_target must lie in [0, d]");
  }
  if (options.max_iter <= 0 || !(options.tol > 0.0)) throw std::invalid_argument("project_physical: bad options");

  const ComplexMatrix start = hermitian_part(chi_raw);
  const ComplexMatrix normal = functional_normal(basis);
  const Complex scale = normal.trace() / static_cast<double>(n);
  const bool diagonal_normal =
      (normal - scale * ComplexMatrix::Identity(n, n)).norm() < tol::kOrthogonality * normal.norm() &&
      std::abs(scale.imag()) < tol::kOrthogonality * std::abs(scale);

  bool spectral = false;
  switch (options.method) {
    case ProjectionOptions::Method::kAuto: spectral = diagonal_normal; break;
    case ProjectionOptions::Method::kSpectral:
      if (!diagonal_normal) throw std::invalid_argument("project_physical: spectral method needs an orthogonal basis");
      spectral = true;
      break;
    case ProjectionOptions::Method::kMatrix: spectral = false; break;
  }

  AffineSet affine{normal, normal.squaredNorm(), trace_target};
  ProjectionReport report = spectral ? spectral_dykstra(start, scale.real(), trace_target, options)
                                     : matrix_dykstra(start, affine, options);
  report.constraint_gap = std::abs(affine.value(report.chi_opt) - trace_target);
  report.min_eigenvalue = eigh(report.chi_opt).values(0);
  return report;
}

double process_fidelity_with_root(const ComplexMatrix& sqrt_a, double trace_a, const ComplexMatrix& chi_b) {
  const double trace_b = chi_b.trace().real();
  if (!(trace_a > 0.0) || !(trace_b > 0.0)) throw std::domain_error("process_fidelity: zero trace");
  const ComplexMatrix m = sqrt_a * hermitian_part(chi_b) * sqrt_a;
  const Eigensystem es = eigh(hermitian_part(m));
  // rounding-level eigenvalues count as zero
  const double floor = es.values.size() * std::numeric_limits<double>::epsilon() *
                       std::max(es.values.cwiseAbs().maxCoeff(), 0.0);
  double root_sum = 0.0;
  for (int k = 0; k < es.values.size(); ++k) {
    if (es.values(k) > floor) root_sum += std::sqrt(es.values(k));
  }
  return root_sum / std::sqrt(trace_a * trace_b);
}

double process_fidelity(const ComplexMatrix& chi_a, const ComplexMatrix& chi_b) {
  if (chi_a.rows() != chi_b.rows() || chi_a.cols() != chi_b.cols()) {
    throw std::invalid_argument("process_fidelity: shape mismatch");
  }
  return process_fidelity_with_root(sqrtm_psd(hermitian_part(chi_a)), chi_a.trace().real(), chi_b);
}

nlohmann::json projection_report_to_json(const ProjectionReport& report) {
  return {{"iterations", report.iterations},
          {"final_residual", report.final_residual},
          {"constraint_gap", report.constraint_gap},
          {"min_eigenvalue", report.min_eigenvalue},
          {"converged", report.converged}};
}

}  // namespace seqpt
