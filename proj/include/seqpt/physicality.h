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

#ifndef SEQPT_PHYSICALITY_H
#define SEQPT_PHYSICALITY_H

#include <nlohmann/json.hpp>

#include "seqpt/opbasis.h"
#include "seqpt/qmath.h"

namespace seqpt {

struct ProjectionOptions {
  int max_iter = 5000;
  double tol = 1e-9;
  enum class Method {
    kAuto,      // spectral when the trace functional is a multiple of Tr, else matrix
    kMatrix,    // full eigendecomposition every iteration
    kSpectral,  // one eigendecomposition, iterate on the spectrum
  } method = Method::kAuto;
};

struct ProjectionReport {
  ComplexMatrix chi_opt;
  int iterations = 0;
  double final_residual = 0.0;   // Frobenius change in the last iteration
  double constraint_gap = 0.0;   // |Tr(sum chi E_j^dag E_i) - target|
  double min_eigenvalue = 0.0;
  bool converged = false;
};

/// Tr(sum_ij chi(i,j) E_j^dag E_i)
double trace_functional(const ComplexMatrix& chi, const OperatorBasis& basis);

/// Nearest chi (Frobenius) that is PSD and has trace_functional == trace_target,
/// by Dykstra's alternating projections. A non-converged run returns the last
/// iterate with converged = false.
ProjectionReport project_physical(const ComplexMatrix& chi_raw, const OperatorBasis& basis, double trace_target,
                                  const ProjectionOptions& options = {});

/// Tr sqrt(sqrt(a) b sqrt(a)) / sqrt(Tr a Tr b)
double process_fidelity(const ComplexMatrix& chi_a, const ComplexMatrix& chi_b);

/// Same with sqrt(chi_a) supplied.
double process_fidelity_with_root(const ComplexMatrix& sqrt_a, double trace_a, const ComplexMatrix& chi_b);

nlohmann::json projection_report_to_json(const ProjectionReport& report);

}  // namespace seqpt

#endif  // SEQPT_PHYSICALITY_H
