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

#include "seqpt/channels.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace seqpt {

Channel Channel::from_kraus(std::vector<ComplexMatrix> kraus) {
  if (kraus.empty()) throw std::invalid_argument("Channel::from_kraus: empty Kraus list");
  const auto d = kraus.front().rows();
  for (const auto& a : kraus) {
    if (a.rows() != d || a.cols() != d) throw std::invalid_argument("Channel::from_kraus: inconsistent shapes");
  }
  Channel ch;
  ch.dim_ = static_cast<int>(d);
  ch.kraus_ = std::move(kraus);
  if (trace_condition_excess(ch) > tol::kTraceCondition) {
    throw std::invalid_argument("Channel::from_kraus: sum A^dag A exceeds the identity");
  }
  return ch;
}

Channel Channel::from_chi(ComplexMatrix chi, const OperatorBasis& basis) {
  if (chi.rows() != basis.size() || chi.cols() != basis.size()) {
    throw std::invalid_argument("Channel::from_chi: chi must be d^2 x d^2");
  }
  Channel ch;
  ch.dim_ = basis.dim();
  ch.chi_ = std::move(chi);
  ch.chi_basis_name_ = basis.name();
  return ch;
}

const ComplexMatrix& Channel::chi() const {
  if (!chi_) throw std::logic_error("Channel: no chi form attached");
  return *chi_;
}

Channel Channel::with_chi(const OperatorBasis& basis) const {
  Channel out = *this;
  out.chi_ = kraus_to_chi(*this, basis);
  out.chi_basis_name_ = basis.name();
  return out;
}

LossOperator LossOperator::from_matrix(ComplexMatrix p) {
  const Eigensystem es = eigh(p);
  if (es.values.minCoeff() < -tol::kTraceCondition || es.values.maxCoeff() > 1.0 + tol::kTraceCondition) {
    throw std::invalid_argument("LossOperator: eigenvalues outside [0, 1]");
  }
  return LossOperator{hermitian_part(p), es.values};
}

LossOperator LossOperator::identity(int dim) {
  return LossOperator{ComplexMatrix::Identity(dim, dim), RealVector::Ones(dim)};
}

double trace_condition_excess(const Channel& ch) {
  ComplexMatrix sum = ComplexMatrix::Zero(ch.dim(), ch.dim());
  for (const auto& a : ch.kraus()) sum += a.adjoint() * a;
  return eigh(hermitian_part(sum)).values.maxCoeff() - 1.0;
}

ComplexMatrix apply(const Channel& ch, const ComplexMatrix& rho) {
  if (!ch.has_kraus()) throw std::logic_error("apply: channel has no Kraus form");
  if (rho.rows() != ch.dim() || rho.cols() != ch.dim()) throw std::invalid_argument("apply: dimension mismatch");
  ComplexMatrix out = ComplexMatrix::Zero(ch.dim(), ch.dim());
  for (const auto& a : ch.kraus()) out.noalias() += a * rho * a.adjoint();
  return out;
}

ComplexMatrix apply_chi(const ComplexMatrix& chi, const OperatorBasis& basis, const ComplexMatrix& rho) {
  if (chi.rows() != basis.size() || rho.rows() != basis.dim()) {
    throw std::invalid_argument("apply_chi: dimension mismatch");
  }
  ComplexMatrix out = ComplexMatrix::Zero(basis.dim(), basis.dim());
  for (int i = 0; i < basis.size(); ++i) {
    const ComplexMatrix left = basis[i] * rho;
    for (int j = 0; j < basis.size(); ++j) {
      if (chi(i, j) == Complex{0.0}) continue;
      out.noalias() += chi(i, j) * left * basis[j].adjoint();
    }
  }
  return out;
}

ComplexMatrix kraus_to_chi(const Channel& ch, const OperatorBasis& basis) {
  if (!ch.has_kraus()) throw std::logic_error("kraus_to_chi: channel has no Kraus form");
  if (ch.dim() != basis.dim()) throw std::invalid_argument("kraus_to_chi: dimension mismatch");
  ComplexMatrix chi = ComplexMatrix::Zero(basis.size(), basis.size());
  for (const auto& a : ch.kraus()) {
    const ComplexVector c = expand_operator(a, basis);
    chi.noalias() += c * c.adjoint();
  }
  return chi;
}

ComplexMatrix loss_matrix_from_chi(const ComplexMatrix& chi, const OperatorBasis& basis) {
  if (chi.rows() != basis.size()) throw std::invalid_argument("loss_matrix_from_chi: dimension mismatch");
  ComplexMatrix p = ComplexMatrix::Zero(basis.dim(), basis.dim());
  for (int i = 0; i < basis.size(); ++i) {
    for (int j = 0; j < basis.size(); ++j) {
      if (chi(i, j) == Complex{0.0}) continue;
      p.noalias() += chi(i, j) * basis[j].adjoint() * basis[i];
    }
  }
  return p;
}

LossOperator loss_operator(const Channel& ch, const OperatorBasis& basis) {
  if (ch.has_kraus()) {
    ComplexMatrix p = ComplexMatrix::Zero(ch.dim(), ch.dim());
    for (const auto& a : ch.kraus()) p.noalias() += a.adjoint() * a;
    return LossOperator::from_matrix(std::move(p));
  }
  return LossOperator::from_matrix(loss_matrix_from_chi(ch.chi(), basis));
}

ComplexMatrix ModifiedChannelPlan::operator_sum() const {
  const auto d = terms.empty() ? 0 : terms.front().state.dim();
  ComplexMatrix out = ComplexMatrix::Zero(d, d);
  for (const auto& t : terms) out += t.coefficient * t.state.projector();
  return out;
}

std::vector<PlanTerm> outer_product_terms(const ComplexVector& alpha, const ComplexVector& beta) {
  const Complex overlap = beta.dot(alpha);  // <beta|alpha>
  if (std::abs(overlap) > kProportionalOverlap * alpha.norm() * beta.norm()) {
    // alpha = c beta, so |alpha><beta| = c |beta|^2 P = <beta|alpha> P.
    return {{overlap, PureState::normalized(alpha)}};
  }
  const double inv_sqrt2 = 1.0 / std::numbers::sqrt2;
  const ComplexVector plus = (alpha + beta) * inv_sqrt2;
  const ComplexVector minus = (alpha + kI * beta) * inv_sqrt2;
  const Complex half_one_plus_i{0.5, 0.5};

  std::vector<PlanTerm> terms;
  terms.reserve(4);
  const double plus_norm2 = plus.squaredNorm();
  const double minus_norm2 = minus.squaredNorm();
  if (plus_norm2 > 0.0) terms.push_back({Complex{plus_norm2}, PureState::normalized(plus)});
  if (minus_norm2 > 0.0) terms.push_back({kI * minus_norm2, PureState::normalized(minus)});
  terms.push_back({-half_one_plus_i * alpha.squaredNorm(), PureState::normalized(alpha)});
  terms.push_back({-half_one_plus_i * beta.squaredNorm(), PureState::normalized(beta)});
  return terms;
}

ModifiedChannelPlan modified_channel_plan(int i, int j, const PureState& psi, const OperatorBasis& basis) {
  if (psi.dim() != basis.dim()) throw std::invalid_argument("modified_channel_plan: dimension mismatch");
  ModifiedChannelPlan plan;
  plan.i = i;
  plan.j = j;
  if (i == j) {
    plan.terms.push_back({Complex{1.0}, PureState::normalized(basis[i].adjoint() * psi.amplitudes())});
    return plan;
  }
  const ComplexVector alpha = basis[i].adjoint() * psi.amplitudes();
  const ComplexVector beta = basis[j].adjoint() * psi.amplitudes();
  plan.terms = outer_product_terms(alpha, beta);
  return plan;
}

ProcessName parse_process_name(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (lower == "id") return ProcessName::kId;
  if (lower == "h01") return ProcessName::kH01;
  if (lower == "h12") return ProcessName::kH12;
  if (lower == "phase") return ProcessName::kPhase;
  if (lower == "swap25") return ProcessName::kSwap25;
  throw std::invalid_argument("unknown process name '" + std::string(name) + "'");
}

std::string to_string(ProcessName name) {
  switch (name) {
    case ProcessName::kId: return "id";
    case ProcessName::kH01: return "h01";
    case ProcessName::kH12: return "h12";
    case ProcessName::kPhase: return "phase";
    case ProcessName::kSwap25: return "swap25";
  }
  return "?";
}

std::vector<int> loss_levels(ProcessName name, int dim) {
  if (dim < 2) throw std::invalid_argument("process dimension must be at least 2");
  if (dim == 3) {
    switch (name) {
      case ProcessName::kId:
      case ProcessName::kH01: return {2};
      case ProcessName::kH12: return {0};
      default: break;
    }
  } else if (dim == 6) {
    switch (name) {
      case ProcessName::kId:
      case ProcessName::kPhase:
      case ProcessName::kSwap25: return {2, 5};
      default: break;
    }
  } else if (name == ProcessName::kId) {
    return {dim - 1};
  }
  throw std::invalid_argument("no process '" + to_string(name) + "' in dimension " + std::to_string(dim));
}

namespace {

ComplexMatrix lossless_unitary(ProcessName name, int dim) {
  const double r2 = 1.0 / std::numbers::sqrt2;
  ComplexMatrix u = ComplexMatrix::Identity(dim, dim);
  if (name == ProcessName::kId) return u;
  if (dim == 3) {
    switch (name) {
      case ProcessName::kId: return u;
      case ProcessName::kH01:
        u(0, 0) = r2; u(0, 1) = r2;
        u(1, 0) = r2; u(1, 1) = -r2;
        return u;
      case ProcessName::kH12:
        u(1, 1) = r2; u(1, 2) = r2;
        u(2, 1) = r2; u(2, 2) = -r2;
        return u;
      default: break;
    }
  } else if (dim == 6) {
    const Complex phase = std::polar(1.0, std::numbers::pi / 3.0);
    switch (name) {
      case ProcessName::kId: return u;
      case ProcessName::kPhase:
        u(1, 1) = phase;
        u(4, 4) = phase;
        return u;
      case ProcessName::kSwap25:
        u(1, 1) = phase;
        u(4, 4) = phase;
        u(2, 2) = 0.0; u(5, 5) = 0.0;
        u(2, 5) = 1.0; u(5, 2) = 1.0;
        return u;
      default: break;
    }
  }
  throw std::invalid_argument("no process '" + to_string(name) + "' in dimension " + std::to_string(dim));
}

}  // namespace

Channel make_process(ProcessName name, int dim, double loss) {
  if (!(loss >= 0.0 && loss <= 1.0)) throw std::invalid_argument("make_process: loss must lie in [0, 1]");
  ComplexMatrix a = lossless_unitary(name, dim);
  const double amplitude = std::sqrt(1.0 - loss);
  for (int level : loss_levels(name, dim)) a.col(level) *= amplitude;
  return Channel::from_kraus({std::move(a)});
}

nlohmann::json matrix_to_json(const ComplexMatrix& m) {
  nlohmann::json re = nlohmann::json::array();
  nlohmann::json im = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    nlohmann::json rr = nlohmann::json::array();
    nlohmann::json ri = nlohmann::json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      rr.push_back(m(r, c).real());
      ri.push_back(m(r, c).imag());
    }
    re.push_back(std::move(rr));
    im.push_back(std::move(ri));
  }
  return {{"real", std::move(re)}, {"imag", std::move(im)}};
}

namespace {

ComplexMatrix matrix_from_parts(const nlohmann::json& re, const nlohmann::json& im) {
  const auto rows = re.size();
  if (rows == 0 || im.size() != rows) throw std::invalid_argument("matrix JSON: real/imag shape mismatch");
  const auto cols = re.at(0).size();
  ComplexMatrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    if (re.at(r).size() != cols || im.at(r).size() != cols) {
      throw std::invalid_argument("matrix JSON: ragged rows");
    }
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = Complex{re[r][c].get<double>(), im[r][c].get<double>()};
  }
  return m;
}

}  // namespace

ComplexMatrix matrix_from_json(const nlohmann::json& j) { return matrix_from_parts(j.at("real"), j.at("imag")); }

nlohmann::json channel_to_json(const Channel& ch) {
  nlohmann::json out;
  out["dim"] = ch.dim();
  out["basis"] = ch.has_chi() ? ch.chi_basis_name() : "sylvester";
  nlohmann::json kraus = nlohmann::json::array();
  for (const auto& a : ch.kraus()) kraus.push_back(matrix_to_json(a));
  out["kraus"] = std::move(kraus);
  if (ch.has_chi()) {
    const nlohmann::json chi = matrix_to_json(ch.chi());
    out["chi_real"] = chi["real"];
    out["chi_imag"] = chi["imag"];
  }
  return out;
}

Channel channel_from_json(const nlohmann::json& j, const OperatorBasis& basis) {
  const int dim = j.at("dim").get<int>();
  if (dim != basis.dim()) throw std::invalid_argument("channel JSON: dim does not match basis");
  std::vector<ComplexMatrix> kraus;
  if (j.contains("kraus")) {
    for (const auto& m : j["kraus"]) kraus.push_back(matrix_from_json(m));
  }
  if (!kraus.empty()) {
    Channel ch = Channel::from_kraus(std::move(kraus));
    return j.contains("chi_real") ? ch.with_chi(basis) : ch;
  }
  if (!j.contains("chi_real")) throw std::invalid_argument("channel JSON: neither kraus nor chi present");
  return Channel::from_chi(matrix_from_parts(j["chi_real"], j["chi_imag"]), basis);
}

}  // namespace seqpt
