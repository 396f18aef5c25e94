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

#include "seqpt/encoding.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>
#include <string>

namespace seqpt {

void QuditEmbedding::validate() const {
  if (dim < 1 || n_qubits < 1 || static_cast<int>(index_map.size()) != dim) {
    throw std::invalid_argument("QuditEmbedding: index_map must have one entry per level");
  }
  std::set<int> used;
  for (int idx : index_map) {
    if (idx < 0 || idx >= register_size() || !used.insert(idx).second) {
      throw std::invalid_argument("QuditEmbedding: index_map is not injective into the register");
    }
  }
  for (int idx : lost_indices) {
    if (idx < 0 || idx >= register_size() || !used.insert(idx).second) {
      throw std::invalid_argument("QuditEmbedding: lost index overlaps the embedded subspace");
    }
  }
}

QuditEmbedding product_embedding(int dim) {
  QuditEmbedding emb;
  if (dim == 3) {
    emb = {3, 2, {0, 1, 2}, {3}};
  } else if (dim == 6) {
    // |k>_6 = |k1>_2 (x) |k2>_3 -> q2 = k1, (q1 q0) = k2
    emb = {6, 3, {0, 1, 2, 4, 5, 6}, {3, 7}};
  } else {
    throw std::invalid_argument("product_embedding: only d = 3 and d = 6 are defined");
  }
  emb.validate();
  return emb;
}

QuditEmbedding compact_embedding(int dim, int n_lost) {
  if (dim < 1 || n_lost < 0) throw std::invalid_argument("compact_embedding: bad arguments");
  int n = 1;
  while ((1 << n) < dim + n_lost) ++n;
  QuditEmbedding emb{dim, n, {}, {}};
  for (int k = 0; k < dim; ++k) emb.index_map.push_back(k);
  for (int k = 0; k < n_lost; ++k) emb.lost_indices.push_back(dim + k);
  emb.validate();
  return emb;
}

QuditEmbedding default_embedding(int dim) {
  if (dim == 3 || dim == 6) return product_embedding(dim);
  return compact_embedding(dim, 1);
}

ReadoutModel ReadoutModel::ideal(int n_qubits) { return uniform(n_qubits, 0.0, 0.0); }

ReadoutModel ReadoutModel::uniform(int n_qubits, double p_flip0, double p_flip1) {
  ReadoutModel model;
  Eigen::Matrix2d c;
  c << 1.0 - p_flip0, p_flip0, p_flip1, 1.0 - p_flip1;
  model.confusion.assign(n_qubits, c);
  model.validate();
  return model;
}

ReadoutModel ReadoutModel::from_register_fidelity(int n_qubits, double fidelity) {
  if (!(fidelity > 0.0 && fidelity <= 1.0)) {
    throw std::invalid_argument("ReadoutModel: register fidelity must lie in (0, 1]");
  }
  const double mean_error = 1.0 - std::pow(fidelity, 1.0 / n_qubits);
  const double e0 = mean_error / 1.5;
  return uniform(n_qubits, e0, 2.0 * e0);
}

double ReadoutModel::register_fidelity() const {
  double f = 1.0;
  for (const auto& c : confusion) f *= 0.5 * (c(0, 0) + c(1, 1));
  return f;
}

void ReadoutModel::validate() const {
  for (const auto& c : confusion) {
    for (int r = 0; r < 2; ++r) {
      if (c.row(r).minCoeff() < 0.0 || c.row(r).maxCoeff() > 1.0 || std::abs(c.row(r).sum() - 1.0) > 1e-12) {
        throw std::invalid_argument("ReadoutModel: confusion rows must be probability vectors");
      }
    }
  }
}

ComplexMatrix two_level_rotation(int size, int a, int b, double phi) {
  ComplexMatrix u = ComplexMatrix::Identity(size, size);
  u(a, a) = std::cos(phi);
  u(a, b) = -std::sin(phi);
  u(b, a) = std::sin(phi);
  u(b, b) = std::cos(phi);
  return u;
}

ComplexMatrix beamsplitter_unitary(double phi) { return two_level_rotation(4, 2, 3, phi); }

ComplexMatrix encode_channel(const Channel& ch, const QuditEmbedding& emb) {
  emb.validate();
  if (!ch.has_kraus() || ch.kraus().size() != 1) {
    throw std::domain_error("encode_channel: only single-Kraus channels can be encoded");
  }
  if (ch.dim() != emb.dim) throw std::invalid_argument("encode_channel: channel and embedding dims differ");
  const int d = ch.dim();
  const ComplexMatrix& a = ch.kraus().front();
  const ComplexMatrix gram = a.adjoint() * a;

  ComplexMatrix off = gram;
  off.diagonal().setZero();
  if (off.cwiseAbs().maxCoeff() > tol::kTraceCondition) {
    throw std::domain_error("encode_channel: A^dag A is not diagonal; loss is not level-wise");
  }

  // A = U L with L = diag(sqrt(gamma)); rebuild U column by column.
  RealVector gamma = gram.diagonal().real().cwiseMax(0.0).cwiseMin(1.0);
  ComplexMatrix u = ComplexMatrix::Zero(d, d);
  std::vector<int> dark;
  for (int k = 0; k < d; ++k) {
    if (gamma(k) > 1e-12) {
      u.col(k) = a.col(k) / std::sqrt(gamma(k));
    } else {
      dark.push_back(k);
    }
  }
  // Fully absorbed levels leave U undetermined there: complete to a unitary.
  for (int k : dark) {
    for (int e = 0; e < d; ++e) {
      ComplexVector v = ComplexVector::Unit(d, e);
      for (int c = 0; c < d; ++c) {
        if (c == k || u.col(c).squaredNorm() == 0.0) continue;
        v -= u.col(c).dot(v) * u.col(c);
      }
      if (v.norm() > 1e-6) {
        u.col(k) = v.normalized();
        break;
      }
    }
  }
  if (!is_unitary(u, tol::kTraceCondition)) {
    throw std::domain_error("encode_channel: channel is not a unitary followed by level loss");
  }

  std::vector<int> lossy;
  for (int k = 0; k < d; ++k) {
    if (gamma(k) < 1.0 - 1e-12) lossy.push_back(k);
  }
  if (lossy.size() > emb.lost_indices.size()) {
    throw std::domain_error("encode_channel: more attenuated levels than lost register states");
  }

  const int size = emb.register_size();
  ComplexMatrix w = ComplexMatrix::Identity(size, size);
  for (std::size_t n = 0; n < lossy.size(); ++n) {
    const int k = lossy[n];
    const double phi = std::acos(std::sqrt(gamma(k)));
    w = two_level_rotation(size, emb.index_map[k], emb.lost_indices[n], phi) * w;
  }
  ComplexMatrix u_reg = ComplexMatrix::Identity(size, size);
  for (int r = 0; r < d; ++r) {
    for (int c = 0; c < d; ++c) u_reg(emb.index_map[r], emb.index_map[c]) = u(r, c);
  }
  return u_reg * w;
}

ComplexVector embed_state(const ComplexVector& qudit_state, const QuditEmbedding& emb) {
  if (qudit_state.size() != emb.dim) throw std::invalid_argument("embed_state: dimension mismatch");
  ComplexVector v = ComplexVector::Zero(emb.register_size());
  for (int k = 0; k < emb.dim; ++k) v(emb.index_map[k]) = qudit_state(k);
  return v;
}

ComplexMatrix measurement_unitary(const ComplexMatrix& basis, const QuditEmbedding& emb) {
  if (basis.rows() != emb.dim || basis.cols() != emb.dim) {
    throw std::invalid_argument("measurement_unitary: dimension mismatch");
  }
  const int size = emb.register_size();
  ComplexMatrix m = ComplexMatrix::Identity(size, size);
  const ComplexMatrix inverse = basis.adjoint();
  for (int r = 0; r < emb.dim; ++r) {
    for (int c = 0; c < emb.dim; ++c) m(emb.index_map[r], emb.index_map[c]) = inverse(r, c);
  }
  return m;
}

std::vector<double> exact_distribution(const ComplexVector& register_prep, const ComplexMatrix& circuit,
                                       const ComplexMatrix& meas) {
  const ComplexVector out = meas * (circuit * register_prep);
  std::vector<double> p(out.size());
  for (Eigen::Index k = 0; k < out.size(); ++k) p[k] = std::norm(out(k));
  return p;
}

namespace {

// Conditional-binomial multinomial draw.
std::vector<std::int64_t> multinomial(std::int64_t n, const std::vector<double>& p, Rng& rng) {
  std::vector<std::int64_t> counts(p.size(), 0);
  double remaining_mass = std::accumulate(p.begin(), p.end(), 0.0);
  std::int64_t remaining = n;
  for (std::size_t k = 0; k < p.size() && remaining > 0; ++k) {
    if (k + 1 == p.size()) {
      counts[k] = remaining;
      break;
    }
    const double q = remaining_mass > 0.0 ? std::clamp(p[k] / remaining_mass, 0.0, 1.0) : 0.0;
    std::binomial_distribution<std::int64_t> draw(remaining, q);
    counts[k] = q > 0.0 ? draw(rng) : 0;
    remaining -= counts[k];
    remaining_mass -= p[k];
  }
  return counts;
}

std::vector<double> readout_row(int true_outcome, const ReadoutModel& readout) {
  const int n = readout.n_qubits();
  std::vector<double> row(std::size_t{1} << n);
  for (std::size_t r = 0; r < row.size(); ++r) {
    double prob = 1.0;
    for (int q = 0; q < n; ++q) {
      const int t = (true_outcome >> q) & 1;
      const int rep = (static_cast<int>(r) >> q) & 1;
      prob *= readout.confusion[q](t, rep);
    }
    row[r] = prob;
  }
  return row;
}

}  // namespace

ShotRecord sample_distribution(const std::vector<double>& probabilities, std::int64_t shots,
                               const std::optional<ReadoutModel>& readout, Rng& rng) {
  if (shots <= 0) throw std::invalid_argument("simulate_shots: shots must be positive");
  std::vector<double> p(probabilities.size());
  std::transform(probabilities.begin(), probabilities.end(), p.begin(), [](double x) { return std::max(x, 0.0); });
  const std::vector<std::int64_t> true_counts = multinomial(shots, p, rng);

  ShotRecord record;
  record.shots = shots;
  if (!readout) {
    for (std::size_t k = 0; k < true_counts.size(); ++k) {
      if (true_counts[k] > 0) record.counts[static_cast<int>(k)] = true_counts[k];
    }
    return record;
  }
  if ((std::size_t{1} << readout->n_qubits()) != probabilities.size()) {
    throw std::invalid_argument("simulate_shots: readout model does not match the register size");
  }
  for (std::size_t k = 0; k < true_counts.size(); ++k) {
    if (true_counts[k] == 0) continue;
    const std::vector<std::int64_t> reported = multinomial(true_counts[k], readout_row(static_cast<int>(k), *readout), rng);
    for (std::size_t r = 0; r < reported.size(); ++r) {
      if (reported[r] > 0) record.counts[static_cast<int>(r)] += reported[r];
    }
  }
  return record;
}

ShotRecord simulate_shots(const ComplexVector& register_prep, const ComplexMatrix& circuit, const ComplexMatrix& meas,
                          std::int64_t shots, const std::optional<ReadoutModel>& readout, std::uint64_t seed) {
  if (register_prep.size() != circuit.cols() || circuit.rows() != meas.cols()) {
    throw std::invalid_argument("simulate_shots: inconsistent dimensions");
  }
  Rng rng(seed);
  return sample_distribution(exact_distribution(register_prep, circuit, meas), shots, readout, rng);
}

std::vector<double> apply_readout(const std::vector<double>& probabilities, const ReadoutModel& readout) {
  std::vector<double> out(probabilities.size(), 0.0);
  for (std::size_t k = 0; k < probabilities.size(); ++k) {
    if (probabilities[k] == 0.0) continue;
    const std::vector<double> row = readout_row(static_cast<int>(k), readout);
    for (std::size_t r = 0; r < row.size(); ++r) out[r] += probabilities[k] * row[r];
  }
  return out;
}

std::vector<double> frequencies(const ShotRecord& record, int register_size) {
  std::vector<double> f(register_size, 0.0);
  for (const auto& [outcome, count] : record.counts) {
    if (outcome < 0 || outcome >= register_size) throw std::out_of_range("frequencies: outcome outside register");
    f[outcome] = static_cast<double>(count) / static_cast<double>(record.shots);
  }
  return f;
}

std::vector<double> mitigate(const std::vector<double>& freqs, const ReadoutModel& readout) {
  const int n = readout.n_qubits();
  if (freqs.size() != (std::size_t{1} << n)) throw std::invalid_argument("mitigate: register size mismatch");
  std::vector<double> v = freqs;
  for (int q = 0; q < n; ++q) {
    const Eigen::Matrix2d& c = readout.confusion[q];
    if (std::abs(c.determinant()) < 1e-12) throw std::domain_error("mitigate: singular confusion matrix");
    // observed = C^T true on this qubit's axis
    const Eigen::Matrix2d inv = c.transpose().inverse();
    const std::size_t stride = std::size_t{1} << q;
    for (std::size_t base = 0; base < v.size(); ++base) {
      if (base & stride) continue;
      const double v0 = v[base];
      const double v1 = v[base | stride];
      v[base] = inv(0, 0) * v0 + inv(0, 1) * v1;
      v[base | stride] = inv(1, 0) * v0 + inv(1, 1) * v1;
    }
  }
  double total = 0.0;
  for (double& x : v) {
    x = std::max(x, 0.0);
    total += x;
  }
  if (total > 0.0) {
    for (double& x : v) x /= total;
  }
  return v;
}

std::vector<double> mitigate(const ShotRecord& record, const ReadoutModel& readout) {
  return mitigate(frequencies(record, 1 << readout.n_qubits()), readout);
}

double survival_estimate(const ShotRecord& record, int target) {
  if (record.shots <= 0) return 0.0;
  const auto it = record.counts.find(target);
  const std::int64_t hits = it == record.counts.end() ? 0 : it->second;
  return static_cast<double>(hits) / static_cast<double>(record.shots);
}

std::vector<double> qudit_outcomes(const std::vector<double>& register_probs, const QuditEmbedding& emb) {
  if (static_cast<int>(register_probs.size()) != emb.register_size()) {
    throw std::invalid_argument("qudit_outcomes: register size mismatch");
  }
  std::vector<double> out(emb.dim + 1, 0.0);
  double embedded = 0.0;
  for (int k = 0; k < emb.dim; ++k) {
    out[k] = register_probs[emb.index_map[k]];
    embedded += out[k];
  }
  out[emb.dim] = std::accumulate(register_probs.begin(), register_probs.end(), 0.0) - embedded;
  return out;
}

nlohmann::json shot_record_to_json(const ShotRecord& record) {
  nlohmann::json counts = nlohmann::json::object();
  for (const auto& [outcome, count] : record.counts) counts[std::to_string(outcome)] = count;
  return {{"prepared", record.prepared}, {"basis", record.measured_basis}, {"shots", record.shots}, {"counts", counts}};
}

ShotRecord shot_record_from_json(const nlohmann::json& j) {
  ShotRecord record;
  record.prepared = j.at("prepared").get<std::vector<int>>();
  record.measured_basis = j.at("basis").get<std::vector<int>>();
  record.shots = j.at("shots").get<std::int64_t>();
  std::int64_t total = 0;
  for (const auto& [key, value] : j.at("counts").items()) {
    const auto c = value.get<std::int64_t>();
    record.counts[std::stoi(key)] = c;
    total += c;
  }
  if (total != record.shots) throw std::invalid_argument("ShotRecord JSON: counts do not sum to shots");
  return record;
}

}  // namespace seqpt
