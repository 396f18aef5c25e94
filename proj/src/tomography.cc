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

#include "seqpt/tomography.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>

namespace seqpt {

namespace {

constexpr Complex kHalfOnePlusI{0.5, 0.5};

template <typename F>
void for_each_index(int n, Execution execution, F&& body) {
  if (execution == Execution::kParallel) {
#pragma omp parallel for schedule(dynamic)
    for (int k = 0; k < n; ++k) body(k);
  } else {
    for (int k = 0; k < n; ++k) body(k);
  }
}

std::uint64_t key_stream_index(const CircuitKey& key) {
  return (static_cast<std::uint64_t>(key.basis) << 40) ^ (static_cast<std::uint64_t>(key.kind) << 32) ^
         (static_cast<std::uint64_t>(key.a) << 16) ^ static_cast<std::uint64_t>(key.b);
}

void validate_estimator(const Estimator& est) {
  if (est.kind == Estimator::Kind::kShots && est.shots <= 0) {
    throw std::invalid_argument("estimator: shots must be positive");
  }
  if (est.readout) est.readout->validate();
}

}  // namespace

std::string to_string(ReconstructionMode mode) {
  switch (mode) {
    case ReconstructionMode::kTp: return "tp";
    case ReconstructionMode::kNtp: return "ntp";
    case ReconstructionMode::kBipartiteNtp: return "bipartite-ntp";
  }
  return "?";
}

ReconstructionMode parse_mode(const std::string& text) {
  std::string t;
  for (char c : text) t.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (t == "tp") return ReconstructionMode::kTp;
  if (t == "ntp") return ReconstructionMode::kNtp;
  if (t == "bipartite-ntp" || t == "bipartite_ntp") return ReconstructionMode::kBipartiteNtp;
  throw std::invalid_argument("unknown mode: " + text);
}

SeqptSetup::SeqptSetup(OperatorBasis basis, StateDesign design, std::pair<int, int> factors)
    : basis_(std::move(basis)), design_(std::move(design)), factors_(factors) {
  std::vector<ComplexMatrix> adjoints;
  adjoints.reserve(basis_.size());
  for (const auto& e : basis_.elements()) adjoints.push_back(e.adjoint());
  adjoint_closure_ = closure_table(adjoints, design_);
}

SeqptSetup SeqptSetup::single(int d) {
  if (!is_supported_prime(d)) throw std::invalid_argument("single-space setup needs a supported prime dimension");
  return SeqptSetup(sylvester_basis(d), mub_design(d), {0, 0});
}

SeqptSetup SeqptSetup::bipartite(int d1, int d2) {
  if (!is_supported_prime(d1) || !is_supported_prime(d2)) {
    throw std::invalid_argument("bipartite setup needs supported prime factors");
  }
  ProductDesign pd = product_design(mub_design(d1), mub_design(d2));
  return SeqptSetup(product_basis(sylvester_basis(d1), sylvester_basis(d2)), std::move(pd.combined), {d1, d2});
}

SeqptSetup SeqptSetup::for_dim(int d) {
  if (is_supported_prime(d)) return single(d);
  for (int p : kSupportedPrimes) {
    if (d % p == 0 && is_supported_prime(d / p)) return bipartite(p, d / p);
  }
  throw std::invalid_argument("no design available for dimension " + std::to_string(d));
}

ComplexVector circuit_preparation(const CircuitKey& key, const StateDesign& design) {
  const ComplexMatrix& b = design.basis(key.basis);
  switch (key.kind) {
    case CircuitKey::Kind::kSingle: return b.col(key.a);
    case CircuitKey::Kind::kPlus: return (b.col(key.a) + b.col(key.b)) / std::sqrt(2.0);
    case CircuitKey::Kind::kMinus: return (b.col(key.a) + kI * b.col(key.b)) / std::sqrt(2.0);
  }
  throw std::logic_error("circuit_preparation: bad kind");
}

std::vector<CircuitKey> all_circuit_keys(const StateDesign& design) {
  std::vector<CircuitKey> keys;
  const int d = design.dim();
  for (int b = 0; b < design.num_bases(); ++b) {
    for (int a = 0; a < d; ++a) keys.push_back({b, CircuitKey::Kind::kSingle, a, a});
    for (int a = 0; a < d; ++a) {
      for (int c = a + 1; c < d; ++c) {
        keys.push_back({b, CircuitKey::Kind::kPlus, a, c});
        keys.push_back({b, CircuitKey::Kind::kMinus, a, c});
      }
    }
  }
  return keys;
}

KeyedPlan keyed_plan(const SeqptSetup& setup, int i, int j, int s) {
  const StateDesign& design = setup.design();
  const ClosureEntry& ea = setup.adjoint_action(i, s);
  const ClosureEntry& eb = setup.adjoint_action(j, s);
  const int basis = design.basis_of(s);
  const int a = design.index_in_basis(ea.target);
  const int b = design.index_in_basis(eb.target);
  const Complex c = ea.phase * std::conj(eb.phase);

  KeyedPlan plan;
  plan.target = design.index_in_basis(s);
  using Kind = CircuitKey::Kind;
  if (a == b) {
    plan.terms.push_back({{basis, Kind::kSingle, a, a}, c});
  } else if (a < b) {
    plan.terms.push_back({{basis, Kind::kPlus, a, b}, c});
    plan.terms.push_back({{basis, Kind::kMinus, a, b}, kI * c});
    plan.terms.push_back({{basis, Kind::kSingle, a, a}, -kHalfOnePlusI * c});
    plan.terms.push_back({{basis, Kind::kSingle, b, b}, -kHalfOnePlusI * c});
  } else {
    plan.terms.push_back({{basis, Kind::kPlus, b, a}, c});
    plan.terms.push_back({{basis, Kind::kMinus, b, a}, -kI * c});
    plan.terms.push_back({{basis, Kind::kSingle, a, a}, -std::conj(kHalfOnePlusI) * c});
    plan.terms.push_back({{basis, Kind::kSingle, b, b}, -std::conj(kHalfOnePlusI) * c});
  }
  return plan;
}

CircuitBank::CircuitBank(const Channel& ch, const StateDesign& design, Estimator estimator)
    : channel_(ch), design_(&design), estimator_(std::move(estimator)) {
  if (!ch.has_kraus()) throw std::invalid_argument("CircuitBank: channel needs a Kraus form");
  if (ch.dim() != design.dim()) throw std::invalid_argument("CircuitBank: dimension mismatch");
  validate_estimator(estimator_);
  const int d = ch.dim();
  if (ch.kraus().size() == 1) {
    try {
      QuditEmbedding emb = default_embedding(d);
      circuit_ = encode_channel(ch, emb);
      embedding_ = emb;
    } catch (const std::domain_error&) {
      circuit_.reset();
    }
  }
  if (encoded()) {
    for (int b = 0; b < design.num_bases(); ++b) meas_.push_back(measurement_unitary(design.basis(b), *embedding_));
    raw_to_qudit_.assign(embedding_->register_size(), d);
    for (int k = 0; k < d; ++k) raw_to_qudit_[embedding_->index_map[k]] = k;
  } else {
    raw_to_qudit_.resize(d + 1);
    for (int k = 0; k <= d; ++k) raw_to_qudit_[k] = k;
  }
  if (estimator_.readout) {
    if (!encoded()) throw std::invalid_argument("CircuitBank: readout errors need an encodable channel");
    if (estimator_.readout->n_qubits() != embedding_->n_qubits) {
      throw std::invalid_argument("CircuitBank: readout model does not match the register");
    }
  }
}

std::vector<double> CircuitBank::raw_distribution(const CircuitKey& key) const {
  const ComplexVector prep = circuit_preparation(key, *design_);
  if (encoded()) return exact_distribution(embed_state(prep, *embedding_), *circuit_, meas_[key.basis]);
  return direct_distribution(prep, key.basis);
}

std::vector<double> CircuitBank::direct_distribution(const ComplexVector& prep, int basis) const {
  const int d = channel_.dim();
  const ComplexMatrix out = seqpt::apply(channel_, prep * prep.adjoint());
  const ComplexMatrix& mb = design_->basis(basis);
  std::vector<double> p(d + 1);
  double kept = 0.0;
  for (int m = 0; m < d; ++m) {
    p[m] = std::max((mb.col(m).adjoint() * out * mb.col(m))(0, 0).real(), 0.0);
    kept += p[m];
  }
  p[d] = std::max(1.0 - kept, 0.0);
  return p;
}

std::vector<double> CircuitBank::execute(const ComplexVector& prep, int basis, std::string_view role,
                                         std::initializer_list<std::uint64_t> stream) const {
  if (estimator_.kind == Estimator::Kind::kExact) return direct_distribution(prep, basis);
  const std::vector<double> raw = encoded()
                                      ? exact_distribution(embed_state(prep, *embedding_), *circuit_, meas_[basis])
                                      : direct_distribution(prep, basis);
  Rng rng(derive_seed(estimator_.seed, role, stream));
  const ShotRecord record = sample_distribution(raw, estimator_.shots, estimator_.readout, rng);
  std::vector<double> freq = frequencies(record, static_cast<int>(raw.size()));
  if (estimator_.mitigate && estimator_.readout) freq = mitigate(freq, *estimator_.readout);
  if (encoded()) return qudit_outcomes(freq, *embedding_);
  return freq;
}

void CircuitBank::prepare(const std::vector<CircuitKey>& keys, Execution execution) {
  std::vector<CircuitKey> todo;
  for (const auto& k : keys) {
    if (!distributions_.count(k)) todo.push_back(k);
  }
  std::sort(todo.begin(), todo.end());
  todo.erase(std::unique(todo.begin(), todo.end()), todo.end());
  std::vector<std::vector<double>> results(todo.size());
  for_each_index(static_cast<int>(todo.size()), execution, [&](int n) {
    const CircuitKey& k = todo[n];
    results[n] = execute(circuit_preparation(k, *design_), k.basis, "seqpt-circuit", {key_stream_index(k)});
  });
  for (std::size_t n = 0; n < todo.size(); ++n) distributions_.emplace(todo[n], std::move(results[n]));
}

const std::vector<double>& CircuitBank::distribution(const CircuitKey& key) const {
  const auto it = distributions_.find(key);
  if (it == distributions_.end()) throw std::out_of_range("CircuitBank: circuit not prepared");
  return it->second;
}

std::int64_t CircuitBank::shots_total() const {
  if (estimator_.kind == Estimator::Kind::kExact) return 0;
  return estimator_.shots * static_cast<std::int64_t>(distributions_.size());
}

FidelityTriple design_fidelities(const SeqptSetup& setup, const CircuitBank& bank, int i, int j) {
  const StateDesign& design = setup.design();
  const int d = design.dim();
  const int d2 = setup.is_bipartite() ? setup.factors().second : 1;
  FidelityTriple f{};
  for (int s = 0; s < design.size(); ++s) {
    const KeyedPlan plan = keyed_plan(setup, i, j, s);
    for (const KeyedTerm& t : plan.terms) {
      const std::vector<double>& p = bank.distribution(t.key);
      f.full += t.coefficient * p[plan.target];
      if (setup.is_bipartite()) {
        double r1 = 0.0;
        double r2 = 0.0;
        for (int q = 0; q < d; ++q) {
          if (q / d2 == plan.target / d2) r1 += p[q];
          if (q % d2 == plan.target % d2) r2 += p[q];
        }
        f.reduced1 += t.coefficient * r1;
        f.reduced2 += t.coefficient * r2;
      }
    }
  }
  const double w = design.weight();
  f.full *= w;
  f.reduced1 *= w;
  f.reduced2 *= w;
  return f;
}

namespace {

std::vector<CircuitKey> keys_for_element(const SeqptSetup& setup, int i, int j) {
  std::vector<CircuitKey> keys;
  for (int s = 0; s < setup.design().size(); ++s) {
    for (const KeyedTerm& t : keyed_plan(setup, i, j, s).terms) keys.push_back(t.key);
  }
  return keys;
}

FidelityTriple element_fidelities(const Channel& ch, int i, int j, const SeqptSetup& setup, const Estimator& est,
                                  std::int64_t* shots_used) {
  const int n = setup.basis().size();
  if (i < 0 || j < 0 || i >= n || j >= n) throw std::out_of_range("chi element index out of range");
  CircuitBank bank(ch, setup.design(), est);
  bank.prepare(keys_for_element(setup, i, j));
  *shots_used = bank.shots_total();
  return design_fidelities(setup, bank, i, j);
}

Complex loss_overlap(const LossOperator& p, int i, int j, const OperatorBasis& basis) {
  return (p.matrix * basis[i].adjoint() * basis[j]).trace();
}

}  // namespace

FidelityEstimate avg_fidelity(const Channel& ch, int i, int j, const SeqptSetup& setup, const Estimator& estimator) {
  std::int64_t shots = 0;
  const FidelityTriple f = element_fidelities(ch, i, j, setup, estimator, &shots);
  return {f.full, estimator.kind, shots, {i, j}};
}

std::pair<FidelityEstimate, FidelityEstimate> reduced_fidelities(const Channel& ch, int i, int j,
                                                                 const SeqptSetup& setup,
                                                                 const Estimator& estimator) {
  if (!setup.is_bipartite()) throw std::invalid_argument("reduced_fidelities: setup is not bipartite");
  std::int64_t shots = 0;
  const FidelityTriple f = element_fidelities(ch, i, j, setup, estimator, &shots);
  return {FidelityEstimate{f.reduced1, estimator.kind, shots, {i, j}},
          FidelityEstimate{f.reduced2, estimator.kind, shots, {i, j}}};
}

Complex chi_element_tp(const FidelityEstimate& fid, int d) {
  const double delta = fid.element.first == fid.element.second ? 1.0 : 0.0;
  return fid.value * (d + 1.0) / static_cast<double>(d) - delta / d;
}

Complex chi_element_ntp(const FidelityEstimate& fid, const LossOperator& p, int i, int j,
                        const OperatorBasis& basis) {
  const double d = basis.dim();
  return (d * (d + 1.0) * fid.value - loss_overlap(p, i, j, basis)) / (d * d);
}

Complex chi_element_bipartite(const FidelityTriple& fids, const LossOperator& p, int i, int j, int d1, int d2,
                              const OperatorBasis& basis) {
  const double d = static_cast<double>(d1) * d2;
  if (basis.dim() != d1 * d2) throw std::invalid_argument("chi_element_bipartite: dimension mismatch");
  return fids.full * ((1.0 + d1) * (1.0 + d2) / d) + loss_overlap(p, i, j, basis) / (d * d) -
         fids.reduced1 * ((1.0 + d1) / d) - fids.reduced2 * ((1.0 + d2) / d);
}

namespace {

// Element estimator for one mode on one setup.
class ElementFormula {
 public:
  ElementFormula(const SeqptSetup& setup, ReconstructionMode mode, const LossOperator& p)
      : setup_(setup), mode_(mode), p_(p) {}

  Complex operator()(int i, int j, const FidelityTriple& f) const {
    const OperatorBasis& basis = setup_.basis();
    if (setup_.is_bipartite()) {
      return chi_element_bipartite(f, p_, i, j, setup_.factors().first, setup_.factors().second, basis);
    }
    const FidelityEstimate fid{f.full, Estimator::Kind::kExact, 0, {i, j}};
    if (mode_ == ReconstructionMode::kTp) return chi_element_tp(fid, basis.dim());
    return chi_element_ntp(fid, p_, i, j, basis);
  }

 private:
  const SeqptSetup& setup_;
  ReconstructionMode mode_;
  const LossOperator& p_;
};

}  // namespace

LossOperator assumed_loss(ReconstructionMode mode, const std::optional<LossOperator>& p, int dim) {
  if (mode == ReconstructionMode::kTp) return LossOperator::identity(dim);
  if (!p) throw std::invalid_argument("non-trace-preserving mode needs the loss operator");
  if (p->dim() != dim) throw std::invalid_argument("loss operator dimension mismatch");
  return *p;
}

SeqptSetup setup_for_mode(ReconstructionMode mode, int dim) {
  switch (mode) {
    case ReconstructionMode::kNtp:
      if (!is_supported_prime(dim)) throw std::invalid_argument("ntp mode needs a prime dimension; use bipartite-ntp");
      return SeqptSetup::single(dim);
    case ReconstructionMode::kBipartiteNtp: {
      SeqptSetup s = SeqptSetup::for_dim(dim);
      if (!s.is_bipartite()) throw std::invalid_argument("bipartite-ntp mode needs a composite dimension");
      return s;
    }
    case ReconstructionMode::kTp: return SeqptSetup::for_dim(dim);
  }
  throw std::logic_error("setup_for_mode: bad mode");
}

ReconstructionResult full_reconstruct(const Channel& ch, const SeqptSetup& setup, ReconstructionMode mode,
                                      const LossOperator& p, const Estimator& estimator, Execution execution) {
  if (ch.dim() != setup.dim() || p.dim() != setup.dim()) throw std::invalid_argument("full_reconstruct: dimension mismatch");
  const int n = setup.basis().size();
  CircuitBank bank(ch, setup.design(), estimator);

  std::vector<std::vector<CircuitKey>> row_keys(n);
  for_each_index(n, execution, [&](int i) {
    std::vector<CircuitKey> keys;
    for (int j = 0; j < n; ++j) {
      std::vector<CircuitKey> k = keys_for_element(setup, i, j);
      keys.insert(keys.end(), k.begin(), k.end());
    }
    std::sort(keys.begin(), keys.end());
    keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
    row_keys[i] = std::move(keys);
  });
  std::vector<CircuitKey> keys;
  for (auto& rk : row_keys) keys.insert(keys.end(), rk.begin(), rk.end());
  bank.prepare(keys, execution);

  const ElementFormula formula(setup, mode, p);
  ComplexMatrix chi(n, n);
  for_each_index(n, execution, [&](int i) {
    for (int j = 0; j < n; ++j) chi(i, j) = formula(i, j, design_fidelities(setup, bank, i, j));
  });

  ReconstructionResult r;
  r.dim = setup.dim();
  r.mode = to_string(mode);
  r.basis = setup.basis().name();
  r.chi_raw = hermitian_part(chi);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) r.mask.emplace_back(i, j);
  }
  r.circuits_executed = bank.circuits_executed();
  r.shots_total = bank.shots_total();
  return r;
}

ReconstructionResult full_reconstruct(const Channel& ch, ReconstructionMode mode, const std::optional<LossOperator>& p,
                                      const Estimator& estimator, Execution execution) {
  const SeqptSetup setup = setup_for_mode(mode, ch.dim());
  return full_reconstruct(ch, setup, mode, assumed_loss(mode, p, ch.dim()), estimator, execution);
}

std::vector<std::pair<int, int>> nonzero_elements(const ComplexMatrix& chi, double threshold) {
  std::vector<std::pair<int, int>> out;
  for (int i = 0; i < chi.rows(); ++i) {
    for (int j = 0; j < chi.cols(); ++j) {
      if (std::abs(chi(i, j)) > threshold) out.emplace_back(i, j);
    }
  }
  return out;
}

namespace {

// Single-shot sampler over the reported raw outcomes of every circuit.
class ShotSampler {
 public:
  ShotSampler(const CircuitBank& bank, const std::vector<CircuitKey>& keys,
              const std::optional<ReadoutModel>& readout) {
    for (std::size_t n = 0; n < keys.size(); ++n) {
      ids_.emplace(keys[n], static_cast<int>(n));
      std::vector<double> p = bank.raw_distribution(keys[n]);
      if (readout) p = apply_readout(p, *readout);
      std::vector<double> cdf(p.size());
      double acc = 0.0;
      for (std::size_t k = 0; k < p.size(); ++k) cdf[k] = acc += std::max(p[k], 0.0);
      for (double& c : cdf) c /= acc;
      cdfs_.push_back(std::move(cdf));
    }
  }

  int id(const CircuitKey& key) const { return ids_.at(key); }
  int size() const { return static_cast<int>(cdfs_.size()); }

  int draw(int id, Rng& rng) const {
    const std::vector<double>& cdf = cdfs_[id];
    const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    return static_cast<int>(std::min<std::ptrdiff_t>(it - cdf.begin(), static_cast<std::ptrdiff_t>(cdf.size()) - 1));
  }

 private:
  std::map<CircuitKey, int> ids_;
  std::vector<std::vector<double>> cdfs_;
};

struct IndicatorMasks {
  // which qudit outcomes count towards full / reduced1 / reduced2 for a target
  std::vector<std::vector<char>> full, reduced1, reduced2;
};

IndicatorMasks indicator_masks(const SeqptSetup& setup) {
  const int d = setup.dim();
  const int d2 = setup.is_bipartite() ? setup.factors().second : 1;
  IndicatorMasks m;
  m.full.assign(d, std::vector<char>(d + 1, 0));
  m.reduced1 = m.full;
  m.reduced2 = m.full;
  for (int t = 0; t < d; ++t) {
    for (int q = 0; q < d; ++q) {
      m.full[t][q] = q == t;
      m.reduced1[t][q] = q / d2 == t / d2;
      m.reduced2[t][q] = q % d2 == t % d2;
    }
  }
  return m;
}

// Running sums of one element without mitigation.
std::vector<FidelityTriple> sample_element_direct(const SeqptSetup& setup, const ShotSampler& sampler,
                                                  const std::vector<int>& raw_to_qudit, const IndicatorMasks& masks,
                                                  int i, int j, int m_max, Rng& rng, std::int64_t* executed) {
  const int n_states = setup.design().size();
  std::uniform_int_distribution<int> pick(0, n_states - 1);
  std::vector<FidelityTriple> trace(m_max);
  FidelityTriple sum{};
  for (int m = 0; m < m_max; ++m) {
    const KeyedPlan plan = keyed_plan(setup, i, j, pick(rng));
    for (const KeyedTerm& t : plan.terms) {
      const int q = raw_to_qudit[sampler.draw(sampler.id(t.key), rng)];
      ++*executed;
      if (masks.full[plan.target][q]) sum.full += t.coefficient;
      if (masks.reduced1[plan.target][q]) sum.reduced1 += t.coefficient;
      if (masks.reduced2[plan.target][q]) sum.reduced2 += t.coefficient;
    }
    const double inv = 1.0 / (m + 1);
    trace[m] = {sum.full * inv, sum.reduced1 * inv, sum.reduced2 * inv};
  }
  return trace;
}

// Running estimates of one element with per-circuit histograms mitigated
// after every step.
std::vector<FidelityTriple> sample_element_mitigated(const SeqptSetup& setup, const ShotSampler& sampler,
                                                     const CircuitBank& bank, const ReadoutModel& readout,
                                                     const IndicatorMasks& masks, int i, int j, int m_max, Rng& rng,
                                                     std::int64_t* executed) {
  struct Slot {
    std::vector<double> hist;
    std::int64_t n = 0;
    std::vector<Complex> w_full, w1, w2;  // weights per qudit outcome
    FidelityTriple contribution{};
  };
  const int d = setup.dim();
  const int raw_size = static_cast<int>(bank.raw_to_qudit().size());
  const std::vector<int>& raw_to_qudit = bank.raw_to_qudit();
  std::map<int, Slot> slots;
  const int n_states = setup.design().size();
  std::uniform_int_distribution<int> pick(0, n_states - 1);
  std::vector<FidelityTriple> trace(m_max);
  FidelityTriple total{};
  std::vector<int> touched;
  for (int m = 0; m < m_max; ++m) {
    const KeyedPlan plan = keyed_plan(setup, i, j, pick(rng));
    touched.clear();
    for (const KeyedTerm& t : plan.terms) {
      const int id = sampler.id(t.key);
      Slot& slot = slots[id];
      if (slot.hist.empty()) {
        slot.hist.assign(raw_size, 0.0);
        slot.w_full.assign(d + 1, 0.0);
        slot.w1.assign(d + 1, 0.0);
        slot.w2.assign(d + 1, 0.0);
      }
      slot.hist[sampler.draw(id, rng)] += 1.0;
      ++slot.n;
      ++*executed;
      for (int q = 0; q < d; ++q) {
        if (masks.full[plan.target][q]) slot.w_full[q] += t.coefficient;
        if (masks.reduced1[plan.target][q]) slot.w1[q] += t.coefficient;
        if (masks.reduced2[plan.target][q]) slot.w2[q] += t.coefficient;
      }
      touched.push_back(id);
    }
    std::sort(touched.begin(), touched.end());
    touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
    for (int id : touched) {
      Slot& slot = slots[id];
      std::vector<double> freq(raw_size);
      for (int k = 0; k < raw_size; ++k) freq[k] = slot.hist[k] / static_cast<double>(slot.n);
      freq = mitigate(freq, readout);
      std::vector<double> q(d + 1, 0.0);
      for (int k = 0; k < raw_size; ++k) q[raw_to_qudit[k]] += freq[k];
      FidelityTriple c{};
      for (int l = 0; l < d; ++l) {
        c.full += slot.w_full[l] * q[l];
        c.reduced1 += slot.w1[l] * q[l];
        c.reduced2 += slot.w2[l] * q[l];
      }
      total.full += c.full - slot.contribution.full;
      total.reduced1 += c.reduced1 - slot.contribution.reduced1;
      total.reduced2 += c.reduced2 - slot.contribution.reduced2;
      slot.contribution = c;
    }
    const double inv = 1.0 / (m + 1);
    trace[m] = {total.full * inv, total.reduced1 * inv, total.reduced2 * inv};
  }
  return trace;
}

}  // namespace

SelectiveResult selective_reconstruct(const Channel& ch, const SeqptSetup& setup, ReconstructionMode mode,
                                      const LossOperator& p, const SelectiveOptions& options,
                                      const ComplexMatrix& reference, Execution execution) {
  const int n = setup.basis().size();
  if (options.m_max <= 0) throw std::invalid_argument("selective: m_max must be positive");
  if (options.repetitions <= 0) throw std::invalid_argument("selective: repetitions must be positive");
  if (options.elements.empty()) throw std::invalid_argument("selective: no elements requested");
  if (reference.rows() != n || reference.cols() != n) throw std::invalid_argument("selective: reference shape");
  for (const auto& [i, j] : options.elements) {
    if (i < 0 || j < 0 || i >= n || j >= n) throw std::out_of_range("selective: element index out of range");
  }
  if (options.iterative_mitigation && !options.readout) {
    throw std::invalid_argument("selective: mitigation needs a readout model");
  }

  Estimator est = Estimator::with_shots(1, options.seed, options.readout, false);
  const CircuitBank bank(ch, setup.design(), est);
  const ShotSampler sampler(bank, all_circuit_keys(setup.design()), options.readout);
  const IndicatorMasks masks = indicator_masks(setup);
  const ElementFormula formula(setup, mode, p);
  const ComplexMatrix ref_root = sqrtm_psd(hermitian_part(reference));
  const double ref_trace = reference.trace().real();
  const double trace_target = p.trace();
  const int n_el = static_cast<int>(options.elements.size());

  std::vector<std::pair<int, int>> mirrors;
  for (const auto& [i, j] : options.elements) {
    if (i != j && std::find(options.elements.begin(), options.elements.end(), std::make_pair(j, i)) ==
                      options.elements.end()) {
      mirrors.emplace_back(i, j);
    }
  }

  SelectiveResult result;
  result.mean_fidelity.assign(options.m_max, 0.0);
  for (int rep = 0; rep < options.repetitions; ++rep) {
    std::vector<std::vector<FidelityTriple>> traces(n_el);
    std::vector<std::int64_t> executed(n_el, 0);
    for_each_index(n_el, execution, [&](int e) {
      const auto [i, j] = options.elements[e];
      Rng rng = make_stream(options.seed, "selective", {static_cast<std::uint64_t>(rep), static_cast<std::uint64_t>(e)});
      traces[e] = options.iterative_mitigation
                      ? sample_element_mitigated(setup, sampler, bank, *options.readout, masks, i, j, options.m_max,
                                                 rng, &executed[e])
                      : sample_element_direct(setup, sampler, bank.raw_to_qudit(), masks, i, j, options.m_max, rng,
                                              &executed[e]);
    });

    SelectiveRun run;
    run.fidelity.assign(options.m_max, 0.0);
    run.elements.assign(options.m_max, std::vector<Complex>(n_el));
    for (int e = 0; e < n_el; ++e) {
      const auto [i, j] = options.elements[e];
      for (int m = 0; m < options.m_max; ++m) run.elements[m][e] = formula(i, j, traces[e][m]);
      run.circuits_executed += executed[e];
    }

    auto assemble = [&](int m) {
      ComplexMatrix chi = ComplexMatrix::Zero(n, n);
      for (int e = 0; e < n_el; ++e) {
        const auto [i, j] = options.elements[e];
        chi(i, j) = run.elements[m][e];
      }
      for (const auto& [i, j] : mirrors) chi(j, i) = std::conj(chi(i, j));
      chi = hermitian_part(chi);
      if (options.project) chi = project_physical(chi, setup.basis(), trace_target, options.projection).chi_opt;
      return chi;
    };

    for_each_index(options.m_max, execution, [&](int m) {
      const ComplexMatrix chi = assemble(m);
      run.fidelity[m] = chi.trace().real() > 0.0 ? process_fidelity_with_root(ref_root, ref_trace, chi) : 0.0;
    });
    run.chi_final = assemble(options.m_max - 1);
    for (int m = 0; m < options.m_max; ++m) result.mean_fidelity[m] += run.fidelity[m] / options.repetitions;
    result.runs.push_back(std::move(run));
  }
  return result;
}

ReconstructionResult sqpt_reconstruct(const Channel& ch, const Estimator& estimator, Execution execution) {
  const int d = ch.dim();
  const SeqptSetup setup = SeqptSetup::for_dim(d);
  const StateDesign& design = setup.design();
  const OperatorBasis& basis = setup.basis();
  const int n = basis.size();
  const CircuitBank bank(ch, design, estimator);

  // Linear model p_s = <psi_s| rho |psi_s> on column-major vec(rho).
  const int n_states = design.size();
  ComplexMatrix model(n_states, d * d);
  for (int s = 0; s < n_states; ++s) {
    const ComplexVector psi = design.state(s);
    for (int c = 0; c < d; ++c) {
      for (int r = 0; r < d; ++r) model(s, r + c * d) = std::conj(psi(r)) * psi(c);
    }
  }
  Eigen::JacobiSVD<ComplexMatrix> svd(model, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const RealVector sv = svd.singularValues();
  const double condition = sv(sv.size() - 1) > 0.0 ? sv(0) / sv(sv.size() - 1) : INFINITY;
  if (!(condition <= 1e8)) throw std::domain_error("sqpt: state tomography is ill-conditioned");

  // Inputs: |k>, then (|k>+|k'>)/sqrt2 and (|k>+i|k'>)/sqrt2 for k < k'.
  struct Input {
    int k, kp;
    CircuitKey::Kind kind;
  };
  std::vector<Input> inputs;
  for (int k = 0; k < d; ++k) inputs.push_back({k, k, CircuitKey::Kind::kSingle});
  for (int k = 0; k < d; ++k) {
    for (int kp = k + 1; kp < d; ++kp) {
      inputs.push_back({k, kp, CircuitKey::Kind::kPlus});
      inputs.push_back({k, kp, CircuitKey::Kind::kMinus});
    }
  }
  const int n_in = static_cast<int>(inputs.size());
  const int n_bases = design.num_bases();

  std::vector<ComplexMatrix> outputs(n_in);
  for_each_index(n_in, execution, [&](int x) {
    const Input& in = inputs[x];
    ComplexVector prep = ComplexVector::Zero(d);
    prep(in.k) = 1.0;
    if (in.kind == CircuitKey::Kind::kPlus) prep(in.kp) = 1.0;
    if (in.kind == CircuitKey::Kind::kMinus) prep(in.kp) = kI;
    prep.normalize();
    ComplexVector probs(n_states);
    for (int b = 0; b < n_bases; ++b) {
      const std::vector<double> q =
          bank.execute(prep, b, "sqpt-circuit", {static_cast<std::uint64_t>(x), static_cast<std::uint64_t>(b)});
      for (int m = 0; m < d; ++m) probs(design.flat(b, m)) = q[m];
    }
    const ComplexVector vec_rho = svd.solve(probs);
    outputs[x] = hermitian_part(vec_rho.reshaped(d, d));
  });

  // E(|a><b|) from the input outputs.
  std::vector<ComplexMatrix> image(d * d);
  std::vector<int> single_of(d);
  for (int x = 0; x < n_in; ++x) {
    if (inputs[x].kind == CircuitKey::Kind::kSingle) single_of[inputs[x].k] = x;
  }
  for (int x = 0; x < n_in; ++x) {
    const Input& in = inputs[x];
    if (in.kind == CircuitKey::Kind::kSingle) image[in.k * d + in.k] = outputs[x];
    if (in.kind != CircuitKey::Kind::kPlus) continue;
    const ComplexMatrix& plus = outputs[x];
    const ComplexMatrix& minus = outputs[x + 1];
    const ComplexMatrix diag = outputs[single_of[in.k]] + outputs[single_of[in.kp]];
    const ComplexMatrix ab = plus + kI * minus - kHalfOnePlusI * diag;
    image[in.k * d + in.kp] = ab;
    image[in.kp * d + in.k] = ab.adjoint();
  }

  // chi_ij = (1/d^2) sum_ab <a| E_i^dag E(|a><b|) E_j |b>
  ComplexMatrix chi(n, n);
  for_each_index(n, execution, [&](int i) {
    const ComplexMatrix ei_adj = basis[i].adjoint();
    std::vector<ComplexVector> rows(d * d);
    for (int a = 0; a < d; ++a) {
      for (int b = 0; b < d; ++b) rows[a * d + b] = (ei_adj.row(a) * image[a * d + b]).transpose();
    }
    for (int j = 0; j < n; ++j) {
      Complex acc = 0.0;
      for (int a = 0; a < d; ++a) {
        for (int b = 0; b < d; ++b) acc += rows[a * d + b].cwiseProduct(basis[j].col(b)).sum();
      }
      chi(i, j) = acc / static_cast<double>(d * d);
    }
  });

  ReconstructionResult r;
  r.dim = d;
  r.mode = "sqpt";
  r.basis = basis.name();
  r.chi_raw = hermitian_part(chi);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) r.mask.emplace_back(i, j);
  }
  r.circuits_executed = n_in * n_bases;
  r.shots_total = estimator.kind == Estimator::Kind::kShots ? estimator.shots * r.circuits_executed : 0;
  return r;
}

nlohmann::json reconstruction_to_json(const ReconstructionResult& r) {
  nlohmann::json mask = nlohmann::json::array();
  for (const auto& [i, j] : r.mask) mask.push_back({i, j});
  const nlohmann::json chi = matrix_to_json(r.chi_raw);
  nlohmann::json j = {{"dim", r.dim},
                      {"mode", r.mode},
                      {"basis", r.basis},
                      {"chi_real", chi.at("real")},
                      {"chi_imag", chi.at("imag")},
                      {"mask", mask},
                      {"circuits_executed", r.circuits_executed},
                      {"shots_total", r.shots_total}};
  if (r.fidelity_vs_true) j["fidelity_vs_true"] = *r.fidelity_vs_true;
  return j;
}

ReconstructionResult reconstruction_from_json(const nlohmann::json& j) {
  ReconstructionResult r;
  r.dim = j.at("dim").get<int>();
  r.mode = j.at("mode").get<std::string>();
  r.basis = j.at("basis").get<std::string>();
  r.chi_raw = matrix_from_json({{"real", j.at("chi_real")}, {"imag", j.at("chi_imag")}});
  for (const auto& e : j.at("mask")) r.mask.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
  r.circuits_executed = j.at("circuits_executed").get<int>();
  r.shots_total = j.at("shots_total").get<std::int64_t>();
  if (j.contains("fidelity_vs_true")) r.fidelity_vs_true = j.at("fidelity_vs_true").get<double>();
  if (r.chi_raw.rows() != r.dim * r.dim) throw std::invalid_argument("reconstruction: chi shape does not match dim");
  return r;
}

}  // namespace seqpt
