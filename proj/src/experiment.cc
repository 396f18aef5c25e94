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

#include "seqpt/experiment.h"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace seqpt {

namespace {

std::string format_double(const char* fmt, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, x);
  return buf;
}

std::vector<std::string> processes_for_dim(int dim) {
  if (dim == 3) return {"id", "h01", "h12"};
  if (dim == 6) return {"id", "phase", "swap25"};
  return {"id"};
}

std::pair<int, int> parse_element(const std::string& token) {
  const auto colon = token.find(':');
  if (colon == std::string::npos) throw std::invalid_argument("element '" + token + "' is not of the form i:j");
  std::size_t used_i = 0;
  std::size_t used_j = 0;
  const std::string si = token.substr(0, colon);
  const std::string sj = token.substr(colon + 1);
  const int i = std::stoi(si, &used_i);
  const int j = std::stoi(sj, &used_j);
  if (used_i != si.size() || used_j != sj.size()) throw std::invalid_argument("element '" + token + "' is malformed");
  return {i, j};
}

double projected_fidelity(const ComplexMatrix& chi_theo, const ComplexMatrix& chi_raw, const OperatorBasis& basis,
                          double trace_target) {
  const ProjectionReport rep = project_physical(chi_raw, basis, trace_target);
  return process_fidelity(chi_theo, rep.chi_opt);
}

}  // namespace

nlohmann::json config_to_json(const ExperimentConfig& cfg) {
  nlohmann::json j = {{"dim", cfg.dim},
                      {"process", cfg.process},
                      {"loss", cfg.loss},
                      {"estimator", cfg.estimator},
                      {"shots", cfg.shots},
                      {"mitigate", cfg.mitigate},
                      {"elements", cfg.elements},
                      {"m", cfg.m_max},
                      {"reps", cfg.repetitions},
                      {"seed", cfg.seed},
                      {"out", cfg.out},
                      {"project", cfg.project}};
  if (cfg.mode) j["mode"] = to_string(*cfg.mode);
  if (cfg.readout_fidelity) j["readout_fidelity"] = *cfg.readout_fidelity;
  return j;
}

ExperimentConfig config_from_json(const nlohmann::json& j, ExperimentConfig base) {
  if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (key == "dim") base.dim = value.get<int>();
    else if (key == "process") base.process = value.get<std::string>();
    else if (key == "loss") base.loss = value.get<double>();
    else if (key == "mode") base.mode = parse_mode(value.get<std::string>());
    else if (key == "estimator") base.estimator = value.get<std::string>();
    else if (key == "shots") base.shots = value.get<std::int64_t>();
    else if (key == "readout_fidelity") base.readout_fidelity = value.get<double>();
    else if (key == "mitigate") base.mitigate = value.get<bool>();
    else if (key == "elements") base.elements = value.get<std::string>();
    else if (key == "m") base.m_max = value.get<int>();
    else if (key == "reps") base.repetitions = value.get<int>();
    else if (key == "seed") base.seed = value.get<std::uint64_t>();
    else if (key == "out") base.out = value.get<std::string>();
    else if (key == "project") base.project = value.get<bool>();
    else throw std::invalid_argument("unknown config key '" + key + "'");
  }
  return base;
}

ReconstructionMode effective_mode(const ExperimentConfig& cfg) {
  if (cfg.mode) return *cfg.mode;
  return is_supported_prime(cfg.dim) ? ReconstructionMode::kNtp : ReconstructionMode::kBipartiteNtp;
}

void validate(const ExperimentConfig& cfg) {
  if (cfg.dim < 2) throw std::invalid_argument("dim must be at least 2");
  if (!(cfg.loss >= 0.0 && cfg.loss <= 1.0)) throw std::invalid_argument("loss must lie in [0, 1]");
  if (cfg.m_max <= 0) throw std::invalid_argument("m must be positive");
  if (cfg.repetitions <= 0) throw std::invalid_argument("reps must be positive");
  if (cfg.readout_fidelity && !(*cfg.readout_fidelity > 0.0 && *cfg.readout_fidelity <= 1.0)) {
    throw std::invalid_argument("readout fidelity must lie in (0, 1]");
  }
  // Throws for dimensions without a design and for mode/dimension mismatches.
  setup_for_mode(effective_mode(cfg), cfg.dim);
  if (cfg.process != "all") make_channel(cfg);
}

std::optional<ReadoutModel> make_readout(const ExperimentConfig& cfg) {
  if (!cfg.readout_fidelity) return std::nullopt;
  return ReadoutModel::from_register_fidelity(default_embedding(cfg.dim).n_qubits, *cfg.readout_fidelity);
}

Estimator make_estimator(const ExperimentConfig& cfg) {
  const std::string& e = cfg.estimator;
  if (e == "exact") {
    if (cfg.readout_fidelity) throw std::invalid_argument("readout errors need a shots estimator");
    return Estimator::exact();
  }
  std::int64_t shots = cfg.shots;
  if (e.rfind("shots:", 0) == 0) {
    std::size_t used = 0;
    const std::string count = e.substr(6);
    const std::int64_t parsed = std::stoll(count, &used);
    if (used != count.size()) throw std::invalid_argument("malformed estimator '" + e + "'");
    if (shots == 0) shots = parsed;
  } else if (e != "shots") {
    throw std::invalid_argument("estimator must be exact, shots or shots:N");
  }
  if (shots <= 0) throw std::invalid_argument("shots must be positive");
  return Estimator::with_shots(shots, cfg.seed, make_readout(cfg), cfg.mitigate);
}

Channel make_channel(const ExperimentConfig& cfg) {
  return make_process(parse_process_name(cfg.process), cfg.dim, cfg.loss);
}

LossOperator channel_loss(const ExperimentConfig& cfg) {
  const Channel ch = make_channel(cfg);
  ComplexMatrix p = ComplexMatrix::Zero(cfg.dim, cfg.dim);
  for (const auto& a : ch.kraus()) p += a.adjoint() * a;
  return LossOperator::from_matrix(p);
}

std::vector<std::pair<int, int>> resolve_elements(const ExperimentConfig& cfg, const SeqptSetup& setup) {
  if (cfg.elements == "nonzero") return nonzero_elements(kraus_to_chi(make_channel(cfg), setup.basis()), 1e-9);
  std::vector<std::pair<int, int>> out;
  std::stringstream ss(cfg.elements);
  std::string token;
  while (std::getline(ss, token, ',')) {
    if (!token.empty()) out.push_back(parse_element(token));
  }
  if (out.empty()) throw std::invalid_argument("no elements listed");
  const int n = setup.basis().size();
  for (const auto& [i, j] : out) {
    if (i < 0 || j < 0 || i >= n || j >= n) {
      throw std::out_of_range("element " + std::to_string(i) + ":" + std::to_string(j) + " is outside the chi matrix");
    }
  }
  return out;
}

RunOutcome run_experiment(const ExperimentConfig& cfg, Execution execution) {
  validate(cfg);
  const ReconstructionMode mode = effective_mode(cfg);
  const SeqptSetup setup = setup_for_mode(mode, cfg.dim);
  const Channel ch = make_channel(cfg);
  const LossOperator p = assumed_loss(mode, channel_loss(cfg), cfg.dim);

  RunOutcome out;
  out.result = full_reconstruct(ch, setup, mode, p, make_estimator(cfg), execution);
  out.projection = project_physical(out.result.chi_raw, setup.basis(), p.trace());
  out.fidelity = process_fidelity(kraus_to_chi(ch, setup.basis()), out.projection.chi_opt);
  out.result.fidelity_vs_true = out.fidelity;
  return out;
}

SelectiveOutcome run_selective(const ExperimentConfig& cfg, Execution execution) {
  validate(cfg);
  const ReconstructionMode mode = effective_mode(cfg);
  const SeqptSetup setup = setup_for_mode(mode, cfg.dim);
  const Channel ch = make_channel(cfg);
  const LossOperator p = assumed_loss(mode, channel_loss(cfg), cfg.dim);

  SelectiveOptions options;
  options.elements = resolve_elements(cfg, setup);
  options.m_max = cfg.m_max;
  options.repetitions = cfg.repetitions;
  options.seed = cfg.seed;
  options.readout = make_readout(cfg);
  options.iterative_mitigation = cfg.mitigate && options.readout.has_value();
  options.project = cfg.project;

  SelectiveOutcome out;
  out.elements = options.elements;
  out.result = selective_reconstruct(ch, setup, mode, p, options, kraus_to_chi(ch, setup.basis()), execution);
  for (const auto& run : out.result.runs) out.circuits_executed += run.circuits_executed;
  return out;
}

std::vector<CompareRow> run_compare(const ExperimentConfig& cfg, Execution execution) {
  validate(cfg);
  const std::vector<std::string> names =
      cfg.process == "all" ? processes_for_dim(cfg.dim) : std::vector<std::string>{cfg.process};
  const ReconstructionMode ntp_mode = effective_mode(cfg) == ReconstructionMode::kTp
                                          ? (is_supported_prime(cfg.dim) ? ReconstructionMode::kNtp
                                                                         : ReconstructionMode::kBipartiteNtp)
                                          : effective_mode(cfg);
  const SeqptSetup tp_setup = setup_for_mode(ReconstructionMode::kTp, cfg.dim);
  const SeqptSetup ntp_setup = setup_for_mode(ntp_mode, cfg.dim);
  const Estimator est = make_estimator(cfg);
  const LossOperator identity = LossOperator::identity(cfg.dim);

  std::vector<CompareRow> rows;
  for (const std::string& name : names) {
    ExperimentConfig lossless = cfg;
    lossless.process = name;
    lossless.loss = 0.0;
    ExperimentConfig lossy = lossless;
    lossy.loss = cfg.loss;
    const Channel ch0 = make_channel(lossless);
    const Channel ch = make_channel(lossy);
    const LossOperator p = channel_loss(lossy);
    const ComplexMatrix theo0 = kraus_to_chi(ch0, tp_setup.basis());
    const ComplexMatrix theo = kraus_to_chi(ch, ntp_setup.basis());

    CompareRow row;
    row.process = name;
    const auto tp_seqpt = full_reconstruct(ch0, tp_setup, ReconstructionMode::kTp, identity, est, execution);
    row.tp_seqpt = projected_fidelity(theo0, tp_seqpt.chi_raw, tp_setup.basis(), identity.trace());
    row.tp_sqpt = projected_fidelity(theo0, sqpt_reconstruct(ch0, est, execution).chi_raw, tp_setup.basis(),
                                     identity.trace());
    const auto ntp_seqpt = full_reconstruct(ch, ntp_setup, ntp_mode, p, est, execution);
    row.ntp_seqpt = projected_fidelity(theo, ntp_seqpt.chi_raw, ntp_setup.basis(), p.trace());
    row.ntp_sqpt =
        projected_fidelity(theo, sqpt_reconstruct(ch, est, execution).chi_raw, ntp_setup.basis(), p.trace());
    const auto penalty = full_reconstruct(ch, tp_setup, ReconstructionMode::kTp, identity, est, execution);
    row.ntp_seqpt_tpmode =
        projected_fidelity(kraus_to_chi(ch, tp_setup.basis()), penalty.chi_raw, tp_setup.basis(), identity.trace());
    rows.push_back(row);
  }
  return rows;
}

std::string result_line(const std::string& process, const std::string& mode, std::int64_t circuits,
                        std::int64_t shots, double fidelity) {
  std::ostringstream os;
  os << "RESULT process=" << process << " mode=" << mode << " circuits=" << circuits << " shots=" << shots
     << " fidelity=" << format_double("%.6f", fidelity);
  return os.str();
}

std::string format_compare_table(const std::vector<CompareRow>& rows) {
  std::ostringstream os;
  char line[160];
  std::snprintf(line, sizeof line, "%-10s %10s %10s %10s %10s %14s\n", "process", "TP-SEQPT", "TP-SQPT", "NTP-SEQPT",
                "NTP-SQPT", "NTP(TP-mode)");
  os << line;
  for (const CompareRow& r : rows) {
    std::snprintf(line, sizeof line, "%-10s %10.6f %10.6f %10.6f %10.6f %14.6f\n", r.process.c_str(), r.tp_seqpt,
                  r.tp_sqpt, r.ntp_seqpt, r.ntp_sqpt, r.ntp_seqpt_tpmode);
    os << line;
  }
  return os.str();
}

std::string compare_csv(const std::vector<CompareRow>& rows) {
  std::ostringstream os;
  os << "process,tp_seqpt,tp_sqpt,ntp_seqpt,ntp_sqpt,ntp_seqpt_tpmode\n";
  for (const CompareRow& r : rows) {
    os << r.process << ',' << format_double("%.12f", r.tp_seqpt) << ',' << format_double("%.12f", r.tp_sqpt) << ','
       << format_double("%.12f", r.ntp_seqpt) << ',' << format_double("%.12f", r.ntp_sqpt) << ','
       << format_double("%.12f", r.ntp_seqpt_tpmode) << '\n';
  }
  return os.str();
}

std::string series_csv(const std::vector<double>& fidelity) {
  std::string s = "m,fidelity\n";
  for (std::size_t m = 0; m < fidelity.size(); ++m) {
    s += std::to_string(m + 1) + ',' + format_double("%.12f", fidelity[m]) + '\n';
  }
  return s;
}

nlohmann::json design_to_json(const StateDesign& design) {
  nlohmann::json bases = nlohmann::json::array();
  for (int b = 0; b < design.num_bases(); ++b) bases.push_back(matrix_to_json(design.basis(b)));
  return {{"dim", design.dim()},
          {"num_bases", design.num_bases()},
          {"num_states", design.size()},
          {"factor_dims", design.factor_dims()},
          {"frame_potential", frame_potential(design)},
          {"two_design_bound", two_design_bound(design.dim(), design.size())},
          {"bases", bases}};
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
  f << text;
  if (!f) throw std::runtime_error("failed writing " + path.string());
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) { write_text(path, j.dump(2) + "\n"); }

}  // namespace seqpt
