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

#ifndef SEQPT_EXPERIMENT_H
#define SEQPT_EXPERIMENT_H

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "seqpt/physicality.h"
#include "seqpt/tomography.h"

namespace seqpt {

/// Everything a run needs. Unset optionals take the defaults documented on
/// each field.
struct ExperimentConfig {
  int dim = 3;
  std::string process = "id";  // "all" is accepted by compare
  double loss = 0.0;
  std::optional<ReconstructionMode> mode;  // ntp for prime dim, bipartite-ntp otherwise
  std::string estimator = "exact";         // exact | shots | shots:N
  std::int64_t shots = 0;                  // overrides the count in shots:N
  std::optional<double> readout_fidelity;
  bool mitigate = false;
  std::string elements = "nonzero";  // nonzero | i:j,i:j,...
  int m_max = 4000;
  int repetitions = 10;
  std::uint64_t seed = 0;
  std::string out;  // output directory; empty writes nothing
  bool project = true;
};

nlohmann::json config_to_json(const ExperimentConfig& cfg);
/// Keys absent from `j` keep the values already in `base`.
ExperimentConfig config_from_json(const nlohmann::json& j, ExperimentConfig base = {});

/// Throws std::invalid_argument on inconsistent settings. The estimator is
/// checked where it is used, since selective runs are single-shot.
void validate(const ExperimentConfig& cfg);

ReconstructionMode effective_mode(const ExperimentConfig& cfg);
Estimator make_estimator(const ExperimentConfig& cfg);
std::optional<ReadoutModel> make_readout(const ExperimentConfig& cfg);
Channel make_channel(const ExperimentConfig& cfg);
/// P of the configured channel.
LossOperator channel_loss(const ExperimentConfig& cfg);
/// "nonzero" resolves against the analytic chi of the configured channel.
std::vector<std::pair<int, int>> resolve_elements(const ExperimentConfig& cfg, const SeqptSetup& setup);

struct RunOutcome {
  ReconstructionResult result;
  ProjectionReport projection;
  double fidelity = 0.0;
};

RunOutcome run_experiment(const ExperimentConfig& cfg, Execution execution = Execution::kParallel);

struct SelectiveOutcome {
  SelectiveResult result;
  std::vector<std::pair<int, int>> elements;
  std::int64_t circuits_executed = 0;
};

SelectiveOutcome run_selective(const ExperimentConfig& cfg, Execution execution = Execution::kParallel);

/// One row of the comparison table: the lossless process (TP columns), the
/// lossy process (NTP columns), and the lossy process under TP-mode SEQPT.
struct CompareRow {
  std::string process;
  double tp_seqpt = 0.0;
  double tp_sqpt = 0.0;
  double ntp_seqpt = 0.0;
  double ntp_sqpt = 0.0;
  double ntp_seqpt_tpmode = 0.0;
};

std::vector<CompareRow> run_compare(const ExperimentConfig& cfg, Execution execution = Execution::kParallel);

/// `RESULT process=<> mode=<> circuits=<> shots=<> fidelity=<6dp>`
std::string result_line(const std::string& process, const std::string& mode, std::int64_t circuits,
                        std::int64_t shots, double fidelity);

std::string format_compare_table(const std::vector<CompareRow>& rows);
std::string compare_csv(const std::vector<CompareRow>& rows);
/// Header `m,fidelity`, one row per step.
std::string series_csv(const std::vector<double>& fidelity);
nlohmann::json design_to_json(const StateDesign& design);

void write_text(const std::filesystem::path& path, const std::string& text);
void write_json(const std::filesystem::path& path, const nlohmann::json& j);

}  // namespace seqpt

#endif  // SEQPT_EXPERIMENT_H
