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

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace seqpt;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(experiment, config_round_trip) {
  ExperimentConfig cfg;
  cfg.dim = 6;
  cfg.process = "swap25";
  cfg.loss = 0.5;
  cfg.mode = ReconstructionMode::kBipartiteNtp;
  cfg.estimator = "shots:100";
  cfg.readout_fidelity = 0.9;
  cfg.mitigate = true;
  cfg.elements = "0:0,1:2";
  cfg.m_max = 12;
  cfg.repetitions = 2;
  cfg.seed = 99;
  cfg.project = false;
  const ExperimentConfig back = config_from_json(nlohmann::json::parse(config_to_json(cfg).dump()));
  EXPECT_EQ(config_to_json(back), config_to_json(cfg));
  EXPECT_EQ(back.mode, cfg.mode);
  EXPECT_EQ(back.readout_fidelity, cfg.readout_fidelity);
}

TEST(experiment, config_keeps_base_values) {
  ExperimentConfig base;
  base.seed = 5;
  base.dim = 6;
  const ExperimentConfig cfg = config_from_json(nlohmann::json{{"process", "h01"}, {"dim", 3}}, base);
  EXPECT_EQ(cfg.seed, 5u);
  EXPECT_EQ(cfg.dim, 3);
  EXPECT_EQ(cfg.process, "h01");
  EXPECT_THROW(config_from_json(nlohmann::json{{"dimension", 3}}), std::invalid_argument);
  EXPECT_THROW(config_from_json(nlohmann::json::array()), std::invalid_argument);
}

TEST(experiment, validate_rejects_inconsistent_settings) {
  ExperimentConfig cfg;
  EXPECT_NO_THROW(validate(cfg));
  cfg.loss = 1.5;
  EXPECT_THROW(validate(cfg), std::invalid_argument);
  cfg = {};
  cfg.dim = 6;
  cfg.mode = ReconstructionMode::kNtp;
  EXPECT_THROW(validate(cfg), std::invalid_argument);
  cfg = {};
  cfg.process = "h12";
  cfg.dim = 6;
  EXPECT_THROW(validate(cfg), std::invalid_argument);
  cfg = {};
  cfg.dim = 1;
  EXPECT_THROW(validate(cfg), std::invalid_argument);
  cfg = {};
  cfg.readout_fidelity = 0.0;
  EXPECT_THROW(validate(cfg), std::invalid_argument);
  cfg = {};
  cfg.m_max = 0;
  EXPECT_THROW(validate(cfg), std::invalid_argument);
}

TEST(experiment, estimator_parsing) {
  ExperimentConfig cfg;
  EXPECT_EQ(make_estimator(cfg).kind, Estimator::Kind::kExact);
  cfg.estimator = "shots:8192";
  EXPECT_EQ(make_estimator(cfg).shots, 8192);
  cfg.shots = 10;
  EXPECT_EQ(make_estimator(cfg).shots, 10);
  cfg.estimator = "shots";
  cfg.shots = 0;
  EXPECT_THROW(make_estimator(cfg), std::invalid_argument);
  cfg.estimator = "shots:12x";
  EXPECT_THROW(make_estimator(cfg), std::invalid_argument);
  cfg.estimator = "exact";
  cfg.readout_fidelity = 0.9;
  EXPECT_THROW(make_estimator(cfg), std::invalid_argument);
  cfg.estimator = "bayes";
  EXPECT_THROW(make_estimator(cfg), std::invalid_argument);
}

TEST(experiment, default_modes) {
  ExperimentConfig cfg;
  EXPECT_EQ(effective_mode(cfg), ReconstructionMode::kNtp);
  cfg.dim = 6;
  EXPECT_EQ(effective_mode(cfg), ReconstructionMode::kBipartiteNtp);
  cfg.mode = ReconstructionMode::kTp;
  EXPECT_EQ(effective_mode(cfg), ReconstructionMode::kTp);
}

TEST(experiment, element_lists) {
  ExperimentConfig cfg;
  cfg.process = "h01";
  const SeqptSetup setup = SeqptSetup::single(3);
  const auto nonzero = resolve_elements(cfg, setup);
  EXPECT_FALSE(nonzero.empty());
  const ComplexMatrix chi = kraus_to_chi(make_channel(cfg), setup.basis());
  for (const auto& [i, j] : nonzero) EXPECT_GT(std::abs(chi(i, j)), 1e-9);
  cfg.elements = "0:0, 3:4";
  EXPECT_EQ(resolve_elements(cfg, setup), (std::vector<std::pair<int, int>>{{0, 0}, {3, 4}}));
  cfg.elements = "0-0";
  EXPECT_THROW(resolve_elements(cfg, setup), std::invalid_argument);
  cfg.elements = "0:81";
  EXPECT_THROW(resolve_elements(cfg, setup), std::out_of_range);
}

TEST(experiment, result_line_format) {
  EXPECT_EQ(result_line("h01", "ntp", 36, 0, 0.99999996),
            "RESULT process=h01 mode=ntp circuits=36 shots=0 fidelity=1.000000");
  EXPECT_EQ(series_csv({0.5, 0.25}), "m,fidelity\n1,0.500000000000\n2,0.250000000000\n");
}

TEST(experiment, run_reproduces_exact_channels) {
  ExperimentConfig cfg;
  cfg.process = "h01";
  cfg.loss = 0.5;
  const RunOutcome r = run_experiment(cfg);
  EXPECT_EQ(r.result.circuits_executed, 36);
  EXPECT_NEAR(r.fidelity, 1.0, 1e-8);
  EXPECT_TRUE(r.projection.converged);
  ASSERT_TRUE(r.result.fidelity_vs_true.has_value());
}

TEST(experiment, runs_are_deterministic) {
  ExperimentConfig cfg;
  cfg.dim = 6;
  cfg.process = "phase";
  cfg.loss = 0.5;
  cfg.estimator = "shots:64";
  cfg.seed = 11;
  const std::string a = reconstruction_to_json(run_experiment(cfg, Execution::kSerial).result).dump();
  const std::string b = reconstruction_to_json(run_experiment(cfg, Execution::kParallel).result).dump();
  const std::string c = reconstruction_to_json(run_experiment(cfg, Execution::kParallel).result).dump();
  EXPECT_EQ(a, b);
  EXPECT_EQ(b, c);
  cfg.seed = 12;
  EXPECT_NE(reconstruction_to_json(run_experiment(cfg).result).dump(), a);
}

TEST(experiment, selective_runs_are_deterministic) {
  ExperimentConfig cfg;
  cfg.process = "h12";
  cfg.loss = 0.5;
  cfg.m_max = 30;
  cfg.repetitions = 2;
  cfg.seed = 4;
  cfg.readout_fidelity = 0.95;
  cfg.mitigate = true;
  const SelectiveOutcome a = run_selective(cfg, Execution::kSerial);
  const SelectiveOutcome b = run_selective(cfg, Execution::kParallel);
  EXPECT_EQ(series_csv(a.result.mean_fidelity), series_csv(b.result.mean_fidelity));
  EXPECT_EQ(a.circuits_executed, b.circuits_executed);
  EXPECT_EQ(a.result.mean_fidelity.size(), 30u);
}

TEST(experiment, compare_rows) {
  ExperimentConfig cfg;
  cfg.process = "all";
  cfg.loss = 0.5;
  const std::vector<CompareRow> rows = run_compare(cfg);
  ASSERT_EQ(rows.size(), 3u);
  for (const CompareRow& r : rows) {
    EXPECT_NEAR(r.tp_seqpt, 1.0, 1e-8) << r.process;
    EXPECT_NEAR(r.tp_sqpt, 1.0, 1e-8);
    EXPECT_NEAR(r.ntp_seqpt, 1.0, 1e-8);
    EXPECT_NEAR(r.ntp_sqpt, 1.0, 1e-8);
    EXPECT_LT(r.ntp_seqpt_tpmode, 0.99);
  }
  const std::string csv = compare_csv(rows);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "process,tp_seqpt,tp_sqpt,ntp_seqpt,ntp_sqpt,ntp_seqpt_tpmode");
  EXPECT_NE(format_compare_table(rows).find("NTP-SEQPT"), std::string::npos);
}

TEST(experiment, writes_outputs) {
  const std::filesystem::path dir = std::filesystem::temp_directory_path() / "seqpt_experiment_test";
  std::filesystem::remove_all(dir);
  write_text(dir / "a" / "x.csv", "m,fidelity\n");
  EXPECT_EQ(slurp(dir / "a" / "x.csv"), "m,fidelity\n");
  write_json(dir / "d.json", design_to_json(SeqptSetup::single(3).design()));
  const nlohmann::json j = nlohmann::json::parse(slurp(dir / "d.json"));
  EXPECT_EQ(j.at("dim").get<int>(), 3);
  std::filesystem::remove_all(dir);
}
