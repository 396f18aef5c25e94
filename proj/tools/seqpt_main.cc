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

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "seqpt/experiment.h"

namespace {

struct Flags {
  std::string config;
  int dim = 3;
  std::string process;
  double loss = 0.0;
  std::string mode;
  std::string estimator;
  std::int64_t shots = 0;
  double readout_fidelity = 1.0;
  bool mitigate = false;
  bool no_project = false;
  std::string elements;
  int m = 0;
  int reps = 0;
  std::uint64_t seed = 0;
  std::string out;
  bool serial = false;
};

struct Options {
  CLI::Option* dim = nullptr;
  CLI::Option* process = nullptr;
  CLI::Option* loss = nullptr;
  CLI::Option* mode = nullptr;
  CLI::Option* estimator = nullptr;
  CLI::Option* shots = nullptr;
  CLI::Option* readout = nullptr;
  CLI::Option* mitigate = nullptr;
  CLI::Option* no_project = nullptr;
  CLI::Option* elements = nullptr;
  CLI::Option* m = nullptr;
  CLI::Option* reps = nullptr;
  CLI::Option* seed = nullptr;
  CLI::Option* out = nullptr;
};

void add_common(CLI::App* cmd, Flags& f, Options& o) {
  cmd->add_option("--config", f.config, "JSON config file; flags override its values")->check(CLI::ExistingFile);
  o.dim = cmd->add_option("--dim", f.dim, "Qudit dimension");
  o.process = cmd->add_option("--process", f.process, "id | h01 | h12 | phase | swap25 (compare also takes all)");
  o.loss = cmd->add_option("--loss", f.loss, "Beamsplitter reflectivity on the lossy levels");
  o.mode = cmd->add_option("--mode", f.mode, "tp | ntp | bipartite-ntp");
  o.estimator = cmd->add_option("--estimator", f.estimator, "exact | shots | shots:N");
  o.shots = cmd->add_option("--shots", f.shots, "Shots per circuit");
  o.readout = cmd->add_option("--readout-fidelity", f.readout_fidelity, "Register readout fidelity");
  o.mitigate = cmd->add_flag("--mitigate", f.mitigate, "Invert the readout confusion matrix");
  o.seed = cmd->add_option("--seed", f.seed, "Root seed (falls back to SEQPT_SEED)");
  o.out = cmd->add_option("--out", f.out, "Output directory (designs: JSON file)");
  cmd->add_flag("--serial", f.serial, "Run the serial reference kernels");
}

seqpt::ExperimentConfig resolve(const Flags& f, const Options& o) {
  seqpt::ExperimentConfig cfg;
  if (const char* env = std::getenv("SEQPT_SEED")) cfg.seed = std::stoull(env);
  if (!f.config.empty()) {
    std::ifstream in(f.config);
    cfg = seqpt::config_from_json(nlohmann::json::parse(in), cfg);
  }
  if (o.dim && o.dim->count()) cfg.dim = f.dim;
  if (o.process && o.process->count()) cfg.process = f.process;
  if (o.loss && o.loss->count()) cfg.loss = f.loss;
  if (o.mode && o.mode->count()) cfg.mode = seqpt::parse_mode(f.mode);
  if (o.estimator && o.estimator->count()) cfg.estimator = f.estimator;
  if (o.shots && o.shots->count()) cfg.shots = f.shots;
  if (o.readout && o.readout->count()) cfg.readout_fidelity = f.readout_fidelity;
  if (o.mitigate && o.mitigate->count()) cfg.mitigate = true;
  if (o.no_project && o.no_project->count()) cfg.project = false;
  if (o.elements && o.elements->count()) cfg.elements = f.elements;
  if (o.m && o.m->count()) cfg.m_max = f.m;
  if (o.reps && o.reps->count()) cfg.repetitions = f.reps;
  if (o.seed && o.seed->count()) cfg.seed = f.seed;
  if (o.out && o.out->count()) cfg.out = f.out;
  return cfg;
}

int cmd_designs(const seqpt::ExperimentConfig& cfg) {
  const seqpt::SeqptSetup setup = seqpt::SeqptSetup::for_dim(cfg.dim);
  const seqpt::StateDesign& design = setup.design();
  std::cout << "DESIGN dim=" << design.dim() << " bases=" << design.num_bases() << " states=" << design.size()
            << " frame_potential=" << seqpt::frame_potential(design)
            << " bound=" << seqpt::two_design_bound(design.dim(), design.size()) << "\n";
  if (!cfg.out.empty()) seqpt::write_json(cfg.out, seqpt::design_to_json(design));
  return 0;
}

int cmd_run(const seqpt::ExperimentConfig& cfg, seqpt::Execution exec) {
  const seqpt::RunOutcome out = seqpt::run_experiment(cfg, exec);
  if (!cfg.out.empty()) {
    const std::filesystem::path dir(cfg.out);
    seqpt::write_json(dir / "reconstruction.json", seqpt::reconstruction_to_json(out.result));
    seqpt::write_json(dir / "projection.json", seqpt::projection_report_to_json(out.projection));
  }
  std::cout << seqpt::result_line(cfg.process, out.result.mode, out.result.circuits_executed, out.result.shots_total,
                                  out.fidelity)
            << "\n";
  if (!out.projection.converged) {
    std::cerr << "physicality projection did not converge\n";
    return 2;
  }
  return 0;
}

int cmd_selective(const seqpt::ExperimentConfig& cfg, seqpt::Execution exec) {
  const seqpt::SelectiveOutcome out = seqpt::run_selective(cfg, exec);
  if (!cfg.out.empty()) {
    const std::filesystem::path dir(cfg.out);
    for (std::size_t r = 0; r < out.result.runs.size(); ++r) {
      seqpt::write_text(dir / ("selective_rep" + std::to_string(r) + ".csv"),
                        seqpt::series_csv(out.result.runs[r].fidelity));
    }
    seqpt::write_text(dir / "selective_mean.csv", seqpt::series_csv(out.result.mean_fidelity));
    nlohmann::json summary = {{"config", seqpt::config_to_json(cfg)},
                              {"elements", out.elements},
                              {"circuits_executed", out.circuits_executed},
                              {"final_mean_fidelity", out.result.mean_fidelity.back()}};
    seqpt::write_json(dir / "selective_summary.json", summary);
  }
  std::cout << "SELECTIVE elements=" << out.elements.size() << " m=" << cfg.m_max << " reps=" << cfg.repetitions
            << "\n";
  std::cout << seqpt::result_line(cfg.process, "selective-" + seqpt::to_string(seqpt::effective_mode(cfg)),
                                  out.circuits_executed, out.circuits_executed, out.result.mean_fidelity.back())
            << "\n";
  return 0;
}

int cmd_compare(const seqpt::ExperimentConfig& cfg, seqpt::Execution exec) {
  const std::vector<seqpt::CompareRow> rows = seqpt::run_compare(cfg, exec);
  std::cout << seqpt::format_compare_table(rows);
  if (!cfg.out.empty()) seqpt::write_text(std::filesystem::path(cfg.out) / "compare.csv", seqpt::compare_csv(rows));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Selective and efficient quantum process tomography for qudits"};
  app.require_subcommand(1);

  Flags f;
  Options o_designs, o_run, o_selective, o_compare;
  CLI::App* designs = app.add_subcommand("designs", "Print (and optionally export) the state design for --dim");
  add_common(designs, f, o_designs);
  CLI::App* run = app.add_subcommand("run", "Full chi reconstruction");
  add_common(run, f, o_run);
  CLI::App* selective = app.add_subcommand("selective", "Selective single-shot reconstruction series");
  add_common(selective, f, o_selective);
  o_selective.elements = selective->add_option("--elements", f.elements, "nonzero | i:j,i:j,...");
  o_selective.m = selective->add_option("--m", f.m, "Sampling steps per element");
  o_selective.reps = selective->add_option("--reps", f.reps, "Repetitions");
  o_selective.no_project = selective->add_flag("--no-project", f.no_project, "Score the raw estimate");
  CLI::App* compare = app.add_subcommand("compare", "SEQPT-TP, SEQPT-NTP and SQPT side by side");
  add_common(compare, f, o_compare);

  CLI11_PARSE(app, argc, argv);

  try {
    const seqpt::Execution exec = f.serial ? seqpt::Execution::kSerial : seqpt::Execution::kParallel;
    if (designs->parsed()) return cmd_designs(resolve(f, o_designs));
    if (run->parsed()) return cmd_run(resolve(f, o_run), exec);
    if (selective->parsed()) return cmd_selective(resolve(f, o_selective), exec);
    if (compare->parsed()) {
      seqpt::ExperimentConfig cfg = resolve(f, o_compare);
      if (!o_compare.process->count() && f.config.empty()) cfg.process = "all";
      return cmd_compare(cfg, exec);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
