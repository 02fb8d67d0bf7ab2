// Copyright 2026 The pcot-harness Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end: ingest, run, report, analyze, import-benchmark.
//
// Exit codes: 0 success, 1 validation failure, 2 partial run, 3 I/O failure.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "pcot/runner/importer.hpp"
#include "pcot/runner/report.hpp"
#include "pcot/runner/run.hpp"

using namespace pcot;
using namespace pcot::runner;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitIo = 3;

RunPaths resolve_run(const std::string& run_id, const std::string& runs_dir, const std::string& config) {
  if (!config.empty()) {
    auto cfg = load_run_config(config);
    if (!run_id.empty() && run_id != cfg.run_id)
      throw ValidationError("run id '" + run_id + "' does not match config run_id '" + cfg.run_id + "'");
    return run_paths(cfg);
  }
  if (run_id.empty()) throw ValidationError("a run id or --config is required");
  return RunPaths{std::filesystem::path(runs_dir) / run_id};
}

void emit(const std::string& body, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << body;
    return;
  }
  write_file_atomic(out_path, body);
  std::cerr << "wrote " << out_path << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Phonological prompting benchmark harness", "pcot"};
  app.set_version_flag("--version", PCOT_VERSION);
  app.require_subcommand(1);

  std::string ingest_path, ingest_task, ingest_lexicon;
  auto* ingest = app.add_subcommand("ingest", "Validate a JSONL dataset and report split sizes");
  ingest->add_option("path", ingest_path, "Dataset file")->required()->check(CLI::ExistingFile);
  ingest->add_option("--task", ingest_task, "Expected task (rhyme, g2p, syllable)")->required();
  ingest->add_option("--lexicon", ingest_lexicon, "Pronouncing dictionary for \"lexicon\" gold fields");

  std::string run_config;
  std::size_t stop_after = 0;
  bool quiet = false;
  auto* run_cmd = app.add_subcommand("run", "Execute or resume the jobs in a run config");
  run_cmd->add_option("config", run_config, "Run config (JSON)")->required();
  run_cmd->add_option("--stop-after", stop_after, "Stop after this many jobs, leaving the run resumable");
  run_cmd->add_flag("--quiet", quiet, "No progress output");

  std::string run_id, runs_dir = "runs", report_config;
  auto* report_cmd = app.add_subcommand("report", "Write tables and analysis CSVs for a completed run");
  report_cmd->add_option("run_id", run_id, "Run id");
  report_cmd->add_option("--runs-dir", runs_dir, "Directory holding run directories")->capture_default_str();
  report_cmd->add_option("--config", report_config, "Locate the run through its config instead");

  std::string analysis_name, edges = "quintile", subset, sel_a = "pcot", sel_b = "baseline", out_path;
  auto* analyze = app.add_subcommand("analyze", "Compute one analysis from stored records");
  analyze->add_option("run_id", run_id, "Run id")->required();
  analyze->add_option("name", analysis_name, "complexity | thresholds | errors | mann-whitney")
      ->required()
      ->check(CLI::IsMember({"complexity", "thresholds", "errors", "mann-whitney"}));
  analyze->add_option("--runs-dir", runs_dir, "Directory holding run directories")->capture_default_str();
  analyze->add_option("--config", report_config, "Locate the run through its config instead");
  analyze->add_option("--edges", edges, "Complexity bin edges: quintile, low or high")
      ->capture_default_str()
      ->check(CLI::IsMember({"quintile", "low", "high"}));
  analyze->add_option("--subset", subset, "g2p subset for complexity (low or high)");
  analyze->add_option("-a,--strategy-a", sel_a, "Threshold system A (strategy id or family)")->capture_default_str();
  analyze->add_option("-b,--strategy-b", sel_b, "Threshold system B (strategy id or family)")->capture_default_str();
  analyze->add_option("-o,--output", out_path, "Write to a file instead of stdout");

  std::string source_dir, import_out;
  auto* importer = app.add_subcommand("import-benchmark", "Convert benchmark CSV files to JSONL datasets");
  importer->add_option("source_dir", source_dir, "Directory with the benchmark CSV files")->required();
  importer->add_option("--out", import_out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (*ingest) {
      std::optional<phonology::PronunciationLexicon> lex;
      if (!ingest_lexicon.empty()) lex = phonology::load_lexicon_file(ingest_lexicon);
      auto res = ingest_dataset(ingest_path, prompt::parse_task(ingest_task), lex ? &*lex : nullptr);
      std::cout << res.instances.size() << " instances\n";
      for (const auto& line : res.split_report()) std::cout << "  " << line << "\n";
      return kExitOk;
    }
    if (*run_cmd) {
      auto cfg = load_run_config(run_config);
      if (stop_after > 0) cfg.stop_after_jobs = stop_after;
      RunHooks hooks;
      if (!quiet)
        hooks.progress = [](std::size_t done, std::size_t total) {
          if (done == total || done % 50 == 0) std::cerr << "\r" << done << "/" << total << " jobs" << (done == total ? "\n" : "");
        };
      auto out = run(cfg, hooks);
      const auto& m = out.manifest;
      std::cout << "run " << m.run_id << ": " << m.status << " (" << m.completed << "/" << m.total << " completed, "
                << m.errored << " errored, " << m.pending << " pending, " << out.provider_calls << " provider calls)\n";
      std::cout << "output: " << run_paths(cfg).dir.string() << "\n";
      return out.exit_code();
    }
    if (*report_cmd) {
      for (const auto& p : write_report(resolve_run(run_id, runs_dir, report_config))) std::cout << p.string() << "\n";
      return kExitOk;
    }
    if (*analyze) {
      auto paths = resolve_run(run_id, runs_dir, report_config);
      load_manifest(paths);
      auto recs = load_records(paths);
      if (analysis_name == "complexity") {
        if (subset.empty()) throw ValidationError("complexity needs --subset low|high");
        emit(complexity_csv(recs, eval::parse_subset_tag(subset), edges), out_path);
      } else if (analysis_name == "thresholds") {
        emit(thresholds_csv(recs, sel_a, sel_b), out_path);
      } else if (analysis_name == "errors") {
        emit(errors_csv(recs), out_path);
      } else {
        emit(mann_whitney_csv(recs), out_path);
      }
      return kExitOk;
    }
    if (*importer) {
      auto summary = import_benchmark(source_dir, import_out);
      for (const auto& [file, n] : summary.written) std::cout << file << ": " << n << " records\n";
      return kExitOk;
    }
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitOk;
}
