#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "axnn/config.hpp"

namespace axnn {

// Generate one builtin error map file (interchange format).
void cmd_multgen(const std::string& kind, int t, double energy, const std::string& name,
                 const std::filesystem::path& out_file);

// Baseline float training + quantization calibration -> checkpoint + summary.
void cmd_train(const RunConfig& cfg, const std::filesystem::path& out_dir);

// Gradient search on a baseline checkpoint -> sigma log + checkpoint.
void cmd_search(const RunConfig& cfg, const std::filesystem::path& checkpoint,
                std::optional<double> lambda_override, const std::filesystem::path& out_dir);

// Per (layer, multiplier) error statistics vs the MC oracle -> CSV reports.
void cmd_characterize(const RunConfig& cfg, const std::filesystem::path& checkpoint,
                      const std::filesystem::path& out_dir);

// Threshold matching -> assignment file.
void cmd_match(const RunConfig& cfg, const std::filesystem::path& checkpoint,
               const std::filesystem::path& out_dir);

// Behavioral evaluation of an assignment, optionally with STE retraining.
void cmd_simulate(const RunConfig& cfg, const std::filesystem::path& checkpoint,
                  const std::filesystem::path& assignment, bool do_retrain,
                  const std::filesystem::path& out_dir);

// Full lambda-grid pipeline -> sweep CSV + per-lambda artifacts.
void cmd_sweep(const RunConfig& cfg, const std::filesystem::path& out_dir);

// output root: AXNN_OUTPUT_ROOT env var, if set, prefixes relative out dirs.
std::filesystem::path resolve_out_dir(const std::string& configured,
                                      const std::string& cli_override);

}  // namespace axnn
