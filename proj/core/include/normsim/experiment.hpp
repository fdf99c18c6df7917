#pragma once

#include <string>
#include <vector>

#include "normsim/config.hpp"

namespace normsim {

// Output root override comes only from this environment variable.
inline constexpr const char* kOutputRootEnv = "NORMSIM_OUT_ROOT";
std::string resolve_run_dir(const ExperimentConfig& cfg);

// Runs every seed (seeds execute as independent workers across threads),
// writes per-seed artifacts plus cross-seed aggregate CSVs and the run
// manifest. Returns the run directory. Resumes partial runs.
std::string run_experiment(const ExperimentConfig& cfg);

// Re-simulates every replay in the run directory and checks that every
// environment-derived CSV row reproduces exactly. Returns the number of
// mismatches (0 = valid). Throws on structural problems.
int validate_run(const std::string& run_dir);

// Emits SVG plots from the run's CSVs; missing inputs are skipped with a
// warning listed in emission_report.txt.
void emit_plots(const std::string& run_dir);

// Cross-seed aggregation (also called by run_experiment at completion).
void aggregate_run(const std::string& run_dir);

}  // namespace normsim
