#pragma once

// Canned experiment suites: each study runs a fixed configuration, writes
// its trajectory/table CSVs into an output directory, and reports pass/fail
// against the same thresholds the acceptance suite uses.

#include <filesystem>
#include <string>
#include <vector>

namespace isotrack {

struct StudyResult {
  std::string name;
  bool passed = false;
  std::string summary;  // human-readable multi-line report
};

std::vector<std::string> list_studies();

// Runs one study; dt_override > 0 replaces the study's calibrated time step
// (pass thresholds are tuned for the default). Throws std::invalid_argument
// for an unknown name.
StudyResult run_study(const std::string& name, const std::filesystem::path& out_dir,
                      double dt_override = 0.0);

}  // namespace isotrack
