#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "vdbtherm/cli/config.hpp"
#include "vdbtherm/cli/csv.hpp"

namespace vdbtherm::cli {

/// A library error inside one grid cell.
class NumericalFailure : public std::runtime_error {
 public:
  NumericalFailure(const std::string& cell, const std::string& what)
      : std::runtime_error("numerical failure at " + cell + ": " + what), cell_(cell) {}
  const std::string& cell() const noexcept { return cell_; }

 private:
  std::string cell_;
};

/// Flag, then VDBTHERM_THREADS, then the config; 0 means one per hardware thread.
int resolve_threads(std::optional<int> flag, const ExperimentConfig& cfg);

struct RunOutput {
  Table table;
  std::vector<std::string> notes;  // human-readable summary lines
};

/// Computes the table for cfg.mode without touching the filesystem.
RunOutput compute(const ExperimentConfig& cfg, int threads);

/// Computes and writes <out_dir>/<mode>.csv; returns the path.
std::filesystem::path run(const ExperimentConfig& cfg, int threads, std::vector<std::string>* notes = nullptr);

}  // namespace vdbtherm::cli
