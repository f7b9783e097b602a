#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "qfolio/ansatz.hpp"
#include "qfolio/date.hpp"
#include "qfolio/vqa.hpp"

namespace qfolio {

/// One experiment: data, QUBO parameters, grid and optimizer settings.
///
/// `prices` is resolved against the manifest's directory when relative;
/// `output_dir` is resolved against the working directory.
struct ExperimentManifest {
  std::string name;
  std::filesystem::path prices;
  std::filesystem::path base_dir;  // directory of the manifest file; not serialised
  std::vector<std::string> universe;
  DateRange data_window;
  std::optional<DateRange> future_window;
  double q = 0.5;
  std::optional<double> alpha;  // nullopt means "n/2"
  std::size_t budget = 1;
  std::vector<AnsatzFamily> families;
  std::vector<std::size_t> depths;
  std::vector<std::uint64_t> seeds;
  OptimizerConfig optimizer;  // seed unused; each run takes its grid seed
  std::vector<std::vector<std::string>> manual_portfolios;
  std::filesystem::path output_dir = "out";

  double resolved_alpha() const { return alpha ? *alpha : static_cast<double>(universe.size()) / 2.0; }
  std::filesystem::path prices_path() const;
  std::filesystem::path experiment_dir() const { return output_dir / name; }

  /// Throws InvalidConfig for empty grids, a missing name, duplicate tickers or bad windows.
  void validate() const;
};

ExperimentManifest parse_manifest(const nlohmann::json& j, const std::filesystem::path& base_dir);
/// Throws Io when the file cannot be read and InvalidConfig when it is not valid JSON.
ExperimentManifest load_manifest(const std::filesystem::path& path);

/// Written with an absolute prices path so the output re-ingests from anywhere.
nlohmann::json to_json(const ExperimentManifest& m);

}  // namespace qfolio
