#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "wavefield/dataset.hpp"
#include "wavefield/metrics.hpp"
#include "wavefield/models.hpp"
#include "wavefield/training.hpp"

namespace wavefield {

/// INI-style experiment matrix. Each section other than [common] is an
/// experiment; lookups fall back to [common].
class Manifest {
 public:
  static Manifest parse(const std::string& text);
  static Manifest load(const std::string& path);

  bool has(const std::string& section, const std::string& key) const;
  std::string get(const std::string& section, const std::string& key) const;
  double number(const std::string& section, const std::string& key) const;
  std::size_t integer(const std::string& section, const std::string& key) const;
  std::vector<std::string> list(const std::string& section, const std::string& key) const;
  std::vector<double> numbers(const std::string& section, const std::string& key) const;

  std::vector<std::string> experiments() const;
  void set(const std::string& section, const std::string& key, const std::string& value);

 private:
  std::map<std::string, std::map<std::string, std::string>> sections_;
  std::vector<std::string> order_;
};

class ExperimentError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a dataset file is absent and generation is disabled. The
/// message contains the `wavefield gen` command producing it.
class MissingDataset : public ExperimentError {
 public:
  using ExperimentError::ExperimentError;
};

struct DatasetRequest {
  std::string scene;
  std::size_t antennas = 8;
  std::size_t subcarriers = 8;
  double side = 4.0;
  Split split = Split::Train;
  double density = 175.0;  // locs/m^2, train only
  std::uint64_t seed = 7;  // train only

  std::string file_name() const;
  std::string gen_command(const std::string& path) const;
};

struct ExperimentContext {
  Manifest manifest;
  std::filesystem::path data_dir = "data";
  std::filesystem::path out_dir = "results";
  bool generate_missing = true;
  std::ostream* log = nullptr;
};

/// Loads the dataset from ctx.data_dir, generating and caching it when
/// allowed; throws MissingDataset otherwise.
Dataset obtain_dataset(const DatasetRequest& req, const ExperimentContext& ctx);

struct RunRecord {
  std::string label;
  ModelKind kind = ModelKind::MBPsiA;
  double sweep = 0.0;  // swept value (density, D, Na or Ns); 0 when none
  ModelConfig model;
  TrainResult train;
  EvalReport eval;
  CompressionRatio ratio;
  std::uint64_t checkpoint_bytes = 0;
  std::uint64_t checkpoint_formula_bytes = 0;
  double spectrum_ratio = std::numeric_limits<double>::quiet_NaN();
  double seen_db = std::numeric_limits<double>::quiet_NaN();
  double unseen_db = std::numeric_limits<double>::quiet_NaN();
  double median_support = std::numeric_limits<double>::quiet_NaN();
  std::size_t train_count = 0;
  std::size_t test_count = 0;
};

struct ExperimentOutcome {
  std::string name;
  std::string protocol;
  std::filesystem::path artifacts;
  std::vector<RunRecord> runs;
  std::map<std::string, double> summary;
};

/// Protocols: reconstruction, density, frequency, compression, antennas,
/// subcarriers. Artifacts land in ctx.out_dir / name, written to a temporary
/// directory first and renamed on success.
ExperimentOutcome run_experiment(const std::string& name, const ExperimentContext& ctx);

/// Locale-independent JSON rendering of an outcome.
std::string outcome_json(const ExperimentOutcome& outcome);

/// Model configuration for `kind` from the manifest keys of `section`.
ModelConfig model_config_from(const Manifest& m, const std::string& section, ModelKind kind);
TrainConfig train_config_from(const Manifest& m, const std::string& section);

}  // namespace wavefield
