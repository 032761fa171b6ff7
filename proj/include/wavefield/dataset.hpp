#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "wavefield/scene_io.hpp"

namespace wavefield {

enum class Split : std::uint8_t { Train = 0, Test = 1 };

struct DatasetHeader {
  std::uint32_t antennas = 0;     // Na
  std::uint32_t subcarriers = 0;  // Ns
  double reference_hz = 0.0;
  double bandwidth_hz = 0.0;
  std::string scene_id;
  double side = 0.0;  // L
  std::uint64_t seed = 0;
  Split split = Split::Train;
  std::uint64_t count = 0;  // N_l
  std::vector<Location> antenna_positions;
  std::vector<double> frequencies;

  AntennaArray array() const;
  FrequencyGrid grid() const;
  std::size_t encoded_size() const;
};

struct SampleRecord {
  Location location;
  Eigen::MatrixXcd channel;  // Na x Ns
};

struct Dataset {
  DatasetHeader header;
  std::vector<SampleRecord> records;
};

class DatasetError : public std::runtime_error {
 public:
  enum class Kind { Io, BadMagic, Truncated, CountMismatch, Invalid };
  DatasetError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

inline constexpr char kDatasetMagic[5] = {'W', 'V', 'F', 'D', '1'};

/// N = round(L^2 density) i.i.d. uniform locations in [-L/2, L/2]^2.
std::vector<Location> sample_train_locations(double side, double density, std::uint64_t seed);

/// Axis-aligned grid with (floor(L / spacing) + 1)^2 points starting at -L/2.
std::vector<Location> build_test_grid(double side, double spacing);

/// Train split: random locations at `density` (locs/m^2); locations without
/// any path are resampled. Test split: the lambda_r/4 grid (or `spacing`);
/// grid points without a path or on a wall are skipped.
Dataset generate_train_set(const SceneSpec& spec, double density, std::uint64_t seed);
Dataset generate_test_set(const SceneSpec& spec, double spacing = 0.0);

void write_dataset(const std::string& path, const Dataset& data);
Dataset read_dataset(const std::string& path);

/// Byte size of one record: 16 + 16 Na Ns.
inline std::size_t record_size(std::size_t antennas, std::size_t subcarriers) {
  return 16 + 16 * antennas * subcarriers;
}

/// Density in locations per square reference wavelength to locations per m^2.
inline double density_per_m2(double per_lambda2, double reference_wavelength) {
  return per_lambda2 / (reference_wavelength * reference_wavelength);
}

}  // namespace wavefield
