#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace wavefield {

using Complex = std::complex<double>;

/// Speed of light in vacuum (m/s).
inline constexpr double kSpeedOfLight = 299792458.0;
inline constexpr double kPi = 3.14159265358979323846;

/// A point of the 2D propagation plane, in meters.
using Location = Eigen::Vector2d;

/// Raised for inputs that violate the geometric preconditions of a scene
/// (location on a wall, outside the bounds, on top of a source...).
class GeometryError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline double wavelength(double frequency_hz) { return kSpeedOfLight / frequency_hz; }

/// Emitting array. The reference position is always the barycenter of the
/// elements.
class AntennaArray {
 public:
  AntennaArray() = default;
  AntennaArray(std::vector<Location> elements, double reference_wavelength);

  /// Uniform linear array along the x axis with half-wavelength spacing,
  /// centered on `center`.
  static AntennaArray ula(std::size_t count, const Location& center, double reference_wavelength);

  std::size_t size() const { return elements_.size(); }
  const std::vector<Location>& elements() const { return elements_; }
  const Location& element(std::size_t j) const { return elements_.at(j); }
  const Location& reference_position() const { return reference_; }
  double reference_wavelength() const { return reference_wavelength_; }

 private:
  std::vector<Location> elements_;
  Location reference_ = Location::Zero();
  double reference_wavelength_ = 0.0;
};

/// Subcarrier frequencies around a reference (center) frequency.
struct FrequencyGrid {
  double reference_hz = 0.0;
  double bandwidth_hz = 0.0;
  std::vector<double> frequencies;

  /// `count` frequencies uniformly spanning [f_r - B/2, f_r + B/2].
  static FrequencyGrid uniform(double reference_hz, double bandwidth_hz, std::size_t count);

  /// Keeps the first `count` frequencies and the original reference.
  FrequencyGrid lower(std::size_t count) const;

  std::size_t size() const { return frequencies.size(); }
  double reference_wavelength() const { return wavelength(reference_hz); }
};

/// Straight reflector with a constant complex reflection coefficient.
struct Wall {
  Location start;
  Location end;
  Complex reflection{1.0, 0.0};
};

/// Square region [-side/2, side/2]^2 where receivers may be placed.
struct Bounds {
  double side = 0.0;
  bool contains(const Location& x) const;
};

struct Scene {
  std::vector<Wall> walls;
  int max_bounces = 2;
  AntennaArray array;
  Bounds bounds;
  bool los_enabled = true;
};

/// One propagation path seen from a single emitting element. `nu` is the
/// supplementary interaction delay (kept at zero: interaction phases are
/// folded into `gamma`).
struct Path {
  Location virtual_source;
  Complex gamma{1.0, 0.0};
  double nu = 0.0;
  int bounce_count = 0;
  /// Indices of the walls hit, in propagation order.
  std::vector<std::size_t> walls;
};

/// Paths for every emitting element: per_antenna[j] lists the paths from
/// element j to the receiver.
struct PathSet {
  std::vector<std::vector<Path>> per_antenna;

  std::size_t antenna_count() const { return per_antenna.size(); }
  std::size_t total_paths() const;
};

struct ChannelMatrix {
  Eigen::MatrixXcd entries;  // Na x Ns
  Location location = Location::Zero();
};

struct Impulse {
  double delay = 0.0;
  Complex amplitude;
};

Location mirror_across(const Location& p, const Wall& wall);

/// Image-source enumeration of the specular paths reaching `x`.
PathSet enumerate_paths(const Scene& scene, const Location& x);

/// Antenna-frequency response: entry (j,k) = sum_l gamma_l / d * exp(-j 2 pi f_k (d/c - nu_l)).
ChannelMatrix channel_response(const PathSet& paths, const Location& x, const FrequencyGrid& grid);

/// Dirac-train CIR of antenna j, sorted by delay.
std::vector<Impulse> impulse_response(const PathSet& paths, const Location& x, std::size_t antenna);

/// Convenience: enumerate + respond.
ChannelMatrix simulate_channel(const Scene& scene, const Location& x, const FrequencyGrid& grid);

}  // namespace wavefield
