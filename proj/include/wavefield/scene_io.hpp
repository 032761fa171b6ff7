#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>
#include <string>

#include "wavefield/geometry.hpp"

namespace wavefield {

/// A scene together with the system parameters needed to generate data.
struct SceneSpec {
  std::string name;
  Scene scene;
  FrequencyGrid grid;
};

class SceneFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr const char* kSceneHeader = "wavefield-scene v1";

/// Scene description grammar (one statement per line, `#` starts a comment):
///
///   wavefield-scene v1                      mandatory first line
///   name <id>
///   side <meters>                           receiver square [-side/2, side/2]^2
///   carrier <Hz>                            reference frequency f_r
///   bandwidth <Hz>
///   subcarriers <Ns>
///   antennas <Na>                           half-wavelength ULA along x ...
///   array_center <x> <y>                    ... centered here
///   element <x> <y>                         explicit element (repeatable, replaces the ULA)
///   max_bounces <n>
///   los <0|1>
///   wall <x1> <y1> <x2> <y2> <|G|> <arg G>  reflector with coefficient |G| e^{j arg G}
SceneSpec parse_scene(std::istream& in);
SceneSpec load_scene(const std::string& path);
void write_scene(std::ostream& out, const SceneSpec& spec);

/// Reflection coefficient with |G| ~ U[0.3, 0.9] and arg G ~ U[0, 2 pi).
Complex draw_reflection(std::mt19937_64& rng);

/// Built-in desk-scale scenes: "d3" (empty, LoS only), "d1" (two reflectors,
/// up to two bounces), "d2" (d1 without LoS). The array sits 1 m below the
/// receiver square.
SceneSpec builtin_scene(const std::string& name, std::size_t antennas, std::size_t subcarriers,
                        double side = 4.0, double carrier_hz = 3.5e9, double bandwidth_hz = 50e6);

/// Four walls around the receiver square with randomly drawn coefficients.
SceneSpec random_box_scene(std::uint64_t seed, std::size_t antennas, std::size_t subcarriers, double side = 4.0);

/// Built-in name or path to a scene file. Na, Ns and side only apply to
/// built-in scenes.
SceneSpec resolve_scene(const std::string& name_or_path, std::size_t antennas, std::size_t subcarriers,
                        double side = 4.0);

}  // namespace wavefield
