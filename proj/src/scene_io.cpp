#include "wavefield/scene_io.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace wavefield {

namespace {

std::string strip_comment(const std::string& line) {
  const auto hash = line.find('#');
  return hash == std::string::npos ? line : line.substr(0, hash);
}

template <typename T>
T read_value(std::istringstream& ss, const std::string& key, int lineno) {
  T v{};
  if (!(ss >> v)) throw SceneFormatError("line " + std::to_string(lineno) + ": bad value for '" + key + "'");
  return v;
}

}  // namespace

SceneSpec parse_scene(std::istream& in) {
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = strip_comment(line);
    if (line.find_first_not_of(" \t\r") != std::string::npos) break;
  }
  {
    std::istringstream ss(line);
    std::string a, b;
    ss >> a >> b;
    if (a + " " + b != kSceneHeader) throw SceneFormatError("missing '" + std::string(kSceneHeader) + "' header");
  }

  SceneSpec spec;
  double carrier = 3.5e9, bandwidth = 50e6;
  std::size_t subcarriers = 8, antennas = 8;
  Location center(0.0, -3.0);
  std::vector<Location> elements;
  spec.scene.bounds.side = 4.0;

  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ss(strip_comment(line));
    ss.imbue(std::locale::classic());
    std::string key;
    if (!(ss >> key)) continue;
    if (key == "name") {
      spec.name = read_value<std::string>(ss, key, lineno);
    } else if (key == "side") {
      spec.scene.bounds.side = read_value<double>(ss, key, lineno);
    } else if (key == "carrier") {
      carrier = read_value<double>(ss, key, lineno);
    } else if (key == "bandwidth") {
      bandwidth = read_value<double>(ss, key, lineno);
    } else if (key == "subcarriers") {
      subcarriers = read_value<std::size_t>(ss, key, lineno);
    } else if (key == "antennas") {
      antennas = read_value<std::size_t>(ss, key, lineno);
    } else if (key == "array_center") {
      center.x() = read_value<double>(ss, key, lineno);
      center.y() = read_value<double>(ss, key, lineno);
    } else if (key == "element") {
      const double x = read_value<double>(ss, key, lineno);
      elements.emplace_back(x, read_value<double>(ss, key, lineno));
    } else if (key == "max_bounces") {
      spec.scene.max_bounces = read_value<int>(ss, key, lineno);
    } else if (key == "los") {
      spec.scene.los_enabled = read_value<int>(ss, key, lineno) != 0;
    } else if (key == "wall") {
      Wall w;
      w.start.x() = read_value<double>(ss, key, lineno);
      w.start.y() = read_value<double>(ss, key, lineno);
      w.end.x() = read_value<double>(ss, key, lineno);
      w.end.y() = read_value<double>(ss, key, lineno);
      const double mag = read_value<double>(ss, key, lineno);
      const double arg = read_value<double>(ss, key, lineno);
      if (!(mag > 0.0 && mag <= 1.0)) throw SceneFormatError("line " + std::to_string(lineno) + ": |G| must be in (0, 1]");
      w.reflection = std::polar(mag, arg);
      spec.scene.walls.push_back(w);
    } else {
      throw SceneFormatError("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
  }
  if (spec.scene.max_bounces < 0) throw SceneFormatError("max_bounces must be >= 0");
  if (!(spec.scene.bounds.side > 0)) throw SceneFormatError("side must be positive");

  spec.grid = FrequencyGrid::uniform(carrier, bandwidth, subcarriers);
  const double lambda = wavelength(carrier);
  spec.scene.array = elements.empty() ? AntennaArray::ula(antennas, center, lambda)
                                      : AntennaArray(std::move(elements), lambda);
  return spec;
}

SceneSpec load_scene(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SceneFormatError("cannot open scene file " + path);
  return parse_scene(in);
}

void write_scene(std::ostream& out, const SceneSpec& spec) {
  out.imbue(std::locale::classic());
  out << std::setprecision(17);
  out << kSceneHeader << "\n";
  if (!spec.name.empty()) out << "name " << spec.name << "\n";
  out << "side " << spec.scene.bounds.side << "\n";
  out << "carrier " << spec.grid.reference_hz << "\n";
  out << "bandwidth " << spec.grid.bandwidth_hz << "\n";
  out << "subcarriers " << spec.grid.size() << "\n";
  for (const auto& e : spec.scene.array.elements()) out << "element " << e.x() << " " << e.y() << "\n";
  out << "max_bounces " << spec.scene.max_bounces << "\n";
  out << "los " << (spec.scene.los_enabled ? 1 : 0) << "\n";
  for (const auto& w : spec.scene.walls)
    out << "wall " << w.start.x() << " " << w.start.y() << " " << w.end.x() << " " << w.end.y() << " "
        << std::abs(w.reflection) << " " << std::arg(w.reflection) << "\n";
}

Complex draw_reflection(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> mag(0.3, 0.9);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * kPi);
  const double m = mag(rng);
  return std::polar(m, phase(rng));
}

SceneSpec builtin_scene(const std::string& name, std::size_t antennas, std::size_t subcarriers, double side,
                        double carrier_hz, double bandwidth_hz) {
  SceneSpec spec;
  spec.name = name;
  spec.grid = FrequencyGrid::uniform(carrier_hz, bandwidth_hz, subcarriers);
  spec.scene.bounds.side = side;
  const double h = side / 2.0;
  spec.scene.array = AntennaArray::ula(antennas, Location(0.0, -h - 1.0), wavelength(carrier_hz));
  if (name == "d3") {
    spec.scene.max_bounces = 0;
    return spec;
  }
  if (name != "d1" && name != "d2") throw std::invalid_argument("unknown built-in scene '" + name + "'");
  spec.scene.max_bounces = 2;
  spec.scene.los_enabled = name == "d1";
  spec.scene.walls = {
      Wall{Location(h + 0.5, -h - 2.0), Location(h + 0.5, h + 1.0), std::polar(0.35, 1.0)},
      Wall{Location(-h - 1.0, h + 0.5), Location(h + 1.0, h + 0.5), std::polar(0.30, 2.5)},
  };
  return spec;
}

SceneSpec random_box_scene(std::uint64_t seed, std::size_t antennas, std::size_t subcarriers, double side) {
  std::mt19937_64 rng(seed);
  SceneSpec spec = builtin_scene("d3", antennas, subcarriers, side);
  spec.name = "box-" + std::to_string(seed);
  spec.scene.max_bounces = 2;
  const double r = side / 2.0 + 2.0;
  const Location corners[4] = {{-r, -r}, {r, -r}, {r, r}, {-r, r}};
  for (int i = 0; i < 4; ++i) spec.scene.walls.push_back(Wall{corners[i], corners[(i + 1) % 4], draw_reflection(rng)});
  return spec;
}

SceneSpec resolve_scene(const std::string& name_or_path, std::size_t antennas, std::size_t subcarriers,
                        double side) {
  if (name_or_path == "d1" || name_or_path == "d2" || name_or_path == "d3")
    return builtin_scene(name_or_path, antennas, subcarriers, side);
  if (!std::filesystem::exists(name_or_path))
    throw SceneFormatError("scene '" + name_or_path + "' is neither built-in (d1, d2, d3) nor a readable file");
  return load_scene(name_or_path);
}

}  // namespace wavefield
