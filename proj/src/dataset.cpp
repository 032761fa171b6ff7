#include "wavefield/dataset.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

namespace wavefield {

namespace {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

template <typename T>
T to_little(T v) {
  if constexpr (std::endian::native == std::endian::big) {
    unsigned char b[sizeof(T)];
    std::memcpy(b, &v, sizeof(T));
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(b[i], b[sizeof(T) - 1 - i]);
    std::memcpy(&v, b, sizeof(T));
  }
  return v;
}

class Writer {
 public:
  explicit Writer(std::ostream& out) : out_(out) {}
  template <typename T>
  void put(T v) {
    v = to_little(v);
    out_.write(reinterpret_cast<const char*>(&v), sizeof(T));
  }
  void bytes(const char* p, std::size_t n) { out_.write(p, static_cast<std::streamsize>(n)); }

 private:
  std::ostream& out_;
};

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}
  template <typename T>
  T get() {
    T v;
    if (!in_.read(reinterpret_cast<char*>(&v), sizeof(T)))
      throw DatasetError(DatasetError::Kind::Truncated, "dataset file truncated");
    return to_little(v);
  }
  void bytes(char* p, std::size_t n) {
    if (!in_.read(p, static_cast<std::streamsize>(n)))
      throw DatasetError(DatasetError::Kind::Truncated, "dataset file truncated");
  }

 private:
  std::istream& in_;
};

DatasetHeader header_for(const SceneSpec& spec, Split split, std::uint64_t seed) {
  DatasetHeader h;
  h.antennas = static_cast<std::uint32_t>(spec.scene.array.size());
  h.subcarriers = static_cast<std::uint32_t>(spec.grid.size());
  h.reference_hz = spec.grid.reference_hz;
  h.bandwidth_hz = spec.grid.bandwidth_hz;
  h.scene_id = spec.name;
  h.side = spec.scene.bounds.side;
  h.seed = seed;
  h.split = split;
  h.antenna_positions = spec.scene.array.elements();
  h.frequencies = spec.grid.frequencies;
  return h;
}

}  // namespace

AntennaArray DatasetHeader::array() const { return AntennaArray(antenna_positions, wavelength(reference_hz)); }

FrequencyGrid DatasetHeader::grid() const { return FrequencyGrid{reference_hz, bandwidth_hz, frequencies}; }

std::size_t DatasetHeader::encoded_size() const {
  return sizeof(kDatasetMagic) + 1 + 4 + 4 + 8 * 3 + 8 + 8 + 2 + scene_id.size() + 16 * antennas + 8 * subcarriers;
}

std::vector<Location> sample_train_locations(double side, double density, std::uint64_t seed) {
  if (!(density > 0.0)) throw std::invalid_argument("density must be positive");
  const auto n = static_cast<std::size_t>(std::llround(side * side * density));
  if (n == 0) throw std::invalid_argument("density yields zero training locations");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coord(-side / 2.0, side / 2.0);
  std::vector<Location> xs;
  xs.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = coord(rng);
    xs.emplace_back(x, coord(rng));
  }
  return xs;
}

std::vector<Location> build_test_grid(double side, double spacing) {
  if (!(spacing > 0.0)) throw std::invalid_argument("grid spacing must be positive");
  const auto n = static_cast<std::size_t>(std::floor(side / spacing + 1e-9)) + 1;
  std::vector<Location> xs;
  xs.reserve(n * n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c)
      xs.emplace_back(-side / 2.0 + static_cast<double>(c) * spacing, -side / 2.0 + static_cast<double>(r) * spacing);
  return xs;
}

Dataset generate_train_set(const SceneSpec& spec, double density, std::uint64_t seed) {
  Dataset data;
  data.header = header_for(spec, Split::Train, seed);
  const auto xs = sample_train_locations(spec.scene.bounds.side, density, seed);
  std::mt19937_64 resample(seed ^ 0x9e3779b97f4a7c15ULL);
  std::uniform_real_distribution<double> coord(-spec.scene.bounds.side / 2.0, spec.scene.bounds.side / 2.0);
  data.records.reserve(xs.size());
  for (Location x : xs) {
    for (int attempt = 0;; ++attempt) {
      if (attempt > 10000) throw std::runtime_error("could not find a location with at least one path");
      try {
        const PathSet paths = enumerate_paths(spec.scene, x);
        if (paths.total_paths() > 0) {
          data.records.push_back({x, channel_response(paths, x, spec.grid).entries});
          break;
        }
      } catch (const GeometryError&) {
      }
      const double nx = coord(resample);
      x = Location(nx, coord(resample));
    }
  }
  data.header.count = data.records.size();
  return data;
}

Dataset generate_test_set(const SceneSpec& spec, double spacing) {
  if (spacing <= 0.0) spacing = spec.grid.reference_wavelength() / 4.0;
  Dataset data;
  data.header = header_for(spec, Split::Test, 0);
  for (const auto& x : build_test_grid(spec.scene.bounds.side, spacing)) {
    try {
      const PathSet paths = enumerate_paths(spec.scene, x);
      if (paths.total_paths() == 0) continue;
      data.records.push_back({x, channel_response(paths, x, spec.grid).entries});
    } catch (const GeometryError&) {
    }
  }
  data.header.count = data.records.size();
  return data;
}

void write_dataset(const std::string& path, const Dataset& data) {
  const auto& h = data.header;
  if (h.count != data.records.size())
    throw DatasetError(DatasetError::Kind::CountMismatch, "header count disagrees with record count");
  if (h.antenna_positions.size() != h.antennas || h.frequencies.size() != h.subcarriers)
    throw DatasetError(DatasetError::Kind::Invalid, "header geometry does not match Na/Ns");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DatasetError(DatasetError::Kind::Io, "cannot open " + path + " for writing");
  Writer w(out);
  w.bytes(kDatasetMagic, sizeof(kDatasetMagic));
  w.put<std::uint8_t>(static_cast<std::uint8_t>(h.split));
  w.put<std::uint32_t>(h.antennas);
  w.put<std::uint32_t>(h.subcarriers);
  w.put<double>(h.reference_hz);
  w.put<double>(h.bandwidth_hz);
  w.put<double>(h.side);
  w.put<std::uint64_t>(h.seed);
  w.put<std::uint64_t>(h.count);
  w.put<std::uint16_t>(static_cast<std::uint16_t>(h.scene_id.size()));
  w.bytes(h.scene_id.data(), h.scene_id.size());
  for (const auto& a : h.antenna_positions) {
    w.put<double>(a.x());
    w.put<double>(a.y());
  }
  for (double f : h.frequencies) w.put<double>(f);
  for (const auto& r : data.records) {
    if (r.channel.rows() != h.antennas || r.channel.cols() != h.subcarriers)
      throw DatasetError(DatasetError::Kind::Invalid, "record channel shape does not match header");
    w.put<double>(r.location.x());
    w.put<double>(r.location.y());
    // Column-major: antenna index runs fastest.
    for (Eigen::Index i = 0; i < r.channel.size(); ++i) {
      w.put<double>(r.channel.data()[i].real());
      w.put<double>(r.channel.data()[i].imag());
    }
  }
  if (!out) throw DatasetError(DatasetError::Kind::Io, "write failed for " + path);
}

Dataset read_dataset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DatasetError(DatasetError::Kind::Io, "cannot open dataset " + path);
  Reader r(in);
  char magic[sizeof(kDatasetMagic)];
  r.bytes(magic, sizeof(magic));
  if (std::memcmp(magic, kDatasetMagic, sizeof(magic)) != 0)
    throw DatasetError(DatasetError::Kind::BadMagic, path + " is not a WVFD1 dataset");

  Dataset data;
  auto& h = data.header;
  const auto split = r.get<std::uint8_t>();
  if (split > 1) throw DatasetError(DatasetError::Kind::Invalid, "unknown split tag");
  h.split = static_cast<Split>(split);
  h.antennas = r.get<std::uint32_t>();
  h.subcarriers = r.get<std::uint32_t>();
  h.reference_hz = r.get<double>();
  h.bandwidth_hz = r.get<double>();
  h.side = r.get<double>();
  h.seed = r.get<std::uint64_t>();
  h.count = r.get<std::uint64_t>();
  h.scene_id.resize(r.get<std::uint16_t>());
  r.bytes(h.scene_id.data(), h.scene_id.size());
  for (std::uint32_t j = 0; j < h.antennas; ++j) {
    const double x = r.get<double>();
    h.antenna_positions.emplace_back(x, r.get<double>());
  }
  for (std::uint32_t k = 0; k < h.subcarriers; ++k) h.frequencies.push_back(r.get<double>());

  const std::size_t header_end = static_cast<std::size_t>(in.tellg());
  in.seekg(0, std::ios::end);
  const std::size_t payload = static_cast<std::size_t>(in.tellg()) - header_end;
  in.seekg(static_cast<std::streamoff>(header_end));
  const std::size_t rec = record_size(h.antennas, h.subcarriers);
  if (payload % rec != 0) throw DatasetError(DatasetError::Kind::Truncated, "dataset payload truncated");
  if (payload / rec != h.count)
    throw DatasetError(DatasetError::Kind::CountMismatch, "header record count disagrees with payload");

  data.records.resize(h.count);
  for (auto& rec_out : data.records) {
    const double x = r.get<double>();
    rec_out.location = Location(x, r.get<double>());
    rec_out.channel.resize(h.antennas, h.subcarriers);
    for (Eigen::Index i = 0; i < rec_out.channel.size(); ++i) {
      const double re = r.get<double>();
      rec_out.channel.data()[i] = Complex(re, r.get<double>());
    }
  }
  return data;
}

}  // namespace wavefield
