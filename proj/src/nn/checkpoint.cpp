#include "wavefield/nn/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>

namespace wavefield::nn {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

namespace {

template <typename T>
void put(std::ofstream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::ifstream& in, const std::string& path) {
  T v{};
  if (!in.read(reinterpret_cast<char*>(&v), sizeof(T))) throw CheckpointError(path + ": truncated checkpoint");
  return v;
}

}  // namespace

std::size_t checkpoint_size(const std::vector<const ParamBlock*>& blocks) {
  std::size_t n = sizeof(kCheckpointMagic) + 4;
  for (const auto* b : blocks) n += 2 + b->name.size() + 1 + 4 + 8 * b->value.shape.size() + 8 * b->value.real_count();
  return n;
}

void save_checkpoint(const std::string& path, const std::vector<const ParamBlock*>& blocks) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw CheckpointError("cannot open " + path + " for writing");
  out.write(kCheckpointMagic, sizeof(kCheckpointMagic));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(blocks.size()));
  for (const auto* b : blocks) {
    if (b->name.size() > 0xFFFF) throw CheckpointError("block name too long: " + b->name);
    put<std::uint16_t>(out, static_cast<std::uint16_t>(b->name.size()));
    out.write(b->name.data(), static_cast<std::streamsize>(b->name.size()));
    put<std::uint8_t>(out, b->value.is_complex ? 1 : 0);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(b->value.shape.size()));
    for (auto d : b->value.shape) put<std::uint64_t>(out, d);
    out.write(reinterpret_cast<const char*>(b->value.values.data()),
              static_cast<std::streamsize>(b->value.values.size() * sizeof(double)));
  }
  if (!out) throw CheckpointError("write failed: " + path);
}

void load_checkpoint(const std::string& path, const std::vector<ParamBlock*>& blocks) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open " + path);
  char magic[sizeof(kCheckpointMagic)];
  if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kCheckpointMagic, sizeof(magic)) != 0)
    throw CheckpointError(path + ": not a WVFP1 checkpoint");

  std::map<std::string, Tensor> stored;
  const auto count = get<std::uint32_t>(in, path);
  for (std::uint32_t i = 0; i < count; ++i) {
    std::string name(get<std::uint16_t>(in, path), '\0');
    if (!in.read(name.data(), static_cast<std::streamsize>(name.size())))
      throw CheckpointError(path + ": truncated checkpoint");
    Tensor t;
    t.is_complex = get<std::uint8_t>(in, path) != 0;
    t.shape.resize(get<std::uint32_t>(in, path));
    for (auto& d : t.shape) d = get<std::uint64_t>(in, path);
    t.values.resize(t.elements() * (t.is_complex ? 2 : 1));
    if (!in.read(reinterpret_cast<char*>(t.values.data()), static_cast<std::streamsize>(t.values.size() * 8)))
      throw CheckpointError(path + ": truncated checkpoint");
    stored[name] = std::move(t);
  }
  for (auto* b : blocks) {
    auto it = stored.find(b->name);
    if (it == stored.end()) throw CheckpointError(path + ": missing block " + b->name);
    if (it->second.shape != b->value.shape || it->second.is_complex != b->value.is_complex)
      throw CheckpointError(path + ": shape mismatch for " + b->name);
    b->value.values = it->second.values;
  }
}

}  // namespace wavefield::nn
