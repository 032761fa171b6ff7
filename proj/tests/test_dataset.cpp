#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>

#include "doctest.h"
#include "wavefield/dataset.hpp"

using namespace wavefield;
namespace fs = std::filesystem;

namespace {

std::string temp_path(const std::string& name) { return (fs::temp_directory_path() / ("wvfd_test_" + name)).string(); }

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

TEST_CASE("training location counts") {
  CHECK(sample_train_locations(10, 175, 7).size() == 17500);
  CHECK(sample_train_locations(10, 1, 7).size() == 100);
  CHECK(sample_train_locations(4, 175, 7).size() == 2800);
  CHECK_THROWS(sample_train_locations(4, 0, 7));
}

TEST_CASE("training locations are uniform over unit sub-squares") {
  constexpr int kSeeds = 5;
  double counts[4][4] = {};
  for (std::uint64_t seed = 1; seed <= kSeeds; ++seed)
    for (const auto& x : sample_train_locations(4, 175, seed)) {
      CHECK(std::abs(x.x()) <= 2.0);
      CHECK(std::abs(x.y()) <= 2.0);
      counts[std::min(3, static_cast<int>(x.x() + 2))][std::min(3, static_cast<int>(x.y() + 2))] += 1.0 / kSeeds;
    }
  for (auto& row : counts)
    for (double c : row) CHECK(std::abs(c - 175) <= 0.2 * 175);
}

TEST_CASE("test grid counts") {
  CHECK(build_test_grid(1, 0.5).size() == 9);
  const double q = wavelength(3.5e9) / 4;
  const auto side_count = static_cast<std::size_t>(std::floor(10 / q)) + 1;
  CHECK(side_count == 467);
  CHECK(build_test_grid(10, q).size() == side_count * side_count);
  const auto n2 = static_cast<std::size_t>(std::floor(2 / q)) + 1;
  CHECK(build_test_grid(2, q).size() == n2 * n2);
  const auto g = build_test_grid(1, 0.5);
  CHECK(g.front().isApprox(Location(-0.5, -0.5)));
  CHECK((g.back() - Location(0.5, 0.5)).norm() < 1e-12);
}

TEST_CASE("round trip and file size") {
  const SceneSpec spec = builtin_scene("d1", 4, 3);
  const Dataset d = generate_train_set(spec, 20, 3);
  CHECK(d.records.size() == 320);
  const std::string p = temp_path("rt.wvfd");
  write_dataset(p, d);
  CHECK(fs::file_size(p) == d.header.encoded_size() + d.records.size() * record_size(4, 3));
  const Dataset r = read_dataset(p);
  CHECK(r.header.count == d.header.count);
  CHECK(r.header.scene_id == d.header.scene_id);
  CHECK(r.header.seed == 3);
  CHECK(r.header.frequencies == d.header.frequencies);
  for (std::size_t i = 0; i < d.records.size(); ++i) {
    CHECK(r.records[i].location == d.records[i].location);
    CHECK(r.records[i].channel == d.records[i].channel);
  }
  fs::remove(p);
}

TEST_CASE("1000 records") {
  SceneSpec spec = builtin_scene("d3", 8, 8);
  Dataset d = generate_train_set(spec, 62.5, 1);
  REQUIRE(d.records.size() == 1000);
  const std::string p = temp_path("k.wvfd");
  write_dataset(p, d);
  CHECK(fs::file_size(p) == d.header.encoded_size() + 1000 * (16 + 16 * 64));
  fs::remove(p);
}

TEST_CASE("determinism") {
  const SceneSpec spec = builtin_scene("d1", 4, 4);
  const std::string a = temp_path("a.wvfd"), b = temp_path("b.wvfd");
  write_dataset(a, generate_train_set(spec, 10, 9));
  write_dataset(b, generate_train_set(spec, 10, 9));
  CHECK(slurp(a) == slurp(b));
  write_dataset(b, generate_train_set(spec, 10, 10));
  CHECK(slurp(a) != slurp(b));
  fs::remove(a);
  fs::remove(b);
}

TEST_CASE("corrupt files") {
  const Dataset d = generate_train_set(builtin_scene("d3", 2, 2), 5, 1);
  const std::string p = temp_path("bad.wvfd");
  write_dataset(p, d);
  std::string bytes = slurp(p);

  auto kind_of = [&](const std::string& content) {
    std::ofstream(p, std::ios::binary | std::ios::trunc) << content;
    try {
      read_dataset(p);
    } catch (const DatasetError& e) {
      return static_cast<int>(e.kind());
    }
    return -1;
  };
  std::string bad = bytes;
  bad[0] = 'X';
  CHECK(kind_of(bad) == static_cast<int>(DatasetError::Kind::BadMagic));
  CHECK(kind_of(bytes.substr(0, bytes.size() - 5)) == static_cast<int>(DatasetError::Kind::Truncated));
  CHECK(kind_of(bytes.substr(0, 12)) == static_cast<int>(DatasetError::Kind::Truncated));
  CHECK(kind_of(bytes.substr(0, bytes.size() - record_size(2, 2))) ==
        static_cast<int>(DatasetError::Kind::CountMismatch));
  fs::remove(p);
  CHECK_THROWS_AS(read_dataset(p), DatasetError);

  Dataset wrong = d;
  wrong.header.count += 1;
  CHECK_THROWS_AS(write_dataset(p, wrong), DatasetError);
}

TEST_CASE("test split skips points on walls") {
  const SceneSpec spec = builtin_scene("d1", 2, 2);
  const Dataset t = generate_test_set(spec, 0.25);
  CHECK(t.header.split == Split::Test);
  CHECK(t.records.size() <= 17 * 17);
  CHECK(t.records.size() > 17 * 17 / 2);
  for (const auto& r : t.records) CHECK(r.channel.allFinite());
}
