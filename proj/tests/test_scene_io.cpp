#include <sstream>

#include "doctest.h"
#include "wavefield/scene_io.hpp"

using namespace wavefield;

TEST_CASE("scene files round-trip") {
  const SceneSpec a = random_box_scene(3, 4, 6, 5.0);
  std::stringstream ss;
  write_scene(ss, a);
  const SceneSpec b = parse_scene(ss);
  CHECK(b.name == a.name);
  CHECK(b.scene.bounds.side == a.scene.bounds.side);
  CHECK(b.scene.max_bounces == a.scene.max_bounces);
  CHECK(b.scene.los_enabled == a.scene.los_enabled);
  REQUIRE(b.scene.array.size() == a.scene.array.size());
  for (std::size_t j = 0; j < a.scene.array.size(); ++j)
    CHECK((b.scene.array.element(j) - a.scene.array.element(j)).norm() == 0.0);
  REQUIRE(b.scene.walls.size() == a.scene.walls.size());
  for (std::size_t w = 0; w < a.scene.walls.size(); ++w)
    CHECK(std::abs(b.scene.walls[w].reflection - a.scene.walls[w].reflection) < 1e-15);
  CHECK(b.grid.frequencies == a.grid.frequencies);
}

TEST_CASE("scene grammar") {
  std::istringstream in(
      "# a comment\n"
      "wavefield-scene v1\n"
      "name test\n"
      "side 6\n"
      "carrier 3.5e9\n"
      "bandwidth 20e6\n"
      "subcarriers 4\n"
      "antennas 3\n"
      "array_center 0 -4\n"
      "max_bounces 1\n"
      "los 0\n"
      "wall -5 5 5 5 0.5 1.0  # trailing comment\n");
  const SceneSpec s = parse_scene(in);
  CHECK(s.name == "test");
  CHECK(s.scene.array.size() == 3);
  CHECK(s.scene.array.reference_position().y() == doctest::Approx(-4.0));
  CHECK(s.grid.size() == 4);
  CHECK(s.grid.bandwidth_hz == 20e6);
  CHECK_FALSE(s.scene.los_enabled);
  REQUIRE(s.scene.walls.size() == 1);
  CHECK(std::abs(s.scene.walls[0].reflection) == doctest::Approx(0.5));
  CHECK(std::arg(s.scene.walls[0].reflection) == doctest::Approx(1.0));
}

TEST_CASE("scene format errors") {
  auto parse = [](const std::string& text) {
    std::istringstream in(text);
    return parse_scene(in);
  };
  CHECK_THROWS_AS(parse("scene v2\n"), SceneFormatError);
  CHECK_THROWS_AS(parse("wavefield-scene v1\nbogus 1\n"), SceneFormatError);
  CHECK_THROWS_AS(parse("wavefield-scene v1\nwall 0 0 1 1 1.5 0\n"), SceneFormatError);
  CHECK_THROWS_AS(parse("wavefield-scene v1\nside abc\n"), SceneFormatError);
  CHECK_THROWS_AS(parse("wavefield-scene v1\nmax_bounces -1\n"), SceneFormatError);
  CHECK_THROWS_AS(resolve_scene("/nonexistent/scene.txt", 4, 4), SceneFormatError);
}

TEST_CASE("reflection draws stay in range and are seeded") {
  std::mt19937_64 a(5), b(5);
  for (int i = 0; i < 1000; ++i) {
    const Complex g = draw_reflection(a);
    CHECK(std::abs(g) >= 0.3);
    CHECK(std::abs(g) <= 0.9);
    CHECK(g == draw_reflection(b));
  }
}

TEST_CASE("built-in scenes") {
  const SceneSpec d1 = builtin_scene("d1", 16, 8);
  const SceneSpec d2 = builtin_scene("d2", 16, 8);
  const SceneSpec d3 = builtin_scene("d3", 8, 8);
  CHECK(d1.scene.los_enabled);
  CHECK_FALSE(d2.scene.los_enabled);
  CHECK(d1.scene.max_bounces == 2);
  CHECK(d3.scene.walls.empty());
  CHECK(d1.scene.array.size() == 16);
  CHECK(d1.scene.array.reference_position().y() < -2.0);
  for (const auto& w : d1.scene.walls) {
    CHECK(std::abs(w.reflection) >= 0.3);
    CHECK(std::abs(w.reflection) <= 0.9);
  }
  // every receiver location of d1 sees the LoS path and no wall crosses the square
  for (double x = -2.0; x <= 2.0; x += 0.5)
    for (double y = -2.0; y <= 2.0; y += 0.5) CHECK(enumerate_paths(d1.scene, Location(x, y)).total_paths() >= 16);
  CHECK_THROWS(builtin_scene("d9", 4, 4));
}
