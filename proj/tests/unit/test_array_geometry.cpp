#include "catch_amalgamated.hpp"

#include <cmath>
#include <set>

#include "nbdf/array_geometry.hpp"
#include "nbdf/scene_geometry.hpp"

using namespace nbdf;
using Catch::Approx;

TEST_CASE("geometry tags round trip through strings", "[geometry]") {
  for (auto tag : {GeometryTag::linear, GeometryTag::circular, GeometryTag::circular_center,
                   GeometryTag::nonuniform_linear, GeometryTag::adhoc})
    CHECK(parse_geometry_tag(to_string(tag)) == tag);
  CHECK_THROWS(parse_geometry_tag("spiral"));
}

TEST_CASE("uniform linear array spans the diameter", "[geometry]") {
  const auto a = make_array(GeometryTag::linear, 6, 0.25, 0);
  REQUIRE(a.channels() == 6);
  CHECK(a.max_pairwise_distance() == Approx(0.25));
  CHECK(a.min_pairwise_distance() == Approx(0.05));
  CHECK(a.key() == "linear/6/0.2500");
  for (const auto& p : a.mic_positions) CHECK(p.z() == 0.0);
}

TEST_CASE("circular arrays place microphones on the circle", "[geometry]") {
  const auto c = make_array(GeometryTag::circular, 6, 0.2, 0);
  for (const auto& p : c.mic_positions) CHECK(p.norm() == Approx(0.1));
  CHECK(c.distance(0, 3) == Approx(0.2));
  const auto cc = make_array(GeometryTag::circular_center, 5, 0.2, 0);
  int at_center = 0;
  for (const auto& p : cc.mic_positions) at_center += p.norm() < 1e-12 ? 1 : 0;
  CHECK(at_center == 1);
}

TEST_CASE("random layouts respect spacing and diameter", "[geometry][property]") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    for (auto tag : {GeometryTag::nonuniform_linear, GeometryTag::adhoc}) {
      for (int m : {2, 4, 8}) {
        const auto a = make_array(tag, m, 0.15 + 0.0175 * static_cast<double>(seed), seed);
        REQUIRE(a.channels() == m);
        CHECK(a.min_pairwise_distance() >= kMinRandomSpacing - 1e-12);
        CHECK(a.max_pairwise_distance() <= a.diameter + 1e-9);
        CHECK_NOTHROW(a.validate());
      }
    }
  }
}

TEST_CASE("array construction validates its arguments", "[geometry]") {
  CHECK_THROWS_AS(make_array(GeometryTag::linear, 1, 0.2, 0), std::invalid_argument);
  CHECK_THROWS_AS(make_array(GeometryTag::linear, 9, 0.2, 0), std::invalid_argument);
  CHECK_THROWS_AS(make_array(GeometryTag::linear, 4, 0.05, 0), std::invalid_argument);
  CHECK_THROWS_AS(make_array(GeometryTag::circular, 4, 0.9, 0), std::invalid_argument);
}

TEST_CASE("array pool honours exclusions and is deterministic", "[geometry]") {
  ArrayPoolOptions opts;
  opts.exclude = {"circular/6"};
  const auto pool = make_array_pool(opts, 3);
  const auto again = make_array_pool(opts, 3);
  REQUIRE(pool.size() == again.size());
  std::set<std::string> keys;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    CHECK(pool[i].key() == again[i].key());
    CHECK_FALSE(matches_exclusion(pool[i].key(), opts.exclude));
    keys.insert(pool[i].key());
  }
  CHECK(keys.size() > 20);
  CHECK(matches_exclusion("circular/6/0.2000", {"circular/6"}));
  CHECK_FALSE(matches_exclusion("circular/6/0.2000", {"circular/60"}));
  CHECK(matches_exclusion("linear/4/0.1500", {"linear/4/0.1500"}));

  opts.max_arrays = 10;
  CHECK(make_array_pool(opts, 3).size() == 10);
}

TEST_CASE("scene placement keeps everything inside the room", "[geometry][property]") {
  const auto rooms = default_rooms();
  REQUIRE(rooms.size() == 3);
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    Rng rng(seed);
    const auto array = make_array(GeometryTag::circular, 8, 0.5, seed);
    const auto p = sample_scene_geometry(rooms, array, rng);
    const auto& dim = p.room_dimensions;
    for (const auto& m : p.mic_positions) {
      CHECK((m.array() >= 0.3 - 1e-9).all());
      CHECK((m.array() <= dim.array() - 0.3 + 1e-9).all());
      CHECK(m.z() == Approx(1.0));
    }
    CHECK((p.source.array() > 0.0).all());
    CHECK((p.source.array() < dim.array()).all());
    CHECK(p.distance >= 0.5 - 1e-9);
    CHECK(p.distance <= 4.5 + 1e-9);
    CHECK(p.rt60 >= 0.14);
    CHECK(p.rt60 <= 1.0);
  }
}
