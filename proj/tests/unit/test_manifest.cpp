#include "catch_amalgamated.hpp"

#include "fixtures.hpp"
#include "nbdf/manifest.hpp"

using namespace nbdf;
using Catch::Approx;

TEST_CASE("manifest lines round trip", "[manifest]") {
  ManifestEntry e;
  e.scene_id = "scene_000001";
  e.mixture = "/data/set/wav/scene_000001_mixture.wav";
  e.speech = "/data/set/wav/scene_000001_speech.wav";
  e.noise = "/data/set/wav/scene_000001_noise.wav";
  e.array = make_array(GeometryTag::adhoc, 5, 0.3, 4);
  e.ref_index = 2;
  e.snr_db = -3.25;
  e.rt60 = 0.61;
  e.noise_kind = NoiseKind::babble;
  e.seed = 99;
  e.sample_rate = 8000;
  const auto line = manifest_line(e, "/data/set");
  CHECK(line.find("wav/scene_000001_mixture.wav") != std::string::npos);
  CHECK(line.find("/data/set/wav") == std::string::npos);
  const auto r = parse_manifest_line(line, "/data/set");
  CHECK(r.scene_id == e.scene_id);
  CHECK(r.mixture == e.mixture);
  CHECK(r.array.key() == e.array.key());
  for (int m = 0; m < 5; ++m) CHECK((r.array.mic_positions[m] - e.array.mic_positions[m]).norm() < 1e-12);
  CHECK(r.ref_index == 2);
  CHECK(r.snr_db == e.snr_db);
  CHECK(r.noise_kind == NoiseKind::babble);
  CHECK(r.seed == 99);
  CHECK(r.sample_rate == 8000);
}

TEST_CASE("manifest parser rejects malformed lines", "[manifest]") {
  CHECK_THROWS(parse_manifest_line("{not json", "/"));
  CHECK_THROWS(parse_manifest_line(R"({"scene_id": "x"})", "/"));
}

TEST_CASE("saved scenes reload with float precision", "[manifest]") {
  test::TempDir dir;
  const auto scene = test::make_test_scene(make_array(GeometryTag::linear, 3, 0.2, 0), 5, {8000, 0.5});
  const auto entry = save_scene(scene, dir.path());
  write_manifest(dir.path() / "manifest.jsonl", {entry});
  const auto entries = read_manifest(dir.path() / "manifest.jsonl");
  REQUIRE(entries.size() == 1);
  const auto loaded = load_scene(entries[0]);
  CHECK(loaded.scene_id == scene.scene_id);
  CHECK(loaded.ref_index == scene.ref_index);
  REQUIRE(loaded.mixture.length() == scene.mixture.length());
  for (std::size_t i = 0; i < scene.mixture.data().size(); ++i)
    REQUIRE(loaded.mixture.data()[i] == Approx(scene.mixture.data()[i]).margin(1e-7));
  CHECK_THROWS(read_manifest(dir.path() / "absent.jsonl"));
}
