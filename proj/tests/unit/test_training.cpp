#include "catch_amalgamated.hpp"

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "nbdf/optim.hpp"
#include "nbdf/training.hpp"

using namespace nbdf;
using Catch::Approx;

namespace {

std::vector<NarrowbandSample> scene_samples(int mics, std::uint64_t seed, std::size_t count) {
  const auto scene = test::make_test_scene(make_array(GeometryTag::circular, mics, 0.2, 0), seed, {8000, 0.8});
  const auto spectra = analyze_scene(scene, StftConfig::for_sample_rate(8000));
  Rng rng(seed);
  SampleBuildOptions opts;
  opts.arrangement = ArrangementMode::natural;
  auto all = build_narrowband_samples(spectra, scene.ref_index, rng, opts, scene.scene_id);
  std::vector<NarrowbandSample> out;
  const std::size_t stride = all.size() / count;
  for (std::size_t i = 0; i < count; ++i) out.push_back(all[5 + i * stride]);
  return out;
}

ModelConfig tiny_model(Variant v, int channels) {
  ModelConfig c;
  c.variant = v;
  c.h1 = 24;
  c.h2 = 12;
  c.cc_feature_maps = 8;
  c.max_channels = 4;
  c.input_channels = channels;
  return c;
}

TrainConfig quick_config(Variant v, int channels) {
  TrainConfig cfg;
  cfg.model = tiny_model(v, channels);
  cfg.batch_size = 8;
  cfg.max_epochs = 3;
  cfg.augment = false;
  cfg.arrangement = ArrangementMode::natural;
  cfg.crop_frames = 0;
  cfg.seed = 11;
  return cfg;
}

}  // namespace

TEST_CASE("MSE loss matches its definition", "[training]") {
  nn::Mat<double> pred(2, 3), target(2, 3);
  pred << 0.1, 0.2, 0.3, 0.4, 0.5, 0.6;
  CHECK(mse_loss(pred, pred) == 0.0);
  target = pred.array() - 0.1;
  CHECK(mse_loss(pred, target) == Approx(0.01).epsilon(1e-12));
  target << 0, 0, 0, 0, 0, 1;
  const double expect = (0.01 + 0.04 + 0.09 + 0.16 + 0.25 + 0.16) / 6.0;
  CHECK(mse_loss(pred, target) == Approx(expect).epsilon(1e-12));
  CHECK_THROWS_AS(mse_loss(pred, nn::Mat<double>(3, 2)), std::invalid_argument);
}

TEST_CASE("constant half mask against uniform targets costs one twelfth", "[training]") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  nn::Mat<double> target(400, 500);
  for (Eigen::Index i = 0; i < target.size(); ++i) target.data()[i] = u(rng);
  const nn::Mat<double> pred = nn::Mat<double>::Constant(400, 500, 0.5);
  CHECK(mse_loss(pred, target) == Approx(1.0 / 12.0).epsilon(0.01));
}

TEST_CASE("MSE gradient matches finite differences", "[training]") {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> n(0.0, 1.0);
  nn::Mat<double> pred(3, 4), target(3, 4);
  for (Eigen::Index i = 0; i < pred.size(); ++i) {
    pred.data()[i] = n(rng);
    target.data()[i] = n(rng);
  }
  const auto grad = mse_loss_grad(pred, target);
  for (Eigen::Index i = 0; i < pred.size(); ++i) {
    auto p = pred, m = pred;
    p.data()[i] += 1e-6;
    m.data()[i] -= 1e-6;
    CHECK(grad.data()[i] == Approx((mse_loss(p, target) - mse_loss(m, target)) / 2e-6).epsilon(1e-6));
  }
}

TEST_CASE("Adam takes a bias-corrected first step of size lr", "[training]") {
  nn::Parameter<double> p("p", 1, 3);
  p.value << 1.0, -2.0, 0.5;
  p.grad << 0.3, -4.0, 1e-3;
  Adam<double> adam({&p}, 0.01);
  adam.step();
  CHECK(p.value(0, 0) == Approx(1.0 - 0.01).epsilon(1e-6));
  CHECK(p.value(0, 1) == Approx(-2.0 + 0.01).epsilon(1e-6));
  CHECK(p.value(0, 2) == Approx(0.5 - 0.01 * 1e-3 / (1e-3 + 1e-8)).epsilon(1e-6));
  CHECK(adam.steps() == 1);
}

TEST_CASE("training configuration is validated", "[training]") {
  TrainConfig cfg = quick_config(Variant::pw, 3);
  cfg.batch_size = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = quick_config(Variant::pw, 3);
  cfg.learning_rate = -1e-3;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = quick_config(Variant::pw, 3);
  cfg.model.h1 = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = quick_config(Variant::pw, 3);
  cfg.learning_rate = 0.0;
  CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("zero learning rate leaves parameters unchanged", "[training]") {
  const auto data = scene_samples(3, 1, 8);
  auto cfg = quick_config(Variant::pw, 3);
  cfg.learning_rate = 0.0;
  cfg.max_epochs = 1;
  Network net(cfg.model, 5);
  const Network before = net;
  const auto result = train(net, data, data, cfg);
  const auto a = before.parameters();
  const auto b = result.model.parameters();
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i]->value == b[i]->value);
}

TEST_CASE("training is reproducible for a fixed seed", "[training]") {
  const auto data = scene_samples(3, 2, 16);
  auto cfg = quick_config(Variant::pw, 3);
  cfg.augment = true;
  cfg.arrangement = ArrangementMode::shuffle;
  cfg.crop_frames = 8;
  cfg.max_epochs = 2;
  const auto r1 = train(Network(cfg.model, 7), data, data, cfg);
  const auto r2 = train(Network(cfg.model, 7), data, data, cfg);
  REQUIRE(r1.history.size() == r2.history.size());
  CHECK(r1.history[0].train_mse == Approx(r2.history[0].train_mse).epsilon(1e-6));
  CHECK(r1.history[1].val_mse == Approx(r2.history[1].val_mse).epsilon(1e-6));
  cfg.seed = 12;
  const auto r3 = train(Network(cfg.model, 7), data, data, cfg);
  CHECK(r3.history[0].train_mse != r1.history[0].train_mse);
}

TEST_CASE("training rejects incompatible channel counts and empty sets", "[training]") {
  const auto data = scene_samples(3, 3, 4);
  auto cfg = quick_config(Variant::basic, 4);
  CHECK_THROWS_AS(train(Network(cfg.model, 1), data, data, cfg), std::invalid_argument);
  cfg = quick_config(Variant::pw, 3);
  CHECK_THROWS(train(Network(cfg.model, 1), {}, data, cfg));
  CHECK_THROWS(train(Network(cfg.model, 1), data, {}, cfg));
}

TEST_CASE("divergence aborts with a diagnostic", "[training]") {
  auto data = scene_samples(3, 4, 4);
  data[0].x(0, 0) = std::numeric_limits<float>::quiet_NaN();
  auto cfg = quick_config(Variant::pw, 3);
  cfg.batch_size = 4;
  try {
    train(Network(cfg.model, 2), data, data, cfg);
    FAIL("expected divergence error");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("diverged") != std::string::npos);
  }
}

TEST_CASE("early stopping returns the best validation epoch", "[training][property]") {
  const auto train_set = scene_samples(3, 5, 8);
  const auto val_set = scene_samples(3, 6, 8);
  auto cfg = quick_config(Variant::pw, 3);
  cfg.learning_rate = 0.05;
  cfg.max_epochs = 40;
  cfg.patience = 3;
  std::vector<EpochRecord> streamed;
  cfg.on_epoch = [&](const EpochRecord& r) { streamed.push_back(r); };
  const auto result = train(Network(cfg.model, 3), train_set, val_set, cfg);
  REQUIRE(!result.history.empty());
  CHECK(streamed.size() == result.history.size());
  double best = std::numeric_limits<double>::infinity();
  for (const auto& r : result.history) best = std::min(best, r.val_mse);
  CHECK(result.best_val_mse == best);
  CHECK(result.history[static_cast<std::size_t>(result.best_epoch - 1)].val_mse == best);
  CHECK(evaluate_mse(result.model, val_set) == Approx(best).epsilon(1e-6));
  if (result.early_stopped) CHECK(static_cast<int>(result.history.size()) == result.best_epoch + cfg.patience);
}

TEST_CASE("tiny training sets are overfit and the smoothed loss never regresses", "[training][slow]") {
  const auto data = scene_samples(3, 8, 8);
  for (auto v : {Variant::basic, Variant::cp, Variant::cc, Variant::pw}) {
    auto cfg = quick_config(v, 3);
    cfg.model.h1 = 64;
    cfg.model.h2 = 32;
    cfg.model.cc_feature_maps = 64;
    cfg.max_epochs = 500;
    cfg.patience = 500;
    const auto result = train(Network(cfg.model, 21), data, data, cfg);
    CAPTURE(to_string(v));
    CHECK(result.best_val_mse < 0.01);

    // Five-epoch moving average of the training loss from epoch 20 on.
    std::vector<double> smooth;
    for (std::size_t e = 20; e + 5 <= result.history.size(); ++e) {
      double acc = 0.0;
      for (std::size_t j = e; j < e + 5; ++j) acc += result.history[j].train_mse;
      smooth.push_back(acc / 5.0);
    }
    REQUIRE(!smooth.empty());
    for (double s : smooth) CHECK(s <= smooth.front());
    CHECK(smooth.back() < 0.5 * smooth.front());
  }
}

TEST_CASE("narrowband sets are cached per scene", "[training]") {
  test::TempDir dir;
  const auto scene = test::make_test_scene(make_array(GeometryTag::linear, 2, 0.15, 0), 9, {8000, 0.5});
  std::vector<ManifestEntry> manifest{save_scene(scene, dir.path())};
  NarrowbandSetOptions opts;
  opts.stft = StftConfig::for_sample_rate(8000);
  opts.cache_dir = dir.path() / "cache";
  std::filesystem::create_directories(*opts.cache_dir);
  const auto first = load_narrowband_set(manifest, opts);
  const auto second = load_narrowband_set(manifest, opts);
  REQUIRE(first.size() == 129);
  REQUIRE(second.size() == first.size());
  std::size_t shards = 0;
  for (const auto& e : std::filesystem::directory_iterator(*opts.cache_dir)) shards += e.path().extension() == ".shard";
  CHECK(shards == 1);
  for (std::size_t i = 0; i < first.size(); ++i) {
    CHECK(first[i].x == second[i].x);
    CHECK(first[i].target == second[i].target);
  }
}
