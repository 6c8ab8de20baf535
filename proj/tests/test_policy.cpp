#include <cmath>
#include <filesystem>
#include <map>
#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "guirl/core/error.hpp"
#include "guirl/policy/checkpoint.hpp"
#include "guirl/policy/features.hpp"
#include "guirl/policy/model.hpp"
#include "guirl/simenv/app.hpp"
#include "test_util.hpp"

using namespace guirl;
using namespace guirl::core;
using namespace guirl::policy;

TEST_CASE("feature extraction is deterministic and windowed to two observations") {
  FeatureConfig cfg;
  std::mt19937_64 rng(3);
  auto o1 = fixtures::random_observation(rng, 0);
  auto o2 = fixtures::random_observation(rng, 1);
  auto o3 = fixtures::random_observation(rng, 2);

  auto f1 = extract_features(cfg, "paint it gold", {&o1, &o2, &o3});
  auto f2 = extract_features(cfg, "paint it gold", {&o1, &o2, &o3});
  CHECK(f1 == f2);

  auto truncated = extract_features(cfg, "paint it gold", {&o2, &o3});
  CHECK(f1 == truncated);  // only the last two observations matter

  CHECK_THROWS_AS(extract_features(cfg, "x", {}), ValidationError);
}

TEST_CASE("distinct goal texts hash to distinct feature vectors") {
  FeatureConfig cfg;
  std::mt19937_64 rng(4);
  auto obs = fixtures::random_observation(rng, 0);
  const auto words = test_apps().get("slidedeck").payload_vocabulary();
  std::vector<std::vector<double>> seen;
  for (size_t i = 0; i < words.size(); ++i) {
    for (size_t j = 0; j < words.size(); ++j) {
      if (i == j) continue;
      auto f = extract_features(cfg, "set " + words[i] + " to " + words[j], {&obs});
      for (const auto& other : seen) CHECK(f != other);
      seen.push_back(std::move(f));
      if (seen.size() >= 60) break;
    }
    if (seen.size() >= 60) break;
  }
}

TEST_CASE("zero-initialized score heads give a uniform first-token distribution") {
  FeatureConfig cfg;
  cfg.feature_dim = 32;
  cfg.hidden_dim = 8;
  auto snap = make_initial_snapshot(cfg, test_apps().symbol_table(), 42);
  PolicyModel model(snap);

  // All four action kinds legal at once: button + textfield + list item.
  Observation obs;
  obs.task_text = "browse";
  obs.screen = {{"btn_save", WidgetKind::Button, "Save", true, "actions"},
                {"field_title", WidgetKind::TextField, "", true, "content"},
                {"item_slide_1", WidgetKind::ListItem, "1: x", true, "content"}};
  auto legal = model.legal_symbols(obs, {});
  REQUIRE(legal.size() == 4);

  auto terminate = std::vector<int>{snap.symbols.kind_symbol(ActionKind::Terminate)};
  auto fwd = model.score_action("browse", {&obs}, terminate, 1.0);
  for (double p : fwd.probs[0]) CHECK(p == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("forced symbols carry log-probability exactly zero") {
  auto snap = fixtures::random_snapshot(7);
  PolicyModel model(snap);
  std::mt19937_64 rng(8);
  auto obs = fixtures::random_observation(rng, 0);

  // TYPE with a payload at the cap: the final end marker is forced.
  const auto& t = snap.symbols;
  std::vector<int> tokens = {t.kind_symbol(ActionKind::Type), t.widget_symbol("field_d"),
                             t.word_symbol("red"), t.word_symbol("blue"), t.end_symbol()};
  auto fwd = model.score_action("dye it", {&obs}, tokens, 1.0);
  CHECK(fwd.log_probs.back() == 0.0);
  CHECK(fwd.legal.back().size() == 1);
}

TEST_CASE("illegal tokens are rejected with the offending index") {
  auto snap = fixtures::random_snapshot(9);
  PolicyModel model(snap);
  std::mt19937_64 rng(10);
  auto obs = fixtures::random_observation(rng, 0);
  // CLICK targeting a textfield is grammatically illegal at index 1.
  std::vector<int> tokens = {snap.symbols.kind_symbol(ActionKind::Click),
                             snap.symbols.widget_symbol("field_d")};
  try {
    model.score_action("x", {&obs}, tokens, 1.0);
    FAIL("expected rejection");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("index 1") != std::string::npos);
  }
}

TEST_CASE("sampling is reproducible and respects the legal mask") {
  auto snap = fixtures::random_snapshot(11);
  PolicyModel model(snap);
  std::mt19937_64 rng(12);

  for (int round = 0; round < 50; ++round) {
    auto obs = fixtures::random_observation(rng, 0);
    obs.task_text = "color the field";
    const std::uint64_t seed = rng();
    auto [a1, lp1] = model.sample_action(obs.task_text, {&obs}, 1.0, seed);
    auto [a2, lp2] = model.sample_action(obs.task_text, {&obs}, 1.0, seed);
    CHECK(a1 == a2);
    CHECK(lp1 == lp2);

    // Sampled actions always decode and re-encode consistently and target
    // enabled widgets of the right kind.
    if (a1.kind != ActionKind::Terminate) {
      const WidgetRecord* w = obs.find_widget(a1.target);
      REQUIRE(w != nullptr);
      CHECK(w->enabled);
      CHECK(simenv::action_targets_widget_kind(a1.kind, w->kind));
    }
  }
}

TEST_CASE("near-zero temperature samples the argmax action token") {
  auto snap = fixtures::random_snapshot(13);
  PolicyModel model(snap);
  std::mt19937_64 rng(14);
  auto obs = fixtures::random_observation(rng, 0);
  obs.task_text = "pick";

  auto terminate = std::vector<int>{snap.symbols.kind_symbol(ActionKind::Terminate)};
  auto fwd = model.score_action(obs.task_text, {&obs}, terminate, 1.0);
  const auto& legal = fwd.legal[0];
  // Exact argmax over the first-position distribution at temperature 1.
  size_t best = 0;
  for (size_t i = 0; i < fwd.probs[0].size(); ++i) {
    if (fwd.probs[0][i] > fwd.probs[0][best]) best = i;
  }
  for (int trial = 0; trial < 20; ++trial) {
    auto [a, lp] = model.sample_action(obs.task_text, {&obs}, 1e-9, rng());
    CHECK(a.token_seq[0] == legal[best]);
  }
}

TEST_CASE("sampled first-token frequencies match exact probabilities") {
  auto snap = fixtures::random_snapshot(15);
  PolicyModel model(snap);
  std::mt19937_64 rng(16);
  auto obs = fixtures::random_observation(rng, 0);
  obs.task_text = "measure";

  auto terminate = std::vector<int>{snap.symbols.kind_symbol(ActionKind::Terminate)};
  auto fwd = model.score_action(obs.task_text, {&obs}, terminate, 1.0);
  const auto& legal = fwd.legal[0];
  const auto& probs = fwd.probs[0];

  const int n = 100000;
  std::map<int, int> counts;
  for (int i = 0; i < n; ++i) {
    auto [a, lp] = model.sample_action(obs.task_text, {&obs}, 1.0, rng());
    counts[a.token_seq[0]] += 1;
  }

  double entropy_exact = 0.0, entropy_emp = 0.0, kl = 0.0;
  for (size_t i = 0; i < legal.size(); ++i) {
    const double p = probs[i];
    const double f = static_cast<double>(counts[legal[i]]) / n;
    const double sigma = std::sqrt(p * (1.0 - p) / n);
    CHECK(std::abs(f - p) <= 3.0 * sigma + 1e-12);  // 3-sigma binomial bound
    entropy_exact -= p * std::log(p);
    if (f > 0) {
      entropy_emp -= f * std::log(f);
      kl += f * std::log(f / p);
    }
  }
  CHECK(std::abs(entropy_emp - entropy_exact) <= 0.01 * entropy_exact);
  CHECK(kl < 1e-3);
}

TEST_CASE("checkpoints round-trip bit-exactly") {
  auto snap = fixtures::random_snapshot(17);
  snap.version = 5;
  const auto path = std::filesystem::temp_directory_path() / "guirl_ckpt_test.bin";
  save_checkpoint(snap, path.string());
  auto loaded = load_checkpoint(path.string());
  CHECK(loaded.version == snap.version);
  CHECK(loaded.theta == snap.theta);  // bitwise equality of every parameter
  CHECK(loaded.symbols == snap.symbols);
  CHECK(snapshot_digest(loaded) == snapshot_digest(snap));
  CHECK(checkpoint_file_digest(path.string()) == snapshot_digest(snap));
  std::filesystem::remove(path);
}

TEST_CASE("layer map partitions theta with perception and backbone groups") {
  auto snap = fixtures::random_snapshot(18);
  CHECK_NOTHROW(validate_layer_map(snap));
  std::int64_t total = 0;
  bool perception = false, backbone = false;
  for (const auto& seg : snap.layer_map) {
    total += seg.length;
    perception = perception || seg.group == "perception";
    backbone = backbone || seg.group == "backbone";
  }
  CHECK(total == static_cast<std::int64_t>(snap.theta.size()));
  CHECK(perception);
  CHECK(backbone);

  auto broken = snap;
  broken.layer_map[1].offset += 1;
  CHECK_THROWS_AS(validate_layer_map(broken), ValidationError);
}
