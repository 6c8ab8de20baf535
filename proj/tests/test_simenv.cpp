#include <fstream>
#include <set>

#include "doctest.h"
#include "guirl/core/error.hpp"
#include "guirl/simenv/env.hpp"
#include "guirl/simenv/explore.hpp"
#include "guirl/simenv/oracle.hpp"
#include "test_util.hpp"

using namespace guirl;
using namespace guirl::core;
using namespace guirl::simenv;

namespace {

SimEnv make_env(const std::string& app_id) {
  return SimEnv(test_apps().get(app_id), test_contexts());
}

Trajectory run_actions(SimEnv& env, const std::string& ctx, const std::string& task_text,
                       const std::vector<Action>& actions, int max_steps) {
  Trajectory traj;
  traj.task_id = "fixture";
  Observation obs = env.reset(ctx, task_text, max_steps);
  traj.env_state_digest_initial = env.state_digest();
  for (const auto& a : actions) {
    TrajectoryStep step;
    step.observation = obs;
    step.action = a;
    step.log_probs.assign(a.token_seq.size(), 0.0);
    auto r = env.step(a);
    obs = r.observation;
    traj.steps.push_back(std::move(step));
    if (r.terminated) {
      traj.terminated_by = a.kind == ActionKind::Terminate ? TerminationCause::AgentTerminate
                                                           : TerminationCause::StepLimit;
      break;
    }
  }
  traj.env_state_digest_final = env.state_digest();
  return traj;
}

}  // namespace

TEST_CASE("reset is deterministic and a no-op episode preserves the digest") {
  auto env1 = make_env("slidedeck");
  auto env2 = make_env("slidedeck");
  env1.reset("slide_launch", "t", 10);
  env2.reset("slide_launch", "t", 10);
  CHECK(env1.state_digest() == env2.state_digest());

  const std::string initial = env1.state_digest();
  CHECK(initial == env1.state_digest());  // zero actions

  auto env3 = make_env("slidedeck");
  env3.reset("slide_minimal", "t", 10);
  CHECK(env3.state_digest() != initial);  // different contexts differ
}

TEST_CASE("reset rejects unknown contexts and app mismatches") {
  auto env = make_env("slidedeck");
  CHECK_THROWS_AS(env.reset("no_such_ctx", "t", 10), ValidationError);
  CHECK_THROWS_AS(env.reset("mail_busy", "t", 10), ValidationError);
}

TEST_CASE("loading a context reproduces the seed content exactly") {
  for (const auto& app_id : test_apps().app_ids()) {
    for (const auto& ctx_id : test_contexts().ids_for_app(app_id)) {
      auto env = make_env(app_id);
      env.reset(ctx_id, "t", 5);
      CHECK(env.state().document_model == test_contexts().get(ctx_id).document_seed);
    }
  }
}

TEST_CASE("terminate is a state no-op and ends the episode") {
  auto table = test_apps().symbol_table();
  auto env = make_env("slidedeck");
  env.reset("slide_launch", "t", 10);
  const std::string before = env.state_digest();
  auto r = env.step(encode_action(table, ActionKind::Terminate, "", ""));
  CHECK(r.terminated);
  CHECK(env.state_digest() == before);
  CHECK_THROWS_AS(env.step(encode_action(table, ActionKind::Terminate, "", "")),
                  ValidationError);
}

TEST_CASE("clicking a menu pushes a screen declared in the screen graph") {
  auto table = test_apps().symbol_table();
  auto env = make_env("slidedeck");
  env.reset("slide_launch", "t", 10);
  const auto graph = test_apps().get("slidedeck").screen_graph();
  const size_t depth = env.state().screen_stack.size();
  env.step(encode_action(table, ActionKind::Click, "menu_slides", ""));
  CHECK(env.state().screen_stack.size() == depth + 1);
  // The pushed screen must match the declared navigation edge.
  std::string declared;
  for (const auto& s : graph.screens) {
    if (s.screen_id == "editor") declared = s.nav.at("menu_slides");
  }
  CHECK(env.state().screen() == declared);
}

TEST_CASE("typing into a disabled field is absorbed with an error banner") {
  auto table = test_apps().symbol_table();
  auto env = make_env("slidedeck");
  env.reset("slide_launch", "t", 10);
  // Dirty the document so the theme field becomes disabled.
  env.step(encode_action(table, ActionKind::Type, "field_title", "Alpha"));
  env.step(encode_action(table, ActionKind::Click, "menu_setup", ""));
  const auto before_doc = env.state().document_model;
  const std::string before_digest = env.state_digest();
  auto r = env.step(encode_action(table, ActionKind::Type, "field_theme", "Dark"));
  CHECK(env.state().document_model == before_doc);
  CHECK(env.state_digest() == before_digest);
  CHECK_FALSE(r.terminated);
  bool banner = false;
  for (const auto& w : r.observation.screen) banner = banner || w.id == "banner_error";
  CHECK(banner);
}

TEST_CASE("actions on absent widgets are absorbed without state change") {
  auto table = test_apps().symbol_table();
  auto env = make_env("slidedeck");
  env.reset("slide_launch", "t", 10);
  const std::string before = env.state_digest();
  // btn_send exists only in the mail app; it is never on a slidedeck screen.
  auto r = env.step(encode_action(table, ActionKind::Click, "btn_send", ""));
  CHECK(env.state_digest() == before);
  bool banner = false;
  for (const auto& w : r.observation.screen) banner = banner || w.id == "banner_error";
  CHECK(banner);
}

TEST_CASE("step limit terminates the episode with the limit cause") {
  auto table = test_apps().symbol_table();
  auto env = make_env("slidedeck");
  env.reset("slide_launch", "t", 2);
  auto r1 = env.step(encode_action(table, ActionKind::Click, "menu_setup", ""));
  CHECK_FALSE(r1.terminated);
  auto r2 = env.step(encode_action(table, ActionKind::Click, "btn_back", ""));
  CHECK(r2.terminated);
}

TEST_CASE("replaying an action sequence is bit-identical") {
  auto table = test_apps().symbol_table();
  for (const auto& app_id : test_apps().app_ids()) {
    auto ctxs = test_contexts().ids_for_app(app_id);
    auto env1 = make_env(app_id);
    auto env2 = make_env(app_id);
    auto t1 = explore(env1, table, ctxs.front(), 40, 99);
    auto t2 = explore(env2, table, ctxs.front(), 40, 99);
    CHECK(t1 == t2);
    CHECK(env1.state_digest() == env2.state_digest());
  }
}

TEST_CASE("interleaved instances match sequential execution") {
  auto table = test_apps().symbol_table();
  auto seq_a = make_env("slidedeck");
  auto seq_b = make_env("mailroom");
  auto ta = explore(seq_a, table, "slide_launch", 25, 7);
  auto tb = explore(seq_b, table, "mail_busy", 25, 8);

  // Re-run the same action sequences interleaved on fresh instances.
  auto il_a = make_env("slidedeck");
  auto il_b = make_env("mailroom");
  il_a.reset("slide_launch", "", 25);
  il_b.reset("mail_busy", "", 25);
  const size_t n = std::max(ta.steps.size(), tb.steps.size());
  for (size_t i = 0; i < n; ++i) {
    if (i < ta.steps.size()) il_a.step(ta.steps[i].action);
    if (i < tb.steps.size()) il_b.step(tb.steps[i].action);
  }
  CHECK(il_a.state_digest() == ta.env_state_digest_final);
  CHECK(il_b.state_digest() == tb.env_state_digest_final);
}

TEST_CASE("exploration is seeded, bounded and covers screens") {
  auto table = test_apps().symbol_table();
  auto env = make_env("slidedeck");

  auto one = explore(env, table, "slide_launch", 1, 5);
  CHECK(one.steps.size() == 1);

  auto walk = explore(env, table, "slide_launch", 50, 5);
  CHECK(walk.steps.size() <= 50);
  std::set<std::string> screens;
  // Count distinct screens via the rendered page markers.
  auto replay_env = make_env("slidedeck");
  replay_env.reset("slide_launch", "", 50);
  screens.insert(replay_env.state().screen());
  for (const auto& s : walk.steps) {
    replay_env.step(s.action);
    screens.insert(replay_env.state().screen());
  }
  CHECK(screens.size() >= 2);

  CHECK_THROWS_AS(explore(env, table, "slide_launch", 0, 5), ValidationError);
}

TEST_CASE("context review is read-only, seeded and covers every section") {
  auto table = test_apps().symbol_table();
  for (const auto& app_id : test_apps().app_ids()) {
    for (const auto& ctx_id : test_contexts().ids_for_app(app_id)) {
      auto env = make_env(app_id);
      auto t1 = review_context(env, table, ctx_id, 11);
      CHECK(t1.env_state_digest_initial == t1.env_state_digest_final);
      auto env2 = make_env(app_id);
      auto t2 = review_context(env2, table, ctx_id, 11);
      CHECK(t1 == t2);
    }
  }

  // The three-slide deck shows all three slide positions during review.
  auto env = make_env("slidedeck");
  auto traj = review_context(env, table, "slide_launch", 3);
  std::set<std::string> positions;
  for (const auto& s : traj.steps) {
    for (const auto& w : s.observation.screen) {
      if (w.id == "label_slide_pos") positions.insert(w.text);
    }
  }
  CHECK(positions.count("Slide 1 of 3"));
  CHECK(positions.count("Slide 2 of 3"));
  CHECK(positions.count("Slide 3 of 3"));
}

TEST_CASE("oracle evaluation checks goals, keypoints and digests") {
  auto table = test_apps().symbol_table();
  OracleEvaluator oracle(test_apps(), test_contexts());

  TaskOracleSpec vacuous;
  vacuous.task_id = "vacuous";
  vacuous.app_id = "slidedeck";
  vacuous.context_id = "slide_launch";

  auto env = make_env("slidedeck");
  auto traj = run_actions(env, "slide_launch", "anything",
                          {encode_action(table, ActionKind::Terminate, "", "")}, 5);
  CHECK(oracle.evaluate(traj, vacuous).success == 1);

  TaskOracleSpec unreachable = vacuous;
  unreachable.task_id = "unreachable";
  unreachable.goal_predicates = {
      {Predicate::Kind::FieldEquals, "slide1.title", "Omega", ""}};
  CHECK(oracle.evaluate(traj, unreachable).success == 0);

  // "Set the title to Alpha and save": typing without saving fails keypoint 2.
  TaskOracleSpec spec = vacuous;
  spec.task_id = "type_and_save";
  spec.goal_predicates = {{Predicate::Kind::FieldEquals, "slide1.title", "Alpha", ""},
                          {Predicate::Kind::FieldEquals, "saved", "true", ""}};
  spec.keypoint_predicates = {
      {Predicate::Kind::ActionPerformed, "TYPE", "field_title", "Alpha"},
      {Predicate::Kind::ActionPerformed, "CLICK", "btn_save", ""}};

  auto env2 = make_env("slidedeck");
  auto typed = run_actions(env2, "slide_launch", "set title",
                           {encode_action(table, ActionKind::Type, "field_title", "Alpha"),
                            encode_action(table, ActionKind::Terminate, "", "")},
                           5);
  auto outcome = oracle.evaluate(typed, spec);
  CHECK(outcome.success == 0);
  REQUIRE(outcome.keypoint_results.size() == 2);
  CHECK(outcome.keypoint_results[0].met);
  CHECK_FALSE(outcome.keypoint_results[1].met);

  // Completing both steps succeeds.
  auto env3 = make_env("slidedeck");
  auto full = run_actions(env3, "slide_launch", "set title",
                          {encode_action(table, ActionKind::Type, "field_title", "Alpha"),
                           encode_action(table, ActionKind::Click, "btn_save", ""),
                           encode_action(table, ActionKind::Terminate, "", "")},
                          5);
  CHECK(oracle.evaluate(full, spec).success == 1);

  // Removing a keypoint never flips success from 1 to 0.
  TaskOracleSpec fewer = spec;
  fewer.keypoint_predicates.pop_back();
  CHECK(oracle.evaluate(full, fewer).success == 1);

  // Digest mismatch: trajectory claims a different starting state.
  auto forged = typed;
  forged.env_state_digest_initial = "0000000000000000";
  CHECK_THROWS_AS(oracle.evaluate(forged, spec), ValidationError);
}

TEST_CASE("screen graphs exported by the apps match the bundled data files") {
  for (const auto& app_id : test_apps().app_ids()) {
    auto exported = screen_graph_to_json(test_apps().get(app_id).screen_graph());
    std::ifstream in(data_path("apps/" + app_id + ".json"));
    REQUIRE(in.good());
    nlohmann::ordered_json bundled;
    in >> bundled;
    CHECK(exported == bundled);
  }
}
