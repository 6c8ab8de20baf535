#include "doctest.h"
#include "guirl/core/error.hpp"
#include "guirl/judge/judge.hpp"
#include "guirl/simenv/env.hpp"
#include "guirl/simenv/explore.hpp"
#include "test_util.hpp"

using namespace guirl;
using namespace guirl::core;
using namespace guirl::judge;
using guirl::simenv::Predicate;
using guirl::simenv::TaskOracleSpec;

namespace {

struct JudgeFixture {
  simenv::OracleSpecRegistry specs;
  simenv::OracleEvaluator oracle{test_apps(), test_contexts()};

  Task add_task(const std::string& id, const std::string& goal,
                std::vector<Predicate> goal_preds, std::vector<Predicate> keypoints,
                const std::string& ctx = "slide_launch",
                const std::string& app = "slidedeck") {
    TaskOracleSpec spec;
    spec.task_id = id;
    spec.app_id = app;
    spec.context_id = ctx;
    spec.goal_predicates = std::move(goal_preds);
    spec.keypoint_predicates = std::move(keypoints);
    specs.add(spec);
    Task task;
    task.task_id = id;
    task.goal_text = goal;
    task.skill_tags = {"fixture"};
    task.context_id = ctx;
    return task;
  }
};

Trajectory run_script(const std::string& app, const std::string& ctx,
                      const std::string& task_text, const std::vector<Action>& actions) {
  simenv::SimEnv env(test_apps().get(app), test_contexts());
  Trajectory traj;
  traj.task_id = "script";
  Observation obs = env.reset(ctx, task_text, static_cast<int>(actions.size()) + 1);
  traj.env_state_digest_initial = env.state_digest();
  for (const auto& a : actions) {
    TrajectoryStep step{obs, a, std::vector<double>(a.token_seq.size(), 0.0)};
    auto r = env.step(a);
    obs = r.observation;
    traj.steps.push_back(std::move(step));
    if (r.terminated) break;
  }
  traj.terminated_by = TerminationCause::AgentTerminate;
  traj.env_state_digest_final = env.state_digest();
  return traj;
}

}  // namespace

TEST_CASE("oracle key points pass the spec predicates through verbatim") {
  JudgeFixture fx;
  auto task = fx.add_task(
      "two_kp", "set the title to Alpha and save",
      {{Predicate::Kind::FieldEquals, "slide1.title", "Alpha", ""}},
      {{Predicate::Kind::ActionPerformed, "TYPE", "field_title", "Alpha"},
       {Predicate::Kind::ActionPerformed, "CLICK", "btn_save", ""}});
  OracleJudgeBackend backend(fx.oracle, fx.specs);

  auto kps = identify_key_points(backend, task);
  REQUIRE(kps.size() == 2);
  CHECK(kps[1].description.find("btn_save") != std::string::npos);  // save requirement

  Task empty_goal = task;
  empty_goal.goal_text = "";
  CHECK_THROWS_AS(identify_key_points(backend, empty_goal), ValidationError);
}

TEST_CASE("oracle screenshot scores mark keypoint flips and obey the threshold") {
  JudgeFixture fx;
  auto table = test_apps().symbol_table();
  auto task = fx.add_task("flip", "open setup",
                          {{Predicate::Kind::FieldEquals, "theme", "Dark", ""}},
                          {{Predicate::Kind::ScreenIs, "setup", "", ""}});
  OracleJudgeBackend backend(fx.oracle, fx.specs);

  // Keypoint (setup screen open) flips at step 3.
  auto traj = run_script("slidedeck", "slide_launch", "open setup",
                         {encode_action(table, ActionKind::Click, "btn_next_slide", ""),
                          encode_action(table, ActionKind::Click, "btn_prev_slide", ""),
                          encode_action(table, ActionKind::Click, "menu_setup", ""),
                          encode_action(table, ActionKind::Type, "field_theme", "Dark"),
                          encode_action(table, ActionKind::Terminate, "", "")});
  auto kps = identify_key_points(backend, task);
  auto scores = score_screenshots(backend, traj, task, kps, 3);
  REQUIRE(scores.size() == traj.steps.size());
  CHECK(scores[2].score == 5);
  CHECK(scores[2].kept);
  CHECK(scores[0].score == 1);
  CHECK_FALSE(scores[0].kept);

  // Single-step trajectory produces exactly one score.
  auto single = run_script("slidedeck", "slide_launch", "noop",
                           {encode_action(table, ActionKind::Terminate, "", "")});
  CHECK(score_screenshots(backend, single, task, kps, 3).size() == 1);
}

TEST_CASE("stub scores [1..5] with threshold 3 keep the upper three") {
  JudgeFixture fx;
  auto table = test_apps().symbol_table();
  StubJudgeBackend stub;
  stub.canned_key_points = {"anything"};
  stub.canned_scores = {1, 2, 3, 4, 5};

  auto traj = run_script("slidedeck", "slide_launch", "x",
                         {encode_action(table, ActionKind::Click, "menu_setup", ""),
                          encode_action(table, ActionKind::Click, "btn_back", ""),
                          encode_action(table, ActionKind::Click, "menu_slides", ""),
                          encode_action(table, ActionKind::Click, "btn_back", ""),
                          encode_action(table, ActionKind::Click, "menu_setup", "")});
  REQUIRE(traj.steps.size() == 5);
  Task task;
  task.task_id = "stubbed";
  task.goal_text = "x";
  task.skill_tags = {"s"};

  auto kps = identify_key_points(stub, task);
  auto scores = score_screenshots(stub, traj, task, kps, 3);
  std::vector<bool> kept;
  for (const auto& s : scores) kept.push_back(s.kept);
  CHECK(kept == std::vector<bool>{false, false, true, true, true});

  // Raising the threshold never enlarges the kept set.
  for (int lo = 1; lo <= 5; ++lo) {
    auto a = score_screenshots(stub, traj, task, kps, lo);
    auto b = score_screenshots(stub, traj, task, kps, lo + 1);
    for (size_t i = 0; i < a.size(); ++i) {
      if (b[i].kept) CHECK(a[i].kept);
    }
  }
}

TEST_CASE("diff_states reports added, removed and changed fields") {
  Observation a;
  a.screen = {{"label_app", WidgetKind::Label, "Slide Editor", false, "chrome"},
              {"field_title", WidgetKind::TextField, "A", true, "content"},
              {"field_body", WidgetKind::TextField, "body", true, "content"}};
  CHECK(diff_states(a, a).empty());

  Observation b = a;
  b.screen[1].text = "B";
  auto diff = diff_states(a, b);
  REQUIRE(diff.entries.size() == 1);
  CHECK(diff.entries[0].op == StateDiffEntry::Op::Changed);
  CHECK(diff.entries[0].field == "field_title");
  CHECK(diff.entries[0].before == "A");
  CHECK(diff.entries[0].after == "B");

  Observation c = a;
  c.screen.push_back({"label_saved", WidgetKind::Label, "saved", false, "content"});
  auto added = diff_states(a, c);
  REQUIRE(added.entries.size() == 1);
  CHECK(added.entries[0].op == StateDiffEntry::Op::Added);

  // Symmetry: added of (a,c) equals removed of (c,a).
  auto removed = diff_states(c, a);
  REQUIRE(removed.entries.size() == 1);
  CHECK(removed.entries[0].op == StateDiffEntry::Op::Removed);
  CHECK(removed.entries[0].field == added.entries[0].field);

  Observation other_app = a;
  other_app.screen[0].text = "Mail Room";
  CHECK_THROWS_AS(diff_states(a, other_app), ValidationError);
}

TEST_CASE("judge fails a trajectory that reaches the goal but skips a key point") {
  JudgeFixture fx;
  auto table = test_apps().symbol_table();
  auto task = fx.add_task(
      "detour", "check setup then retitle",
      {{Predicate::Kind::FieldEquals, "slide1.title", "Alpha", ""}},
      {{Predicate::Kind::ScreenIs, "setup", "", ""},
       {Predicate::Kind::ActionPerformed, "TYPE", "field_title", "Alpha"}});
  OracleJudgeBackend backend(fx.oracle, fx.specs);

  // Goal state reached without ever opening the setup screen.
  auto shortcut = run_script("slidedeck", "slide_launch", "retitle",
                             {encode_action(table, ActionKind::Type, "field_title", "Alpha"),
                              encode_action(table, ActionKind::Terminate, "", "")});
  auto verdict = judge::judge(backend, shortcut, task);
  CHECK(verdict.outcome == Outcome::Failure);
  REQUIRE(verdict.key_points.size() == 2);
  CHECK(verdict.key_points[0].status == KeyPointStatus::Unmet);
  CHECK(verdict.key_points[1].status == KeyPointStatus::Met);
  CHECK_FALSE(verdict.key_points[1].evidence.empty());

  // The full route succeeds and carries evidence for every key point.
  auto full = run_script("slidedeck", "slide_launch", "retitle",
                         {encode_action(table, ActionKind::Click, "menu_setup", ""),
                          encode_action(table, ActionKind::Click, "btn_back", ""),
                          encode_action(table, ActionKind::Type, "field_title", "Alpha"),
                          encode_action(table, ActionKind::Terminate, "", "")});
  auto good = judge::judge(backend, full, task);
  CHECK(good.outcome == Outcome::Success);
  for (const auto& kp : good.key_points) {
    CHECK(kp.status == KeyPointStatus::Met);
    CHECK_FALSE(kp.evidence.empty());
  }
}

TEST_CASE("oracle judge agrees with the environment oracle on random walks") {
  JudgeFixture fx;
  auto table = test_apps().symbol_table();
  auto task = fx.add_task(
      "agree", "set the title of the first slide to Alpha and save",
      {{Predicate::Kind::FieldEquals, "slide1.title", "Alpha", ""},
       {Predicate::Kind::FieldEquals, "saved", "true", ""}},
      {{Predicate::Kind::ActionPerformed, "TYPE", "field_title", "Alpha"},
       {Predicate::Kind::ActionPerformed, "CLICK", "btn_save", ""}});
  OracleJudgeBackend backend(fx.oracle, fx.specs);

  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    simenv::SimEnv env(test_apps().get("slidedeck"), test_contexts());
    auto traj = simenv::explore(env, table, "slide_launch", 12, seed);
    traj.task_id = task.task_id;
    for (auto& step : traj.steps) step.observation.task_text = task.goal_text;
    // Re-stamp digests: the task id and text do not affect the env state.
    auto verdict = judge::judge(backend, traj, task);
    auto expected = fx.oracle.evaluate(traj, fx.specs.get(task.task_id));
    CHECK((verdict.outcome == Outcome::Success) == (expected.success == 1));
  }
}

TEST_CASE("stub backends yield deterministic verdicts and retries recover") {
  auto table = test_apps().symbol_table();
  auto traj = run_script("slidedeck", "slide_launch", "x",
                         {encode_action(table, ActionKind::Type, "field_title", "Beta"),
                          encode_action(table, ActionKind::Terminate, "", "")});
  Task task;
  task.task_id = "stub";
  task.goal_text = "x";
  task.skill_tags = {"s"};

  StubJudgeBackend stub;
  stub.canned_key_points = {"kp one"};
  stub.canned_scores = {5};
  stub.canned_outcome.outcome = Outcome::Success;
  stub.canned_outcome.key_points = {{KeyPointStatus::Met, {0}}};
  stub.canned_outcome.rationale = "canned";

  auto v1 = judge::judge(stub, traj, task);
  auto v2 = judge::judge(stub, traj, task);
  CHECK(v1 == v2);
  CHECK(v1.outcome == Outcome::Success);

  // Two transport failures are absorbed by the three-attempt budget.
  StubJudgeBackend flaky = stub;
  flaky.fail_first_n_calls = 2;
  CHECK(judge::judge(flaky, traj, task).outcome == Outcome::Success);

  StubJudgeBackend dead = stub;
  dead.fail_first_n_calls = 1000;
  CHECK_THROWS_AS(judge::judge(dead, traj, task), TransportError);

  // A success claim without evidence is demoted to failure.
  StubJudgeBackend liar = stub;
  liar.canned_outcome.key_points = {{KeyPointStatus::Met, {}}};
  auto demoted = judge::judge(liar, traj, task);
  CHECK(demoted.outcome == Outcome::Failure);
}

TEST_CASE("compute_metrics reproduces hand-computed confusion matrices") {
  using V = std::vector<Outcome>;
  const V all_pos(10, Outcome::Success);
  auto m1 = compute_metrics(all_pos, std::vector<int>(10, 1));
  CHECK(*m1.precision == 1.0);
  CHECK(*m1.recall == 1.0);
  CHECK(*m1.agreement == 1.0);

  // All positive verdicts over half-positive labels.
  V verdicts(100, Outcome::Success);
  std::vector<int> labels(100, 0);
  for (int i = 0; i < 50; ++i) labels[i] = 1;
  auto m2 = compute_metrics(verdicts, labels);
  CHECK(m2.tp == 50);
  CHECK(m2.fp == 50);
  CHECK(*m2.precision == 0.5);
  CHECK(*m2.recall == 1.0);
  CHECK(*m2.agreement == 0.5);

  // Zero predicted positives: precision absent, recall zero.
  V none(4, Outcome::Failure);
  auto m3 = compute_metrics(none, {1, 1, 0, 0});
  CHECK_FALSE(m3.precision.has_value());
  CHECK(*m3.recall == 0.0);
  CHECK(*m3.agreement == 0.5);

  CHECK_THROWS_AS(compute_metrics(none, {1}), ValidationError);
  CHECK_THROWS_AS(compute_metrics(none, {1, 2, 0, 0}), ValidationError);
}
