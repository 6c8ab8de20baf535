#include <random>

#include "doctest.h"
#include "guirl/core/digest.hpp"
#include "guirl/core/error.hpp"
#include "guirl/core/json_io.hpp"
#include "guirl/core/symbols.hpp"
#include "guirl/core/types.hpp"
#include "test_util.hpp"

using namespace guirl;
using namespace guirl::core;

namespace {

SymbolTable small_table() {
  return SymbolTable::build({"btn_save", "field_title", "list_rows"},
                            {"Q3", "Report", "Alpha"});
}

Trajectory tiny_trajectory(const SymbolTable& t) {
  Trajectory traj;
  traj.task_id = "task_x";
  Observation obs;
  obs.screen = {{"btn_save", WidgetKind::Button, "Save", true, "actions"}};
  obs.task_text = "save it";
  obs.step_index = 0;
  TrajectoryStep s0;
  s0.observation = obs;
  s0.action = encode_action(t, ActionKind::Click, "btn_save", "");
  s0.log_probs = {-0.7, -0.1};
  traj.steps.push_back(s0);
  TrajectoryStep s1;
  s1.observation = obs;
  s1.observation.step_index = 1;
  s1.action = encode_action(t, ActionKind::Terminate, "", "");
  s1.log_probs = {-0.2};
  traj.steps.push_back(s1);
  traj.terminated_by = TerminationCause::AgentTerminate;
  traj.env_state_digest_initial = "aa";
  traj.env_state_digest_final = "bb";
  return traj;
}

}  // namespace

TEST_CASE("terminate encodes to a single token") {
  auto t = small_table();
  auto a = encode_action(t, ActionKind::Terminate, "", "");
  CHECK(a.token_seq.size() == 1);
  auto back = decode_action(t, a.token_seq);
  CHECK(back.kind == ActionKind::Terminate);
  CHECK(back.target.empty());
  CHECK(back.payload.empty());
}

TEST_CASE("click round-trips through its token encoding") {
  auto t = small_table();
  auto a = encode_action(t, ActionKind::Click, "btn_save", "");
  auto back = decode_action(t, a.token_seq);
  CHECK(back.kind == ActionKind::Click);
  CHECK(back.target == "btn_save");
}

TEST_CASE("type payload token count is 2 plus payload symbols") {
  auto t = small_table();
  // "Q3 Report" tokenizes to two word symbols plus the end marker.
  auto a = encode_action(t, ActionKind::Type, "field_title", "Q3 Report");
  CHECK(a.token_seq.size() == 2 + 3);
  auto back = decode_action(t, a.token_seq);
  CHECK(back.payload == "Q3 Report");
}

TEST_CASE("invalid action combinations are rejected") {
  auto t = small_table();
  CHECK_THROWS_AS(encode_action(t, ActionKind::Terminate, "btn_save", ""), ValidationError);
  CHECK_THROWS_AS(encode_action(t, ActionKind::Click, "", ""), ValidationError);
  CHECK_THROWS_AS(encode_action(t, ActionKind::Click, "btn_save", "Q3"), ValidationError);
  CHECK_THROWS_AS(encode_action(t, ActionKind::Type, "field_title", "NotInVocab"),
                  ValidationError);
  CHECK_THROWS_AS(encode_action(t, ActionKind::Scroll, "nope", ""), ValidationError);
}

TEST_CASE("encode/decode is a bijection on random valid actions") {
  const auto& apps = test_apps();
  auto table = apps.symbol_table();
  std::vector<std::string> widgets;
  for (const auto& id : apps.get("slidedeck").actionable_widget_ids()) widgets.push_back(id);
  for (const auto& id : apps.get("mailroom").actionable_widget_ids()) widgets.push_back(id);
  auto words = apps.get("slidedeck").payload_vocabulary();

  std::mt19937_64 rng(1234);
  for (int i = 0; i < 500; ++i) {
    const int kind_pick = static_cast<int>(rng() % 4);
    ActionKind kind = static_cast<ActionKind>(kind_pick);
    std::string target;
    std::string payload;
    if (kind != ActionKind::Terminate) {
      target = widgets[rng() % widgets.size()];
    }
    if (kind == ActionKind::Type) {
      const int n = static_cast<int>(rng() % 3);
      for (int k = 0; k < n; ++k) {
        if (!payload.empty()) payload += ' ';
        payload += words[rng() % words.size()];
      }
    }
    Action a = encode_action(table, kind, target, payload);
    Action b = decode_action(table, a.token_seq);
    CHECK(a.kind == b.kind);
    CHECK(a.target == b.target);
    CHECK(a.payload == b.payload);
    CHECK(a.token_seq == b.token_seq);
  }
}

TEST_CASE("trajectory digest is deterministic and field-sensitive") {
  auto t = small_table();
  auto traj = tiny_trajectory(t);
  CHECK(trajectory_digest(traj) == trajectory_digest(traj));

  auto changed_action = traj;
  changed_action.steps[0].action = encode_action(t, ActionKind::Type, "field_title", "Q3");
  changed_action.steps[0].log_probs = {-0.7, -0.1, -0.3, 0.0};
  CHECK(trajectory_digest(changed_action) != trajectory_digest(traj));

  auto changed_reward = traj;
  changed_reward.reward = 1.0;
  CHECK(trajectory_digest(changed_reward) != trajectory_digest(traj));
  auto reward_zero = traj;
  reward_zero.reward = 0.0;
  CHECK(trajectory_digest(reward_zero) != trajectory_digest(changed_reward));

  Trajectory empty;
  CHECK_THROWS_AS(trajectory_digest(empty), ValidationError);
}

TEST_CASE("trajectory validation enforces the step invariants") {
  auto t = small_table();
  auto traj = tiny_trajectory(t);
  CHECK_NOTHROW(validate_trajectory(traj, 15));
  CHECK_THROWS_AS(validate_trajectory(traj, 1), ValidationError);  // over the limit

  auto gap = traj;
  gap.steps[1].observation.step_index = 5;
  CHECK_THROWS_AS(validate_trajectory(gap, 15), ValidationError);

  auto bad_lp = traj;
  bad_lp.steps[0].log_probs.pop_back();
  CHECK_THROWS_AS(validate_trajectory(bad_lp, 15), ValidationError);

  auto fractional = traj;
  fractional.reward = 0.5;
  CHECK_THROWS_AS(validate_trajectory(fractional, 15), ValidationError);

  auto dup_widget = traj;
  dup_widget.steps[0].observation.screen.push_back(
      {"btn_save", WidgetKind::Label, "dup", false, "content"});
  CHECK_THROWS_AS(validate_trajectory(dup_widget, 15), ValidationError);
}

TEST_CASE("core types round-trip through canonical json") {
  auto t = small_table();
  auto traj = tiny_trajectory(t);
  traj.reward = 1.0;
  auto j = to_json(traj);
  auto back = trajectory_from_json(j);
  CHECK(back == traj);

  Task task;
  task.task_id = "t1";
  task.goal_text = "set the title";
  task.skill_tags = {"set_title"};
  task.difficulty_lineage = {{0, "Hard"}, {1, "Medium"}};
  task.origin = TaskOrigin::MediumVariant;
  task.context_id = "slide_launch";
  auto tj = to_json(task);
  CHECK(task_from_json(tj) == task);
}

TEST_CASE("task lineage iterations must strictly increase") {
  Task task;
  task.task_id = "t1";
  task.goal_text = "g";
  task.skill_tags = {"a"};
  task.difficulty_lineage = {{1, "Easy"}, {1, "Hard"}};
  CHECK_THROWS_AS(validate_task(task), ValidationError);
  task.difficulty_lineage = {{0, "Easy"}, {2, "Hard"}};
  CHECK_NOTHROW(validate_task(task));
  task.skill_tags.clear();
  CHECK_THROWS_AS(validate_task(task), ValidationError);
}
