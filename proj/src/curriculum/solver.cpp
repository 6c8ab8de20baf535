#include "guirl/curriculum/solver.hpp"

#include <algorithm>

#include "guirl/core/error.hpp"
#include "guirl/simenv/env.hpp"

namespace guirl::curriculum {

using core::Action;
using core::ActionKind;

namespace {

// Sub-goal execution order: theme switching needs a clean document, saving
// must come after every edit.
int tag_priority(const std::string& tag) {
  if (tag == "set_theme") return 0;
  if (tag == "add_slide") return 1;
  if (tag == "save_doc") return 9;
  if (tag == "visit_slide" || tag == "open_setup" || tag == "open_folder") return 8;
  return 2;
}

class Script {
 public:
  Script(simenv::SimEnv& env, const core::SymbolTable& symbols)
      : env_(env), symbols_(symbols) {}

  void click(const std::string& target) { emit(ActionKind::Click, target, ""); }
  void scroll(const std::string& target) { emit(ActionKind::Scroll, target, ""); }
  void type(const std::string& target, const std::string& payload) {
    emit(ActionKind::Type, target, payload);
  }
  void terminate() { emit(ActionKind::Terminate, "", ""); }

  const simenv::EnvState& state() const { return env_.state(); }
  std::vector<Action> take() { return std::move(actions_); }

 private:
  void emit(ActionKind kind, const std::string& target, const std::string& payload) {
    Action a = core::encode_action(symbols_, kind, target, payload);
    env_.step(a);
    if (!env_.last_error().empty()) {
      throw ValidationError("solver emitted an invalid action (" + env_.last_error() + ")");
    }
    actions_.push_back(std::move(a));
  }

  simenv::SimEnv& env_;
  const core::SymbolTable& symbols_;
  std::vector<Action> actions_;
};

void goto_slide(Script& s, int slide) {
  while (s.state().view_int("cur") < slide) s.click("btn_next_slide");
  while (s.state().view_int("cur") > slide) s.click("btn_prev_slide");
}

void open_message(Script& s, const std::string& folder, int msg) {
  s.click("item_folder_" + folder);
  const int page = (msg - 1) / 3 + 1;
  for (int p = 1; p < page; ++p) s.scroll("item_msg_1");
  s.click("item_msg_" + std::to_string(msg - (page - 1) * 3));
}

void run_slidedeck_goal(Script& s, const SkillInstance& g) {
  if (g.tag == "set_title") {
    goto_slide(s, std::stoi(g.params.at("slide")));
    s.type("field_title", g.params.at("value"));
  } else if (g.tag == "set_body") {
    goto_slide(s, std::stoi(g.params.at("slide")));
    s.type("field_body", g.params.at("value"));
  } else if (g.tag == "set_theme") {
    s.click("menu_setup");
    s.type("field_theme", g.params.at("value"));
    s.click("btn_back");
  } else if (g.tag == "save_doc") {
    s.click("btn_save");
  } else if (g.tag == "add_slide") {
    s.click("menu_setup");
    s.click("btn_add_slide");
    s.click("btn_back");
  } else if (g.tag == "visit_slide") {
    goto_slide(s, std::stoi(g.params.at("slide")));
  } else if (g.tag == "open_setup") {
    s.click("menu_setup");
  } else {
    throw ValidationError("solver does not know skill " + g.tag);
  }
}

void run_mailroom_goal(Script& s, const SkillInstance& g) {
  if (g.tag == "mark_read") {
    const auto& folder = g.params.at("folder");
    const int msg = std::stoi(g.params.at("msg"));
    open_message(s, folder, msg);
    if (s.state().doc(folder + ".msg" + std::to_string(msg) + ".read") != "true") {
      s.click("btn_toggle_read");
    }
    s.click("btn_back");
    s.click("btn_back");
  } else if (g.tag == "archive_message") {
    open_message(s, g.params.at("folder"), std::stoi(g.params.at("msg")));
    s.click("btn_archive_msg");
    s.click("btn_back");
  } else if (g.tag == "compose_send") {
    s.click("btn_compose");
    s.type("field_to", g.params.at("to"));
    s.type("field_subject", g.params.at("subject"));
    s.click("btn_send");
  } else if (g.tag == "draft_note") {
    s.click("btn_compose");
    s.type("field_body", g.params.at("value"));
    s.click("btn_back");
  } else if (g.tag == "open_folder") {
    s.click("item_folder_" + g.params.at("folder"));
  } else {
    throw ValidationError("solver does not know skill " + g.tag);
  }
}

}  // namespace

std::vector<Action> solve_task(const GeneratedTask& task, const simenv::AppRegistry& apps,
                               const simenv::ContextRegistry& contexts,
                               const core::SymbolTable& symbols) {
  simenv::SimEnv env(apps.get(task.blueprint.app_id), contexts);
  env.reset(task.blueprint.context_id, task.task.goal_text, 64);
  Script script(env, symbols);

  std::vector<SkillInstance> goals = task.blueprint.sub_goals;
  std::stable_sort(goals.begin(), goals.end(),
                   [](const SkillInstance& a, const SkillInstance& b) {
                     return tag_priority(a.tag) < tag_priority(b.tag);
                   });
  for (const auto& g : goals) {
    if (task.blueprint.app_id == "slidedeck") {
      run_slidedeck_goal(script, g);
    } else {
      run_mailroom_goal(script, g);
    }
  }
  script.terminate();
  return script.take();
}

}  // namespace guirl::curriculum
