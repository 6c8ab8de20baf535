#include "guirl/simenv/env.hpp"

#include "guirl/core/error.hpp"

namespace guirl::simenv {

using core::Action;
using core::ActionKind;
using core::Observation;
using core::WidgetRecord;

SimEnv::SimEnv(const App& app, const ContextRegistry& contexts)
    : app_(app), contexts_(contexts) {}

Observation SimEnv::reset(const std::string& context_id, const std::string& task_text,
                          int max_steps) {
  const Context& ctx = contexts_.get(context_id);
  if (ctx.app_id != app_.app_id()) {
    throw ValidationError("context " + context_id + " belongs to app " + ctx.app_id +
                          ", not " + app_.app_id());
  }
  if (max_steps < 1) throw ValidationError("max_steps must be >= 1");
  state_ = app_.initial_state(ctx);
  task_text_ = task_text;
  max_steps_ = max_steps;
  in_episode_ = true;
  last_error_.clear();
  return observe();
}

std::string SimEnv::check_action(const Action& a) const {
  if (a.kind == ActionKind::Terminate) return "";
  const auto widgets = app_.render(state_);
  const WidgetRecord* target = nullptr;
  for (const auto& w : widgets) {
    if (w.id == a.target) {
      target = &w;
      break;
    }
  }
  if (target == nullptr) return "no such widget on screen: " + a.target;
  if (!target->enabled) return "widget is disabled: " + a.target;
  if (!action_targets_widget_kind(a.kind, target->kind)) {
    return core::to_string(a.kind) + " cannot target a " + core::to_string(target->kind);
  }
  return "";
}

SimEnv::StepResult SimEnv::step(const Action& action) {
  if (!in_episode_) throw ValidationError("step before reset (or after episode end)");
  if (state_.step_count >= max_steps_) throw ValidationError("episode step limit reached");

  last_error_ = check_action(action);
  if (last_error_.empty() && action.kind != ActionKind::Terminate) {
    app_.apply(state_, action);
  }
  state_.step_count += 1;

  const bool terminated =
      action.kind == ActionKind::Terminate || state_.step_count >= max_steps_;
  if (terminated) in_episode_ = false;
  return {observe(), terminated};
}

std::string SimEnv::state_digest() const {
  if (state_.screen_stack.empty()) throw ValidationError("state_digest before reset");
  return simenv::state_digest(app_, state_);
}

Observation SimEnv::observe() const {
  Observation o;
  o.screen = app_.render(state_);
  if (!last_error_.empty()) {
    o.screen.push_back(
        {"banner_error", core::WidgetKind::Label, last_error_, false, "chrome"});
  }
  o.task_text = task_text_;
  o.step_index = state_.step_count;
  return o;
}

}  // namespace guirl::simenv
