#include "guirl/core/types.hpp"

#include <cmath>
#include <unordered_set>

#include "guirl/core/digest.hpp"
#include "guirl/core/error.hpp"

namespace guirl::core {

std::string to_string(WidgetKind kind) {
  switch (kind) {
    case WidgetKind::Button: return "button";
    case WidgetKind::TextField: return "textfield";
    case WidgetKind::Label: return "label";
    case WidgetKind::Menu: return "menu";
    case WidgetKind::ListItem: return "list-item";
  }
  throw ValidationError("unknown WidgetKind");
}

WidgetKind widget_kind_from_string(const std::string& name) {
  if (name == "button") return WidgetKind::Button;
  if (name == "textfield") return WidgetKind::TextField;
  if (name == "label") return WidgetKind::Label;
  if (name == "menu") return WidgetKind::Menu;
  if (name == "list-item") return WidgetKind::ListItem;
  throw ValidationError("unknown widget kind: " + name);
}

std::string to_string(ActionKind kind) {
  switch (kind) {
    case ActionKind::Click: return "CLICK";
    case ActionKind::Type: return "TYPE";
    case ActionKind::Scroll: return "SCROLL";
    case ActionKind::Terminate: return "TERMINATE";
  }
  throw ValidationError("unknown ActionKind");
}

ActionKind action_kind_from_string(const std::string& name) {
  if (name == "CLICK") return ActionKind::Click;
  if (name == "TYPE") return ActionKind::Type;
  if (name == "SCROLL") return ActionKind::Scroll;
  if (name == "TERMINATE") return ActionKind::Terminate;
  throw ValidationError("unknown action kind: " + name);
}

std::string to_string(TerminationCause cause) {
  switch (cause) {
    case TerminationCause::AgentTerminate: return "agent_terminate";
    case TerminationCause::StepLimit: return "step_limit";
  }
  throw ValidationError("unknown TerminationCause");
}

TerminationCause termination_cause_from_string(const std::string& name) {
  if (name == "agent_terminate") return TerminationCause::AgentTerminate;
  if (name == "step_limit") return TerminationCause::StepLimit;
  throw ValidationError("unknown termination cause: " + name);
}

std::string to_string(TaskOrigin origin) {
  switch (origin) {
    case TaskOrigin::Iteration0: return "iteration0";
    case TaskOrigin::EasyVariant: return "easy_variant";
    case TaskOrigin::MediumVariant: return "medium_variant";
    case TaskOrigin::HardSubtask: return "hard_subtask";
    case TaskOrigin::Ingested: return "ingested";
  }
  throw ValidationError("unknown TaskOrigin");
}

TaskOrigin task_origin_from_string(const std::string& name) {
  if (name == "iteration0") return TaskOrigin::Iteration0;
  if (name == "easy_variant") return TaskOrigin::EasyVariant;
  if (name == "medium_variant") return TaskOrigin::MediumVariant;
  if (name == "hard_subtask") return TaskOrigin::HardSubtask;
  if (name == "ingested") return TaskOrigin::Ingested;
  throw ValidationError("unknown task origin: " + name);
}

const WidgetRecord* Observation::find_widget(const std::string& id) const {
  for (const auto& w : screen) {
    if (w.id == id) return &w;
  }
  return nullptr;
}

void validate_observation(const Observation& obs) {
  std::unordered_set<std::string> ids;
  for (const auto& w : obs.screen) {
    if (!ids.insert(w.id).second) {
      throw ValidationError("duplicate widget id in observation: " + w.id);
    }
  }
  if (obs.step_index < 0) throw ValidationError("negative step_index");
}

void validate_trajectory(const Trajectory& trajectory, int max_steps) {
  const int n = trajectory.step_count();
  if (n < 1) throw ValidationError("trajectory has no steps");
  if (n > max_steps) {
    throw ValidationError("trajectory exceeds max steps (" + std::to_string(n) + " > " +
                          std::to_string(max_steps) + ")");
  }
  for (int t = 0; t < n; ++t) {
    const auto& step = trajectory.steps[t];
    validate_observation(step.observation);
    if (step.observation.step_index != t) {
      throw ValidationError("step indices must be 0..T-1 without gaps");
    }
    if (step.log_probs.size() != step.action.token_seq.size()) {
      throw ValidationError("log-prob count differs from token count at step " +
                            std::to_string(t));
    }
  }
  if (trajectory.reward.has_value()) {
    const double r = *trajectory.reward;
    if (r != 0.0 && r != 1.0) {
      throw ValidationError("judged reward must be binary, got " + std::to_string(r));
    }
  }
}

std::string trajectory_digest(const Trajectory& trajectory) {
  if (trajectory.steps.empty()) throw ValidationError("cannot digest an empty trajectory");
  DigestWriter d;
  d.write(trajectory.task_id);
  d.write_i64(trajectory.step_count());
  for (const auto& step : trajectory.steps) {
    d.write(step.observation.task_text);
    d.write_i64(step.observation.step_index);
    d.write_i64(static_cast<int>(step.observation.screen.size()));
    for (const auto& w : step.observation.screen) {
      d.write(w.id);
      d.write(to_string(w.kind));
      d.write(w.text);
      d.write_bool(w.enabled);
      d.write(w.region);
    }
    d.write(to_string(step.action.kind));
    d.write(step.action.target);
    d.write(step.action.payload);
    for (int tok : step.action.token_seq) d.write_i64(tok);
    for (double lp : step.log_probs) d.write_double(lp);
  }
  d.write(to_string(trajectory.terminated_by));
  d.write(trajectory.env_state_digest_initial);
  d.write(trajectory.env_state_digest_final);
  d.write_bool(trajectory.reward.has_value());
  if (trajectory.reward) d.write_double(*trajectory.reward);
  return d.hex();
}

void validate_task(const Task& task) {
  if (task.task_id.empty()) throw ValidationError("task_id empty");
  if (task.skill_tags.empty()) throw ValidationError("task has no skill tags");
  int prev_iter = -1;
  for (const auto& [iter, bucket] : task.difficulty_lineage) {
    if (iter <= prev_iter) {
      throw ValidationError("difficulty lineage iterations must strictly increase");
    }
    prev_iter = iter;
  }
}

}  // namespace guirl::core
