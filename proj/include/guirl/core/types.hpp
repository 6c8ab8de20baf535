#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace guirl::core {

enum class WidgetKind { Button, TextField, Label, Menu, ListItem };

std::string to_string(WidgetKind kind);
WidgetKind widget_kind_from_string(const std::string& name);

// One entry of the serialized widget tree that stands in for a screenshot.
struct WidgetRecord {
  std::string id;
  WidgetKind kind = WidgetKind::Button;
  std::string text;
  bool enabled = true;
  std::string region;  // screen-region tag, e.g. "content", "nav", "chrome"

  bool operator==(const WidgetRecord&) const = default;
};

struct Observation {
  std::vector<WidgetRecord> screen;  // widget ids unique within one observation
  std::string task_text;
  int step_index = 0;

  bool operator==(const Observation&) const = default;

  const WidgetRecord* find_widget(const std::string& id) const;
};

enum class ActionKind { Click, Type, Scroll, Terminate };

std::string to_string(ActionKind kind);
ActionKind action_kind_from_string(const std::string& name);

// Discrete GUI action plus its token encoding. token_seq is the unit the
// policy scores autoregressively; it always decodes back to (kind, target,
// payload).
struct Action {
  ActionKind kind = ActionKind::Terminate;
  std::string target;   // widget id; empty for Terminate
  std::string payload;  // Type only
  std::vector<int> token_seq;

  bool operator==(const Action&) const = default;
};

enum class TerminationCause { AgentTerminate, StepLimit };

std::string to_string(TerminationCause cause);
TerminationCause termination_cause_from_string(const std::string& name);

struct TrajectoryStep {
  Observation observation;
  Action action;
  std::vector<double> log_probs;  // sampling-time values, one per token

  bool operator==(const TrajectoryStep&) const = default;
};

struct Trajectory {
  std::string task_id;
  std::vector<TrajectoryStep> steps;
  TerminationCause terminated_by = TerminationCause::AgentTerminate;
  std::string env_state_digest_initial;
  std::string env_state_digest_final;
  std::optional<double> reward;  // absent until judged; {0,1} once judged

  bool operator==(const Trajectory&) const = default;

  int step_count() const { return static_cast<int>(steps.size()); }
};

enum class TaskOrigin { Iteration0, EasyVariant, MediumVariant, HardSubtask, Ingested };

std::string to_string(TaskOrigin origin);
TaskOrigin task_origin_from_string(const std::string& name);

struct Task {
  std::string task_id;
  std::string goal_text;
  std::vector<std::string> skill_tags;  // non-empty, kept sorted and unique
  std::vector<std::pair<int, std::string>> difficulty_lineage;  // (iteration, bucket)
  TaskOrigin origin = TaskOrigin::Iteration0;
  std::optional<std::string> context_id;

  bool operator==(const Task&) const = default;
};

// Throws ValidationError when an invariant does not hold.
void validate_observation(const Observation& obs);
void validate_trajectory(const Trajectory& trajectory, int max_steps);
void validate_task(const Task& task);

// Stable identity over every trajectory field, used to key the async
// evaluation queue. Rejects empty trajectories.
std::string trajectory_digest(const Trajectory& trajectory);

}  // namespace guirl::core
