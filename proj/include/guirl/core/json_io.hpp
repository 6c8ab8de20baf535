#pragma once

#include <nlohmann/json.hpp>

#include "guirl/core/types.hpp"

// Canonical JSON serialization of the core types. Field names are fixed and
// documented in docs/schemas.md; trajectories persist as one object per line.

namespace guirl::core {

using json = nlohmann::ordered_json;

json to_json(const WidgetRecord& w);
WidgetRecord widget_from_json(const json& j);

json to_json(const Observation& o);
Observation observation_from_json(const json& j);

json to_json(const Action& a);
Action action_from_json(const json& j);

json to_json(const Trajectory& t);
Trajectory trajectory_from_json(const json& j);

json to_json(const Task& t);
Task task_from_json(const json& j);

}  // namespace guirl::core
