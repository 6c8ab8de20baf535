#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "guirl/core/types.hpp"
#include "guirl/simenv/state.hpp"

namespace guirl::simenv {

// Declarative condition over an environment state or an emitted action.
// State predicates are evaluated on EnvState snapshots; the ActionPerformed
// predicate is evaluated on individual actions.
struct Predicate {
  enum class Kind {
    FieldEquals,      // document_model[key] == value
    FieldContains,    // value is a substring of document_model[key]
    FieldPresent,     // key present in document_model
    FieldAbsent,      // key absent from document_model
    UiEquals,         // ui[key] == value
    ScreenIs,         // top of screen_stack == key
    ActionPerformed,  // action kind `key` targeting `value` (extra: payload or "")
  };

  Kind kind = Kind::FieldEquals;
  std::string key;
  std::string value;
  std::string extra;

  bool is_action_predicate() const { return kind == Kind::ActionPerformed; }
  bool eval_state(const EnvState& state) const;
  bool eval_action(const core::Action& action) const;

  // One-line human-readable rendering used by the judge stages.
  std::string describe() const;

  bool operator==(const Predicate&) const = default;
};

nlohmann::ordered_json predicate_to_json(const Predicate& p);
Predicate predicate_from_json(const nlohmann::ordered_json& j);

// Ground truth for one task: the goal is a conjunction over the final state;
// key points are ordered conditions that some trajectory prefix must satisfy.
struct TaskOracleSpec {
  std::string task_id;
  std::string app_id;      // replay plumbing
  std::string context_id;  // replay plumbing
  std::vector<Predicate> goal_predicates;
  std::vector<Predicate> keypoint_predicates;
  std::optional<int> max_steps_override;

  bool operator==(const TaskOracleSpec&) const = default;
};

nlohmann::ordered_json oracle_spec_to_json(const TaskOracleSpec& spec);
TaskOracleSpec oracle_spec_from_json(const nlohmann::ordered_json& j);

}  // namespace guirl::simenv
