#include "guirl/simenv/predicate.hpp"

#include "guirl/core/error.hpp"

namespace guirl::simenv {

namespace {

const char* kind_name(Predicate::Kind k) {
  switch (k) {
    case Predicate::Kind::FieldEquals: return "field_equals";
    case Predicate::Kind::FieldContains: return "field_contains";
    case Predicate::Kind::FieldPresent: return "field_present";
    case Predicate::Kind::FieldAbsent: return "field_absent";
    case Predicate::Kind::UiEquals: return "ui_equals";
    case Predicate::Kind::ScreenIs: return "screen_is";
    case Predicate::Kind::ActionPerformed: return "action_performed";
  }
  throw ValidationError("unknown predicate kind");
}

Predicate::Kind kind_from_name(const std::string& name) {
  if (name == "field_equals") return Predicate::Kind::FieldEquals;
  if (name == "field_contains") return Predicate::Kind::FieldContains;
  if (name == "field_present") return Predicate::Kind::FieldPresent;
  if (name == "field_absent") return Predicate::Kind::FieldAbsent;
  if (name == "ui_equals") return Predicate::Kind::UiEquals;
  if (name == "screen_is") return Predicate::Kind::ScreenIs;
  if (name == "action_performed") return Predicate::Kind::ActionPerformed;
  throw ValidationError("unknown predicate kind: " + name);
}

}  // namespace

bool Predicate::eval_state(const EnvState& state) const {
  switch (kind) {
    case Kind::FieldEquals:
      return state.document_model.count(key) && state.document_model.at(key) == value;
    case Kind::FieldContains:
      return state.document_model.count(key) &&
             state.document_model.at(key).find(value) != std::string::npos;
    case Kind::FieldPresent:
      return state.document_model.count(key) > 0;
    case Kind::FieldAbsent:
      return state.document_model.count(key) == 0;
    case Kind::UiEquals:
      return state.view(key) == value;
    case Kind::ScreenIs:
      return !state.screen_stack.empty() && state.screen() == key;
    case Kind::ActionPerformed:
      return false;  // not a state predicate
  }
  return false;
}

bool Predicate::eval_action(const core::Action& action) const {
  if (kind != Kind::ActionPerformed) return false;
  if (core::to_string(action.kind) != key) return false;
  if (!value.empty() && action.target != value) return false;
  if (!extra.empty() && action.payload != extra) return false;
  return true;
}

std::string Predicate::describe() const {
  switch (kind) {
    case Kind::FieldEquals:
      return "document field '" + key + "' equals \"" + value + "\"";
    case Kind::FieldContains:
      return "document field '" + key + "' contains \"" + value + "\"";
    case Kind::FieldPresent:
      return "document field '" + key + "' exists";
    case Kind::FieldAbsent:
      return "document field '" + key + "' does not exist";
    case Kind::UiEquals:
      return "view state '" + key + "' is \"" + value + "\"";
    case Kind::ScreenIs:
      return "screen '" + key + "' is open";
    case Kind::ActionPerformed: {
      std::string s = "action " + key + " on '" + value + "'";
      if (!extra.empty()) s += " with text \"" + extra + "\"";
      s += " was performed";
      return s;
    }
  }
  return "";
}

nlohmann::ordered_json predicate_to_json(const Predicate& p) {
  return nlohmann::ordered_json{
      {"kind", kind_name(p.kind)}, {"key", p.key}, {"value", p.value}, {"extra", p.extra}};
}

Predicate predicate_from_json(const nlohmann::ordered_json& j) {
  Predicate p;
  p.kind = kind_from_name(j.at("kind").get<std::string>());
  p.key = j.at("key").get<std::string>();
  p.value = j.at("value").get<std::string>();
  p.extra = j.value("extra", "");
  return p;
}

nlohmann::ordered_json oracle_spec_to_json(const TaskOracleSpec& spec) {
  nlohmann::ordered_json goals = nlohmann::ordered_json::array();
  for (const auto& p : spec.goal_predicates) goals.push_back(predicate_to_json(p));
  nlohmann::ordered_json kps = nlohmann::ordered_json::array();
  for (const auto& p : spec.keypoint_predicates) kps.push_back(predicate_to_json(p));
  nlohmann::ordered_json j{{"task_id", spec.task_id},
                           {"app_id", spec.app_id},
                           {"context_id", spec.context_id},
                           {"goal", std::move(goals)},
                           {"keypoints", std::move(kps)}};
  if (spec.max_steps_override) j["max_steps"] = *spec.max_steps_override;
  return j;
}

TaskOracleSpec oracle_spec_from_json(const nlohmann::ordered_json& j) {
  TaskOracleSpec spec;
  spec.task_id = j.at("task_id").get<std::string>();
  spec.app_id = j.at("app_id").get<std::string>();
  spec.context_id = j.at("context_id").get<std::string>();
  for (const auto& p : j.at("goal")) spec.goal_predicates.push_back(predicate_from_json(p));
  for (const auto& p : j.at("keypoints")) {
    spec.keypoint_predicates.push_back(predicate_from_json(p));
  }
  if (j.contains("max_steps")) spec.max_steps_override = j.at("max_steps").get<int>();
  return spec;
}

}  // namespace guirl::simenv
