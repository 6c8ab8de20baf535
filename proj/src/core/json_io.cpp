#include "guirl/core/json_io.hpp"

#include "guirl/core/error.hpp"

namespace guirl::core {

json to_json(const WidgetRecord& w) {
  return json{{"id", w.id},
              {"kind", to_string(w.kind)},
              {"text", w.text},
              {"enabled", w.enabled},
              {"region", w.region}};
}

WidgetRecord widget_from_json(const json& j) {
  WidgetRecord w;
  w.id = j.at("id").get<std::string>();
  w.kind = widget_kind_from_string(j.at("kind").get<std::string>());
  w.text = j.at("text").get<std::string>();
  w.enabled = j.at("enabled").get<bool>();
  w.region = j.at("region").get<std::string>();
  return w;
}

json to_json(const Observation& o) {
  json screen = json::array();
  for (const auto& w : o.screen) screen.push_back(to_json(w));
  return json{{"screen", std::move(screen)}, {"task_text", o.task_text},
              {"step_index", o.step_index}};
}

Observation observation_from_json(const json& j) {
  Observation o;
  for (const auto& wj : j.at("screen")) o.screen.push_back(widget_from_json(wj));
  o.task_text = j.at("task_text").get<std::string>();
  o.step_index = j.at("step_index").get<int>();
  return o;
}

json to_json(const Action& a) {
  return json{{"kind", to_string(a.kind)},
              {"target", a.target},
              {"payload", a.payload},
              {"tokens", a.token_seq}};
}

Action action_from_json(const json& j) {
  Action a;
  a.kind = action_kind_from_string(j.at("kind").get<std::string>());
  a.target = j.at("target").get<std::string>();
  a.payload = j.at("payload").get<std::string>();
  a.token_seq = j.at("tokens").get<std::vector<int>>();
  return a;
}

json to_json(const Trajectory& t) {
  json steps = json::array();
  for (const auto& s : t.steps) {
    steps.push_back(json{{"obs", to_json(s.observation)},
                         {"action", to_json(s.action)},
                         {"log_probs", s.log_probs}});
  }
  json j{{"task_id", t.task_id},
         {"steps", std::move(steps)},
         {"terminated_by", to_string(t.terminated_by)},
         {"digest_initial", t.env_state_digest_initial},
         {"digest_final", t.env_state_digest_final}};
  if (t.reward) j["reward"] = *t.reward;
  return j;
}

Trajectory trajectory_from_json(const json& j) {
  Trajectory t;
  t.task_id = j.at("task_id").get<std::string>();
  for (const auto& sj : j.at("steps")) {
    TrajectoryStep s;
    s.observation = observation_from_json(sj.at("obs"));
    s.action = action_from_json(sj.at("action"));
    s.log_probs = sj.at("log_probs").get<std::vector<double>>();
    t.steps.push_back(std::move(s));
  }
  t.terminated_by = termination_cause_from_string(j.at("terminated_by").get<std::string>());
  t.env_state_digest_initial = j.at("digest_initial").get<std::string>();
  t.env_state_digest_final = j.at("digest_final").get<std::string>();
  if (j.contains("reward")) t.reward = j.at("reward").get<double>();
  return t;
}

json to_json(const Task& t) {
  json lineage = json::array();
  for (const auto& [iter, bucket] : t.difficulty_lineage) {
    lineage.push_back(json::array({iter, bucket}));
  }
  json j{{"task_id", t.task_id},
         {"goal_text", t.goal_text},
         {"skill_tags", t.skill_tags},
         {"lineage", std::move(lineage)},
         {"origin", to_string(t.origin)}};
  if (t.context_id) j["context_id"] = *t.context_id;
  return j;
}

Task task_from_json(const json& j) {
  Task t;
  t.task_id = j.at("task_id").get<std::string>();
  t.goal_text = j.at("goal_text").get<std::string>();
  t.skill_tags = j.at("skill_tags").get<std::vector<std::string>>();
  for (const auto& lj : j.at("lineage")) {
    t.difficulty_lineage.emplace_back(lj.at(0).get<int>(), lj.at(1).get<std::string>());
  }
  t.origin = task_origin_from_string(j.at("origin").get<std::string>());
  if (j.contains("context_id")) t.context_id = j.at("context_id").get<std::string>();
  return t;
}

}  // namespace guirl::core
