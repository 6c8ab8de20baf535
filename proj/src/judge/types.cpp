#include "guirl/judge/types.hpp"

#include "guirl/core/error.hpp"

namespace guirl::judge {

using nlohmann::ordered_json;

std::string to_string(KeyPointStatus s) {
  switch (s) {
    case KeyPointStatus::Met: return "met";
    case KeyPointStatus::Unmet: return "unmet";
    case KeyPointStatus::Indeterminate: return "indeterminate";
  }
  throw ValidationError("unknown KeyPointStatus");
}

KeyPointStatus key_point_status_from_string(const std::string& name) {
  if (name == "met") return KeyPointStatus::Met;
  if (name == "unmet") return KeyPointStatus::Unmet;
  if (name == "indeterminate") return KeyPointStatus::Indeterminate;
  throw ValidationError("unknown key point status: " + name);
}

namespace {

const char* op_name(StateDiffEntry::Op op) {
  switch (op) {
    case StateDiffEntry::Op::Added: return "added";
    case StateDiffEntry::Op::Removed: return "removed";
    case StateDiffEntry::Op::Changed: return "changed";
  }
  throw ValidationError("unknown diff op");
}

StateDiffEntry::Op op_from_name(const std::string& name) {
  if (name == "added") return StateDiffEntry::Op::Added;
  if (name == "removed") return StateDiffEntry::Op::Removed;
  if (name == "changed") return StateDiffEntry::Op::Changed;
  throw ValidationError("unknown diff op: " + name);
}

}  // namespace

ordered_json verdict_to_json(const JudgeVerdict& v) {
  ordered_json kps = ordered_json::array();
  for (const auto& kp : v.key_points) {
    ordered_json ev = ordered_json::array();
    for (const auto& e : kp.evidence) {
      ev.push_back(ordered_json{{"step", e.step_index},
                                {"excerpt", e.observation_excerpt},
                                {"action", e.action_text}});
    }
    ordered_json kj{{"index", kp.index}, {"description", kp.description}};
    if (kp.status) kj["status"] = to_string(*kp.status);
    kj["evidence"] = std::move(ev);
    kps.push_back(std::move(kj));
  }
  ordered_json diff = ordered_json::array();
  for (const auto& e : v.state_diff.entries) {
    diff.push_back(ordered_json{{"op", op_name(e.op)},
                                {"field", e.field},
                                {"before", e.before},
                                {"after", e.after}});
  }
  return ordered_json{{"outcome", v.outcome == Outcome::Success ? "success" : "failure"},
                      {"key_points", std::move(kps)},
                      {"state_diff", ordered_json{{"entries", std::move(diff)},
                                                  {"summary", v.state_diff.summary}}},
                      {"kept_screenshots", v.kept_screenshots},
                      {"rationale", v.rationale},
                      {"backend_id", v.backend_id}};
}

JudgeVerdict verdict_from_json(const ordered_json& j) {
  JudgeVerdict v;
  v.outcome = j.at("outcome").get<std::string>() == "success" ? Outcome::Success
                                                              : Outcome::Failure;
  for (const auto& kj : j.at("key_points")) {
    KeyPoint kp;
    kp.index = kj.at("index").get<int>();
    kp.description = kj.at("description").get<std::string>();
    if (kj.contains("status")) {
      kp.status = key_point_status_from_string(kj.at("status").get<std::string>());
    }
    for (const auto& ej : kj.at("evidence")) {
      kp.evidence.push_back({ej.at("step").get<int>(), ej.at("excerpt").get<std::string>(),
                             ej.at("action").get<std::string>()});
    }
    v.key_points.push_back(std::move(kp));
  }
  const auto& dj = j.at("state_diff");
  for (const auto& ej : dj.at("entries")) {
    v.state_diff.entries.push_back({op_from_name(ej.at("op").get<std::string>()),
                                    ej.at("field").get<std::string>(),
                                    ej.at("before").get<std::string>(),
                                    ej.at("after").get<std::string>()});
  }
  v.state_diff.summary = dj.at("summary").get<std::string>();
  v.kept_screenshots = j.at("kept_screenshots").get<std::vector<int>>();
  v.rationale = j.at("rationale").get<std::string>();
  v.backend_id = j.at("backend_id").get<std::string>();
  return v;
}

ordered_json metrics_to_json(const EvalMetrics& m) {
  ordered_json j{{"tp", m.tp}, {"fp", m.fp}, {"tn", m.tn}, {"fn", m.fn}};
  if (m.precision) j["precision"] = *m.precision;
  if (m.recall) j["recall"] = *m.recall;
  if (m.agreement) j["agreement"] = *m.agreement;
  return j;
}

}  // namespace guirl::judge
