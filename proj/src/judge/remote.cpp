#include "guirl/judge/remote.hpp"

#include <fstream>
#include <sstream>

#include <httplib.h>

#include "guirl/core/error.hpp"
#include "guirl/core/json_io.hpp"

namespace guirl::judge {

using nlohmann::ordered_json;

namespace {

const char* kStages[3] = {"key_points", "screenshots", "outcome"};

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read prompt template: " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string actions_text(const core::Trajectory& traj) {
  std::ostringstream s;
  for (int t = 0; t < traj.step_count(); ++t) {
    const auto& a = traj.steps[t].action;
    s << t << ": " << core::to_string(a.kind);
    if (!a.target.empty()) s << " " << a.target;
    if (!a.payload.empty()) s << " \"" << a.payload << "\"";
    s << "\n";
  }
  return s.str();
}

}  // namespace

RemoteJudgeBackend::RemoteJudgeBackend(Options options) : options_(std::move(options)) {
  for (const char* stage : kStages) {
    templates_[stage] = slurp(options_.prompt_dir + "/judge_" + stage + ".txt");
  }
}

std::string RemoteJudgeBackend::render(
    const std::string& stage, const std::map<std::string, std::string>& values) const {
  std::string text = templates_.at(stage);
  for (const auto& [key, value] : values) {
    const std::string needle = "{{" + key + "}}";
    size_t pos = 0;
    while ((pos = text.find(needle, pos)) != std::string::npos) {
      text.replace(pos, needle.size(), value);
      pos += value.size();
    }
  }
  return text;
}

std::string RemoteJudgeBackend::call_stage(const std::string& stage,
                                           const std::string& prompt,
                                           const ordered_json& payload) {
  httplib::Client client(options_.base_url);
  client.set_connection_timeout(options_.timeout_ms / 1000,
                                (options_.timeout_ms % 1000) * 1000);
  client.set_read_timeout(options_.timeout_ms / 1000, (options_.timeout_ms % 1000) * 1000);
  httplib::Headers headers;
  if (!options_.bearer_token.empty()) {
    headers.emplace("Authorization", "Bearer " + options_.bearer_token);
  }
  const ordered_json body{{"prompt", prompt}, {"payload", payload}};
  auto res = client.Post("/judge/" + stage, headers, body.dump(), "application/json");
  if (!res) {
    throw TransportError("judge backend unreachable at " + options_.base_url + " (" +
                         httplib::to_string(res.error()) + ")");
  }
  if (res->status != 200) {
    throw TransportError("judge backend returned HTTP " + std::to_string(res->status));
  }
  return res->body;
}

std::vector<std::string> RemoteJudgeBackend::identify_key_points(const core::Task& task) {
  const std::string prompt = render("key_points", {{"goal", task.goal_text}});
  const std::string raw =
      call_stage("key_points", prompt, ordered_json{{"task_id", task.task_id}});
  try {
    auto j = ordered_json::parse(raw);
    return j.at("key_points").get<std::vector<std::string>>();
  } catch (const ordered_json::exception& e) {
    throw ParseError(std::string("bad key_points reply: ") + e.what(), raw);
  }
}

std::vector<int> RemoteJudgeBackend::score_screenshots(
    const core::Task& task, const core::Trajectory& trajectory,
    const std::vector<std::string>& key_points) {
  ordered_json kps = ordered_json::array();
  for (const auto& kp : key_points) kps.push_back(kp);
  ordered_json observations = ordered_json::array();
  for (const auto& step : trajectory.steps) {
    observations.push_back(core::to_json(step.observation));
  }
  std::string joined;
  for (const auto& kp : key_points) joined += "- " + kp + "\n";
  const std::string prompt = render(
      "screenshots", {{"goal", task.goal_text},
                      {"key_points", joined},
                      {"steps", std::to_string(trajectory.step_count())}});
  const std::string raw = call_stage(
      "screenshots", prompt,
      ordered_json{{"task_id", task.task_id}, {"key_points", kps},
                   {"observations", observations}});
  try {
    auto j = ordered_json::parse(raw);
    return j.at("scores").get<std::vector<int>>();
  } catch (const ordered_json::exception& e) {
    throw ParseError(std::string("bad screenshots reply: ") + e.what(), raw);
  }
}

JudgeBackend::OutcomeReply RemoteJudgeBackend::judge_outcome(const OutcomeRequest& request) {
  std::string joined;
  for (const auto& kp : request.key_points) joined += "- " + kp + "\n";
  ordered_json diff = ordered_json::array();
  for (const auto& e : request.diff.entries) {
    diff.push_back(ordered_json{{"field", e.field}, {"before", e.before}, {"after", e.after}});
  }
  const std::string prompt =
      render("outcome", {{"goal", request.task.goal_text},
                         {"key_points", joined},
                         {"actions", actions_text(request.trajectory)},
                         {"diff", request.diff.summary}});
  ordered_json kept = ordered_json::array();
  for (int s : request.kept_steps) kept.push_back(s);
  const std::string raw = call_stage(
      "outcome", prompt,
      ordered_json{{"task_id", request.task.task_id}, {"kept_steps", kept},
                   {"diff", diff}});
  try {
    auto j = ordered_json::parse(raw);
    OutcomeReply reply;
    reply.outcome = j.at("outcome").get<std::string>() == "success" ? Outcome::Success
                                                                    : Outcome::Failure;
    for (const auto& kj : j.at("key_points")) {
      KeyPointFinding finding;
      finding.status = key_point_status_from_string(kj.at("status").get<std::string>());
      if (kj.contains("evidence_steps")) {
        finding.evidence_steps = kj.at("evidence_steps").get<std::vector<int>>();
      }
      reply.key_points.push_back(std::move(finding));
    }
    reply.rationale = j.value("rationale", "");
    return reply;
  } catch (const ordered_json::exception& e) {
    throw ParseError(std::string("bad outcome reply: ") + e.what(), raw);
  }
}

}  // namespace guirl::judge
