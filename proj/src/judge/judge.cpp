#include "guirl/judge/judge.hpp"

#include <algorithm>
#include <sstream>

#include "guirl/core/error.hpp"

namespace guirl::judge {

using core::Observation;
using core::Task;
using core::Trajectory;

namespace {

// Retries a stage on transport errors; other failures propagate immediately.
template <typename Fn>
auto with_retries(int attempts, Fn&& fn) {
  for (int attempt = 1;; ++attempt) {
    try {
      return fn();
    } catch (const TransportError&) {
      if (attempt >= attempts) throw;
    }
  }
}

std::string action_text(const core::Action& a) {
  std::string s = core::to_string(a.kind);
  if (!a.target.empty()) s += " " + a.target;
  if (!a.payload.empty()) s += " \"" + a.payload + "\"";
  return s;
}

std::string observation_excerpt(const Observation& obs) {
  std::string s;
  int kept = 0;
  for (const auto& w : obs.screen) {
    if (w.region == "chrome" || w.text.empty()) continue;
    if (kept++) s += "; ";
    s += w.id + "=" + w.text;
    if (kept >= 4) break;
  }
  return s;
}

}  // namespace

std::vector<KeyPoint> identify_key_points(JudgeBackend& backend, const Task& task) {
  if (task.goal_text.empty()) throw ValidationError("task has empty goal text");
  auto descriptions = backend.identify_key_points(task);
  if (descriptions.empty()) {
    throw ParseError("backend returned no key points for task " + task.task_id, "");
  }
  std::vector<KeyPoint> out;
  for (size_t i = 0; i < descriptions.size(); ++i) {
    KeyPoint kp;
    kp.index = static_cast<int>(i);
    kp.description = descriptions[i];
    out.push_back(std::move(kp));
  }
  return out;
}

std::vector<ScreenshotScore> score_screenshots(JudgeBackend& backend,
                                               const Trajectory& trajectory,
                                               const Task& task,
                                               const std::vector<KeyPoint>& key_points,
                                               int threshold) {
  if (trajectory.steps.empty()) throw ValidationError("cannot score an empty trajectory");
  std::vector<std::string> descriptions;
  for (const auto& kp : key_points) descriptions.push_back(kp.description);
  auto raw = backend.score_screenshots(task, trajectory, descriptions);
  if (static_cast<int>(raw.size()) != trajectory.step_count()) {
    throw ParseError("backend returned " + std::to_string(raw.size()) + " scores for " +
                         std::to_string(trajectory.step_count()) + " steps",
                     "");
  }
  std::vector<ScreenshotScore> out;
  for (int t = 0; t < trajectory.step_count(); ++t) {
    const int score = std::clamp(raw[static_cast<size_t>(t)], 1, 5);
    out.push_back({t, score, score >= threshold});
  }
  return out;
}

StateDiff diff_states(const Observation& initial, const Observation& final_obs) {
  const auto* app0 = initial.find_widget("label_app");
  const auto* app1 = final_obs.find_widget("label_app");
  if (app0 != nullptr && app1 != nullptr && app0->text != app1->text) {
    throw ValidationError("cannot diff observations from different apps: " + app0->text +
                          " vs " + app1->text);
  }

  StateDiff diff;
  auto content = [](const Observation& o) {
    std::vector<std::pair<std::string, std::string>> fields;
    for (const auto& w : o.screen) {
      if (w.region == "chrome") continue;
      fields.emplace_back(w.id, w.text);
    }
    std::sort(fields.begin(), fields.end());
    return fields;
  };
  const auto before = content(initial);
  const auto after = content(final_obs);

  size_t i = 0, j = 0;
  while (i < before.size() || j < after.size()) {
    if (j >= after.size() || (i < before.size() && before[i].first < after[j].first)) {
      diff.entries.push_back(
          {StateDiffEntry::Op::Removed, before[i].first, before[i].second, ""});
      ++i;
    } else if (i >= before.size() || after[j].first < before[i].first) {
      diff.entries.push_back({StateDiffEntry::Op::Added, after[j].first, "", after[j].second});
      ++j;
    } else {
      if (before[i].second != after[j].second) {
        diff.entries.push_back({StateDiffEntry::Op::Changed, before[i].first,
                                before[i].second, after[j].second});
      }
      ++i;
      ++j;
    }
  }

  int added = 0, removed = 0, changed = 0;
  for (const auto& e : diff.entries) {
    switch (e.op) {
      case StateDiffEntry::Op::Added: ++added; break;
      case StateDiffEntry::Op::Removed: ++removed; break;
      case StateDiffEntry::Op::Changed: ++changed; break;
    }
  }
  std::ostringstream s;
  s << added << " added, " << removed << " removed, " << changed << " changed";
  diff.summary = s.str();
  return diff;
}

JudgeVerdict judge(JudgeBackend& backend, const Trajectory& trajectory, const Task& task,
                   const JudgeConfig& config) {
  if (trajectory.steps.empty()) throw ValidationError("cannot judge an empty trajectory");

  auto key_points = with_retries(config.backend_attempts,
                                 [&] { return identify_key_points(backend, task); });
  auto scores = with_retries(config.backend_attempts, [&] {
    return score_screenshots(backend, trajectory, task, key_points,
                             config.screenshot_threshold);
  });

  std::vector<int> kept_steps;
  for (const auto& s : scores) {
    if (s.kept) kept_steps.push_back(s.step_index);
  }

  // The final observation is the last pre-action screen; for agent-terminated
  // trajectories it equals the final state because TERMINATE is a no-op.
  const StateDiff diff =
      diff_states(trajectory.steps.front().observation, trajectory.steps.back().observation);

  std::vector<std::string> descriptions;
  for (const auto& kp : key_points) descriptions.push_back(kp.description);
  JudgeBackend::OutcomeRequest request{task, trajectory, descriptions, kept_steps, diff};
  auto reply =
      with_retries(config.backend_attempts, [&] { return backend.judge_outcome(request); });

  if (reply.key_points.size() != key_points.size()) {
    throw ParseError("backend verified " + std::to_string(reply.key_points.size()) +
                         " key points, expected " + std::to_string(key_points.size()),
                     "");
  }

  JudgeVerdict verdict;
  verdict.backend_id = backend.id();
  verdict.state_diff = diff;
  verdict.kept_screenshots = kept_steps;
  verdict.rationale = reply.rationale;

  bool all_met_with_evidence = true;
  for (size_t i = 0; i < key_points.size(); ++i) {
    KeyPoint kp = key_points[i];
    kp.status = reply.key_points[i].status;
    for (int step : reply.key_points[i].evidence_steps) {
      if (step < 0 || step >= trajectory.step_count()) {
        throw ParseError("evidence step out of range: " + std::to_string(step), "");
      }
      kp.evidence.push_back({step, observation_excerpt(trajectory.steps[step].observation),
                             action_text(trajectory.steps[step].action)});
    }
    if (kp.status != KeyPointStatus::Met || kp.evidence.empty()) {
      all_met_with_evidence = false;
    }
    verdict.key_points.push_back(std::move(kp));
  }

  // Success requires every key point met with concrete evidence; a backend
  // claiming success without that is demoted.
  if (reply.outcome == Outcome::Success && all_met_with_evidence) {
    verdict.outcome = Outcome::Success;
  } else {
    verdict.outcome = Outcome::Failure;
    if (reply.outcome == Outcome::Success) {
      verdict.rationale += " [demoted: success without full key point evidence]";
    }
  }
  return verdict;
}

EvalMetrics compute_metrics(const std::vector<Outcome>& verdicts,
                            const std::vector<int>& reference_labels) {
  if (verdicts.size() != reference_labels.size()) {
    throw ValidationError("verdicts and labels differ in length");
  }
  EvalMetrics m;
  for (size_t i = 0; i < verdicts.size(); ++i) {
    const bool pred = verdicts[i] == Outcome::Success;
    const int label = reference_labels[i];
    if (label != 0 && label != 1) throw ValidationError("labels must be binary");
    if (pred && label == 1) ++m.tp;
    if (pred && label == 0) ++m.fp;
    if (!pred && label == 0) ++m.tn;
    if (!pred && label == 1) ++m.fn;
  }
  if (m.tp + m.fp > 0) m.precision = static_cast<double>(m.tp) / (m.tp + m.fp);
  if (m.tp + m.fn > 0) m.recall = static_cast<double>(m.tp) / (m.tp + m.fn);
  const int total = m.tp + m.fp + m.tn + m.fn;
  if (total > 0) m.agreement = static_cast<double>(m.tp + m.tn) / total;
  return m;
}

std::string metrics_csv_header() { return "run_id,tp,fp,tn,fn,precision,recall,agreement"; }

std::string metrics_csv_row(const std::string& run_id, const EvalMetrics& m) {
  auto opt = [](const std::optional<double>& v) {
    if (!v) return std::string();
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", *v);
    return std::string(buf);
  };
  std::ostringstream s;
  s << run_id << ',' << m.tp << ',' << m.fp << ',' << m.tn << ',' << m.fn << ','
    << opt(m.precision) << ',' << opt(m.recall) << ',' << opt(m.agreement);
  return s.str();
}

}  // namespace guirl::judge
