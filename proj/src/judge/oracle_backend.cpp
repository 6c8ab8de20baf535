#include <algorithm>

#include "guirl/core/error.hpp"
#include "guirl/judge/backend.hpp"

namespace guirl::judge {

using simenv::Predicate;
using simenv::ReplayTrace;
using simenv::TaskOracleSpec;

OracleJudgeBackend::OracleJudgeBackend(const simenv::OracleEvaluator& oracle,
                                       const simenv::OracleSpecRegistry& specs)
    : oracle_(oracle), specs_(specs) {}

std::vector<std::string> OracleJudgeBackend::identify_key_points(const core::Task& task) {
  const TaskOracleSpec& spec = specs_.get(task.task_id);
  std::vector<std::string> out;
  for (const auto& p : spec.keypoint_predicates) out.push_back(p.describe());
  if (out.empty()) {
    // A task always has at least one critical requirement: its goal.
    std::string goal = "final state: ";
    for (size_t i = 0; i < spec.goal_predicates.size(); ++i) {
      if (i) goal += " and ";
      goal += spec.goal_predicates[i].describe();
    }
    if (spec.goal_predicates.empty()) goal += "any";
    out.push_back(goal);
  }
  return out;
}

std::vector<int> OracleJudgeBackend::score_screenshots(
    const core::Task& task, const core::Trajectory& trajectory,
    const std::vector<std::string>& key_points) {
  (void)key_points;
  const TaskOracleSpec& spec = specs_.get(task.task_id);
  const ReplayTrace trace = oracle_.replay(trajectory, spec);
  const int n = trajectory.step_count();

  std::vector<int> scores(static_cast<size_t>(n), 1);
  for (const auto& p : spec.keypoint_predicates) {
    bool prev = p.is_action_predicate()
                    ? false
                    : simenv::OracleEvaluator::prefix_satisfies(p, trace, trajectory, 0);
    for (int t = 1; t <= n; ++t) {
      const bool now = simenv::OracleEvaluator::prefix_satisfies(p, trace, trajectory, t);
      if (now != prev) scores[static_cast<size_t>(t - 1)] = 5;
      prev = now;
    }
  }
  return scores;
}

JudgeBackend::OutcomeReply OracleJudgeBackend::judge_outcome(const OutcomeRequest& request) {
  const TaskOracleSpec& spec = specs_.get(request.task.task_id);
  const ReplayTrace trace = oracle_.replay(request.trajectory, spec);
  const int n = request.trajectory.step_count();

  OutcomeReply reply;
  bool all_met = true;

  // Evidence-grounded verification against the kept steps (plus the initial
  // state, which the judge always sees through the state diff).
  for (const auto& p : spec.keypoint_predicates) {
    KeyPointFinding finding;
    if (p.is_action_predicate()) {
      for (int kept : request.kept_steps) {
        if (p.eval_action(request.trajectory.steps[kept].action)) {
          finding.evidence_steps.push_back(kept);
        }
      }
    } else {
      if (p.eval_state(trace.states.front())) finding.evidence_steps.push_back(0);
      for (int kept : request.kept_steps) {
        if (p.eval_state(trace.states[static_cast<size_t>(kept) + 1])) {
          finding.evidence_steps.push_back(kept);
        }
      }
    }
    finding.status =
        finding.evidence_steps.empty() ? KeyPointStatus::Unmet : KeyPointStatus::Met;
    all_met = all_met && finding.status == KeyPointStatus::Met;
    reply.key_points.push_back(std::move(finding));
  }

  bool goal_holds = true;
  for (const auto& p : spec.goal_predicates) {
    if (p.is_action_predicate()) {
      bool any = false;
      for (int t = 0; t < n; ++t) any = any || p.eval_action(request.trajectory.steps[t].action);
      goal_holds = goal_holds && any;
    } else {
      goal_holds = goal_holds && p.eval_state(trace.states.back());
    }
  }

  if (spec.keypoint_predicates.empty() && !request.key_points.empty()) {
    // identify_key_points synthesized a single goal key point; report it.
    KeyPointFinding finding;
    finding.status = goal_holds ? KeyPointStatus::Met : KeyPointStatus::Unmet;
    if (goal_holds) finding.evidence_steps.push_back(n - 1);
    reply.key_points.push_back(std::move(finding));
  }

  reply.outcome = (all_met && goal_holds) ? Outcome::Success : Outcome::Failure;
  reply.rationale = "keypoints " + std::string(all_met ? "met" : "unmet") +
                    "; final-state goal " + (goal_holds ? "holds" : "does not hold") +
                    "; state diff: " + request.diff.summary;
  return reply;
}

void StubJudgeBackend::maybe_fail() {
  if (calls_++ < fail_first_n_calls) {
    throw TransportError("stub backend transport failure");
  }
}

std::vector<std::string> StubJudgeBackend::identify_key_points(const core::Task& task) {
  maybe_fail();
  (void)task;
  return canned_key_points;
}

std::vector<int> StubJudgeBackend::score_screenshots(
    const core::Task& task, const core::Trajectory& trajectory,
    const std::vector<std::string>& key_points) {
  maybe_fail();
  (void)task;
  (void)key_points;
  std::vector<int> scores;
  for (int t = 0; t < trajectory.step_count(); ++t) {
    scores.push_back(canned_scores.empty()
                         ? 1
                         : canned_scores[static_cast<size_t>(t) % canned_scores.size()]);
  }
  return scores;
}

JudgeBackend::OutcomeReply StubJudgeBackend::judge_outcome(const OutcomeRequest& request) {
  maybe_fail();
  (void)request;
  return canned_outcome;
}

}  // namespace guirl::judge
