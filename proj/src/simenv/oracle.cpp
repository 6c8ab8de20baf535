#include "guirl/simenv/oracle.hpp"

#include "guirl/core/error.hpp"
#include "guirl/simenv/env.hpp"

namespace guirl::simenv {

OracleEvaluator::OracleEvaluator(const AppRegistry& apps, const ContextRegistry& contexts)
    : apps_(apps), contexts_(contexts) {}

ReplayTrace OracleEvaluator::replay(const core::Trajectory& trajectory,
                                    const TaskOracleSpec& spec) const {
  if (trajectory.steps.empty()) throw ValidationError("cannot replay an empty trajectory");
  const App& app = apps_.get(spec.app_id);
  SimEnv env(app, contexts_);
  env.reset(spec.context_id, trajectory.steps.front().observation.task_text,
            trajectory.step_count() + 1);

  ReplayTrace trace;
  trace.states.push_back(env.state());
  trace.digests.push_back(env.state_digest());
  if (trace.digests.front() != trajectory.env_state_digest_initial) {
    throw ValidationError("trajectory initial digest does not match replay; "
                          "trajectory was not produced by this environment build");
  }
  for (const auto& step : trajectory.steps) {
    env.step(step.action);
    trace.states.push_back(env.state());
    trace.digests.push_back(env.state_digest());
  }
  if (trace.digests.back() != trajectory.env_state_digest_final) {
    throw ValidationError("trajectory final digest does not match replay");
  }
  return trace;
}

bool OracleEvaluator::prefix_satisfies(const Predicate& p, const ReplayTrace& trace,
                                       const core::Trajectory& trajectory, int prefix_len) {
  if (p.is_action_predicate()) {
    for (int t = 0; t < prefix_len; ++t) {
      if (p.eval_action(trajectory.steps[t].action)) return true;
    }
    return false;
  }
  for (int t = 0; t <= prefix_len; ++t) {
    if (p.eval_state(trace.states[t])) return true;
  }
  return false;
}

OracleOutcome OracleEvaluator::evaluate(const core::Trajectory& trajectory,
                                        const TaskOracleSpec& spec) const {
  const ReplayTrace trace = replay(trajectory, spec);
  const int n = trajectory.step_count();

  OracleOutcome outcome;
  bool all_keypoints_met = true;
  for (int i = 0; i < static_cast<int>(spec.keypoint_predicates.size()); ++i) {
    const Predicate& p = spec.keypoint_predicates[i];
    KeypointResult r;
    r.index = i;
    for (int t = p.is_action_predicate() ? 1 : 0; t <= n; ++t) {
      if (prefix_satisfies(p, trace, trajectory, t)) {
        r.met = true;
        r.first_met_step = t;
        break;
      }
    }
    all_keypoints_met = all_keypoints_met && r.met;
    outcome.keypoint_results.push_back(r);
  }

  bool goal_holds = true;
  for (const auto& p : spec.goal_predicates) {
    if (p.is_action_predicate()) {
      goal_holds = goal_holds && prefix_satisfies(p, trace, trajectory, n);
    } else {
      goal_holds = goal_holds && p.eval_state(trace.states.back());
    }
  }

  outcome.success = (goal_holds && all_keypoints_met) ? 1 : 0;
  return outcome;
}

void OracleSpecRegistry::add(TaskOracleSpec spec) {
  if (spec.task_id.empty()) throw ValidationError("oracle spec without task_id");
  specs_[spec.task_id] = std::move(spec);
}

const TaskOracleSpec& OracleSpecRegistry::get(const std::string& task_id) const {
  auto it = specs_.find(task_id);
  if (it == specs_.end()) throw ValidationError("no oracle spec for task: " + task_id);
  return it->second;
}

bool OracleSpecRegistry::has(const std::string& task_id) const {
  return specs_.count(task_id) > 0;
}

}  // namespace guirl::simenv
