#pragma once

#include <map>
#include <vector>

#include "guirl/core/types.hpp"
#include "guirl/simenv/app.hpp"
#include "guirl/simenv/predicate.hpp"
#include "guirl/simenv/state.hpp"

namespace guirl::simenv {

struct KeypointResult {
  int index = 0;
  bool met = false;
  std::optional<int> first_met_step;  // step whose prefix first satisfies it
};

struct OracleOutcome {
  int success = 0;  // {0,1}
  std::vector<KeypointResult> keypoint_results;
};

// Replayed state sequence: states[0] is the state after reset; states[t]
// (1-based) is the state after applying the trajectory's t-th action.
struct ReplayTrace {
  std::vector<EnvState> states;
  std::vector<std::string> digests;  // parallel to states
};

// Ground-truth labeler: replays a trajectory in a fresh environment, verifies
// that the recorded digests match the replay, and evaluates the task's
// declarative predicates on the replayed states.
class OracleEvaluator {
 public:
  OracleEvaluator(const AppRegistry& apps, const ContextRegistry& contexts);

  // Throws ValidationError if the trajectory's digests were not produced by
  // this environment build (initial or final digest mismatch).
  ReplayTrace replay(const core::Trajectory& trajectory, const TaskOracleSpec& spec) const;

  OracleOutcome evaluate(const core::Trajectory& trajectory,
                         const TaskOracleSpec& spec) const;

  // True when predicate `p` is satisfied by the prefix of length `t` (states
  // 0..t plus actions 1..t) of the replayed trajectory.
  static bool prefix_satisfies(const Predicate& p, const ReplayTrace& trace,
                               const core::Trajectory& trajectory, int prefix_len);

  const AppRegistry& apps() const { return apps_; }
  const ContextRegistry& contexts() const { return contexts_; }

 private:
  const AppRegistry& apps_;
  const ContextRegistry& contexts_;
};

// Registry of oracle specs keyed by task id, persisted next to task sets.
class OracleSpecRegistry {
 public:
  void add(TaskOracleSpec spec);
  const TaskOracleSpec& get(const std::string& task_id) const;
  bool has(const std::string& task_id) const;
  std::size_t size() const { return specs_.size(); }

 private:
  std::map<std::string, TaskOracleSpec> specs_;
};

}  // namespace guirl::simenv
