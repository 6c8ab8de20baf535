#pragma once

#include <memory>
#include <string>
#include <vector>

#include "guirl/core/types.hpp"
#include "guirl/judge/types.hpp"
#include "guirl/simenv/oracle.hpp"

namespace guirl::judge {

// One evaluator implementation behind the three pipeline stages. The oracle
// backend derives everything from task oracle specs and replay; remote
// backends turn the same requests into text calls.
class JudgeBackend {
 public:
  struct KeyPointFinding {
    KeyPointStatus status = KeyPointStatus::Indeterminate;
    std::vector<int> evidence_steps;
  };

  struct OutcomeRequest {
    const core::Task& task;
    const core::Trajectory& trajectory;
    const std::vector<std::string>& key_points;
    const std::vector<int>& kept_steps;
    const StateDiff& diff;
  };

  struct OutcomeReply {
    Outcome outcome = Outcome::Failure;
    std::vector<KeyPointFinding> key_points;
    std::string rationale;
  };

  virtual ~JudgeBackend() = default;
  virtual std::string id() const = 0;

  virtual std::vector<std::string> identify_key_points(const core::Task& task) = 0;
  virtual std::vector<int> score_screenshots(const core::Task& task,
                                             const core::Trajectory& trajectory,
                                             const std::vector<std::string>& key_points) = 0;
  virtual OutcomeReply judge_outcome(const OutcomeRequest& request) = 0;
};

// Deterministic backend backed by the task oracle: key points are the spec's
// keypoint predicates rendered as text, screenshots score 5 exactly where a
// keypoint predicate's truth value changes, and the outcome combines keypoint
// verification with the goal predicates on the final replayed state.
class OracleJudgeBackend : public JudgeBackend {
 public:
  OracleJudgeBackend(const simenv::OracleEvaluator& oracle,
                     const simenv::OracleSpecRegistry& specs);

  std::string id() const override { return "oracle"; }
  std::vector<std::string> identify_key_points(const core::Task& task) override;
  std::vector<int> score_screenshots(const core::Task& task,
                                     const core::Trajectory& trajectory,
                                     const std::vector<std::string>& key_points) override;
  OutcomeReply judge_outcome(const OutcomeRequest& request) override;

 private:
  const simenv::OracleEvaluator& oracle_;
  const simenv::OracleSpecRegistry& specs_;
};

// Test backend replying fixed canned stage outputs.
class StubJudgeBackend : public JudgeBackend {
 public:
  std::vector<std::string> canned_key_points;
  std::vector<int> canned_scores;  // cycled over steps
  OutcomeReply canned_outcome;
  int fail_first_n_calls = 0;  // raise TransportError for this many stage calls

  std::string id() const override { return "stub"; }
  std::vector<std::string> identify_key_points(const core::Task& task) override;
  std::vector<int> score_screenshots(const core::Task& task,
                                     const core::Trajectory& trajectory,
                                     const std::vector<std::string>& key_points) override;
  OutcomeReply judge_outcome(const OutcomeRequest& request) override;

 private:
  void maybe_fail();
  int calls_ = 0;
};

}  // namespace guirl::judge
