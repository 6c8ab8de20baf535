#pragma once

#include <functional>
#include <optional>

#include "guirl/curriculum/templates.hpp"

namespace guirl::curriculum {

struct CapabilityEntry {
  std::string task_id;
  double success_rate = 0.0;  // exact mean of the outcomes
  int rollout_count = 0;
  std::vector<int> outcomes;  // y in {0,1} per rollout
  bool incomplete = false;    // judging failed beyond the retry budget
};

struct CapabilityReport {
  int iteration = 0;
  std::vector<CapabilityEntry> entries;

  const CapabilityEntry* find(const std::string& task_id) const;
};

nlohmann::ordered_json capability_report_to_json(const CapabilityReport& r);
CapabilityReport capability_report_from_json(const nlohmann::ordered_json& j);

enum class DifficultyBucket { Easy, Medium, Hard };

std::string to_string(DifficultyBucket b);

// Easy when s > delta_high, Hard when s < delta_low, Medium on the closed
// band in between (both boundaries inclusive).
DifficultyBucket classify(double success_rate, double delta_low, double delta_high);

// Buckets every complete entry of the report; incomplete entries are omitted
// (the generator treats them as Hard). Rejects out-of-order thresholds.
std::map<std::string, DifficultyBucket> bucketize(const CapabilityReport& report,
                                                  double delta_low, double delta_high);

// Samples one judged rollout for a task; returns the binary outcome or
// nullopt when the rollout could not be judged.
using RolloutFn = std::function<std::optional<int>(const GeneratedTask& task,
                                                   std::uint64_t seed)>;

// Runs m judged rollouts per task (retrying unjudgeable ones a bounded number
// of times) and reports the exact mean success rates.
CapabilityReport evaluate_capability(const TaskSet& tasks, int m, std::uint64_t seed,
                                     int iteration, const RolloutFn& rollout);

struct CurriculumConfig {
  int task_budget = 256;       // |T^(n)| per iteration
  int per_context_budget = 32; // iteration-0 tasks per context
  double delta_low = 0.3;
  double delta_high = 0.7;
  int max_sub_goals = 6;
};

// Procedural task generation: bucket-specific transforms plus the bootstrap.
class TaskGenerator {
 public:
  TaskGenerator(const TaskFactory& factory, CurriculumConfig config);

  // Atomic single-skill tasks grounded in widgets actually visited during
  // exploration; per_context_budget tasks per covered context. Evaluation
  // only, never used for optimization.
  TaskSet bootstrap_iteration0(const std::vector<core::Trajectory>& exploration,
                               const std::vector<core::Trajectory>& reviews,
                               const std::string& app_id, std::uint64_t seed) const;

  // T^(n+1) from T^(n) and its capability report: harder variants of Easy
  // parents, re-grounded variants of Medium parents, single-skill subtasks of
  // Hard parents. Produces exactly config.task_budget tasks.
  TaskSet generate_next(const TaskSet& previous, const CapabilityReport& report,
                        std::uint64_t seed) const;

  // Fixed evaluation suite: atomic and two-skill tasks over every context of
  // the app, independent from any training iteration.
  TaskSet generate_eval_suite(const std::string& app_id, int atomic, int composite,
                              std::uint64_t seed) const;

  const CurriculumConfig& config() const { return config_; }

 private:
  GeneratedTask make_child_easy(const GeneratedTask& parent, int iteration,
                                const std::string& task_id, std::mt19937_64& rng) const;
  GeneratedTask make_child_medium(const GeneratedTask& parent, int iteration,
                                  const std::string& task_id, std::mt19937_64& rng) const;
  std::vector<TaskBlueprint> decompose_hard(const GeneratedTask& parent) const;

  const TaskFactory& factory_;
  CurriculumConfig config_;
};

// Widget ids that appear in the trajectory's observations (grounding set).
std::vector<std::string> visited_widgets(const std::vector<core::Trajectory>& trajectories);

}  // namespace guirl::curriculum
