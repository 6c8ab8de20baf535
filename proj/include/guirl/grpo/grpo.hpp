#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "guirl/core/rollout.hpp"
#include "guirl/policy/model.hpp"

namespace guirl::grpo {

enum class DegenerateGroupPolicy { ZeroAdvantage, SkipGroup };

struct OptimizerConfig {
  double clip_epsilon = 0.28;
  double kl_beta = 0.0;       // KL term disabled by default
  double learning_rate = 1e-6;
  int group_size = 8;
  int batch_groups = 16;
  double temperature = 1.0;
  DegenerateGroupPolicy degenerate_group_policy = DegenerateGroupPolicy::ZeroAdvantage;
};

nlohmann::ordered_json optimizer_config_to_json(const OptimizerConfig& cfg);
OptimizerConfig optimizer_config_from_json(const nlohmann::ordered_json& j);

// The G rollouts of one task, jointly normalized. Rewards are pulled from the
// verdicts; construction validates the shared task id.
struct GroupBatch {
  std::string task_id;
  std::vector<core::RolloutRecord> rollouts;
  std::vector<double> rewards;

  static GroupBatch from_rollouts(std::vector<core::RolloutRecord> rollouts);
};

struct AdvantageResult {
  std::vector<double> advantages;
  bool degenerate = false;  // zero reward variance within the group
};

// Trajectory-level normalized advantages: (R - mean) / population std.
// Degenerate groups yield all-zero advantages; G < 2 is rejected.
AdvantageResult normalized_advantages(const std::vector<double>& rewards);

// min(ratio * A, clip(ratio, 1-eps, 1+eps) * A).
double clipped_token_term(double ratio, double advantage, double clip_epsilon);

// Everything the gradient pass needs about one trajectory step. Trajectories
// are borrowed from the GroupBatch vector handed to assemble_loss: the spec
// is only valid while those batches stay alive and unmoved.
struct StepContribution {
  const core::Trajectory* trajectory = nullptr;
  int step = 0;
  double advantage = 0.0;
  double scale = 0.0;  // 1 / (batch * group * T_i * |a_t|)
};

struct ContributionSpec {
  std::int64_t policy_version = 0;
  double clip_epsilon = 0.28;
  double kl_beta = 0.0;
  double temperature = 1.0;
  std::vector<StepContribution> steps;
};

struct LossStats {
  int groups_used = 0;
  int groups_skipped = 0;
  int rollouts = 0;
  int tokens = 0;
  int clipped_tokens = 0;
  double mean_reward = 0.0;
  double advantage_mean = 0.0;
  double advantage_std = 0.0;
};

struct LossResult {
  double loss = 0.0;
  ContributionSpec spec;
  LossStats stats;
};

// Assembles the multi-turn clipped surrogate over a batch of groups: the
// group mean of -(1/G) sum_i (1/T_i) sum_t (1/|a_t|) sum_k [A~ - beta*KL],
// with each trajectory's normalized advantage broadcast to all its tokens.
// Rejects missing rewards and rollouts from any other snapshot version.
LossResult assemble_loss(const std::vector<GroupBatch>& groups,
                         const policy::PolicySnapshot& snapshot,
                         const OptimizerConfig& config);

// Plain gradient-descent step; returns a new snapshot with version + 1.
policy::PolicySnapshot apply_update(const policy::PolicySnapshot& snapshot,
                                    const std::vector<double>& gradient,
                                    const OptimizerConfig& config);

}  // namespace guirl::grpo

namespace guirl::policy {

// Exact analytic gradient of the assembled loss with respect to theta.
// Declared here because the policy supplies the per-token log-prob gradients
// while the spec layout comes from the optimizer.
std::vector<double> loss_gradient(const PolicySnapshot& snapshot,
                                  const grpo::ContributionSpec& spec);

// Loss value for the same spec (shared by the gradient and its tests).
double loss_value(const PolicySnapshot& snapshot, const grpo::ContributionSpec& spec);

}  // namespace guirl::policy
