#include "guirl/grpo/grpo.hpp"

#include <algorithm>
#include <cmath>

#include "guirl/core/error.hpp"

namespace guirl::grpo {

using nlohmann::ordered_json;

ordered_json optimizer_config_to_json(const OptimizerConfig& cfg) {
  return ordered_json{
      {"clip_epsilon", cfg.clip_epsilon},
      {"kl_beta", cfg.kl_beta},
      {"learning_rate", cfg.learning_rate},
      {"group_size", cfg.group_size},
      {"batch_groups", cfg.batch_groups},
      {"temperature", cfg.temperature},
      {"degenerate_group_policy",
       cfg.degenerate_group_policy == DegenerateGroupPolicy::ZeroAdvantage
           ? "zero_advantage"
           : "skip_group"}};
}

OptimizerConfig optimizer_config_from_json(const ordered_json& j) {
  OptimizerConfig cfg;
  cfg.clip_epsilon = j.value("clip_epsilon", cfg.clip_epsilon);
  cfg.kl_beta = j.value("kl_beta", cfg.kl_beta);
  cfg.learning_rate = j.value("learning_rate", cfg.learning_rate);
  cfg.group_size = j.value("group_size", cfg.group_size);
  cfg.batch_groups = j.value("batch_groups", cfg.batch_groups);
  cfg.temperature = j.value("temperature", cfg.temperature);
  const std::string pol = j.value("degenerate_group_policy", "zero_advantage");
  cfg.degenerate_group_policy = pol == "skip_group" ? DegenerateGroupPolicy::SkipGroup
                                                    : DegenerateGroupPolicy::ZeroAdvantage;
  if (cfg.clip_epsilon <= 0) throw ValidationError("clip_epsilon must be > 0");
  if (cfg.learning_rate <= 0) throw ValidationError("learning_rate must be > 0");
  return cfg;
}

GroupBatch GroupBatch::from_rollouts(std::vector<core::RolloutRecord> rollouts) {
  if (rollouts.empty()) throw ValidationError("empty group");
  GroupBatch g;
  g.task_id = rollouts.front().trajectory.task_id;
  for (const auto& r : rollouts) {
    if (r.trajectory.task_id != g.task_id) {
      throw ValidationError("group mixes tasks: " + r.trajectory.task_id + " vs " +
                            g.task_id);
    }
    if (r.group_id != rollouts.front().group_id) {
      throw ValidationError("group mixes group ids");
    }
    if (!r.trajectory.reward.has_value()) {
      throw ValidationError("rollout " + r.group_id + "/" + std::to_string(r.seed) +
                            " has no reward");
    }
    g.rewards.push_back(*r.trajectory.reward);
  }
  g.rollouts = std::move(rollouts);
  return g;
}

AdvantageResult normalized_advantages(const std::vector<double>& rewards) {
  const int g = static_cast<int>(rewards.size());
  if (g < 2) throw ValidationError("advantage normalization needs a group of >= 2");
  double mean = 0.0;
  for (double r : rewards) mean += r;
  mean /= g;
  double var = 0.0;
  for (double r : rewards) var += (r - mean) * (r - mean);
  var /= g;  // population variance, no Bessel correction
  const double std_dev = std::sqrt(var);

  AdvantageResult out;
  out.advantages.assign(rewards.size(), 0.0);
  if (std_dev == 0.0) {
    out.degenerate = true;
    return out;
  }
  for (size_t i = 0; i < rewards.size(); ++i) {
    out.advantages[i] = (rewards[i] - mean) / std_dev;
  }
  return out;
}

double clipped_token_term(double ratio, double advantage, double clip_epsilon) {
  if (clip_epsilon <= 0) throw ValidationError("clip_epsilon must be > 0");
  const double clipped = std::clamp(ratio, 1.0 - clip_epsilon, 1.0 + clip_epsilon);
  return std::min(ratio * advantage, clipped * advantage);
}

namespace {

std::vector<const core::Observation*> history_window(const core::Trajectory& traj, int step,
                                                     int window) {
  std::vector<const core::Observation*> h;
  const int lo = std::max(0, step - (window - 1));
  for (int t = lo; t <= step; ++t) h.push_back(&traj.steps[t].observation);
  return h;
}

}  // namespace

LossResult assemble_loss(const std::vector<GroupBatch>& groups,
                         const policy::PolicySnapshot& snapshot,
                         const OptimizerConfig& config) {
  if (groups.empty()) throw ValidationError("no groups to optimize");

  LossResult out;
  out.spec.policy_version = snapshot.version;
  out.spec.clip_epsilon = config.clip_epsilon;
  out.spec.kl_beta = config.kl_beta;
  out.spec.temperature = config.temperature;

  // First pass: advantages and bookkeeping in a fixed group order.
  std::vector<const GroupBatch*> used;
  std::vector<std::vector<double>> advantages;
  double reward_sum = 0.0;
  int reward_count = 0;
  double adv_sum = 0.0, adv_sq = 0.0;
  int adv_n = 0;
  for (const auto& g : groups) {
    if (static_cast<int>(g.rollouts.size()) < 2) {
      throw ValidationError("group below minimum size 2: " + g.task_id);
    }
    for (const auto& r : g.rollouts) {
      if (r.policy_version != snapshot.version) {
        throw ValidationError("stale rollout (version " +
                              std::to_string(r.policy_version) + ", snapshot " +
                              std::to_string(snapshot.version) + "): strict on-policy");
      }
      if (!r.trajectory.reward.has_value()) {
        throw ValidationError("unjudged rollout in group " + g.task_id);
      }
      reward_sum += *r.trajectory.reward;
      ++reward_count;
    }
    auto adv = normalized_advantages(g.rewards);
    if (adv.degenerate &&
        config.degenerate_group_policy == DegenerateGroupPolicy::SkipGroup) {
      out.stats.groups_skipped += 1;
      continue;
    }
    for (double a : adv.advantages) {
      adv_sum += a;
      adv_sq += a * a;
      ++adv_n;
    }
    used.push_back(&g);
    advantages.push_back(std::move(adv.advantages));
  }

  out.stats.groups_used = static_cast<int>(used.size());
  out.stats.mean_reward = reward_count ? reward_sum / reward_count : 0.0;
  if (adv_n > 0) {
    out.stats.advantage_mean = adv_sum / adv_n;
    out.stats.advantage_std =
        std::sqrt(std::max(0.0, adv_sq / adv_n - out.stats.advantage_mean *
                                                     out.stats.advantage_mean));
  }
  if (used.empty()) return out;  // every group degenerate and skipped

  const policy::PolicyModel model(snapshot);
  const double batch_scale = 1.0 / static_cast<double>(used.size());
  double loss = 0.0;

  for (size_t gi = 0; gi < used.size(); ++gi) {
    const GroupBatch& g = *used[gi];
    const double group_scale = 1.0 / static_cast<double>(g.rollouts.size());
    for (size_t ri = 0; ri < g.rollouts.size(); ++ri) {
      const auto& traj = g.rollouts[ri].trajectory;
      const double adv = advantages[gi][ri];
      const double traj_scale = 1.0 / static_cast<double>(traj.step_count());
      out.stats.rollouts += 1;
      for (int t = 0; t < traj.step_count(); ++t) {
        const auto& step = traj.steps[t];
        const double scale =
            batch_scale * group_scale * traj_scale /
            static_cast<double>(step.action.token_seq.size());
        const auto history = history_window(traj, t, snapshot.config.history_window);
        const auto fwd = model.score_action(step.observation.task_text, history,
                                            step.action.token_seq, config.temperature);
        for (size_t k = 0; k < step.action.token_seq.size(); ++k) {
          const double ratio = std::exp(fwd.log_probs[k] - step.log_probs[k]);
          const double term = clipped_token_term(ratio, adv, config.clip_epsilon);
          double kl = 0.0;
          if (config.kl_beta != 0.0) {
            const double inv = std::exp(step.log_probs[k] - fwd.log_probs[k]);
            kl = inv - std::log(inv) - 1.0;
          }
          loss += -scale * (term - config.kl_beta * kl);
          out.stats.tokens += 1;
          if (ratio * adv > std::clamp(ratio, 1.0 - config.clip_epsilon,
                                       1.0 + config.clip_epsilon) *
                                adv) {
            out.stats.clipped_tokens += 1;
          }
        }
        out.spec.steps.push_back({&traj, t, adv, scale});
      }
    }
  }
  out.loss = loss;
  return out;
}

policy::PolicySnapshot apply_update(const policy::PolicySnapshot& snapshot,
                                    const std::vector<double>& gradient,
                                    const OptimizerConfig& config) {
  if (gradient.size() != snapshot.theta.size()) {
    throw ValidationError("gradient length " + std::to_string(gradient.size()) +
                          " does not match theta length " +
                          std::to_string(snapshot.theta.size()));
  }
  policy::PolicySnapshot next = snapshot;
  for (size_t i = 0; i < next.theta.size(); ++i) {
    next.theta[i] = snapshot.theta[i] - config.learning_rate * gradient[i];
  }
  next.version = snapshot.version + 1;
  return next;
}

}  // namespace guirl::grpo

namespace guirl::policy {

namespace {

std::vector<const core::Observation*> history_window(const core::Trajectory& traj, int step,
                                                     int window) {
  std::vector<const core::Observation*> h;
  const int lo = std::max(0, step - (window - 1));
  for (int t = lo; t <= step; ++t) h.push_back(&traj.steps[t].observation);
  return h;
}

}  // namespace

double loss_value(const PolicySnapshot& snapshot, const grpo::ContributionSpec& spec) {
  if (spec.policy_version != snapshot.version) {
    throw ValidationError("contribution spec was built for snapshot version " +
                          std::to_string(spec.policy_version));
  }
  const PolicyModel model(snapshot);
  double loss = 0.0;
  for (const auto& c : spec.steps) {
    const auto& step = c.trajectory->steps[c.step];
    const auto history =
        history_window(*c.trajectory, c.step, snapshot.config.history_window);
    const auto fwd = model.score_action(step.observation.task_text, history,
                                        step.action.token_seq, spec.temperature);
    for (size_t k = 0; k < step.action.token_seq.size(); ++k) {
      const double ratio = std::exp(fwd.log_probs[k] - step.log_probs[k]);
      const double term = grpo::clipped_token_term(ratio, c.advantage, spec.clip_epsilon);
      double kl = 0.0;
      if (spec.kl_beta != 0.0) {
        const double inv = std::exp(step.log_probs[k] - fwd.log_probs[k]);
        kl = inv - std::log(inv) - 1.0;
      }
      loss += -c.scale * (term - spec.kl_beta * kl);
    }
  }
  return loss;
}

std::vector<double> loss_gradient(const PolicySnapshot& snapshot,
                                  const grpo::ContributionSpec& spec) {
  if (spec.policy_version != snapshot.version) {
    throw ValidationError("stale contribution spec (version " +
                          std::to_string(spec.policy_version) + " vs snapshot " +
                          std::to_string(snapshot.version) + ")");
  }
  const PolicyModel model(snapshot);
  std::vector<double> grad(snapshot.theta.size(), 0.0);

  for (const auto& c : spec.steps) {
    const auto& step = c.trajectory->steps[c.step];
    const auto history =
        history_window(*c.trajectory, c.step, snapshot.config.history_window);
    const auto fwd = model.score_action(step.observation.task_text, history,
                                        step.action.token_seq, spec.temperature);
    std::vector<double> dlp(step.action.token_seq.size(), 0.0);
    for (size_t k = 0; k < step.action.token_seq.size(); ++k) {
      const double ratio = std::exp(fwd.log_probs[k] - step.log_probs[k]);
      const double clipped =
          std::clamp(ratio, 1.0 - spec.clip_epsilon, 1.0 + spec.clip_epsilon);
      // The min picks the unclipped branch when ratio*A <= clip(ratio)*A;
      // only that branch depends on theta.
      double d_term = 0.0;
      if (ratio * c.advantage <= clipped * c.advantage) {
        d_term = c.advantage * ratio;
      }
      double d_kl = 0.0;
      if (spec.kl_beta != 0.0) {
        const double inv = std::exp(step.log_probs[k] - fwd.log_probs[k]);
        d_kl = 1.0 - inv;  // d/dlp of (inv - log inv - 1)
      }
      dlp[k] = -c.scale * (d_term - spec.kl_beta * d_kl);
    }
    model.accumulate_log_prob_gradient(fwd, dlp, spec.temperature, grad);
  }
  return grad;
}

}  // namespace guirl::policy
