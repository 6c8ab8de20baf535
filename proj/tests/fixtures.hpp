#pragma once

// Synthetic fixtures shared by the policy/grpo unit tests and the acceptance
// suite: small random snapshots, random observations and behavior-policy
// rollouts, plus the central-difference gradient oracle.

#include <random>
#include <vector>

#include "guirl/core/rollout.hpp"
#include "guirl/core/symbols.hpp"
#include "guirl/grpo/grpo.hpp"
#include "guirl/policy/model.hpp"

namespace fixtures {

using namespace guirl;

inline core::SymbolTable tiny_symbols() {
  return core::SymbolTable::build(
      {"btn_a", "btn_b", "menu_c", "field_d", "field_e", "list_f"},
      {"red", "green", "blue", "gold", "gray"});
}

inline policy::PolicySnapshot random_snapshot(std::uint64_t seed, int feature_dim = 24,
                                              int hidden_dim = 8) {
  policy::FeatureConfig cfg;
  cfg.feature_dim = feature_dim;
  cfg.hidden_dim = hidden_dim;
  cfg.max_payload_words = 2;
  auto snap = policy::make_initial_snapshot(cfg, tiny_symbols(), seed);
  std::mt19937_64 rng(seed ^ 0xfeed);
  std::uniform_real_distribution<double> d(-0.5, 0.5);
  for (auto& v : snap.theta) v = d(rng);
  return snap;
}

// Observation over the tiny symbol table with every action kind available.
inline core::Observation random_observation(std::mt19937_64& rng, int step_index) {
  core::Observation obs;
  obs.step_index = step_index;
  auto flip = [&](double p) {
    return std::uniform_real_distribution<double>(0, 1)(rng) < p;
  };
  obs.screen.push_back({"btn_a", core::WidgetKind::Button, "Apply", true, "actions"});
  obs.screen.push_back({"btn_b", core::WidgetKind::Button, "Blend", flip(0.7), "actions"});
  obs.screen.push_back({"menu_c", core::WidgetKind::Menu, "Colors", flip(0.7), "nav"});
  obs.screen.push_back({"field_d", core::WidgetKind::TextField, "dye", true, "content"});
  obs.screen.push_back({"field_e", core::WidgetKind::TextField, "extra", flip(0.5), "content"});
  obs.screen.push_back({"list_f", core::WidgetKind::ListItem, "first row", flip(0.8), "content"});
  obs.screen.push_back({"label_g", core::WidgetKind::Label, "gold info", false, "content"});
  return obs;
}

// Samples a trajectory from `behavior` (storing its log-probs) over random
// synthetic observations. Rewards are assigned by the caller.
inline core::Trajectory synthetic_trajectory(const policy::PolicySnapshot& behavior,
                                             const std::string& task_text, int steps,
                                             std::uint64_t seed) {
  policy::PolicyModel model(behavior);
  std::mt19937_64 rng(seed);
  core::Trajectory traj;
  traj.task_id = "synthetic";
  std::vector<core::Observation> obs_chain;
  for (int t = 0; t < steps; ++t) {
    core::Observation obs = random_observation(rng, t);
    obs.task_text = task_text;
    obs_chain.push_back(std::move(obs));
    std::vector<const core::Observation*> history;
    const int lo = std::max(0, t - (behavior.config.history_window - 1));
    for (int i = lo; i <= t; ++i) history.push_back(&obs_chain[i]);

    auto [action, lps] = model.sample_action(task_text, history, 1.0, rng());
    if (action.kind == core::ActionKind::Terminate && t + 1 < steps) {
      // Keep the requested length: retry with a different seed offset.
      bool replaced = false;
      for (int attempt = 0; attempt < 64 && !replaced; ++attempt) {
        auto [a2, l2] = model.sample_action(task_text, history, 1.0, rng());
        if (a2.kind != core::ActionKind::Terminate) {
          action = a2;
          lps = l2;
          replaced = true;
        }
      }
    }
    core::TrajectoryStep step;
    step.observation = obs_chain.back();
    step.action = action;
    step.log_probs = lps;
    traj.steps.push_back(std::move(step));
    if (action.kind == core::ActionKind::Terminate) break;
  }
  traj.terminated_by = traj.steps.back().action.kind == core::ActionKind::Terminate
                           ? core::TerminationCause::AgentTerminate
                           : core::TerminationCause::StepLimit;
  traj.env_state_digest_initial = "f0f0";
  traj.env_state_digest_final = "0f0f";
  return traj;
}

inline grpo::GroupBatch synthetic_group(const policy::PolicySnapshot& behavior,
                                        std::int64_t version, int group_size,
                                        std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<core::RolloutRecord> rollouts;
  for (int i = 0; i < group_size; ++i) {
    core::RolloutRecord r;
    const int steps = 1 + static_cast<int>(rng() % 3);
    r.trajectory = synthetic_trajectory(behavior, "tint the field gold", steps, rng());
    r.trajectory.task_id = "synthetic";
    r.trajectory.reward = (rng() % 2 == 0) ? 1.0 : 0.0;
    r.group_id = "grp";
    r.seed = seed + i;
    r.policy_version = version;
    rollouts.push_back(std::move(r));
  }
  // Guarantee a non-degenerate group.
  rollouts.front().trajectory.reward = 1.0;
  rollouts.back().trajectory.reward = 0.0;
  return grpo::GroupBatch::from_rollouts(std::move(rollouts));
}

// Central finite differences of the loss over every theta coordinate.
inline std::vector<double> fd_gradient(const policy::PolicySnapshot& snapshot,
                                       const grpo::ContributionSpec& spec, double h) {
  std::vector<double> grad(snapshot.theta.size(), 0.0);
  policy::PolicySnapshot work = snapshot;
  for (size_t i = 0; i < snapshot.theta.size(); ++i) {
    const double orig = work.theta[i];
    work.theta[i] = orig + h;
    const double up = policy::loss_value(work, spec);
    work.theta[i] = orig - h;
    const double down = policy::loss_value(work, spec);
    work.theta[i] = orig;
    grad[i] = (up - down) / (2.0 * h);
  }
  return grad;
}

inline double max_rel_error(const std::vector<double>& a, const std::vector<double>& b) {
  double worst = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    const double denom = std::max(1e-4, std::abs(a[i]) + std::abs(b[i]));
    worst = std::max(worst, std::abs(a[i] - b[i]) / denom);
  }
  return worst;
}

}  // namespace fixtures
