#include "guirl/simenv/explore.hpp"

#include <cmath>
#include <random>

#include "guirl/core/error.hpp"

namespace guirl::simenv {

using core::Action;
using core::ActionKind;
using core::Trajectory;
using core::TrajectoryStep;
using core::WidgetKind;

namespace {

struct WalkOption {
  ActionKind kind;
  std::string target;
};

std::vector<WalkOption> walk_options(const core::Observation& obs) {
  std::vector<WalkOption> opts;
  for (const auto& w : obs.screen) {
    if (!w.enabled) continue;
    if (action_targets_widget_kind(ActionKind::Click, w.kind)) {
      opts.push_back({ActionKind::Click, w.id});
    }
    if (action_targets_widget_kind(ActionKind::Scroll, w.kind)) {
      opts.push_back({ActionKind::Scroll, w.id});
    }
    if (action_targets_widget_kind(ActionKind::Type, w.kind)) {
      opts.push_back({ActionKind::Type, w.id});
    }
  }
  return opts;
}

}  // namespace

Trajectory explore(SimEnv& env, const core::SymbolTable& symbols,
                   const std::string& context_id, int budget, std::uint64_t seed) {
  if (budget < 1) throw ValidationError("exploration budget must be >= 1");
  std::mt19937_64 rng(seed);
  const auto words = env.app().payload_vocabulary();

  Trajectory traj;
  traj.task_id = "explore:" + env.app().app_id() + ":" + context_id;
  core::Observation obs = env.reset(context_id, "", budget);
  traj.env_state_digest_initial = env.state_digest();

  ActionKind prev_kind = ActionKind::Terminate;
  std::string prev_target;
  for (int t = 0; t < budget; ++t) {
    auto opts = walk_options(obs);
    // No immediate repeat of the same (kind, target) pair.
    std::erase_if(opts, [&](const WalkOption& o) {
      return o.kind == prev_kind && o.target == prev_target;
    });
    if (opts.empty()) break;  // cannot happen in the bundled apps

    const size_t pick = std::uniform_int_distribution<size_t>(0, opts.size() - 1)(rng);
    const WalkOption& opt = opts[pick];
    std::string payload;
    double payload_lp = 0.0;
    if (opt.kind == ActionKind::Type) {
      const size_t wi = std::uniform_int_distribution<size_t>(0, words.size() - 1)(rng);
      payload = words[wi];
      payload_lp = -std::log(static_cast<double>(words.size()));
    }
    Action action = core::encode_action(symbols, opt.kind, opt.target, payload);

    TrajectoryStep step;
    step.observation = obs;
    step.action = action;
    // The walk picks a whole (kind, target) option uniformly; the option
    // probability sits on the first token, the payload word on its own token.
    step.log_probs.assign(action.token_seq.size(), 0.0);
    step.log_probs[0] = -std::log(static_cast<double>(opts.size()));
    if (opt.kind == ActionKind::Type) {
      step.log_probs[2] = payload_lp;
    }
    auto result = env.step(action);
    obs = std::move(result.observation);
    traj.steps.push_back(std::move(step));
    prev_kind = opt.kind;
    prev_target = opt.target;
    if (result.terminated) break;
  }
  traj.terminated_by = core::TerminationCause::StepLimit;
  traj.env_state_digest_final = env.state_digest();
  return traj;
}

Trajectory review_context(SimEnv& env, const core::SymbolTable& symbols,
                          const std::string& context_id, std::uint64_t seed) {
  const Context& ctx = env.contexts().get(context_id);
  std::vector<Action> plan = env.app().review_plan(symbols, ctx, seed);
  plan.push_back(core::encode_action(symbols, ActionKind::Terminate, "", ""));

  Trajectory traj;
  traj.task_id = "review:" + env.app().app_id() + ":" + context_id;
  core::Observation obs = env.reset(context_id, "", static_cast<int>(plan.size()) + 1);
  traj.env_state_digest_initial = env.state_digest();
  const auto initial_document = env.state().document_model;

  for (const Action& action : plan) {
    TrajectoryStep step;
    step.observation = obs;
    step.action = action;
    step.log_probs.assign(action.token_seq.size(), 0.0);  // scripted plan, probability 1
    auto result = env.step(action);
    if (!env.last_error().empty()) {
      throw ContractViolation("review plan emitted an invalid action: " + env.last_error());
    }
    if (env.state().document_model != initial_document) {
      throw ContractViolation("review plan mutated the document at step " +
                              std::to_string(step.observation.step_index));
    }
    obs = std::move(result.observation);
    traj.steps.push_back(std::move(step));
  }
  traj.terminated_by = core::TerminationCause::AgentTerminate;
  traj.env_state_digest_final = env.state_digest();
  if (traj.env_state_digest_final != traj.env_state_digest_initial) {
    throw ContractViolation("review did not return the environment to its initial state");
  }
  return traj;
}

}  // namespace guirl::simenv
