#pragma once

#include <optional>
#include <string>

#include "guirl/core/types.hpp"
#include "guirl/simenv/app.hpp"
#include "guirl/simenv/state.hpp"

namespace guirl::simenv {

// One exclusive-ownership environment instance. Reset initializes the state
// from a context; step applies one action. Invalid actions are absorbed: the
// state is left unchanged and the re-emitted observation carries an error
// banner widget (region "chrome").
class SimEnv {
 public:
  SimEnv(const App& app, const ContextRegistry& contexts);

  core::Observation reset(const std::string& context_id, const std::string& task_text,
                          int max_steps);

  struct StepResult {
    core::Observation observation;
    bool terminated = false;
  };
  StepResult step(const core::Action& action);

  std::string state_digest() const;
  const EnvState& state() const { return state_; }
  const App& app() const { return app_; }
  const ContextRegistry& contexts() const { return contexts_; }
  bool in_episode() const { return in_episode_; }
  int max_steps() const { return max_steps_; }

  // Returns why the most recent action was absorbed, or empty.
  const std::string& last_error() const { return last_error_; }

  // Checks an action against the current screen without applying it.
  // Returns an empty string when valid, else the rejection reason.
  std::string check_action(const core::Action& action) const;

 private:
  core::Observation observe() const;

  const App& app_;
  const ContextRegistry& contexts_;
  EnvState state_;
  std::string task_text_;
  int max_steps_ = 0;
  bool in_episode_ = false;
  std::string last_error_;
};

}  // namespace guirl::simenv
