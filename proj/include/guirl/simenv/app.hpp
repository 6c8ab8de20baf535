#pragma once

#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "guirl/core/symbols.hpp"
#include "guirl/core/types.hpp"
#include "guirl/simenv/state.hpp"

namespace guirl::simenv {

// Declarative description of an app's screens: which widgets can appear on
// each screen and which navigations they trigger. Bundled as JSON data files
// and cross-checked against app behavior in tests.
struct ScreenNode {
  std::string screen_id;
  bool content_bearing = false;
  std::vector<std::string> widget_ids;
  std::map<std::string, std::string> nav;  // widget id -> pushed screen, or "<pop>"
};

struct ScreenGraph {
  std::string app_id;
  std::string root_screen;
  std::vector<ScreenNode> screens;
};

nlohmann::ordered_json screen_graph_to_json(const ScreenGraph& g);

// One simulated desktop application: a deterministic transition system over
// EnvState plus a rendering function producing the widget tree.
class App {
 public:
  virtual ~App() = default;

  virtual std::string app_id() const = 0;
  virtual std::string title() const = 0;

  virtual EnvState initial_state(const Context& ctx) const = 0;
  virtual std::vector<core::WidgetRecord> render(const EnvState& state) const = 0;

  // Applies an action that passed the generic validity checks. Must be a pure
  // deterministic function of (state, action).
  virtual void apply(EnvState& state, const core::Action& action) const = 0;

  virtual ScreenGraph screen_graph() const = 0;

  // Scripted read-only traversal covering every content-bearing screen,
  // starting and ending at the initial state. The seed permutes section order.
  virtual std::vector<core::Action> review_plan(const core::SymbolTable& symbols,
                                                const Context& ctx,
                                                std::uint64_t seed) const = 0;

  // Closed vocabularies backing the action token space.
  virtual std::vector<std::string> actionable_widget_ids() const = 0;
  virtual std::vector<std::string> payload_vocabulary() const = 0;

  // Validates a context document seed for this app; throws on schema errors.
  virtual void validate_context(const Context& ctx) const = 0;
};

std::unique_ptr<App> make_slidedeck_app();
std::unique_ptr<App> make_mailroom_app();

class AppRegistry {
 public:
  // Registers the two bundled app families.
  static AppRegistry bundled();

  void add(std::unique_ptr<App> app);
  const App& get(const std::string& app_id) const;
  bool has(const std::string& app_id) const;
  std::vector<std::string> app_ids() const;

  // Union symbol table over every registered app (sorted, deduplicated).
  core::SymbolTable symbol_table() const;

 private:
  std::map<std::string, std::unique_ptr<App>> apps_;
};

// Deterministic digest over (screen_stack, rendered widgets, document_model).
std::string state_digest(const App& app, const EnvState& state);

// True when `kind` may target a widget of this kind.
bool action_targets_widget_kind(core::ActionKind action, core::WidgetKind widget);

}  // namespace guirl::simenv
