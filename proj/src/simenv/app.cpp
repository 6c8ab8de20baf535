#include "guirl/simenv/app.hpp"

#include <algorithm>

#include "guirl/core/digest.hpp"
#include "guirl/core/error.hpp"

namespace guirl::simenv {

using core::ActionKind;
using core::WidgetKind;

nlohmann::ordered_json screen_graph_to_json(const ScreenGraph& g) {
  nlohmann::ordered_json screens = nlohmann::ordered_json::array();
  for (const auto& s : g.screens) {
    nlohmann::ordered_json nav = nlohmann::ordered_json::object();
    for (const auto& [w, dst] : s.nav) nav[w] = dst;
    screens.push_back(nlohmann::ordered_json{{"screen_id", s.screen_id},
                                             {"content_bearing", s.content_bearing},
                                             {"widgets", s.widget_ids},
                                             {"nav", std::move(nav)}});
  }
  return nlohmann::ordered_json{
      {"app_id", g.app_id}, {"root_screen", g.root_screen}, {"screens", std::move(screens)}};
}

AppRegistry AppRegistry::bundled() {
  AppRegistry reg;
  reg.add(make_slidedeck_app());
  reg.add(make_mailroom_app());
  return reg;
}

void AppRegistry::add(std::unique_ptr<App> app) {
  std::string id = app->app_id();
  apps_[std::move(id)] = std::move(app);
}

const App& AppRegistry::get(const std::string& app_id) const {
  auto it = apps_.find(app_id);
  if (it == apps_.end()) throw ValidationError("unknown app: " + app_id);
  return *it->second;
}

bool AppRegistry::has(const std::string& app_id) const { return apps_.count(app_id) > 0; }

std::vector<std::string> AppRegistry::app_ids() const {
  std::vector<std::string> ids;
  for (const auto& [id, _] : apps_) ids.push_back(id);
  return ids;
}

core::SymbolTable AppRegistry::symbol_table() const {
  std::vector<std::string> widgets;
  std::vector<std::string> words;
  for (const auto& [_, app] : apps_) {
    auto w = app->actionable_widget_ids();
    widgets.insert(widgets.end(), w.begin(), w.end());
    auto p = app->payload_vocabulary();
    words.insert(words.end(), p.begin(), p.end());
  }
  return core::SymbolTable::build(std::move(widgets), std::move(words));
}

std::string state_digest(const App& app, const EnvState& state) {
  core::DigestWriter d;
  d.write(state.app_id);
  d.write_i64(static_cast<int>(state.screen_stack.size()));
  for (const auto& s : state.screen_stack) d.write(s);
  for (const auto& w : app.render(state)) {
    d.write(w.id);
    d.write(core::to_string(w.kind));
    d.write(w.text);
    d.write_bool(w.enabled);
    d.write(w.region);
  }
  d.write_i64(static_cast<int>(state.document_model.size()));
  for (const auto& [k, v] : state.document_model) {
    d.write(k);
    d.write(v);
  }
  return d.hex();
}

bool action_targets_widget_kind(ActionKind action, WidgetKind widget) {
  switch (action) {
    case ActionKind::Click:
      return widget == WidgetKind::Button || widget == WidgetKind::Menu ||
             widget == WidgetKind::ListItem;
    case ActionKind::Type:
      return widget == WidgetKind::TextField;
    case ActionKind::Scroll:
      return widget == WidgetKind::ListItem;
    case ActionKind::Terminate:
      return false;
  }
  return false;
}

}  // namespace guirl::simenv
