#pragma once

#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "guirl/core/types.hpp"
#include "guirl/simenv/app.hpp"
#include "guirl/simenv/oracle.hpp"

namespace guirl::curriculum {

// One parameterized goal/predicate pattern; {param} placeholders are
// substituted at instantiation. Loaded from the per-app template data files.
struct SkillTemplate {
  std::string tag;
  std::string app_id;
  bool composable = true;       // may appear inside multi-goal tasks
  std::string anchor_widget;    // the widget this skill grounds on
  std::string goal_pattern;     // natural-language clause with {param} holes
  std::vector<std::pair<std::string, std::string>> params;  // name -> domain type
  std::vector<std::string> claims;  // document fields this skill owns
  std::vector<simenv::Predicate> goal_predicates;      // with placeholders
  std::vector<simenv::Predicate> keypoint_predicates;  // with placeholders
};

struct SkillInstance {
  std::string tag;
  std::map<std::string, std::string> params;

  bool operator==(const SkillInstance&) const = default;
};

struct TaskBlueprint {
  std::string app_id;
  std::string context_id;
  std::vector<SkillInstance> sub_goals;

  bool operator==(const TaskBlueprint&) const = default;
};

struct GeneratedTask {
  core::Task task;
  simenv::TaskOracleSpec oracle;
  TaskBlueprint blueprint;
};

using TaskSet = std::vector<GeneratedTask>;

nlohmann::ordered_json blueprint_to_json(const TaskBlueprint& b);
TaskBlueprint blueprint_from_json(const nlohmann::ordered_json& j);

nlohmann::ordered_json generated_task_to_json(const GeneratedTask& t);
GeneratedTask generated_task_from_json(const nlohmann::ordered_json& j);

void save_task_set(const TaskSet& tasks, const std::string& path);  // JSONL
TaskSet load_task_set(const std::string& path);

class TemplateLibrary {
 public:
  static TemplateLibrary load_directory(const std::string& dir);

  const std::vector<SkillTemplate>& for_app(const std::string& app_id) const;
  const SkillTemplate& get(const std::string& app_id, const std::string& tag) const;

 private:
  std::map<std::string, std::vector<SkillTemplate>> by_app_;
};

// Instantiation and materialization of blueprints into tasks + oracle specs.
// Pure functions of (library, apps, contexts, rng state).
class TaskFactory {
 public:
  TaskFactory(const TemplateLibrary& library, const simenv::AppRegistry& apps,
              const simenv::ContextRegistry& contexts);

  // Draws one skill instance whose parameters are valid in the context, whose
  // claims do not collide with `claimed`, and whose goal is not already true
  // in the context's initial state. Honors a widget grounding filter when
  // `visited_widgets` is non-null (iteration-0 rule). Returns nullopt when no
  // template fits within the retry budget.
  std::optional<SkillInstance> draw_instance(const std::string& app_id,
                                             const std::string& context_id,
                                             std::mt19937_64& rng, bool composable_only,
                                             const std::vector<std::string>* visited_widgets,
                                             std::vector<std::string>& claimed) const;

  // Substitutes parameters and assembles the goal text and oracle spec.
  GeneratedTask materialize(const TaskBlueprint& blueprint, const std::string& task_id,
                            core::TaskOrigin origin,
                            std::vector<std::pair<int, std::string>> lineage) const;

  // Claims of one instance with parameters substituted.
  std::vector<std::string> instance_claims(const SkillInstance& inst,
                                           const std::string& app_id) const;

  // True when every goal predicate already holds in the context initial state.
  bool vacuous_in_context(const TaskBlueprint& blueprint) const;

  const TemplateLibrary& library() const { return library_; }
  const simenv::ContextRegistry& contexts() const { return contexts_; }
  const simenv::AppRegistry& apps() const { return apps_; }

 private:
  std::optional<std::map<std::string, std::string>> draw_params(
      const SkillTemplate& tmpl, const simenv::Context& ctx, std::mt19937_64& rng) const;

  const TemplateLibrary& library_;
  const simenv::AppRegistry& apps_;
  const simenv::ContextRegistry& contexts_;
};

// Placeholder substitution helper, exposed for the template tests.
std::string substitute(const std::string& pattern,
                       const std::map<std::string, std::string>& params);

}  // namespace guirl::curriculum
