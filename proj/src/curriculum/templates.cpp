#include "guirl/curriculum/templates.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>

#include "guirl/core/error.hpp"

namespace guirl::curriculum {

using nlohmann::ordered_json;
using simenv::Predicate;

std::string substitute(const std::string& pattern,
                       const std::map<std::string, std::string>& params) {
  std::string out = pattern;
  for (const auto& [key, value] : params) {
    const std::string needle = "{" + key + "}";
    size_t pos = 0;
    while ((pos = out.find(needle, pos)) != std::string::npos) {
      out.replace(pos, needle.size(), value);
      pos += value.size();
    }
  }
  if (out.find('{') != std::string::npos) {
    throw ValidationError("unresolved placeholder in: " + out);
  }
  return out;
}

nlohmann::ordered_json blueprint_to_json(const TaskBlueprint& b) {
  ordered_json goals = ordered_json::array();
  for (const auto& g : b.sub_goals) {
    ordered_json params = ordered_json::object();
    for (const auto& [k, v] : g.params) params[k] = v;
    goals.push_back(ordered_json{{"tag", g.tag}, {"params", std::move(params)}});
  }
  return ordered_json{
      {"app_id", b.app_id}, {"context_id", b.context_id}, {"sub_goals", std::move(goals)}};
}

TaskBlueprint blueprint_from_json(const ordered_json& j) {
  TaskBlueprint b;
  b.app_id = j.at("app_id").get<std::string>();
  b.context_id = j.at("context_id").get<std::string>();
  for (const auto& gj : j.at("sub_goals")) {
    SkillInstance inst;
    inst.tag = gj.at("tag").get<std::string>();
    for (const auto& [k, v] : gj.at("params").items()) inst.params[k] = v.get<std::string>();
    b.sub_goals.push_back(std::move(inst));
  }
  return b;
}

nlohmann::ordered_json generated_task_to_json(const GeneratedTask& t) {
  return ordered_json{{"task", core::to_json(t.task)},
                      {"oracle", simenv::oracle_spec_to_json(t.oracle)},
                      {"blueprint", blueprint_to_json(t.blueprint)}};
}

GeneratedTask generated_task_from_json(const ordered_json& j) {
  GeneratedTask t;
  t.task = core::task_from_json(j.at("task"));
  t.oracle = simenv::oracle_spec_from_json(j.at("oracle"));
  t.blueprint = blueprint_from_json(j.at("blueprint"));
  return t;
}

void save_task_set(const TaskSet& tasks, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw ValidationError("cannot write task set: " + path);
  for (const auto& t : tasks) out << generated_task_to_json(t).dump() << "\n";
}

TaskSet load_task_set(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read task set: " + path);
  TaskSet tasks;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    tasks.push_back(generated_task_from_json(ordered_json::parse(line)));
  }
  return tasks;
}

TemplateLibrary TemplateLibrary::load_directory(const std::string& dir) {
  TemplateLibrary lib;
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& file : files) {
    std::ifstream in(file);
    ordered_json j;
    in >> j;
    const std::string app_id = j.at("app_id").get<std::string>();
    for (const auto& sj : j.at("skills")) {
      SkillTemplate t;
      t.app_id = app_id;
      t.tag = sj.at("tag").get<std::string>();
      t.composable = sj.value("composable", true);
      t.anchor_widget = sj.at("anchor").get<std::string>();
      t.goal_pattern = sj.at("goal_pattern").get<std::string>();
      for (const auto& [name, type] : sj.at("params").items()) {
        t.params.emplace_back(name, type.get<std::string>());
      }
      t.claims = sj.at("claims").get<std::vector<std::string>>();
      for (const auto& pj : sj.at("goal")) {
        t.goal_predicates.push_back(simenv::predicate_from_json(pj));
      }
      for (const auto& pj : sj.at("keypoints")) {
        t.keypoint_predicates.push_back(simenv::predicate_from_json(pj));
      }
      lib.by_app_[app_id].push_back(std::move(t));
    }
  }
  return lib;
}

const std::vector<SkillTemplate>& TemplateLibrary::for_app(const std::string& app_id) const {
  auto it = by_app_.find(app_id);
  if (it == by_app_.end()) throw ValidationError("no templates for app: " + app_id);
  return it->second;
}

const SkillTemplate& TemplateLibrary::get(const std::string& app_id,
                                          const std::string& tag) const {
  for (const auto& t : for_app(app_id)) {
    if (t.tag == tag) return t;
  }
  throw ValidationError("no template " + tag + " for app " + app_id);
}

TaskFactory::TaskFactory(const TemplateLibrary& library, const simenv::AppRegistry& apps,
                         const simenv::ContextRegistry& contexts)
    : library_(library), apps_(apps), contexts_(contexts) {}

namespace {

// Claim conflicts use dot-boundary prefixes: "draft" blocks "draft.body".
bool claims_conflict(const std::string& a, const std::string& b) {
  if (a == b) return true;
  const auto& shorter = a.size() < b.size() ? a : b;
  const auto& longer = a.size() < b.size() ? b : a;
  return longer.rfind(shorter, 0) == 0 && longer[shorter.size()] == '.';
}

std::vector<std::string> unread_messages(const simenv::Context& ctx) {
  std::vector<std::string> out;  // "folder/index"
  for (const char* f : {"inbox", "archive", "sent"}) {
    const auto it = ctx.document_seed.find(std::string(f) + ".count");
    if (it == ctx.document_seed.end()) continue;
    const int k = std::stoi(it->second);
    for (int m = 1; m <= k; ++m) {
      const auto r = ctx.document_seed.find(std::string(f) + ".msg" + std::to_string(m) +
                                            ".read");
      if (r != ctx.document_seed.end() && r->second != "true") {
        out.push_back(std::string(f) + "/" + std::to_string(m));
      }
    }
  }
  return out;
}

}  // namespace

std::optional<std::map<std::string, std::string>> TaskFactory::draw_params(
    const SkillTemplate& tmpl, const simenv::Context& ctx, std::mt19937_64& rng) const {
  const auto vocab = apps_.get(tmpl.app_id).payload_vocabulary();
  std::map<std::string, std::string> params;
  auto pick_word = [&] { return vocab[rng() % vocab.size()]; };

  for (const auto& [name, type] : tmpl.params) {
    if (type == "slide_index") {
      const int n = std::stoi(ctx.document_seed.at("slide_count"));
      params[name] = std::to_string(1 + static_cast<int>(rng() % n));
    } else if (type == "vocab_word") {
      params[name] = pick_word();
    } else if (type == "vocab_value") {
      std::string v = pick_word();
      if (rng() % 2 == 0) v += " " + pick_word();
      params[name] = v;
    } else if (type == "recipient") {
      static const std::vector<std::string> names = {"bob", "carol", "dave", "erin", "team"};
      params[name] = names[rng() % names.size()];
    } else if (type == "unread_message") {
      const auto candidates = unread_messages(ctx);
      if (candidates.empty()) return std::nullopt;
      const auto& pick = candidates[rng() % candidates.size()];
      const auto slash = pick.find('/');
      params["folder"] = pick.substr(0, slash);
      params[name] = pick.substr(slash + 1);
    } else if (type == "inbox_message") {
      const int k = std::stoi(ctx.document_seed.at("inbox.count"));
      if (k == 0) return std::nullopt;
      params["folder"] = "inbox";
      params[name] = std::to_string(1 + static_cast<int>(rng() % k));
    } else if (type == "msg_subject") {
      // Subject of the already-drawn {folder}/{msg} pair.
      const std::string field =
          params.at("folder") + ".msg" + params.at("msg") + ".subject";
      params[name] = ctx.document_seed.at(field);
    } else if (type == "archive_slot") {
      params[name] =
          std::to_string(std::stoi(ctx.document_seed.at("archive.count")) + 1);
    } else if (type == "folder_count_minus_one") {
      params[name] = std::to_string(
          std::stoi(ctx.document_seed.at(params.at("folder") + ".count")) - 1);
    } else if (type == "sent_slot") {
      params[name] = std::to_string(std::stoi(ctx.document_seed.at("sent.count")) + 1);
    } else if (type == "slide_count_plus_one") {
      params[name] = std::to_string(std::stoi(ctx.document_seed.at("slide_count")) + 1);
    } else if (type == "folder") {
      static const std::vector<std::string> folders = {"inbox", "archive", "sent"};
      params[name] = folders[rng() % folders.size()];
    } else {
      throw ValidationError("unknown parameter domain: " + type);
    }
  }
  return params;
}

std::vector<std::string> TaskFactory::instance_claims(const SkillInstance& inst,
                                                      const std::string& app_id) const {
  const SkillTemplate& tmpl = library_.get(app_id, inst.tag);
  std::vector<std::string> out;
  for (const auto& c : tmpl.claims) out.push_back(substitute(c, inst.params));
  return out;
}

bool TaskFactory::vacuous_in_context(const TaskBlueprint& blueprint) const {
  const auto& app = apps_.get(blueprint.app_id);
  const auto state = app.initial_state(contexts_.get(blueprint.context_id));
  for (const auto& inst : blueprint.sub_goals) {
    const SkillTemplate& tmpl = library_.get(blueprint.app_id, inst.tag);
    for (const auto& pred : tmpl.goal_predicates) {
      Predicate p = pred;
      p.key = substitute(p.key, inst.params);
      p.value = substitute(p.value, inst.params);
      p.extra = substitute(p.extra, inst.params);
      if (p.is_action_predicate()) return false;  // action goals are never vacuous
      if (!p.eval_state(state)) return false;
    }
  }
  return true;
}

std::optional<SkillInstance> TaskFactory::draw_instance(
    const std::string& app_id, const std::string& context_id, std::mt19937_64& rng,
    bool composable_only, const std::vector<std::string>* visited_widgets,
    std::vector<std::string>& claimed) const {
  const auto& templates = library_.for_app(app_id);
  const auto& ctx = contexts_.get(context_id);

  for (int attempt = 0; attempt < 64; ++attempt) {
    const SkillTemplate& tmpl = templates[rng() % templates.size()];
    if (composable_only && !tmpl.composable) continue;
    if (visited_widgets != nullptr &&
        std::find(visited_widgets->begin(), visited_widgets->end(), tmpl.anchor_widget) ==
            visited_widgets->end()) {
      continue;
    }
    auto params = draw_params(tmpl, ctx, rng);
    if (!params) continue;

    SkillInstance inst{tmpl.tag, std::move(*params)};
    bool conflict = false;
    const auto claims = instance_claims(inst, app_id);
    for (const auto& c : claims) {
      for (const auto& held : claimed) conflict = conflict || claims_conflict(c, held);
    }
    if (conflict) continue;

    TaskBlueprint probe{app_id, context_id, {inst}};
    if (vacuous_in_context(probe)) continue;

    claimed.insert(claimed.end(), claims.begin(), claims.end());
    return inst;
  }
  return std::nullopt;
}

GeneratedTask TaskFactory::materialize(
    const TaskBlueprint& blueprint, const std::string& task_id, core::TaskOrigin origin,
    std::vector<std::pair<int, std::string>> lineage) const {
  if (blueprint.sub_goals.empty()) throw ValidationError("blueprint has no sub-goals");

  GeneratedTask out;
  out.blueprint = blueprint;
  out.task.task_id = task_id;
  out.task.origin = origin;
  out.task.context_id = blueprint.context_id;
  out.task.difficulty_lineage = std::move(lineage);
  out.oracle.task_id = task_id;
  out.oracle.app_id = blueprint.app_id;
  out.oracle.context_id = blueprint.context_id;

  std::set<std::string> tags;
  std::string text;
  for (const auto& inst : blueprint.sub_goals) {
    const SkillTemplate& tmpl = library_.get(blueprint.app_id, inst.tag);
    tags.insert(tmpl.tag);
    std::string clause = substitute(tmpl.goal_pattern, inst.params);
    if (text.empty()) {
      clause[0] = static_cast<char>(std::toupper(clause[0]));
      text = clause;
    } else {
      text += ". Then " + clause;
    }
    for (const auto& pred : tmpl.goal_predicates) {
      Predicate p = pred;
      p.key = substitute(p.key, inst.params);
      p.value = substitute(p.value, inst.params);
      p.extra = substitute(p.extra, inst.params);
      out.oracle.goal_predicates.push_back(std::move(p));
    }
    for (const auto& pred : tmpl.keypoint_predicates) {
      Predicate p = pred;
      p.key = substitute(p.key, inst.params);
      p.value = substitute(p.value, inst.params);
      p.extra = substitute(p.extra, inst.params);
      out.oracle.keypoint_predicates.push_back(std::move(p));
    }
  }
  out.task.goal_text = text + ".";
  out.task.skill_tags.assign(tags.begin(), tags.end());
  core::validate_task(out.task);
  return out;
}

}  // namespace guirl::curriculum
