#include "guirl/simenv/state.hpp"

#include <filesystem>
#include <fstream>

#include "guirl/core/error.hpp"

namespace guirl::simenv {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

const std::string& EnvState::screen() const {
  if (screen_stack.empty()) throw ValidationError("environment has no active screen");
  return screen_stack.back();
}

int EnvState::doc_int(const std::string& field) const {
  const std::string v = doc(field);
  return v.empty() ? 0 : std::stoi(v);
}

int EnvState::view_int(const std::string& var) const {
  const std::string v = view(var);
  return v.empty() ? 0 : std::stoi(v);
}

ordered_json context_to_json(const Context& ctx) {
  ordered_json doc = ordered_json::object();
  for (const auto& [k, v] : ctx.document_seed) doc[k] = v;
  return ordered_json{{"context_id", ctx.context_id},
                      {"app_id", ctx.app_id},
                      {"document", std::move(doc)},
                      {"provenance", ctx.provenance == Context::Provenance::Bundled
                                         ? "bundled"
                                         : "ingested_file"}};
}

Context context_from_json(const ordered_json& j) {
  Context ctx;
  ctx.context_id = j.at("context_id").get<std::string>();
  ctx.app_id = j.at("app_id").get<std::string>();
  if (!j.at("document").is_object()) throw ValidationError("context document must be an object");
  for (const auto& [k, v] : j.at("document").items()) {
    if (!v.is_string()) throw ValidationError("context document values must be strings");
    ctx.document_seed[k] = v.get<std::string>();
  }
  const std::string prov = j.value("provenance", "bundled");
  ctx.provenance = prov == "ingested_file" ? Context::Provenance::IngestedFile
                                           : Context::Provenance::Bundled;
  return ctx;
}

void ContextRegistry::add(Context ctx) {
  if (ctx.context_id.empty()) throw ValidationError("context_id empty");
  contexts_[ctx.context_id] = std::move(ctx);
}

Context ContextRegistry::ingest_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open context file: " + path);
  ordered_json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ValidationError("context file is not valid JSON: " + path + ": " + e.what());
  }
  Context ctx = context_from_json(j);
  ctx.provenance = Context::Provenance::IngestedFile;
  add(ctx);
  return ctx;
}

void ContextRegistry::load_directory(const std::string& dir) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    std::ifstream in(f);
    ordered_json j;
    in >> j;
    add(context_from_json(j));
  }
}

const Context& ContextRegistry::get(const std::string& context_id) const {
  auto it = contexts_.find(context_id);
  if (it == contexts_.end()) throw ValidationError("unknown context: " + context_id);
  return it->second;
}

bool ContextRegistry::has(const std::string& context_id) const {
  return contexts_.count(context_id) > 0;
}

std::vector<std::string> ContextRegistry::ids_for_app(const std::string& app_id) const {
  std::vector<std::string> ids;
  for (const auto& [id, ctx] : contexts_) {
    if (ctx.app_id == app_id) ids.push_back(id);
  }
  return ids;
}

}  // namespace guirl::simenv
