#pragma once

#include <cstdint>
#include <map>
#include <string>

#include <nlohmann/json.hpp>

namespace guirl::simenv {

// Full (hidden) environment state. Observations render a view of this; the
// state digest covers screen stack, rendered widgets and document model, so
// transient view variables only matter insofar as they are visible.
struct EnvState {
  std::string app_id;
  std::vector<std::string> screen_stack;               // bottom .. top
  std::map<std::string, std::string> document_model;   // the user-visible artifact
  std::map<std::string, std::string> ui;               // selection / paging vars
  std::uint64_t rng_seed = 0;
  int step_count = 0;

  const std::string& screen() const;
  std::string doc(const std::string& field) const {
    auto it = document_model.find(field);
    return it == document_model.end() ? std::string() : it->second;
  }
  std::string view(const std::string& var) const {
    auto it = ui.find(var);
    return it == ui.end() ? std::string() : it->second;
  }
  int doc_int(const std::string& field) const;
  int view_int(const std::string& var) const;

  bool operator==(const EnvState&) const = default;
};

// A user-created artifact the environment is initialized with.
struct Context {
  enum class Provenance { Bundled, IngestedFile };

  std::string context_id;
  std::string app_id;
  std::map<std::string, std::string> document_seed;
  Provenance provenance = Provenance::Bundled;
};

nlohmann::ordered_json context_to_json(const Context& ctx);
Context context_from_json(const nlohmann::ordered_json& j);

class ContextRegistry {
 public:
  void add(Context ctx);
  // Reads one context JSON document; validates against the context schema.
  Context ingest_file(const std::string& path);
  void load_directory(const std::string& dir);

  const Context& get(const std::string& context_id) const;
  bool has(const std::string& context_id) const;
  std::vector<std::string> ids_for_app(const std::string& app_id) const;

 private:
  std::map<std::string, Context> contexts_;
};

}  // namespace guirl::simenv
