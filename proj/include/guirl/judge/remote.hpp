#pragma once

#include <map>
#include <string>

#include "guirl/judge/backend.hpp"

namespace guirl::judge {

// Text-in/text-out backend over HTTP: one POST per stage with a JSON envelope
// {"prompt": <rendered template>, "payload": <structured request>}. The stage
// prompt templates ship as data files; {{placeholders}} are substituted from
// the request. Credentials travel in the Authorization header when set.
class RemoteJudgeBackend : public JudgeBackend {
 public:
  struct Options {
    std::string base_url;         // e.g. http://127.0.0.1:8091
    std::string prompt_dir;       // directory holding the three stage templates
    std::string bearer_token;     // optional
    int timeout_ms = 10000;
  };

  explicit RemoteJudgeBackend(Options options);

  std::string id() const override { return "remote:" + options_.base_url; }
  std::vector<std::string> identify_key_points(const core::Task& task) override;
  std::vector<int> score_screenshots(const core::Task& task,
                                     const core::Trajectory& trajectory,
                                     const std::vector<std::string>& key_points) override;
  OutcomeReply judge_outcome(const OutcomeRequest& request) override;

 private:
  std::string call_stage(const std::string& stage, const std::string& prompt,
                         const nlohmann::ordered_json& payload);
  std::string render(const std::string& stage,
                     const std::map<std::string, std::string>& values) const;

  Options options_;
  std::map<std::string, std::string> templates_;  // stage -> template text
};

}  // namespace guirl::judge
