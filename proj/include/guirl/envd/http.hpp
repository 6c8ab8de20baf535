#pragma once

#include <memory>
#include <string>

#include "guirl/envd/api.hpp"

namespace guirl::envd {

class EnvService;

// HTTP/JSON front end over an EnvService:
//   POST   /envs/batch              create a batch
//   DELETE /envs/batch              delete by id list
//   GET    /envs/{id}/health        handle snapshot
//   POST   /envs/{id}/reset         {context_id, task_text, max_steps}
//   POST   /envs/{id}/step          {action}
//   GET    /envs/{id}/oracle_state  (config-gated)
// Errors map to {"error": code, "message": ...} with 400/404/409/429/503.
class HttpEnvServer {
 public:
  // Binds to listen_address ("host:port"); port 0 picks a free port.
  HttpEnvServer(EnvService& service, const std::string& listen_address);
  ~HttpEnvServer();

  int port() const { return port_; }
  std::string base_url() const;
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  int port_ = 0;
};

// EnvApi over the wire; byte-identical behavior to the local service.
class HttpEnvClient : public EnvApi {
 public:
  explicit HttpEnvClient(std::string base_url, int timeout_ms = 30000);

  std::vector<EnvHandle> create_batch(const BatchRequest& request) override;
  std::vector<DeleteOutcome> delete_batch(const std::vector<std::string>& ids) override;
  EnvHandle health(const std::string& env_id) override;
  ResetReply reset(const std::string& env_id, const ResetRequest& request) override;
  StepReply step(const std::string& env_id, const core::Action& action) override;
  nlohmann::ordered_json oracle_state(const std::string& env_id) override;

 private:
  nlohmann::ordered_json request(const std::string& method, const std::string& path,
                                 const nlohmann::ordered_json& body) const;

  std::string base_url_;
  int timeout_ms_;
};

}  // namespace guirl::envd
