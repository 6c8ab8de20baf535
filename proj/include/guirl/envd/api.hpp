#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "guirl/core/error.hpp"
#include "guirl/core/types.hpp"

namespace guirl::envd {

// The environment no longer exists (deleted or torn down mid-call).
class EnvGone : public Error {
 public:
  using Error::Error;
};

// A concurrent call already owns this environment.
class BusyConflict : public Error {
 public:
  using Error::Error;
};

// The fleet cannot hold the requested batch. Carries the free capacity.
class CapacityExceeded : public Error {
 public:
  CapacityExceeded(const std::string& what, int available)
      : Error(what), available_(available) {}
  int available() const { return available_; }

 private:
  int available_;
};

enum class EnvStatus { Initializing, Ready, Busy, Failed, Restarting, Deleted };

std::string to_string(EnvStatus s);
EnvStatus env_status_from_string(const std::string& name);

struct EnvHandle {
  std::string env_id;
  std::string address;  // host:port for remote fleets, "local" channel otherwise
  std::string app_id;
  EnvStatus status = EnvStatus::Initializing;
  double last_heartbeat = 0.0;  // service-clock seconds
  int restart_count = 0;
};

nlohmann::ordered_json handle_to_json(const EnvHandle& h);
EnvHandle handle_from_json(const nlohmann::ordered_json& j);

struct BatchRequest {
  int count = 0;
  std::string app_id;
  std::vector<std::string> context_ids;  // length == count, or 1 to broadcast
  std::vector<std::uint64_t> seeds;      // optional; same broadcast rule
};

struct DeleteOutcome {
  std::string env_id;
  std::string result;  // "deleted", "not_found", "already_deleted"
};

struct ResetRequest {
  std::string context_id;  // empty: use the env's default context
  std::string task_text;
  int max_steps = 15;
};

struct ResetReply {
  core::Observation observation;
  std::string state_digest;
};

struct StepReply {
  core::Observation observation;
  bool terminated = false;
  std::string state_digest;
};

// Lifecycle + interaction surface shared by the in-process service and the
// HTTP client, so the orchestrator is transport-agnostic.
class EnvApi {
 public:
  virtual ~EnvApi() = default;

  virtual std::vector<EnvHandle> create_batch(const BatchRequest& request) = 0;
  virtual std::vector<DeleteOutcome> delete_batch(const std::vector<std::string>& ids) = 0;
  virtual EnvHandle health(const std::string& env_id) = 0;
  virtual ResetReply reset(const std::string& env_id, const ResetRequest& request) = 0;
  virtual StepReply step(const std::string& env_id, const core::Action& action) = 0;
  // Test-only window into the true state; gated by service config.
  virtual nlohmann::ordered_json oracle_state(const std::string& env_id) = 0;
};

}  // namespace guirl::envd
