#pragma once

#include <atomic>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <thread>

#include "guirl/envd/api.hpp"
#include "guirl/simenv/env.hpp"

namespace guirl::envd {

struct ServiceConfig {
  int fleet_cap = 256;
  double heartbeat_interval_s = 5.0;  // H
  int miss_threshold = 2;             // M: failed when silent for more than M*H
  int restart_attempts = 3;           // R
  double init_timeout_s = 30.0;
  bool expose_oracle_state = false;
  std::string listen_address = "127.0.0.1:8089";
};

// Reads a JSON config file (any subset of fields), then applies environment
// variable overrides GUIRL_ENVD_{FLEET_CAP, HEARTBEAT_S, MISS_THRESHOLD,
// RESTART_ATTEMPTS, INIT_TIMEOUT_S, ORACLE_STATE, LISTEN}.
ServiceConfig load_service_config(const std::string& path);
ServiceConfig apply_env_overrides(ServiceConfig cfg);

class Clock {
 public:
  virtual ~Clock() = default;
  virtual double now() const = 0;
};

class SystemClock : public Clock {
 public:
  double now() const override;
};

class ManualClock : public Clock {
 public:
  double now() const override { return t_; }
  void advance(double dt) { t_ += dt; }
  void set(double t) { t_ = t; }

 private:
  double t_ = 0.0;
};

// Fault-injection knobs used by tests and the preload benchmark.
struct TestHooks {
  std::atomic<int> init_latency_ms{0};   // every env init sleeps this long
  std::atomic<int> fail_next_inits{0};   // next N init attempts fail
  std::atomic<int> step_delay_ms{0};     // widen the busy-conflict race window
};

struct MonitorAction {
  std::string env_id;
  std::string action;  // "restart_initiated", "restart_exhausted"
};

// In-process environment fleet: batched lifecycle, per-env serialization,
// pull-based liveness probes with automatic restart.
class EnvService : public EnvApi {
 public:
  EnvService(const simenv::AppRegistry& apps, const simenv::ContextRegistry& contexts,
             ServiceConfig config, const Clock& clock);
  ~EnvService() override;

  std::vector<EnvHandle> create_batch(const BatchRequest& request) override;
  std::vector<DeleteOutcome> delete_batch(const std::vector<std::string>& ids) override;
  EnvHandle health(const std::string& env_id) override;
  ResetReply reset(const std::string& env_id, const ResetRequest& request) override;
  StepReply step(const std::string& env_id, const core::Action& action) override;
  nlohmann::ordered_json oracle_state(const std::string& env_id) override;

  // One liveness sweep at time `now`: probes every live env, marks the silent
  // ones failed and initiates restarts. Returns the actions taken.
  std::vector<MonitorAction> health_monitor_tick(double now);

  // Kills the instance: probes and calls fail until the monitor restarts it.
  void kill(const std::string& env_id);

  // Invoked once when an env exhausts its restart budget.
  void set_failure_listener(std::function<void(const std::string&)> listener);

  TestHooks& hooks() { return hooks_; }
  const ServiceConfig& config() const { return config_; }
  int active_count() const;

 private:
  struct Entry {
    EnvHandle handle;
    std::unique_ptr<simenv::SimEnv> sim;
    std::string default_context;
    std::uint64_t seed = 0;
    bool alive = true;
    std::mutex call_mutex;   // serializes reset/step on this env
    std::mutex state_mutex;  // guards handle/status mutations
  };

  std::shared_ptr<Entry> find(const std::string& env_id) const;
  void init_entry(Entry& entry);  // honors latency/failure hooks
  bool restart_entry(Entry& entry);

  const simenv::AppRegistry& apps_;
  const simenv::ContextRegistry& contexts_;
  ServiceConfig config_;
  const Clock& clock_;
  TestHooks hooks_;

  mutable std::mutex fleet_mutex_;
  std::map<std::string, std::shared_ptr<Entry>> fleet_;
  std::uint64_t next_id_ = 1;
  std::function<void(const std::string&)> failure_listener_;
};

}  // namespace guirl::envd
