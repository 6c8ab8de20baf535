#include "guirl/envd/service.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>

namespace guirl::envd {

std::string to_string(EnvStatus s) {
  switch (s) {
    case EnvStatus::Initializing: return "initializing";
    case EnvStatus::Ready: return "ready";
    case EnvStatus::Busy: return "busy";
    case EnvStatus::Failed: return "failed";
    case EnvStatus::Restarting: return "restarting";
    case EnvStatus::Deleted: return "deleted";
  }
  throw ValidationError("unknown EnvStatus");
}

EnvStatus env_status_from_string(const std::string& name) {
  if (name == "initializing") return EnvStatus::Initializing;
  if (name == "ready") return EnvStatus::Ready;
  if (name == "busy") return EnvStatus::Busy;
  if (name == "failed") return EnvStatus::Failed;
  if (name == "restarting") return EnvStatus::Restarting;
  if (name == "deleted") return EnvStatus::Deleted;
  throw ValidationError("unknown env status: " + name);
}

nlohmann::ordered_json handle_to_json(const EnvHandle& h) {
  return nlohmann::ordered_json{{"env_id", h.env_id},
                                {"address", h.address},
                                {"app_id", h.app_id},
                                {"status", to_string(h.status)},
                                {"last_heartbeat", h.last_heartbeat},
                                {"restart_count", h.restart_count}};
}

EnvHandle handle_from_json(const nlohmann::ordered_json& j) {
  EnvHandle h;
  h.env_id = j.at("env_id").get<std::string>();
  h.address = j.at("address").get<std::string>();
  h.app_id = j.at("app_id").get<std::string>();
  h.status = env_status_from_string(j.at("status").get<std::string>());
  h.last_heartbeat = j.at("last_heartbeat").get<double>();
  h.restart_count = j.at("restart_count").get<int>();
  return h;
}

ServiceConfig load_service_config(const std::string& path) {
  ServiceConfig cfg;
  if (!path.empty()) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot read service config: " + path);
    nlohmann::ordered_json j;
    in >> j;
    cfg.fleet_cap = j.value("fleet_cap", cfg.fleet_cap);
    cfg.heartbeat_interval_s = j.value("heartbeat_interval_s", cfg.heartbeat_interval_s);
    cfg.miss_threshold = j.value("miss_threshold", cfg.miss_threshold);
    cfg.restart_attempts = j.value("restart_attempts", cfg.restart_attempts);
    cfg.init_timeout_s = j.value("init_timeout_s", cfg.init_timeout_s);
    cfg.expose_oracle_state = j.value("expose_oracle_state", cfg.expose_oracle_state);
    cfg.listen_address = j.value("listen_address", cfg.listen_address);
  }
  return apply_env_overrides(cfg);
}

ServiceConfig apply_env_overrides(ServiceConfig cfg) {
  auto get = [](const char* name) -> std::optional<std::string> {
    const char* v = std::getenv(name);
    if (v == nullptr || *v == '\0') return std::nullopt;
    return std::string(v);
  };
  if (auto v = get("GUIRL_ENVD_FLEET_CAP")) cfg.fleet_cap = std::stoi(*v);
  if (auto v = get("GUIRL_ENVD_HEARTBEAT_S")) cfg.heartbeat_interval_s = std::stod(*v);
  if (auto v = get("GUIRL_ENVD_MISS_THRESHOLD")) cfg.miss_threshold = std::stoi(*v);
  if (auto v = get("GUIRL_ENVD_RESTART_ATTEMPTS")) cfg.restart_attempts = std::stoi(*v);
  if (auto v = get("GUIRL_ENVD_INIT_TIMEOUT_S")) cfg.init_timeout_s = std::stod(*v);
  if (auto v = get("GUIRL_ENVD_ORACLE_STATE")) cfg.expose_oracle_state = *v == "1";
  if (auto v = get("GUIRL_ENVD_LISTEN")) cfg.listen_address = *v;
  return cfg;
}

double SystemClock::now() const {
  return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

EnvService::EnvService(const simenv::AppRegistry& apps,
                       const simenv::ContextRegistry& contexts, ServiceConfig config,
                       const Clock& clock)
    : apps_(apps), contexts_(contexts), config_(std::move(config)), clock_(clock) {}

EnvService::~EnvService() = default;

int EnvService::active_count() const {
  std::lock_guard lock(fleet_mutex_);
  int n = 0;
  for (const auto& [_, e] : fleet_) {
    std::lock_guard s(e->state_mutex);
    if (e->handle.status != EnvStatus::Deleted) ++n;
  }
  return n;
}

namespace {

bool consume_token(std::atomic<int>& counter) {
  int cur = counter.load();
  while (cur > 0) {
    if (counter.compare_exchange_weak(cur, cur - 1)) return true;
  }
  return false;
}

}  // namespace

void EnvService::init_entry(Entry& entry) {
  const int latency = hooks_.init_latency_ms.load();
  if (latency > 0) std::this_thread::sleep_for(std::chrono::milliseconds(latency));
  if (consume_token(hooks_.fail_next_inits)) {
    std::lock_guard s(entry.state_mutex);
    entry.handle.status = EnvStatus::Failed;
    return;
  }
  auto sim = std::make_unique<simenv::SimEnv>(apps_.get(entry.handle.app_id), contexts_);
  std::lock_guard s(entry.state_mutex);
  entry.sim = std::move(sim);
  entry.alive = true;
  entry.handle.status = EnvStatus::Ready;
  entry.handle.last_heartbeat = clock_.now();
}

std::vector<EnvHandle> EnvService::create_batch(const BatchRequest& request) {
  if (request.count < 1) throw ValidationError("batch count must be >= 1");
  if (!apps_.has(request.app_id)) throw ValidationError("unknown app: " + request.app_id);
  if (!request.context_ids.empty() && request.context_ids.size() != 1 &&
      static_cast<int>(request.context_ids.size()) != request.count) {
    throw ValidationError("context_ids must have length 1 or count");
  }
  for (const auto& c : request.context_ids) contexts_.get(c);  // existence check

  std::vector<std::shared_ptr<Entry>> created;
  {
    std::lock_guard lock(fleet_mutex_);
    int active = 0;
    for (const auto& [_, e] : fleet_) {
      std::lock_guard s(e->state_mutex);
      if (e->handle.status != EnvStatus::Deleted) ++active;
    }
    if (active + request.count > config_.fleet_cap) {
      throw CapacityExceeded("fleet capacity exceeded (" + std::to_string(active) + "/" +
                                 std::to_string(config_.fleet_cap) + " in use)",
                             config_.fleet_cap - active);
    }
    for (int i = 0; i < request.count; ++i) {
      auto entry = std::make_shared<Entry>();
      entry->handle.env_id = "env-" + std::to_string(next_id_++);
      entry->handle.address = "local:" + entry->handle.env_id;
      entry->handle.app_id = request.app_id;
      entry->handle.status = EnvStatus::Initializing;
      if (!request.context_ids.empty()) {
        entry->default_context = request.context_ids.size() == 1
                                     ? request.context_ids[0]
                                     : request.context_ids[static_cast<size_t>(i)];
      }
      if (!request.seeds.empty()) {
        entry->seed = request.seeds.size() == 1 ? request.seeds[0]
                                                : request.seeds[static_cast<size_t>(i)];
      }
      fleet_[entry->handle.env_id] = entry;
      created.push_back(std::move(entry));
    }
  }

  // Initialize in parallel; each handle independently reaches ready or failed.
  std::vector<std::thread> workers;
  workers.reserve(created.size());
  for (auto& entry : created) {
    workers.emplace_back([this, entry] { init_entry(*entry); });
  }
  for (auto& w : workers) w.join();

  std::vector<EnvHandle> handles;
  for (const auto& entry : created) {
    std::lock_guard s(entry->state_mutex);
    handles.push_back(entry->handle);
  }
  return handles;
}

std::vector<DeleteOutcome> EnvService::delete_batch(const std::vector<std::string>& ids) {
  std::vector<DeleteOutcome> outcomes;
  for (const auto& id : ids) {
    std::shared_ptr<Entry> entry;
    {
      std::lock_guard lock(fleet_mutex_);
      auto it = fleet_.find(id);
      if (it != fleet_.end()) entry = it->second;
    }
    if (!entry) {
      outcomes.push_back({id, "not_found"});
      continue;
    }
    bool deleted = false;
    {
      std::lock_guard s(entry->state_mutex);
      if (entry->handle.status == EnvStatus::Deleted) {
        outcomes.push_back({id, "already_deleted"});
      } else {
        entry->handle.status = EnvStatus::Deleted;
        outcomes.push_back({id, "deleted"});
        deleted = true;
      }
    }
    if (deleted) {
      // Tear down the instance unless a call is in flight; in that case the
      // in-flight call observes the deletion and tears it down itself.
      std::unique_lock call(entry->call_mutex, std::try_to_lock);
      if (call.owns_lock()) {
        std::lock_guard s(entry->state_mutex);
        entry->sim.reset();
      }
    }
  }
  return outcomes;
}

std::shared_ptr<EnvService::Entry> EnvService::find(const std::string& env_id) const {
  std::lock_guard lock(fleet_mutex_);
  auto it = fleet_.find(env_id);
  if (it == fleet_.end()) throw EnvGone("no such environment: " + env_id);
  return it->second;
}

EnvHandle EnvService::health(const std::string& env_id) {
  auto entry = find(env_id);
  std::lock_guard s(entry->state_mutex);
  return entry->handle;
}

ResetReply EnvService::reset(const std::string& env_id, const ResetRequest& request) {
  auto entry = find(env_id);
  std::unique_lock call(entry->call_mutex, std::try_to_lock);
  if (!call.owns_lock()) throw BusyConflict("environment busy: " + env_id);

  {
    std::lock_guard s(entry->state_mutex);
    if (entry->handle.status == EnvStatus::Deleted) throw EnvGone("deleted: " + env_id);
    if (!entry->alive) throw TransportError("environment not responding: " + env_id);
    if (entry->handle.status != EnvStatus::Ready) {
      throw BusyConflict("reset requires a ready environment, status is " +
                         to_string(entry->handle.status));
    }
    entry->handle.status = EnvStatus::Busy;
  }

  const std::string ctx =
      request.context_id.empty() ? entry->default_context : request.context_id;
  ResetReply reply;
  try {
    reply.observation = entry->sim->reset(ctx, request.task_text, request.max_steps);
    reply.state_digest = entry->sim->state_digest();
  } catch (...) {
    std::lock_guard s(entry->state_mutex);
    if (entry->handle.status == EnvStatus::Busy) {
      entry->handle.status = EnvStatus::Ready;
    }
    throw;
  }
  std::lock_guard s(entry->state_mutex);
  if (entry->handle.status == EnvStatus::Deleted) {
    entry->sim.reset();
    throw EnvGone("deleted during reset: " + env_id);
  }
  entry->handle.last_heartbeat = clock_.now();
  return reply;
}

StepReply EnvService::step(const std::string& env_id, const core::Action& action) {
  auto entry = find(env_id);
  std::unique_lock call(entry->call_mutex, std::try_to_lock);
  if (!call.owns_lock()) throw BusyConflict("environment busy: " + env_id);

  {
    std::lock_guard s(entry->state_mutex);
    if (entry->handle.status == EnvStatus::Deleted) throw EnvGone("deleted: " + env_id);
    if (!entry->alive) throw TransportError("environment not responding: " + env_id);
    if (entry->handle.status != EnvStatus::Busy) {
      throw BusyConflict("step requires an in-episode (busy) environment, status is " +
                         to_string(entry->handle.status));
    }
  }

  const int delay = hooks_.step_delay_ms.load();
  if (delay > 0) std::this_thread::sleep_for(std::chrono::milliseconds(delay));

  StepReply reply;
  auto result = entry->sim->step(action);
  reply.observation = std::move(result.observation);
  reply.terminated = result.terminated;
  reply.state_digest = entry->sim->state_digest();

  std::lock_guard s(entry->state_mutex);
  if (entry->handle.status == EnvStatus::Deleted) {
    entry->sim.reset();
    throw EnvGone("deleted during step: " + env_id);
  }
  entry->handle.last_heartbeat = clock_.now();
  if (reply.terminated) entry->handle.status = EnvStatus::Ready;
  return reply;
}

nlohmann::ordered_json EnvService::oracle_state(const std::string& env_id) {
  if (!config_.expose_oracle_state) {
    throw ValidationError("oracle_state endpoint is disabled by configuration");
  }
  auto entry = find(env_id);
  std::lock_guard s(entry->state_mutex);
  if (entry->handle.status == EnvStatus::Deleted || !entry->sim) {
    throw EnvGone("deleted: " + env_id);
  }
  const auto& st = entry->sim->state();
  if (st.screen_stack.empty()) {
    throw ValidationError("environment has not been reset: " + env_id);
  }
  nlohmann::ordered_json doc = nlohmann::ordered_json::object();
  for (const auto& [k, v] : st.document_model) doc[k] = v;
  nlohmann::ordered_json ui = nlohmann::ordered_json::object();
  for (const auto& [k, v] : st.ui) ui[k] = v;
  return nlohmann::ordered_json{{"app_id", st.app_id},
                                {"screen_stack", st.screen_stack},
                                {"document_model", std::move(doc)},
                                {"ui", std::move(ui)},
                                {"step_count", st.step_count},
                                {"digest", entry->sim->state_digest()}};
}

void EnvService::kill(const std::string& env_id) {
  auto entry = find(env_id);
  std::lock_guard s(entry->state_mutex);
  entry->alive = false;
}

void EnvService::set_failure_listener(std::function<void(const std::string&)> listener) {
  failure_listener_ = std::move(listener);
}

bool EnvService::restart_entry(Entry& entry) {
  for (int attempt = 0; attempt < config_.restart_attempts; ++attempt) {
    const int latency = hooks_.init_latency_ms.load();
    if (latency > 0) std::this_thread::sleep_for(std::chrono::milliseconds(latency));
    if (consume_token(hooks_.fail_next_inits)) continue;
    auto sim = std::make_unique<simenv::SimEnv>(apps_.get(entry.handle.app_id), contexts_);
    std::lock_guard s(entry.state_mutex);
    entry.sim = std::move(sim);
    entry.alive = true;
    entry.handle.status = EnvStatus::Ready;
    entry.handle.restart_count += 1;
    entry.handle.last_heartbeat = clock_.now();
    return true;
  }
  std::lock_guard s(entry.state_mutex);
  entry.handle.status = EnvStatus::Failed;
  return false;
}

std::vector<MonitorAction> EnvService::health_monitor_tick(double now) {
  std::vector<std::shared_ptr<Entry>> entries;
  {
    std::lock_guard lock(fleet_mutex_);
    for (const auto& [_, e] : fleet_) entries.push_back(e);
  }

  std::vector<MonitorAction> actions;
  const double limit = config_.miss_threshold * config_.heartbeat_interval_s;
  for (auto& entry : entries) {
    bool needs_restart = false;
    {
      std::lock_guard s(entry->state_mutex);
      auto& h = entry->handle;
      if (h.status == EnvStatus::Deleted || h.status == EnvStatus::Failed ||
          h.status == EnvStatus::Initializing || h.status == EnvStatus::Restarting) {
        continue;
      }
      if (entry->alive) {
        h.last_heartbeat = now;  // successful probe
        continue;
      }
      if (now - h.last_heartbeat > limit) {
        // failed -> restarting; the restart either revives it or exhausts R.
        h.status = EnvStatus::Restarting;
        needs_restart = true;
      }
    }
    if (needs_restart) {
      if (restart_entry(*entry)) {
        actions.push_back({entry->handle.env_id, "restart_initiated"});
      } else {
        actions.push_back({entry->handle.env_id, "restart_exhausted"});
        if (failure_listener_) failure_listener_(entry->handle.env_id);
      }
    }
  }
  return actions;
}

}  // namespace guirl::envd
