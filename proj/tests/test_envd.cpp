#include <atomic>
#include <filesystem>
#include <fstream>
#include <set>
#include <thread>

#include "doctest.h"
#include "guirl/core/error.hpp"
#include "guirl/core/json_io.hpp"
#include "guirl/envd/http.hpp"
#include "guirl/envd/service.hpp"
#include "test_util.hpp"

using namespace guirl;
using namespace guirl::core;
using namespace guirl::envd;

namespace {

ServiceConfig fast_config() {
  ServiceConfig cfg;
  cfg.fleet_cap = 64;
  cfg.heartbeat_interval_s = 1.0;
  cfg.miss_threshold = 2;
  cfg.restart_attempts = 3;
  cfg.expose_oracle_state = true;
  return cfg;
}

Action click(const std::string& target) {
  static auto table = test_apps().symbol_table();
  return encode_action(table, ActionKind::Click, target, "");
}

}  // namespace

TEST_CASE("create_batch returns ready handles with unique ids") {
  ManualClock clock;
  EnvService svc(test_apps(), test_contexts(), fast_config(), clock);

  BatchRequest req;
  req.count = 16;
  req.app_id = "slidedeck";
  req.context_ids = {"slide_launch"};
  auto handles = svc.create_batch(req);
  REQUIRE(handles.size() == 16);
  std::set<std::string> ids;
  for (const auto& h : handles) {
    CHECK(h.status == EnvStatus::Ready);
    ids.insert(h.env_id);
  }
  CHECK(ids.size() == 16);

  BatchRequest empty;
  empty.count = 0;
  empty.app_id = "slidedeck";
  CHECK_THROWS_AS(svc.create_batch(empty), ValidationError);

  BatchRequest one;
  one.count = 1;
  one.app_id = "slidedeck";
  auto a = svc.create_batch(one);
  auto b = svc.create_batch(one);
  CHECK(a[0].env_id != b[0].env_id);

  BatchRequest huge;
  huge.count = 64;
  huge.app_id = "slidedeck";
  try {
    svc.create_batch(huge);
    FAIL("expected capacity rejection");
  } catch (const CapacityExceeded& e) {
    CHECK(e.available() == 64 - 18);
  }
}

TEST_CASE("delete_batch is idempotent with per-id outcomes") {
  ManualClock clock;
  EnvService svc(test_apps(), test_contexts(), fast_config(), clock);
  BatchRequest req;
  req.count = 3;
  req.app_id = "mailroom";
  auto handles = svc.create_batch(req);

  std::vector<std::string> ids = {handles[0].env_id, "env-nope", handles[1].env_id};
  auto outcomes = svc.delete_batch(ids);
  REQUIRE(outcomes.size() == 3);
  CHECK(outcomes[0].result == "deleted");
  CHECK(outcomes[1].result == "not_found");
  CHECK(outcomes[2].result == "deleted");

  auto again = svc.delete_batch({handles[0].env_id});
  CHECK(again[0].result == "already_deleted");

  CHECK_THROWS_AS(svc.step(handles[0].env_id, click("btn_compose")), EnvGone);
}

TEST_CASE("deleting a busy env makes the in-flight step report env_gone") {
  ManualClock clock;
  EnvService svc(test_apps(), test_contexts(), fast_config(), clock);
  BatchRequest req;
  req.count = 1;
  req.app_id = "slidedeck";
  req.context_ids = {"slide_launch"};
  const auto id = svc.create_batch(req)[0].env_id;
  svc.reset(id, {"slide_launch", "t", 10});

  svc.hooks().step_delay_ms = 150;
  std::atomic<bool> got_env_gone{false};
  std::thread stepper([&] {
    try {
      svc.step(id, click("menu_setup"));
    } catch (const EnvGone&) {
      got_env_gone = true;
    }
  });
  std::this_thread::sleep_for(std::chrono::milliseconds(50));
  auto outcomes = svc.delete_batch({id});
  CHECK(outcomes[0].result == "deleted");
  stepper.join();
  CHECK(got_env_gone.load());
}

TEST_CASE("concurrent steps to one env: the loser gets busy_conflict") {
  ManualClock clock;
  EnvService svc(test_apps(), test_contexts(), fast_config(), clock);
  BatchRequest req;
  req.count = 1;
  req.app_id = "slidedeck";
  req.context_ids = {"slide_launch"};
  const auto id = svc.create_batch(req)[0].env_id;
  svc.reset(id, {"slide_launch", "t", 10});

  svc.hooks().step_delay_ms = 150;
  std::atomic<int> conflicts{0}, successes{0};
  auto work = [&] {
    try {
      svc.step(id, click("menu_setup"));
      ++successes;
    } catch (const BusyConflict&) {
      ++conflicts;
    }
  };
  std::thread a(work);
  std::this_thread::sleep_for(std::chrono::milliseconds(40));
  std::thread b(work);
  a.join();
  b.join();
  CHECK(successes.load() == 1);
  CHECK(conflicts.load() == 1);
}

TEST_CASE("health monitor restarts silent envs and reports terminal failures") {
  ManualClock clock;
  auto cfg = fast_config();
  EnvService svc(test_apps(), test_contexts(), cfg, clock);
  BatchRequest req;
  req.count = 3;
  req.app_id = "slidedeck";
  auto handles = svc.create_batch(req);

  // Healthy fleet: nothing to do.
  clock.advance(0.5);
  CHECK(svc.health_monitor_tick(clock.now()).empty());

  // One env goes silent; failure detected after more than M*H seconds.
  svc.kill(handles[1].env_id);
  clock.advance(1.0);
  CHECK(svc.health_monitor_tick(clock.now()).empty());  // only 1.0s of silence
  clock.advance(1.6);                                   // 2.6s > 2 * 1.0s
  auto actions = svc.health_monitor_tick(clock.now());
  REQUIRE(actions.size() == 1);
  CHECK(actions[0].env_id == handles[1].env_id);
  CHECK(actions[0].action == "restart_initiated");
  auto h = svc.health(handles[1].env_id);
  CHECK(h.status == EnvStatus::Ready);
  CHECK(h.restart_count == 1);

  // Restart failure after R attempts is terminal and notified exactly once.
  std::vector<std::string> notified;
  svc.set_failure_listener([&](const std::string& id) { notified.push_back(id); });
  svc.kill(handles[2].env_id);
  svc.hooks().fail_next_inits = cfg.restart_attempts;
  clock.advance(3.0);
  auto worst = svc.health_monitor_tick(clock.now());
  bool exhausted = false;
  for (const auto& a : worst) {
    exhausted = exhausted || (a.env_id == handles[2].env_id && a.action == "restart_exhausted");
  }
  CHECK(exhausted);
  CHECK(svc.health(handles[2].env_id).status == EnvStatus::Failed);
  CHECK(notified == std::vector<std::string>{handles[2].env_id});

  // Terminal envs stay failed on later ticks without re-notification.
  clock.advance(5.0);
  svc.health_monitor_tick(clock.now());
  CHECK(notified.size() == 1);
}

TEST_CASE("remote execution is byte-identical to the local service") {
  ManualClock clock;
  EnvService local(test_apps(), test_contexts(), fast_config(), clock);
  EnvService remote_backing(test_apps(), test_contexts(), fast_config(), clock);
  HttpEnvServer server(remote_backing, "127.0.0.1:0");
  HttpEnvClient remote(server.base_url());

  const std::vector<Action> script = {click("menu_slides"), click("item_slide_2"),
                                      click("menu_setup"), click("btn_back")};

  BatchRequest req;
  req.count = 1;
  req.app_id = "slidedeck";
  auto lid = local.create_batch(req)[0].env_id;
  auto rid = remote.create_batch(req)[0].env_id;

  auto lr = local.reset(lid, {"slide_launch", "same task", 10});
  auto rr = remote.reset(rid, {"slide_launch", "same task", 10});
  CHECK(lr.state_digest == rr.state_digest);
  CHECK(core::to_json(lr.observation) == core::to_json(rr.observation));

  for (const auto& a : script) {
    auto ls = local.step(lid, a);
    auto rs = remote.step(rid, a);
    CHECK(ls.state_digest == rs.state_digest);
    CHECK(ls.terminated == rs.terminated);
    CHECK(core::to_json(ls.observation) == core::to_json(rs.observation));
  }

  // Lifecycle errors cross the wire as typed failures.
  remote.delete_batch({rid});
  CHECK_THROWS_AS(remote.step(rid, script[0]), EnvGone);
  CHECK_THROWS_AS(remote.health("env-does-not-exist"), EnvGone);

  const auto fresh = remote.create_batch(req)[0].env_id;
  CHECK_THROWS_AS(remote.oracle_state(fresh), ValidationError);  // no episode yet
  remote.reset(fresh, {"slide_launch", "t", 5});
  auto state = remote.oracle_state(fresh);
  CHECK(state.at("document_model").at("slide1.title") == "Launch Plan");
}

TEST_CASE("service config file and environment overrides") {
  const auto path = std::filesystem::temp_directory_path() / "guirl_envd_cfg.json";
  {
    std::ofstream out(path);
    out << R"({"fleet_cap": 7, "heartbeat_interval_s": 0.25, "miss_threshold": 4})";
  }
  auto cfg = load_service_config(path.string());
  CHECK(cfg.fleet_cap == 7);
  CHECK(cfg.heartbeat_interval_s == 0.25);
  CHECK(cfg.miss_threshold == 4);
  CHECK(cfg.restart_attempts == 3);  // default preserved

  setenv("GUIRL_ENVD_FLEET_CAP", "11", 1);
  setenv("GUIRL_ENVD_ORACLE_STATE", "1", 1);
  auto overridden = load_service_config(path.string());
  CHECK(overridden.fleet_cap == 11);
  CHECK(overridden.expose_oracle_state);
  unsetenv("GUIRL_ENVD_FLEET_CAP");
  unsetenv("GUIRL_ENVD_ORACLE_STATE");
  std::filesystem::remove(path);
}
