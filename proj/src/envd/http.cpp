#include "guirl/envd/http.hpp"

#include <thread>

#include <httplib.h>

#include "guirl/core/json_io.hpp"
#include "guirl/envd/service.hpp"

namespace guirl::envd {

using nlohmann::ordered_json;

namespace {

struct WireError {
  int status;
  std::string code;
};

// Exceptions -> wire codes, and back again on the client.
template <typename Fn>
void handle(httplib::Response& res, Fn&& fn) {
  try {
    const ordered_json body = fn();
    res.status = 200;
    res.set_content(body.dump(), "application/json");
  } catch (const EnvGone& e) {
    res.status = 404;
    res.set_content(ordered_json{{"error", "env_gone"}, {"message", e.what()}}.dump(),
                    "application/json");
  } catch (const BusyConflict& e) {
    res.status = 409;
    res.set_content(ordered_json{{"error", "busy_conflict"}, {"message", e.what()}}.dump(),
                    "application/json");
  } catch (const CapacityExceeded& e) {
    res.status = 429;
    res.set_content(ordered_json{{"error", "capacity_exceeded"},
                                 {"message", e.what()},
                                 {"available", e.available()}}
                        .dump(),
                    "application/json");
  } catch (const std::exception& e) {
    res.status = 400;
    res.set_content(ordered_json{{"error", "bad_request"}, {"message", e.what()}}.dump(),
                    "application/json");
  }
}

}  // namespace

struct HttpEnvServer::Impl {
  httplib::Server server;
  std::thread thread;
};

HttpEnvServer::HttpEnvServer(EnvService& service, const std::string& listen_address)
    : impl_(std::make_unique<Impl>()) {
  auto& srv = impl_->server;

  srv.Post("/envs/batch", [&service](const httplib::Request& req, httplib::Response& res) {
    handle(res, [&] {
      const auto j = ordered_json::parse(req.body);
      BatchRequest r;
      r.count = j.at("count").get<int>();
      r.app_id = j.at("app_id").get<std::string>();
      if (j.contains("context_ids")) {
        r.context_ids = j.at("context_ids").get<std::vector<std::string>>();
      }
      if (j.contains("seeds")) r.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
      ordered_json envs = ordered_json::array();
      for (const auto& h : service.create_batch(r)) envs.push_back(handle_to_json(h));
      return ordered_json{{"envs", std::move(envs)}};
    });
  });

  srv.Delete("/envs/batch", [&service](const httplib::Request& req, httplib::Response& res) {
    handle(res, [&] {
      const auto j = ordered_json::parse(req.body);
      const auto ids = j.at("ids").get<std::vector<std::string>>();
      ordered_json outcomes = ordered_json::array();
      for (const auto& o : service.delete_batch(ids)) {
        outcomes.push_back(ordered_json{{"env_id", o.env_id}, {"result", o.result}});
      }
      return ordered_json{{"outcomes", std::move(outcomes)}};
    });
  });

  srv.Get(R"(/envs/([^/]+)/health)",
          [&service](const httplib::Request& req, httplib::Response& res) {
            handle(res, [&] { return handle_to_json(service.health(req.matches[1])); });
          });

  srv.Post(R"(/envs/([^/]+)/reset)",
           [&service](const httplib::Request& req, httplib::Response& res) {
             handle(res, [&] {
               const auto j = ordered_json::parse(req.body);
               ResetRequest r;
               r.context_id = j.value("context_id", "");
               r.task_text = j.value("task_text", "");
               r.max_steps = j.value("max_steps", 15);
               auto reply = service.reset(req.matches[1], r);
               return ordered_json{{"observation", core::to_json(reply.observation)},
                                   {"digest", reply.state_digest}};
             });
           });

  srv.Post(R"(/envs/([^/]+)/step)",
           [&service](const httplib::Request& req, httplib::Response& res) {
             handle(res, [&] {
               const auto j = ordered_json::parse(req.body);
               const auto action = core::action_from_json(j.at("action"));
               auto reply = service.step(req.matches[1], action);
               return ordered_json{{"observation", core::to_json(reply.observation)},
                                   {"terminated", reply.terminated},
                                   {"digest", reply.state_digest}};
             });
           });

  srv.Get(R"(/envs/([^/]+)/oracle_state)",
          [&service](const httplib::Request& req, httplib::Response& res) {
            handle(res, [&] { return service.oracle_state(req.matches[1]); });
          });

  std::string host = "127.0.0.1";
  int port = 0;
  const auto colon = listen_address.rfind(':');
  if (colon != std::string::npos) {
    host = listen_address.substr(0, colon);
    port = std::stoi(listen_address.substr(colon + 1));
  }
  if (port == 0) {
    port_ = srv.bind_to_any_port(host);
  } else {
    if (!srv.bind_to_port(host, port)) {
      throw ValidationError("cannot bind " + listen_address);
    }
    port_ = port;
  }
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  srv.wait_until_ready();
}

HttpEnvServer::~HttpEnvServer() { stop(); }

void HttpEnvServer::stop() {
  if (impl_ && impl_->server.is_running()) impl_->server.stop();
  if (impl_ && impl_->thread.joinable()) impl_->thread.join();
}

std::string HttpEnvServer::base_url() const {
  return "http://127.0.0.1:" + std::to_string(port_);
}

HttpEnvClient::HttpEnvClient(std::string base_url, int timeout_ms)
    : base_url_(std::move(base_url)), timeout_ms_(timeout_ms) {}

ordered_json HttpEnvClient::request(const std::string& method, const std::string& path,
                                    const ordered_json& body) const {
  httplib::Client client(base_url_);
  client.set_connection_timeout(timeout_ms_ / 1000, (timeout_ms_ % 1000) * 1000);
  client.set_read_timeout(timeout_ms_ / 1000, (timeout_ms_ % 1000) * 1000);

  httplib::Result res;
  if (method == "GET") {
    res = client.Get(path);
  } else if (method == "POST") {
    res = client.Post(path, body.dump(), "application/json");
  } else {
    res = client.Delete(path, body.dump(), "application/json");
  }
  if (!res) {
    throw TransportError("env service unreachable at " + base_url_ + " (" +
                         httplib::to_string(res.error()) + ")");
  }
  ordered_json j;
  try {
    j = ordered_json::parse(res->body);
  } catch (const ordered_json::exception& e) {
    throw ParseError(std::string("bad env service reply: ") + e.what(), res->body);
  }
  if (res->status == 200) return j;

  const std::string code = j.value("error", "bad_request");
  const std::string message = j.value("message", "env service error");
  if (code == "env_gone") throw EnvGone(message);
  if (code == "busy_conflict") throw BusyConflict(message);
  if (code == "capacity_exceeded") throw CapacityExceeded(message, j.value("available", 0));
  throw ValidationError(message);
}

std::vector<EnvHandle> HttpEnvClient::create_batch(const BatchRequest& r) {
  ordered_json body{{"count", r.count}, {"app_id", r.app_id}};
  if (!r.context_ids.empty()) body["context_ids"] = r.context_ids;
  if (!r.seeds.empty()) body["seeds"] = r.seeds;
  const auto j = request("POST", "/envs/batch", body);
  std::vector<EnvHandle> handles;
  for (const auto& hj : j.at("envs")) handles.push_back(handle_from_json(hj));
  return handles;
}

std::vector<DeleteOutcome> HttpEnvClient::delete_batch(const std::vector<std::string>& ids) {
  const auto j = request("DELETE", "/envs/batch", ordered_json{{"ids", ids}});
  std::vector<DeleteOutcome> outcomes;
  for (const auto& oj : j.at("outcomes")) {
    outcomes.push_back({oj.at("env_id").get<std::string>(), oj.at("result").get<std::string>()});
  }
  return outcomes;
}

EnvHandle HttpEnvClient::health(const std::string& env_id) {
  return handle_from_json(request("GET", "/envs/" + env_id + "/health", {}));
}

ResetReply HttpEnvClient::reset(const std::string& env_id, const ResetRequest& r) {
  const auto j = request("POST", "/envs/" + env_id + "/reset",
                         ordered_json{{"context_id", r.context_id},
                                      {"task_text", r.task_text},
                                      {"max_steps", r.max_steps}});
  return {core::observation_from_json(j.at("observation")),
          j.at("digest").get<std::string>()};
}

StepReply HttpEnvClient::step(const std::string& env_id, const core::Action& action) {
  const auto j = request("POST", "/envs/" + env_id + "/step",
                         ordered_json{{"action", core::to_json(action)}});
  return {core::observation_from_json(j.at("observation")),
          j.at("terminated").get<bool>(), j.at("digest").get<std::string>()};
}

ordered_json HttpEnvClient::oracle_state(const std::string& env_id) {
  return request("GET", "/envs/" + env_id + "/oracle_state", {});
}

}  // namespace guirl::envd
