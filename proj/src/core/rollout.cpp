#include "guirl/core/rollout.hpp"

#include "guirl/core/json_io.hpp"

namespace guirl::core {

nlohmann::ordered_json rollout_record_to_json(const RolloutRecord& r) {
  nlohmann::ordered_json j{{"trajectory", to_json(r.trajectory)},
                           {"iteration", r.iteration},
                           {"group_id", r.group_id},
                           {"seed", r.seed},
                           {"policy_version", r.policy_version}};
  if (r.verdict) j["verdict"] = judge::verdict_to_json(*r.verdict);
  return j;
}

RolloutRecord rollout_record_from_json(const nlohmann::ordered_json& j) {
  RolloutRecord r;
  r.trajectory = trajectory_from_json(j.at("trajectory"));
  r.iteration = j.at("iteration").get<int>();
  r.group_id = j.at("group_id").get<std::string>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.policy_version = j.at("policy_version").get<std::int64_t>();
  if (j.contains("verdict")) r.verdict = judge::verdict_from_json(j.at("verdict"));
  return r;
}

}  // namespace guirl::core
