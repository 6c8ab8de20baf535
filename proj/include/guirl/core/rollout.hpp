#pragma once

#include <cstdint>
#include <optional>

#include "guirl/core/types.hpp"
#include "guirl/judge/types.hpp"

namespace guirl::core {

// Binds one sampled trajectory to its verdict and its sampling provenance.
// All records sharing a group_id refer to the same task; the policy version
// enforces strict on-policy optimization.
struct RolloutRecord {
  Trajectory trajectory;
  std::optional<judge::JudgeVerdict> verdict;
  int iteration = 0;
  std::string group_id;
  std::uint64_t seed = 0;
  std::int64_t policy_version = 0;
};

nlohmann::ordered_json rollout_record_to_json(const RolloutRecord& r);
RolloutRecord rollout_record_from_json(const nlohmann::ordered_json& j);

}  // namespace guirl::core
