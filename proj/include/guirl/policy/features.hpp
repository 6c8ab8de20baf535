#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "guirl/core/types.hpp"

namespace guirl::policy {

// Dimensions and hashing seeds of the feature extractor. Part of every
// checkpoint; two snapshots are only comparable when these match.
struct FeatureConfig {
  int feature_dim = 128;
  int hidden_dim = 32;
  std::uint64_t hash_seed = 0x5eedf00d;
  int history_window = 2;      // most recent observations kept
  int max_payload_words = 3;   // typed payload length cap during sampling

  bool operator==(const FeatureConfig&) const = default;
};

nlohmann::ordered_json feature_config_to_json(const FeatureConfig& cfg);
FeatureConfig feature_config_from_json(const nlohmann::ordered_json& j);

// Deterministic hashed bag-of-features over the task text and the (at most)
// `history_window` most recent observations. Rejects an empty history.
std::vector<double> extract_features(const FeatureConfig& cfg, const std::string& task_text,
                                     const std::vector<const core::Observation*>& history);

}  // namespace guirl::policy
