#include "guirl/policy/features.hpp"

#include <algorithm>

#include "guirl/core/digest.hpp"
#include "guirl/core/error.hpp"

namespace guirl::policy {

using core::Observation;

nlohmann::ordered_json feature_config_to_json(const FeatureConfig& cfg) {
  return nlohmann::ordered_json{{"feature_dim", cfg.feature_dim},
                                {"hidden_dim", cfg.hidden_dim},
                                {"hash_seed", cfg.hash_seed},
                                {"history_window", cfg.history_window},
                                {"max_payload_words", cfg.max_payload_words}};
}

FeatureConfig feature_config_from_json(const nlohmann::ordered_json& j) {
  FeatureConfig cfg;
  cfg.feature_dim = j.at("feature_dim").get<int>();
  cfg.hidden_dim = j.at("hidden_dim").get<int>();
  cfg.hash_seed = j.at("hash_seed").get<std::uint64_t>();
  cfg.history_window = j.at("history_window").get<int>();
  cfg.max_payload_words = j.at("max_payload_words").get<int>();
  return cfg;
}

namespace {

std::vector<std::string> words_of(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (c == ' ' || c == '\t' || c == '\n') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

}  // namespace

std::vector<double> extract_features(const FeatureConfig& cfg, const std::string& task_text,
                                     const std::vector<const Observation*>& history) {
  if (history.empty()) throw ValidationError("feature extraction needs >= 1 observation");

  std::vector<double> x(static_cast<size_t>(cfg.feature_dim), 0.0);
  auto bump = [&](const std::string& key, double v) {
    const auto idx = core::hash_string(key, cfg.hash_seed) %
                     static_cast<std::uint64_t>(cfg.feature_dim);
    x[static_cast<size_t>(idx)] += v;
  };

  bump("bias", 1.0);
  const auto task_words = words_of(task_text);
  for (const auto& w : task_words) bump("task:" + w, 1.0);
  // Bigrams keep word order relevant ("set A to B" vs "set B to A").
  for (size_t i = 0; i + 1 < task_words.size(); ++i) {
    bump("task2:" + task_words[i] + "|" + task_words[i + 1], 1.0);
  }

  // Keep only the most recent `history_window` observations; slot 0 is the
  // current one.
  const int window = std::min<int>(cfg.history_window, static_cast<int>(history.size()));
  for (int slot = 0; slot < window; ++slot) {
    const Observation& obs = *history[history.size() - 1 - slot];
    const std::string tag = "s" + std::to_string(slot);
    for (const auto& w : obs.screen) {
      bump(tag + ":widget:" + w.id, 1.0);
      if (w.enabled) bump(tag + ":enabled:" + w.id, 1.0);
      for (const auto& tw : words_of(w.text)) {
        bump(tag + ":text:" + tw, 1.0);
        if (slot == 0) {
          // Overlap between task words and on-screen text marks widgets the
          // task is talking about.
          for (const auto& qw : task_words) {
            if (qw == tw) bump("match:" + w.id, 1.0);
          }
        }
      }
      if (slot == 0) {
        for (const auto& qw : task_words) {
          if (w.id.find(qw) != std::string::npos) bump("mention:" + w.id, 1.0);
        }
      }
    }
  }
  return x;
}

}  // namespace guirl::policy
