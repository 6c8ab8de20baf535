#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace guirl::judge {

enum class KeyPointStatus { Met, Unmet, Indeterminate };

std::string to_string(KeyPointStatus s);
KeyPointStatus key_point_status_from_string(const std::string& name);

struct KeyPointEvidence {
  int step_index = 0;
  std::string observation_excerpt;
  std::string action_text;

  bool operator==(const KeyPointEvidence&) const = default;
};

// A task-critical requirement extracted from the goal. Verification fields
// stay empty until the evidence-grounded verification stage runs; a key point
// marked met always carries at least one evidence entry.
struct KeyPoint {
  int index = 0;
  std::string description;
  std::optional<KeyPointStatus> status;
  std::vector<KeyPointEvidence> evidence;

  bool operator==(const KeyPoint&) const = default;
};

struct ScreenshotScore {
  int step_index = 0;
  int score = 1;  // 1..5
  bool kept = false;

  bool operator==(const ScreenshotScore&) const = default;
};

struct StateDiffEntry {
  enum class Op { Added, Removed, Changed };
  Op op = Op::Changed;
  std::string field;
  std::string before;
  std::string after;

  bool operator==(const StateDiffEntry&) const = default;
};

struct StateDiff {
  std::vector<StateDiffEntry> entries;
  std::string summary;

  bool empty() const { return entries.empty(); }
  bool operator==(const StateDiff&) const = default;
};

enum class Outcome { Success, Failure };

struct JudgeVerdict {
  Outcome outcome = Outcome::Failure;
  std::vector<KeyPoint> key_points;
  StateDiff state_diff;
  std::vector<int> kept_screenshots;
  std::string rationale;
  std::string backend_id;

  bool operator==(const JudgeVerdict&) const = default;
};

struct EvalMetrics {
  int tp = 0, fp = 0, tn = 0, fn = 0;
  std::optional<double> precision;  // absent when tp+fp == 0
  std::optional<double> recall;     // absent when tp+fn == 0
  std::optional<double> agreement;  // absent on empty input
};

nlohmann::ordered_json verdict_to_json(const JudgeVerdict& v);
JudgeVerdict verdict_from_json(const nlohmann::ordered_json& j);

nlohmann::ordered_json metrics_to_json(const EvalMetrics& m);

}  // namespace guirl::judge
