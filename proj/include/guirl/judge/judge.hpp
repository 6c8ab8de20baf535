#pragma once

#include "guirl/core/types.hpp"
#include "guirl/judge/backend.hpp"
#include "guirl/judge/types.hpp"

namespace guirl::judge {

struct JudgeConfig {
  int screenshot_threshold = 3;  // kept when score >= threshold
  int backend_attempts = 3;      // total tries per stage on transport failures
};

// Stage 1: task-critical requirements from the goal text. >= 1 key point.
std::vector<KeyPoint> identify_key_points(JudgeBackend& backend, const core::Task& task);

// Stage 2: one relevance score per trajectory step; kept obeys the threshold.
std::vector<ScreenshotScore> score_screenshots(JudgeBackend& backend,
                                               const core::Trajectory& trajectory,
                                               const core::Task& task,
                                               const std::vector<KeyPoint>& key_points,
                                               int threshold);

// Structural diff over the document-bearing widgets (chrome excluded) of two
// observations. Rejects observations from different apps.
StateDiff diff_states(const core::Observation& initial, const core::Observation& final_obs);

// Full pipeline: key points, screenshot filtering, state diff, evidence-
// grounded verification, outcome judgment. Transport failures are retried
// up to config.backend_attempts, then rethrown so the caller can mark the
// rollout unjudged.
JudgeVerdict judge(JudgeBackend& backend, const core::Trajectory& trajectory,
                   const core::Task& task, const JudgeConfig& config = {});

// Confusion counts and derived rates against binary reference labels.
EvalMetrics compute_metrics(const std::vector<Outcome>& verdicts,
                            const std::vector<int>& reference_labels);

// One CSV row per run: header helper plus the formatted row.
std::string metrics_csv_header();
std::string metrics_csv_row(const std::string& run_id, const EvalMetrics& m);

}  // namespace guirl::judge
