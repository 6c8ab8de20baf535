#include "guirl/curriculum/curriculum.hpp"

#include <algorithm>
#include <set>

#include "guirl/core/digest.hpp"
#include "guirl/core/error.hpp"

namespace guirl::curriculum {

using nlohmann::ordered_json;

const CapabilityEntry* CapabilityReport::find(const std::string& task_id) const {
  for (const auto& e : entries) {
    if (e.task_id == task_id) return &e;
  }
  return nullptr;
}

ordered_json capability_report_to_json(const CapabilityReport& r) {
  ordered_json entries = ordered_json::array();
  for (const auto& e : r.entries) {
    entries.push_back(ordered_json{{"task_id", e.task_id},
                                   {"success_rate", e.success_rate},
                                   {"rollout_count", e.rollout_count},
                                   {"outcomes", e.outcomes},
                                   {"incomplete", e.incomplete}});
  }
  return ordered_json{{"iteration", r.iteration}, {"entries", std::move(entries)}};
}

CapabilityReport capability_report_from_json(const ordered_json& j) {
  CapabilityReport r;
  r.iteration = j.at("iteration").get<int>();
  for (const auto& ej : j.at("entries")) {
    CapabilityEntry e;
    e.task_id = ej.at("task_id").get<std::string>();
    e.success_rate = ej.at("success_rate").get<double>();
    e.rollout_count = ej.at("rollout_count").get<int>();
    e.outcomes = ej.at("outcomes").get<std::vector<int>>();
    e.incomplete = ej.at("incomplete").get<bool>();
    r.entries.push_back(std::move(e));
  }
  return r;
}

std::string to_string(DifficultyBucket b) {
  switch (b) {
    case DifficultyBucket::Easy: return "Easy";
    case DifficultyBucket::Medium: return "Medium";
    case DifficultyBucket::Hard: return "Hard";
  }
  throw ValidationError("unknown bucket");
}

DifficultyBucket classify(double success_rate, double delta_low, double delta_high) {
  if (delta_low < 0 || delta_high > 1 || delta_low > delta_high) {
    throw ValidationError("difficulty thresholds out of order");
  }
  if (success_rate > delta_high) return DifficultyBucket::Easy;
  if (success_rate < delta_low) return DifficultyBucket::Hard;
  return DifficultyBucket::Medium;  // delta_low <= s <= delta_high
}

std::map<std::string, DifficultyBucket> bucketize(const CapabilityReport& report,
                                                  double delta_low, double delta_high) {
  std::map<std::string, DifficultyBucket> buckets;
  for (const auto& e : report.entries) {
    if (e.incomplete) continue;
    buckets[e.task_id] = classify(e.success_rate, delta_low, delta_high);
  }
  return buckets;
}

CapabilityReport evaluate_capability(const TaskSet& tasks, int m, std::uint64_t seed,
                                     int iteration, const RolloutFn& rollout) {
  if (m < 1) throw ValidationError("capability evaluation needs m >= 1");
  CapabilityReport report;
  report.iteration = iteration;
  constexpr int kRetryBudget = 2;

  for (size_t ti = 0; ti < tasks.size(); ++ti) {
    CapabilityEntry entry;
    entry.task_id = tasks[ti].task.task_id;
    entry.rollout_count = m;
    int successes = 0;
    for (int j = 0; j < m && !entry.incomplete; ++j) {
      std::optional<int> outcome;
      for (int attempt = 0; attempt <= kRetryBudget && !outcome; ++attempt) {
        outcome = rollout(tasks[ti], core::derive_seed(seed, "capability",
                                                       static_cast<std::int64_t>(ti), j,
                                                       attempt));
      }
      if (!outcome) {
        entry.incomplete = true;
      } else {
        entry.outcomes.push_back(*outcome);
        successes += *outcome;
      }
    }
    entry.success_rate =
        entry.incomplete ? 0.0 : static_cast<double>(successes) / static_cast<double>(m);
    report.entries.push_back(std::move(entry));
  }
  return report;
}

std::vector<std::string> visited_widgets(const std::vector<core::Trajectory>& trajectories) {
  std::set<std::string> seen;
  for (const auto& traj : trajectories) {
    for (const auto& step : traj.steps) {
      for (const auto& w : step.observation.screen) seen.insert(w.id);
    }
  }
  return {seen.begin(), seen.end()};
}

TaskGenerator::TaskGenerator(const TaskFactory& factory, CurriculumConfig config)
    : factory_(factory), config_(std::move(config)) {}

TaskSet TaskGenerator::bootstrap_iteration0(const std::vector<core::Trajectory>& exploration,
                                            const std::vector<core::Trajectory>& reviews,
                                            const std::string& app_id,
                                            std::uint64_t seed) const {
  if (exploration.empty() || reviews.empty()) {
    throw ValidationError("iteration 0 needs at least one exploration and one review "
                          "trajectory for the app");
  }
  const auto visited = visited_widgets(exploration);
  if (visited.empty()) throw ValidationError("exploration covered no widgets");

  // Contexts covered by the recorded experience, in registry order.
  std::set<std::string> covered;
  for (const auto& traj : exploration) {
    const auto colon = traj.task_id.rfind(':');
    if (colon != std::string::npos) covered.insert(traj.task_id.substr(colon + 1));
  }
  for (const auto& traj : reviews) {
    const auto colon = traj.task_id.rfind(':');
    if (colon != std::string::npos) covered.insert(traj.task_id.substr(colon + 1));
  }

  TaskSet out;
  int counter = 0;
  for (const auto& ctx_id : covered) {
    std::mt19937_64 rng(core::derive_seed(seed, "iteration0:" + ctx_id));
    for (int i = 0; i < config_.per_context_budget; ++i) {
      std::vector<std::string> claimed;  // atomic tasks claim independently
      auto inst = factory_.draw_instance(app_id, ctx_id, rng, false, &visited, claimed);
      if (!inst) {
        throw ValidationError("cannot ground an atomic task in context " + ctx_id);
      }
      TaskBlueprint bp{app_id, ctx_id, {*inst}};
      char id[64];
      std::snprintf(id, sizeof(id), "t0-%s-%03d", app_id.c_str(), counter++);
      out.push_back(factory_.materialize(bp, id, core::TaskOrigin::Iteration0, {}));
    }
  }
  return out;
}

GeneratedTask TaskGenerator::make_child_easy(const GeneratedTask& parent, int iteration,
                                             const std::string& task_id,
                                             std::mt19937_64& rng) const {
  TaskBlueprint bp = parent.blueprint;
  std::vector<std::string> claimed;
  for (const auto& inst : bp.sub_goals) {
    const auto claims = factory_.instance_claims(inst, bp.app_id);
    claimed.insert(claimed.end(), claims.begin(), claims.end());
  }
  // Increase complexity by one additional skill requirement.
  if (static_cast<int>(bp.sub_goals.size()) < config_.max_sub_goals) {
    auto inst = factory_.draw_instance(bp.app_id, bp.context_id, rng, true, nullptr, claimed);
    if (inst) bp.sub_goals.push_back(*inst);
  }
  auto lineage = parent.task.difficulty_lineage;
  lineage.emplace_back(iteration, to_string(DifficultyBucket::Easy));
  auto child = factory_.materialize(bp, task_id, core::TaskOrigin::EasyVariant, lineage);
  return child;
}

GeneratedTask TaskGenerator::make_child_medium(const GeneratedTask& parent, int iteration,
                                               const std::string& task_id,
                                               std::mt19937_64& rng) const {
  // Same skills, different grounding: rotate to the next context and redraw
  // parameters there.
  const auto ctxs = factory_.contexts().ids_for_app(parent.blueprint.app_id);
  std::string next_ctx = parent.blueprint.context_id;
  for (size_t i = 0; i < ctxs.size(); ++i) {
    if (ctxs[i] == parent.blueprint.context_id) {
      next_ctx = ctxs[(i + 1) % ctxs.size()];
      break;
    }
  }

  TaskBlueprint bp{parent.blueprint.app_id, next_ctx, {}};
  std::vector<std::string> claimed;
  for (const auto& inst : parent.blueprint.sub_goals) {
    // Redraw parameters for the same template in the new context.
    for (int attempt = 0; attempt < 32; ++attempt) {
      std::vector<std::string> tentative = claimed;
      auto drawn =
          factory_.draw_instance(bp.app_id, next_ctx, rng, false, nullptr, tentative);
      if (drawn && drawn->tag == inst.tag) {
        bp.sub_goals.push_back(*drawn);
        claimed = std::move(tentative);
        break;
      }
    }
  }
  if (bp.sub_goals.empty()) bp = parent.blueprint;  // nothing redrawable: keep grounding
  auto lineage = parent.task.difficulty_lineage;
  lineage.emplace_back(iteration, to_string(DifficultyBucket::Medium));
  return factory_.materialize(bp, task_id, core::TaskOrigin::MediumVariant, lineage);
}

std::vector<TaskBlueprint> TaskGenerator::decompose_hard(const GeneratedTask& parent) const {
  std::vector<TaskBlueprint> out;
  for (const auto& inst : parent.blueprint.sub_goals) {
    out.push_back({parent.blueprint.app_id, parent.blueprint.context_id, {inst}});
  }
  return out;
}

TaskSet TaskGenerator::generate_next(const TaskSet& previous, const CapabilityReport& report,
                                     std::uint64_t seed) const {
  if (previous.empty()) throw ValidationError("previous task set is empty");
  for (const auto& t : previous) {
    if (report.find(t.task.task_id) == nullptr) {
      throw ValidationError("capability report does not cover task " + t.task.task_id);
    }
  }
  const int iteration = report.iteration;
  auto buckets = bucketize(report, config_.delta_low, config_.delta_high);

  std::vector<const GeneratedTask*> easy, medium, hard;
  for (const auto& t : previous) {
    auto it = buckets.find(t.task.task_id);
    // Incomplete capability entries default to the hardest treatment.
    const DifficultyBucket b = it == buckets.end() ? DifficultyBucket::Hard : it->second;
    switch (b) {
      case DifficultyBucket::Easy: easy.push_back(&t); break;
      case DifficultyBucket::Medium: medium.push_back(&t); break;
      case DifficultyBucket::Hard: hard.push_back(&t); break;
    }
  }

  // Proportional budget split with largest remainders.
  const int budget = config_.task_budget;
  const double total = static_cast<double>(previous.size());
  struct Share {
    DifficultyBucket bucket;
    double exact;
    int whole;
  };
  std::vector<Share> shares;
  for (auto [bucket, n] : {std::pair{DifficultyBucket::Easy, easy.size()},
                           std::pair{DifficultyBucket::Medium, medium.size()},
                           std::pair{DifficultyBucket::Hard, hard.size()}}) {
    const double exact = budget * static_cast<double>(n) / total;
    shares.push_back({bucket, exact, static_cast<int>(exact)});
  }
  int assigned = 0;
  for (const auto& s : shares) assigned += s.whole;
  std::stable_sort(shares.begin(), shares.end(), [](const Share& a, const Share& b) {
    return a.exact - static_cast<int>(a.exact) > b.exact - static_cast<int>(b.exact);
  });
  for (int i = 0; assigned < budget; ++i) {
    shares[static_cast<size_t>(i) % shares.size()].whole += 1;
    ++assigned;
  }

  std::mt19937_64 rng(core::derive_seed(seed, "generate_next", iteration));
  TaskSet out;
  int counter = 0;
  auto next_id = [&](const char* kind) {
    char id[96];
    std::snprintf(id, sizeof(id), "it%d-%s-%s-%03d", iteration + 1,
                  previous.front().blueprint.app_id.c_str(), kind, counter++);
    return std::string(id);
  };

  for (const auto& share : shares) {
    const auto* parents = share.bucket == DifficultyBucket::Easy     ? &easy
                          : share.bucket == DifficultyBucket::Medium ? &medium
                                                                     : &hard;
    if (share.whole == 0) continue;
    if (parents->empty()) {
      // Redistribute an empty bucket's share across the other buckets by
      // cycling all parents.
      for (int i = 0; i < share.whole; ++i) {
        const GeneratedTask& parent = previous[rng() % previous.size()];
        out.push_back(make_child_medium(parent, iteration, next_id("fill"), rng));
      }
      continue;
    }
    if (share.bucket == DifficultyBucket::Hard) {
      // Each Hard parent contributes its single-skill subtasks round-robin.
      std::vector<std::vector<TaskBlueprint>> pieces;
      for (const auto* p : *parents) pieces.push_back(decompose_hard(*p));
      std::vector<size_t> cursor(pieces.size(), 0);
      int produced = 0;
      for (size_t pi = 0; produced < share.whole; pi = (pi + 1) % pieces.size()) {
        const auto* parent = (*parents)[pi];
        auto& cur = cursor[pi];
        const auto& bp = pieces[pi][cur % pieces[pi].size()];
        cur += 1;
        auto lineage = parent->task.difficulty_lineage;
        lineage.emplace_back(iteration, to_string(DifficultyBucket::Hard));
        out.push_back(factory_.materialize(bp, next_id("sub"),
                                           core::TaskOrigin::HardSubtask, lineage));
        ++produced;
      }
    } else {
      int produced = 0;
      for (size_t pi = 0; produced < share.whole; pi = (pi + 1) % parents->size()) {
        const GeneratedTask& parent = *(*parents)[pi];
        if (share.bucket == DifficultyBucket::Easy) {
          out.push_back(make_child_easy(parent, iteration, next_id("grow"), rng));
        } else {
          out.push_back(make_child_medium(parent, iteration, next_id("vary"), rng));
        }
        ++produced;
      }
    }
  }
  return out;
}

TaskSet TaskGenerator::generate_eval_suite(const std::string& app_id, int atomic,
                                           int composite, std::uint64_t seed) const {
  const auto ctxs = factory_.contexts().ids_for_app(app_id);
  if (ctxs.empty()) throw ValidationError("no contexts for app " + app_id);
  std::mt19937_64 rng(core::derive_seed(seed, "eval_suite:" + app_id));

  TaskSet out;
  int counter = 0;
  auto make = [&](int sub_goals) {
    const auto& ctx = ctxs[counter % ctxs.size()];
    std::vector<std::string> claimed;
    TaskBlueprint bp{app_id, ctx, {}};
    for (int g = 0; g < sub_goals; ++g) {
      auto inst = factory_.draw_instance(app_id, ctx, rng, sub_goals > 1, nullptr, claimed);
      if (inst) bp.sub_goals.push_back(*inst);
    }
    if (bp.sub_goals.empty()) return;
    char id[96];
    std::snprintf(id, sizeof(id), "eval-%s-%03d", app_id.c_str(), counter++);
    out.push_back(factory_.materialize(bp, id, core::TaskOrigin::Ingested, {}));
  };
  for (int i = 0; i < atomic; ++i) make(1);
  for (int i = 0; i < composite; ++i) make(2);
  return out;
}

}  // namespace guirl::curriculum
