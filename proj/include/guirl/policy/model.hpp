#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "guirl/core/symbols.hpp"
#include "guirl/core/types.hpp"
#include "guirl/policy/features.hpp"

namespace guirl::policy {

struct LayerSegment {
  std::string name;
  std::int64_t offset = 0;
  std::int64_t length = 0;
  std::string group;  // "perception" or "backbone"

  bool operator==(const LayerSegment&) const = default;
};

// Immutable parameter snapshot. The layer map partitions theta exactly; the
// feature embedding is the "perception" group, everything else "backbone".
struct PolicySnapshot {
  std::vector<double> theta;
  std::vector<LayerSegment> layer_map;
  std::int64_t version = 0;
  FeatureConfig config;
  core::SymbolTable symbols;
};

// Layer map for the given dimensions; throws if it would not partition theta.
std::vector<LayerSegment> build_layer_map(const FeatureConfig& cfg, int vocab);
void validate_layer_map(const PolicySnapshot& snap);

// Score heads start at zero (uniform policy over legal symbols); embeddings
// and the hidden layer get small seeded uniform noise.
PolicySnapshot make_initial_snapshot(const FeatureConfig& cfg, core::SymbolTable symbols,
                                     std::uint64_t init_seed);

// Content digest over theta bit patterns, layer map, version and config.
std::string snapshot_digest(const PolicySnapshot& snap);

// Autoregressive scorer over action token sequences: hashed features feed a
// hidden layer; each emitted symbol folds into a recurrent context; per-symbol
// score heads are masked to the currently legal symbols.
class PolicyModel {
 public:
  explicit PolicyModel(const PolicySnapshot& snapshot);

  const PolicySnapshot& snapshot() const { return snap_; }

  // Legal next symbols given the observation and the tokens emitted so far.
  std::vector<int> legal_symbols(const core::Observation& obs,
                                 const std::vector<int>& prefix) const;

  struct Forward {
    std::vector<double> features;
    std::vector<double> h0;                     // embedding output
    std::vector<double> hidden;                 // tanh hidden state, g_0
    std::vector<std::vector<double>> context;   // g_p per position
    std::vector<std::vector<int>> legal;        // legal symbol ids per position
    std::vector<std::vector<double>> probs;     // softmax over legal per position
    std::vector<int> tokens;
    std::vector<double> log_probs;
  };

  // Exact per-token log-probabilities of an existing token sequence.
  // Throws ValidationError naming the offending index if a token is illegal.
  Forward score_action(const std::string& task_text,
                       const std::vector<const core::Observation*>& history,
                       const std::vector<int>& tokens, double temperature) const;

  // Draws one action; reproducible from the seed. Returned log-probs are the
  // exact sampling-time values.
  std::pair<core::Action, std::vector<double>> sample_action(
      const std::string& task_text, const std::vector<const core::Observation*>& history,
      double temperature, std::uint64_t seed) const;

  // Adds sum_k dlp[k] * d(log pi(token_k))/d(theta) into grad.
  void accumulate_log_prob_gradient(const Forward& forward, const std::vector<double>& dlp,
                                    double temperature, std::vector<double>& grad) const;

 private:
  static bool clickable(core::WidgetKind kind);
  std::span<const double> segment(const char* name) const;
  std::vector<double> context_logits(const std::vector<double>& g) const;

  const PolicySnapshot& snap_;
  int F_, H_, V_;
  std::span<const double> embed_w_, embed_b_, hidden_w_, hidden_b_, sym_embed_, out_w_,
      out_b_;
};

}  // namespace guirl::policy
