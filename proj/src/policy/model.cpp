#include "guirl/policy/model.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "guirl/core/digest.hpp"
#include "guirl/core/error.hpp"

namespace guirl::policy {

using core::ActionKind;
using core::Observation;
using core::SymbolTable;
using core::WidgetKind;

std::vector<LayerSegment> build_layer_map(const FeatureConfig& cfg, int vocab) {
  const std::int64_t F = cfg.feature_dim;
  const std::int64_t H = cfg.hidden_dim;
  const std::int64_t V = vocab;
  std::vector<LayerSegment> map;
  std::int64_t off = 0;
  auto add = [&](const char* name, std::int64_t len, const char* group) {
    map.push_back({name, off, len, group});
    off += len;
  };
  add("embed_w", H * F, "perception");
  add("embed_b", H, "perception");
  add("hidden_w", H * H, "backbone");
  add("hidden_b", H, "backbone");
  add("sym_embed", V * H, "backbone");
  add("out_w", V * H, "backbone");
  add("out_b", V, "backbone");
  return map;
}

void validate_layer_map(const PolicySnapshot& snap) {
  std::int64_t expected = 0;
  for (const auto& seg : snap.layer_map) {
    if (seg.offset != expected) throw ValidationError("layer map has a gap or overlap");
    if (seg.length < 0) throw ValidationError("negative layer length");
    if (seg.group != "perception" && seg.group != "backbone") {
      throw ValidationError("unknown layer group: " + seg.group);
    }
    expected += seg.length;
  }
  if (expected != static_cast<std::int64_t>(snap.theta.size())) {
    throw ValidationError("layer map does not partition theta");
  }
}

PolicySnapshot make_initial_snapshot(const FeatureConfig& cfg, SymbolTable symbols,
                                     std::uint64_t init_seed) {
  PolicySnapshot snap;
  snap.config = cfg;
  snap.symbols = std::move(symbols);
  snap.layer_map = build_layer_map(cfg, snap.symbols.size());
  const auto& last = snap.layer_map.back();
  snap.theta.assign(static_cast<size_t>(last.offset + last.length), 0.0);
  snap.version = 0;

  std::mt19937_64 rng(init_seed);
  std::uniform_real_distribution<double> noise(-0.1, 0.1);
  for (const auto& seg : snap.layer_map) {
    if (seg.name == "embed_w" || seg.name == "sym_embed" || seg.name == "hidden_w") {
      for (std::int64_t i = 0; i < seg.length; ++i) {
        snap.theta[static_cast<size_t>(seg.offset + i)] = noise(rng);
      }
    }
  }
  return snap;
}

std::string snapshot_digest(const PolicySnapshot& snap) {
  core::DigestWriter d;
  d.write_i64(snap.version);
  d.write_i64(static_cast<std::int64_t>(snap.theta.size()));
  for (double v : snap.theta) d.write_double(v);
  for (const auto& seg : snap.layer_map) {
    d.write(seg.name);
    d.write_i64(seg.offset);
    d.write_i64(seg.length);
    d.write(seg.group);
  }
  d.write_i64(snap.config.feature_dim);
  d.write_i64(snap.config.hidden_dim);
  d.write_u64(snap.config.hash_seed);
  d.write_i64(snap.config.history_window);
  d.write_i64(snap.config.max_payload_words);
  for (const auto& n : snap.symbols.names()) d.write(n);
  return d.hex();
}

PolicyModel::PolicyModel(const PolicySnapshot& snapshot) : snap_(snapshot) {
  validate_layer_map(snap_);
  F_ = snap_.config.feature_dim;
  H_ = snap_.config.hidden_dim;
  V_ = snap_.symbols.size();
  embed_w_ = segment("embed_w");
  embed_b_ = segment("embed_b");
  hidden_w_ = segment("hidden_w");
  hidden_b_ = segment("hidden_b");
  sym_embed_ = segment("sym_embed");
  out_w_ = segment("out_w");
  out_b_ = segment("out_b");
}

std::span<const double> PolicyModel::segment(const char* name) const {
  for (const auto& seg : snap_.layer_map) {
    if (seg.name == name) {
      return {snap_.theta.data() + seg.offset, static_cast<size_t>(seg.length)};
    }
  }
  throw ValidationError(std::string("missing layer: ") + name);
}

std::vector<int> PolicyModel::legal_symbols(const Observation& obs,
                                            const std::vector<int>& prefix) const {
  const SymbolTable& t = snap_.symbols;
  std::vector<int> legal;

  if (prefix.empty()) {
    bool click = false, type = false, scroll = false;
    for (const auto& w : obs.screen) {
      if (!w.enabled || !t.has_widget(w.id)) continue;
      click = click || clickable(w.kind);
      type = type || w.kind == WidgetKind::TextField;
      scroll = scroll || w.kind == WidgetKind::ListItem;
    }
    if (click) legal.push_back(t.kind_symbol(ActionKind::Click));
    if (type) legal.push_back(t.kind_symbol(ActionKind::Type));
    if (scroll) legal.push_back(t.kind_symbol(ActionKind::Scroll));
    legal.push_back(t.kind_symbol(ActionKind::Terminate));
    return legal;
  }

  const ActionKind kind = t.kind_of(prefix[0]);
  if (kind == ActionKind::Terminate) return {};  // sequence already complete

  if (prefix.size() == 1) {
    for (const auto& w : obs.screen) {
      if (!w.enabled || !t.has_widget(w.id)) continue;
      bool ok = false;
      switch (kind) {
        case ActionKind::Click: ok = clickable(w.kind); break;
        case ActionKind::Type: ok = w.kind == WidgetKind::TextField; break;
        case ActionKind::Scroll: ok = w.kind == WidgetKind::ListItem; break;
        default: break;
      }
      if (ok) legal.push_back(t.widget_symbol(w.id));
    }
    std::sort(legal.begin(), legal.end());
    return legal;
  }

  if (kind != ActionKind::Type) return {};  // click/scroll sequences end at the target

  const int payload_emitted = static_cast<int>(prefix.size()) - 2;
  if (!prefix.empty() && prefix.back() == t.end_symbol()) return {};
  if (payload_emitted >= snap_.config.max_payload_words) {
    return {t.end_symbol()};  // forced end marker
  }
  for (int s = 0; s < V_; ++s) {
    if (t.is_word(s)) legal.push_back(s);
  }
  legal.push_back(t.end_symbol());
  return legal;
}

bool PolicyModel::clickable(WidgetKind kind) {
  return kind == WidgetKind::Button || kind == WidgetKind::Menu ||
         kind == WidgetKind::ListItem;
}

std::vector<double> PolicyModel::context_logits(const std::vector<double>& g) const {
  std::vector<double> z(static_cast<size_t>(V_));
  for (int v = 0; v < V_; ++v) {
    double acc = out_b_[v];
    const double* row = out_w_.data() + static_cast<size_t>(v) * H_;
    for (int i = 0; i < H_; ++i) acc += row[i] * g[static_cast<size_t>(i)];
    z[static_cast<size_t>(v)] = acc;
  }
  return z;
}

namespace {

// Softmax over the legal subset at the given temperature; stable via max
// subtraction. Returns probabilities aligned with `legal`.
std::vector<double> masked_softmax(const std::vector<double>& logits,
                                   const std::vector<int>& legal, double temperature) {
  double zmax = -1e300;
  for (int s : legal) zmax = std::max(zmax, logits[static_cast<size_t>(s)]);
  std::vector<double> p(legal.size());
  double sum = 0.0;
  for (size_t i = 0; i < legal.size(); ++i) {
    const double e =
        std::exp((logits[static_cast<size_t>(legal[i])] - zmax) / temperature);
    p[i] = e;
    sum += e;
  }
  for (double& v : p) v /= sum;
  return p;
}

}  // namespace

PolicyModel::Forward PolicyModel::score_action(
    const std::string& task_text, const std::vector<const Observation*>& history,
    const std::vector<int>& tokens, double temperature) const {
  if (temperature <= 0.0) throw ValidationError("temperature must be > 0");
  if (tokens.empty()) throw ValidationError("cannot score an empty token sequence");
  const Observation& obs = *history.back();

  Forward f;
  f.features = extract_features(snap_.config, task_text, history);

  f.h0.assign(static_cast<size_t>(H_), 0.0);
  for (int i = 0; i < H_; ++i) {
    double acc = embed_b_[i];
    const double* row = embed_w_.data() + static_cast<size_t>(i) * F_;
    for (int j = 0; j < F_; ++j) acc += row[j] * f.features[static_cast<size_t>(j)];
    f.h0[static_cast<size_t>(i)] = acc;
  }
  f.hidden.assign(static_cast<size_t>(H_), 0.0);
  for (int i = 0; i < H_; ++i) {
    double acc = hidden_b_[i];
    const double* row = hidden_w_.data() + static_cast<size_t>(i) * H_;
    for (int j = 0; j < H_; ++j) acc += row[j] * f.h0[static_cast<size_t>(j)];
    f.hidden[static_cast<size_t>(i)] = std::tanh(acc);
  }

  std::vector<double> g = f.hidden;
  std::vector<int> prefix;
  for (size_t p = 0; p < tokens.size(); ++p) {
    if (p > 0) {
      // Fold the previous symbol into the recurrent context.
      const double* row = sym_embed_.data() + static_cast<size_t>(tokens[p - 1]) * H_;
      for (int i = 0; i < H_; ++i) {
        g[static_cast<size_t>(i)] = std::tanh(g[static_cast<size_t>(i)] + row[i]);
      }
    }
    const auto legal = legal_symbols(obs, prefix);
    const int y = tokens[p];
    if (std::find(legal.begin(), legal.end(), y) == legal.end()) {
      throw ValidationError("illegal token at index " + std::to_string(p) + " (symbol " +
                            snap_.symbols.name(y) + ")");
    }
    const auto logits = context_logits(g);
    const auto probs = masked_softmax(logits, legal, temperature);
    double lp = 0.0;
    for (size_t i = 0; i < legal.size(); ++i) {
      if (legal[i] == y) lp = std::log(probs[i]);
    }
    if (legal.size() == 1) lp = 0.0;  // forced symbol, exactly probability 1

    f.context.push_back(g);
    f.legal.push_back(legal);
    f.probs.push_back(probs);
    f.log_probs.push_back(lp);
    prefix.push_back(y);
  }
  f.tokens = tokens;
  return f;
}

std::pair<core::Action, std::vector<double>> PolicyModel::sample_action(
    const std::string& task_text, const std::vector<const Observation*>& history,
    double temperature, std::uint64_t seed) const {
  if (temperature <= 0.0) throw ValidationError("temperature must be > 0");
  const Observation& obs = *history.back();
  std::mt19937_64 rng(seed);

  // Forward prefix shared with score_action.
  const auto features = extract_features(snap_.config, task_text, history);
  std::vector<double> h0(static_cast<size_t>(H_), 0.0);
  for (int i = 0; i < H_; ++i) {
    double acc = embed_b_[i];
    const double* row = embed_w_.data() + static_cast<size_t>(i) * F_;
    for (int j = 0; j < F_; ++j) acc += row[j] * features[static_cast<size_t>(j)];
    h0[static_cast<size_t>(i)] = acc;
  }
  std::vector<double> g(static_cast<size_t>(H_), 0.0);
  for (int i = 0; i < H_; ++i) {
    double acc = hidden_b_[i];
    const double* row = hidden_w_.data() + static_cast<size_t>(i) * H_;
    for (int j = 0; j < H_; ++j) acc += row[j] * h0[static_cast<size_t>(j)];
    g[static_cast<size_t>(i)] = std::tanh(acc);
  }

  std::vector<int> tokens;
  std::vector<double> lps;
  while (true) {
    if (!tokens.empty()) {
      const double* row = sym_embed_.data() + static_cast<size_t>(tokens.back()) * H_;
      for (int i = 0; i < H_; ++i) {
        g[static_cast<size_t>(i)] = std::tanh(g[static_cast<size_t>(i)] + row[i]);
      }
    }
    const auto legal = legal_symbols(obs, tokens);
    if (legal.empty()) {
      if (tokens.empty()) {
        throw ValidationError("no legal action available");  // cannot happen: TERMINATE
      }
      break;  // sequence complete
    }
    const auto logits = context_logits(g);
    const auto probs = masked_softmax(logits, legal, temperature);

    double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    size_t pick = probs.size() - 1;
    double cum = 0.0;
    for (size_t i = 0; i < probs.size(); ++i) {
      cum += probs[i];
      if (u <= cum) {
        pick = i;
        break;
      }
    }
    tokens.push_back(legal[pick]);
    lps.push_back(legal.size() == 1 ? 0.0 : std::log(probs[pick]));
  }

  core::Action action = core::decode_action(snap_.symbols, tokens);
  return {std::move(action), std::move(lps)};
}

void PolicyModel::accumulate_log_prob_gradient(const Forward& f,
                                               const std::vector<double>& dlp,
                                               double temperature,
                                               std::vector<double>& grad) const {
  if (dlp.size() != f.tokens.size()) throw ValidationError("dlp length mismatch");
  if (grad.size() != snap_.theta.size()) throw ValidationError("grad length mismatch");

  auto seg_off = [&](const char* name) -> std::int64_t {
    for (const auto& seg : snap_.layer_map) {
      if (seg.name == name) return seg.offset;
    }
    throw ValidationError("missing layer");
  };
  const std::int64_t o_embed_w = seg_off("embed_w"), o_embed_b = seg_off("embed_b"),
                     o_hidden_w = seg_off("hidden_w"), o_hidden_b = seg_off("hidden_b"),
                     o_sym = seg_off("sym_embed"), o_out_w = seg_off("out_w"),
                     o_out_b = seg_off("out_b");

  const size_t P = f.tokens.size();
  // d(loss)/d(g_p), accumulated backwards through the recurrence.
  std::vector<double> dg(static_cast<size_t>(H_), 0.0);
  for (size_t pi = P; pi-- > 0;) {
    const auto& legal = f.legal[pi];
    const auto& probs = f.probs[pi];
    const auto& g = f.context[pi];
    const double w = dlp[pi];
    if (w != 0.0) {
      for (size_t i = 0; i < legal.size(); ++i) {
        const int s = legal[i];
        const double dz =
            w * (((s == f.tokens[pi]) ? 1.0 : 0.0) - probs[i]) / temperature;
        grad[static_cast<size_t>(o_out_b + s)] += dz;
        double* gw = grad.data() + o_out_w + static_cast<std::int64_t>(s) * H_;
        const double* ow = out_w_.data() + static_cast<size_t>(s) * H_;
        for (int k = 0; k < H_; ++k) {
          gw[k] += dz * g[static_cast<size_t>(k)];
          dg[static_cast<size_t>(k)] += dz * ow[k];
        }
      }
    }
    if (pi > 0) {
      // g_p = tanh(g_{p-1} + A[y_{p-1}]) ; push dg through the tanh.
      const int prev = f.tokens[pi - 1];
      double* gsym = grad.data() + o_sym + static_cast<std::int64_t>(prev) * H_;
      for (int k = 0; k < H_; ++k) {
        const double gv = f.context[pi][static_cast<size_t>(k)];
        const double dv = dg[static_cast<size_t>(k)] * (1.0 - gv * gv);
        gsym[k] += dv;
        dg[static_cast<size_t>(k)] = dv;  // also d/d(g_{p-1})
      }
    }
  }

  // dg now holds d(loss)/d(hidden); hidden = tanh(W_h h0 + b_h).
  std::vector<double> du(static_cast<size_t>(H_));
  for (int i = 0; i < H_; ++i) {
    const double h = f.hidden[static_cast<size_t>(i)];
    du[static_cast<size_t>(i)] = dg[static_cast<size_t>(i)] * (1.0 - h * h);
  }
  std::vector<double> dh0(static_cast<size_t>(H_), 0.0);
  for (int i = 0; i < H_; ++i) {
    grad[static_cast<size_t>(o_hidden_b + i)] += du[static_cast<size_t>(i)];
    double* gw = grad.data() + o_hidden_w + static_cast<std::int64_t>(i) * H_;
    const double* hw = hidden_w_.data() + static_cast<size_t>(i) * H_;
    for (int j = 0; j < H_; ++j) {
      gw[j] += du[static_cast<size_t>(i)] * f.h0[static_cast<size_t>(j)];
      dh0[static_cast<size_t>(j)] += du[static_cast<size_t>(i)] * hw[j];
    }
  }
  for (int i = 0; i < H_; ++i) {
    grad[static_cast<size_t>(o_embed_b + i)] += dh0[static_cast<size_t>(i)];
    double* gw = grad.data() + o_embed_w + static_cast<std::int64_t>(i) * F_;
    for (int j = 0; j < F_; ++j) {
      gw[j] += dh0[static_cast<size_t>(i)] * f.features[static_cast<size_t>(j)];
    }
  }
}

}  // namespace guirl::policy
