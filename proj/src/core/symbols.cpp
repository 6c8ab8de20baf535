#include "guirl/core/symbols.hpp"

#include <algorithm>

#include "guirl/core/error.hpp"

namespace guirl::core {

namespace {

constexpr ActionKind kKindOrder[4] = {ActionKind::Click, ActionKind::Type,
                                      ActionKind::Scroll, ActionKind::Terminate};

void sort_unique(std::vector<std::string>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

}  // namespace

SymbolTable SymbolTable::build(std::vector<std::string> widget_ids,
                               std::vector<std::string> payload_words) {
  sort_unique(widget_ids);
  sort_unique(payload_words);

  SymbolTable t;
  for (ActionKind k : kKindOrder) t.names_.push_back("kind:" + to_string(k));
  t.widget_begin_ = static_cast<int>(t.names_.size());
  for (auto& id : widget_ids) t.names_.push_back("widget:" + id);
  t.word_begin_ = static_cast<int>(t.names_.size());
  for (auto& w : payload_words) t.names_.push_back("word:" + w);
  t.end_symbol_ = static_cast<int>(t.names_.size());
  t.names_.push_back("end");

  for (int i = 0; i < static_cast<int>(t.names_.size()); ++i) t.index_[t.names_[i]] = i;
  return t;
}

SymbolTable SymbolTable::from_names(const std::vector<std::string>& names) {
  std::vector<std::string> widgets;
  std::vector<std::string> words;
  if (names.size() < 5 || names.back() != "end") {
    throw ValidationError("malformed symbol name list");
  }
  for (const auto& n : names) {
    if (n.rfind("widget:", 0) == 0) widgets.push_back(n.substr(7));
    if (n.rfind("word:", 0) == 0) words.push_back(n.substr(5));
  }
  SymbolTable t = build(std::move(widgets), std::move(words));
  if (t.names_ != names) throw ValidationError("symbol name list is not in canonical order");
  return t;
}

const std::string& SymbolTable::name(int symbol) const {
  if (!valid(symbol)) throw ValidationError("symbol id out of range");
  return names_[symbol];
}

int SymbolTable::kind_symbol(ActionKind kind) const {
  for (int i = 0; i < 4; ++i)
    if (kKindOrder[i] == kind) return i;
  throw ValidationError("unknown ActionKind");
}

int SymbolTable::widget_symbol(const std::string& widget_id) const {
  auto it = index_.find("widget:" + widget_id);
  if (it == index_.end()) throw ValidationError("widget not in symbol table: " + widget_id);
  return it->second;
}

int SymbolTable::word_symbol(const std::string& word) const {
  auto it = index_.find("word:" + word);
  if (it == index_.end()) throw ValidationError("word not in payload vocabulary: " + word);
  return it->second;
}

ActionKind SymbolTable::kind_of(int symbol) const {
  if (!is_kind(symbol)) throw ValidationError("symbol is not an action kind");
  return kKindOrder[symbol];
}

std::string SymbolTable::widget_of(int symbol) const {
  if (!is_widget(symbol)) throw ValidationError("symbol is not a widget");
  return names_[symbol].substr(7);  // strip "widget:"
}

std::string SymbolTable::word_of(int symbol) const {
  if (!is_word(symbol)) throw ValidationError("symbol is not a word");
  return names_[symbol].substr(5);  // strip "word:"
}

bool SymbolTable::has_widget(const std::string& widget_id) const {
  return index_.count("widget:" + widget_id) > 0;
}

bool SymbolTable::has_word(const std::string& word) const {
  return index_.count("word:" + word) > 0;
}

std::vector<std::string> split_payload_words(const std::string& payload) {
  std::vector<std::string> words;
  std::string cur;
  for (char c : payload) {
    if (c == ' ') {
      if (!cur.empty()) words.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) words.push_back(cur);
  return words;
}

Action encode_action(const SymbolTable& table, ActionKind kind, const std::string& target,
                     const std::string& payload) {
  Action a;
  a.kind = kind;
  a.target = target;
  a.payload = payload;

  if (kind == ActionKind::Terminate) {
    if (!target.empty()) throw ValidationError("TERMINATE carries no target");
    if (!payload.empty()) throw ValidationError("TERMINATE carries no payload");
    a.token_seq = {table.kind_symbol(kind)};
    return a;
  }

  if (target.empty()) throw ValidationError(to_string(kind) + " requires a target widget");
  if (kind != ActionKind::Type && !payload.empty()) {
    throw ValidationError(to_string(kind) + " carries no payload");
  }

  a.token_seq.push_back(table.kind_symbol(kind));
  a.token_seq.push_back(table.widget_symbol(target));
  if (kind == ActionKind::Type) {
    for (const auto& w : split_payload_words(payload)) {
      a.token_seq.push_back(table.word_symbol(w));
    }
    a.token_seq.push_back(table.end_symbol());
    // Canonical payload: single spaces between words.
    std::string canonical;
    for (const auto& w : split_payload_words(payload)) {
      if (!canonical.empty()) canonical += ' ';
      canonical += w;
    }
    a.payload = canonical;
  }
  return a;
}

Action decode_action(const SymbolTable& table, const std::vector<int>& token_seq) {
  if (token_seq.empty()) throw ValidationError("empty token sequence");
  for (int s : token_seq) {
    if (!table.valid(s)) throw ValidationError("token out of symbol range");
  }

  const ActionKind kind = table.kind_of(token_seq[0]);
  if (kind == ActionKind::Terminate) {
    if (token_seq.size() != 1) throw ValidationError("TERMINATE must be a single token");
    Action a;
    a.kind = kind;
    a.token_seq = token_seq;
    return a;
  }

  if (token_seq.size() < 2) throw ValidationError("missing target token");
  const std::string target = table.widget_of(token_seq[1]);

  Action a;
  a.kind = kind;
  a.target = target;
  a.token_seq = token_seq;

  if (kind != ActionKind::Type) {
    if (token_seq.size() != 2) throw ValidationError("unexpected trailing tokens");
    return a;
  }

  if (token_seq.back() != table.end_symbol()) {
    throw ValidationError("TYPE token sequence must end with the end marker");
  }
  std::string payload;
  for (size_t i = 2; i + 1 < token_seq.size(); ++i) {
    if (!table.is_word(token_seq[i])) throw ValidationError("payload token is not a word");
    if (!payload.empty()) payload += ' ';
    payload += table.word_of(token_seq[i]);
  }
  a.payload = payload;
  return a;
}

}  // namespace guirl::core
