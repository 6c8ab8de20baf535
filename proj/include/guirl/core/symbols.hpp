#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "guirl/core/types.hpp"

namespace guirl::core {

// Fixed symbol table backing the action token encoding: four action-kind
// symbols, one symbol per known widget id, one per payload vocabulary word,
// and a terminal END marker. Symbol ids are dense and stable for a given
// (widget ids, words) input, so encode/decode is a bijection on valid actions.
class SymbolTable {
 public:
  SymbolTable() = default;

  // widget_ids and payload_words are deduplicated and sorted internally.
  static SymbolTable build(std::vector<std::string> widget_ids,
                           std::vector<std::string> payload_words);

  // Rebuilds a table from a serialized symbol name list (checkpoint loading).
  static SymbolTable from_names(const std::vector<std::string>& names);

  int size() const { return static_cast<int>(names_.size()); }
  const std::string& name(int symbol) const;
  bool valid(int symbol) const { return symbol >= 0 && symbol < size(); }

  int kind_symbol(ActionKind kind) const;
  int widget_symbol(const std::string& widget_id) const;  // throws if unknown
  int word_symbol(const std::string& word) const;         // throws if unknown
  int end_symbol() const { return end_symbol_; }

  bool is_kind(int symbol) const { return symbol >= 0 && symbol < 4; }
  bool is_widget(int symbol) const {
    return symbol >= widget_begin_ && symbol < word_begin_;
  }
  bool is_word(int symbol) const { return symbol >= word_begin_ && symbol < end_symbol_; }

  ActionKind kind_of(int symbol) const;
  std::string widget_of(int symbol) const;
  std::string word_of(int symbol) const;

  bool has_widget(const std::string& widget_id) const;
  bool has_word(const std::string& word) const;

  const std::vector<std::string>& names() const { return names_; }
  int widget_count() const { return word_begin_ - widget_begin_; }
  int word_count() const { return end_symbol_ - word_begin_; }

  bool operator==(const SymbolTable& other) const { return names_ == other.names_; }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, int> index_;
  int widget_begin_ = 4;
  int word_begin_ = 4;
  int end_symbol_ = 4;
};

// Splits a payload string on single spaces. Empty payload yields no words.
std::vector<std::string> split_payload_words(const std::string& payload);

// Builds an Action with its token encoding. Throws ValidationError for
// invalid combinations (Terminate with a target, Click with a payload,
// unknown widget/word, ...).
Action encode_action(const SymbolTable& table, ActionKind kind, const std::string& target,
                     const std::string& payload);

// Inverse of encode_action. Throws ValidationError on malformed sequences.
Action decode_action(const SymbolTable& table, const std::vector<int>& token_seq);

}  // namespace guirl::core
