#pragma once

#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "readkit/common.hpp"

namespace readkit::nn {

// Token ids: 0..3 specials, 4..19 the sixteen level control tokens, base
// vocabulary afterwards.
class ControlVocab {
 public:
  static constexpr int kPadId = 0;
  static constexpr int kBosId = 1;
  static constexpr int kEosId = 2;
  static constexpr int kUnkId = 3;
  static constexpr int kNumLevels = 16;
  static constexpr int kFirstControlId = 4;
  static constexpr int kFirstBaseId = kFirstControlId + kNumLevels;

  // Base tokens by descending frequency across texts, ties broken
  // lexicographically so builds are reproducible.
  static ControlVocab build(const std::vector<std::string>& texts,
                            std::size_t max_base_tokens = 492);
  static ControlVocab specials_only();
  static ControlVocab from_tokens(std::vector<std::string> tokens);

  int control_id(int level) const;  // throws UnknownLevelError outside [1,16]
  int id_of(std::string_view token) const;  // kUnkId when absent
  const std::string& token_of(int id) const;
  std::vector<int> encode(std::string_view text) const;
  std::string decode(const std::vector<int>& ids) const;

  int size() const { return static_cast<int>(tokens_.size()); }
  const std::vector<std::string>& tokens() const { return tokens_; }

  // Lowercased alpha/digit runs; the tokenizer behind both build and encode.
  static std::vector<std::string> word_tokens(std::string_view text);

 private:
  ControlVocab() = default;
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> index_;
};

std::vector<int> prepend_control_token(const std::vector<int>& input_ids, int level,
                                       const ControlVocab& vocab);

}  // namespace readkit::nn
