#include "readkit/nn/vocab.hpp"

#include <algorithm>
#include <map>

#include "readkit/text_core.hpp"

namespace readkit::nn {

namespace {

std::vector<std::string> special_and_control_tokens() {
  std::vector<std::string> tokens = {"<pad>", "<bos>", "<eos>", "<unk>"};
  for (int i = 1; i <= ControlVocab::kNumLevels; ++i) {
    tokens.push_back("<yod_" + std::to_string(i) + ">");
  }
  return tokens;
}

}  // namespace

std::vector<std::string> ControlVocab::word_tokens(std::string_view input) {
  std::vector<std::string> out;
  auto cps = text::decode_utf8(input);
  std::u32string run;
  auto flush = [&] {
    if (!run.empty()) {
      out.push_back(text::encode_utf8(run));
      run.clear();
    }
  };
  for (char32_t cp : cps) {
    if (text::is_alpha(cp)) {
      run.push_back(text::turkish_lower(cp));
    } else if (text::is_digit(cp)) {
      run.push_back(cp);
    } else {
      flush();
    }
  }
  flush();
  return out;
}

ControlVocab ControlVocab::specials_only() {
  ControlVocab v;
  v.tokens_ = special_and_control_tokens();
  for (std::size_t i = 0; i < v.tokens_.size(); ++i) {
    v.index_[v.tokens_[i]] = static_cast<int>(i);
  }
  return v;
}

ControlVocab ControlVocab::build(const std::vector<std::string>& texts,
                                 std::size_t max_base_tokens) {
  std::map<std::string, std::int64_t> freq;
  for (const auto& text : texts) {
    for (auto& tok : word_tokens(text)) ++freq[tok];
  }
  std::vector<std::pair<std::string, std::int64_t>> ranked(freq.begin(), freq.end());
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });

  ControlVocab v = specials_only();
  for (const auto& [tok, count] : ranked) {
    if (v.tokens_.size() >= max_base_tokens + kFirstBaseId) break;
    v.index_[tok] = static_cast<int>(v.tokens_.size());
    v.tokens_.push_back(tok);
  }
  return v;
}

ControlVocab ControlVocab::from_tokens(std::vector<std::string> tokens) {
  auto expected = special_and_control_tokens();
  if (tokens.size() < expected.size()) {
    throw Error("vocabulary too small to hold reserved tokens");
  }
  for (std::size_t i = 0; i < expected.size(); ++i) {
    if (tokens[i] != expected[i]) {
      throw Error("vocabulary reserved-token layout mismatch at id " +
                  std::to_string(i));
    }
  }
  ControlVocab v;
  v.tokens_ = std::move(tokens);
  for (std::size_t i = 0; i < v.tokens_.size(); ++i) {
    v.index_[v.tokens_[i]] = static_cast<int>(i);
  }
  return v;
}

int ControlVocab::control_id(int level) const {
  if (level < 1 || level > kNumLevels) throw UnknownLevelError(level);
  return kFirstControlId + level - 1;
}

int ControlVocab::id_of(std::string_view token) const {
  auto it = index_.find(std::string(token));
  return it == index_.end() ? kUnkId : it->second;
}

const std::string& ControlVocab::token_of(int id) const {
  if (id < 0 || id >= size()) throw Error("token id out of range");
  return tokens_[static_cast<std::size_t>(id)];
}

std::vector<int> ControlVocab::encode(std::string_view text) const {
  std::vector<int> ids;
  for (auto& tok : word_tokens(text)) ids.push_back(id_of(tok));
  return ids;
}

std::string ControlVocab::decode(const std::vector<int>& ids) const {
  std::string out;
  for (int id : ids) {
    if (!out.empty()) out += ' ';
    out += token_of(id);
  }
  return out;
}

std::vector<int> prepend_control_token(const std::vector<int>& input_ids, int level,
                                       const ControlVocab& vocab) {
  std::vector<int> out;
  out.reserve(input_ids.size() + 1);
  out.push_back(vocab.control_id(level));
  out.insert(out.end(), input_ids.begin(), input_ids.end());
  return out;
}

}  // namespace readkit::nn
