#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "factshap/features.hpp"

namespace factshap {

struct TokenizerConfig {
  bool remove_stop_words = true;
  bool stem = true;
  // Tokens shorter than this are dropped unless all digits.
  std::size_t min_token_length = 2;

  bool operator==(const TokenizerConfig&) const = default;
};

using TokenStream = std::vector<std::string>;

// NFC-normalizes, lowercases, splits on anything that is not an ASCII
// letter or digit, drops stop words, stems, and drops short tokens.
TokenStream tokenize(std::string_view text, const TokenizerConfig& config = {});

// Plural-stripping suffix stemmer ("viruses" -> "virus", "cities" -> "city").
std::string stem_token(std::string_view token);

// The bundled English stop list, sorted.
const std::vector<std::string_view>& stop_words();
bool is_stop_word(std::string_view token);

struct VectorizerConfig {
  TokenizerConfig tokenizer;
  std::size_t min_document_frequency = 1;
  bool l2_normalize = true;

  bool operator==(const VectorizerConfig&) const = default;
};

// TF-IDF with raw term counts and smoothed idf:
//   idf(t) = ln((1 + N) / (1 + df(t))) + 1
class Vectorizer {
 public:
  Vectorizer() = default;

  static Vectorizer fit(const std::vector<TokenStream>& corpus, const VectorizerConfig& config = {});

  FeatureVector transform(const TokenStream& tokens) const;
  FeatureVector transform_text(std::string_view text) const;

  std::size_t dimension() const { return terms_.size(); }
  std::size_t doc_count() const { return doc_count_; }
  const VectorizerConfig& config() const { return config_; }
  // Column -> term, lexicographic.
  const std::vector<std::string>& terms() const { return terms_; }
  const std::vector<double>& idf() const { return idf_; }
  // -1 when out of vocabulary.
  long column_of(std::string_view term) const;

  nlohmann::json to_json() const;
  static Vectorizer from_json(const nlohmann::json& j);
  void save(const std::filesystem::path& path) const;
  static Vectorizer load(const std::filesystem::path& path);

  bool operator==(const Vectorizer&) const = default;

 private:
  VectorizerConfig config_;
  std::size_t doc_count_ = 0;
  std::vector<std::string> terms_;
  std::vector<double> idf_;
  std::map<std::string, std::size_t, std::less<>> column_;
};

nlohmann::json to_json(const TokenizerConfig& config);
TokenizerConfig tokenizer_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const VectorizerConfig& config);
VectorizerConfig vectorizer_config_from_json(const nlohmann::json& j);

}  // namespace factshap
