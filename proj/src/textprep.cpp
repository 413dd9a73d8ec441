#include "factshap/textprep.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include <unicode/normalizer2.h>
#include <unicode/unistr.h>

#include "factshap/error.hpp"

namespace factshap {

namespace {

using nlohmann::json;

std::string nfc(std::string_view text) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* normalizer = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) return std::string(text);
  const auto input = icu::UnicodeString::fromUTF8(
      icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
  icu::UnicodeString normalized = normalizer->normalize(input, status);
  if (U_FAILURE(status)) return std::string(text);
  std::string out;
  normalized.toUTF8String(out);
  return out;
}

bool ascii_alnum(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
}

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

}  // namespace

std::string stem_token(std::string_view token) {
  std::string w(token);
  if (w.size() <= 3 || all_digits(w)) return w;
  if (ends_with(w, "ies") && !ends_with(w, "eies") && !ends_with(w, "aies") && w.size() > 4) {
    w.replace(w.size() - 3, 3, "y");
  } else if (ends_with(w, "sses")) {
    w.resize(w.size() - 2);
  } else if (ends_with(w, "uses") && w.size() >= 7) {
    w.resize(w.size() - 2);
  } else if (ends_with(w, "xes") || ends_with(w, "ches") || ends_with(w, "shes")) {
    w.resize(w.size() - 2);
  } else if (ends_with(w, "s") && !ends_with(w, "ss") && !ends_with(w, "us") &&
             !ends_with(w, "is")) {
    w.pop_back();
  }
  return w;
}

TokenStream tokenize(std::string_view text, const TokenizerConfig& config) {
  const std::string normalized = nfc(text);
  TokenStream out;
  std::string current;
  auto flush = [&] {
    if (current.empty()) return;
    std::string token = std::move(current);
    current.clear();
    if (config.remove_stop_words && is_stop_word(token)) return;
    if (config.stem) token = stem_token(token);
    if (token.size() < config.min_token_length && !all_digits(token)) return;
    out.push_back(std::move(token));
  };
  for (char c : normalized) {
    if (ascii_alnum(c)) {
      current.push_back(static_cast<char>(c >= 'A' && c <= 'Z' ? c - 'A' + 'a' : c));
    } else {
      flush();
    }
  }
  flush();
  return out;
}

Vectorizer Vectorizer::fit(const std::vector<TokenStream>& corpus, const VectorizerConfig& config) {
  if (corpus.empty()) throw ValidationError("cannot fit a vectorizer on an empty corpus");
  std::map<std::string, std::size_t, std::less<>> df;
  for (const auto& doc : corpus) {
    std::set<std::string_view> seen(doc.begin(), doc.end());
    for (auto term : seen) ++df[std::string(term)];
  }

  Vectorizer v;
  v.config_ = config;
  v.doc_count_ = corpus.size();
  const double n = static_cast<double>(corpus.size());
  for (const auto& [term, count] : df) {
    if (count < config.min_document_frequency) continue;
    v.column_.emplace(term, v.terms_.size());
    v.terms_.push_back(term);
    v.idf_.push_back(std::log((1.0 + n) / (1.0 + static_cast<double>(count))) + 1.0);
  }
  if (v.terms_.empty()) throw ValidationError("vocabulary is empty after thresholding");
  return v;
}

long Vectorizer::column_of(std::string_view term) const {
  auto it = column_.find(term);
  return it == column_.end() ? -1 : static_cast<long>(it->second);
}

FeatureVector Vectorizer::transform(const TokenStream& tokens) const {
  std::map<std::size_t, double> counts;
  for (const auto& token : tokens) {
    const long col = column_of(token);
    if (col >= 0) counts[static_cast<std::size_t>(col)] += 1.0;
  }
  std::vector<std::size_t> idx;
  std::vector<double> val;
  idx.reserve(counts.size());
  val.reserve(counts.size());
  for (const auto& [col, count] : counts) {
    idx.push_back(col);
    val.push_back(count * idf_[col]);
  }
  FeatureVector out(dimension(), std::move(idx), std::move(val));
  if (config_.l2_normalize && !out.empty()) out.scale(1.0 / out.norm());
  return out;
}

FeatureVector Vectorizer::transform_text(std::string_view text) const {
  return transform(tokenize(text, config_.tokenizer));
}

json to_json(const TokenizerConfig& config) {
  return {{"remove_stop_words", config.remove_stop_words},
          {"stem", config.stem},
          {"min_token_length", config.min_token_length}};
}

TokenizerConfig tokenizer_config_from_json(const json& j) {
  TokenizerConfig c;
  c.remove_stop_words = j.value("remove_stop_words", c.remove_stop_words);
  c.stem = j.value("stem", c.stem);
  c.min_token_length = j.value("min_token_length", c.min_token_length);
  return c;
}

json to_json(const VectorizerConfig& config) {
  return {{"tokenizer", to_json(config.tokenizer)},
          {"min_document_frequency", config.min_document_frequency},
          {"l2_normalize", config.l2_normalize}};
}

VectorizerConfig vectorizer_config_from_json(const json& j) {
  VectorizerConfig c;
  if (j.contains("tokenizer")) c.tokenizer = tokenizer_config_from_json(j.at("tokenizer"));
  c.min_document_frequency = j.value("min_document_frequency", c.min_document_frequency);
  c.l2_normalize = j.value("l2_normalize", c.l2_normalize);
  return c;
}

json Vectorizer::to_json() const {
  return {{"kind", "tfidf"},
          {"config", factshap::to_json(config_)},
          {"doc_count", doc_count_},
          {"vocabulary", terms_},
          {"idf", idf_}};
}

Vectorizer Vectorizer::from_json(const json& j) {
  Vectorizer v;
  try {
    v.config_ = vectorizer_config_from_json(j.at("config"));
    v.doc_count_ = j.at("doc_count").get<std::size_t>();
    v.terms_ = j.at("vocabulary").get<std::vector<std::string>>();
    v.idf_ = j.at("idf").get<std::vector<double>>();
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed vectorizer: ") + e.what());
  }
  if (v.terms_.size() != v.idf_.size()) throw ValidationError("vocabulary and idf lengths differ");
  for (std::size_t i = 0; i < v.terms_.size(); ++i) {
    if (i > 0 && !(v.terms_[i - 1] < v.terms_[i])) {
      throw ValidationError("vectorizer vocabulary is not sorted");
    }
    if (!(v.idf_[i] >= 0.0)) throw ValidationError("negative idf for '" + v.terms_[i] + "'");
    v.column_.emplace(v.terms_[i], i);
  }
  return v;
}

void Vectorizer::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write '" + path.string() + "'");
  out << to_json().dump(2) << '\n';
}

Vectorizer Vectorizer::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open '" + path.string() + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError("invalid vectorizer JSON in '" + path.string() + "': " + e.what());
  }
  return from_json(j);
}

}  // namespace factshap
