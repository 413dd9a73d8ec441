#include <algorithm>
#include <string_view>
#include <vector>

#include "factshap/textprep.hpp"

namespace factshap {

namespace {

// Common English function words. Contractions appear only as the fragments
// the tokenizer produces ("don't" -> "don", "t").
constexpr std::string_view kStopWords[] = {
    "a",        "about",   "above",    "after",    "again",      "against", "ain",     "all",
    "am",       "an",      "and",      "any",      "are",        "aren",    "as",      "at",
    "be",       "because", "been",     "before",   "being",      "below",   "between", "both",
    "but",      "by",      "can",      "couldn",   "d",          "did",     "didn",    "do",
    "does",     "doesn",   "doing",    "don",      "down",       "during",  "each",    "few",
    "for",      "from",    "further",  "had",      "hadn",       "has",     "hasn",    "have",
    "haven",    "having",  "he",       "her",      "here",       "hers",    "herself", "him",
    "himself",  "his",     "how",      "i",        "if",         "in",      "into",    "is",
    "isn",      "it",      "its",      "itself",   "just",       "ll",      "m",       "ma",
    "me",       "mightn",  "more",     "most",     "mustn",      "my",      "myself",  "needn",
    "no",       "nor",     "not",      "now",      "o",          "of",      "off",     "on",
    "once",     "only",    "or",       "other",    "our",        "ours",    "ourselves", "out",
    "over",     "own",     "re",       "s",        "same",       "shan",    "she",     "should",
    "shouldn",  "so",      "some",     "such",     "t",          "than",    "that",    "the",
    "their",    "theirs",  "them",     "themselves", "then",     "there",   "these",   "they",
    "this",     "those",   "through",  "to",       "too",        "under",   "until",   "up",
    "ve",       "very",    "was",      "wasn",     "we",         "were",    "weren",   "what",
    "when",     "where",   "which",    "while",    "who",        "whom",    "why",     "will",
    "with",     "won",     "wouldn",   "y",        "you",        "your",    "yours",   "yourself",
    "yourselves",
};

}  // namespace

const std::vector<std::string_view>& stop_words() {
  static const std::vector<std::string_view> sorted = [] {
    std::vector<std::string_view> v(std::begin(kStopWords), std::end(kStopWords));
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
  }();
  return sorted;
}

bool is_stop_word(std::string_view token) {
  const auto& words = stop_words();
  return std::binary_search(words.begin(), words.end(), token);
}

}  // namespace factshap
