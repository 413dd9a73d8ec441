#include "factshap/synthetic.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

#include <fmt/format.h>

#include "factshap/random.hpp"

namespace factshap {

namespace {

const std::vector<std::string> kTrueWords = {"confirmed", "clinical", "trial", "guidance"};
const std::vector<std::string> kFakeWords = {"miracle", "hoax", "secret", "cure"};
const std::vector<std::string> kNoiseWords = {
    "coronavirus", "pandemic", "people",   "health",  "city",      "report",  "week",     "hospital",
    "mask",        "vaccine",  "doctor",   "patient", "government", "spread", "infection", "virus",
    "school",      "travel",   "test",     "data",    "official",  "country", "worker",   "family",
    "water",       "symptom",  "lockdown", "market",  "online",    "local",   "nurse",    "county",
    "state",       "social",   "medium",   "video",   "message",   "community", "distance", "outbreak"};

std::string sentence(std::vector<std::string> words) {
  std::string out;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (i) out += ' ';
    out += words[i];
  }
  if (!out.empty()) out[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[0])));
  return out + ".";
}

}  // namespace

PlantedCorpus planted_corpus(const PlantedCorpusConfig& config) {
  PlantedCorpus out;
  out.config = config;
  out.true_words = kTrueWords;
  out.fake_words = kFakeWords;
  out.noise_words = kNoiseWords;

  Rng rng(config.seed);
  const auto n_true = static_cast<std::size_t>(std::llround(config.true_fraction * double(config.claims)));
  std::vector<ClaimRecord> records;
  records.reserve(config.claims);
  for (std::size_t i = 0; i < config.claims; ++i) {
    const bool truth = i < n_true;
    const auto& own = truth ? kTrueWords : kFakeWords;
    const auto& other = truth ? kFakeWords : kTrueWords;
    std::vector<std::string> words;
    for (std::size_t s = 0; s < config.signal_words; ++s) {
      const auto& list = uniform_unit(rng) < config.fidelity ? own : other;
      words.push_back(list[uniform_index(rng, list.size())]);
    }
    for (std::size_t s = 0; s < config.noise_words; ++s) {
      words.push_back(kNoiseWords[uniform_index(rng, kNoiseWords.size())]);
    }
    shuffle(std::span<std::string>(words), rng);
    ClaimRecord r;
    r.id = fmt::format("syn{:04d}", i);
    r.text = sentence(std::move(words));
    r.label = truth ? Label::true_claim : Label::fake_claim;
    if (i % 3 != 2) {
      r.source = truth ? "Health Agency Bulletin" : "Social Media Post";
      r.date = fmt::format("2020-{:02d}-{:02d}", 1 + i % 6, 1 + i % 28);
      r.evidence = truth ? "Statement published by the agency." : "Rated false by fact checkers.";
    }
    records.push_back(std::move(r));
  }
  // Interleave classes so file order does not encode the label.
  shuffle(std::span<ClaimRecord>(records), rng);
  out.dataset = Dataset("synthetic_claims", std::move(records));
  return out;
}

double planted_posterior(const PlantedCorpus& corpus, const TokenStream& tokens) {
  // Each signal draw is a word from the true list with probability f for
  // true claims and 1 - f for fake ones; noise words carry no evidence.
  const double f = corpus.config.fidelity;
  const double prior = corpus.config.true_fraction;
  double log_odds = std::log(prior) - std::log1p(-prior);
  for (const auto& t : tokens) {
    const bool in_true = std::find(corpus.true_words.begin(), corpus.true_words.end(), t) != corpus.true_words.end();
    const bool in_fake = std::find(corpus.fake_words.begin(), corpus.fake_words.end(), t) != corpus.fake_words.end();
    if (in_true) log_odds += std::log(f) - std::log1p(-f);
    if (in_fake) log_odds -= std::log(f) - std::log1p(-f);
  }
  return 1.0 / (1.0 + std::exp(-log_odds));
}

std::map<std::string, std::string> planted_paraphrases(const Dataset& dataset, std::uint64_t seed) {
  std::map<std::string, std::string> out;
  Rng rng(seed);
  for (const auto& r : dataset.records()) {
    std::istringstream in(r.text);
    std::vector<std::string> words;
    for (std::string w; in >> w;) {
      std::string clean;
      for (char c : w) {
        if (std::isalnum(static_cast<unsigned char>(c))) clean += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      }
      if (!clean.empty()) words.push_back(clean);
    }
    // The leading adverb keeps every paraphrase distinct from its source.
    shuffle(std::span<std::string>(words), rng);
    words.insert(words.begin(), "reportedly");
    out.emplace(r.id, sentence(std::move(words)));
  }
  return out;
}

}  // namespace factshap
