#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "factshap/corpus.hpp"
#include "factshap/textprep.hpp"

namespace factshap {

// Claims generated from a known word-label model: every claim carries
// `signal_words` draws from the label-correlated vocabulary (each from its
// own class's list with probability `fidelity`, otherwise from the other
// class's list) plus `noise_words` uniform draws from a neutral vocabulary.
struct PlantedCorpusConfig {
  std::size_t claims = 200;
  double true_fraction = 0.5;
  std::size_t signal_words = 3;
  double fidelity = 0.9;
  std::size_t noise_words = 5;
  std::uint64_t seed = 2020;
};

struct PlantedCorpus {
  Dataset dataset;
  PlantedCorpusConfig config;
  std::vector<std::string> true_words;
  std::vector<std::string> fake_words;
  std::vector<std::string> noise_words;
};

PlantedCorpus planted_corpus(const PlantedCorpusConfig& config = {});

// Posterior P(true | tokens) under the generative model.
double planted_posterior(const PlantedCorpus& corpus, const TokenStream& tokens);

// One distinct reordering of each claim, keyed by id, for fixture clients.
std::map<std::string, std::string> planted_paraphrases(const Dataset& dataset, std::uint64_t seed);

}  // namespace factshap
