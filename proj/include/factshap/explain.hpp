#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "factshap/corpus.hpp"
#include "factshap/error.hpp"
#include "factshap/features.hpp"
#include "factshap/models.hpp"

namespace factshap {

// Reference distribution for interventional attributions. All model
// outputs are in log-odds; base_probability is the mean predicted
// probability and is generally not sigmoid(base_logodds).
struct Background {
  std::vector<std::vector<double>> rows;  // dense reference rows
  std::vector<double> feature_means;
  std::vector<double> row_log_odds;
  double base_logodds = 0.0;
  double base_probability = 0.5;

  std::size_t dimension() const { return feature_means.size(); }
};

Background build_background(const Model& model, const FeatureMatrix& rows);

enum class ShapMethod { linear_exact, brute_force, tree_interventional, sampling };
std::string_view method_name(ShapMethod method);
ShapMethod parse_method(std::string_view name);

struct Attribution {
  std::vector<double> phi;  // per feature, log-odds
  double base_logodds = 0.0;
  double base_probability = 0.5;
  double output_logodds = 0.0;
  ShapMethod method = ShapMethod::linear_exact;
  std::optional<std::uint64_t> seed;
  std::size_t samples = 0;
  // base + sum(phi) - output; recorded for sampling, ~0 for exact methods.
  double residual = 0.0;

  double phi_sum() const;
  double output_probability() const { return sigmoid(output_logodds); }
};

inline constexpr std::size_t kMaxExactPlayers = 20;

// Raised by exact_shapley when the coalition game is too large to enumerate.
class TooManyPlayersError : public ValidationError {
 public:
  TooManyPlayersError(std::size_t players, std::size_t limit)
      : ValidationError(std::to_string(players) + " active features exceed the exact limit of " +
                        std::to_string(limit) + "; use sampling instead (--method sampling)"),
        players_(players) {}
  std::size_t players() const { return players_; }

 private:
  std::size_t players_;
};

// Features where x differs from at least one background row. Every other
// feature is a dummy player with zero attribution.
std::vector<std::size_t> active_features(std::span<const double> x, const Background& bg);

// phi_i = w_i (x_i - E[x_i]); base = w . E[x] + b.
Attribution linear_shap(const LogisticModel& model, const FeatureVector& x, const Background& bg);

// Enumerates all 2^P coalitions of the active features, averaging the
// model's log-odds over background rows with out-of-coalition features
// taken from the row.
Attribution exact_shapley(const Model& model, const FeatureVector& x, const Background& bg,
                          std::size_t max_players = kMaxExactPlayers);

// Interventional TreeSHAP: per tree and background row, a single traversal
// of the leaves reachable by some hybrid of x and the row. Forest results
// are the mean over trees.
Attribution tree_shap(const Model& model, const FeatureVector& x, const Background& bg);
Attribution tree_shap(const TreeModel& tree, const FeatureVector& x, const Background& bg);

// Monte-Carlo permutation estimate. Each permutation contributes marginal
// gains averaged over all background rows.
Attribution sampling_shapley(const Model& model, const FeatureVector& x, const Background& bg,
                             std::size_t n_permutations, std::uint64_t seed);

// Picks the exact method for the model kind: linear for logistic, TreeSHAP
// for trees and forests.
Attribution explain_exact(const Model& model, const FeatureVector& x, const Background& bg);

nlohmann::json attribution_to_json(const Attribution& a, std::span<const std::string> words);
Attribution attribution_from_json(const nlohmann::json& j, std::size_t dimension);

// ---------------------------------------------------------------------------
// Explanation cards

enum class Tier { T, TSE, TSESE };
std::string_view tier_name(Tier tier);
Tier parse_tier(std::string_view name);

enum class CardFormat { json, html, terminal };
CardFormat parse_card_format(std::string_view name);

enum class ColorRole { red, blue, neutral };
std::string_view color_name(ColorRole role);
// Red pushes toward true, blue toward fake.
ColorRole color_for(double phi);

struct WordContribution {
  std::size_t feature = 0;
  std::string word;
  double value = 0.0;
  ColorRole role = ColorRole::neutral;

  bool operator==(const WordContribution&) const = default;
};

inline constexpr std::size_t kDefaultTopK = 15;
inline constexpr const char* kUnavailable = "unavailable";

struct ForcePlot {
  double base_logodds = 0.0;
  double base_probability = 0.5;
  double output_logodds = 0.0;
  double output_probability = 0.5;
  std::string method;
  // Sorted by decreasing |value|, ties by feature index.
  std::vector<WordContribution> contributions;

  bool operator==(const ForcePlot&) const = default;
};

struct ExplanationCard {
  std::string claim_id;
  std::string claim_text;
  Label predicted = Label::fake_claim;
  Tier tier = Tier::T;
  std::size_t top_k = kDefaultTopK;
  // Present for TSE and TSESE.
  std::optional<ForcePlot> force;
  // Present for TSESE; kUnavailable when the record lacks the field.
  std::optional<std::string> source;
  std::optional<std::string> evidence;
  std::optional<std::string> date;

  bool operator==(const ExplanationCard&) const = default;
};

// `words` labels every feature column; `present` lists the claim's own
// features, which are shown even when their contribution is zero.
ExplanationCard make_card(const Attribution& attribution, const ClaimRecord& claim,
                          std::span<const std::string> words, std::span<const std::size_t> present,
                          Tier tier, std::size_t top_k = kDefaultTopK);

nlohmann::json card_to_json(const ExplanationCard& card);
ExplanationCard card_from_json(const nlohmann::json& j);
std::string render_card(const ExplanationCard& card, CardFormat format);

}  // namespace factshap
