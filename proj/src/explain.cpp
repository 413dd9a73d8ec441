#include "factshap/explain.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <sstream>

#include <fmt/format.h>

#include "factshap/random.hpp"

namespace factshap {

using nlohmann::json;

namespace {

std::vector<double> dense_row(const FeatureVector& x, const Background& bg) {
  if (x.dimension() != bg.dimension()) {
    throw ValidationError("instance dimension " + std::to_string(x.dimension()) +
                          " does not match background dimension " + std::to_string(bg.dimension()));
  }
  return x.to_dense();
}

void require_rows(const Background& bg) {
  if (bg.rows.empty()) throw ValidationError("background has no reference rows");
}

double mean_log_odds(const Model& model, const Background& bg) {
  double sum = 0.0;
  for (const auto& row : bg.rows) sum += predict_log_odds(model, std::span<const double>(row));
  return sum / static_cast<double>(bg.rows.size());
}

// Shapley kernel |S|! (P - |S| - 1)! / P! = 1 / (P * C(P-1, |S|)).
std::vector<double> shapley_weights(std::size_t players) {
  std::vector<double> w(players, 0.0);
  double binom = 1.0;  // C(P-1, s)
  for (std::size_t s = 0; s < players; ++s) {
    w[s] = 1.0 / (static_cast<double>(players) * binom);
    binom = binom * static_cast<double>(players - 1 - s) / static_cast<double>(s + 1);
  }
  return w;
}

// 1 / (k * C(n, k)) for the leaf-game weights.
double inverse_k_binom(std::size_t n, std::size_t k) {
  double binom = 1.0;
  for (std::size_t i = 1; i <= k; ++i) binom = binom * static_cast<double>(n - k + i) / static_cast<double>(i);
  return 1.0 / (static_cast<double>(k) * binom);
}

class InterventionalTree {
 public:
  InterventionalTree(const TreeModel& tree, std::span<const double> x, std::vector<double>& phi)
      : tree_(tree), x_(x), phi_(phi), side_(tree.dimension, kNone) {}

  // Adds this reference row's attributions, scaled by `scale`, into phi.
  void accumulate(std::span<const double> z, double scale) {
    z_ = z;
    scale_ = scale;
    walk(0);
  }

 private:
  enum : char { kNone = 0, kFromX = 1, kFromZ = 2 };

  void walk(std::size_t index) {
    const TreeNode& node = tree_.nodes[index];
    if (node.is_leaf()) {
      leaf(logit(node.p_true));
      return;
    }
    const auto f = static_cast<std::size_t>(node.feature);
    const std::size_t x_child = static_cast<std::size_t>(x_[f] <= node.threshold ? node.left : node.right);
    const std::size_t z_child = static_cast<std::size_t>(z_[f] <= node.threshold ? node.left : node.right);
    if (side_[f] == kFromX) return walk(x_child);
    if (side_[f] == kFromZ) return walk(z_child);
    if (x_child == z_child) return walk(x_child);

    path_.push_back(f);
    side_[f] = kFromX;
    ++from_x_;
    walk(x_child);
    --from_x_;
    side_[f] = kFromZ;
    ++from_z_;
    walk(z_child);
    --from_z_;
    side_[f] = kNone;
    path_.pop_back();
  }

  // The leaf is reached by the hybrid exactly when every x-side feature is
  // in the coalition and no z-side feature is.
  void leaf(double value) {
    const std::size_t a = from_x_, b = from_z_;
    if (a + b == 0) return;
    const double gain = a > 0 ? scale_ * value * inverse_k_binom(a + b, a) : 0.0;
    const double loss = b > 0 ? scale_ * value * inverse_k_binom(a + b, b) : 0.0;
    for (std::size_t f : path_) {
      if (side_[f] == kFromX) {
        phi_[f] += gain;
      } else {
        phi_[f] -= loss;
      }
    }
  }

  const TreeModel& tree_;
  std::span<const double> x_;
  std::span<const double> z_;
  std::vector<double>& phi_;
  std::vector<char> side_;
  std::vector<std::size_t> path_;
  std::size_t from_x_ = 0;
  std::size_t from_z_ = 0;
  double scale_ = 1.0;
};

std::string html_escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&#39;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

constexpr const char* kRedHex = "#ff0051";
constexpr const char* kBlueHex = "#008bfb";

}  // namespace

Background build_background(const Model& model, const FeatureMatrix& rows) {
  if (rows.empty()) throw ValidationError("background needs at least one reference row");
  Background bg;
  bg.feature_means = column_means(rows);
  bg.rows.reserve(rows.size());
  double lo_sum = 0.0, p_sum = 0.0;
  for (const auto& row : rows) {
    bg.rows.push_back(row.to_dense());
    const double lo = predict_log_odds(model, row);
    bg.row_log_odds.push_back(lo);
    lo_sum += lo;
    p_sum += predict_proba(model, row);
  }
  const double n = static_cast<double>(rows.size());
  bg.base_logodds = lo_sum / n;
  bg.base_probability = p_sum / n;
  return bg;
}

std::string_view method_name(ShapMethod method) {
  switch (method) {
    case ShapMethod::linear_exact: return "linear_exact";
    case ShapMethod::brute_force: return "brute_force";
    case ShapMethod::tree_interventional: return "tree_interventional";
    case ShapMethod::sampling: return "sampling";
  }
  return "unknown";
}

ShapMethod parse_method(std::string_view name) {
  for (auto m : {ShapMethod::linear_exact, ShapMethod::brute_force, ShapMethod::tree_interventional,
                 ShapMethod::sampling}) {
    if (method_name(m) == name) return m;
  }
  throw ValidationError("unknown attribution method '" + std::string(name) + "'");
}

double Attribution::phi_sum() const {
  double sum = 0.0;
  for (double v : phi) sum += v;
  return sum;
}

std::vector<std::size_t> active_features(std::span<const double> x, const Background& bg) {
  std::vector<std::size_t> players;
  for (std::size_t j = 0; j < x.size(); ++j) {
    for (const auto& row : bg.rows) {
      if (row[j] != x[j]) {
        players.push_back(j);
        break;
      }
    }
  }
  return players;
}

Attribution linear_shap(const LogisticModel& model, const FeatureVector& x, const Background& bg) {
  if (x.dimension() != model.dimension() || bg.dimension() != model.dimension()) {
    throw ValidationError("dimension mismatch between model, instance and background");
  }
  Attribution a;
  a.method = ShapMethod::linear_exact;
  a.phi.assign(model.dimension(), 0.0);
  a.base_logodds = model.bias;
  for (std::size_t j = 0; j < model.dimension(); ++j) {
    a.phi[j] = model.weights[j] * (x.at(j) - bg.feature_means[j]);
    a.base_logodds += model.weights[j] * bg.feature_means[j];
  }
  a.base_probability = bg.base_probability;
  a.output_logodds = x.dot(model.weights) + model.bias;
  a.residual = a.base_logodds + a.phi_sum() - a.output_logodds;
  return a;
}

Attribution exact_shapley(const Model& model, const FeatureVector& x_sparse, const Background& bg,
                          std::size_t max_players) {
  require_rows(bg);
  const auto x = dense_row(x_sparse, bg);
  const auto players = active_features(x, bg);
  const std::size_t p = players.size();
  if (p > max_players) throw TooManyPlayersError(p, max_players);

  const std::size_t n_coalitions = std::size_t{1} << p;
  std::vector<double> value(n_coalitions, 0.0);
  std::vector<double> hybrid;
  for (const auto& row : bg.rows) {
    hybrid = row;
    for (std::size_t mask = 0; mask < n_coalitions; ++mask) {
      for (std::size_t k = 0; k < p; ++k) {
        hybrid[players[k]] = (mask >> k) & 1U ? x[players[k]] : row[players[k]];
      }
      value[mask] += predict_log_odds(model, std::span<const double>(hybrid));
    }
  }
  const double n_rows = static_cast<double>(bg.rows.size());
  for (double& v : value) v /= n_rows;

  Attribution a;
  a.method = ShapMethod::brute_force;
  a.phi.assign(x.size(), 0.0);
  a.base_logodds = value[0];
  a.base_probability = bg.base_probability;
  a.output_logodds = predict_log_odds(model, std::span<const double>(x));

  const auto weight = shapley_weights(p);
  for (std::size_t k = 0; k < p; ++k) {
    const std::size_t bit = std::size_t{1} << k;
    double phi = 0.0;
    for (std::size_t mask = 0; mask < n_coalitions; ++mask) {
      if (mask & bit) continue;
      phi += weight[static_cast<std::size_t>(std::popcount(mask))] * (value[mask | bit] - value[mask]);
    }
    a.phi[players[k]] = phi;
  }
  a.residual = a.base_logodds + a.phi_sum() - a.output_logodds;
  return a;
}

Attribution tree_shap(const TreeModel& tree, const FeatureVector& x, const Background& bg) {
  return tree_shap(Model(tree), x, bg);
}

Attribution tree_shap(const Model& model, const FeatureVector& x_sparse, const Background& bg) {
  if (std::holds_alternative<LogisticModel>(model)) {
    throw ValidationError("tree_shap requires a tree or forest model");
  }
  require_rows(bg);
  if (model_dimension(model) != bg.dimension()) {
    throw ValidationError("model dimension does not match background dimension");
  }
  const auto x = dense_row(x_sparse, bg);
  std::vector<const TreeModel*> trees;
  if (const auto* t = std::get_if<TreeModel>(&model)) {
    trees.push_back(t);
  } else {
    for (const auto& t : std::get<ForestModel>(model).trees) trees.push_back(&t);
  }

  Attribution a;
  a.method = ShapMethod::tree_interventional;
  a.phi.assign(x.size(), 0.0);
  const double scale = 1.0 / (static_cast<double>(trees.size()) * static_cast<double>(bg.rows.size()));
  for (const TreeModel* tree : trees) {
    InterventionalTree game(*tree, x, a.phi);
    for (const auto& row : bg.rows) game.accumulate(row, scale);
  }
  a.base_logodds = mean_log_odds(model, bg);
  a.base_probability = bg.base_probability;
  a.output_logodds = predict_log_odds(model, std::span<const double>(x));
  a.residual = a.base_logodds + a.phi_sum() - a.output_logodds;
  return a;
}

Attribution sampling_shapley(const Model& model, const FeatureVector& x_sparse, const Background& bg,
                             std::size_t n_permutations, std::uint64_t seed) {
  require_rows(bg);
  if (n_permutations < 1) throw ValidationError("n_permutations must be at least 1");
  const auto x = dense_row(x_sparse, bg);
  auto order = active_features(x, bg);

  Attribution a;
  a.method = ShapMethod::sampling;
  a.seed = seed;
  a.samples = n_permutations;
  a.phi.assign(x.size(), 0.0);

  Rng rng(seed);
  std::vector<double> hybrid;
  for (std::size_t s = 0; s < n_permutations; ++s) {
    shuffle(std::span<std::size_t>(order), rng);
    for (const auto& row : bg.rows) {
      hybrid = row;
      double previous = predict_log_odds(model, std::span<const double>(hybrid));
      for (std::size_t f : order) {
        hybrid[f] = x[f];
        const double current = predict_log_odds(model, std::span<const double>(hybrid));
        a.phi[f] += current - previous;
        previous = current;
      }
    }
  }
  const double denom = static_cast<double>(n_permutations) * static_cast<double>(bg.rows.size());
  for (double& v : a.phi) v /= denom;

  a.base_logodds = mean_log_odds(model, bg);
  a.base_probability = bg.base_probability;
  a.output_logodds = predict_log_odds(model, std::span<const double>(x));
  a.residual = a.base_logodds + a.phi_sum() - a.output_logodds;
  return a;
}

Attribution explain_exact(const Model& model, const FeatureVector& x, const Background& bg) {
  if (const auto* lm = std::get_if<LogisticModel>(&model)) return linear_shap(*lm, x, bg);
  return tree_shap(model, x, bg);
}

json attribution_to_json(const Attribution& a, std::span<const std::string> words) {
  json phi = json::array();
  for (std::size_t j = 0; j < a.phi.size(); ++j) {
    if (a.phi[j] == 0.0) continue;
    phi.push_back({{"feature", j}, {"word", j < words.size() ? words[j] : ""}, {"value", a.phi[j]}});
  }
  json j = {{"base_logodds", a.base_logodds},
            {"base_probability", a.base_probability},
            {"output_logodds", a.output_logodds},
            {"dimension", a.phi.size()},
            {"phi", phi},
            {"method", std::string(method_name(a.method))},
            {"residual", a.residual}};
  if (a.seed) j["seed"] = *a.seed;
  if (a.method == ShapMethod::sampling) j["samples"] = a.samples;
  return j;
}

Attribution attribution_from_json(const json& j, std::size_t dimension) {
  Attribution a;
  try {
    a.base_logodds = j.at("base_logodds").get<double>();
    a.base_probability = j.at("base_probability").get<double>();
    a.output_logodds = j.at("output_logodds").get<double>();
    a.method = parse_method(j.at("method").get<std::string>());
    const std::size_t dim = j.value("dimension", dimension);
    a.phi.assign(dim, 0.0);
    for (const auto& entry : j.at("phi")) {
      const auto f = entry.at("feature").get<std::size_t>();
      if (f >= dim) throw ValidationError("attribution feature index out of range");
      a.phi[f] = entry.at("value").get<double>();
    }
    if (j.contains("seed")) a.seed = j["seed"].get<std::uint64_t>();
    a.samples = j.value("samples", std::size_t{0});
    a.residual = j.value("residual", 0.0);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed attribution: ") + e.what());
  }
  return a;
}

// ---------------------------------------------------------------------------

std::string_view tier_name(Tier tier) {
  switch (tier) {
    case Tier::T: return "T";
    case Tier::TSE: return "TSE";
    case Tier::TSESE: return "TSESE";
  }
  return "T";
}

Tier parse_tier(std::string_view name) {
  std::string upper(name);
  std::transform(upper.begin(), upper.end(), upper.begin(), [](unsigned char c) { return std::toupper(c); });
  if (upper == "T") return Tier::T;
  if (upper == "TSE") return Tier::TSE;
  if (upper == "TSESE") return Tier::TSESE;
  throw ValidationError("unknown tier '" + std::string(name) + "' (expected T, TSE or TSESE)");
}

CardFormat parse_card_format(std::string_view name) {
  if (name == "json") return CardFormat::json;
  if (name == "html") return CardFormat::html;
  if (name == "terminal") return CardFormat::terminal;
  throw ValidationError("unknown card format '" + std::string(name) + "'");
}

std::string_view color_name(ColorRole role) {
  switch (role) {
    case ColorRole::red: return "red";
    case ColorRole::blue: return "blue";
    case ColorRole::neutral: return "neutral";
  }
  return "neutral";
}

ColorRole color_for(double phi) {
  if (phi > 0.0) return ColorRole::red;
  if (phi < 0.0) return ColorRole::blue;
  return ColorRole::neutral;
}

namespace {

ColorRole parse_color(std::string_view s) {
  if (s == "red") return ColorRole::red;
  if (s == "blue") return ColorRole::blue;
  if (s == "neutral") return ColorRole::neutral;
  throw ValidationError("unknown color role '" + std::string(s) + "'");
}

}  // namespace

ExplanationCard make_card(const Attribution& attribution, const ClaimRecord& claim,
                          std::span<const std::string> words, std::span<const std::size_t> present,
                          Tier tier, std::size_t top_k) {
  if (words.size() != attribution.phi.size()) {
    throw ValidationError("word labels (" + std::to_string(words.size()) +
                          ") do not match attribution dimension (" +
                          std::to_string(attribution.phi.size()) + ")");
  }
  ExplanationCard card;
  card.claim_id = claim.id;
  card.claim_text = claim.text;
  card.tier = tier;
  card.top_k = top_k;
  const double p = attribution.output_probability();
  card.predicted = p >= 0.5 ? Label::true_claim : Label::fake_claim;

  if (tier != Tier::T) {
    ForcePlot force;
    force.base_logodds = attribution.base_logodds;
    force.base_probability = attribution.base_probability;
    force.output_logodds = attribution.output_logodds;
    force.output_probability = p;
    force.method = std::string(method_name(attribution.method));
    std::vector<char> listed(words.size(), 0);
    auto add = [&](std::size_t f) {
      if (listed[f]) return;
      listed[f] = 1;
      const double v = attribution.phi[f];
      force.contributions.push_back({f, words[f], v, color_for(v)});
    };
    for (std::size_t f = 0; f < attribution.phi.size(); ++f) {
      if (attribution.phi[f] != 0.0) add(f);
    }
    for (std::size_t f : present) {
      if (f >= words.size()) throw ValidationError("present feature index out of range");
      add(f);
    }
    std::sort(force.contributions.begin(), force.contributions.end(),
              [](const WordContribution& a, const WordContribution& b) {
                const double ma = std::abs(a.value), mb = std::abs(b.value);
                if (ma != mb) return ma > mb;
                return a.feature < b.feature;
              });
    card.force = std::move(force);
  }
  if (tier == Tier::TSESE) {
    card.source = claim.source.value_or(kUnavailable);
    card.evidence = claim.evidence.value_or(kUnavailable);
    card.date = claim.date.value_or(kUnavailable);
  }
  return card;
}

json card_to_json(const ExplanationCard& card) {
  json j = {{"claim_id", card.claim_id},
            {"claim_text", card.claim_text},
            {"predicted_label", std::string(label_name(card.predicted))},
            {"tier", std::string(tier_name(card.tier))},
            {"top_k", card.top_k}};
  if (card.force) {
    const auto& f = *card.force;
    json words = json::array();
    for (const auto& c : f.contributions) {
      words.push_back({{"feature", c.feature},
                       {"word", c.word},
                       {"value", c.value},
                       {"color", std::string(color_name(c.role))}});
    }
    j["force_plot"] = {{"base_logodds", f.base_logodds},
                       {"base_probability", f.base_probability},
                       {"output_logodds", f.output_logodds},
                       {"output_probability", f.output_probability},
                       {"method", f.method},
                       {"contributions", words}};
  }
  if (card.source) j["source"] = *card.source;
  if (card.evidence) j["evidence"] = *card.evidence;
  if (card.date) j["date"] = *card.date;
  return j;
}

ExplanationCard card_from_json(const json& j) {
  ExplanationCard card;
  try {
    card.claim_id = j.at("claim_id").get<std::string>();
    card.claim_text = j.at("claim_text").get<std::string>();
    card.predicted = parse_label(j.at("predicted_label").get<std::string>());
    card.tier = parse_tier(j.at("tier").get<std::string>());
    card.top_k = j.value("top_k", kDefaultTopK);
    if (j.contains("force_plot")) {
      const auto& fj = j["force_plot"];
      ForcePlot f;
      f.base_logodds = fj.at("base_logodds").get<double>();
      f.base_probability = fj.at("base_probability").get<double>();
      f.output_logodds = fj.at("output_logodds").get<double>();
      f.output_probability = fj.at("output_probability").get<double>();
      f.method = fj.at("method").get<std::string>();
      for (const auto& c : fj.at("contributions")) {
        f.contributions.push_back({c.at("feature").get<std::size_t>(), c.at("word").get<std::string>(),
                                   c.at("value").get<double>(),
                                   parse_color(c.at("color").get<std::string>())});
      }
      card.force = std::move(f);
    }
    if (j.contains("source")) card.source = j["source"].get<std::string>();
    if (j.contains("evidence")) card.evidence = j["evidence"].get<std::string>();
    if (j.contains("date")) card.date = j["date"].get<std::string>();
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed explanation card: ") + e.what());
  }
  return card;
}

namespace {

std::string render_terminal(const ExplanationCard& card) {
  std::ostringstream out;
  out << "Claim: " << card.claim_text << '\n';
  out << "Prediction: " << (card.predicted == Label::true_claim ? "TRUE" : "FAKE") << '\n';
  if (card.force) {
    const auto& f = *card.force;
    out << fmt::format("Predicted truth probability: {:.3f} (log-odds {:+.4f})\n", f.output_probability,
                       f.output_logodds);
    out << fmt::format("Base value: {:.3f} mean predicted probability (log-odds {:+.4f})\n",
                       f.base_probability, f.base_logodds);
    double scale = 0.0;
    for (const auto& c : f.contributions) scale = std::max(scale, std::abs(c.value));
    constexpr int kWidth = 20;
    const std::size_t shown = std::min(card.top_k, f.contributions.size());
    for (std::size_t i = 0; i < shown; ++i) {
      const auto& c = f.contributions[i];
      const int len = scale > 0.0 ? static_cast<int>(std::lround(kWidth * std::abs(c.value) / scale)) : 0;
      const std::string bar(static_cast<std::size_t>(len), c.value > 0 ? '+' : '-');
      const std::string left = c.value < 0 ? std::string(kWidth - len, ' ') + bar : std::string(kWidth, ' ');
      const std::string right = c.value > 0 ? bar + std::string(kWidth - len, ' ') : std::string(kWidth, ' ');
      out << fmt::format("  {:+.4f} {}|{} {} ({})\n", c.value, left, right, c.word, color_name(c.role));
    }
    if (f.contributions.size() > shown) {
      out << "  ... " << f.contributions.size() - shown << " more\n";
    }
  }
  if (card.tier == Tier::TSESE) {
    out << "Source: " << card.source.value_or(kUnavailable) << '\n';
    out << "Date: " << card.date.value_or(kUnavailable) << '\n';
    out << "Evidence: " << card.evidence.value_or(kUnavailable) << '\n';
  }
  return out.str();
}

std::string render_html(const ExplanationCard& card) {
  std::ostringstream out;
  const bool truthy = card.predicted == Label::true_claim;
  out << "<!DOCTYPE html>\n<html><head><meta charset=\"utf-8\"><title>Claim explanation</title></head>\n"
      << "<body style=\"font-family:sans-serif;max-width:960px;margin:2em auto;\">\n"
      << "<div class=\"card\" data-tier=\"" << tier_name(card.tier) << "\">\n"
      << "<p class=\"claim\" style=\"font-size:1.2em;\">" << html_escape(card.claim_text) << "</p>\n"
      << "<p class=\"prediction\">Prediction: <strong style=\"color:" << (truthy ? kRedHex : kBlueHex)
      << ";\">" << (truthy ? "TRUE" : "FAKE") << "</strong></p>\n";
  if (card.force) {
    const auto& f = *card.force;
    out << fmt::format(
        "<p class=\"values\">base value {:.3f} &rarr; output value <strong>{:.3f}</strong> "
        "<span style=\"color:#777;\">(log-odds {:+.4f} &rarr; {:+.4f})</span></p>\n",
        f.base_probability, f.output_probability, f.base_logodds, f.output_logodds);
    double total = 0.0;
    const std::size_t shown = std::min(card.top_k, f.contributions.size());
    for (std::size_t i = 0; i < shown; ++i) total += std::abs(f.contributions[i].value);
    out << "<div class=\"force-plot\" style=\"display:flex;height:28px;width:100%;\">\n";
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t i = 0; i < shown; ++i) {
        const auto& c = f.contributions[i];
        if (c.role == ColorRole::neutral || (pass == 0) != (c.role == ColorRole::red)) continue;
        const double pct = total > 0.0 ? 100.0 * std::abs(c.value) / total : 0.0;
        out << fmt::format(
            "<div title=\"{} {:+.4f}\" style=\"width:{:.2f}%;background:{};color:#fff;overflow:hidden;"
            "font-size:11px;white-space:nowrap;\">{}</div>\n",
            html_escape(c.word), c.value, pct, c.role == ColorRole::red ? kRedHex : kBlueHex,
            html_escape(c.word));
      }
    }
    out << "</div>\n<p class=\"words\">\n";
    for (std::size_t i = 0; i < shown; ++i) {
      const auto& c = f.contributions[i];
      const char* color = c.role == ColorRole::red ? kRedHex : c.role == ColorRole::blue ? kBlueHex : "#555";
      out << fmt::format("<span class=\"word {}\" style=\"color:{};margin-right:0.8em;\">{} ({:+.4f})</span>\n",
                         color_name(c.role), color, html_escape(c.word), c.value);
    }
    out << "</p>\n";
  }
  if (card.tier == Tier::TSESE) {
    out << "<p class=\"source\">Source: " << html_escape(card.source.value_or(kUnavailable)) << "</p>\n"
        << "<p class=\"date\">Date: " << html_escape(card.date.value_or(kUnavailable)) << "</p>\n"
        << "<p class=\"evidence\">Evidence: " << html_escape(card.evidence.value_or(kUnavailable))
        << "</p>\n";
  }
  out << "</div>\n</body></html>\n";
  return out.str();
}

}  // namespace

std::string render_card(const ExplanationCard& card, CardFormat format) {
  switch (format) {
    case CardFormat::json: return card_to_json(card).dump(2) + "\n";
    case CardFormat::html: return render_html(card);
    case CardFormat::terminal: return render_terminal(card);
  }
  return {};
}

}  // namespace factshap
