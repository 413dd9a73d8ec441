#include "factshap/eval.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_map>

#include <fmt/format.h>

#include "factshap/error.hpp"

namespace factshap {

using nlohmann::json;

namespace {

double ratio(std::size_t num, std::size_t den, bool& degenerate) {
  if (den == 0) {
    degenerate = true;
    return 0.0;
  }
  return static_cast<double>(num) / static_cast<double>(den);
}

ClassMetrics class_metrics(std::size_t tp, std::size_t fp, std::size_t fn) {
  ClassMetrics m;
  m.precision = ratio(tp, tp + fp, m.degenerate);
  m.recall = ratio(tp, tp + fn, m.degenerate);
  if (m.precision + m.recall > 0.0) {
    m.f1 = 2.0 * m.precision * m.recall / (m.precision + m.recall);
  } else {
    m.f1 = 0.0;
    m.degenerate = true;
  }
  return m;
}

std::vector<int> labels_of(const std::vector<const ClaimRecord*>& records) {
  std::vector<int> y;
  y.reserve(records.size());
  for (const auto* r : records) y.push_back(label_value(r->label));
  return y;
}

struct Fitted {
  Vectorizer vectorizer;
  Model model;
};

FeatureMatrix featurize(const PipelineSpec& spec, const std::vector<const ClaimRecord*>& records,
                        const Vectorizer* vectorizer, const EmbeddingTable* embeddings) {
  FeatureMatrix X;
  X.reserve(records.size());
  for (const auto* r : records) {
    if (spec.features == FeatureSpace::tfidf) {
      X.push_back(vectorizer->transform_text(r->text));
    } else {
      auto it = embeddings->find(r->id);
      if (it == embeddings->end()) throw ValidationError("no embedding vector for claim '" + r->id + "'");
      X.push_back(FeatureVector::from_dense(it->second));
    }
  }
  return X;
}

double teacher_probability(const TeacherTargets& teacher, const ClaimRecord& r) {
  auto it = teacher.by_id.find(r.id);
  if (it != teacher.by_id.end()) return it->second.p_true;
  // Back-translations inherit their parent's target.
  if (r.parent_id) {
    auto parent = teacher.by_id.find(*r.parent_id);
    if (parent != teacher.by_id.end()) return parent->second.p_true;
  }
  throw ValidationError("no teacher target for training claim '" + r.id + "'");
}

Fitted fit(const PipelineSpec& spec, const std::vector<const ClaimRecord*>& train, const CvResources& res) {
  Fitted out;
  if (spec.features == FeatureSpace::tfidf) {
    std::vector<TokenStream> corpus;
    corpus.reserve(train.size());
    for (const auto* r : train) corpus.push_back(tokenize(r->text, spec.vectorizer.tokenizer));
    out.vectorizer = Vectorizer::fit(corpus, spec.vectorizer);
  } else if (!res.embeddings) {
    throw ValidationError("embedding features requested but no embedding table supplied");
  }
  const FeatureMatrix X = featurize(spec, train, &out.vectorizer, res.embeddings);
  const auto y = labels_of(train);
  switch (spec.model) {
    case ModelKind::logistic:
      out.model = train_logistic(X, y, spec.train);
      break;
    case ModelKind::distilled: {
      if (!res.teacher) throw ValidationError("distilled model requires teacher targets");
      std::vector<double> t;
      t.reserve(train.size());
      for (const auto* r : train) t.push_back(teacher_probability(*res.teacher, *r));
      out.model = train_distilled(X, y, t, spec.train);
      break;
    }
    case ModelKind::tree:
      out.model = train_tree(X, y, spec.tree);
      break;
    case ModelKind::forest:
      out.model = train_forest(X, y, spec.forest);
      break;
  }
  return out;
}

Metrics mean_metrics(const std::vector<Metrics>& folds) {
  Metrics m;
  const double n = static_cast<double>(folds.size());
  double auc_sum = 0.0;
  bool auc_all = true;
  auto add = [](ClassMetrics& acc, const ClassMetrics& x) {
    acc.precision += x.precision;
    acc.recall += x.recall;
    acc.f1 += x.f1;
    acc.degenerate = acc.degenerate || x.degenerate;
  };
  for (const auto& f : folds) {
    add(m.fake, f.fake);
    add(m.truth, f.truth);
    m.accuracy += f.accuracy;
    if (f.auc) {
      auc_sum += *f.auc;
    } else {
      auc_all = false;
    }
    m.confusion.true_positive += f.confusion.true_positive;
    m.confusion.false_positive += f.confusion.false_positive;
    m.confusion.true_negative += f.confusion.true_negative;
    m.confusion.false_negative += f.confusion.false_negative;
  }
  for (ClassMetrics* c : {&m.fake, &m.truth}) {
    c->precision /= n;
    c->recall /= n;
    c->f1 /= n;
  }
  m.accuracy /= n;
  if (auc_all && !folds.empty()) m.auc = auc_sum / n;
  return m;
}

json class_to_json(const ClassMetrics& c) {
  return {{"precision", c.precision}, {"recall", c.recall}, {"f1", c.f1}, {"degenerate", c.degenerate}};
}

ClassMetrics class_from_json(const json& j) {
  return {j.at("precision").get<double>(), j.at("recall").get<double>(), j.at("f1").get<double>(),
          j.value("degenerate", false)};
}

json metrics_to_json(const Metrics& m) {
  json j = {{"false", class_to_json(m.fake)},
            {"true", class_to_json(m.truth)},
            {"accuracy", m.accuracy},
            {"confusion",
             {{"tp", m.confusion.true_positive},
              {"fp", m.confusion.false_positive},
              {"tn", m.confusion.true_negative},
              {"fn", m.confusion.false_negative}}}};
  j["auc"] = m.auc ? json(*m.auc) : json(nullptr);
  return j;
}

Metrics metrics_from_json(const json& j) {
  Metrics m;
  m.fake = class_from_json(j.at("false"));
  m.truth = class_from_json(j.at("true"));
  m.accuracy = j.at("accuracy").get<double>();
  if (j.contains("auc") && !j["auc"].is_null()) m.auc = j["auc"].get<double>();
  const auto& c = j.at("confusion");
  m.confusion = {c.at("tp").get<std::size_t>(), c.at("fp").get<std::size_t>(), c.at("tn").get<std::size_t>(),
                 c.at("fn").get<std::size_t>()};
  return m;
}

constexpr const char* kCsvHeader =
    "model,dataset,augmented,scope,k,seed,precision_false,precision_true,recall_false,recall_true,"
    "f1_false,f1_true,accuracy,auc,tp,fp,tn,fn";

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

}  // namespace

Metrics classification_metrics(std::span<const double> scores, std::span<const int> labels, double threshold) {
  if (scores.size() != labels.size()) throw ValidationError("scores and labels differ in length");
  if (scores.empty()) throw ValidationError("no predictions to evaluate");
  Metrics m;
  auto& c = m.confusion;
  bool seen[2] = {false, false};
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (labels[i] != 0 && labels[i] != 1) throw ValidationError("labels must be 0 or 1");
    seen[labels[i]] = true;
    const bool predicted_true = scores[i] >= threshold;
    if (labels[i] == 1) {
      (predicted_true ? c.true_positive : c.false_negative)++;
    } else {
      (predicted_true ? c.false_positive : c.true_negative)++;
    }
  }
  m.truth = class_metrics(c.true_positive, c.false_positive, c.false_negative);
  m.fake = class_metrics(c.true_negative, c.false_negative, c.false_positive);
  m.accuracy = static_cast<double>(c.true_positive + c.true_negative) / static_cast<double>(c.total());
  if (seen[0] && seen[1]) m.auc = roc_auc(scores, labels);
  return m;
}

double roc_auc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) throw ValidationError("scores and labels differ in length");
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Mann-Whitney U from mid-ranks; every quantity stays a half-integer, so
  // the result is exact.
  double positives = 0.0, negatives = 0.0, rank_sum = 0.0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    const double mid_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k) {
      if (labels[order[k]] == 1) {
        positives += 1.0;
        rank_sum += mid_rank;
      } else {
        negatives += 1.0;
      }
    }
    i = j;
  }
  if (positives == 0.0 || negatives == 0.0) throw ValidationError("AUC needs both classes");
  const double u = rank_sum - positives * (positives + 1.0) / 2.0;
  return u / (positives * negatives);
}

std::string_view model_kind_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::logistic: return "logistic";
    case ModelKind::distilled: return "distilled";
    case ModelKind::tree: return "tree";
    case ModelKind::forest: return "forest";
  }
  return "logistic";
}

ModelKind parse_model_kind(std::string_view name) {
  for (auto k : {ModelKind::logistic, ModelKind::distilled, ModelKind::tree, ModelKind::forest}) {
    if (model_kind_name(k) == name) return k;
  }
  throw ValidationError("unknown model kind '" + std::string(name) + "'");
}

json to_json(const PipelineSpec& spec) {
  return {{"name", spec.name},
          {"features", spec.features == FeatureSpace::tfidf ? "tfidf" : "embeddings"},
          {"vectorizer", to_json(spec.vectorizer)},
          {"model", std::string(model_kind_name(spec.model))},
          {"train", to_json(spec.train)},
          {"tree", {{"max_depth", spec.tree.max_depth}, {"min_leaf", spec.tree.min_leaf}}},
          {"forest", to_json(spec.forest)},
          {"augment", spec.augment},
          {"scope", std::string(scope_name(spec.scope))},
          {"pivot", spec.pivot}};
}

PipelineSpec pipeline_from_json(const json& j) {
  PipelineSpec s;
  try {
    s.name = j.value("name", "");
    const auto features = j.value("features", std::string("tfidf"));
    if (features != "tfidf" && features != "embeddings") {
      throw ValidationError("unknown feature space '" + features + "'");
    }
    s.features = features == "tfidf" ? FeatureSpace::tfidf : FeatureSpace::embeddings;
    if (j.contains("vectorizer")) s.vectorizer = vectorizer_config_from_json(j["vectorizer"]);
    s.model = parse_model_kind(j.value("model", std::string("logistic")));
    if (j.contains("train")) s.train = train_config_from_json(j["train"]);
    if (j.contains("tree")) {
      s.tree.max_depth = j["tree"].value("max_depth", s.tree.max_depth);
      s.tree.min_leaf = j["tree"].value("min_leaf", s.tree.min_leaf);
    }
    if (j.contains("forest")) s.forest = forest_config_from_json(j["forest"]);
    s.augment = j.value("augment", false);
    s.scope = parse_scope(j.value("scope", std::string("train_folds_only")));
    s.pivot = j.value("pivot", std::string(kDefaultPivot));
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed pipeline spec: ") + e.what());
  }
  return s;
}

MetricsReport cross_validate(const PipelineSpec& spec, const Dataset& dataset, std::size_t k, std::uint64_t seed,
                             const CvResources& resources) {
  if (spec.augment && !resources.translator) {
    throw ValidationError("augmentation requested but no translation client supplied");
  }
  dataset.require_both_classes();

  bool has_products = false;
  std::vector<std::string> original_ids;
  for (const auto& r : dataset.records()) {
    if (r.parent_id) {
      has_products = true;
    } else {
      original_ids.push_back(r.id);
    }
  }

  // The pool that is split into folds.
  Dataset pool;
  if (spec.scope == AugmentScope::whole_dataset) {
    pool = dataset;
    if (spec.augment) {
      AugmentOptions opts;
      opts.pivot = spec.pivot;
      opts.scope = AugmentScope::whole_dataset;
      pool = augment_dataset(*resources.translator, dataset, opts).dataset;
    }
  } else {
    pool = dataset.subset(original_ids, dataset.name());
  }
  const SplitPlan plan = stratified_kfold(pool, k, seed);

  std::unordered_map<std::string_view, std::vector<const ClaimRecord*>> products_of;
  if (spec.scope == AugmentScope::train_folds_only) {
    for (const auto& r : dataset.records()) {
      if (r.parent_id) products_of[*r.parent_id].push_back(&r);
    }
  }

  MetricsReport report;
  report.model_name = spec.name.empty() ? std::string(model_kind_name(spec.model)) : spec.name;
  report.dataset_name = dataset.name();
  report.augmented = spec.augment || has_products;
  report.augmentation_scope = std::string(scope_name(spec.scope));
  report.k = k;
  report.seed = seed;

  for (std::size_t f = 0; f < k; ++f) {
    const std::set<std::string_view> held_out(plan.folds[f].begin(), plan.folds[f].end());
    std::vector<const ClaimRecord*> train, test;
    for (const auto& r : pool.records()) {
      (held_out.count(r.id) ? test : train).push_back(&r);
    }

    Dataset augmented_train;
    if (spec.scope == AugmentScope::train_folds_only) {
      std::vector<const ClaimRecord*> extra;
      for (const auto* r : train) {
        auto it = products_of.find(r->id);
        if (it != products_of.end()) extra.insert(extra.end(), it->second.begin(), it->second.end());
      }
      if (spec.augment) {
        std::vector<ClaimRecord> copy;
        for (const auto* r : train) copy.push_back(*r);
        for (const auto* r : extra) copy.push_back(*r);
        AugmentOptions opts;
        opts.pivot = spec.pivot;
        opts.scope = AugmentScope::train_folds_only;
        augmented_train = augment_dataset(*resources.translator, Dataset(dataset.name(), std::move(copy)), opts).dataset;
        train.clear();
        for (const auto& r : augmented_train.records()) train.push_back(&r);
      } else {
        train.insert(train.end(), extra.begin(), extra.end());
      }
    }

    const Fitted fitted = fit(spec, train, resources);
    const FeatureMatrix X_test = featurize(spec, test, &fitted.vectorizer, resources.embeddings);
    std::vector<double> scores;
    scores.reserve(test.size());
    for (const auto& x : X_test) scores.push_back(predict_proba(fitted.model, x));
    report.folds.push_back(classification_metrics(scores, labels_of(test)));
  }
  report.mean = mean_metrics(report.folds);
  return report;
}

ReportFormat parse_report_format(std::string_view name) {
  if (name == "markdown" || name == "md") return ReportFormat::markdown;
  if (name == "csv") return ReportFormat::csv;
  if (name == "json") return ReportFormat::json;
  throw ValidationError("unknown report format '" + std::string(name) + "'");
}

json report_to_json(const MetricsReport& r) {
  json folds = json::array();
  for (const auto& f : r.folds) folds.push_back(metrics_to_json(f));
  return {{"model", r.model_name},
          {"dataset", r.dataset_name},
          {"augmented", r.augmented},
          {"scope", r.augmentation_scope},
          {"k", r.k},
          {"seed", r.seed},
          {"mean", metrics_to_json(r.mean)},
          {"folds", folds}};
}

MetricsReport report_from_json(const json& j) {
  MetricsReport r;
  try {
    r.model_name = j.at("model").get<std::string>();
    r.dataset_name = j.at("dataset").get<std::string>();
    r.augmented = j.at("augmented").get<bool>();
    r.augmentation_scope = j.at("scope").get<std::string>();
    r.k = j.at("k").get<std::size_t>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.mean = metrics_from_json(j.at("mean"));
    for (const auto& f : j.at("folds")) r.folds.push_back(metrics_from_json(f));
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed metrics report: ") + e.what());
  }
  return r;
}

std::string render_report(std::span<const MetricsReport> reports, ReportFormat format) {
  std::ostringstream out;
  switch (format) {
    case ReportFormat::markdown: {
      out << "| Model | Precision (False/True) | Recall (False/True) | F1 (False/True) | Accuracy | AUC |\n"
          << "|---|---|---|---|---|---|\n";
      for (const auto& r : reports) {
        const auto& m = r.mean;
        const std::string name = r.augmented ? "Aug-" + r.model_name : r.model_name;
        out << fmt::format("| {} | {:.3f}/{:.3f} | {:.3f}/{:.3f} | {:.3f}/{:.3f} | {:.3f} | {} |\n", name,
                           m.fake.precision, m.truth.precision, m.fake.recall, m.truth.recall, m.fake.f1,
                           m.truth.f1, m.accuracy, m.auc ? fmt::format("{:.3f}", *m.auc) : "n/a");
      }
      break;
    }
    case ReportFormat::csv: {
      out << kCsvHeader << '\n';
      for (const auto& r : reports) {
        const auto& m = r.mean;
        out << fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", csv_field(r.model_name),
                           csv_field(r.dataset_name), r.augmented ? "true" : "false", r.augmentation_scope, r.k,
                           r.seed, m.fake.precision, m.truth.precision, m.fake.recall, m.truth.recall, m.fake.f1,
                           m.truth.f1, m.accuracy, m.auc ? fmt::format("{}", *m.auc) : "",
                           m.confusion.true_positive, m.confusion.false_positive, m.confusion.true_negative,
                           m.confusion.false_negative);
      }
      break;
    }
    case ReportFormat::json: {
      json arr = json::array();
      for (const auto& r : reports) arr.push_back(report_to_json(r));
      out << arr.dump(2) << '\n';
      break;
    }
  }
  return out.str();
}

std::vector<MetricsReport> reports_from_csv(std::string_view csv) {
  std::vector<MetricsReport> out;
  std::istringstream in{std::string(csv)};
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) throw ValidationError("unexpected report CSV header");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 18) throw ValidationError("report CSV row has " + std::to_string(f.size()) + " fields");
    MetricsReport r;
    r.model_name = f[0];
    r.dataset_name = f[1];
    r.augmented = f[2] == "true";
    r.augmentation_scope = f[3];
    r.k = std::stoul(f[4]);
    r.seed = std::stoull(f[5]);
    auto& m = r.mean;
    m.fake.precision = std::stod(f[6]);
    m.truth.precision = std::stod(f[7]);
    m.fake.recall = std::stod(f[8]);
    m.truth.recall = std::stod(f[9]);
    m.fake.f1 = std::stod(f[10]);
    m.truth.f1 = std::stod(f[11]);
    m.accuracy = std::stod(f[12]);
    if (!f[13].empty()) m.auc = std::stod(f[13]);
    m.confusion = {std::stoul(f[14]), std::stoul(f[15]), std::stoul(f[16]), std::stoul(f[17])};
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace factshap
