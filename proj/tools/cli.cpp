#include "cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "factshap/augment.hpp"
#include "factshap/corpus.hpp"
#include "factshap/error.hpp"
#include "factshap/eval.hpp"
#include "factshap/explain.hpp"
#include "factshap/manifest.hpp"
#include "factshap/models.hpp"
#include "factshap/random.hpp"
#include "factshap/synthetic.hpp"
#include "factshap/teacher.hpp"
#include "factshap/textprep.hpp"

namespace factshap::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct DataOptions {
  std::string path;
  std::string format = "auto";

  Dataset load() const {
    const DataFormat f = format == "auto" ? format_from_path(path) : parse_format(format);
    return load_dataset(path, f);
  }
};

void add_data_options(CLI::App* cmd, DataOptions& o, const std::string& format_flag = "--format") {
  cmd->add_option("--data,-d", o.path, "Claims file (JSONL or CSV)")->required();
  cmd->add_option(format_flag, o.format, "Input format: auto, jsonl or csv")->capture_default_str();
}

struct TranslatorOptions {
  std::string fixture;
  std::string endpoint;
  std::string token;
  double timeout = 30.0;
  bool identity = false;

  std::unique_ptr<TranslationClient> make() const {
    const int chosen = int(!fixture.empty()) + int(!endpoint.empty()) + int(identity);
    if (chosen > 1) throw ValidationError("choose one of --fixture, --endpoint or --identity");
    if (!fixture.empty()) return std::make_unique<FixtureClient>(FixtureClient::load(fixture));
    if (!endpoint.empty()) return std::make_unique<HttpTranslationClient>(HttpClientConfig{endpoint, token, timeout});
    if (identity) return std::make_unique<IdentityClient>();
    throw ValidationError("augmentation needs a translator: --fixture, --endpoint or --identity");
  }

  json to_json() const {
    json j = {{"timeout", timeout}, {"identity", identity}};
    if (!fixture.empty()) j["fixture"] = fixture;
    if (!endpoint.empty()) j["endpoint"] = endpoint;
    return j;
  }
};

void add_translator_options(CLI::App* cmd, TranslatorOptions& o) {
  cmd->add_option("--fixture", o.fixture, "Recorded paraphrases, JSONL of {id, paraphrase}");
  cmd->add_option("--endpoint", o.endpoint, "Translation service URL");
  cmd->add_option("--token", o.token, "Bearer token for --endpoint");
  cmd->add_option("--timeout", o.timeout, "Request timeout in seconds")->capture_default_str();
  cmd->add_flag("--identity", o.identity, "Use the identity translator");
}

struct FeatureOptions {
  std::size_t min_df = 1;
  bool keep_stop_words = false;
  bool no_stem = false;
  std::string embeddings;

  VectorizerConfig vectorizer() const {
    VectorizerConfig c;
    c.min_document_frequency = min_df;
    c.tokenizer.remove_stop_words = !keep_stop_words;
    c.tokenizer.stem = !no_stem;
    return c;
  }
};

void add_feature_options(CLI::App* cmd, FeatureOptions& o) {
  cmd->add_option("--min-df", o.min_df, "Minimum document frequency of a term")->capture_default_str();
  cmd->add_flag("--keep-stop-words", o.keep_stop_words, "Do not remove stop words");
  cmd->add_flag("--no-stem", o.no_stem, "Do not strip plural suffixes");
  cmd->add_option("--embeddings", o.embeddings, "Per-claim vectors, JSONL of {id, vector}; replaces TF-IDF");
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write '" + path.string() + "'");
  out << text;
}

fs::path sidecar_manifest(const fs::path& output) { return fs::path(output.string() + ".manifest.json"); }

std::vector<std::string> original_ids(const Dataset& d) {
  std::vector<std::string> ids;
  for (const auto& r : d.records()) {
    if (!r.parent_id) ids.push_back(r.id);
  }
  return ids;
}

// Teacher targets must cover every original; augmentation products without
// their own target reuse their parent's.
std::vector<double> teacher_for(const TeacherTargets& targets, const Dataset& d) {
  std::vector<double> out;
  out.reserve(d.size());
  for (const auto& r : d.records()) {
    auto it = targets.by_id.find(r.id);
    if (it == targets.by_id.end() && r.parent_id) it = targets.by_id.find(*r.parent_id);
    if (it == targets.by_id.end()) throw ValidationError("no teacher target for '" + r.id + "'");
    out.push_back(it->second.p_true);
  }
  return out;
}

FeatureMatrix embedding_rows(const EmbeddingTable& table, const Dataset& d) {
  FeatureMatrix X;
  for (const auto& r : d.records()) {
    auto it = table.find(r.id);
    if (it == table.end() && r.parent_id) it = table.find(*r.parent_id);
    if (it == table.end()) throw ValidationError("no embedding for '" + r.id + "'");
    X.push_back(FeatureVector::from_dense(it->second));
  }
  return X;
}

std::vector<std::string> column_words(const PipelineSpec& spec, const Vectorizer& v, std::size_t dim) {
  if (spec.features == FeatureSpace::tfidf) return v.terms();
  std::vector<std::string> words;
  for (std::size_t j = 0; j < dim; ++j) words.push_back(fmt::format("dim_{}", j));
  return words;
}

// ---------------------------------------------------------------------------
// ingest

struct IngestArgs {
  DataOptions data;
  std::string output;
};

int run_ingest(const IngestArgs& a, std::ostream& out) {
  const Dataset d = a.data.load();
  save_dataset(a.output, d);
  RunManifest m;
  m.command = "ingest";
  m.config = {{"data", a.data.path}, {"format", a.data.format}, {"output", a.output}};
  m.inputs = {a.data.path};
  m.outputs = {a.output};
  m.write(sidecar_manifest(a.output));
  const auto c = d.class_counts();
  out << fmt::format("{} records ({} true, {} fake) written to {}\n", d.size(), c.true_claims, c.fake_claims,
                     a.output);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// augment

struct AugmentArgs {
  DataOptions data;
  std::string output;
  std::string pivot = kDefaultPivot;
  std::string scope = "train_folds_only";
  std::size_t concurrency = 1;
  TranslatorOptions translator;
};

int run_augment(const AugmentArgs& a, std::ostream& out) {
  const Dataset d = a.data.load();
  auto client = a.translator.make();
  AugmentOptions opts;
  opts.pivot = a.pivot;
  opts.scope = parse_scope(a.scope);
  opts.max_concurrency = std::max<std::size_t>(1, a.concurrency);
  const auto result = augment_dataset(*client, d, opts);
  save_dataset(a.output, result.dataset);

  const auto& r = result.report;
  json report = {{"produced", r.produced},
                 {"skipped_identical", r.skipped_identical},
                 {"failed", r.failed},
                 {"not_eligible", r.not_eligible},
                 {"pivot_language", r.pivot_language},
                 {"scope", std::string(scope_name(r.scope))},
                 {"failures", r.failures}};
  const fs::path report_path = a.output + ".report.json";
  write_text(report_path, report.dump(2) + "\n");

  RunManifest m;
  m.command = "augment";
  m.config = {{"data", a.data.path}, {"output", a.output},          {"pivot", a.pivot},
              {"scope", a.scope},    {"concurrency", a.concurrency}, {"translator", a.translator.to_json()}};
  m.inputs = {a.data.path};
  if (!a.translator.fixture.empty()) m.inputs.push_back(a.translator.fixture);
  m.outputs = {a.output, report_path};
  m.write(sidecar_manifest(a.output));
  out << fmt::format("produced {}, identical {}, failed {}, not eligible {} (pivot {}, scope {})\n", r.produced,
                     r.skipped_identical, r.failed, r.not_eligible, r.pivot_language, scope_name(r.scope));
  return kExitOk;
}

// ---------------------------------------------------------------------------
// train / distill / tree / forest

struct TrainArgs {
  ModelKind kind = ModelKind::logistic;
  DataOptions data;
  std::string out_dir;
  std::uint64_t seed = 0;
  FeatureOptions features;
  TrainConfig train;
  std::string optimizer = "gd";
  std::string teacher;
  TreeConfig tree;
  ForestConfig forest;
  bool no_bootstrap = false;
};

void add_train_options(CLI::App* cmd, TrainArgs& a) {
  add_data_options(cmd, a.data);
  cmd->add_option("--out,-o", a.out_dir, "Output directory")->required();
  cmd->add_option("--seed", a.seed, "Random seed")->capture_default_str();
  add_feature_options(cmd, a.features);
  if (a.kind == ModelKind::logistic || a.kind == ModelKind::distilled) {
    cmd->add_option("--epochs", a.train.epochs, "Training epochs")->capture_default_str();
    cmd->add_option("--learning-rate", a.train.learning_rate, "Step size")->capture_default_str();
    cmd->add_option("--l2", a.train.l2_penalty, "L2 penalty on the weights")->capture_default_str();
    cmd->add_option("--optimizer", a.optimizer, "gd or adam")->capture_default_str();
  }
  if (a.kind == ModelKind::distilled) {
    cmd->add_option("--teacher", a.teacher, "Teacher targets, JSONL of {id, p_true}")->required();
    cmd->add_option("--alpha", a.train.distill_weight, "Weight of the teacher term")->capture_default_str();
    cmd->add_option("--temperature", a.train.temperature, "Softening temperature")->capture_default_str();
  }
  if (a.kind == ModelKind::tree || a.kind == ModelKind::forest) {
    cmd->add_option("--max-depth", a.tree.max_depth, "Maximum tree depth")->capture_default_str();
    cmd->add_option("--min-leaf", a.tree.min_leaf, "Minimum rows per leaf")->capture_default_str();
  }
  if (a.kind == ModelKind::forest) {
    cmd->add_option("--trees", a.forest.n_trees, "Number of trees")->capture_default_str();
    cmd->add_option("--feature-fraction", a.forest.feature_fraction,
                    "Fraction of features tried per split; 0 selects sqrt")
        ->capture_default_str();
    cmd->add_flag("--no-bootstrap", a.no_bootstrap, "Train every tree on all rows");
  }
}

PipelineSpec spec_from(const TrainArgs& a) {
  PipelineSpec s;
  s.name = std::string(model_kind_name(a.kind));
  s.model = a.kind;
  s.features = a.features.embeddings.empty() ? FeatureSpace::tfidf : FeatureSpace::embeddings;
  s.vectorizer = a.features.vectorizer();
  s.train = a.train;
  if (a.optimizer == "gd") {
    s.train.optimizer = Optimizer::gd;
  } else if (a.optimizer == "adam") {
    s.train.optimizer = Optimizer::adam;
  } else {
    throw ValidationError("unknown optimizer '" + a.optimizer + "' (expected gd or adam)");
  }
  s.train.seed = a.seed;
  s.tree = a.tree;
  s.forest = a.forest;
  s.forest.tree = a.tree;
  s.forest.seed = a.seed;
  s.forest.bootstrap = !a.no_bootstrap;
  return s;
}

int run_train(const TrainArgs& a, std::ostream& out) {
  const Dataset d = a.data.load();
  d.require_both_classes();
  const PipelineSpec spec = spec_from(a);
  spec.train.validate();

  const fs::path dir(a.out_dir);
  fs::create_directories(dir);
  RunManifest m;
  m.command = std::string(model_kind_name(a.kind));
  m.inputs = {a.data.path};

  Vectorizer vectorizer;
  FeatureMatrix X;
  if (spec.features == FeatureSpace::tfidf) {
    std::vector<TokenStream> corpus;
    for (const auto& r : d.records()) corpus.push_back(tokenize(r.text, spec.vectorizer.tokenizer));
    vectorizer = Vectorizer::fit(corpus, spec.vectorizer);
    for (const auto& t : corpus) X.push_back(vectorizer.transform(t));
    vectorizer.save(dir / "vectorizer.json");
    m.outputs.push_back(dir / "vectorizer.json");
  } else {
    X = embedding_rows(load_embeddings(a.features.embeddings), d);
    m.inputs.push_back(a.features.embeddings);
  }
  std::vector<int> y;
  for (const auto& r : d.records()) y.push_back(label_value(r.label));

  Model model;
  const std::vector<double>* curve = nullptr;
  switch (a.kind) {
    case ModelKind::logistic:
      model = train_logistic(X, y, spec.train);
      curve = &std::get<LogisticModel>(model).meta.loss_curve;
      break;
    case ModelKind::distilled: {
      const Dataset originals = d.subset(original_ids(d), d.name());
      const auto targets = ingest_teacher_targets(a.teacher, originals);
      m.inputs.push_back(a.teacher);
      model = train_distilled(X, y, teacher_for(targets, d), spec.train);
      curve = &std::get<LogisticModel>(model).meta.loss_curve;
      break;
    }
    case ModelKind::tree:
      model = train_tree(X, y, spec.tree);
      break;
    case ModelKind::forest:
      model = train_forest(X, y, spec.forest);
      break;
  }

  save_model(dir / "model.json", model);
  m.outputs.push_back(dir / "model.json");
  write_text(dir / "pipeline.json", to_json(spec).dump(2) + "\n");
  m.outputs.push_back(dir / "pipeline.json");
  if (curve) {
    std::string csv = "epoch,loss\n";
    for (std::size_t i = 0; i < curve->size(); ++i) csv += fmt::format("{},{}\n", i, (*curve)[i]);
    write_text(dir / "loss_curve.csv", csv);
    m.outputs.push_back(dir / "loss_curve.csv");
  }

  m.config = {{"data", a.data.path}, {"format", a.data.format}, {"out", a.out_dir}, {"seed", a.seed},
              {"pipeline", to_json(spec)}};
  if (!a.teacher.empty()) m.config["teacher"] = a.teacher;
  if (!a.features.embeddings.empty()) m.config["embeddings"] = a.features.embeddings;
  m.write(dir / "manifest.json");

  out << fmt::format("{} model on {} records ({} features) written to {}\n", model_kind_name(a.kind), d.size(),
                     model_dimension(model), (dir / "model.json").string());
  if (curve && !curve->empty()) out << fmt::format("loss {} -> {}\n", curve->front(), curve->back());
  return kExitOk;
}

// ---------------------------------------------------------------------------
// explain

struct ExplainArgs {
  std::string model_dir;
  DataOptions data;
  std::string id;
  std::string text;
  std::string method = "auto";
  std::string tier = "TSE";
  std::string format = "terminal";
  std::size_t top_k = kDefaultTopK;
  std::size_t permutations = 200;
  std::size_t background = 20;
  std::uint64_t seed = 0;
  std::string embeddings;
  std::string output;
  std::string attribution;
};

ShapMethod resolve_method(const std::string& name, const Model& model) {
  if (name == "auto") {
    return std::holds_alternative<LogisticModel>(model) ? ShapMethod::linear_exact : ShapMethod::tree_interventional;
  }
  if (name == "exact") return ShapMethod::brute_force;
  if (name == "linear") return ShapMethod::linear_exact;
  if (name == "tree") return ShapMethod::tree_interventional;
  return parse_method(name);
}

int run_explain(const ExplainArgs& a, std::ostream& out) {
  if (a.id.empty() == a.text.empty()) throw ValidationError("give exactly one of --id or --text");
  const fs::path dir(a.model_dir);
  std::ifstream spec_in(dir / "pipeline.json");
  if (!spec_in) throw ValidationError("cannot open '" + (dir / "pipeline.json").string() + "'");
  PipelineSpec spec;
  try {
    spec = pipeline_from_json(json::parse(spec_in));
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed pipeline.json: ") + e.what());
  }
  const Model model = load_model(dir / "model.json");
  const Dataset d = a.data.load();

  RunManifest m;
  m.command = "explain";
  m.inputs = {dir / "pipeline.json", dir / "model.json", a.data.path};

  Vectorizer vectorizer;
  EmbeddingTable table;
  if (spec.features == FeatureSpace::tfidf) {
    vectorizer = Vectorizer::load(dir / "vectorizer.json");
    m.inputs.push_back(dir / "vectorizer.json");
  } else {
    if (a.embeddings.empty()) throw ValidationError("this model uses embeddings; pass --embeddings");
    if (!a.text.empty()) throw ValidationError("embedding models explain stored claims only; use --id");
    table = load_embeddings(a.embeddings);
    m.inputs.push_back(a.embeddings);
  }
  auto featurize = [&](const ClaimRecord& r) {
    if (spec.features == FeatureSpace::tfidf) return vectorizer.transform_text(r.text);
    Dataset one("claim", {r});
    return embedding_rows(table, one).front();
  };

  ClaimRecord claim;
  if (!a.id.empty()) {
    const auto* found = d.find(a.id);
    if (!found) throw ValidationError("no claim with id '" + a.id + "' in " + a.data.path);
    claim = *found;
  } else {
    claim.id = "input";
    claim.text = a.text;
  }

  // Background rows are a seeded sample of the dataset, kept in file order.
  std::vector<std::size_t> picks(d.size());
  for (std::size_t i = 0; i < picks.size(); ++i) picks[i] = i;
  if (a.background == 0) throw ValidationError("--background must be at least 1");
  if (picks.size() > a.background) {
    Rng rng(derive_seed(a.seed, 1));
    shuffle(std::span<std::size_t>(picks), rng);
    picks.resize(a.background);
    std::sort(picks.begin(), picks.end());
  }
  FeatureMatrix rows;
  for (std::size_t i : picks) {
    if (spec.features == FeatureSpace::tfidf) {
      rows.push_back(vectorizer.transform_text(d[i].text));
    } else {
      Dataset one("row", {d[i]});
      rows.push_back(embedding_rows(table, one).front());
    }
  }
  const Background bg = build_background(model, rows);
  const FeatureVector x = featurize(claim);

  const ShapMethod method = resolve_method(a.method, model);
  Attribution attr;
  switch (method) {
    case ShapMethod::linear_exact: {
      const auto* lm = std::get_if<LogisticModel>(&model);
      if (!lm) throw ValidationError("linear_exact needs a logistic model; use tree_interventional or sampling");
      attr = linear_shap(*lm, x, bg);
      break;
    }
    case ShapMethod::tree_interventional:
      if (std::holds_alternative<LogisticModel>(model)) {
        throw ValidationError("tree_interventional needs a tree or forest; use linear_exact");
      }
      attr = tree_shap(model, x, bg);
      break;
    case ShapMethod::brute_force:
      attr = exact_shapley(model, x, bg);
      break;
    case ShapMethod::sampling:
      attr = sampling_shapley(model, x, bg, a.permutations, a.seed);
      break;
  }

  const auto words = column_words(spec, vectorizer, model_dimension(model));
  const auto card = make_card(attr, claim, words, x.indices(), parse_tier(a.tier), a.top_k);
  const std::string rendered = render_card(card, parse_card_format(a.format));

  if (a.output.empty()) {
    out << rendered;
    if (!rendered.empty() && rendered.back() != '\n') out << '\n';
  } else {
    write_text(a.output, rendered);
    m.outputs.push_back(a.output);
  }
  if (!a.attribution.empty()) {
    write_text(a.attribution, attribution_to_json(attr, words).dump(2) + "\n");
    m.outputs.push_back(a.attribution);
  }
  if (!a.output.empty()) {
    m.config = {{"model_dir", a.model_dir}, {"data", a.data.path}, {"method", std::string(method_name(method))},
                {"tier", a.tier},           {"format", a.format},  {"top_k", a.top_k},
                {"permutations", a.permutations}, {"background", a.background}, {"seed", a.seed}};
    if (!a.id.empty()) m.config["id"] = a.id;
    if (!a.text.empty()) m.config["text"] = a.text;
    m.write(sidecar_manifest(a.output));
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// eval

struct EvalArgs {
  DataOptions data;
  std::string pipeline;
  std::string model = "logistic";
  std::size_t k = 10;
  std::uint64_t seed = 0;
  std::vector<std::string> reports;
  std::string out_dir;
  std::string teacher;
  std::string embeddings;
  bool augment = false;
  std::string scope;
  std::string pivot;
  TranslatorOptions translator;
};

std::vector<PipelineSpec> load_pipelines(const EvalArgs& a) {
  std::vector<PipelineSpec> specs;
  if (a.pipeline.empty()) {
    PipelineSpec s;
    s.model = parse_model_kind(a.model);
    s.name = a.model;
    if (!a.embeddings.empty()) s.features = FeatureSpace::embeddings;
    specs.push_back(s);
  } else {
    std::ifstream in(a.pipeline);
    if (!in) throw ValidationError("cannot open '" + a.pipeline + "'");
    json j;
    try {
      j = json::parse(in);
    } catch (const json::exception& e) {
      throw ValidationError("malformed pipeline file '" + a.pipeline + "': " + e.what());
    }
    if (j.is_object() && j.contains("pipelines")) j = j["pipelines"];
    if (j.is_array()) {
      for (const auto& item : j) specs.push_back(pipeline_from_json(item));
    } else {
      specs.push_back(pipeline_from_json(j));
    }
  }
  for (auto& s : specs) {
    if (a.augment) s.augment = true;
    if (!a.scope.empty()) s.scope = parse_scope(a.scope);
    if (!a.pivot.empty()) s.pivot = a.pivot;
    if (s.name.empty()) s.name = std::string(model_kind_name(s.model));
    s.train.seed = a.seed;
    s.forest.seed = a.seed;
  }
  return specs;
}

int run_eval(const EvalArgs& a, std::ostream& out) {
  const Dataset d = a.data.load();
  const auto specs = load_pipelines(a);
  std::vector<ReportFormat> formats;
  for (const auto& r : a.reports.empty() ? std::vector<std::string>{"markdown"} : a.reports) {
    formats.push_back(parse_report_format(r));
  }

  RunManifest m;
  m.command = "eval";
  m.inputs = {a.data.path};
  if (!a.pipeline.empty()) m.inputs.push_back(a.pipeline);

  std::optional<TeacherTargets> teacher;
  std::optional<EmbeddingTable> embeddings;
  std::unique_ptr<TranslationClient> translator;
  const bool needs_teacher =
      std::any_of(specs.begin(), specs.end(), [](const auto& s) { return s.model == ModelKind::distilled; });
  const bool needs_translator = std::any_of(specs.begin(), specs.end(), [](const auto& s) { return s.augment; });
  if (needs_teacher) {
    if (a.teacher.empty()) throw ValidationError("distilled pipelines need --teacher");
    teacher = ingest_teacher_targets(a.teacher, d.subset(original_ids(d), d.name()));
    m.inputs.push_back(a.teacher);
  }
  if (!a.embeddings.empty()) {
    embeddings = load_embeddings(a.embeddings);
    m.inputs.push_back(a.embeddings);
  }
  if (needs_translator) {
    translator = a.translator.make();
    if (!a.translator.fixture.empty()) m.inputs.push_back(a.translator.fixture);
  }
  CvResources res;
  res.teacher = teacher ? &*teacher : nullptr;
  res.embeddings = embeddings ? &*embeddings : nullptr;
  res.translator = translator.get();

  std::vector<MetricsReport> reports;
  json pipelines = json::array();
  for (const auto& s : specs) {
    reports.push_back(cross_validate(s, d, a.k, a.seed, res));
    pipelines.push_back(to_json(s));
  }

  const fs::path dir(a.out_dir);
  fs::create_directories(dir);
  for (ReportFormat f : formats) {
    const char* name = f == ReportFormat::markdown ? "report.md" : f == ReportFormat::csv ? "report.csv" : "report.json";
    write_text(dir / name, render_report(reports, f));
    m.outputs.push_back(dir / name);
  }
  m.config = {{"data", a.data.path}, {"k", a.k},     {"seed", a.seed}, {"reports", a.reports},
              {"out", a.out_dir},    {"pipelines", pipelines}};
  if (needs_translator) m.config["translator"] = a.translator.to_json();
  m.write(dir / "manifest.json");
  out << render_report(reports, ReportFormat::markdown);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// synth

struct SynthArgs {
  std::string out_dir;
  PlantedCorpusConfig config;
};

int run_synth(const SynthArgs& a, std::ostream& out) {
  const auto corpus = planted_corpus(a.config);
  const fs::path dir(a.out_dir);
  fs::create_directories(dir);

  const fs::path claims = dir / "synthetic_claims.jsonl";
  save_dataset(claims, corpus.dataset);

  std::string fixture;
  for (const auto& [id, text] : planted_paraphrases(corpus.dataset, derive_seed(a.config.seed, 7))) {
    fixture += json({{"id", id}, {"paraphrase", text}}).dump() + "\n";
  }
  const fs::path paraphrases = dir / "synthetic_paraphrases.jsonl";
  write_text(paraphrases, fixture);

  TeacherTargets targets;
  targets.teacher_name = "planted-posterior";
  for (const auto& r : corpus.dataset.records()) {
    const double p = planted_posterior(corpus, tokenize(r.text));
    targets.by_id.emplace(r.id, TeacherTarget{p, logit(p)});
  }
  std::ostringstream teacher_text;
  write_teacher_targets(teacher_text, targets);
  const fs::path teacher = dir / "synthetic_teacher.jsonl";
  write_text(teacher, teacher_text.str());

  RunManifest m;
  m.command = "synth";
  m.config = {{"out", a.out_dir},
              {"claims", a.config.claims},
              {"true_fraction", a.config.true_fraction},
              {"signal_words", a.config.signal_words},
              {"fidelity", a.config.fidelity},
              {"noise_words", a.config.noise_words},
              {"seed", a.config.seed}};
  m.outputs = {claims, paraphrases, teacher};
  m.write(dir / "manifest.json");
  out << fmt::format("{} claims written to {}\n", corpus.dataset.size(), claims.string());
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"factshap: explainable fact-checking models with Shapley attributions"};
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML or INI file of option values; command-line flags override it");
  app.set_version_flag("--version", std::string(library_version()));

  IngestArgs ingest;
  auto* ingest_cmd = app.add_subcommand("ingest", "Validate a dataset and write canonical JSONL");
  add_data_options(ingest_cmd, ingest.data);
  ingest_cmd->add_option("--output,-o", ingest.output, "Canonical JSONL output")->required();

  AugmentArgs augment;
  auto* augment_cmd = app.add_subcommand("augment", "Append back-translated paraphrases");
  add_data_options(augment_cmd, augment.data);
  augment_cmd->add_option("--output,-o", augment.output, "Augmented JSONL output")->required();
  augment_cmd->add_option("--pivot", augment.pivot, "Pivot language")->capture_default_str();
  augment_cmd->add_option("--scope", augment.scope, "train_folds_only or whole_dataset")->capture_default_str();
  augment_cmd->add_option("--concurrency", augment.concurrency, "Concurrent requests")->capture_default_str();
  add_translator_options(augment_cmd, augment.translator);

  std::vector<std::pair<CLI::App*, std::unique_ptr<TrainArgs>>> trainers;
  for (auto kind : {ModelKind::logistic, ModelKind::distilled, ModelKind::tree, ModelKind::forest}) {
    auto args_ptr = std::make_unique<TrainArgs>();
    args_ptr->kind = kind;
    const char* name = kind == ModelKind::logistic    ? "train"
                       : kind == ModelKind::distilled ? "distill"
                       : kind == ModelKind::tree      ? "tree"
                                                      : "forest";
    const char* help = kind == ModelKind::logistic    ? "Train a logistic model on hard labels"
                       : kind == ModelKind::distilled ? "Train a logistic student on teacher probabilities"
                       : kind == ModelKind::tree      ? "Train a decision tree"
                                                      : "Train a random forest";
    auto* cmd = app.add_subcommand(name, help);
    add_train_options(cmd, *args_ptr);
    trainers.emplace_back(cmd, std::move(args_ptr));
  }

  ExplainArgs explain;
  auto* explain_cmd = app.add_subcommand("explain", "Explain one claim with Shapley values");
  explain_cmd->add_option("--model-dir,-m", explain.model_dir, "Directory written by a training command")
      ->required();
  add_data_options(explain_cmd, explain.data, "--data-format");
  explain_cmd->add_option("--id", explain.id, "Id of a claim in --data");
  explain_cmd->add_option("--text", explain.text, "Free claim text");
  explain_cmd
      ->add_option("--method", explain.method,
                   "auto, linear_exact, tree_interventional, brute_force (exact) or sampling")
      ->capture_default_str();
  explain_cmd->add_option("--tier", explain.tier, "T, TSE or TSESE")->capture_default_str();
  explain_cmd->add_option("--format", explain.format, "json, html or terminal")->capture_default_str();
  explain_cmd->add_option("--top-k", explain.top_k, "Words shown on the force plot")->capture_default_str();
  explain_cmd->add_option("--permutations", explain.permutations, "Permutations for sampling")
      ->capture_default_str();
  explain_cmd->add_option("--background", explain.background, "Reference rows drawn from --data")
      ->capture_default_str();
  explain_cmd->add_option("--seed", explain.seed, "Random seed")->capture_default_str();
  explain_cmd->add_option("--embeddings", explain.embeddings, "Per-claim vectors for embedding models");
  explain_cmd->add_option("--output,-o", explain.output, "Write the card here instead of stdout");
  explain_cmd->add_option("--attribution", explain.attribution, "Also write the raw attribution JSON");

  EvalArgs eval;
  auto* eval_cmd = app.add_subcommand("eval", "Cross-validate one or more pipelines and write a report");
  add_data_options(eval_cmd, eval.data);
  eval_cmd->add_option("--pipeline", eval.pipeline, "Pipeline spec JSON (object, array, or {pipelines: [...]})");
  eval_cmd->add_option("--model", eval.model, "Model when no --pipeline: logistic, distilled, tree, forest")
      ->capture_default_str();
  eval_cmd->add_option("--k", eval.k, "Number of folds (at least 2)")
      ->capture_default_str()
      ->check(CLI::Validator(
          [](std::string& v) {
            return v.find_first_not_of("0123456789") == std::string::npos && !v.empty() && std::stoull(v) >= 2
                       ? std::string()
                       : "k must be an integer of at least 2, got " + v;
          },
          "K>=2"));
  eval_cmd->add_option("--seed", eval.seed, "Random seed")->capture_default_str();
  eval_cmd->add_option("--report", eval.reports, "markdown, csv or json; repeatable");
  eval_cmd->add_option("--out,-o", eval.out_dir, "Output directory")->required();
  eval_cmd->add_option("--teacher", eval.teacher, "Teacher targets for distilled pipelines");
  eval_cmd->add_option("--embeddings", eval.embeddings, "Per-claim vectors for embedding pipelines");
  eval_cmd->add_flag("--augment", eval.augment, "Augment training data by back-translation");
  eval_cmd->add_option("--scope", eval.scope, "Augmentation scope override");
  eval_cmd->add_option("--pivot", eval.pivot, "Pivot language override");
  add_translator_options(eval_cmd, eval.translator);

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "Generate the planted synthetic corpus and its fixtures");
  synth_cmd->add_option("--out,-o", synth.out_dir, "Output directory")->required();
  synth_cmd->add_option("--claims", synth.config.claims, "Number of claims")->capture_default_str();
  synth_cmd->add_option("--fidelity", synth.config.fidelity, "Probability a signal word matches the label")
      ->capture_default_str();
  synth_cmd->add_option("--seed", synth.config.seed, "Random seed")->capture_default_str();

  std::vector<const char*> argv;
  for (const auto& s : args) argv.push_back(s.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*ingest_cmd) return run_ingest(ingest, out);
    if (*augment_cmd) return run_augment(augment, out);
    for (const auto& [cmd, targs] : trainers) {
      if (*cmd) return run_train(*targs, out);
    }
    if (*explain_cmd) return run_explain(explain, out);
    if (*eval_cmd) return run_eval(eval, out);
    if (*synth_cmd) return run_synth(synth, out);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const TransportError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitInternal;
}

}  // namespace factshap::cli
