#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "factshap/augment.hpp"
#include "factshap/corpus.hpp"
#include "factshap/error.hpp"
#include "factshap/eval.hpp"
#include "factshap/explain.hpp"
#include "factshap/models.hpp"
#include "factshap/synthetic.hpp"
#include "factshap/teacher.hpp"
#include "factshap/textprep.hpp"

namespace py = pybind11;
using namespace factshap;

namespace {

using Dense = std::vector<std::vector<double>>;

FeatureMatrix to_matrix(const Dense& rows) {
  FeatureMatrix X;
  X.reserve(rows.size());
  for (const auto& r : rows) X.push_back(FeatureVector::from_dense(r));
  return X;
}

FeatureVector to_vector(const std::vector<double>& x) { return FeatureVector::from_dense(x); }

// JSON crosses the boundary as text; the Python layer wraps these in json.loads/dumps.
std::string attribution_json(const Attribution& a, const std::vector<std::string>& words) {
  std::vector<std::string> labels = words;
  if (labels.empty()) {
    for (std::size_t j = 0; j < a.phi.size(); ++j) labels.push_back("x" + std::to_string(j));
  }
  return attribution_to_json(a, labels).dump();
}

Attribution explain(const Model& model, const std::vector<double>& x, const Dense& background,
                    const std::string& method, std::size_t permutations, std::uint64_t seed) {
  const auto bg = build_background(model, to_matrix(background));
  const auto row = to_vector(x);
  if (method == "auto") return explain_exact(model, row, bg);
  switch (parse_method(method)) {
    case ShapMethod::linear_exact:
      if (!std::holds_alternative<LogisticModel>(model)) {
        throw ValidationError("linear_exact needs a logistic model");
      }
      return linear_shap(std::get<LogisticModel>(model), row, bg);
    case ShapMethod::tree_interventional: return tree_shap(model, row, bg);
    case ShapMethod::brute_force: return exact_shapley(model, row, bg);
    case ShapMethod::sampling: return sampling_shapley(model, row, bg, permutations, seed);
  }
  throw ValidationError("unknown attribution method");
}

}  // namespace

PYBIND11_MODULE(_factshap, m) {
  m.doc() = "Fact-checking classifiers with Shapley explanations";
  m.attr("__version__") = FACTSHAP_VERSION;

  auto validation = py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<ParseError>(m, "ParseError", validation.ptr());
  py::register_exception<TooManyPlayersError>(m, "TooManyPlayersError", validation.ptr());
  py::register_exception<TransportError>(m, "TransportError", PyExc_RuntimeError);
  py::register_exception<DivergenceError>(m, "DivergenceError", PyExc_ArithmeticError);

  // Corpus
  py::class_<ClaimRecord>(m, "ClaimRecord")
      .def(py::init([](std::string id, std::string text, std::string label, std::optional<std::string> source,
                       std::optional<std::string> date, std::optional<std::string> evidence) {
             ClaimRecord r;
             r.id = std::move(id);
             r.text = std::move(text);
             r.label = parse_label(label);
             r.source = std::move(source);
             r.date = std::move(date);
             r.evidence = std::move(evidence);
             return r;
           }),
           py::arg("id"), py::arg("text"), py::arg("label"), py::arg("source") = py::none(),
           py::arg("date") = py::none(), py::arg("evidence") = py::none())
      .def_readonly("id", &ClaimRecord::id)
      .def_readonly("text", &ClaimRecord::text)
      .def_property_readonly("label", [](const ClaimRecord& r) { return std::string(label_name(r.label)); })
      .def_property_readonly("y", [](const ClaimRecord& r) { return label_value(r.label); })
      .def_readonly("source", &ClaimRecord::source)
      .def_readonly("date", &ClaimRecord::date)
      .def_readonly("evidence", &ClaimRecord::evidence)
      .def_readonly("parent_id", &ClaimRecord::parent_id)
      .def("__repr__", [](const ClaimRecord& r) { return "<ClaimRecord " + r.id + ">"; });

  py::class_<Dataset>(m, "Dataset")
      .def(py::init<std::string, std::vector<ClaimRecord>>(), py::arg("name"), py::arg("records"))
      .def_property_readonly("name", &Dataset::name)
      .def_property_readonly("records", &Dataset::records)
      .def("__len__", &Dataset::size)
      .def("__getitem__",
           [](const Dataset& d, std::size_t i) {
             if (i >= d.size()) throw py::index_error();
             return d[i];
           })
      .def_property_readonly("texts",
                             [](const Dataset& d) {
                               std::vector<std::string> out;
                               for (const auto& r : d.records()) out.push_back(r.text);
                               return out;
                             })
      .def_property_readonly("labels",
                             [](const Dataset& d) {
                               std::vector<int> out;
                               for (const auto& r : d.records()) out.push_back(label_value(r.label));
                               return out;
                             })
      .def("save", [](const Dataset& d, const std::filesystem::path& p) { save_dataset(p, d); });

  m.def(
      "load_dataset",
      [](const std::filesystem::path& path, const std::string& format) {
        return load_dataset(path, format == "auto" ? format_from_path(path) : parse_format(format));
      },
      py::arg("path"), py::arg("format") = "auto");
  m.def(
      "stratified_kfold",
      [](const Dataset& d, std::size_t k, std::uint64_t seed) { return stratified_kfold(d, k, seed).folds; },
      py::arg("dataset"), py::arg("k"), py::arg("seed") = 0);
  m.def(
      "planted_corpus",
      [](std::size_t claims, double fidelity, std::uint64_t seed) {
        PlantedCorpusConfig cfg;
        cfg.claims = claims;
        cfg.fidelity = fidelity;
        cfg.seed = seed;
        return planted_corpus(cfg).dataset;
      },
      py::arg("claims") = 200, py::arg("fidelity") = 0.9, py::arg("seed") = 2020);

  // Text
  m.def(
      "tokenize",
      [](const std::string& text, bool remove_stop_words, bool stem) {
        TokenizerConfig cfg;
        cfg.remove_stop_words = remove_stop_words;
        cfg.stem = stem;
        return tokenize(text, cfg);
      },
      py::arg("text"), py::arg("remove_stop_words") = true, py::arg("stem") = true);
  m.def("stem_token", &stem_token);

  py::class_<Vectorizer>(m, "Vectorizer")
      .def_static(
          "fit",
          [](const std::vector<std::string>& texts, std::size_t min_df, bool remove_stop_words, bool stem) {
            VectorizerConfig cfg;
            cfg.min_document_frequency = min_df;
            cfg.tokenizer.remove_stop_words = remove_stop_words;
            cfg.tokenizer.stem = stem;
            std::vector<TokenStream> corpus;
            for (const auto& t : texts) corpus.push_back(tokenize(t, cfg.tokenizer));
            return Vectorizer::fit(corpus, cfg);
          },
          py::arg("texts"), py::arg("min_df") = 1, py::arg("remove_stop_words") = true, py::arg("stem") = true)
      .def_static("load", &Vectorizer::load)
      .def("save", &Vectorizer::save)
      .def("transform", [](const Vectorizer& v, const std::string& text) { return v.transform_text(text).to_dense(); })
      .def("transform_many",
           [](const Vectorizer& v, const std::vector<std::string>& texts) {
             Dense out;
             for (const auto& t : texts) out.push_back(v.transform_text(t).to_dense());
             return out;
           })
      .def_property_readonly("terms", &Vectorizer::terms)
      .def_property_readonly("idf", &Vectorizer::idf)
      .def_property_readonly("dimension", &Vectorizer::dimension);

  // Models
  py::class_<LogisticModel>(m, "LogisticModel")
      .def_readonly("weights", &LogisticModel::weights)
      .def_readonly("bias", &LogisticModel::bias)
      .def_property_readonly("loss_curve", [](const LogisticModel& lm) { return lm.meta.loss_curve; });
  py::class_<TreeModel>(m, "TreeModel")
      .def_property_readonly("node_count", [](const TreeModel& t) { return t.nodes.size(); })
      .def("depth", &TreeModel::depth);
  py::class_<ForestModel>(m, "ForestModel")
      .def_property_readonly("tree_count", [](const ForestModel& f) { return f.trees.size(); });

  auto train_config = [](double lr, int epochs, double l2, const std::string& optimizer, double alpha,
                         double temperature) {
    TrainConfig cfg;
    cfg.learning_rate = lr;
    cfg.epochs = epochs;
    cfg.l2_penalty = l2;
    cfg.optimizer = optimizer == "adam" ? Optimizer::adam : Optimizer::gd;
    if (optimizer != "adam" && optimizer != "gd") throw ValidationError("optimizer must be gd or adam");
    cfg.distill_weight = alpha;
    cfg.temperature = temperature;
    return cfg;
  };
  m.def(
      "train_logistic",
      [=](const Dense& X, const std::vector<int>& y, double lr, int epochs, double l2, const std::string& opt) {
        return train_logistic(to_matrix(X), y, train_config(lr, epochs, l2, opt, 1.0, 1.0));
      },
      py::arg("X"), py::arg("y"), py::arg("learning_rate") = 0.5, py::arg("epochs") = 500, py::arg("l2") = 1e-4,
      py::arg("optimizer") = "gd");
  m.def(
      "train_distilled",
      [=](const Dense& X, const std::vector<int>& y, const std::vector<double>& teacher, double alpha,
          double temperature, double lr, int epochs, double l2, const std::string& opt) {
        return train_distilled(to_matrix(X), y, teacher, train_config(lr, epochs, l2, opt, alpha, temperature));
      },
      py::arg("X"), py::arg("y"), py::arg("teacher"), py::arg("alpha") = 1.0, py::arg("temperature") = 1.0,
      py::arg("learning_rate") = 0.5, py::arg("epochs") = 500, py::arg("l2") = 1e-4, py::arg("optimizer") = "gd");
  m.def(
      "train_tree",
      [](const Dense& X, const std::vector<int>& y, int max_depth, std::size_t min_leaf) {
        return train_tree(to_matrix(X), y, TreeConfig{max_depth, min_leaf});
      },
      py::arg("X"), py::arg("y"), py::arg("max_depth") = 8, py::arg("min_leaf") = 1);
  m.def(
      "train_forest",
      [](const Dense& X, const std::vector<int>& y, std::size_t n_trees, int max_depth, std::size_t min_leaf,
         double feature_fraction, bool bootstrap, std::uint64_t seed) {
        ForestConfig cfg;
        cfg.n_trees = n_trees;
        cfg.tree = TreeConfig{max_depth, min_leaf};
        cfg.feature_fraction = feature_fraction;
        cfg.bootstrap = bootstrap;
        cfg.seed = seed;
        return train_forest(to_matrix(X), y, cfg);
      },
      py::arg("X"), py::arg("y"), py::arg("n_trees") = 100, py::arg("max_depth") = 8, py::arg("min_leaf") = 1,
      py::arg("feature_fraction") = 0.0, py::arg("bootstrap") = true, py::arg("seed") = 0);

  m.def("predict_proba",
        [](const Model& model, const std::vector<double>& x) { return predict_proba(model, std::span(x)); });
  m.def("predict_log_odds",
        [](const Model& model, const std::vector<double>& x) { return predict_log_odds(model, std::span(x)); });
  m.def("save_model", [](const std::filesystem::path& p, const Model& model) { save_model(p, model); });
  m.def("load_model", &load_model);
  m.def("model_to_json", [](const Model& model) { return model_to_json(model).dump(); });
  m.def("distill_loss", &distill_loss, py::arg("teacher"), py::arg("student"), py::arg("temperature") = 1.0);

  // Explanations
  m.def(
      "_explain",
      [](const Model& model, const std::vector<double>& x, const Dense& background, const std::string& method,
         std::size_t permutations, std::uint64_t seed, const std::vector<std::string>& words) {
        return attribution_json(explain(model, x, background, method, permutations, seed), words);
      },
      py::arg("model"), py::arg("x"), py::arg("background"), py::arg("method") = "auto",
      py::arg("permutations") = 200, py::arg("seed") = 0, py::arg("words") = std::vector<std::string>{});

  // Evaluation
  m.def("roc_auc", [](const std::vector<double>& s, const std::vector<int>& y) { return roc_auc(s, y); });
  m.def(
      "_classification_metrics",
      [](const std::vector<double>& s, const std::vector<int>& y, double threshold) {
        MetricsReport r;
        r.mean = classification_metrics(s, y, threshold);
        return report_to_json(r).at("mean").dump();
      },
      py::arg("scores"), py::arg("labels"), py::arg("threshold") = kDecisionThreshold);
  m.def(
      "_cross_validate",
      [](const std::string& pipeline, const Dataset& d, std::size_t k, std::uint64_t seed,
         const std::optional<std::filesystem::path>& teacher, const std::optional<std::filesystem::path>& fixture) {
        const auto spec = pipeline_from_json(nlohmann::json::parse(pipeline));
        CvResources res;
        std::optional<TeacherTargets> targets;
        std::optional<FixtureClient> client;
        if (teacher) {
          targets = ingest_teacher_targets(*teacher, d);
          res.teacher = &*targets;
        }
        if (fixture) {
          client = FixtureClient::load(*fixture);
          res.translator = &*client;
        }
        py::gil_scoped_release release;
        return report_to_json(cross_validate(spec, d, k, seed, res)).dump();
      },
      py::arg("pipeline"), py::arg("dataset"), py::arg("k") = 10, py::arg("seed") = 0, py::arg("teacher") = py::none(),
      py::arg("fixture") = py::none());
  m.def(
      "_render_report",
      [](const std::vector<std::string>& reports, const std::string& format) {
        std::vector<MetricsReport> parsed;
        for (const auto& r : reports) parsed.push_back(report_from_json(nlohmann::json::parse(r)));
        return render_report(parsed, parse_report_format(format));
      },
      py::arg("reports"), py::arg("format") = "markdown");

  // Augmentation
  m.def(
      "_augment",
      [](const Dataset& d, const std::filesystem::path& fixture, const std::string& pivot) {
        auto client = FixtureClient::load(fixture);
        AugmentOptions opts;
        opts.pivot = pivot;
        auto result = augment_dataset(client, d, opts);
        const auto& rep = result.report;
        nlohmann::json j = {{"produced", rep.produced},       {"skipped_identical", rep.skipped_identical},
                            {"failed", rep.failed},           {"not_eligible", rep.not_eligible},
                            {"pivot_language", rep.pivot_language}, {"failures", rep.failures}};
        return std::make_pair(std::move(result.dataset), j.dump());
      },
      py::arg("dataset"), py::arg("fixture"), py::arg("pivot") = kDefaultPivot);
}
