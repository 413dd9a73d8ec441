"""Fact-checking classifiers with Shapley explanations."""

import json

from ._factshap import (
    ClaimRecord,
    Dataset,
    DivergenceError,
    ForestModel,
    LogisticModel,
    ParseError,
    TooManyPlayersError,
    TransportError,
    TreeModel,
    ValidationError,
    Vectorizer,
    __version__,
    distill_loss,
    load_dataset,
    load_model,
    model_to_json,
    planted_corpus,
    predict_log_odds,
    predict_proba,
    roc_auc,
    save_model,
    stem_token,
    stratified_kfold,
    tokenize,
    train_distilled,
    train_forest,
    train_logistic,
    train_tree,
)
from . import _factshap


def explain(model, x, background, method="auto", permutations=200, seed=0, words=None):
    """Shapley attribution of one dense row, in log-odds, as a dict.

    ``phi`` is dense; ``contributions`` lists the non-zero entries with their words.
    """
    out = json.loads(
        _factshap._explain(model, list(x), [list(r) for r in background], method, permutations, seed, words or [])
    )
    out["contributions"] = out["phi"]
    phi = [0.0] * out["dimension"]
    for c in out["contributions"]:
        phi[c["feature"]] = c["value"]
    out["phi"] = phi
    return out


def classification_metrics(scores, labels, threshold=0.5):
    return json.loads(_factshap._classification_metrics(list(scores), list(labels), threshold))


def cross_validate(pipeline, dataset, k=10, seed=0, teacher=None, fixture=None):
    """Stratified k-fold evaluation of a pipeline dict; returns the report dict."""
    text = _factshap._cross_validate(json.dumps(pipeline or {}), dataset, k, seed, teacher, fixture)
    return json.loads(text)


def render_report(reports, format="markdown"):
    return _factshap._render_report([json.dumps(r) for r in reports], format)


def augment(dataset, fixture, pivot="de"):
    """Back-translate every original record using a recorded fixture table."""
    augmented, report = _factshap._augment(dataset, fixture, pivot)
    return augmented, json.loads(report)
