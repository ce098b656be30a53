"""Additive glass-box model: intercept + one piecewise-constant term per
feature, plus optional pairwise grids.

The score of a row is an exact sum in a fixed order (intercept, then
terms by feature index, then pair terms in lexicographic order), which
makes additivity bit-for-bit testable. All contributions are in
log-odds units.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .data import bin_index
from .errors import RangeError, ShapeError


def sigmoid(scores):
    """Numerically stable logistic link, elementwise."""
    s = np.asarray(scores, dtype=np.float64)
    scalar = s.ndim == 0
    s = np.atleast_1d(s)
    out = np.empty_like(s)
    pos = s >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-s[pos]))
    es = np.exp(s[~pos])
    out[~pos] = es / (1.0 + es)
    if scalar:
        return float(out[0])
    return out


@dataclass(frozen=True)
class TermFunction:
    """Per-feature shape function: one contribution per bin.

    ``contributions`` has ``len(bin_edges) + 2`` entries; the last is
    the reserved missing-value bin.
    """

    feature_index: int
    bin_edges: np.ndarray
    contributions: np.ndarray

    def __post_init__(self):
        edges = np.asarray(self.bin_edges, dtype=np.float64)
        contrib = np.asarray(self.contributions, dtype=np.float64)
        if contrib.size != edges.size + 2:
            raise ShapeError(
                f"term for feature {self.feature_index} has {contrib.size} bins, "
                f"expected {edges.size + 2}"
            )
        object.__setattr__(self, "bin_edges", edges)
        object.__setattr__(self, "contributions", contrib)

    @property
    def n_bins(self) -> int:
        return self.contributions.size

    def value_at(self, x) -> float:
        return float(self.contributions[bin_index(self.bin_edges, x)])


@dataclass(frozen=True)
class PairTermFunction:
    """Pairwise interaction term: a contribution grid over two features' bins."""

    feature_pair: tuple[int, int]
    grid: np.ndarray

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=np.float64)
        if grid.ndim != 2:
            raise ShapeError("pair grid must be 2-dimensional")
        object.__setattr__(self, "feature_pair", tuple(self.feature_pair))
        object.__setattr__(self, "grid", grid)


@dataclass(frozen=True)
class EbmModel:
    intercept: float
    terms: tuple[TermFunction, ...]
    feature_names: tuple[str, ...]
    pairwise_terms: tuple[PairTermFunction, ...] = ()
    config_echo: dict = field(default_factory=dict)
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))
        object.__setattr__(self, "feature_names", tuple(self.feature_names))
        object.__setattr__(self, "pairwise_terms", tuple(self.pairwise_terms))
        if len(self.terms) != len(self.feature_names):
            raise ShapeError(
                f"{len(self.terms)} terms for {len(self.feature_names)} features"
            )
        for pair in self.pairwise_terms:
            j, k = pair.feature_pair
            expected = (self.terms[j].n_bins, self.terms[k].n_bins)
            if pair.grid.shape != expected:
                raise ShapeError(
                    f"pair grid {pair.feature_pair} has shape {pair.grid.shape}, "
                    f"expected {expected}"
                )

    @property
    def n_features(self) -> int:
        return len(self.terms)

    def _check_row(self, row) -> np.ndarray:
        row = np.asarray(row, dtype=np.float64)
        if row.shape != (self.n_features,):
            raise ShapeError(f"row has shape {row.shape}, expected ({self.n_features},)")
        return row


def term_contribution(model: EbmModel, feature_index: int, x_value) -> float:
    """Evaluate one feature's shape function at a value (NaN = missing bin)."""
    if not 0 <= feature_index < model.n_features:
        raise RangeError(
            f"feature index {feature_index} out of range [0, {model.n_features})"
        )
    return model.terms[feature_index].value_at(x_value)


def pair_contribution(model: EbmModel, pair: PairTermFunction, row) -> float:
    j, k = pair.feature_pair
    bj = bin_index(model.terms[j].bin_edges, row[j])
    bk = bin_index(model.terms[k].bin_edges, row[k])
    return float(pair.grid[bj, bk])


def predict_score(model: EbmModel, row) -> float:
    """Additive log-odds score: intercept, then terms by feature index,
    then pair terms lexicographically. The summation order is fixed so
    the result is deterministic down to the bit."""
    row = model._check_row(row)
    score = model.intercept
    for j in range(model.n_features):
        score += model.terms[j].value_at(row[j])
    for pair in model.pairwise_terms:
        score += pair_contribution(model, pair, row)
    return score


def predict_scores(model: EbmModel, matrix) -> np.ndarray:
    """Vectorized predict_score over an (n, d) matrix.

    Adds per-row contributions in the same fixed order as
    :func:`predict_score`, so per-row results are bit-identical to the
    scalar path.
    """
    matrix = np.asarray(matrix, dtype=np.float64)
    if matrix.ndim != 2 or matrix.shape[1] != model.n_features:
        raise ShapeError(
            f"matrix has shape {matrix.shape}, expected (n, {model.n_features})"
        )
    scores = np.full(matrix.shape[0], model.intercept, dtype=np.float64)
    bins = {}
    for j in range(model.n_features):
        bins[j] = bin_index(model.terms[j].bin_edges, matrix[:, j])
        scores += model.terms[j].contributions[bins[j]]
    for pair in model.pairwise_terms:
        j, k = pair.feature_pair
        scores += pair.grid[bins[j], bins[k]]
    return scores


def predict_proba(model: EbmModel, row) -> float:
    """Probability of class 1 via the logistic link."""
    return sigmoid(predict_score(model, row))


def term_importance(model: EbmModel, train_bin_counts) -> list[tuple[str, float]]:
    """Count-weighted mean absolute contribution of each term.

    ``train_bin_counts`` is one count vector per feature, aligned with
    that feature's bins, from the training dataset.
    """
    if len(train_bin_counts) != model.n_features:
        raise ShapeError(
            f"{len(train_bin_counts)} count vectors for {model.n_features} terms"
        )
    out = []
    for j, term in enumerate(model.terms):
        counts = np.asarray(train_bin_counts[j], dtype=np.float64)
        if counts.size != term.n_bins:
            raise ShapeError(
                f"feature {j}: {counts.size} counts for {term.n_bins} bins"
            )
        n = counts.sum()
        importance = float(np.abs(term.contributions) @ counts / n) if n > 0 else 0.0
        out.append((model.feature_names[j], importance))
    return out


def finalize_centering(model: EbmModel, train_bin_counts) -> EbmModel:
    """Shift every term to count-weighted mean zero, folding the shifts
    into the intercept. Leaves every row's score unchanged and is
    idempotent."""
    if len(train_bin_counts) != model.n_features:
        raise ShapeError(
            f"{len(train_bin_counts)} count vectors for {model.n_features} terms"
        )
    intercept = model.intercept
    terms = []
    for j, term in enumerate(model.terms):
        counts = np.asarray(train_bin_counts[j], dtype=np.float64)
        if counts.size != term.n_bins:
            raise ShapeError(
                f"feature {j}: {counts.size} counts for {term.n_bins} bins"
            )
        n = counts.sum()
        weighted_sum = float(term.contributions @ counts) if n > 0 else 0.0
        if abs(weighted_sum) <= 1e-12 * n:
            # already satisfies the centering invariant; shifting again
            # would only churn last-ulp noise, so keep the term bitwise
            # stable (this is what makes the operation idempotent)
            terms.append(term)
            continue
        shift = weighted_sum / n
        terms.append(
            TermFunction(term.feature_index, term.bin_edges, term.contributions - shift)
        )
        intercept += shift
    # Pair grids are centered at fit time with their true joint cell
    # counts (not recoverable from per-feature marginals), so they pass
    # through unchanged here.
    return EbmModel(
        intercept, tuple(terms), model.feature_names, model.pairwise_terms,
        dict(model.config_echo), dict(model.meta),
    )


def model_to_json_dict(model: EbmModel) -> dict:
    doc = {
        "intercept": float(model.intercept),
        "terms": [
            {
                "feature": model.feature_names[j],
                "edges": [float(e) for e in term.bin_edges],
                "contributions": [float(c) for c in term.contributions],
            }
            for j, term in enumerate(model.terms)
        ],
        "pairs": [
            {
                "features": [
                    model.feature_names[pair.feature_pair[0]],
                    model.feature_names[pair.feature_pair[1]],
                ],
                "grid": [[float(v) for v in row] for row in pair.grid],
            }
            for pair in model.pairwise_terms
        ],
        "meta": dict(model.meta),
    }
    doc["meta"]["config"] = dict(model.config_echo)
    return doc


def model_from_json_dict(doc) -> EbmModel:
    names = tuple(spec["feature"] for spec in doc["terms"])
    terms = tuple(
        TermFunction(j, np.array(spec["edges"]), np.array(spec["contributions"]))
        for j, spec in enumerate(doc["terms"])
    )
    index = {name: j for j, name in enumerate(names)}
    pairs = tuple(
        PairTermFunction(
            (index[spec["features"][0]], index[spec["features"][1]]),
            np.array(spec["grid"]),
        )
        for spec in doc.get("pairs", [])
    )
    meta = dict(doc.get("meta", {}))
    config = meta.pop("config", {})
    return EbmModel(doc["intercept"], terms, names, pairs, config, meta)
