"""From a point selection to a ranked, shareable explanation report.

The selection becomes a binary labeling (selected = 1), a bagged
additive model is trained on the quantile-binned features, and the
report ranks features by count-weighted mean absolute contribution.
Reports are plain JSON-able dicts so they can be content-addressed.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .canonical import content_id
from .data import Dataset
from .errors import (
    DegenerateSelectionError,
    RangeError,
    SelectionOverlapError,
    ValidationError,
)
from .model import (
    EbmModel,
    model_to_json_dict,
    pair_contribution,
    predict_score,
    term_importance,
)
from .training import TrainingConfig, train_bagged, training_metrics

# Below this total importance the model found nothing to separate on and
# shares would be numerical noise.
_NO_SIGNAL_TOTAL = 1e-9


@dataclass(frozen=True)
class ClusterSelection:
    """A set of row ids picked in the projection view."""

    point_ids: tuple[int, ...]
    label: str | None = None

    def __post_init__(self):
        ids = tuple(int(i) for i in self.point_ids)
        if len(set(ids)) != len(ids):
            raise ValidationError("selection contains duplicate point ids")
        object.__setattr__(self, "point_ids", tuple(sorted(ids)))

    def check_against(self, n_rows: int):
        for i in self.point_ids:
            if not 0 <= i < n_rows:
                raise RangeError(f"point id {i} outside [0, {n_rows})")

    @property
    def size(self) -> int:
        return len(self.point_ids)


def labels_from_selection(n_rows: int, selection: ClusterSelection) -> np.ndarray:
    """One-vs-rest labels: selected rows 1, everything else 0."""
    selection.check_against(n_rows)
    if selection.size == 0:
        raise DegenerateSelectionError("selection holds no points", kind="empty")
    if selection.size == n_rows:
        raise DegenerateSelectionError(
            "selection holds every point; nothing remains to contrast against",
            kind="full",
        )
    y = np.zeros(n_rows, dtype=np.float64)
    y[list(selection.point_ids)] = 1.0
    return y


@dataclass(frozen=True)
class ExplanationReport:
    mode: str
    # (name, importance, share) in rank order
    ranked: tuple[tuple[str, float, float], ...]
    shapes: dict
    meta: dict
    model: EbmModel = field(compare=False)
    direction_note: str | None = None

    def to_json_dict(self) -> dict:
        doc = {
            "mode": self.mode,
            "ranked": [
                {"name": n, "importance": imp, "share": share}
                for n, imp, share in self.ranked
            ],
            "shapes": self.shapes,
            "meta": dict(self.meta),
        }
        if self.direction_note is not None:
            doc["direction_note"] = self.direction_note
        return doc


def _ranked_with_shares(model: EbmModel, bin_counts) -> tuple[list, bool]:
    importances = term_importance(model, bin_counts)
    total = float(sum(v for _, v in importances))
    no_signal = total < _NO_SIGNAL_TOTAL
    order = sorted(
        range(len(importances)), key=lambda j: (-importances[j][1], j)
    )
    ranked = []
    for j in order:
        name, imp = importances[j]
        share = 0.0 if no_signal else imp / total
        ranked.append((name, float(imp), float(share)))
    return ranked, no_signal


def _shapes_dict(model: EbmModel) -> dict:
    return {
        model.feature_names[t.feature_index]: {
            "edges": [float(e) for e in t.bin_edges],
            "contributions": [float(c) for c in t.contributions],
        }
        for t in model.terms
    }


def _build_report(mode, model, binned, y, config, extra_meta, note=None):
    bin_counts = [
        np.bincount(binned.bin_matrix()[j], minlength=f.n_bins).astype(np.float64)
        for j, f in enumerate(binned.features)
    ]
    ranked, no_signal = _ranked_with_shares(model, bin_counts)
    metrics = training_metrics(model, binned, y)
    n_pos = int(y.sum())
    meta = {
        "seed": int(config.seed),
        "config": config.to_json_dict(),
        "logloss": metrics["logloss"],
        "auc": metrics["auc"],
        "n_pos": n_pos,
        "n_neg": int(y.size - n_pos),
        "no_separating_signal": bool(no_signal),
        # Lets a client fetch the full model behind this report.
        "model_id": content_id(model_to_json_dict(model)),
    }
    meta.update(extra_meta)
    return ExplanationReport(mode, tuple(ranked), _shapes_dict(model), meta, model, note)


def explain_selection(
    dataset: Dataset, selection: ClusterSelection, config: TrainingConfig
) -> ExplanationReport:
    """One-vs-rest explanation of a selection against the full dataset."""
    y = labels_from_selection(dataset.n_rows, selection)
    binned = dataset.binned(config.max_bins)
    model = train_bagged(binned, y, config)
    return _build_report("one-vs-rest", model, binned, y, config, {})


def compare_selections(
    dataset: Dataset,
    selection_a: ClusterSelection,
    selection_b: ClusterSelection,
    config: TrainingConfig,
) -> ExplanationReport:
    """A-vs-B explanation restricted to the union of the two selections.

    Binning is recomputed on the union subset so bin occupancy reflects
    the rows actually contrasted.
    """
    selection_a.check_against(dataset.n_rows)
    selection_b.check_against(dataset.n_rows)
    if selection_a.size == 0 or selection_b.size == 0:
        raise DegenerateSelectionError(
            "both selections need at least one point", kind="empty"
        )
    overlap = sorted(set(selection_a.point_ids) & set(selection_b.point_ids))
    if overlap:
        raise SelectionOverlapError(
            f"selections share {len(overlap)} point id(s)", ids=overlap
        )

    rows = np.array(sorted(selection_a.point_ids + selection_b.point_ids), dtype=np.int64)
    a_set = set(selection_a.point_ids)
    y = np.array([1.0 if int(r) in a_set else 0.0 for r in rows], dtype=np.float64)
    subset = dataset.take(rows)
    binned = subset.binned(config.max_bins)
    model = train_bagged(binned, y, config)
    label_a = selection_a.label or "A"
    label_b = selection_b.label or "B"
    note = (
        f"positive contributions push toward {label_a}, "
        f"negative toward {label_b}"
    )
    extra = {"selection_a_size": selection_a.size, "selection_b_size": selection_b.size}
    return _build_report("comparison", model, binned, y, config, extra, note)


def local_explanation(model: EbmModel, row) -> list[tuple[str, float]]:
    """Per-term contributions for one row, largest |value| first (ties by
    term position). Summing the values in model term order and adding the
    intercept reproduces predict_score bit-for-bit."""
    row = np.asarray(row, dtype=np.float64)
    entries = []
    for term in model.terms:
        entries.append(
            (model.feature_names[term.feature_index], float(term.value_at(row[term.feature_index])))
        )
    for pair in model.pairwise_terms:
        j, k = pair.feature_pair
        name = f"{model.feature_names[j]} x {model.feature_names[k]}"
        entries.append((name, pair_contribution(model, pair, row)))
    order = sorted(range(len(entries)), key=lambda i: (-abs(entries[i][1]), i))
    return [entries[i] for i in order]


def local_explanation_total(model: EbmModel, row) -> float:
    """Intercept plus contributions in model term order; equals
    predict_score(model, row) exactly (same fixed summation order)."""
    row = np.asarray(row, dtype=np.float64)
    total = model.intercept
    for term in model.terms:
        total += term.value_at(row[term.feature_index])
    for pair in model.pairwise_terms:
        total += pair_contribution(model, pair, row)
    return float(total)
