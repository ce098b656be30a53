"""Cyclic, bagged gradient-boosted training of the additive model.

The learner is a piecewise-constant-per-bin gradient step for logistic
loss: visiting feature j, every bin moves by eta times the mean residual
(y - p) of the rows it holds. Residuals are recomputed at every feature
visit (true cyclic boosting), the visiting order is column index, and
bins holding fewer than ``min_child_weight`` rows never move.

Outer bagging trains one model per resampled bag and averages aligned
per-bin contributions; bag b draws its RNG sub-seed as splitmix64(seed + b)
so bags are reproducible across implementations.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from itertools import combinations

import numpy as np

from . import kernels
from .data import Dataset
from .errors import DegenerateLabelsError, ShapeError, ValidationError
from .model import EbmModel, PairTermFunction, TermFunction, finalize_centering

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class TrainingConfig:
    learning_rate: float = 0.05
    sweeps: int = 200
    max_bins: int = 32
    outer_bags: int = 4
    bag_fraction: float = 1.0
    seed: int = 0
    enable_pairs: bool = False
    max_pairs: int = 4
    min_child_weight: float = 1.0
    # Test hook: every bag is [0..n-1] instead of a resample.
    identity_bags: bool = False

    def __post_init__(self):
        if not self.learning_rate > 0:
            raise ValidationError("learning_rate must be > 0")
        if self.sweeps < 1:
            raise ValidationError("sweeps must be >= 1")
        if self.max_bins < 2:
            raise ValidationError("max_bins must be >= 2")
        if self.outer_bags < 1:
            raise ValidationError("outer_bags must be >= 1")
        if not 0 < self.bag_fraction <= 1:
            raise ValidationError("bag_fraction must be in (0, 1]")

    def to_json_dict(self) -> dict:
        doc = asdict(self)
        doc["seed"] = int(self.seed)
        return doc

    @classmethod
    def from_json_dict(cls, doc) -> "TrainingConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(doc) - known
        if unknown:
            raise ValidationError(f"unknown training config fields: {sorted(unknown)}")
        return cls(**doc)


def check_labels(y, n_rows: int | None = None) -> np.ndarray:
    """Validate a {0,1} label vector; returns it as float64."""
    y = np.asarray(y)
    if y.ndim != 1:
        raise ShapeError("labels must be one-dimensional")
    if n_rows is not None and y.size != n_rows:
        raise ShapeError(f"{y.size} labels for {n_rows} rows")
    values = np.unique(y)
    if not np.all(np.isin(values, (0, 1))):
        raise ValidationError("labels must be 0 or 1")
    return y.astype(np.float64)


def splitmix64(x: int) -> int:
    """One output step of the splitmix64 mixer (64-bit wraparound)."""
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (x ^ (x >> 31)) & _MASK64


def init_intercept(y) -> float:
    """Base-rate log-odds ln(p/(1-p)), computed as ln(n_pos) - ln(n_neg)
    so that flipping the labels negates it exactly."""
    y = check_labels(y)
    n_pos = int(y.sum())
    n_neg = y.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise DegenerateLabelsError("labels contain a single class; nothing to separate")
    return float(np.log(n_pos) - np.log(n_neg))


def boost_feature_once(bin_assignments, residuals, eta, min_child_weight, n_bins=None):
    """One gradient step for one feature: eta * mean residual per bin.

    Bins holding fewer than ``min_child_weight`` rows get update 0.
    """
    bin_assignments = np.asarray(bin_assignments, dtype=np.int64)
    residuals = np.asarray(residuals, dtype=np.float64)
    if bin_assignments.shape != residuals.shape:
        raise ShapeError(
            f"{bin_assignments.size} bin assignments for {residuals.size} residuals"
        )
    if n_bins is None:
        n_bins = int(bin_assignments.max()) + 1 if bin_assignments.size else 0
    counts = np.bincount(bin_assignments, minlength=n_bins).astype(np.float64)
    sums = np.bincount(bin_assignments, weights=residuals, minlength=n_bins)
    movable = (counts >= min_child_weight) & (counts > 0)
    return np.where(movable, eta * sums / np.maximum(counts, 1.0), 0.0)


def _bin_layout(dataset: Dataset):
    """Flat bin layout plus the per-feature active mask for the kernels.

    A feature is active only when its rows occupy at least two distinct
    bins (the missing bin counts). With a single occupied bin there is
    no shape to learn — only intercept drift — so boosting skips the
    feature and its term stays identically zero. This covers all-missing
    columns and constant columns in one rule.
    """
    n_bins = np.array([f.n_bins for f in dataset.features], dtype=np.int64)
    offsets = np.concatenate(([0], np.cumsum(n_bins)[:-1])).astype(np.int64)
    bin_mat = dataset.bin_matrix()
    active = np.array(
        [np.unique(bin_mat[j]).size >= 2 for j in range(dataset.n_features)],
        dtype=np.bool_,
    )
    return n_bins, offsets, active


def _require_binned(dataset: Dataset):
    if not dataset.is_binned():
        raise ValidationError(
            "dataset has no bin edges; call Dataset.binned(max_bins) before training"
        )


def _bin_counts(bin_mat, n_bins) -> list[np.ndarray]:
    return [
        np.bincount(bin_mat[j], minlength=n_bins[j]).astype(np.float64)
        for j in range(len(n_bins))
    ]


def _terms_from_flat(dataset, contrib, n_bins, offsets):
    terms = []
    for j, f in enumerate(dataset.features):
        off = offsets[j]
        terms.append(TermFunction(j, f.bin_edges, contrib[off : off + n_bins[j]]))
    return tuple(terms)


def _run_cycle(bin_mat, y, n_bins, offsets, active, config):
    intercept = init_intercept(y)
    contrib, scores = kernels.boost_cycle(
        np.ascontiguousarray(bin_mat),
        y.astype(np.float64),
        n_bins,
        offsets,
        active,
        float(config.learning_rate),
        float(config.min_child_weight),
        int(config.sweeps),
        intercept,
    )
    return intercept, contrib, scores


def cyclic_boost(dataset: Dataset, y, config: TrainingConfig) -> EbmModel:
    """Train on all rows of a binned dataset; deterministic given
    (dataset, y, config)."""
    _require_binned(dataset)
    y = check_labels(y, dataset.n_rows)
    n_bins, offsets, active = _bin_layout(dataset)
    bin_mat = dataset.bin_matrix()
    intercept, contrib, _ = _run_cycle(bin_mat, y, n_bins, offsets, active, config)
    model = EbmModel(
        intercept,
        _terms_from_flat(dataset, contrib, n_bins, offsets),
        tuple(dataset.feature_names),
        (),
        config.to_json_dict(),
        {"seed": int(config.seed), "n_rows": int(dataset.n_rows)},
    )
    return finalize_centering(model, _bin_counts(bin_mat, n_bins))


def make_bags(n: int, k: int, fraction: float, seed: int, identity: bool = False):
    """k row-index bags, sampled with replacement, round(fraction * n)
    rows each. Bag b is drawn from a fresh RNG seeded with
    splitmix64(seed + b). ``identity=True`` is the test hook: every bag
    is [0..n-1]."""
    if n < 1 or k < 1:
        raise ValidationError("make_bags needs n >= 1 and k >= 1")
    if identity:
        return [np.arange(n, dtype=np.int64) for _ in range(k)]
    size = max(1, round(fraction * n))
    bags = []
    for b in range(k):
        rng = np.random.default_rng(splitmix64((seed + b) & _MASK64))
        bags.append(rng.integers(0, n, size=size, dtype=np.int64))
    return bags


def _repair_bag(bag, y):
    """Resampling can draw a single-class bag; swap its last slot for the
    lowest row index of the absent class so training stays well-posed.
    The swap depends on y only through class membership, so flipping the
    labels picks the same row."""
    present = np.unique(y[bag])
    if present.size == 2:
        return bag
    if bag.size < 2:
        raise DegenerateLabelsError("bag of size 1 cannot hold both classes")
    missing_class = 1.0 - present[0]
    replacement = int(np.nonzero(y == missing_class)[0][0])
    repaired = bag.copy()
    repaired[-1] = replacement
    return repaired


def train_bagged(dataset: Dataset, y, config: TrainingConfig) -> EbmModel:
    """Average ``outer_bags`` cyclic-boost runs, then recenter on the
    full-data bin counts."""
    _require_binned(dataset)
    y = check_labels(y, dataset.n_rows)
    if np.unique(y).size < 2:
        raise DegenerateLabelsError("labels contain a single class; nothing to separate")
    n_bins, offsets, active = _bin_layout(dataset)
    bin_mat = dataset.bin_matrix()

    bags = make_bags(
        dataset.n_rows, config.outer_bags, config.bag_fraction, config.seed,
        identity=config.identity_bags,
    )
    intercepts = []
    contribs = []
    for bag in bags:
        bag = _repair_bag(bag, y)
        intercept_b, contrib_b, _ = _run_cycle(
            bin_mat[:, bag], y[bag], n_bins, offsets, active, config
        )
        intercepts.append(intercept_b)
        contribs.append(contrib_b)

    # Mean over bags as baseline + mean deviation: identical bags (the
    # identity-sampling mode) then average to the single-bag result
    # bit-for-bit. Per-bag centering is skipped because the final
    # full-count centering below absorbs any per-term constant.
    deviation = np.zeros_like(contribs[0])
    intercept_dev = 0.0
    for b in range(1, len(contribs)):
        deviation += contribs[b] - contribs[0]
        intercept_dev += intercepts[b] - intercepts[0]
    mean_contrib = contribs[0] + deviation / len(contribs)
    mean_intercept = float(intercepts[0] + intercept_dev / len(intercepts))
    model = EbmModel(
        mean_intercept,
        _terms_from_flat(dataset, mean_contrib, n_bins, offsets),
        tuple(dataset.feature_names),
        (),
        config.to_json_dict(),
        {"seed": int(config.seed), "n_rows": int(dataset.n_rows)},
    )
    model = finalize_centering(model, _bin_counts(bin_mat, n_bins))
    if config.enable_pairs and dataset.n_features >= 2 and config.max_pairs > 0:
        pairs = detect_top_interactions(dataset, y, model, config.max_pairs, config)
        model = _fit_pair_terms(dataset, y, model, pairs, config)
    return model


def _scores_from_bins(model: EbmModel, bin_mat) -> np.ndarray:
    """Training-row scores via bin lookups (same order as predict_score)."""
    scores = np.full(bin_mat.shape[1], model.intercept, dtype=np.float64)
    for j, term in enumerate(model.terms):
        scores += term.contributions[bin_mat[j]]
    for pair in model.pairwise_terms:
        j, k = pair.feature_pair
        scores += pair.grid[bin_mat[j], bin_mat[k]]
    return scores


def _sigmoid_vec(scores):
    out = np.empty_like(scores)
    pos = scores >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-scores[pos]))
    es = np.exp(scores[~pos])
    out[~pos] = es / (1.0 + es)
    return out


def log_loss(y, p) -> float:
    p = np.clip(np.asarray(p, dtype=np.float64), 1e-15, 1.0 - 1e-15)
    y = np.asarray(y, dtype=np.float64)
    return float(-np.mean(y * np.log(p) + (1.0 - y) * np.log1p(-p)))


def roc_auc(y, scores) -> float:
    """Rank-based AUC (Mann-Whitney), ties get average ranks."""
    y = np.asarray(y, dtype=np.float64)
    scores = np.asarray(scores, dtype=np.float64)
    n_pos = int(y.sum())
    n_neg = y.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise DegenerateLabelsError("AUC needs both classes")
    order = np.argsort(scores, kind="stable")
    ranks = np.empty(y.size, dtype=np.float64)
    sorted_scores = scores[order]
    i = 0
    while i < y.size:
        j = i
        while j + 1 < y.size and sorted_scores[j + 1] == sorted_scores[i]:
            j += 1
        ranks[order[i : j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    pos_rank_sum = float(ranks[y == 1.0].sum())
    return (pos_rank_sum - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg)


def training_metrics(model: EbmModel, dataset: Dataset, y) -> dict:
    bin_mat = dataset.bin_matrix()
    scores = _scores_from_bins(model, bin_mat)
    p = _sigmoid_vec(scores)
    return {"logloss": log_loss(y, p), "auc": roc_auc(y, scores)}


def _pair_cells(bin_mat, j, k, nb_k):
    return bin_mat[j] * nb_k + bin_mat[k]


def _residual_grid(cells, residuals, nb_j, nb_k, min_child_weight):
    counts = np.bincount(cells, minlength=nb_j * nb_k).astype(np.float64)
    sums = np.bincount(cells, weights=residuals, minlength=nb_j * nb_k)
    movable = (counts >= min_child_weight) & (counts > 0)
    grid = np.where(movable, sums / np.maximum(counts, 1.0), 0.0)
    return grid.reshape(nb_j, nb_k), counts.reshape(nb_j, nb_k)


def detect_top_interactions(
    dataset: Dataset, y, main_model: EbmModel, max_pairs: int,
    config: TrainingConfig | None = None,
) -> list[tuple[int, int]]:
    """FAST-style screening: score every feature pair by how much a
    one-shot grid of mean residuals (residuals taken from the main
    model) reduces training log-loss; return the best ``max_pairs``
    pairs, ties broken by lexicographic pair order."""
    if dataset.n_features < 2 or max_pairs <= 0:
        return []
    min_child_weight = config.min_child_weight if config else 1.0
    y = check_labels(y, dataset.n_rows)
    n_bins, _, _ = _bin_layout(dataset)
    bin_mat = dataset.bin_matrix()
    scores = _scores_from_bins(main_model, bin_mat)
    p = _sigmoid_vec(scores)
    residuals = y - p
    base_loss = log_loss(y, p)
    scored = []
    for j, k in combinations(range(dataset.n_features), 2):
        grid, _ = _residual_grid(
            _pair_cells(bin_mat, j, k, n_bins[k]), residuals,
            n_bins[j], n_bins[k], min_child_weight,
        )
        adjusted = scores + grid[bin_mat[j], bin_mat[k]]
        reduction = base_loss - log_loss(y, _sigmoid_vec(adjusted))
        scored.append((-reduction, (j, k)))
    scored.sort()
    return [pair for _, pair in scored[:max_pairs]]


def _fit_pair_terms(dataset, y, model, pairs, config) -> EbmModel:
    """Fit centered mean-residual grids for the selected pairs, one at a
    time in ranking order, folding each grid's weighted mean into the
    intercept."""
    if not pairs:
        return model
    n_bins, _, _ = _bin_layout(dataset)
    bin_mat = dataset.bin_matrix()
    scores = _scores_from_bins(model, bin_mat)
    intercept = model.intercept
    fitted = list(model.pairwise_terms)
    for j, k in pairs:
        residuals = y - _sigmoid_vec(scores)
        grid, counts = _residual_grid(
            _pair_cells(bin_mat, j, k, n_bins[k]), residuals,
            n_bins[j], n_bins[k], config.min_child_weight,
        )
        shift = float((grid * counts).sum() / counts.sum())
        grid = grid - shift
        intercept += shift
        fitted.append(PairTermFunction((j, k), grid))
        scores += grid[bin_mat[j], bin_mat[k]] + shift
    return EbmModel(
        intercept, model.terms, model.feature_names, tuple(fitted),
        dict(model.config_echo), dict(model.meta),
    )
