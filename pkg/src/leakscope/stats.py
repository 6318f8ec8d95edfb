"""Regression of parser performance on treebank size and leakage.

The model is ``score ~ alpha * size + beta * leakage + gamma``, fitted by
least squares.  Cross-validated explained variance and MAE are computed from
pooled held-out predictions; Spearman's rho relates leakage to score.

Fold assignment rule: entries are first put in a canonical order (sorted by
``treebank_id``, ties kept in input order), then a permutation drawn from
``numpy.random.default_rng(seed)`` shuffles that order, and the shuffled
sequence is cut into ``k`` near-equal contiguous folds (``numpy.array_split``).
Because folds are keyed to entry identity, reordering the manifest does not
change any cross-validated number.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

COLUMNS = ("size", "leakage", "intercept")


class RankDeficientError(ValueError):
    def __init__(self, columns: Sequence[str]):
        self.columns = tuple(columns)
        super().__init__("design matrix is rank deficient; collinear columns: " + ", ".join(self.columns))


class ConstantInputError(ValueError):
    pass


class ManifestError(ValueError):
    pass


@dataclass(frozen=True)
class ManifestEntry:
    treebank_id: str
    size_ts: float
    leakage_phi: float
    performance: float

    def __post_init__(self):
        if not 0.0 <= self.leakage_phi <= 1.0:
            raise ManifestError(f"{self.treebank_id}: leakage {self.leakage_phi} outside [0, 1]")
        if self.size_ts < 0:
            raise ManifestError(f"{self.treebank_id}: negative size {self.size_ts}")
        if not math.isfinite(self.performance):
            raise ManifestError(f"{self.treebank_id}: non-finite score")


@dataclass(frozen=True)
class RegressionResult:
    alpha: float
    beta: float
    gamma: float
    regression_score: float  # in-sample R^2
    explained_variance_cv: float
    mae_cv: float
    spearman_rho: float
    k: int
    seed: int
    n: int = 0
    dropped_columns: tuple[str, ...] = field(default=())
    standardized: bool = False

    def as_dict(self) -> dict:
        d = asdict(self)
        d["dropped_columns"] = list(self.dropped_columns)
        return d


def _design(entries: Sequence[ManifestEntry]) -> tuple[np.ndarray, np.ndarray]:
    X = np.array([[e.size_ts, e.leakage_phi, 1.0] for e in entries], dtype=np.float64)
    y = np.array([e.performance for e in entries], dtype=np.float64)
    return X, y


def _collinear_columns(X: np.ndarray) -> list[str]:
    cols = list(COLUMNS)
    for j in range(X.shape[1]):
        if not np.any(X[:, j]):
            return [cols[j]]
    for a in range(X.shape[1]):
        for b in range(a + 1, X.shape[1]):
            if np.linalg.matrix_rank(X[:, [a, b]]) < 2:
                return [cols[a], cols[b]]
    return cols


def _is_constant(v: np.ndarray) -> bool:
    return bool(np.all(v == v[0]))


def _fit(X: np.ndarray, y: np.ndarray, drop_constant_size: bool) -> tuple[np.ndarray, tuple[str, ...]]:
    """Least squares via SVD; returns coefficients for all three columns."""
    active = [0, 1, 2]
    dropped: tuple[str, ...] = ()
    if drop_constant_size and _is_constant(X[:, 0]):
        active = [1, 2]
        dropped = ("size",)
    Xa = X[:, active]
    if X.shape[0] < len(active) or np.linalg.matrix_rank(Xa) < len(active):
        raise RankDeficientError(_collinear_columns(X) if not dropped else ["leakage", "intercept"])
    coef, *_ = np.linalg.lstsq(Xa, y, rcond=None)
    full = np.zeros(3)
    full[active] = coef
    return full, dropped


def _standardize(X: np.ndarray) -> np.ndarray:
    Z = X.copy()
    for j in (0, 1):
        sd = Z[:, j].std()
        if sd > 0:
            Z[:, j] = (Z[:, j] - Z[:, j].mean()) / sd
    return Z


def ols_fit(
    entries: Sequence[ManifestEntry],
    drop_constant_size: bool = False,
    standardize: bool = False,
) -> tuple[float, float, float]:
    """Return ``(alpha, beta, gamma)`` minimizing the squared residuals.

    Raises :class:`RankDeficientError` naming the collinear columns.  With
    ``drop_constant_size`` a constant size column is removed from the model
    (``alpha`` reported as 0) instead of raising.
    """
    if len(entries) < 3:
        raise ValueError("ols_fit needs at least 3 entries")
    X, y = _design(entries)
    if standardize:
        X = _standardize(X)
    coef, _ = _fit(X, y, drop_constant_size)
    return float(coef[0]), float(coef[1]), float(coef[2])


def _canonical_order(entries: Sequence[ManifestEntry]) -> list[int]:
    return sorted(range(len(entries)), key=lambda i: (entries[i].treebank_id, i))


def _fold_positions(n: int, k: int, seed: int) -> list[np.ndarray]:
    # positions in canonical order
    if k < 2 or k > n:
        raise ValueError(f"k must satisfy 2 <= k <= n (k={k}, n={n})")
    return np.array_split(np.random.default_rng(seed).permutation(n), k)


def fold_assignment(entries: Sequence[ManifestEntry], k: int, seed: int) -> list[np.ndarray]:
    """Indices (into ``entries``) of each fold; see the module docstring."""
    canonical = np.array(_canonical_order(entries), dtype=int)
    return [canonical[f] for f in _fold_positions(len(entries), k, seed)]


def _cv_predictions(entries, k, seed, drop_constant_size=False, standardize=False):
    # every array below is in canonical order, which keeps results bit-stable
    # under reordering of the manifest
    canonical = _canonical_order(entries)
    X, y = _design([entries[i] for i in canonical])
    if standardize:
        X = _standardize(X)
    pred = np.empty_like(y)
    for held in _fold_positions(len(entries), k, seed):
        mask = np.ones(len(entries), dtype=bool)
        mask[held] = False
        coef, _ = _fit(X[mask], y[mask], drop_constant_size)
        pred[held] = X[held] @ coef
    return y, pred


def explained_variance(y: np.ndarray, pred: np.ndarray) -> float:
    var_y = float(np.var(y))
    if var_y == 0:
        raise ConstantInputError("explained variance undefined: constant targets")
    return 1.0 - float(np.var(y - pred)) / var_y


def kfold_cv(
    entries: Sequence[ManifestEntry],
    k: int = 5,
    seed: int = 0,
    drop_constant_size: bool = False,
    standardize: bool = False,
) -> tuple[float, float]:
    """Return ``(explained_variance_cv, mae_cv)`` from pooled held-out predictions."""
    y, pred = _cv_predictions(entries, k, seed, drop_constant_size, standardize)
    return explained_variance(y, pred), float(np.mean(np.abs(y - pred)))


def average_ranks(xs: Sequence[float]) -> list[float]:
    """1-based ranks; tied values share the mean of their positions."""
    order = sorted(range(len(xs)), key=lambda i: xs[i])
    ranks = [0.0] * len(xs)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and xs[order[j + 1]] == xs[order[i]]:
            j += 1
        r = (i + j) / 2 + 1
        for m in range(i, j + 1):
            ranks[order[m]] = r
        i = j + 1
    return ranks


def spearman(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Spearman's rho as the Pearson correlation of average ranks.

    Ranks are multiples of 1/2, so the sums are done on doubled ranks in exact
    integer arithmetic and only the final ratio is rounded.
    """
    if len(xs) != len(ys):
        raise ValueError("inputs differ in length")
    n = len(xs)
    if n < 2:
        raise ValueError("spearman needs at least 2 points")
    rx = [int(2 * r) for r in average_ranks(xs)]
    ry = [int(2 * r) for r in average_ranks(ys)]
    sx, sy = sum(rx), sum(ry)
    cov = n * sum(a * b for a, b in zip(rx, ry)) - sx * sy
    vx = n * sum(a * a for a in rx) - sx * sx
    vy = n * sum(b * b for b in ry) - sy * sy
    if vx == 0 or vy == 0:
        raise ConstantInputError("spearman undefined: constant input")
    if vx == vy:
        return cov / vx
    prod = vx * vy
    root = math.isqrt(prod)
    if root * root == prod:
        return cov / root
    return max(-1.0, min(1.0, cov / math.sqrt(prod)))


def r_squared(y: np.ndarray, pred: np.ndarray) -> float:
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    if ss_tot == 0:
        raise ConstantInputError("R^2 undefined: constant targets")
    return 1.0 - float(np.sum((y - pred) ** 2)) / ss_tot


def analyze(
    manifest: Sequence[ManifestEntry],
    k: int = 5,
    seed: int = 0,
    standardize: bool = False,
) -> RegressionResult:
    """Full fit, k-fold CV and Spearman's rho between leakage and score.

    A constant size column (e.g. every treebank unseen, size 0) is dropped
    from the model rather than treated as an error.
    """
    X, y = _design(manifest)
    if standardize:
        X = _standardize(X)
    coef, dropped = _fit(X, y, drop_constant_size=True)
    r2 = r_squared(y, X @ coef)
    ev, mae = kfold_cv(manifest, k, seed, drop_constant_size=True, standardize=standardize)
    rho = spearman([e.leakage_phi for e in manifest], [e.performance for e in manifest])
    return RegressionResult(
        float(coef[0]), float(coef[1]), float(coef[2]), r2, ev, mae, rho,
        k, seed, len(manifest), dropped, standardize,
    )


# -- manifest files ---------------------------------------------------------

def _leakage_columns(header: Sequence[str]) -> list[str]:
    return [h for h in header if h == "leakage" or h.startswith("leakage_")]


def _entries_from_rows(rows: list[dict], where: str) -> dict[str, list[ManifestEntry]]:
    if not rows:
        raise ManifestError(f"{where}: manifest has no rows")
    header = list(rows[0].keys())
    for col in ("treebank_id", "size", "score"):
        if col not in header:
            raise ManifestError(f"{where}: missing column {col!r}")
    leak_cols = _leakage_columns(header)
    if not leak_cols:
        raise ManifestError(f"{where}: no leakage column (expected 'leakage' or 'leakage_<name>')")
    out: dict[str, list[ManifestEntry]] = {c: [] for c in leak_cols}
    for n, row in enumerate(rows, 1):
        try:
            size = float(row["size"])
            score = float(row["score"])
            for c in leak_cols:
                out[c].append(ManifestEntry(str(row["treebank_id"]), size, float(row[c]), score))
        except (TypeError, ValueError, KeyError) as e:
            raise ManifestError(f"{where}: row {n}: {e}") from None
    return out


def parse_manifest(text: str, where: str = "<manifest>") -> dict[str, list[ManifestEntry]]:
    """Parse a TSV or JSON manifest into one entry list per leakage column."""
    stripped = text.lstrip()
    if stripped.startswith("["):
        try:
            rows = json.loads(text)
        except json.JSONDecodeError as e:
            raise ManifestError(f"{where}: {e}") from None
        if not all(isinstance(r, dict) for r in rows):
            raise ManifestError(f"{where}: JSON manifest must be an array of objects")
        return _entries_from_rows(rows, where)
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    reader = csv.DictReader(io.StringIO("\n".join(lines)), delimiter="\t")
    rows = []
    for row in reader:
        if None in row or any(v is None for v in row.values()):
            raise ManifestError(f"{where}: row {reader.line_num - 1} has the wrong number of fields")
        rows.append(row)
    return _entries_from_rows(rows, where)


def read_manifest(path: str | Path) -> dict[str, list[ManifestEntry]]:
    path = Path(path)
    return parse_manifest(path.read_text(encoding="utf-8"), str(path))
