"""Rank-correlation statistics with tie handling and permutation p-values.

Spearman rho is the Pearson correlation of average ranks. Kendall tau-c is
the Stuart form 2*m*(C - D) / (n^2 * (m - 1)) with C/D the concordant and
discordant pair counts and m the smaller number of distinct values on either
side. Both p-values come from two-sided permutation tests (exact enumeration
for n <= 8, seeded Monte Carlo otherwise) counting permutations with
|statistic| >= |observed|.

Permutation sampling is single-threaded and fully determined by the seed;
parallelizing it would only reorder the sampled permutations, never the
counts, so results are a function of (input, seed, permutations) alone.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np
from scipy import stats as _sps

from .exceptions import DegenerateInputError, IncompleteGridError

DEFAULT_PERMUTATIONS = 10_000
_EXACT_MAX_N = 8
_DENSE_PAIRS_MAX_N = 4096  # O(n^2) sign-matrix concordance counting
_BATCH_PAIRS_MAX_N = 128   # batched O(n^2) across permutations


@dataclass(frozen=True)
class ScoreVector:
    """Finite score values, optionally labelled by item id."""

    values: list[float]
    labels: list[str] | None = None

    def __post_init__(self):
        if self.labels is not None and len(self.labels) != len(self.values):
            raise ValueError("labels and values must have equal length")
        if not np.isfinite(self.values).all():
            raise ValueError("scores must be finite")

    def __len__(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class CorrelationReport:
    rho: float
    rho_p: float
    tau_c: float
    tau_p: float
    n: int

    def __post_init__(self):
        if not (-1.0 <= self.rho <= 1.0 and -1.0 <= self.tau_c <= 1.0):
            raise ValueError("correlation outside [-1, 1]")
        if not (0.0 <= self.rho_p <= 1.0 and 0.0 <= self.tau_p <= 1.0):
            raise ValueError("p-value outside [0, 1]")
        if self.n < 2:
            raise ValueError("sample size must be at least 2")


def _as_array(scores) -> np.ndarray:
    values = scores.values if isinstance(scores, ScoreVector) else scores
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 1:
        raise ValueError("scores must be one-dimensional")
    if not np.isfinite(arr).all():
        raise ValueError("scores must be finite")
    return arr


def _validate_pair(x, y, permutations: int) -> tuple[np.ndarray, np.ndarray]:
    ax, ay = _as_array(x), _as_array(y)
    if ax.size != ay.size:
        raise ValueError(f"length mismatch: {ax.size} vs {ay.size}")
    if ax.size < 2:
        raise ValueError("correlation needs at least 2 samples")
    if permutations < 1:
        raise ValueError("permutations must be at least 1")
    return ax, ay


@lru_cache(maxsize=4)
def _index_permutations(n: int) -> np.ndarray:
    """All n! index permutations, cached for the exact-enumeration path."""
    return np.array(list(itertools.permutations(range(n))), dtype=np.intp)


def _rho_from_rank_dots(n: int, sxy, sx, sy, den) -> np.ndarray:
    # all terms are exact sums of half-integer ranks, so this is
    # bit-identical however sxy was accumulated
    return (n * sxy - sx * sy) / den


def spearman(x, y, *, permutations: int = DEFAULT_PERMUTATIONS, seed: int = 0) -> tuple[float, float]:
    """Spearman rho with a two-sided permutation p-value."""
    ax, ay = _validate_pair(x, y, permutations)
    if np.all(ax == ax[0]) or np.all(ay == ay[0]):
        raise DegenerateInputError("spearman is undefined for a constant input")

    rx = _sps.rankdata(ax, method="average")
    ry = _sps.rankdata(ay, method="average")
    n = rx.size
    sx, sy = rx.sum(), ry.sum()
    den = math.sqrt(
        (n * (rx * rx).sum() - sx * sx) * (n * (ry * ry).sum() - sy * sy)
    )
    rho = float(_rho_from_rank_dots(n, rx @ ry, sx, sy, den))

    def batch_rho(permuted_ry: np.ndarray) -> np.ndarray:
        return _rho_from_rank_dots(n, permuted_ry @ rx, sx, sy, den)

    if n <= _EXACT_MAX_N:
        all_perms = ry[_index_permutations(n)]
        hits = int(np.count_nonzero(np.abs(batch_rho(all_perms)) >= abs(rho)))
        p = hits / math.factorial(n)
    else:
        rng = np.random.default_rng(seed)
        hits = 0
        remaining = permutations
        chunk = max(1, min(permutations, 2_000_000 // max(n, 1)))
        while remaining > 0:
            size = min(chunk, remaining)
            permuted = rng.permuted(np.tile(ry, (size, 1)), axis=1)
            hits += int(np.count_nonzero(np.abs(batch_rho(permuted)) >= abs(rho)))
            remaining -= size
        p = hits / permutations
    return rho, p


def _tie_pair_count(values: np.ndarray) -> int:
    _, counts = np.unique(values, return_counts=True)
    return int((counts * (counts - 1) // 2).sum())


def _concordance_s(x: np.ndarray, y: np.ndarray) -> int:
    """Exact C - D over all pairs."""
    n = x.size
    if n <= _DENSE_PAIRS_MAX_N:
        dx = np.sign(x[:, None] - x[None, :]).astype(np.int8)
        dy = np.sign(y[:, None] - y[None, :]).astype(np.int8)
        return int((dx * dy).sum(dtype=np.int64)) // 2
    # recover the integer C - D from scipy's O(n log n) tau-b; the rounding
    # is exact because |C - D| <= n^2 is far below float64 precision
    tau_b = float(_sps.kendalltau(x, y).statistic)
    n0 = n * (n - 1) // 2
    den = math.sqrt((n0 - _tie_pair_count(x)) * (n0 - _tie_pair_count(y)))
    s = round(tau_b * den)
    if abs(tau_b * den - s) > 0.1:
        raise ArithmeticError("concordance recovery drifted; input too large")
    return s


def _concordance_s_batch(x: np.ndarray, ys: np.ndarray) -> np.ndarray:
    dx = np.sign(x[:, None] - x[None, :]).astype(np.int8)
    dy = np.sign(ys[:, :, None] - ys[:, None, :]).astype(np.int8)
    return (dx[None, :, :] * dy).sum(axis=(1, 2), dtype=np.int64) // 2


def kendall_tau_c(x, y, *, permutations: int = DEFAULT_PERMUTATIONS, seed: int = 0) -> tuple[float, float]:
    """Stuart's tau-c with a two-sided permutation p-value."""
    ax, ay = _validate_pair(x, y, permutations)
    n = ax.size
    m = min(np.unique(ax).size, np.unique(ay).size)
    if m < 2:
        raise DegenerateInputError("tau-c is undefined when one side is constant")

    s_obs = _concordance_s(ax, ay)
    denom = n * n * (m - 1)
    tau = (2 * m * s_obs) / denom

    # |tau| comparisons reduce to integer |S| comparisons: m and n are
    # invariant under permutation of one side
    abs_s = abs(s_obs)
    if n <= _EXACT_MAX_N:
        all_perms = ay[_index_permutations(n)]
        hits = 0
        chunk = max(1, 2 ** 24 // (n * n))
        for start in range(0, all_perms.shape[0], chunk):
            s_perm = _concordance_s_batch(ax, all_perms[start : start + chunk])
            hits += int(np.count_nonzero(np.abs(s_perm) >= abs_s))
        p = hits / math.factorial(n)
    else:
        rng = np.random.default_rng(seed)
        hits = 0
        if n <= _BATCH_PAIRS_MAX_N:
            remaining = permutations
            chunk = max(1, 2 ** 24 // (n * n))
            while remaining > 0:
                size = min(chunk, remaining)
                permuted = rng.permuted(np.tile(ay, (size, 1)), axis=1)
                s_perm = _concordance_s_batch(ax, permuted)
                hits += int(np.count_nonzero(np.abs(s_perm) >= abs_s))
                remaining -= size
        else:
            for _ in range(permutations):
                s_perm = _concordance_s(ax, rng.permutation(ay))
                if abs(s_perm) >= abs_s:
                    hits += 1
        p = hits / permutations
    return float(tau), p


def correlation_report(x, y, *, permutations: int = DEFAULT_PERMUTATIONS, seed: int = 0) -> CorrelationReport:
    """Both statistics for one pair of score vectors."""
    ax, ay = _validate_pair(x, y, permutations)
    rho, rho_p = spearman(ax, ay, permutations=permutations, seed=seed)
    tau_c, tau_p = kendall_tau_c(ax, ay, permutations=permutations, seed=seed)
    return CorrelationReport(rho=rho, rho_p=rho_p, tau_c=tau_c, tau_p=tau_p, n=int(ax.size))


def system_level(cells: Iterable[tuple[str, str, float]]) -> ScoreVector:
    """Average a (system, item, value) table into one mean per system.

    Every (system, item) cell must be present exactly once; systems are
    returned in sorted id order.
    """
    seen: dict[tuple[str, str], float] = {}
    duplicates: list[tuple[str, str]] = []
    for system, item, value in cells:
        key = (system, item)
        if key in seen:
            duplicates.append(key)
        seen[key] = float(value)
    systems = sorted({s for s, _ in seen})
    items = sorted({i for _, i in seen})
    missing = [(s, i) for s in systems for i in items if (s, i) not in seen]
    if duplicates or missing:
        raise IncompleteGridError(
            f"score grid is not a complete (system x item) table: "
            f"{len(missing)} missing, {len(duplicates)} duplicated",
            missing=missing,
            duplicates=duplicates,
        )
    values = [
        float(np.mean([seen[(s, i)] for i in items])) for s in systems
    ]
    return ScoreVector(values=values, labels=systems)


def average_expert_scores(annotations: Sequence[float]) -> float:
    """Arithmetic mean of one pair's expert annotations."""
    if len(annotations) == 0:
        raise ValueError("cannot average an empty annotation list")
    return float(np.mean(annotations))
