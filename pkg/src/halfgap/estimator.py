"""Distance to halfspaces estimated from labeled samples.

Draw enough i.i.d. labeled samples for uniform convergence over halfspaces,
then return the exact distance of the empirical distribution.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Protocol

import numpy as np

from .exact import exact_distance
from .geometry import LabeledDataset, MultiLabelError

C_VC = 64


def sample_size(d: int, eps, delta) -> int:
    """``ceil(64 * (d + 1 + ln(2/delta)) / eps^2)``."""
    eps, delta = Fraction(eps), Fraction(delta)
    if d < 1:
        raise ValueError("d must be at least 1")
    if not (0 < eps < 1) or not (0 < delta < 1):
        raise ValueError("eps and delta must lie strictly between 0 and 1")
    log_term = math.log(2 / delta)
    # exact rational part, float only for the logarithm
    value = C_VC * (Fraction(d + 1) + Fraction(log_term)) / (eps * eps)
    return math.ceil(value)


class SampleAccess(Protocol):
    rng_seed: int

    def draw(self, rng: np.random.Generator, count: int):
        """Return ``(points, labels)`` arrays of ``count`` i.i.d. samples."""

    def query(self, x) -> int: ...


class DatasetAccess:
    """Samples from a weighted dataset; queries return the stored label or 0."""

    def __init__(self, ds: LabeledDataset, rng_seed: int):
        pts, labels, weights = ds.merged()
        self.rng_seed = rng_seed
        self._labels_by_point = dict(zip(pts, labels))
        self._pts = np.array(pts, dtype=object if _too_wide(pts) else np.int64)
        self._labels = np.array(labels, dtype=np.int8)
        self._p = np.array([float(w) for w in weights])
        self._p /= self._p.sum()

    def draw(self, rng: np.random.Generator, count: int):
        idx = rng.choice(len(self._labels), size=count, p=self._p)
        return self._pts[idx], self._labels[idx]

    def query(self, x) -> int:
        return self._labels_by_point.get(tuple(x), 0)


def _too_wide(pts) -> bool:
    return any(abs(c) >= 2 ** 62 for p in pts for c in p)


_MIX = np.array([0x9E3779B97F4A7C15, 0xC2B2AE3D27D4EB4F, 0x165667B19E3779F9, 0xD6E8FEB86659FD93], dtype=np.uint64)


def _group_rows(pts: np.ndarray):
    """Group equal rows: returns (first index, inverse, counts) per group."""
    d = pts.shape[1]
    mix = np.resize(_MIX, d) | np.uint64(1)
    key = (pts.astype(np.uint64) * mix).sum(axis=1, dtype=np.uint64)
    _, first, inverse, mult = np.unique(key, return_index=True, return_inverse=True, return_counts=True)
    inverse = inverse.ravel()
    if np.array_equal(pts, pts[first][inverse]):
        return first, inverse, mult
    # hash collision: fall back to grouping on the raw row bytes
    rowkey = pts.view(np.dtype((np.void, pts.dtype.itemsize * d))).ravel()
    _, first, inverse, mult = np.unique(rowkey, return_index=True, return_inverse=True, return_counts=True)
    return first, inverse.ravel(), mult


def empirical_dataset(points: np.ndarray, labels: np.ndarray) -> LabeledDataset:
    """Merge duplicate samples into multiplicity weights."""
    if points.dtype == object:
        counts: dict = {}
        seen: dict = {}
        for p, y in zip(map(tuple, points), labels.tolist()):
            if seen.setdefault(p, y) != y:
                raise MultiLabelError(f"sample point {p} was drawn with both labels")
            counts[p] = counts.get(p, 0) + 1
        uniq = list(counts)
        mult = [counts[p] for p in uniq]
        ulab = [seen[p] for p in uniq]
    else:
        pts = np.ascontiguousarray(points, dtype=np.int64)
        first, inverse, mult = _group_rows(pts)
        ones = np.bincount(inverse.ravel(), weights=labels, minlength=len(mult))
        bad = np.flatnonzero((ones != 0) & (ones != mult))
        if len(bad):
            raise MultiLabelError(f"sample point {tuple(pts[first[bad[0]]].tolist())} was drawn with both labels")
        uniq = [tuple(int(c) for c in pts[i]) for i in first]
        ulab = (ones > 0).astype(int).tolist()
        mult = mult.tolist()
    total = sum(mult)
    return LabeledDataset(tuple(uniq), tuple(ulab), tuple(Fraction(m, total) for m in mult))


def approx_distance(acc: SampleAccess, d: int, eps, delta=Fraction(1, 3)) -> Fraction:
    s = sample_size(d, eps, delta)
    rng = np.random.default_rng(acc.rng_seed)
    points, labels = acc.draw(rng, s)
    return exact_distance(empirical_dataset(points, labels)).distance
