"""Exact integer points, halfspaces and weighted labeled datasets.

A halfspace is the classifier ``x -> 1{<w, x> + theta >= 0}`` with integer
``w`` and ``theta``.  The boundary is inclusive.  Datasets carry exact
rational weights (``fractions.Fraction``) summing to one.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence

INT_BOUND = 2 ** 126

Point = tuple  # tuple[int, ...]


class IntOverflowError(OverflowError):
    """An integer left the supported magnitude range [-2^126, 2^126]."""


class DimensionError(ValueError):
    pass


class MultiLabelError(ValueError):
    """Duplicate points carry conflicting labels."""


def check_int(v: int) -> int:
    if isinstance(v, bool) or not isinstance(v, int):
        raise TypeError(f"expected int, got {type(v).__name__}")
    if v > INT_BOUND or v < -INT_BOUND:
        raise IntOverflowError(f"integer {v} exceeds 2^126 in magnitude")
    return v


def as_point(coords: Iterable[int]) -> Point:
    p = tuple(check_int(int(c)) for c in coords)
    if not p:
        raise DimensionError("points need dimension >= 1")
    return p


@dataclass(frozen=True)
class Halfspace:
    w: tuple
    theta: int

    def __post_init__(self):
        object.__setattr__(self, "w", tuple(check_int(int(c)) for c in self.w))
        object.__setattr__(self, "theta", check_int(int(self.theta)))

    @property
    def d(self) -> int:
        return len(self.w)

    def value(self, x: Sequence[int]) -> int:
        if len(x) != len(self.w):
            raise DimensionError(f"halfspace has dimension {len(self.w)}, point has {len(x)}")
        return check_int(sum(a * b for a, b in zip(self.w, x)) + self.theta)

    def normalized(self) -> "Halfspace":
        """Divide (w, theta) by their gcd; the classifier is unchanged."""
        g = 0
        for c in self.w:
            g = gcd(g, c)
        g = gcd(g, self.theta)
        if g <= 1:
            return self
        return Halfspace(tuple(c // g for c in self.w), self.theta // g)

    def scaled(self, c: int) -> "Halfspace":
        if c < 1:
            raise ValueError("scale factor must be a positive integer")
        return Halfspace(tuple(c * a for a in self.w), c * self.theta)

    def negate(self) -> "Halfspace":
        """(-w, -theta): boundary points stay positive."""
        return Halfspace(tuple(-a for a in self.w), -self.theta)

    def complement(self) -> "Halfspace":
        # On integer points <w,x>+theta < 0  <=>  -<w,x>-theta-1 >= 0.
        return Halfspace(tuple(-a for a in self.w), -self.theta - 1)

    def to_json(self) -> dict:
        return {"w": [str(c) for c in self.w], "theta": str(self.theta)}

    @classmethod
    def from_json(cls, obj: dict) -> "Halfspace":
        return cls(tuple(int(c) for c in obj["w"]), int(obj["theta"]))


def constant_halfspace(d: int, label: int) -> Halfspace:
    return Halfspace((0,) * d, 0 if label else -1)


def eval_halfspace(h: Halfspace, x: Sequence[int]) -> int:
    return 1 if h.value(x) >= 0 else 0


def normalize_weights(counts: Sequence[int]) -> list:
    if len(counts) == 0:
        raise ValueError("normalize_weights needs at least one count")
    total = 0
    for c in counts:
        if c <= 0:
            raise ValueError("counts must be positive")
        total += c
    return [Fraction(c, total) for c in counts]


@dataclass(frozen=True)
class LabeledDataset:
    """Weighted integer points with {0,1} labels.

    Duplicate points must agree on their label unless ``multi_label`` is set;
    distance solvers refuse multi-label datasets.
    """

    points: tuple
    labels: tuple
    weights: tuple
    multi_label: bool = False

    def __post_init__(self):
        pts = tuple(as_point(p) for p in self.points)
        labels = tuple(int(y) for y in self.labels)
        weights = tuple(Fraction(w) for w in self.weights)
        if not pts:
            raise ValueError("dataset must contain at least one point")
        if not (len(pts) == len(labels) == len(weights)):
            raise ValueError("points, labels and weights must have equal lengths")
        d = len(pts[0])
        if any(len(p) != d for p in pts):
            raise DimensionError("all points must share one dimension")
        if any(y not in (0, 1) for y in labels):
            raise ValueError("labels must be 0 or 1")
        if any(w <= 0 for w in weights):
            raise ValueError("weights must be positive")
        if sum(weights) != 1:
            raise ValueError("weights must sum to exactly 1")
        if not self.multi_label:
            seen = {}
            for p, y in zip(pts, labels):
                if seen.setdefault(p, y) != y:
                    raise MultiLabelError(f"point {p} carries both labels")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "weights", weights)

    @property
    def d(self) -> int:
        return len(self.points[0])

    def __len__(self) -> int:
        return len(self.points)

    @classmethod
    def uniform(cls, points, labels) -> "LabeledDataset":
        points = list(points)
        return cls(tuple(points), tuple(labels), tuple(normalize_weights([1] * len(points))))

    def merged(self) -> tuple:
        """Collapse duplicate points: returns (points, labels, weights) lists."""
        if self.multi_label:
            raise MultiLabelError("distance solvers reject multi-label datasets")
        index = {}
        pts, labels, weights = [], [], []
        for p, y, w in zip(self.points, self.labels, self.weights):
            i = index.get(p)
            if i is None:
                index[p] = len(pts)
                pts.append(p)
                labels.append(y)
                weights.append(w)
            else:
                weights[i] += w
        return pts, labels, weights

    def to_json(self) -> dict:
        return {
            "d": self.d,
            "points": [[str(c) for c in p] for p in self.points],
            "labels": list(self.labels),
            "weights": [[str(w.numerator), str(w.denominator)] for w in self.weights],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "LabeledDataset":
        pts = tuple(tuple(int(c) for c in p) for p in obj["points"])
        if pts and len(pts[0]) != int(obj["d"]):
            raise DimensionError("declared d does not match the points")
        weights = tuple(Fraction(int(n), int(m)) for n, m in obj["weights"])
        return cls(pts, tuple(int(y) for y in obj["labels"]), weights, bool(obj.get("multi_label", False)))


def disagreement(ds: LabeledDataset, h: Halfspace) -> Fraction:
    """Exact weight of the points that ``h`` labels differently from ``ds``."""
    if h.d != ds.d:
        raise DimensionError(f"halfspace has dimension {h.d}, dataset has {ds.d}")
    total = Fraction(0)
    for x, y, w in zip(ds.points, ds.labels, ds.weights):
        if eval_halfspace(h, x) != y:
            total += w
    return total


def agreements(ds: LabeledDataset, h: Halfspace) -> int:
    return sum(1 for x, y in zip(ds.points, ds.labels) if eval_halfspace(h, x) == y)


def load_dataset(path) -> LabeledDataset:
    with open(path) as fh:
        return LabeledDataset.from_json(json.load(fh))


def dump_dataset(ds: LabeledDataset, path) -> None:
    with open(path, "w") as fh:
        json.dump(ds.to_json(), fh, indent=1)
