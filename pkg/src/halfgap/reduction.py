"""(d+1)-SUM to distribution-free distance approximation for halfspaces.

Each value of list i is lifted onto a vertical line above a vertex of a
simplex in {x_d = 0} (the last list sits above the centroid), and replaced by
a pair of points one unit below (label 0) and one unit above (label 1).  A
witness tuple makes d+1 such pairs coplanar, which raises the best halfspace
agreement by exactly one point.
"""

from __future__ import annotations

import json
import math
from bisect import bisect_left
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Callable

import numpy as np

from .estimator import approx_distance
from .exact import exact_distance
from .geometry import LabeledDataset, check_int
from .ksum import KSumInstance


class Side(Enum):
    YES = "YES"
    NO = "NO"


class GapViolation(RuntimeError):
    """Exact distance fell strictly inside the proven gap; signals a bug."""


@dataclass(frozen=True)
class ReducedInstance:
    d: int
    n: int
    dataset: LabeledDataset
    prefixes: tuple       # first d-1 coordinates of each list's vertical line
    per_list_index: tuple  # per list: sorted last coordinates of the lifted points
    per_list_values: tuple  # source values aligned with per_list_index
    eps: Fraction
    threshold: Fraction
    yes_bound: Fraction
    no_bound: Fraction

    @property
    def size(self) -> int:
        return len(self.dataset)

    def coordinate_bound(self) -> int:
        return 4 * self.d * self.n ** (2 * (self.d + 1)) + self.d + 1

    def max_abs_coordinate(self) -> int:
        return max(abs(c) for p in self.dataset.points for c in p)

    def meta(self) -> dict:
        frac = lambda q: [str(q.numerator), str(q.denominator)]  # noqa: E731
        return {
            "d": self.d,
            "n": self.n,
            "eps": frac(self.eps),
            "threshold": frac(self.threshold),
            "yes_bound": frac(self.yes_bound),
            "no_bound": frac(self.no_bound),
            "coordinate_bound": str(self.coordinate_bound()),
            "lists": [[str(v) for v in vals] for vals in self.per_list_values],
        }

    def to_json(self) -> dict:
        out = self.dataset.to_json()
        out["meta"] = self.meta()
        return out


def _anchors(d: int):
    """Simplex vertices p(1)=0, p(i)=d*e_{i-1}, and the centroid (1,..,1,0)."""
    verts = [tuple([0] * d)]
    for i in range(2, d + 1):
        v = [0] * d
        v[i - 2] = d
        verts.append(tuple(v))
    centre = tuple([1] * (d - 1) + [0])
    return verts + [centre]


def build_reduction(inst: KSumInstance) -> ReducedInstance:
    d = inst.k - 1
    if d < 2:
        raise ValueError(
            "the reduction needs d >= 2: for d = 1 the vertices and centroid do not "
            "fit as distinct points of {x_1 = 0}"
        )
    n = inst.n
    anchors = _anchors(d)
    points, labels = [], []
    keys, values = [], []
    for i, lst in enumerate(inst.lists):
        scale = 4 if i == d else 4 * d
        base = anchors[i]
        vals = sorted(lst)
        lifted = [check_int(scale * a) for a in vals]
        keys.append(tuple(lifted))
        values.append(tuple(vals))
        for h in lifted:
            points.append(base[:-1] + (check_int(h - 1),))
            labels.append(0)
            points.append(base[:-1] + (check_int(h + 1),))
            labels.append(1)
    size = len(points)
    good = (n + 1) * (d + 1)
    return ReducedInstance(
        d=d,
        n=n,
        dataset=LabeledDataset.uniform(points, labels),
        prefixes=tuple(a[:-1] for a in anchors),
        per_list_index=tuple(keys),
        per_list_values=tuple(values),
        eps=Fraction(1, 5 * (d + 1) * n),
        threshold=(size - good + Fraction(1, 2)) / size,
        yes_bound=Fraction(size - good, size),
        no_bound=Fraction(size - good + 1, size),
    )


def f_query(red: ReducedInstance, x) -> int:
    """Label of x: 1 on the upper point of a pair, 0 everywhere else."""
    x = tuple(x)
    if len(x) != red.d:
        raise ValueError("query point has the wrong dimension")
    prefix, last = x[:-1], x[-1]
    for pre, keys in zip(red.prefixes, red.per_list_index):
        if pre != prefix:
            continue
        j = bisect_left(keys, last - 1)
        if j < len(keys) and keys[j] == last - 1:
            return 1
    return 0


def draw_sample(red: ReducedInstance, rng: np.random.Generator):
    i = int(rng.integers(red.size))
    return red.dataset.points[i], red.dataset.labels[i]


class ReductionAccess:
    """Uniform samples from the reduced point set, plus label queries."""

    def __init__(self, red: ReducedInstance, rng_seed: int):
        self.red = red
        self.rng_seed = rng_seed
        self._pts = np.array(red.dataset.points, dtype=np.int64 if red.max_abs_coordinate() < 2 ** 62 else object)
        self._labels = np.array(red.dataset.labels, dtype=np.int8)

    def draw(self, rng: np.random.Generator, count: int):
        idx = rng.integers(self.red.size, size=count)
        return self._pts[idx], self._labels[idx]

    def query(self, x) -> int:
        return f_query(self.red, x)


@dataclass(frozen=True)
class GapReport:
    exact: Fraction
    side: Side


def verify_gap(red: ReducedInstance, solver=exact_distance) -> GapReport:
    exact = solver(red.dataset).distance
    yes = exact <= red.yes_bound
    no = exact >= red.no_bound
    if yes == no:
        raise GapViolation(
            f"exact distance {exact} lies strictly between {red.yes_bound} and {red.no_bound}"
        )
    return GapReport(exact, Side.YES if yes else Side.NO)


def decide_via_distance(red: ReducedInstance, solver: Callable[[ReducedInstance], Fraction]) -> Side:
    """Accept iff the solver's distance estimate is at most the threshold."""
    return Side.YES if solver(red) <= red.threshold else Side.NO


def exact_solver(red: ReducedInstance) -> Fraction:
    return exact_distance(red.dataset).distance


def estimate_solver(seed: int, delta: Fraction = Fraction(1, 3)) -> Callable[[ReducedInstance], Fraction]:
    """A sampling solver run at the reduction's own accuracy parameter."""

    def solve(red: ReducedInstance) -> Fraction:
        return approx_distance(ReductionAccess(red, seed), red.d, red.eps, delta)

    return solve


def coordinate_exponent(red: ReducedInstance) -> dict:
    """How the coordinate bound compares with powers of 1/eps.

    ``proven`` is an exponent e with bound <= (1/eps)^e for every n >= 1:
    (5(d+1)n)^(2d+3) >= 5(d+1) n^(2d+2) >= 4d n^(2d+2) + d + 1.
    """
    inv = 1 / red.eps
    bound = red.coordinate_bound()
    measured = math.log(bound) / math.log(inv) if inv > 1 else float("inf")
    return {
        "max_abs": red.max_abs_coordinate(),
        "bound": bound,
        "inv_eps": int(inv),
        "measured_exponent": measured,
        "proven_exponent": 2 * red.d + 3,
    }


def load_reduced(path) -> dict:
    with open(path) as fh:
        return json.load(fh)
