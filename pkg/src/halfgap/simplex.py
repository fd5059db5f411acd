"""Exact linear separability via a fraction-free phase-1 simplex.

A labeling is separable by a halfspace exactly when the convex hulls of the
positive and the negative points are disjoint.  We solve the hull-intersection
feasibility problem

    sum_P lam_i x_i - sum_N mu_j x_j = 0,  sum lam = 1,  sum mu = 1,  lam, mu >= 0

with an integer tableau (rows rescaled by their gcd after every pivot) and
Bland's rule.  A feasible basis names at most d+2 points whose labels alone
already force inseparability (a "core").  An infeasible phase 1 yields a Farkas
vector, which is an integer separating halfspace.

Strictness: on a finite set, ``<w,x>+theta < 0`` for all negatives can be
rescaled into ``<= -1``; with integer points and integer (w, theta) any
negative value is already ``<= -1``.
"""

from __future__ import annotations

from math import gcd
from typing import Sequence

from .geometry import Halfspace, LabeledDataset, MultiLabelError, constant_halfspace


def _row_gcd(row: list) -> int:
    g = 0
    for v in row:
        if v:
            g = gcd(g, v)
            if g == 1:
                return 1
    return g


def _reduce(row: list) -> list:
    g = _row_gcd(row)
    if g > 1:
        return [v // g for v in row]
    return row


def phase1(A: Sequence[Sequence[int]], b: Sequence[int]):
    """Phase-1 simplex for ``A z = b, z >= 0`` with ``b >= 0`` (integers).

    Returns ``(True, values)`` with ``values`` a dict {column: (num, den)} of
    the positive basic structural variables, or ``(False, y)`` where ``y`` is an
    integer vector with ``y^T A <= 0`` and ``y^T b > 0``.
    """
    m = len(A)
    ncols = len(A[0]) if m else 0
    width = ncols + m
    rows = []
    for i in range(m):
        if b[i] < 0:
            raise ValueError("phase1 expects b >= 0")
        art = [0] * m
        art[i] = 1
        rows.append(list(A[i]) + art + [b[i]])
    basis = [ncols + i for i in range(m)]
    z = [0] * (width + 1)
    for r in rows:
        for j in range(ncols):
            z[j] += r[j]
        z[width] += r[width]
    zs = 1

    while True:
        enter = -1
        for j in range(width):
            if z[j] > 0:
                enter = j
                break
        if enter < 0:
            break
        leave = -1
        for i in range(m):
            a = rows[i][enter]
            if a <= 0:
                continue
            if leave < 0:
                leave = i
                continue
            # rows[i].rhs / a  vs  rows[leave].rhs / a_leave
            lhs = rows[i][width] * rows[leave][enter]
            rhs = rows[leave][width] * a
            if lhs < rhs or (lhs == rhs and basis[i] < basis[leave]):
                leave = i
        if leave < 0:  # cannot happen: phase 1 is bounded below by 0
            raise RuntimeError("phase 1 reported unbounded")
        prow = rows[leave]
        p = prow[enter]
        for i in range(m):
            if i == leave:
                continue
            a = rows[i][enter]
            if a:
                r = rows[i]
                rows[i] = _reduce([p * r[k] - a * prow[k] for k in range(width + 1)])
        a = z[enter]
        z = [p * z[k] - a * prow[k] for k in range(width + 1)]
        zs *= p
        g = gcd(_row_gcd(z), zs)
        if g > 1:
            z = [v // g for v in z]
            zs //= g
        basis[leave] = enter

    if z[width] > 0:
        # reduced cost of artificial i is 1 - y_i = -z[ncols+i]/zs
        return False, [zs + z[ncols + i] for i in range(m)]
    values = {}
    for i, col in enumerate(basis):
        if col < ncols and rows[i][width] > 0:
            values[col] = (rows[i][width], rows[i][col])
    return True, values


def separate(points: Sequence[Sequence[int]], labels: Sequence[int]):
    """Separate the label-1 from the label-0 points.

    Returns ``(halfspace, None)`` on success, else ``(None, core)`` where
    ``core`` lists the indices of a subset that is already inseparable under
    the given labels.
    """
    d = len(points[0])
    pos = [i for i, y in enumerate(labels) if y]
    neg = [i for i, y in enumerate(labels) if not y]
    if not neg:
        return constant_halfspace(d, 1), None
    if not pos:
        return constant_halfspace(d, 0), None
    cols = pos + neg
    A = []
    for k in range(d):
        A.append([points[i][k] for i in pos] + [-points[i][k] for i in neg])
    A.append([1] * len(pos) + [0] * len(neg))
    A.append([0] * len(pos) + [1] * len(neg))
    b = [0] * d + [1, 1]
    feasible, out = phase1(A, b)
    if feasible:
        return None, sorted(cols[c] for c in out)
    y = out
    w = [-v for v in y[:d]]
    theta = -y[d]
    g = gcd(_row_gcd(w), theta)
    if g > 1:
        w = [v // g for v in w]
        theta //= g
    h = Halfspace(tuple(w), theta)
    for i in pos:
        if h.value(points[i]) < 0:
            raise RuntimeError("Farkas witness misclassifies a positive point")
    for i in neg:
        if h.value(points[i]) > -1:
            raise RuntimeError("Farkas witness misclassifies a negative point")
    return h, None


def is_separable(ds: LabeledDataset):
    """Return ``(True, witness)`` if some halfspace labels ``ds`` perfectly.

    The witness satisfies ``<w,x>+theta >= 0`` on label-1 points and
    ``<= -1`` on label-0 points.  Otherwise returns ``(False, None)``.
    """
    if ds.multi_label:
        raise MultiLabelError("multi-label datasets are not functions")
    pts, labels, _ = ds.merged()
    h, _core = separate(pts, labels)
    return (h is not None), h
