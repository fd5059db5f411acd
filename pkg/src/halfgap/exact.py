"""Exact minimum-disagreement distance from a labeled dataset to halfspaces.

Two independent routes:

* ``exact_distance_sep`` enumerates relabelings in increasing flip weight and
  stops at the first separable one.  Complete by construction, exponential.
* ``exact_distance_cand`` scores a polynomial family of candidate hyperplanes
  (through affinely independent data points, completed by axis directions).
  Points lying on a candidate hyperplane are labeled by solving the same
  problem one dimension lower inside the hyperplane; this mirrors an
  infinitesimal tilt and is what makes the candidate family complete on
  degenerate inputs.

``exact_distance_1d`` and ``exact_distance_2d`` are sort/sweep specialisations.
All arithmetic is exact; weights are scaled to integers by their common
denominator before any comparison.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from itertools import combinations
from math import factorial, gcd, lcm

import numpy as np

from .geometry import (
    DimensionError,
    Halfspace,
    LabeledDataset,
    MultiLabelError,
    agreements,
    constant_halfspace,
    disagreement,
)
from .simplex import separate

DEFAULT_POINT_CAP = 18
_INT64_SAFE = 2 ** 62


class Method(Enum):
    SEPARABILITY = "SEPARABILITY"
    CANDIDATES = "CANDIDATES"
    SWEEP_1D = "SWEEP_1D"
    SWEEP_2D = "SWEEP_2D"


class CapExceededError(ValueError):
    pass


@dataclass(frozen=True)
class DistanceReport:
    distance: Fraction
    witness: Halfspace
    agreements: int
    method: Method

    def to_json(self) -> dict:
        return {
            "distance": [str(self.distance.numerator), str(self.distance.denominator)],
            "witness": self.witness.to_json(),
            "agreements": self.agreements,
            "method": self.method.value,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "DistanceReport":
        num, den = obj["distance"]
        return cls(
            Fraction(int(num), int(den)),
            Halfspace.from_json(obj["witness"]),
            int(obj.get("agreements", 0)),
            Method(obj["method"]),
        )


def _integer_support(ds: LabeledDataset):
    """Merged support with weights scaled to integers summing to ``den``."""
    if ds.multi_label:
        raise MultiLabelError("distance solvers reject multi-label datasets")
    pts, labels, weights = ds.merged()
    den = 1
    for w in weights:
        den = lcm(den, w.denominator)
    iw = [int(w * den) for w in weights]
    return pts, labels, iw, den


def _report(ds, witness, method, agree_weight, den) -> DistanceReport:
    dist = disagreement(ds, witness)
    if dist != 1 - Fraction(agree_weight, den):
        raise RuntimeError(f"{method.value}: witness distance {dist} disagrees with solver optimum")
    return DistanceReport(dist, witness.normalized(), agreements(ds, witness), method)


def _best_constant(labels, iw, d):
    w1 = sum(w for w, y in zip(iw, labels) if y)
    w0 = sum(iw) - w1
    # (0,..,0,-1) sorts before (0,..,0,0)
    if w0 >= w1:
        return w0, constant_halfspace(d, 0)
    return w1, constant_halfspace(d, 1)


# --------------------------------------------------------------------------
# separability enumeration


def _subsets_by_weight(weights):
    """Yield (total, mask) for every subset, in nondecreasing total weight."""
    yield 0, 0
    order = sorted(range(len(weights)), key=lambda i: (weights[i], i))
    if not order:
        return
    ws = [weights[i] for i in order]
    bits = [1 << i for i in order]
    tick = 0
    heap = [(ws[0], tick, 0, bits[0])]
    while heap:
        total, _, pos, mask = heapq.heappop(heap)
        yield total, mask
        nxt = pos + 1
        if nxt < len(ws):
            tick += 1
            heapq.heappush(heap, (total + ws[nxt], tick, nxt, mask | bits[nxt]))
            tick += 1
            heapq.heappush(heap, (total - ws[pos] + ws[nxt], tick, nxt, (mask & ~bits[pos]) | bits[nxt]))


def exact_distance_sep(ds: LabeledDataset, point_cap: int = DEFAULT_POINT_CAP) -> DistanceReport:
    """Exact distance by minimum-weight relabeling to a separable labeling.

    ``point_cap`` bounds the number of distinct support points.
    """
    pts, labels, iw, den = _integer_support(ds)
    n = len(pts)
    if n > point_cap:
        raise CapExceededError(f"{n} distinct points exceed the enumeration cap {point_cap}")
    base = 0
    for i, y in enumerate(labels):
        if y:
            base |= 1 << i
    total = sum(iw)
    cores = []  # (mask, labels restricted to mask) known to be inseparable
    for flip_weight, flip in _subsets_by_weight(iw):
        lab = base ^ flip
        if any(((lab ^ val) & m) == 0 for m, val in cores):
            continue
        h, core = separate(pts, [(lab >> i) & 1 for i in range(n)])
        if h is not None:
            return _report(ds, h, Method.SEPARABILITY, total - flip_weight, den)
        m = 0
        for i in core:
            m |= 1 << i
        cores.append((m, lab & m))
    raise RuntimeError("no separable labeling found; constant labelings are always separable")


# --------------------------------------------------------------------------
# candidate hyperplanes


def _det(M):
    """Vectorised determinant of a stack of small integer matrices (..., k, k)."""
    k = M.shape[-1]
    if k == 0:
        return np.ones(M.shape[:-2], dtype=M.dtype)
    if k == 1:
        return M[..., 0, 0]
    if k == 2:
        return M[..., 0, 0] * M[..., 1, 1] - M[..., 0, 1] * M[..., 1, 0]
    if k == 3:
        a, b, c = M[..., 0, 0], M[..., 0, 1], M[..., 0, 2]
        return (a * (M[..., 1, 1] * M[..., 2, 2] - M[..., 1, 2] * M[..., 2, 1])
                - b * (M[..., 1, 0] * M[..., 2, 2] - M[..., 1, 2] * M[..., 2, 0])
                + c * (M[..., 1, 0] * M[..., 2, 1] - M[..., 1, 1] * M[..., 2, 0]))
    # cofactor expansion along the first row
    out = 0
    for j in range(k):
        minor = np.delete(np.delete(M, 0, axis=-2), j, axis=-1)
        term = M[..., 0, j] * _det(minor)
        out = out + term if j % 2 == 0 else out - term
    return out


def _normals(M):
    """Generalised cross product of the d-1 rows of each (d-1, d) matrix."""
    d = M.shape[-1]
    cols = []
    for i in range(d):
        minor = np.delete(M, i, axis=-1)
        det = _det(minor)
        cols.append(det if i % 2 == 0 else -det)
    return np.stack(cols, axis=-1)


def _dtype_for(P_max: int, d: int):
    wbound = factorial(max(d - 1, 0)) * (2 * P_max + 1) ** max(d - 1, 0)
    if 4 * d * wbound * (P_max + 1) < _INT64_SAFE:
        return np.int64
    return object


def _candidate_hyperplanes(P):
    """Distinct normalized (w, theta) rows through affinely independent subsets.

    Each subset B of 1..d points is completed by axis directions until it
    spans a hyperplane; degenerate completions are dropped.
    """
    n, d = P.shape
    rows = []
    for m in range(1, min(d, n) + 1):
        combos = np.array(list(combinations(range(n), m)), dtype=np.intp)
        base = P[combos[:, 0]]
        diffs = P[combos[:, 1:]] - base[:, None, :]
        for extra in combinations(range(d), d - m):
            E = np.zeros((len(extra), d), dtype=P.dtype)
            for r, c in enumerate(extra):
                E[r, c] = 1
            M = np.concatenate([diffs, np.broadcast_to(E, (len(combos),) + E.shape)], axis=1)
            W = _normals(M)
            T = -(W * base).sum(axis=1)
            keep = (W != 0).any(axis=1)
            if keep.any():
                rows.append(np.concatenate([W[keep], T[keep][:, None]], axis=1))
    if not rows:
        return np.zeros((0, d + 1), dtype=P.dtype)
    H = np.concatenate(rows, axis=0)
    if H.dtype == object:
        seen = {}
        for row in H:
            key = _normalize_row([int(v) for v in row], d)
            seen[key] = True
        return np.array(sorted(seen), dtype=object).reshape(-1, d + 1)
    g = np.gcd.reduce(np.abs(H), axis=1)
    H = H // g[:, None]
    W = H[:, :d]
    nz = W != 0
    first = W[np.arange(len(W)), nz.argmax(axis=1)]
    H = H * np.where(first < 0, -1, 1)[:, None]
    return np.unique(H, axis=0)


def _normalize_row(row, d):
    g = 0
    for v in row:
        g = gcd(g, v)
    row = [v // g for v in row]
    first = next(v for v in row[:d] if v != 0)
    if first < 0:
        row = [-v for v in row]
    return tuple(row)


def _rank(vectors):
    """Rank of a list of integer vectors (fraction-free elimination)."""
    rows = [list(v) for v in vectors]
    rank = 0
    ncols = len(rows[0]) if rows else 0
    for c in range(ncols):
        piv = next((i for i in range(rank, len(rows)) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        p = rows[rank]
        for i in range(rank + 1, len(rows)):
            a = rows[i][c]
            if a:
                rows[i] = [p[c] * x - a * y for x, y in zip(rows[i], p)]
        rank += 1
    return rank


def _affinely_independent(points) -> bool:
    p0 = points[0]
    diffs = [[a - b for a, b in zip(p, p0)] for p in points[1:]]
    return not diffs or _rank(diffs) == len(diffs)


def _cand_best(pts, labels, iw):
    """Maximum agreement weight over all halfspaces, with an integer witness.

    ``pts`` are distinct integer points (tuples) of a common dimension d >= 1.
    """
    n = len(pts)
    d = len(pts[0])
    best_val, best_h = _best_constant(labels, iw, d)
    if n <= 1 or len(set(labels)) == 1:
        return best_val, best_h
    best_key = tuple(best_h.w) + (best_h.theta,)

    pmax = max(abs(c) for p in pts for c in p)
    dtype = _dtype_for(pmax, d)
    P = np.array(pts, dtype=dtype).reshape(n, d)
    H = _candidate_hyperplanes(P)
    if len(H) == 0:
        return best_val, best_h
    wv = np.array(iw, dtype=dtype if sum(iw) < _INT64_SAFE else object)
    y1 = np.array(labels, dtype=bool)
    V = H[:, :d].dot(P.T) + H[:, d][:, None]
    pos, neg, zero = V > 0, V < 0, V == 0
    zeros = np.zeros((), dtype=wv.dtype)
    a_up = np.where((pos & y1) | (neg & ~y1), wv, zeros).sum(axis=1)
    a_dn = np.where((neg & y1) | (pos & ~y1), wv, zeros).sum(axis=1)
    wz = np.where(zero, wv, zeros).sum(axis=1)
    ub = np.maximum(a_up, a_dn) + wz
    order = sorted(range(len(H)), key=lambda k: -int(ub[k]))

    memo = {}
    chosen = None
    for k in order:
        if int(ub[k]) < best_val:
            break
        Z = tuple(np.flatnonzero(zero[k]).tolist())
        zw = int(wz[k])
        if zw == 0 or len({labels[i] for i in Z}) == 1:
            zbest = zw
        elif len(Z) <= d and _affinely_independent([pts[i] for i in Z]):
            zbest = zw
        else:
            if Z not in memo:
                j = _drop_axis(H[k, :d])
                sub = [pts[i][:j] + pts[i][j + 1:] for i in Z]
                memo[Z] = _cand_best(sub, [labels[i] for i in Z], [iw[i] for i in Z])[0]
            zbest = memo[Z]
        row = tuple(int(v) for v in H[k])
        for sign, a in ((1, int(a_up[k])), (-1, int(a_dn[k]))):
            val = a + zbest
            key = tuple(sign * v for v in row)
            if val > best_val or (val == best_val and key < best_key):
                best_val, best_key, chosen = val, key, (k, sign, Z)
    if chosen is None:
        return best_val, best_h
    k, sign, Z = chosen
    return best_val, _tilt(pts, labels, iw, H[k], sign, Z)


def _drop_axis(w) -> int:
    for j in range(len(w) - 1, -1, -1):
        if w[j] != 0:
            return j
    raise ValueError("zero normal")


def _tilt(pts, labels, iw, row, sign, Z):
    """Halfspace that follows (row, sign) off the hyperplane and the best
    lower-dimensional classifier on it."""
    d = len(pts[0])
    w = [sign * int(v) for v in row[:d]]
    theta = sign * int(row[d])
    if not Z:
        return Halfspace(tuple(w), theta)
    j = _drop_axis(w)
    sub = [pts[i][:j] + pts[i][j + 1:] for i in Z]
    _, g = _cand_best(sub, [labels[i] for i in Z], [iw[i] for i in Z])
    gw = list(g.w[:j]) + [0] + list(g.w[j:])
    zset = set(Z)
    big = 1
    for i, p in enumerate(pts):
        if i not in zset:
            big = max(big, abs(sum(a * b for a, b in zip(gw, p)) + g.theta) + 1)
    return Halfspace(tuple(big * a + b for a, b in zip(w, gw)), big * theta + g.theta)


def exact_distance_cand(ds: LabeledDataset) -> DistanceReport:
    """Exact distance by scoring candidate hyperplanes (polynomial in n for fixed d)."""
    pts, labels, iw, den = _integer_support(ds)
    val, h = _cand_best(pts, labels, iw)
    return _report(ds, h, Method.CANDIDATES, val, den)


# --------------------------------------------------------------------------
# 1-D and 2-D sweeps


def _best_threshold(items):
    """Best classifier ``1{a*t + b >= 0}`` on weighted scalars.

    ``items`` is a list of (t, label, weight) with distinct t.
    Returns (agreement, a, b).
    """
    items = sorted(items)
    t = [it[0] for it in items]
    pre1, pre0 = [0], [0]
    for _, y, w in items:
        pre1.append(pre1[-1] + (w if y else 0))
        pre0.append(pre0[-1] + (0 if y else w))
    tot1, tot0 = pre1[-1], pre0[-1]
    best = (tot0, 0, -1) if tot0 >= tot1 else (tot1, 0, 0)
    g = len(items)
    for k in range(g + 1):
        # positives are items k.. (t >= t_k)
        if k < g:
            val = pre0[k] + tot1 - pre1[k]
            if val > best[0]:
                best = (val, 1, -t[k])
        # positives are items ..k-1 (t <= t_{k-1})
        if k > 0:
            val = pre1[k] + tot0 - pre0[k]
            if val > best[0]:
                best = (val, -1, t[k - 1])
    return best


def exact_distance_1d(ds: LabeledDataset) -> DistanceReport:
    """Sorted prefix-sum scan over all thresholds and both orientations."""
    if ds.d != 1:
        raise DimensionError("exact_distance_1d needs d = 1")
    pts, labels, iw, den = _integer_support(ds)
    val, a, b = _best_threshold([(p[0], y, w) for p, y, w in zip(pts, labels, iw)])
    return _report(ds, Halfspace((a,), b), Method.SWEEP_1D, val, den)


def _half_plane_dir(vx, vy):
    """Canonical direction of the line spanned by v, plus whether v points along it."""
    g = gcd(vx, vy)
    ux, uy = vx // g, vy // g
    if uy > 0 or (uy == 0 and ux > 0):
        return (ux, uy), True
    return (-ux, -uy), False


def _angle_key(u):
    ux, uy = u
    return (0, Fraction(0)) if uy == 0 else (1, Fraction(-ux, uy))


def exact_distance_2d(ds: LabeledDataset) -> DistanceReport:
    """Rotational sweep of a directed line around every pivot point.

    Each event (the line meeting other points) is scored with the points on
    the line solved as a 1-D problem; between events the line meets only the
    pivot.  O(n^2 log n) after merging duplicates.
    """
    if ds.d != 2:
        raise DimensionError("exact_distance_2d needs d = 2")
    pts, labels, iw, den = _integer_support(ds)
    n = len(pts)
    best_val, best_h = _best_constant(labels, iw, 2)
    best_plan = None
    for p in range(n):
        px, py = pts[p]
        groups = {}
        L1 = L0 = R1 = R0 = 0
        for q in range(n):
            if q == p:
                continue
            u, ahead = _half_plane_dir(pts[q][0] - px, pts[q][1] - py)
            groups.setdefault(u, []).append((q, ahead))
            if ahead:
                if labels[q]:
                    L1 += iw[q]
                else:
                    L0 += iw[q]
            elif labels[q]:
                R1 += iw[q]
            else:
                R0 += iw[q]
        dirs = sorted(groups, key=_angle_key)
        yp, wp = labels[p], iw[p]
        for gi, u in enumerate(dirs):
            block = groups[u]
            l1, l0, r1, r0 = L1, L0, R1, R0
            line = [(0, yp, wp)]
            for q, ahead in block:
                w, y = iw[q], labels[q]
                if ahead:
                    if y:
                        l1 -= w
                    else:
                        l0 -= w
                else:
                    if y:
                        r1 -= w
                    else:
                        r0 -= w
                t = (pts[q][0] - px) * u[0] + (pts[q][1] - py) * u[1]
                line.append((t, y, w))
            z, a, b = _best_threshold(line)
            for sign, off in ((1, l1 + r0), (-1, l0 + r1)):
                if off + z > best_val:
                    best_val, best_plan = off + z, ("event", p, u, sign, a, b)
            # rotate past the event: ahead points go right, behind points go left
            for q, ahead in block:
                w, y = iw[q], labels[q]
                if ahead:
                    if y:
                        L1 -= w
                        R1 += w
                    else:
                        L0 -= w
                        R0 += w
                else:
                    if y:
                        R1 -= w
                        L1 += w
                    else:
                        R0 -= w
                        L0 += w
            for sign, off in ((1, L1 + R0), (-1, L0 + R1)):
                if off + wp > best_val:
                    if len(dirs) == 1:
                        mid = (-u[1], u[0])
                    else:
                        nxt = dirs[gi + 1] if gi + 1 < len(dirs) else tuple(-c for c in dirs[0])
                        mid = (u[0] + nxt[0], u[1] + nxt[1])
                    best_val, best_plan = off + wp, ("between", p, mid, sign, 0, 0 if yp else -1)
    if best_plan is not None:
        best_h = _sweep_witness(pts, best_plan)
    return _report(ds, best_h, Method.SWEEP_2D, best_val, den)


def _sweep_witness(pts, plan):
    _, p, u, sign, a, b = plan
    px, py = pts[p]
    # h(x) = <(-uy, ux), x - p> is positive left of the directed line
    hw = (-sign * u[1], sign * u[0])
    htheta = -(hw[0] * px + hw[1] * py)
    # on-line classifier a*t + b with t = <u, x - p>
    gw = (a * u[0], a * u[1])
    gtheta = b - a * (u[0] * px + u[1] * py)
    big = 1
    for x in pts:
        if hw[0] * x[0] + hw[1] * x[1] + htheta != 0:
            big = max(big, abs(gw[0] * x[0] + gw[1] * x[1] + gtheta) + 1)
    return Halfspace((big * hw[0] + gw[0], big * hw[1] + gw[1]), big * htheta + gtheta)


def exact_distance(ds: LabeledDataset) -> DistanceReport:
    """Dispatch to the fastest exact path for the dataset's dimension."""
    if ds.d == 1:
        return exact_distance_1d(ds)
    if ds.d == 2:
        return exact_distance_2d(ds)
    return exact_distance_cand(ds)
