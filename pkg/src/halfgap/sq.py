"""Statistical-query simulation on a finite Gaussian surrogate.

The support holds M standard normal base points, each duplicated into two
atoms of weight 1/(2M).  Any function that is constant on atom pairs is
orthogonal, exactly and in floating point, to any function that flips sign
inside every pair: the two contributions of a pair are ``v`` and ``-v``.
``correlation`` sums pair by pair to keep that cancellation exact.

Randomness comes from ``numpy.random.default_rng`` seeded with explicit
integers, so every result is reproducible from its seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from statistics import NormalDist
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import linalg, stats

NORM_SLACK = 1e-12


def round_toward_zero(x, tau: float):
    """Largest-magnitude multiple of ``tau`` not exceeding ``|x|``, keeping the sign."""
    if not tau > 0:
        raise ValueError("tau must be positive")
    x = np.asarray(x, dtype=float)
    out = np.sign(x) * tau * np.floor(np.abs(x) / tau)
    out = out + 0.0  # turn -0.0 into 0.0
    return float(out) if out.ndim == 0 else out


def check_unit(u) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    if u.ndim != 1 or abs(np.linalg.norm(u) - 1.0) > NORM_SLACK:
        raise ValueError("not a unit vector")
    return u


def random_unit_vectors(rng: np.random.Generator, m: int, d: int) -> np.ndarray:
    g = rng.standard_normal((m, d))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


@dataclass(frozen=True, eq=False)
class GaussianSupport:
    """M Gaussian base points, each split into two half-weight atoms.

    Atoms ``2i`` and ``2i+1`` share base point ``i``.
    """

    base_points: np.ndarray

    @classmethod
    def sample(cls, m: int, d: int, seed: int) -> "GaussianSupport":
        if m < 1 or d < 1:
            raise ValueError("need m >= 1 base points in dimension d >= 1")
        return cls(np.random.default_rng(seed).standard_normal((m, d)))

    @property
    def m(self) -> int:
        return self.base_points.shape[0]

    @property
    def d(self) -> int:
        return self.base_points.shape[1]

    @property
    def n_atoms(self) -> int:
        return 2 * self.m

    @property
    def atom_weight(self) -> float:
        return 1.0 / self.n_atoms

    def atoms(self) -> np.ndarray:
        return np.repeat(self.base_points, 2, axis=0)


class QueryKind(Enum):
    HALFSPACE_SIGN = "halfspace_sign"
    PROJECTION_PROFILE = "projection_profile"
    TABLE = "table"


@dataclass(frozen=True, eq=False)
class QuerySpec:
    kind: QueryKind
    w: Optional[np.ndarray] = None
    theta: float = 0.0
    u: Optional[np.ndarray] = None
    breakpoints: tuple = ()
    signs: tuple = ()
    table: Optional[np.ndarray] = None

    @classmethod
    def halfspace(cls, w, theta: float = 0.0) -> "QuerySpec":
        return cls(QueryKind.HALFSPACE_SIGN, w=np.asarray(w, dtype=float), theta=float(theta))

    @classmethod
    def profile(cls, u, breakpoints: Sequence[float], signs: Sequence[int]) -> "QuerySpec":
        bps = tuple(float(b) for b in breakpoints)
        if list(bps) != sorted(bps):
            raise ValueError("breakpoints must be sorted")
        if len(signs) != len(bps) + 1 or any(s not in (-1, 1) for s in signs):
            raise ValueError("need one sign in {-1, +1} per interval")
        return cls(QueryKind.PROJECTION_PROFILE, u=check_unit(u), breakpoints=bps, signs=tuple(int(s) for s in signs))

    @classmethod
    def alternating(cls, u, breakpoints: Sequence[float]) -> "QuerySpec":
        """Profile whose sign changes at every breakpoint and is +1 on the last interval."""
        k = len(breakpoints)
        return cls.profile(u, breakpoints, [(-1) ** (k - j) for j in range(k + 1)])

    @classmethod
    def from_table(cls, values) -> "QuerySpec":
        values = np.asarray(values, dtype=float)
        if values.ndim != 1 or np.any(np.abs(values) > 1):
            raise ValueError("table values must be a vector in [-1, 1]")
        return cls(QueryKind.TABLE, table=values)

    def sign_changes(self) -> int:
        return sum(1 for a, b in zip(self.signs, self.signs[1:]) if a != b)

    def evaluate(self, support: GaussianSupport) -> np.ndarray:
        """Per-atom values."""
        if self.kind is QueryKind.TABLE:
            if len(self.table) != support.n_atoms:
                raise ValueError("table length does not match the support")
            return self.table
        x = support.base_points
        if self.kind is QueryKind.HALFSPACE_SIGN:
            if len(self.w) != support.d:
                raise ValueError("halfspace dimension does not match the support")
            base = np.where(x @ self.w + self.theta >= 0, 1.0, -1.0)
        else:
            if len(self.u) != support.d:
                raise ValueError("direction dimension does not match the support")
            idx = np.searchsorted(self.breakpoints, x @ self.u, side="right")
            base = np.asarray(self.signs, dtype=float)[idx]
        return np.repeat(base, 2)

    def to_json(self) -> dict:
        out: dict = {"kind": self.kind.value}
        if self.kind is QueryKind.HALFSPACE_SIGN:
            out.update(w=self.w.tolist(), theta=self.theta)
        elif self.kind is QueryKind.PROJECTION_PROFILE:
            out.update(u=self.u.tolist(), breakpoints=list(self.breakpoints), signs=list(self.signs))
        else:
            out.update(table=self.table.tolist())
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "QuerySpec":
        kind = QueryKind(obj["kind"])
        if kind is QueryKind.HALFSPACE_SIGN:
            return cls.halfspace(obj["w"], obj.get("theta", 0.0))
        if kind is QueryKind.PROJECTION_PROFILE:
            return cls.profile(obj["u"], obj["breakpoints"], obj["signs"])
        return cls.from_table(obj["table"])


@dataclass(frozen=True, eq=False)
class SignFunction:
    """A {-1, +1} value on every atom of a support."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 1 or not np.all(np.abs(v) == 1):
            raise ValueError("sign functions take values in {-1, +1}")
        object.__setattr__(self, "values", v)

    def negate(self) -> "SignFunction":
        return SignFunction(-self.values)

    def as_query(self) -> QuerySpec:
        return QuerySpec.from_table(self.values)

    def evaluate(self, support: GaussianSupport) -> np.ndarray:
        if len(self.values) != support.n_atoms:
            raise ValueError("sign function does not match the support")
        return self.values

    def to_json(self) -> dict:
        return {"values": [int(v) for v in self.values]}


def rounded_query(g: QuerySpec, step: float, support: GaussianSupport) -> QuerySpec:
    return QuerySpec.from_table(round_toward_zero(g.evaluate(support), step))


def _values(obj, support: GaussianSupport) -> np.ndarray:
    if isinstance(obj, np.ndarray):
        if len(obj) != support.n_atoms:
            raise ValueError("value vector does not match the support")
        return obj
    return obj.evaluate(support)


def correlation(support: GaussianSupport, a, b) -> float:
    """Weighted inner product, summed pair by pair."""
    prod = _values(a, support) * _values(b, support)
    pairs = prod[0::2] + prod[1::2]
    return float(pairs.sum()) * support.atom_weight


def support_distance(support: GaussianSupport, f: SignFunction, g) -> float:
    """Weight of the atoms where two sign functions differ."""
    return (1.0 - correlation(support, f, g)) / 2.0


class OracleMode(Enum):
    EXACT = "exact"
    ROUNDING = "rounding"
    ADVERSARIAL_ZERO = "adversarial_zero"


@dataclass
class StatOracle:
    tau: float
    mode: OracleMode = OracleMode.EXACT
    query_log: list = field(default_factory=list)

    def __post_init__(self):
        if not self.tau > 0:
            raise ValueError("tau must be positive")

    def ask(self, support: GaussianSupport, f: SignFunction, g: QuerySpec) -> float:
        self.query_log.append(g)
        if self.mode is OracleMode.ADVERSARIAL_ZERO:
            return 0.0
        c = correlation(support, f, g)
        if self.mode is OracleMode.ROUNDING:
            return round_toward_zero(c, self.tau)
        return c


def stat_query(oracle: StatOracle, support: GaussianSupport, f: SignFunction, g: QuerySpec) -> float:
    return oracle.ask(support, f, g)


# ---------------------------------------------------------------- packings


class PackingError(RuntimeError):
    def __init__(self, message: str, best_max: float):
        super().__init__(message)
        self.best_max = best_max


def max_abs_inner(vectors: np.ndarray) -> float:
    v = np.asarray(vectors, dtype=float)
    gram = np.abs(v @ v.T)
    np.fill_diagonal(gram, -np.inf)
    return float(gram.max())


def check_packing(vectors, threshold: float) -> bool:
    v = np.asarray(vectors, dtype=float)
    for row in v:
        check_unit(row)
    return max_abs_inner(v) <= threshold


def packing_parameters(d: int, eps: float, a: float, b: float) -> tuple:
    """Size ``ceil((1/eps)^(b d))`` and inner-product cap ``eps^(a eps)``."""
    if not 0 < b < (d - 1) / (4 * d):
        raise ValueError("b must lie in (0, (d-1)/(4d))")
    return math.ceil((1 / eps) ** (b * d)), eps ** (a * eps)


def sample_packing(d: int, m: int, threshold: float, max_retries: int = 50, seed: int = 0) -> np.ndarray:
    """First of up to ``max_retries`` draws of m random unit vectors with all |<u,v>| <= threshold."""
    if d < 2 or m < 2:
        raise ValueError("need d >= 2 and m >= 2")
    rng = np.random.default_rng(seed)
    best = math.inf
    for _ in range(max_retries):
        v = random_unit_vectors(rng, m, d)
        worst = max_abs_inner(v)
        best = min(best, worst)
        if worst <= threshold:
            if not check_packing(v, threshold):
                raise RuntimeError("packing failed its own post-check")
            return v
    raise PackingError(f"no packing within {max_retries} retries; best max |<u,v>| = {best:.6f}", best)


@dataclass(frozen=True)
class AngleStats:
    theta_min: float
    theta_max: float
    scaled_min: float
    scaled_max: float


def angle_stats(vectors) -> AngleStats:
    v = np.asarray(vectors, dtype=float)
    n, d = v.shape
    if n < 2:
        raise ValueError("need at least two vectors")
    iu = np.triu_indices(n, 1)
    angles = np.arccos(np.clip((v @ v.T)[iu], -1.0, 1.0))
    tmin, tmax = float(angles.min()), float(angles.max())
    scale = n ** (2 / (d - 1))
    return AngleStats(tmin, tmax, scale * tmin, scale * (math.pi - tmax))


@dataclass(frozen=True)
class AngleLawFit:
    k_min: float
    k_max: float
    ks_min: float
    ks_max: float

    @property
    def worst(self) -> float:
        return max(self.ks_min, self.ks_max)


def _fit_exponential_power(x: np.ndarray, d: int) -> tuple:
    # x^(d-1) is exponential with rate K under the limit law; K is its MLE
    k = 1.0 / float(np.mean(x ** (d - 1)))
    ks = stats.kstest(x, lambda t: 1.0 - np.exp(-k * np.maximum(t, 0.0) ** (d - 1))).statistic
    return k, float(ks)


def angle_law_report(d: int, n: int, trials: int, seed: int) -> AngleLawFit:
    """Fit ``F(x) = 1 - exp(-K x^(d-1))`` to the scaled extreme angles of n random unit vectors."""
    rng = np.random.default_rng(seed)
    mins, maxs = np.empty(trials), np.empty(trials)
    for t in range(trials):
        s = angle_stats(random_unit_vectors(rng, n, d))
        mins[t], maxs[t] = s.scaled_min, s.scaled_max
    k_min, ks_min = _fit_exponential_power(mins, d)
    k_max, ks_max = _fit_exponential_power(maxs, d)
    return AngleLawFit(k_min, k_max, ks_min, ks_max)


# ------------------------------------------------------- function families


def quantile_breakpoints(k: int) -> list:
    nd = NormalDist()
    return [nd.inv_cdf(j / (k + 1)) for j in range(1, k + 1)]


def projection_queries(vectors, k: int) -> list:
    if k < 1:
        raise ValueError("k must be at least 1")
    bps = quantile_breakpoints(k)
    return [QuerySpec.alternating(u, bps) for u in np.asarray(vectors, dtype=float)]


def build_projection_family(vectors, k: int, support: GaussianSupport) -> list:
    """``f_i(x) = profile(<u_i, x>)`` with a k-alternating profile split at normal quantiles."""
    fam = [SignFunction(q.evaluate(support)) for q in projection_queries(vectors, k)]
    for f in fam:
        if np.all(f.values == f.values[0]):
            raise ValueError("support is degenerate: a family member is constant")
    return fam


@dataclass(frozen=True)
class FamilyReport:
    best_halfspace: list  # per member: (correlation, threshold) of the best sign(<u,x> - t)
    pairwise_max: float


def projection_report(vectors, k: int, support: GaussianSupport, grid: Optional[np.ndarray] = None) -> FamilyReport:
    vectors = np.asarray(vectors, dtype=float)
    fam = build_projection_family(vectors, k, support)
    if grid is None:
        grid = np.linspace(-3.0, 3.0, 121)
    best = []
    for u, f in zip(vectors, fam):
        scores = [correlation(support, f, QuerySpec.halfspace(u, -t)) for t in grid]
        i = int(np.argmax(np.abs(scores)))
        best.append((abs(scores[i]), float(grid[i])))
    pair = 0.0
    for i in range(len(fam)):
        for j in range(i + 1, len(fam)):
            pair = max(pair, abs(correlation(support, fam[i], fam[j])))
    return FamilyReport(best, pair)


def hadamard_family(s: int) -> tuple:
    """s pairwise orthogonal sign functions on a support with s base points.

    ``s`` must be a power of two.  The base points are irrelevant to the
    functions; only the atom count matters.
    """
    rows = linalg.hadamard(s).astype(float)
    support = GaussianSupport(np.zeros((s, 1)))
    return [SignFunction(np.repeat(r, 2)) for r in rows], support


# --------------------------------------------------------------------- f0


def _pair_constant(v: np.ndarray) -> bool:
    return bool(np.array_equal(v[0::2], v[1::2]))


def build_f0(support: GaussianSupport, queries: Sequence[QuerySpec], references: Sequence[QuerySpec], tau: float) -> SignFunction:
    """A sign function balanced inside every color class.

    Base points are colored by their rounded query values and reference
    labels; each pair then gets one +1 and one -1 atom, alternating the
    orientation along each class.
    """
    if not tau > 0:
        raise ValueError("tau must be positive")
    cols = []
    for g in queries:
        v = g.evaluate(support)
        if not _pair_constant(v):
            raise ValueError("queries must take equal values on the two atoms of a pair")
        cols.append(round_toward_zero(v[0::2], tau / 2))
    for r in references:
        if r.kind is not QueryKind.HALFSPACE_SIGN:
            raise ValueError("references must be halfspace queries")
        cols.append(r.evaluate(support)[0::2])
    if cols:
        _, color = np.unique(np.column_stack(cols), axis=0, return_inverse=True)
        color = color.ravel()
    else:
        color = np.zeros(support.m, dtype=int)
    order = np.argsort(color, kind="stable")
    rank = np.empty(support.m, dtype=int)
    starts = np.r_[0, np.flatnonzero(np.diff(color[order])) + 1]
    pos = np.arange(support.m) - np.repeat(starts, np.diff(np.r_[starts, support.m]))
    rank[order] = pos
    first = np.where(rank % 2 == 0, 1.0, -1.0)
    vals = np.empty(support.n_atoms)
    vals[0::2] = first
    vals[1::2] = -first
    return SignFunction(vals)


# ------------------------------------------------------- counting argument


class PreconditionError(ValueError):
    pass


def counting_bound(s: int, tau: float) -> int:
    """``floor(s / (s tau^2 - 1))``; requires ``tau > s^(-1/2)``."""
    denom = s * tau * tau - 1
    if denom <= 0:
        raise ValueError("the counting bound needs tau > s^(-1/2)")
    return math.floor(s / denom)


def check_family(family: Sequence[SignFunction], support: GaussianSupport) -> float:
    """Largest off-diagonal |correlation|; raises if it exceeds 1/s."""
    s = len(family)
    mat = np.array([f.evaluate(support) for f in family])
    gram = (mat @ mat.T) * support.atom_weight
    np.fill_diagonal(gram, 0.0)
    worst = float(np.abs(gram).max()) if s > 1 else 0.0
    if worst > 1.0 / s + NORM_SLACK:
        raise PreconditionError(f"pairwise correlation {worst:.4g} exceeds 1/s = {1.0 / s:.4g}")
    return worst


def count_bad(family: Sequence[SignFunction], g: QuerySpec, tau: float, support: GaussianSupport) -> tuple:
    """Members with correlation >= tau and <= -tau against g, after checking the family.

    Counting itself needs no relation between tau and s; compare against
    ``counting_bound`` only when tau > s^(-1/2).
    """
    if not tau > 0:
        raise ValueError("tau must be positive")
    check_family(family, support)
    c = np.array([correlation(support, g, f) for f in family])
    return int(np.sum(c >= tau)), int(np.sum(c <= -tau))


# --------------------------------------------------------- adversary runs


class OracleBypassError(RuntimeError):
    """The algorithm used the oracle outside its run or with a malformed query."""


class _Session:
    def __init__(self, oracle: StatOracle, support: GaussianSupport):
        self._oracle = oracle
        self._support = support
        self.open = True

    def ask(self, g) -> float:
        if not self.open:
            raise OracleBypassError("query issued after the run ended")
        if not isinstance(g, QuerySpec):
            raise OracleBypassError("queries must be QuerySpec objects")
        g.evaluate(self._support)  # rejects queries that do not fit the support
        self._oracle.query_log.append(g)
        return 0.0


SQAlgorithm = Callable[[Callable[[QuerySpec], float]], Optional[float]]


@dataclass
class Transcript:
    queries: list
    survivors: list  # family indices every logged query leaves below tau
    f0_survives: bool
    estimate: Optional[float]
    f0_distance: float  # min over logged halfspace queries; 1/2 on a paired support
    consistent_with_f0: Optional[bool]
    consistent_with_survivor: Optional[bool]

    @property
    def fooled(self) -> Optional[bool]:
        """True when the single estimate cannot be eps/8-accurate for both f0 and a survivor."""
        if self.consistent_with_f0 is None:
            return None
        return not (self.consistent_with_f0 and self.consistent_with_survivor)


def collect_queries(algorithm: SQAlgorithm, support: GaussianSupport, tau: float) -> tuple:
    """Run against the all-zero oracle; returns (queries, estimate)."""
    oracle = StatOracle(tau, OracleMode.ADVERSARIAL_ZERO)
    session = _Session(oracle, support)
    try:
        estimate = algorithm(session.ask)
    finally:
        session.open = False
    return list(oracle.query_log), estimate


def adversary_run(
    algorithm: SQAlgorithm,
    family: Sequence[SignFunction],
    f0: SignFunction,
    tau: float,
    support: GaussianSupport,
    eps: Optional[float] = None,
    survivor_distance: Optional[Sequence[float]] = None,
) -> Transcript:
    """Answer every query with 0 and report which functions remain unrefuted.

    With ``eps`` and per-member ``survivor_distance`` upper bounds, also
    checks whether the single returned estimate could be eps/8-accurate for
    f0 (true distance >= 1/2 - eps/100) and for some survivor.
    """
    queries, estimate = collect_queries(algorithm, support, tau)
    vals = [q.evaluate(support) for q in queries]
    survivors = [
        i for i, f in enumerate(family) if all(abs(correlation(support, f, v)) < tau for v in vals)
    ]
    f0_ok = all(abs(correlation(support, f0, v)) < tau for v in vals)
    f0_dist = 0.5
    for q in queries:
        if q.kind is QueryKind.HALFSPACE_SIGN:
            f0_dist = min(f0_dist, support_distance(support, f0, q))
    c_f0 = c_s = None
    if eps is not None and estimate is not None:
        c_f0 = estimate >= 0.5 - eps / 100 - eps / 8
        if survivor_distance is None:
            survivor_distance = [0.5 - eps / 4] * len(family)
        c_s = any(estimate <= survivor_distance[i] + eps / 8 for i in survivors)
    return Transcript(queries, survivors, f0_ok, estimate, f0_dist, c_f0, c_s)


# -------------------------------------------------------- parameter plumbing


@dataclass(frozen=True)
class LowerBoundParameters:
    s: float
    rho: float
    k: float
    tau: float
    pairwise: float  # 2 rho^(k+1)

    @property
    def holds(self) -> bool:
        return self.pairwise <= 1.0 / self.s


def lower_bound_parameters(gamma: float, d: int, eps: float) -> LowerBoundParameters:
    s = (1 / eps) ** (gamma * (d - 1) / 4)
    rho = eps ** (d * eps)
    k = 1 / eps - 1
    return LowerBoundParameters(s, rho, k, s ** (-1 / 3), 2 * rho ** (k + 1))
