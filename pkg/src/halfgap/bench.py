"""Wall-clock scaling runs with log-log slope fits."""

from __future__ import annotations

import csv
import io
import math
import random
import time
from dataclasses import asdict, dataclass
from typing import Optional, Sequence

import numpy as np

from .exact import exact_distance_2d, exact_distance_cand
from .geometry import LabeledDataset
from .ksum import gen_instance, random_lists, KSumInstance, solve_mitm, value_range
from .reduction import build_reduction, decide_via_distance, exact_solver

TASKS = ("mitm", "exact_cand", "reduction_e2e")
GRID_CAPS = {"mitm": 8192, "exact_cand": 400, "reduction_e2e": 6}


@dataclass
class BenchRecord:
    command: str
    d: Optional[int]
    n: int
    k: Optional[int]
    eps: Optional[str]
    seed: int
    wall_time_ns: int
    queries_or_samples: int
    result: str


@dataclass
class SlopeFit:
    series: str
    slope: Optional[float]  # None when fewer than two distinct sizes
    residual: Optional[float]  # root-mean-square residual in log space


@dataclass
class BenchResult:
    records: list
    fits: list

    def fit(self, series: str) -> SlopeFit:
        return next(f for f in self.fits if f.series == series)

    def to_csv(self) -> str:
        buf = io.StringIO()
        fields = list(BenchRecord.__dataclass_fields__)
        w = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
        w.writeheader()
        for r in self.records:
            w.writerow(asdict(r))
        return buf.getvalue()


def loglog_slope(sizes: Sequence[float], times: Sequence[float]) -> tuple:
    x = np.log(np.asarray(sizes, dtype=float))
    y = np.log(np.maximum(np.asarray(times, dtype=float), 1.0))
    if len(set(x.tolist())) < 2:
        return None, None
    slope, icpt = np.polyfit(x, y, 1)
    resid = y - (slope * x + icpt)
    return float(slope), float(np.sqrt(np.mean(resid ** 2)))


def _timed(fn):
    t0 = time.perf_counter_ns()
    out = fn()
    return out, time.perf_counter_ns() - t0


def _random_2d(n: int, rng: random.Random) -> LabeledDataset:
    pts: set = set()
    while len(pts) < n:
        pts.add((rng.randint(-10 * n, 10 * n), rng.randint(-10 * n, 10 * n)))
    pts_l = sorted(pts)
    return LabeledDataset.uniform(pts_l, [rng.randint(0, 1) for _ in pts_l])


def bench_scaling(task: str, grid: Sequence[int], seed: int = 0, k: int = 4, d: int = 2) -> BenchResult:
    if task not in TASKS:
        raise ValueError(f"unknown task {task!r}; choose from {', '.join(TASKS)}")
    if any(n < 1 or n > GRID_CAPS[task] for n in grid):
        raise ValueError(f"grid sizes for {task} must lie in [1, {GRID_CAPS[task]}]")
    records = []
    series: dict = {}
    for n in grid:
        rng = random.Random(seed * 1_000_003 + n)
        if task == "mitm":
            # sized for timing: values far outside any planted sum, so no early exit
            inst = KSumInstance(random_lists(n, k, value_range(n, k), rng))
            wit, ns = _timed(lambda: solve_mitm(inst))
            records.append(BenchRecord("mitm", None, n, k, None, seed, ns, n ** ((k + 1) // 2), "YES" if wit else "NO"))
            series.setdefault("mitm", []).append((n, ns))
        elif task == "exact_cand":
            ds = _random_2d(n, rng)
            sweep, ns1 = _timed(lambda: exact_distance_2d(ds))
            cand, ns2 = _timed(lambda: exact_distance_cand(ds))
            if sweep.distance != cand.distance:
                raise RuntimeError("sweep and candidate oracles disagree")
            res = f"{sweep.distance.numerator}/{sweep.distance.denominator}"
            records.append(BenchRecord("exact_sweep", 2, n, None, None, seed, ns1, n, res))
            records.append(BenchRecord("exact_cand", 2, n, None, None, seed, ns2, n, res))
            series.setdefault("exact_sweep", []).append((n, ns1))
            series.setdefault("exact_cand", []).append((n, ns2))
        else:
            inst = gen_instance(n, d + 1, planted=rng.random() < 0.5, seed=rng.getrandbits(32))

            def e2e():
                red = build_reduction(inst)
                return red, decide_via_distance(red, exact_solver)

            (red, side), ns = _timed(e2e)
            eps = f"{red.eps.numerator}/{red.eps.denominator}"
            records.append(BenchRecord("reduction_e2e", d, n, d + 1, eps, seed, ns, red.size, side.value))
            series.setdefault("reduction_e2e", []).append((n, ns))
    fits = []
    for name, pts in series.items():
        slope, resid = loglog_slope([p[0] for p in pts], [p[1] for p in pts])
        fits.append(SlopeFit(name, slope, resid))
    return BenchResult(records, fits)


def svg_chart(result: BenchResult, width: int = 480, height: int = 320) -> str:
    """Log-log line chart of wall time against n, one polyline per series."""
    colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"]
    by: dict = {}
    for r in result.records:
        by.setdefault(r.command, []).append((r.n, max(r.wall_time_ns, 1)))
    allx = [math.log(n) for pts in by.values() for n, _ in pts]
    ally = [math.log(t) for pts in by.values() for _, t in pts]
    pad = 40
    x0, x1 = min(allx), max(allx) if max(allx) > min(allx) else min(allx) + 1
    y0, y1 = min(ally), max(ally) if max(ally) > min(ally) else min(ally) + 1

    def sx(v):
        return pad + (v - x0) / (x1 - x0) * (width - 2 * pad)

    def sy(v):
        return height - pad - (v - y0) / (y1 - y0) * (height - 2 * pad)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{width // 2}" y="{height - 8}" text-anchor="middle" font-size="12">log n</text>',
        f'<text x="12" y="{height // 2}" font-size="12" transform="rotate(-90 12 {height // 2})">log ns</text>',
    ]
    for i, (name, pts) in enumerate(sorted(by.items())):
        c = colors[i % len(colors)]
        coords = " ".join(f"{sx(math.log(n)):.1f},{sy(math.log(t)):.1f}" for n, t in sorted(pts))
        parts.append(f'<polyline fill="none" stroke="{c}" stroke-width="2" points="{coords}"/>')
        parts.append(f'<text x="{pad + 4}" y="{pad + 14 * i}" font-size="11" fill="{c}">{name}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
