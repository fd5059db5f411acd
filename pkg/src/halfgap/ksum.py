"""k-SUM instances, generators and solvers.

The variant used throughout asks for ``a_1 + ... + a_{k-1} = a_k`` with one
value taken from each list.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from itertools import product
from typing import Optional

import numpy as np

from .geometry import INT_BOUND, IntOverflowError, check_int

_MOD = 1 << 64
_BRUTE_CHUNK = 1 << 18
_SCAN_BLOCK = 1 << 20


@dataclass(frozen=True)
class KSumInstance:
    """k lists of n distinct integers each.

    With ``check_range`` (the default) every value must lie in
    ``[-n^(2k), n^(2k)]``.
    """

    lists: tuple
    check_range: bool = True

    def __post_init__(self):
        lists = tuple(tuple(check_int(int(v)) for v in lst) for lst in self.lists)
        if len(lists) < 2:
            raise ValueError("k-SUM needs k >= 2 lists")
        n = len(lists[0])
        if n < 1 or any(len(lst) != n for lst in lists):
            raise ValueError("all lists must have the same length n >= 1")
        for lst in lists:
            if len(set(lst)) != n:
                raise ValueError("values within a list must be distinct")
        if self.check_range:
            bound = value_range(n, len(lists))
            for lst in lists:
                for v in lst:
                    if abs(v) > bound:
                        raise ValueError(f"value {v} outside [-n^2k, n^2k] = [-{bound}, {bound}]")
        object.__setattr__(self, "lists", lists)

    @property
    def k(self) -> int:
        return len(self.lists)

    @property
    def n(self) -> int:
        return len(self.lists[0])

    def to_json(self) -> dict:
        return {"k": self.k, "n": self.n, "lists": [[str(v) for v in lst] for lst in self.lists]}

    @classmethod
    def from_json(cls, obj: dict, check_range: bool = True) -> "KSumInstance":
        inst = cls(tuple(tuple(int(v) for v in lst) for lst in obj["lists"]), check_range)
        if inst.k != int(obj["k"]) or inst.n != int(obj["n"]):
            raise ValueError("declared k/n do not match the lists")
        return inst


@dataclass(frozen=True)
class KSumWitness:
    choices: tuple  # ((index, value), ...) one pair per list

    @property
    def values(self) -> tuple:
        return tuple(v for _, v in self.choices)

    def is_valid(self, inst: KSumInstance) -> bool:
        if len(self.choices) != inst.k:
            return False
        for lst, (i, v) in zip(inst.lists, self.choices):
            if lst[i] != v:
                return False
        vals = self.values
        return sum(vals[:-1]) == vals[-1]

    def to_json(self) -> dict:
        return {"indices": [i for i, _ in self.choices], "values": [str(v) for _, v in self.choices]}


def value_range(n: int, k: int) -> int:
    return n ** (2 * k)


def load_instance(path, check_range: bool = True) -> KSumInstance:
    with open(path) as fh:
        return KSumInstance.from_json(json.load(fh), check_range)


def dump_instance(inst: KSumInstance, path) -> None:
    with open(path, "w") as fh:
        json.dump(inst.to_json(), fh, indent=1)


def _witness(inst, idx) -> KSumWitness:
    return KSumWitness(tuple((i, lst[i]) for i, lst in zip(idx, inst.lists)))


def _fits_int64(inst) -> bool:
    m = max(abs(v) for lst in inst.lists for v in lst)
    return inst.k * m < (1 << 62)


def solve_brute(inst: KSumInstance) -> Optional[KSumWitness]:
    """Full enumeration of all n^k tuples; returns the lexicographically first witness."""
    k, n = inst.k, inst.n
    if not _fits_int64(inst):
        for idx in product(range(n), repeat=k):
            vals = [lst[i] for lst, i in zip(inst.lists, idx)]
            if sum(vals[:-1]) == vals[-1]:
                return _witness(inst, idx)
        return None
    arrays = [np.array(lst, dtype=np.int64) for lst in inst.lists]
    sums = arrays[0]
    for a in arrays[1:-1]:
        sums = (sums[:, None] + a[None, :]).ravel()
    last = arrays[-1]
    for start in range(0, len(sums), _BRUTE_CHUNK):
        block = sums[start:start + _BRUTE_CHUNK]
        hits = block[:, None] == last[None, :]
        flat = int(hits.argmax())
        if hits.flat[flat]:
            head, tail = divmod(flat, n)
            idx = np.unravel_index(start + head, (n,) * (k - 1))
            return _witness(inst, tuple(int(i) for i in idx) + (tail,))
    return None


def _residues(values, negate=False) -> np.ndarray:
    return np.array([(-v if negate else v) % _MOD for v in values], dtype=np.uint64)


def _half_sums(res_lists) -> np.ndarray:
    sums = res_lists[0]
    for r in res_lists[1:]:
        sums = (sums[:, None] + r[None, :]).ravel()
    return sums


def solve_mitm(inst: KSumInstance) -> Optional[KSumWitness]:
    """Meet in the middle over {A_1, ..., A_{k-1}, -A_k}.

    The first ceil(k/2) lists are summed and sorted; the remaining lists are
    scanned.  Sums are compared modulo 2^64 and every residue match is
    confirmed in exact integer arithmetic, so there are no false positives.
    Runs in O(n^ceil(k/2) log n) time.
    """
    k, n = inst.k, inst.n
    lists = list(inst.lists)
    res = [_residues(lst) for lst in lists[:-1]] + [_residues(lists[-1], negate=True)]
    h = (k + 1) // 2
    left = _half_sums(res[:h])
    order = np.argsort(left, kind="stable")
    left_sorted = left[order]
    right_res = res[h:]
    # scan the right half in chunks of its first list to bound memory
    first, rest = right_res[0], right_res[1:]
    rest_sums = _half_sums(rest) if rest else np.zeros(1, dtype=np.uint64)
    signs = [1] * (k - 1) + [-1]

    def exact_sum(idx):
        return sum(s * lst[i] for s, lst, i in zip(signs, lists, idx))

    rows = max(1, _SCAN_BLOCK // len(rest_sums))
    for i0 in range(0, n, rows):
        right = (first[i0:i0 + rows, None] + rest_sums[None, :]).ravel()
        target = np.uint64(0) - right
        # sorted keys let searchsorted walk the table monotonically
        korder = np.argsort(target, kind="stable")
        keys = target[korder]
        lo = np.empty_like(korder)
        hi = np.empty_like(korder)
        lo[korder] = np.searchsorted(left_sorted, keys, side="left")
        hi[korder] = np.searchsorted(left_sorted, keys, side="right")
        for r in np.flatnonzero(hi > lo):
            ridx = np.unravel_index(int(r), (rows if i0 + rows <= n else n - i0,) + (n,) * len(rest))
            ridx = (i0 + int(ridx[0]),) + tuple(int(i) for i in ridx[1:])
            for pos in range(int(lo[r]), int(hi[r])):
                lidx = tuple(int(i) for i in np.unravel_index(int(order[pos]), (n,) * h))
                idx = lidx + ridx
                if exact_sum(idx) == 0:
                    return _witness(inst, idx)
    return None


def _distinct(rng: random.Random, n: int, bound: int, exclude=()) -> list:
    out, seen = [], set(exclude)
    if 2 * bound + 1 - len(seen) < n:
        raise ValueError("range too small for n distinct values")
    while len(out) < n:
        v = rng.randint(-bound, bound)
        if v not in seen:
            seen.add(v)
            out.append(v)
    return out


def random_lists(n: int, k: int, bound: int, rng: random.Random) -> tuple:
    return tuple(tuple(_distinct(rng, n, bound)) for _ in range(k))


def gen_instance(n: int, k: int, planted: bool, seed: int, max_tries: int = 10_000) -> KSumInstance:
    """Random instance inside the problem's value range.

    Planted instances contain a witness by construction.  Non-planted ones are
    rejection-sampled until a solver certifies that no witness exists.
    """
    if n < 1 or k < 2:
        raise ValueError("need n >= 1 and k >= 2")
    bound = value_range(n, k)
    if k * bound > INT_BOUND:
        raise IntOverflowError(f"n^2k = {bound} is too large for 126-bit values")
    rng = random.Random(seed)
    for _ in range(max_tries):
        lists = [_distinct(rng, n, bound) for _ in range(k - 1)]
        if planted:
            pick = [rng.randrange(n) for _ in range(k - 1)]
            target = sum(lst[i] for lst, i in zip(lists, pick))
            if abs(target) > bound:
                continue
            last = _distinct(rng, n - 1, bound, exclude=(target,))
            last.insert(rng.randrange(n), target)
            return KSumInstance(tuple(map(tuple, lists + [last])))
        inst = KSumInstance(tuple(map(tuple, lists + [_distinct(rng, n, bound)])))
        solver = solve_brute if n <= 12 else solve_mitm
        if solver(inst) is None:
            return inst
    raise RuntimeError(f"could not generate an instance after {max_tries} tries")
