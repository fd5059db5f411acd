import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from halfgap.exact import (
    CapExceededError,
    DistanceReport,
    Method,
    exact_distance,
    exact_distance_1d,
    exact_distance_2d,
    exact_distance_cand,
    exact_distance_sep,
)
from halfgap.geometry import DimensionError, LabeledDataset, MultiLabelError, disagreement, normalize_weights
from halfgap.simplex import is_separable, phase1

XOR = LabeledDataset.uniform([(0, 0), (1, 1), (0, 1), (1, 0)], [1, 1, 0, 0])
ALL = (exact_distance_sep, exact_distance_cand)


def test_separable_1d_witness():
    ok, h = is_separable(LabeledDataset.uniform([(0,), (1,)], [1, 0]))
    assert ok
    assert h.value((0,)) >= 0 and h.value((1,)) <= -1


def test_conflicting_duplicate_rejected():
    with pytest.raises(MultiLabelError):
        LabeledDataset.uniform([(0,), (0,)], [1, 0])
    ds = LabeledDataset([(0,), (0,)], [1, 0], [Fraction(1, 2)] * 2, multi_label=True)
    with pytest.raises(MultiLabelError):
        is_separable(ds)
    with pytest.raises(MultiLabelError):
        exact_distance_sep(ds)


def test_xor_inseparable_but_single_flips_are():
    assert not is_separable(XOR)[0]
    for i in range(4):
        labels = list(XOR.labels)
        labels[i] ^= 1
        assert is_separable(LabeledDataset.uniform(XOR.points, labels))[0]


def test_phase1_farkas_certificate():
    # x1 + x2 = -1 has no nonnegative solution once the row is sign-flipped to b >= 0
    feasible, y = phase1([[-1, -1]], [1])
    assert not feasible
    assert all(y[0] * a <= 0 for a in (-1, -1)) and y[0] * 1 > 0


@pytest.mark.parametrize("solver", ALL + (exact_distance_2d,))
def test_xor_quarter(solver):
    rep = solver(XOR)
    assert rep.distance == Fraction(1, 4)
    assert disagreement(XOR, rep.witness) == rep.distance


def test_separable_zero():
    ds = LabeledDataset.uniform([(0, 0), (5, 1), (-3, 2), (2, 7)], [1, 1, 0, 0])
    assert is_separable(ds)[0]
    for solver in ALL + (exact_distance_2d,):
        assert solver(ds).distance == 0


def _brute_1d(xs, labels):
    """All thresholds between and around the sorted points, both orientations."""
    cuts = sorted(set(xs))
    cuts = [cuts[0] - 1] + cuts + [cuts[-1] + 1]
    best = len(xs)
    for c in cuts:
        for sgn in (1, -1):
            wrong = sum(1 for x, y in zip(xs, labels) if (sgn * (x - c) >= 0) != bool(y))
            best = min(best, wrong)
    return Fraction(best, len(xs))


@pytest.mark.parametrize(
    "xs,labels",
    [([0, 1], [0, 1]), ([0, 1, 2], [1, 0, 1]), (list(range(6)), [0, 1, 0, 1, 0, 1])],
)
def test_1d_examples(xs, labels):
    ds = LabeledDataset.uniform([(x,) for x in xs], labels)
    want = _brute_1d(xs, labels)
    rep = exact_distance_1d(ds)
    assert rep.distance == want
    assert rep.method is Method.SWEEP_1D
    assert exact_distance_sep(ds).distance == want


def test_1d_values():
    assert exact_distance_1d(LabeledDataset.uniform([(0,), (1,), (2,)], [1, 0, 1])).distance == Fraction(1, 3)
    alt = LabeledDataset.uniform([(x,) for x in range(6)], [x % 2 for x in range(6)])
    assert exact_distance_1d(alt).distance == Fraction(1, 3)


def test_dimension_checks():
    with pytest.raises(DimensionError):
        exact_distance_1d(XOR)
    with pytest.raises(DimensionError):
        exact_distance_2d(LabeledDataset.uniform([(0,)], [1]))


def test_point_cap():
    ds = LabeledDataset.uniform([(i, i * i) for i in range(20)], [i % 2 for i in range(20)])
    with pytest.raises(CapExceededError):
        exact_distance_sep(ds)


def test_reduction_stack_d3():
    pts = [(0, 0, -1), (0, 0, 1), (3, 0, -1), (3, 0, 1), (0, 3, -1), (0, 3, 1), (1, 1, 3), (1, 1, 5)]
    ds = LabeledDataset.uniform(pts, [0, 1] * 4)
    for solver in ALL:
        assert solver(ds).distance == Fraction(1, 8)


def test_report_json_roundtrip():
    rep = exact_distance(XOR)
    assert DistanceReport.from_json(rep.to_json()) == rep
    assert rep.to_json()["distance"] == ["1", "4"]


def test_witness_tie_break_is_deterministic():
    a = exact_distance_cand(XOR)
    b = exact_distance_cand(LabeledDataset.uniform(list(reversed(XOR.points)), list(reversed(XOR.labels))))
    assert a.witness == b.witness


@st.composite
def small_datasets(draw, d):
    n = draw(st.integers(1, 9))
    pts = draw(st.lists(st.tuples(*[st.integers(-4, 4)] * d), min_size=n, max_size=n, unique=True))
    labels = draw(st.lists(st.integers(0, 1), min_size=n, max_size=n))
    counts = draw(st.lists(st.integers(1, 3), min_size=n, max_size=n))
    return LabeledDataset(tuple(pts), tuple(labels), tuple(normalize_weights(counts)))


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 3).flatmap(small_datasets))
def test_oracles_agree(ds):
    ref = exact_distance_sep(ds)
    reps = [ref, exact_distance_cand(ds), exact_distance(ds)]
    if ds.d == 1:
        reps.append(exact_distance_1d(ds))
    if ds.d == 2:
        reps.append(exact_distance_2d(ds))
    for rep in reps:
        assert rep.distance == ref.distance
        assert disagreement(ds, rep.witness) == rep.distance
    zero = sum(w for y, w in zip(ds.labels, ds.weights) if y == 0)
    assert ref.distance <= min(zero, 1 - zero)


def test_adding_point_consistent():
    rng = random.Random(7)
    for _ in range(30):
        pts = list({(rng.randint(-5, 5), rng.randint(-5, 5)) for _ in range(8)})
        labels = [rng.randint(0, 1) for _ in pts]
        ds = LabeledDataset.uniform(pts, labels)
        rep = exact_distance(ds)
        extra = (rng.randint(6, 9), rng.randint(6, 9))
        lab = 1 if rep.witness.value(extra) >= 0 else 0
        ds2 = LabeledDataset.uniform(pts + [extra], labels + [lab])
        assert exact_distance(ds2).distance == exact_distance_sep(ds2).distance
