from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from halfgap.geometry import (
    DimensionError,
    Halfspace,
    IntOverflowError,
    LabeledDataset,
    MultiLabelError,
    agreements,
    disagreement,
    dump_dataset,
    eval_halfspace,
    load_dataset,
    normalize_weights,
)

YES6 = LabeledDataset.uniform(
    [(0, -1), (0, 1), (2, -1), (2, 1), (1, -1), (1, 1)], [0, 1, 0, 1, 0, 1]
)


def test_eval_boundary_inclusive():
    assert eval_halfspace(Halfspace((0, 0), 0), (7, -3)) == 1
    assert eval_halfspace(Halfspace((1, 0, 0), 0), (3, 0, 0)) == 1
    assert eval_halfspace(Halfspace((1, 0, 0), 0), (-1, 5, 2)) == 0


def test_eval_dimension_mismatch():
    with pytest.raises(DimensionError):
        eval_halfspace(Halfspace((1, 0), 0), (1, 2, 3))


def test_int_bound_enforced():
    with pytest.raises(IntOverflowError):
        Halfspace((2 ** 127,), 0)
    h = Halfspace((2 ** 126,), 0)
    with pytest.raises(IntOverflowError):
        h.value((2,))


def test_disagreement_examples():
    ds = LabeledDataset((( 0,),), (1,), (Fraction(1),))
    assert disagreement(ds, Halfspace((1,), 0)) == 0
    assert disagreement(YES6, Halfspace((0, 1), 0)) == 0
    # every point sits off the boundary of x2 = 0, so the flip gets all six wrong
    assert disagreement(YES6, Halfspace((0, -1), 0)) == 1
    assert agreements(YES6, Halfspace((0, 1), 0)) == 6


def test_normalize_weights():
    assert normalize_weights([1, 1]) == [Fraction(1, 2)] * 2
    assert normalize_weights([1, 2, 1]) == [Fraction(1, 4), Fraction(1, 2), Fraction(1, 4)]
    assert normalize_weights([3]) == [Fraction(1)]
    with pytest.raises(ValueError):
        normalize_weights([])
    with pytest.raises(ValueError):
        normalize_weights([1, 0])


def test_dataset_validation():
    with pytest.raises(MultiLabelError):
        LabeledDataset.uniform([(0,), (0,)], [0, 1])
    with pytest.raises(ValueError):
        LabeledDataset([(0,)], [1], [Fraction(1, 2)])
    with pytest.raises(DimensionError):
        LabeledDataset.uniform([(0,), (0, 1)], [0, 1])
    with pytest.raises(ValueError):
        LabeledDataset.uniform([], [])
    ds = LabeledDataset([(0,), (0,)], [0, 1], [Fraction(1, 2)] * 2, multi_label=True)
    with pytest.raises(MultiLabelError):
        ds.merged()


def test_merge_duplicates():
    ds = LabeledDataset.uniform([(1, 1), (0, 0), (1, 1)], [1, 0, 1])
    pts, labels, w = ds.merged()
    assert pts == [(1, 1), (0, 0)] and labels == [1, 0] and w == [Fraction(2, 3), Fraction(1, 3)]


def test_complement_is_exact_on_integers():
    h = Halfspace((2, -3), 1)
    for x in [(0, 0), (1, 1), (-4, 2), (3, 2)]:
        assert eval_halfspace(h, x) + eval_halfspace(h.complement(), x) == 1


points = st.lists(
    st.tuples(st.integers(-20, 20), st.integers(-20, 20)), min_size=1, max_size=12, unique=True
)


@st.composite
def datasets(draw):
    pts = draw(points)
    labels = draw(st.lists(st.integers(0, 1), min_size=len(pts), max_size=len(pts)))
    counts = draw(st.lists(st.integers(1, 5), min_size=len(pts), max_size=len(pts)))
    return LabeledDataset(tuple(pts), tuple(labels), tuple(normalize_weights(counts)))


halfspaces = st.builds(
    lambda a, b, t: Halfspace((a, b), t), st.integers(-5, 5), st.integers(-5, 5), st.integers(-30, 30)
)


@given(datasets(), halfspaces)
def test_flip_complementarity(ds, h):
    # negating keeps boundary points positive, so only they break complementarity
    b0 = sum(w for x, y, w in zip(ds.points, ds.labels, ds.weights) if h.value(x) == 0 and y == 0)
    b1 = sum(w for x, y, w in zip(ds.points, ds.labels, ds.weights) if h.value(x) == 0 and y == 1)
    assert disagreement(ds, h) + disagreement(ds, h.negate()) == 1 + b0 - b1
    assert disagreement(ds, h) + disagreement(ds, h.complement()) == 1


@given(datasets(), halfspaces, st.integers(1, 7))
def test_scaling_invariance(ds, h, c):
    assert disagreement(ds, h.scaled(c)) == disagreement(ds, h)
    assert 0 <= disagreement(ds, h) <= 1


@given(datasets())
def test_dataset_json_roundtrip(ds):
    assert LabeledDataset.from_json(ds.to_json()) == ds


@given(halfspaces)
def test_halfspace_json_roundtrip(h):
    assert Halfspace.from_json(h.to_json()) == h


def test_dataset_file_roundtrip(tmp_path):
    big = LabeledDataset.uniform([(2 ** 100, -(2 ** 90)), (1, 2)], [1, 0])
    dump_dataset(big, tmp_path / "d.json")
    assert load_dataset(tmp_path / "d.json") == big
