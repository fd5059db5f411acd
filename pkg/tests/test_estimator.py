import math
from fractions import Fraction

import numpy as np
import pytest

from halfgap.estimator import DatasetAccess, approx_distance, empirical_dataset, sample_size
from halfgap.geometry import LabeledDataset, MultiLabelError
from halfgap.ksum import KSumInstance
from halfgap.reduction import ReductionAccess, build_reduction

XOR = LabeledDataset.uniform([(0, 0), (1, 1), (0, 1), (1, 0)], [1, 1, 0, 0])


def test_sample_size_formula():
    want = math.ceil(64 * (3 + math.log(4)) / 0.25)
    assert want == 1123
    assert sample_size(2, Fraction(1, 2), Fraction(1, 2)) == want


def test_sample_size_scaling():
    a = 64 * (3 + math.log(2 / 0.2)) / 0.1 ** 2
    assert sample_size(2, Fraction(1, 10), Fraction(1, 5)) == math.ceil(a)
    assert sample_size(2, Fraction(1, 20), Fraction(1, 5)) == math.ceil(4 * a)


@pytest.mark.parametrize("d,eps,delta", [(1, 1, Fraction(1, 2)), (0, Fraction(1, 2), Fraction(1, 2)), (2, Fraction(1, 2), 1), (2, 0, Fraction(1, 2))])
def test_sample_size_range(d, eps, delta):
    with pytest.raises(ValueError):
        sample_size(d, eps, delta)


def test_point_mass():
    ds = LabeledDataset.uniform([(3, 4)], [1])
    assert approx_distance(DatasetAccess(ds, 1), 2, Fraction(1, 2)) == 0


def test_yes_reduction_always_zero():
    red = build_reduction(KSumInstance(((0,), (0,), (0,))))
    for seed in range(5):
        assert approx_distance(ReductionAccess(red, seed), 2, Fraction(1, 4)) == 0


def test_xor_in_band():
    hits = sum(
        Fraction(15, 100) <= approx_distance(DatasetAccess(XOR, s), 2, Fraction(1, 10), Fraction(1, 10)) <= Fraction(35, 100)
        for s in range(200)
    )
    assert hits >= 180


def test_deterministic():
    a = approx_distance(DatasetAccess(XOR, 11), 2, Fraction(1, 4))
    assert a == approx_distance(DatasetAccess(XOR, 11), 2, Fraction(1, 4))
    assert 0 <= a <= 1


def test_merge_preserves_multiplicity():
    pts = np.array([[0, 0], [1, 1], [0, 0], [0, 0]])
    ds = empirical_dataset(pts, np.array([1, 0, 1, 1], dtype=np.int8))
    assert dict(zip(ds.points, ds.weights)) == {(0, 0): Fraction(3, 4), (1, 1): Fraction(1, 4)}


def test_conflicting_labels_rejected():
    class Noisy:
        rng_seed = 0

        def draw(self, rng, count):
            return np.zeros((count, 2), dtype=np.int64), rng.integers(0, 2, size=count).astype(np.int8)

        def query(self, x):
            return 0

    with pytest.raises(MultiLabelError):
        approx_distance(Noisy(), 2, Fraction(1, 2))


def test_wide_coordinates_merge_exactly():
    big = 2 ** 70
    pts = np.array([[big, 0], [big, 0], [-big, 1]], dtype=object)
    ds = empirical_dataset(pts, np.array([1, 1, 0], dtype=np.int8))
    assert dict(zip(ds.points, ds.weights)) == {(big, 0): Fraction(2, 3), (-big, 1): Fraction(1, 3)}
    with pytest.raises(MultiLabelError):
        empirical_dataset(pts, np.array([1, 0, 0], dtype=np.int8))
