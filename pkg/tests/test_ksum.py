import random

import pytest
from hypothesis import given, settings, strategies as st

from halfgap.geometry import IntOverflowError
from halfgap.ksum import (
    KSumInstance,
    dump_instance,
    gen_instance,
    load_instance,
    solve_brute,
    solve_mitm,
)


def test_brute_examples():
    w = solve_brute(KSumInstance(((1, 2), (3, 5), (4, 8))))
    assert w.values == (1, 3, 4)
    assert solve_brute(KSumInstance(((1,), (1,), (3,)), check_range=False)) is None
    assert solve_brute(KSumInstance(((0,), (0,), (0,)))).values == (0, 0, 0)


def test_mitm_examples():
    assert solve_mitm(KSumInstance(((5,), (-5,), (0,)), check_range=False)).values == (5, -5, 0)
    inst = KSumInstance(((1, 2), (3, 5), (4, 8)))
    assert solve_mitm(inst).is_valid(inst)


def test_validation():
    with pytest.raises(ValueError):
        KSumInstance(((1, 1), (2, 3), (4, 5)))
    with pytest.raises(ValueError):
        KSumInstance(((1,), (2, 3), (4,)))
    with pytest.raises(ValueError):
        KSumInstance(((1,),))
    with pytest.raises(ValueError):
        KSumInstance(((2,), (0,), (0,)))  # n=1 allows only [-1, 1]
    with pytest.raises(IntOverflowError):
        gen_instance(10 ** 4, 5, True, 0)


def test_gen_planted_and_not():
    for seed in range(20):
        yes = gen_instance(4, 3, True, seed)
        assert solve_brute(yes) is not None
        no = gen_instance(4, 3, False, seed)
        assert solve_brute(no) is None


def test_gen_deterministic():
    assert gen_instance(6, 4, True, 42) == gen_instance(6, 4, True, 42)
    assert gen_instance(6, 4, False, 42) == gen_instance(6, 4, False, 42)


def test_json_roundtrip(tmp_path):
    inst = gen_instance(5, 5, True, 3)
    dump_instance(inst, tmp_path / "k.json")
    assert load_instance(tmp_path / "k.json") == inst
    assert KSumInstance.from_json(inst.to_json()) == inst


def test_large_values_exact():
    # values near 2^100 overflow int64; both solvers must stay exact
    big = 2 ** 100
    inst = KSumInstance(((big, 1), (big + 7, 2), (2 * big + 7, 5)), check_range=False)
    assert solve_brute(inst).values == (big, big + 7, 2 * big + 7)
    assert solve_mitm(inst).values == (big, big + 7, 2 * big + 7)
    # equal residues mod 2^64 but different integers must not match
    fake = KSumInstance(((2 ** 64, 1), (0, 2), (0, 5)), check_range=False)
    assert solve_mitm(fake) is None and solve_brute(fake) is None


@settings(max_examples=80, deadline=None)
@given(st.integers(3, 5), st.integers(1, 6), st.integers(0, 2 ** 32), st.integers(1, 12))
def test_solvers_agree(k, n, seed, bound):
    rng = random.Random(seed)
    bound = max(bound, n)
    lists = tuple(tuple(rng.sample(range(-bound, bound + 1), n)) for _ in range(k))
    inst = KSumInstance(lists, check_range=False)
    a, b = solve_brute(inst), solve_mitm(inst)
    assert (a is None) == (b is None)
    for w in (a, b):
        if w is not None:
            assert w.is_valid(inst)
            assert sum(w.values[:-1]) == w.values[-1]
