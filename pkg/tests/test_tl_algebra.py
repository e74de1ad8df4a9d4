import json
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from motzkin.exact import ExactOperator
from motzkin.operators import local_e
from motzkin.tl_algebra import (
    FLAT_RELATIONS, build_gh, check_flat_algebra, check_ptl, check_s21, check_ybe, flat_closure,
    loop_weight, r_matrix, random_spectral_pairs, reports_to_json,
)


@pytest.mark.parametrize("L", [3, 4, 5, 6])
def test_ptl_relations_hold_exactly(L):
    reps = check_ptl(L)
    assert reps and all(r.exact_equal for r in reps)
    assert all((r.max_abs_defect == 0) == r.exact_equal for r in reps)
    assert {r.relation for r in reps} >= {"e1", "e2", "e4", "e5", "e6"}


def test_ptl_L4_examples():
    reps = check_ptl(4)
    assert len([r for r in reps if r.relation == "e1"]) == 4
    e3 = [r for r in reps if r.relation == "e3"]
    assert [r.j for r in e3] == [(1, 3)] and e3[0].exact_equal
    assert loop_weight(4) == 2


def test_ptl_needs_three_links():
    with pytest.raises(ValueError, match="PTL needs >= 3 links"):
        check_ptl(2)


def test_cyclic_commutation_at_distance_two():
    # includes pairs such as (4, 1) and (5, 2) that straddle the wrap
    e = {j: local_e(j, 5) for j in range(1, 6)}
    for j in range(1, 6):
        k = (j + 1) % 5 + 1
        assert e[j] @ e[k] == e[k] @ e[j]


def test_r_matrix_special_values():
    e = local_e(1, 3)
    assert r_matrix(1, -1, 3).matrix == e
    assert r_matrix(1, 1, 3).matrix == e - 2 * ExactOperator.identity(27)
    assert r_matrix(1, Fraction(3, 7), 3).matrix.is_symmetric()
    with pytest.raises(ZeroDivisionError, match="spectral parameter pole"):
        r_matrix(1, 0, 3)


def test_ybe_examples():
    assert check_ybe(1, 2, 3).exact_equal
    assert check_ybe(Fraction(1, 2), Fraction(1, 2), 4).exact_equal
    with pytest.raises(ZeroDivisionError):
        check_ybe(1, -1, 3)


def test_ybe_at_wrap_link():
    assert check_ybe(Fraction(2, 3), -5, 4, j=4).exact_equal


@given(st.fractions(min_value=-9, max_value=9, max_denominator=9),
       st.fractions(min_value=-9, max_value=9, max_denominator=9))
@settings(max_examples=20, deadline=None)
def test_ybe_property(a, b):
    if a == 0 or b == 0 or a + b == 0:
        with pytest.raises(ZeroDivisionError):
            check_ybe(a, b, 3)
    else:
        assert check_ybe(a, b, 3).exact_equal


def test_random_pairs_are_seeded_and_off_poles():
    a = random_spectral_pairs(20, seed=7)
    assert a == random_spectral_pairs(20, seed=7)
    assert all(x != 0 and y != 0 and x + y != 0 for x, y in a)
    assert all(abs(x.numerator) <= 9 and x.denominator <= 9 for p in a for x in p)


def test_gh_transposes_and_symmetry():
    ops = build_gh(1, 3)
    assert ops["h3"] == ops["h2"].T
    assert ops["h4"] == ops["h1"].T
    for g in ("g1", "g2", "g3"):
        assert ops[g].is_symmetric()


@pytest.mark.parametrize("L", [3, 4, 5])
def test_nilpotency(L):
    for j in range(1, L + 1):
        ops = build_gh(j, L)
        for h in ("h1", "h2", "h3", "h4"):
            assert (ops[h] @ ops[h]).is_zero()


def test_flat_algebra_measured_constants():
    reps = {r.relation: r for r in check_flat_algebra(3) if r.j == (1,)}
    assert reps["e e' e = e [direct]"].exact_equal
    assert reps["f e' f = f [direct]"].exact_equal
    # each g squares to twice itself
    for g in ("g1", "g2", "g3"):
        assert reps[f"{g}^2 = c {g} [direct]"].scalar == 2
    # most listed products come out at twice the stated right-hand side
    assert not reps["h3 h2 = f [direct]"].exact_equal
    assert reps["h3 h2 = f [direct]"].scalar == 2
    assert reps["h2 h3 = g2 [direct]"].scalar == 2


def test_flat_algebra_scalar_pattern_is_uniform():
    reps = check_flat_algebra(4)
    listed = [r for r in reps if "^2" not in r.relation]
    assert len(listed) == 4 * 2 * len(FLAT_RELATIONS)
    off = {r.relation.split(" [")[0] for r in listed if r.scalar is None}
    assert off == {"h2 g1 = h2", "g1 h3 = h3"}
    for r in listed:
        name = r.relation.split(" [")[0]
        if name in ("e e' e = e", "f e' f = f"):
            assert r.exact_equal
        elif name not in off:
            assert r.scalar == 2


def test_non_scalar_products_land_on_the_other_h():
    ops = build_gh(2, 4)
    assert ops["h2"] @ ops["g1"] == 2 * ops["h1"]
    assert ops["g1"] @ ops["h3"] == 2 * ops["h4"]


def test_products_close_on_named_operators():
    entries = flat_closure(4)
    assert len(entries) == 64
    assert all(e.kind != "outside" for e in entries)


@pytest.mark.parametrize("L", [3, 4])
def test_s21_tables_after_normalization(L):
    for j in range(1, L + 1):
        for swapped in (False, True):
            reps = check_s21(L, j, swapped)
            assert len(reps) == 2
            for r in reps:
                assert r.exact_equal, r.details
                assert r.scalar == 2


def test_report_json_fields():
    data = json.loads(reports_to_json(check_ptl(3)))
    assert set(data[0]) >= {"relation", "L", "j", "exact_equal", "defect_num", "defect_den"}
    assert all(d["defect_num"] == 0 for d in data)
