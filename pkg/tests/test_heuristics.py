"""Branch probability models: the heuristic table, orientation, combination."""

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from elan import (
    HEURISTIC,
    HEURISTIC_TABLE,
    SIMPLE,
    BranchModel,
    branch_probability,
    dempster_shafer_combine,
    model_by_name,
    noisy_or,
)
from elan.cfg import EdgeLabel

from conftest import vertex_by_text

probs = st.floats(min_value=0.01, max_value=0.99)


def p_true(sdg, text, model=HEURISTIC):
    return branch_probability(vertex_by_text(sdg, text),
                              EdgeLabel("true"), model)


# -- the constants -----------------------------------------------------------

def test_heuristic_table_values():
    assert HEURISTIC_TABLE == {
        "loop_branch": 0.88,
        "pointer": 0.40,
        "value_check": 0.16,
        "loop_exit": 0.20,
        "return": 0.28,
    }


def test_default_models():
    assert SIMPLE.variant == "simple"
    assert HEURISTIC.variant == "heuristic"
    assert model_by_name("simple") is SIMPLE
    assert model_by_name("heuristic") is HEURISTIC
    with pytest.raises(ValueError):
        model_by_name("psychic")


def test_model_validation():
    with pytest.raises(ValueError):
        BranchModel("other")
    with pytest.raises(ValueError):
        BranchModel("heuristic", table={"loop_branch": 0.9})


# -- evidence combination ----------------------------------------------------

def test_combine_known_values():
    assert math.isclose(dempster_shafer_combine(0.88, 0.40),
                        0.8301886792452831, rel_tol=0, abs_tol=1e-15)
    assert abs(dempster_shafer_combine(0.88, 0.40) - 0.83019) <= 1e-5
    assert math.isclose(dempster_shafer_combine(0.16, 0.16),
                        0.035010940919037205, rel_tol=0, abs_tol=1e-15)
    assert math.isclose(dempster_shafer_combine(0.88, 0.72),
                        (0.88 * 0.72) / (0.88 * 0.72 + 0.12 * 0.28),
                        rel_tol=0, abs_tol=1e-15)


def test_combine_total_conflict():
    with pytest.raises(ValueError):
        dempster_shafer_combine(0.0, 1.0)
    with pytest.raises(ValueError):
        dempster_shafer_combine(1.0, 0.0)


@given(p=probs)
def test_combine_neutral_element(p):
    assert math.isclose(dempster_shafer_combine(p, 0.5), p,
                        rel_tol=0, abs_tol=1e-12)


@given(p=probs, q=probs)
def test_combine_commutative(p, q):
    assert dempster_shafer_combine(p, q) == dempster_shafer_combine(q, p)


@given(p=probs, q=probs, r=probs)
def test_combine_associative(p, q, r):
    left = dempster_shafer_combine(dempster_shafer_combine(p, q), r)
    right = dempster_shafer_combine(p, dempster_shafer_combine(q, r))
    assert math.isclose(left, right, rel_tol=0, abs_tol=1e-9)


@given(p=probs, q=probs)
def test_combine_reinforces(p, q):
    combined = dempster_shafer_combine(p, q)
    assert 0.0 < combined < 1.0
    if p > 0.5 and q > 0.5:
        assert combined >= max(p, q)
    if p < 0.5 and q < 0.5:
        assert combined <= min(p, q)


@given(values=st.lists(probs, min_size=1, max_size=6))
def test_noisy_or_bounds_and_monotonicity(values):
    combined = noisy_or(values)
    assert max(values) - 1e-12 <= combined <= 1.0
    assert math.isclose(combined, 1.0 - math.prod(1.0 - v for v in values),
                        rel_tol=0, abs_tol=1e-12)
    assert noisy_or(values + [0.3]) >= combined - 1e-12


def test_noisy_or_edge_cases():
    assert noisy_or([]) == 0.0
    assert noisy_or([0.7]) == pytest.approx(0.7, abs=1e-15)
    assert noisy_or([1.0, 0.2]) == 1.0


# -- orientation on real vertices --------------------------------------------

def test_plain_condition_is_even_money(build):
    _, sdg = build("int main(){ x = input(); if (x == 7) { a = 1; } "
                   "b = 2; return b; }")
    assert p_true(sdg, "x == 7") == 0.5
    assert p_true(sdg, "x == 7", SIMPLE) == 0.5


def test_loop_condition(build):
    _, sdg = build("int main(){ n = input(); while (n < 9) { n = n + 1; } "
                   "done = 1; return done; }")
    v = vertex_by_text(sdg, "n < 9")
    assert branch_probability(v, EdgeLabel("true"), HEURISTIC) == \
        pytest.approx(0.88)
    assert branch_probability(v, EdgeLabel("true"), SIMPLE) == 1.0
    # loops are assumed to terminate: the exit edge is certain either way
    assert branch_probability(v, EdgeLabel("false"), HEURISTIC) == 1.0
    assert branch_probability(v, EdgeLabel("false"), SIMPLE) == 1.0


def test_loop_condition_combines_with_value_check(build):
    # `n > 0` is simultaneously a loop branch (0.88) and an inverted
    # non-positivity check (0.84); the estimates reinforce each other
    _, sdg = build("int main(){ n = input(); while (n > 0) { n = n - 1; } "
                   "done = 1; return done; }")
    assert p_true(sdg, "n > 0") == pytest.approx(
        dempster_shafer_combine(0.88, 0.84), abs=1e-15)


POINTERS = """int main(int* p) {
    n = input();
    if (p == NULL) { a = 1; }
    t1 = 0;
    if (p != NULL) { b = 1; }
    t2 = 0;
    if (!p) { c = 1; }
    t3 = 0;
    if (p) { d = 1; }
    t4 = 0;
    return t4;
}
"""


def test_pointer_orientations(build):
    _, sdg = build(POINTERS)
    assert p_true(sdg, "p == NULL") == pytest.approx(0.40)
    assert p_true(sdg, "p != NULL") == pytest.approx(0.60)
    assert p_true(sdg, "!(p)") == pytest.approx(0.40)
    assert p_true(sdg, "p") == pytest.approx(0.60)


VALUE_CHECKS = """int main() {
    x = input();
    if (x < 0) { a = 1; }
    t1 = 0;
    if (x <= 0) { b = 1; }
    t2 = 0;
    if (x > 0) { c = 1; }
    t3 = 0;
    if (x >= 0) { d = 1; }
    t4 = 0;
    if (0 > x) { e = 1; }
    t5 = 0;
    if (x < 5) { f = 1; }
    t6 = 0;
    return t6;
}
"""


def test_value_check_orientations(build):
    _, sdg = build(VALUE_CHECKS)
    assert p_true(sdg, "x < 0") == pytest.approx(0.16)
    assert p_true(sdg, "x <= 0") == pytest.approx(0.16)
    assert p_true(sdg, "x > 0") == pytest.approx(0.84)
    assert p_true(sdg, "x >= 0") == pytest.approx(0.84)
    assert p_true(sdg, "0 > x") == pytest.approx(0.16)   # mirrored form
    assert p_true(sdg, "x < 5") == 0.5  # only comparisons against zero count


def test_loop_exit_orientations(build):
    src = """int main() {
        n = input();
        while (n > 0) {
            if (n == 3) { break; }
            n = n - 1;
        }
        m = input();
        while (m > 0) {
            if (m != 3) { m = m - 1; } else { break; }
        }
        fin = 0;
        return fin;
    }"""
    _, sdg = build(src)
    assert p_true(sdg, "n == 3") == pytest.approx(0.20)
    assert p_true(sdg, "m != 3") == pytest.approx(0.80)


def test_return_guard_orientations(build):
    src = """int main() {
        x = input();
        if (x == 7) { return 0; }
        a = 1;
        if (x == 9) { b = 1; } else { return a; }
        c = 2;
        if (x == 11) { return c; } else { return 0; }
    }"""
    _, sdg = build(src)
    assert p_true(sdg, "x == 7") == pytest.approx(0.28)
    assert p_true(sdg, "x == 9") == pytest.approx(0.72)
    # both arms return: the heuristic offers no direction
    assert p_true(sdg, "x == 11") == 0.5


def test_combined_evidence_loop_and_pointer(build):
    src = """int main(int* p) {
        while (p == NULL) {
            spin = 1;
        }
        done = 2;
        return done;
    }"""
    _, sdg = build(src)
    assert p_true(sdg, "p == NULL") == pytest.approx(
        0.8301886792452831, abs=1e-15)


def test_combined_evidence_return_and_value(build):
    src = """int main() {
        x = input();
        if (x < 0) { return 0; }
        a = 1;
        return a;
    }"""
    _, sdg = build(src)
    expected = dempster_shafer_combine(0.16, 0.28)
    assert p_true(sdg, "x < 0") == pytest.approx(expected, abs=1e-15)
    assert expected == pytest.approx(
        (0.16 * 0.28) / (0.16 * 0.28 + 0.84 * 0.72), abs=1e-15)


def test_switch_probability_uniform(build):
    src = """int main() {
        v = input();
        switch (v) {
            case 0: a = 1; break;
            case 1: b = 2; break;
            default: c = 3;
        }
        return 0;
    }"""
    _, sdg = build(src)
    head = vertex_by_text(sdg, "switch v")
    for model in (SIMPLE, HEURISTIC):
        for i in range(3):
            assert branch_probability(head, EdgeLabel("case", i, 3), model) \
                == pytest.approx(1.0 / 3.0)


def test_true_false_sum_to_one(build):
    _, sdg = build(POINTERS)
    for text in ("p == NULL", "p != NULL", "!(p)", "p"):
        v = vertex_by_text(sdg, text)
        for model in (SIMPLE, HEURISTIC):
            total = (branch_probability(v, EdgeLabel("true"), model)
                     + branch_probability(v, EdgeLabel("false"), model))
            assert total == pytest.approx(1.0, abs=1e-12)


def test_branch_probability_rejects_bad_input(build):
    _, sdg = build("int main(){ x = input(); if (x > 0) { y = 1; } "
                   "switch (x) { case 0: z = 1; } return 0; }")
    stmt = vertex_by_text(sdg, "y = 1")
    cond = vertex_by_text(sdg, "x > 0")
    head = vertex_by_text(sdg, "switch x")
    with pytest.raises(ValueError):
        branch_probability(stmt, EdgeLabel("true"))
    with pytest.raises(ValueError):
        branch_probability(cond, EdgeLabel("case", 0, 2))
    with pytest.raises(ValueError):
        branch_probability(head, EdgeLabel("true"))


def test_custom_table_feeds_through(build):
    _, sdg = build("int main(){ n = input(); while (n < 9) { n = n + 1; } "
                   "done = 1; return done; }")
    table = dict(HEURISTIC_TABLE, loop_branch=0.95)
    custom = BranchModel("heuristic", table=table)
    assert p_true(sdg, "n < 9", custom) == pytest.approx(0.95)
    assert custom._key() != HEURISTIC._key()
