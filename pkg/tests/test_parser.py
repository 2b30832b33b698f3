"""Frontend tests: lexing, parsing, spans, condition decomposition."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from elan import microc as mc
from elan import ParseError, parse_program

from genprog import generate_source


def test_minimal_program():
    program = parse_program("int main(){ return 0; }", "m.mc")
    assert [f.name for f in program.functions] == ["main"]
    (ret,) = program.functions[0].body
    assert isinstance(ret, mc.Return)
    assert isinstance(ret.value, mc.IntLit) and ret.value.value == 0


def test_two_leaf_condition():
    program = parse_program(
        "int main(){ x = input(); y = input(); "
        "if (x > 1 || y < 3) { z = 1; } return z; }", "m.mc")
    stmt = program.functions[0].body[2]
    assert isinstance(stmt, mc.If)
    leaves = mc.decompose_condition(stmt.cond)
    assert len(leaves) == 2
    assert isinstance(leaves[0].node, mc.Comparison)
    assert leaves[0].node.op == ">" and not leaves[0].negated
    assert leaves[1].node.op == "<" and not leaves[1].negated


def test_not_pushed_to_leaves():
    program = parse_program(
        "int main(int* p){ n = input(); "
        "if (!(p == NULL) && n <= 0) { x = 1; } return 0; }", "m.mc")
    stmt = program.functions[0].body[1]
    leaves = mc.decompose_condition(stmt.cond)
    assert [leaf.negated for leaf in leaves] == [True, False]
    assert leaves[0].node.op == "=="
    assert leaves[1].node.op == "<="


def test_double_negation_cancels():
    program = parse_program(
        "int main(){ a = input(); if (!(!(a > 0))) { b = 1; } return 0; }",
        "m.mc")
    stmt = program.functions[0].body[1]
    (leaf,) = mc.decompose_condition(stmt.cond)
    assert not leaf.negated


def test_decompose_preserves_leaf_count():
    program = parse_program(
        "int main(){ a = input(); b = input(); c = input(); "
        "if (!(a > 0 && b > 0) || c == 1) { x = 1; } return 0; }", "m.mc")
    stmt = program.functions[0].body[3]
    leaves = mc.decompose_condition(stmt.cond)
    assert len(leaves) == 3
    # De Morgan: negation lands on both conjuncts, not the disjunct
    assert [leaf.negated for leaf in leaves] == [True, True, False]


def test_spans_cover_statements():
    src = "int main() {\n    x = input();\n    if (x > 0) {\n        y = 1;\n    }\n    return 0;\n}\n"
    program = parse_program(src, "span.mc")
    assign = program.functions[0].body[0]
    assert assign.span.file == "span.mc"
    assert assign.span.line_start == 2
    cond = program.functions[0].body[1].cond
    assert cond.span.line_start == 3


def test_truthiness_condition():
    program = parse_program(
        "int main(){ x = input(); if (x) { y = 1; } return 0; }", "m.mc")
    (leaf,) = mc.decompose_condition(program.functions[0].body[1].cond)
    assert isinstance(leaf.node, mc.Truthy)


def test_else_if_chain():
    src = """int main() {
        x = input();
        if (x > 2) { r = 2; }
        else if (x > 1) { r = 1; }
        else { r = 0; }
        return r;
    }"""
    program = parse_program(src, "m.mc")
    outer = program.functions[0].body[1]
    assert isinstance(outer, mc.If)
    (inner,) = outer.else_body
    assert isinstance(inner, mc.If)
    assert inner.else_body


def test_for_loop_shape():
    program = parse_program(
        "int main(){ for (i = 0; i < 3; i = i + 1) { s = i; } return 0; }",
        "m.mc")
    loop = program.functions[0].body[0]
    assert isinstance(loop, mc.For)
    assert isinstance(loop.init, mc.Assign)
    assert isinstance(loop.step, mc.Assign)


def test_switch_shape_and_negative_labels():
    src = """int main() {
        v = input();
        switch (v) {
            case -1: a = 1; break;
            case 2: b = 2;
            default: c = 3;
        }
        return 0;
    }"""
    program = parse_program(src, "m.mc")
    sw = program.functions[0].body[1]
    assert isinstance(sw, mc.Switch)
    assert [case.value for case in sw.cases] == [-1, 2]
    assert sw.default is not None


@pytest.mark.parametrize("src, fragment", [
    ("int main(){ break; }", "break"),
    ("int main(){ return 0; } int main(){ return 1; }", "duplicate function"),
    ("int main(){ switch (1) { } }", "case"),
    ("int main(){ switch (1) { case 0: a = 1; case 0: b = 2; } }",
     "duplicate case"),
    ("int main(){ x = 1 < 2; }", "condition"),
    ("int main(){ if (a < b < c) { x = 1; } }", "chain"),
    ("int input(){ return 0; }", "reserved"),
    ("int main(){ x = input(7); }", "argument"),
    ("int main(){ switch (1) { default: a = 1; case 0: b = 2; } }",
     "after all cases"),
    ("int main(){ if (x > ) { } }", ""),
    ("int f(){ return 0; }", ""),   # fine: missing main is not a parse error
])
def test_parse_errors(src, fragment):
    if fragment == "" and "int f()" in src:
        parse_program(src, "e.mc")   # should not raise
        return
    with pytest.raises(ParseError) as err:
        parse_program(src, "e.mc")
    assert fragment.lower() in str(err.value).lower()
    assert "e.mc:" in str(err.value)


def test_error_carries_position():
    with pytest.raises(ParseError) as err:
        parse_program("int main() {\n    x = ;\n}", "pos.mc")
    assert err.value.line == 2
    assert err.value.col > 0


def test_break_inside_switch_is_legal():
    parse_program(
        "int main(){ switch (1) { case 0: break; } return 0; }", "m.mc")


def test_comments_ignored():
    program = parse_program(
        "// header\nint main(){ x = 1; // trailing\n return x; }", "m.mc")
    assert len(program.functions[0].body) == 2


def test_uids_are_unique_and_deterministic():
    src = "int main(){ a = input(); if (a > 0) { b = 1; } return 0; }"
    p1 = parse_program(src, "m.mc")
    p2 = parse_program(src, "m.mc")
    uids1 = [n.uid for n in mc.walk(p1)]
    uids2 = [n.uid for n in mc.walk(p2)]
    assert uids1 == uids2
    assert len(set(uids1)) == len(uids1)


def test_round_trip_fixed_program():
    src = """int helper(int v) {
    if (v < 0 && v != -3) {
        return 0 - v;
    }
    return v;
}

int main() {
    x = input();
    s = 0;
    for (i = 0; i < 3; i = i + 1) {
        s = s + helper(x);
    }
    switch (s % 2) {
        case 0:
            s = s + 1;
            break;
        default:
            s = 0;
    }
    while (s > 10) {
        s = s - 2;
    }
    return s;
}
"""
    p1 = parse_program(src, "rt.mc")
    printed = mc.format_program(p1)
    p2 = parse_program(printed, "rt.mc")
    assert mc.ast_equal(p1, p2)
    # printing is a fixpoint after one normalization pass
    assert mc.format_program(p2) == printed


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(min_value=0, max_value=10_000),
       single=st.booleans())
def test_round_trip_generated_programs(seed, single):
    src = generate_source(seed, n_helpers=2, budget=6,
                          single_call_site=single)
    p1 = parse_program(src, "gen.mc")
    printed = mc.format_program(p1)
    p2 = parse_program(printed, "gen.mc")
    assert mc.ast_equal(p1, p2)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(min_value=0, max_value=10_000))
def test_decomposition_matches_walk_count(seed):
    src = generate_source(seed, n_helpers=2, budget=6)
    program = parse_program(src, "gen.mc")
    for fn in program.functions:
        for node in mc.walk(fn):
            if isinstance(node, mc.If):
                leaves = mc.decompose_condition(node.cond)
                simple = [n for n in mc.walk(node.cond)
                          if isinstance(n, (mc.Comparison, mc.Truthy))]
                assert len(leaves) == len(simple)
                assert [l.node for l in leaves] == simple
