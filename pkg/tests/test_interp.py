"""Reference interpreter and profiling runs."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from elan import (
    CALL_DEPTH_LIMIT,
    RunInput,
    build_sdg,
    interpret,
    parse_program,
    profile,
)

from conftest import vertex_by_text


def run(src, values=(), **kw):
    program = parse_program(src, "run.mc")
    return interpret(program, RunInput.of("t", values), **kw)


def visited_texts(src, values=(), **kw):
    program = parse_program(src, "run.mc")
    sdg = build_sdg(program)
    trace = interpret(program, RunInput.of("t", values), sdg=sdg, **kw)
    return {sdg.vertices[vid].text for vid in trace.visited}, trace


# -- basic evaluation ---------------------------------------------------------

def test_return_value():
    trace = run("int main(){ a = 2; b = 3; return a * b + 1; }")
    assert trace.outcome == "completed"
    assert trace.result == 7


def test_input_consumed_in_order():
    trace = run("int main(){ a = input(); b = input(); return a * 10 + b; }",
                values=(4, 2))
    assert trace.result == 42


def test_exhausted_input_yields_zero():
    trace = run("int main(){ a = input(); b = input(); return a * 10 + b; }",
                values=(7,))
    assert trace.outcome == "completed"
    assert trace.result == 70


@pytest.mark.parametrize("a, b, q, r", [
    (7, 2, 3, 1),
    (-7, 2, -3, -1),     # C semantics: truncate toward zero
    (7, -2, -3, 1),
    (-7, -2, 3, -1),
])
def test_division_truncates_toward_zero(a, b, q, r):
    trace = run(f"int main(){{ return ({a}) / ({b}); }}")
    assert trace.result == q
    trace = run(f"int main(){{ return ({a}) % ({b}); }}")
    assert trace.result == r


def test_division_by_zero_is_runtime_error():
    trace = run("int main(){ a = 1; b = 0; return a / b; }")
    assert trace.outcome == "runtime-error"
    assert "zero" in trace.error
    assert trace.result is None


def test_uninitialized_read_is_runtime_error():
    trace = run("int main(){ return nobody; }")
    assert trace.outcome == "runtime-error"
    assert "nobody" in trace.error


def test_undefined_call_is_runtime_error():
    trace = run("int main(){ x = mystery(); return x; }")
    assert trace.outcome == "runtime-error"
    assert "mystery" in trace.error


def test_arity_mismatch_is_runtime_error():
    trace = run("int f(int a){ return a; } int main(){ return f(1, 2); }")
    assert trace.outcome == "runtime-error"
    assert "f" in trace.error


def test_pointers_are_null_and_branch_accordingly():
    src = """int main(int* p) {
        if (p == NULL) { a = 1; } else { a = 2; }
        return a;
    }"""
    assert run(src).result == 1


def test_entry_parameters_default_to_zero():
    assert run("int main(int a, int b){ return a + b + 5; }").result == 5


def test_call_depth_limit():
    trace = run("int spin(int n){ r = spin(n + 1); return r; } "
                "int main(){ x = spin(0); return x; }")
    assert trace.outcome == "runtime-error"
    assert "depth" in trace.error
    assert CALL_DEPTH_LIMIT == 200


def test_step_limit_aborts_infinite_loop():
    trace = run("int main(){ x = 1; while (x > 0) { x = x + 1; } return 0; }",
                step_limit=500)
    assert trace.outcome == "step-limit"
    assert trace.steps <= 500


# -- control flow and traces --------------------------------------------------

def test_branch_marks_only_taken_side():
    src = ("int main(){ x = input(); "
           "if (x > 0) { t = 1; } else { e = 2; } return 0; }")
    texts, _ = visited_texts(src, values=(5,))
    assert "t = 1" in texts and "e = 2" not in texts
    texts, _ = visited_texts(src, values=(-5,))
    assert "e = 2" in texts and "t = 1" not in texts


def test_short_circuit_marks_evaluated_leaves_only():
    src = ("int main(){ a = input(); b = input(); "
           "if (a > 0 || b > 0) { t = 1; } return 0; }")
    texts, _ = visited_texts(src, values=(5, 5))
    assert "a > 0" in texts and "b > 0" not in texts
    texts, _ = visited_texts(src, values=(-5, 5))
    assert "a > 0" in texts and "b > 0" in texts


def test_negated_compound_condition_value():
    src = ("int main(){ a = input(); c = input(); "
           "if (!(a > 2) || c == 1) { t = 1; } return t; }")
    assert run(src, values=(1, 0)).result == 1    # !(1>2) is true
    assert run(src, values=(5, 1)).result == 1    # second leaf saves it
    trace = run(src, values=(5, 0))
    assert trace.outcome == "runtime-error"       # t never assigned


def test_while_loop_iterates():
    src = """int main() {
        n = input();
        total = 0;
        while (n > 0) {
            total = total + n;
            n = n - 1;
        }
        return total;
    }"""
    assert run(src, values=(4,)).result == 10
    assert run(src, values=(0,)).result == 0


def test_for_loop_semantics():
    src = """int main() {
        s = 0;
        for (i = 0; i < 5; i = i + 1) {
            s = s + i;
        }
        return s;
    }"""
    assert run(src).result == 10


def test_break_leaves_innermost_loop_skipping_step():
    src = """int main() {
        hits = 0;
        for (i = 0; i < 10; i = i + 1) {
            if (i == 3) { break; }
            hits = hits + 1;
        }
        return hits * 100 + i;
    }"""
    # break skips the step clause: i stays 3
    assert run(src).result == 303


def test_nested_loop_break_is_inner_only():
    src = """int main() {
        count = 0;
        for (i = 0; i < 3; i = i + 1) {
            while (1) {
                break;
            }
            count = count + 1;
        }
        return count;
    }"""
    assert run(src).result == 3


def test_switch_dispatch_and_fall_through():
    src = """int main() {
        v = input();
        r = 0;
        switch (v) {
            case 0: r = r + 1;
            case 1: r = r + 10; break;
            case 2: r = r + 100; break;
            default: r = r + 1000;
        }
        return r;
    }"""
    assert run(src, values=(0,)).result == 11     # falls into case 1
    assert run(src, values=(1,)).result == 10
    assert run(src, values=(2,)).result == 100
    assert run(src, values=(9,)).result == 1000


def test_switch_without_default_skips_body():
    src = """int main() {
        v = input();
        r = 5;
        switch (v) {
            case 0: r = 1; break;
        }
        return r;
    }"""
    assert run(src, values=(3,)).result == 5


def test_break_inside_switch_does_not_break_loop():
    src = """int main() {
        total = 0;
        for (i = 0; i < 3; i = i + 1) {
            switch (i) {
                case 0: total = total + 1; break;
                default: total = total + 10;
            }
        }
        return total;
    }"""
    assert run(src).result == 21


def test_void_function_call():
    src = """void ping(int v) {
        got = v;
    }
    int main() {
        ping(3);
        return 0;
    }"""
    trace = run(src)
    assert trace.outcome == "completed"


def test_call_marks_callee_body():
    src = """int helper(int v) {
        inner = v + 1;
        return inner;
    }
    int main() {
        x = helper(1);
        return x;
    }"""
    texts, trace = visited_texts(src)
    assert "inner = v + 1" in texts
    assert "entry helper" in texts
    assert trace.result == 2


def test_partial_trace_survives_error():
    src = """int main() {
        a = 1;
        b = a / 0;
        never = 2;
        return never;
    }"""
    texts, trace = visited_texts(src)
    assert trace.outcome == "runtime-error"
    assert "a = 1" in texts
    assert "never = 2" not in texts


def test_steps_count_statements_and_leaves():
    # 4 statements (assign, if, assign, return) + 1 condition leaf
    trace = run("int main(){ x = input(); if (x > 0) { y = 1; } return 0; }",
                values=(1,))
    assert trace.steps == 5


# -- profiling ----------------------------------------------------------------

def test_profile_fractions_match_hand_count():
    src = """int main() {
        x = input();
        if (x > 0) { pos = 1; } else { neg = 1; }
        return 0;
    }"""
    program = parse_program(src, "p.mc")
    sdg = build_sdg(program)
    inputs = [RunInput.of(f"r{i}", (v,)) for i, v in
              enumerate((5, 3, -2, 8))]
    data = profile(program, inputs, sdg=sdg)
    assert data.run_count == 4
    assert data.completed_runs == 4
    pos = vertex_by_text(sdg, "pos = 1")
    neg = vertex_by_text(sdg, "neg = 1")
    cond = vertex_by_text(sdg, "x > 0")
    assert data.fractions[pos.id] == pytest.approx(0.75)
    assert data.fractions[neg.id] == pytest.approx(0.25)
    assert data.fractions[cond.id] == pytest.approx(1.0)
    assert data.fractions[sdg.entry.id] == pytest.approx(1.0)


def test_profile_line_fractions():
    src = ("int main() {\n"
           "    x = input();\n"
           "    if (x > 0) { pos = 1; }\n"
           "    return 0;\n"
           "}\n")
    program = parse_program(src, "p.mc")
    data = profile(program, [RunInput.of("a", (1,)), RunInput.of("b", (-1,))])
    assert data.line_fractions["p.mc:2"] == pytest.approx(1.0)
    assert data.line_fractions["p.mc:4"] == pytest.approx(1.0)
    # line 3 holds the condition (always run); the branch body runs in half
    assert data.line_fractions["p.mc:3"] == pytest.approx(1.0)


def test_profile_counts_aborted_runs_in_denominator():
    src = """int main() {
        x = input();
        if (x == 0) { y = 1 / x; }
        done = 1;
        return done;
    }"""
    program = parse_program(src, "p.mc")
    sdg = build_sdg(program)
    inputs = [RunInput.of("ok", (2,)), RunInput.of("boom", (0,))]
    data = profile(program, inputs, sdg=sdg)
    assert data.completed_runs == 1
    assert data.error_runs == 1
    assert data.errors and "boom" in data.errors[0]
    done = vertex_by_text(sdg, "done = 1")
    assert data.fractions[done.id] == pytest.approx(0.5)


def test_profile_requires_inputs():
    program = parse_program("int main(){ return 0; }", "p.mc")
    with pytest.raises(ValueError):
        profile(program, [])


def test_profile_step_limit_runs_counted():
    src = "int main(){ x = 1; while (x > 0) { x = x + 1; } return 0; }"
    program = parse_program(src, "p.mc")
    data = profile(program, [RunInput.of("spin", ())], step_limit=200)
    assert data.step_limit_runs == 1
    assert data.completed_runs == 0


@settings(max_examples=20, deadline=None)
@given(values=st.lists(st.integers(min_value=-3, max_value=3),
                       min_size=2, max_size=2))
def test_interpreter_agrees_with_python_semantics(values):
    src = """int main() {
        a = input();
        b = input();
        if (a > b && b != 0) { r = a / b; } else { r = a - b; }
        return r;
    }"""
    a, b = values
    if a > b and b != 0:
        expected = int(a / b)   # trunc division
    else:
        expected = a - b
    assert run(src, values=values).result == expected
