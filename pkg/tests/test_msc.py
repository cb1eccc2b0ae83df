import random

import pytest

from helpers import random_source
from stt.msc import (AAbs, ACase, AApp, AnnotationRejected, Failure, MBind, MscError, Row,
                     alpha_equiv, binding_sources, bindings, check_annotated,
                     check_msc_invariants, infer_annotations, render_form, render_rows, split,
                     to_msc, unwind, walk_binders, with_annotations)
from stt.subtype import equiv
from stt.syntax import T, parse_expr, parse_program

SHARED = """val a1 : (Int -> Int) & (String -> String)
val a2 : Int | String
case a1 a2 in Int ? a2 + 1 : (a1 a2) @ a2"""


def src(text):
    return parse_program(text, mode="src").expr


def test_shared_application_is_bound_once():
    k = to_msc(src(SHARED))
    got = binding_sources(k)
    assert len(got) == 6
    expected = ["a1", "a2", "a1 a2", "a2 + 1", "(a1 a2) @ a2",
                "case a1 a2 in Int ? a2 + 1 : (a1 a2) @ a2"]
    header = SHARED.rsplit("\n", 1)[0] + "\n"
    for (_, term), text in zip(got, expected):
        assert alpha_equiv(term, src(header + text))
    # the case and the concatenation refer to the same application variable
    names = {n: b for n, b in zip([n for n, _ in got], bindings(k))}
    app = [n for n, b in names.items() if isinstance(b.atom, AApp)]
    assert len(app) == 1
    case = bindings(k)[-1].atom
    assert isinstance(case, ACase) and case.scrutinee == app[0]
    assert app[0] in bindings(k)[4].atom.operands
    assert check_msc_invariants(k) == []


def test_post_order_names():
    k = to_msc(src(SHARED))
    assert [b.name for b in bindings(k)] == [f"x{i}" for i in range(1, 7)]


def test_bindings_live_in_the_innermost_abstraction_they_need():
    k = to_msc(src("fun x -> fun y -> (x + 1, y + 1)"))
    outer = bindings(k)[-1].atom
    assert isinstance(outer, AAbs)
    inner_bind = bindings(outer.body)
    # x + 1 only mentions x, so it sits in the outer body, not the inner one
    assert any(isinstance(b.atom, AAbs) for b in inner_bind)
    assert any(getattr(b.atom, "op", None) == "add" for b in inner_bind)
    assert check_msc_invariants(k) == []


def test_core_only_forms_are_rejected():
    with pytest.raises(MscError):
        to_msc(parse_expr("fun (Int -> Int) x -> x"))


def test_round_trip_random_terms():
    rng = random.Random(8)
    for _ in range(300):
        e = random_source(rng)
        k = to_msc(e)
        assert alpha_equiv(unwind(k), e)
        assert check_msc_invariants(k) == []


def test_shared_annotations_check():
    eng = T("Int").engine
    k = to_msc(src(SHARED))
    r = lambda t, **env: Row(tuple((n, T(s)) for n, s in env.items()), T(t))  # noqa: E731
    rows = {
        "x1": [r("(Int -> Int) & (String -> String)")],
        "x2": [r("Int"), r("String")],
        "x3": [r("Int", x2="Int"), r("String", x2="String")],
        "x4": [r("Int", x2="Int", x3="Int")],
        "x5": [r("String", x2="String", x3="String")],
        "x6": [r("Int | String")],
    }
    annotated = with_annotations(k, rows)
    assert equiv(check_annotated({}, annotated, eng), T("Int | String"))


def test_rows_without_environments_are_rejected():
    # unconditional rows claim x2 + 1 : Int even when x2 : String
    k = to_msc(src(SHARED))
    r = lambda t, **env: Row(tuple((n, T(s)) for n, s in env.items()), T(t))  # noqa: E731
    rows = {"x1": [r("(Int -> Int) & (String -> String)")], "x2": [r("Int"), r("String")],
            "x3": [r("Int", x2="Int"), r("String", x2="String")], "x4": [r("Int")],
            "x5": [r("String")], "x6": [r("Int | String")]}
    with pytest.raises(AnnotationRejected):
        check_annotated({}, with_annotations(k, rows), T("Int").engine)


def test_inference_on_shared_application():
    res = infer_annotations(to_msc(src(SHARED)))
    assert equiv(res.type, T("Int | String"))
    rows = {b.name: b.ann for b in walk_binders(res.form) if isinstance(b, MBind)}
    assert sorted(str(r.type) for r in rows["x2"]) == ["Int", "String"]
    x3 = {(tuple((n, str(t)) for n, t in r.env), str(r.type)) for r in rows["x3"]}
    assert x3 == {((("x2", "Int"),), "Int"), ((("x2", "String"),), "String")}
    assert res.passes >= 2


def test_inference_without_annotations():
    res = infer_annotations(to_msc(src("fun x -> if x then false else true")))
    assert equiv(res.type, T("(true -> false) & (false -> true)"))
    res = infer_annotations(to_msc(src("fun x -> case x in Int ? x + 1 : not x")))
    assert equiv(res.type, T("(Int -> Int) & (Bool -> Bool)"))
    res = infer_annotations(to_msc(src("fun x -> case x in false ? true : false")))
    assert equiv(res.type, T("(false -> true) & (~false -> false)"))


def test_inference_results_recheck():
    res = infer_annotations(to_msc(src("fun x -> fun y -> (x + 1, not y)")))
    assert equiv(check_annotated({}, res.form, T("Int").engine), res.type)


def test_inference_failure_is_reported():
    with pytest.raises(Failure) as info:
        infer_annotations(to_msc(src('(fun x -> x + 1) "s"')))
    assert info.value.diagnostics


def test_split_drops_empty_pieces():
    parts = split(T("Int | String"), [T("Int")])
    assert sorted(map(str, parts)) == ["Int", "String"]
    assert split(T("Empty"), [T("Int")]) == [T("Empty")]


def test_rendering():
    r = Row((("x2", T("Int")),), T("Int"))
    assert render_rows([r, Row((), T("String"))]) == "{[x2: Int] Int; String}"
    text = render_form(infer_annotations(to_msc(src(SHARED))).form)
    assert text.splitlines()[0] == "bind x1 : {(Int -> Int) & (String -> String)} = a1 in"
