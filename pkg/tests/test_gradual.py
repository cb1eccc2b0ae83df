import random

import pytest
from hypothesis import given

from helpers import gradual_types, random_gradual, types
from stt import gradual as g
from stt.ops import NotAFunctionType
from stt.subtype import equiv, subtype
from stt.syntax import T, parse_type, render_type


def G(s):
    return parse_type(s)


def test_pinned_extrema():
    lo, hi = g.extrema(G("?"))
    assert equiv(lo, T("Empty")) and equiv(hi, T("Any"))
    lo, hi = g.extrema(G("? -> ?"))
    assert equiv(lo, T("Any -> Empty")) and equiv(hi, T("Empty -> Any"))
    lo, hi = g.extrema(G("? & (Int | Bool)"))
    assert equiv(lo, T("Empty")) and equiv(hi, T("Int | Bool"))


def test_polarity_through_negation_and_products():
    lo, hi = g.extrema(G("~?"))
    assert equiv(lo, T("Empty")) and equiv(hi, T("Any"))
    lo, hi = g.extrema(G("(?, Int) -> ?"))
    assert equiv(lo, T("(Any, Int) -> Empty")) and equiv(hi, T("(Empty, Int) -> Any"))


def test_static_types_are_their_own_extrema():
    t = T("(Int -> Bool) | String")
    assert g.extrema(t) == (t, t)


def test_precision_examples():
    assert g.precision(G("? -> (?, ?)"), G("Int -> (?, Bool)"))
    assert g.precision(G("Int | ?"), G("Bool | Int"))
    assert not g.precision(G("Int -> Int"), G("? -> Int"))


def test_gsub_examples():
    assert g.gsub(G("?"), T("Any"))
    assert g.gsub(T("Empty"), G("?"))
    assert not g.gsub(G("?"), T("Int"))


def test_recursive_gradual_type():
    t = G("type L = (?, L) | `nil\nL")
    lo, hi = g.extrema(t)
    assert equiv(hi, T("type M = (Any, M) | `nil\nM"))
    assert equiv(lo, T("`nil"))


def test_gradual_operators():
    assert g.gequiv(g.gapply(T("Int -> Int"), T("Int")), T("Int"))
    t = G("(Int -> Int) & (? & (Int | Bool) -> Bool)")
    d = g.gdom(t)
    assert g.gsub(t, g.g_arrow(d, T("Any")))
    p = g.gproj(1, G("(?, Int)"))
    assert g.gequiv(p, G("?"))


def test_gdom_of_dyn_has_no_function_upper_bound():
    # the upper extremum of ? is Any, which is not a function type, so no
    # gradual domain exists: no t' satisfies ? <= t' -> Any
    with pytest.raises(NotAFunctionType):
        g.gdom(G("?"))
    for t in ["Any", "Int", "Empty", "Int | Bool"]:
        assert not g.gsub(G("?"), g.g_arrow(T(t), T("Any")))


@given(gradual_types())
def test_interval_identity(t):
    lo, hi = g.extrema(t)
    assert g.gequiv(t, g.interval(lo, hi))


@given(gradual_types(), types())
def test_sandwich(t, s):
    lo, hi = g.extrema(t)
    assert g.precision(t, s) == (subtype(lo, s) and subtype(s, hi))


@given(types())
def test_static_gsub_is_subtyping(t):
    assert g.gsub(t, T("Int | Bool")) == subtype(t, T("Int | Bool"))


def test_preorders_on_random_triples():
    rng = random.Random(31)
    for _ in range(300):
        a, b, c = (random_gradual(rng, 2) for _ in range(3))
        for rel in (g.precision, g.gsub):
            assert rel(a, a)
            if rel(a, b) and rel(b, c):
                assert rel(a, c)


def test_materializations_sit_between_extrema():
    rng = random.Random(32)
    for _ in range(200):
        t, u = random_gradual(rng, 2), random_gradual(rng, 2)
        if g.precision(t, u):
            lo, hi = g.extrema(t)
            assert g.gsub(lo, u) and g.gsub(u, hi)


def test_render_keeps_dyn():
    assert "?" in render_type(G("? -> Int"))
