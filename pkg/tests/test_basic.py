from hypothesis import given, strategies as st

from stt.basic import (ALL_BASIC, BOOL_SET, EMPTY_SET, INT_SET, STRING_SET, Atom, BasicSet,
                       Cof, Const, const_kind, render_const)

SAMPLES = [-7, -1, 0, 1, 2, 5, 100, True, False, "", "a", "b", Atom("A"), Atom("B")]

leaf = st.one_of(
    st.sampled_from(SAMPLES).map(BasicSet.of),
    st.tuples(st.integers(-5, 5), st.integers(-5, 5)).map(lambda p: BasicSet.interval(*p)),
    st.sampled_from([EMPTY_SET, INT_SET, BOOL_SET, STRING_SET, ALL_BASIC]))


def _ops(children):
    return st.one_of(
        st.tuples(children, children).map(lambda p: p[0].union(p[1])),
        st.tuples(children, children).map(lambda p: p[0].inter(p[1])),
        st.tuples(children, children).map(lambda p: p[0].diff(p[1])),
        children.map(lambda s: s.comp()))


sets = st.recursive(leaf, _ops, max_leaves=6)


def test_bool_is_not_int():
    assert const_kind(True) == "bool" and const_kind(1) == "int"
    assert Const(True) != Const(1)
    assert not INT_SET.contains(True)
    assert BOOL_SET.contains(False)


def test_render_const_escapes():
    assert render_const('a"b') == '"a\\"b"'
    assert render_const(False) == "false"
    assert str(Const(Atom("x"))) == "`x"


def test_intervals_merge_adjacent():
    s = BasicSet.interval(1, 3).union(BasicSet.interval(4, 6))
    assert s.ints == ((1, 6),)
    assert BasicSet.interval(5, 2).is_empty()


def test_complement_of_finite_strings_is_cofinite():
    s = BasicSet.of("a").comp()
    assert s.strs == Cof(True, frozenset({"a"}))
    assert s.contains("b") and not s.contains("a")


@given(sets, sets)
def test_membership_is_boolean(a, b):
    for x in SAMPLES:
        assert a.union(b).contains(x) == (a.contains(x) or b.contains(x))
        assert a.inter(b).contains(x) == (a.contains(x) and b.contains(x))
        assert a.diff(b).contains(x) == (a.contains(x) and not b.contains(x))
        assert a.comp().contains(x) == (not a.contains(x))


@given(sets)
def test_canonical_forms(a):
    assert a.comp().comp() == a
    assert a.inter(a.comp()).is_empty()
    assert a.union(a.comp()) == ALL_BASIC
