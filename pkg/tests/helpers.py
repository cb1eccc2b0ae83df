"""Random generators and small utilities shared by the test modules."""
from __future__ import annotations

import random

from hypothesis import strategies as st

from stt.syntax import parse_type
from stt.types import ENGINE

LEAVES = ["Int", "Bool", "true", "false", "0", "1", "3--5", "String", '"a"', "`A", "Any",
          "Empty"]
UNIVERSE_LEAVES = ["0", "1", "true", "Any", "Empty"]

_BINARY = ["({} | {})", "({} & {})", "({} \\ {})", "({}, {})", "({} -> {})"]


def type_text(rng: random.Random, depth: int, leaves=LEAVES, dyn: bool = False) -> str:
    """Random surface text of a non-recursive type of bounded depth."""
    pool = leaves + (["?"] if dyn else [])
    if depth <= 0 or rng.random() < 0.25:
        return rng.choice(pool)
    if rng.random() < 0.15:
        return f"~{type_text(rng, depth - 1, leaves, dyn)}"
    form = rng.choice(_BINARY)
    return form.format(type_text(rng, depth - 1, leaves, dyn),
                       type_text(rng, depth - 1, leaves, dyn))


def random_type(rng, depth=3, leaves=LEAVES, engine=ENGINE):
    return parse_type(type_text(rng, depth, leaves), engine)


def random_gradual(rng, depth=3, engine=ENGINE):
    return parse_type(type_text(rng, depth, LEAVES, dyn=True), engine)


def random_arrow_type(rng, engine=ENGINE, max_arrows=3, depth=1):
    """An intersection of arrows, possibly joined with a second intersection."""
    def inter():
        n = rng.randint(1, max_arrows)
        return " & ".join(f"({type_text(rng, depth)} -> {type_text(rng, depth)})"
                          for _ in range(n))
    text = inter() if rng.random() < 0.7 else f"({inter()}) | ({inter()})"
    return parse_type(text, engine)


def _combine(children):
    return st.one_of(
        st.tuples(st.sampled_from(_BINARY), children, children).map(
            lambda t: t[0].format(t[1], t[2])),
        children.map(lambda c: f"~{c}"))


def type_texts(leaves=LEAVES, dyn=False, max_leaves=8):
    pool = leaves + (["?"] if dyn else [])
    return st.recursive(st.sampled_from(pool), _combine, max_leaves=max_leaves)


def types(leaves=LEAVES, max_leaves=8, engine=ENGINE):
    return type_texts(leaves, max_leaves=max_leaves).map(lambda s: parse_type(s, engine))


def gradual_types(max_leaves=8, engine=ENGINE):
    return type_texts(dyn=True, max_leaves=max_leaves).map(lambda s: parse_type(s, engine))


# -- values

from stt.basic import Atom, Const  # noqa: E402
from stt.terms import Abs, Pair, Var  # noqa: E402

CONSTS = [0, 1, 2, -3, 42, True, False, "", "a", Atom("A"), Atom("nil")]


def random_value(rng: random.Random, depth: int = 2, engine=ENGINE):
    """A closed well-typed value: constant, pair, or identity-like abstraction."""
    roll = rng.random()
    if depth <= 0 or roll < 0.45:
        return Const(rng.choice(CONSTS))
    if roll < 0.75:
        return Pair(random_value(rng, depth - 1, engine), random_value(rng, depth - 1, engine))
    iface = []
    for _ in range(rng.randint(1, 2)):
        s = random_type(rng, 1, engine=engine)
        iface.append((s, s | random_type(rng, 1, engine=engine)))
    return Abs(tuple(iface), "x", Var("x"))


def small_values():
    """Every value built from a few constants, pairs of them, and two abstractions."""
    base = [Const(c) for c in (0, 1, True, "a", Atom("nil"))]
    funs = [Abs(((parse_type("Int"), parse_type("Int")),), "x", Var("x")),
            Abs(((parse_type("Bool"), parse_type("Bool")),), "x", Var("x"))]
    level = base + funs
    return level + [Pair(a, b) for a in level for b in level]


# -- source terms for the sharing transformation

from stt.terms import App as _App, Prim as _Prim, Proj as _Proj, SAbs, SCase  # noqa: E402


def random_source(rng: random.Random, depth: int = 4, scope=("a", "b"), pool=None):
    """A random unannotated term; repeats earlier subterms so sharing kicks in."""
    pool = pool if pool is not None else []
    if pool and rng.random() < 0.15:
        return rng.choice(pool)
    if depth <= 0 or rng.random() < 0.2:
        if rng.random() < 0.5:
            return Var(rng.choice(scope))
        return Const(rng.choice(CONSTS))
    d = depth - 1
    roll = rng.randrange(6)
    if roll == 0:
        x = rng.choice(["x", "y", "z"])
        e = SAbs(x, random_source(rng, d, scope + (x,), pool))
    elif roll == 1:
        e = _App(random_source(rng, d, scope, pool), random_source(rng, d, scope, pool))
    elif roll == 2:
        e = Pair(random_source(rng, d, scope, pool), random_source(rng, d, scope, pool))
    elif roll == 3:
        e = _Proj(rng.choice([1, 2]), random_source(rng, d, scope, pool))
    elif roll == 4:
        e = SCase(random_source(rng, d, scope, pool), random_type(rng, 1),
                  random_source(rng, d, scope, pool), random_source(rng, d, scope, pool))
    else:
        e = _Prim(rng.choice(["add", "concat", "eq"]),
                  (random_source(rng, d, scope, pool), random_source(rng, d, scope, pool)))
    if not isinstance(e, SAbs):
        pool.append(e)
    return e
