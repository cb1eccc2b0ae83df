"""Gradual types built from the dynamic type ?, compared through their static extrema."""
from __future__ import annotations

from . import ops
from .subtype import subtype
from .types import (Engine, TAnd, TAny, TArrow, TBasic, TDiff, TDyn, TEmpty, TNot, TOr,
                    TProd, TRef, TType, TWhere, Type, check_contractive, has_dyn)


class _Table:
    def __init__(self):
        self.nodes: list = []
        self.index: dict = {}
        self.ext: dict = {}


def _table(engine: Engine) -> _Table:
    t = engine.caches.get("gradual")
    if t is None:
        t = engine.caches["gradual"] = _Table()
    return t


class GType:
    """Handle on an interned gradual node."""
    __slots__ = ("engine", "id")

    def __init__(self, engine: Engine, id: int):
        self.engine = engine
        self.id = id

    def __eq__(self, other):
        return isinstance(other, GType) and other.id == self.id and other.engine is self.engine

    def __hash__(self):
        return hash(("g", self.id))

    @property
    def node(self):
        return _table(self.engine).nodes[self.id]

    def __or__(self, other):
        return g_or(self, other)

    def __and__(self, other):
        return g_and(self, other)

    def __invert__(self):
        return g_not(self)

    def __str__(self):
        from .syntax import render_type
        return render_type(self)

    def __repr__(self):
        return f"<gradual {self}>"


def _intern(engine, node) -> GType:
    tab = _table(engine)
    i = tab.index.get(node)
    if i is None:
        i = len(tab.nodes)
        tab.nodes.append(node)
        tab.index[node] = i
    return GType(engine, i)


def lift(t, engine: Engine | None = None) -> GType:
    """View a static type as a gradual one (identity on gradual types)."""
    if isinstance(t, GType):
        return t
    return _intern(t.engine, ("static", t.id))


def dyn(engine: Engine) -> GType:
    return _intern(engine, ("dyn",))


def g_prod(a, b) -> GType:
    a, b = lift(a), lift(b)
    return _intern(a.engine, ("prod", a.id, b.id))


def g_arrow(a, b) -> GType:
    a, b = lift(a), lift(b)
    return _intern(a.engine, ("arrow", a.id, b.id))


def g_or(a, b) -> GType:
    a, b = lift(a), lift(b)
    return _intern(a.engine, ("or", a.id, b.id))


def g_not(a) -> GType:
    a = lift(a)
    return _intern(a.engine, ("not", a.id))


def g_and(a, b) -> GType:
    return g_not(g_or(g_not(a), g_not(b)))


def is_static(t) -> bool:
    return isinstance(t, Type)


def build(engine: Engine, e, env: dict | None = None):
    """Build a type expression that may mention ?; static parts stay static."""
    env = env or {}
    if not has_dyn(e) and not any(isinstance(v, GType) for v in env.values()):
        return engine.build(e, env)
    return _build(engine, e, env)


def _build(engine, e, env):
    if isinstance(e, TDyn):
        return dyn(engine)
    if isinstance(e, TRef):
        v = env[e.name]
        return v if isinstance(v, GType) else lift(v)
    if isinstance(e, (TBasic, TEmpty, TAny, TType)) or not _gradual_inside(e, env):
        return lift(engine.build(e, {k: v for k, v in env.items() if isinstance(v, Type)}))
    if isinstance(e, TProd):
        return g_prod(_build(engine, e.left, env), _build(engine, e.right, env))
    if isinstance(e, TArrow):
        return g_arrow(_build(engine, e.dom, env), _build(engine, e.cod, env))
    if isinstance(e, TOr):
        return g_or(_build(engine, e.left, env), _build(engine, e.right, env))
    if isinstance(e, TAnd):
        return g_and(_build(engine, e.left, env), _build(engine, e.right, env))
    if isinstance(e, TDiff):
        return g_and(_build(engine, e.left, env), g_not(_build(engine, e.right, env)))
    if isinstance(e, TNot):
        return g_not(_build(engine, e.arg, env))
    if isinstance(e, TWhere):
        inner = dict(env)
        inner.update(_rec(engine, dict(e.equations), env))
        return _build(engine, e.body, inner)
    raise TypeError(f"not a type expression: {e!r}")


def _gradual_inside(e, env) -> bool:
    if isinstance(e, TDyn):
        return True
    if isinstance(e, TRef):
        return isinstance(env.get(e.name), GType)
    from .types import texpr_children
    return any(_gradual_inside(c, env) for c in texpr_children(e))


def _rec(engine, equations, env):
    order = check_contractive(equations)
    tab = _table(engine)
    holes = {}
    for n in equations:
        tab.nodes.append(None)
        holes[n] = GType(engine, len(tab.nodes) - 1)
    scope = dict(env)
    scope.update(holes)
    bodies = {n: _build(engine, t, scope) for n, t in equations.items()}
    for n in order:
        tab.nodes[holes[n].id] = tab.nodes[bodies[n].id]
    return holes


def extrema(t) -> tuple[Type, Type]:
    """(smallest, largest) static materialization of t."""
    if isinstance(t, Type):
        return t, t
    return _ext(t.engine, t.id, False, {}), _ext(t.engine, t.id, True, {})


def _ext(engine, gid, up: bool, active: dict) -> Type:
    tab = _table(engine)
    key = (gid, up)
    hit = tab.ext.get(key)
    if hit is not None:
        return hit
    if key in active:
        # back-edge: hand out a hole, filled when the outer visit completes
        if active[key] is None:
            active[key] = engine.reserve()
        return active[key]
    active[key] = None
    node = tab.nodes[gid]
    tag = node[0]
    if tag == "dyn":
        out = engine.any() if up else engine.empty()
    elif tag == "static":
        out = Type(engine, node[1])
    elif tag == "prod":
        out = engine.prod(_ext(engine, node[1], up, active), _ext(engine, node[2], up, active))
    elif tag == "arrow":
        out = engine.arrow(_ext(engine, node[1], not up, active),
                           _ext(engine, node[2], up, active))
    elif tag == "or":
        out = engine.or_(_ext(engine, node[1], up, active), _ext(engine, node[2], up, active))
    else:
        out = engine.not_(_ext(engine, node[1], not up, active))
    hole = active.pop(key)
    if hole is not None:
        engine.define(hole, engine.node(out.id))
        out = hole
    tab.ext[key] = out
    return out


def down(t) -> Type:
    return extrema(t)[0]


def up(t) -> Type:
    return extrema(t)[1]


def precision(t1, t2) -> bool:
    """t1 is less precise than t2: t2's interval sits inside t1's."""
    d1, u1 = extrema(t1)
    d2, u2 = extrema(t2)
    return subtype(d1, d2) and subtype(u2, u1)


def gsub(t1, t2) -> bool:
    d1, u1 = extrema(t1)
    d2, u2 = extrema(t2)
    return subtype(d1, d2) and subtype(u1, u2)


def gequiv(t1, t2) -> bool:
    return gsub(t1, t2) and gsub(t2, t1)


def interval(lo: Type, hi: Type) -> GType:
    """The gradual type lo ∨ (? ∧ hi)."""
    return g_or(lo, g_and(dyn(lo.engine), hi))


def gdom(t):
    lo, hi = extrema(t)
    return interval(ops.dom(hi), ops.dom(lo))


def gapply(t, s):
    t_lo, t_hi = extrema(t)
    s_lo, s_hi = extrema(s)
    return interval(ops.apply(t_lo, s_hi), ops.apply(t_hi, s_lo))


def gproj(i: int, t):
    lo, hi = extrema(t)
    return interval(ops.proj(i, lo), ops.proj(i, hi))
