"""Interned regular types and their kind-separated normal forms."""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product as _cartesian

from .basic import (ALL_BASIC, ATOM_SET, BOOL_SET, EMPTY_SET, INT_SET, STRING_SET,
                    BasicSet, Const)


class ContractivityViolation(ValueError):
    """A recursive definition loops through unions and negations only."""


class UnboundTypeName(ValueError):
    pass


# ---------------------------------------------------------------- type expressions
# Surface-level descriptions of types, turned into interned nodes by Engine.build.

@dataclass(frozen=True)
class TBasic:
    set: BasicSet


@dataclass(frozen=True)
class TEmpty:
    pass


@dataclass(frozen=True)
class TAny:
    pass


@dataclass(frozen=True)
class TDyn:
    pass


@dataclass(frozen=True)
class TProd:
    left: object
    right: object


@dataclass(frozen=True)
class TArrow:
    dom: object
    cod: object


@dataclass(frozen=True)
class TOr:
    left: object
    right: object


@dataclass(frozen=True)
class TAnd:
    left: object
    right: object


@dataclass(frozen=True)
class TDiff:
    left: object
    right: object


@dataclass(frozen=True)
class TNot:
    arg: object


@dataclass(frozen=True)
class TRef:
    name: str


@dataclass(frozen=True)
class TWhere:
    """`body where X = t1 and Y = t2`: local recursive equations."""
    body: object
    equations: tuple  # of (name, texpr)


@dataclass(frozen=True)
class TType:
    """An already-built type embedded in an expression."""
    type: object


_GUARDS = (TProd, TArrow)


def texpr_children(e):
    if isinstance(e, (TProd, TOr, TAnd, TDiff)):
        return (e.left, e.right)
    if isinstance(e, TArrow):
        return (e.dom, e.cod)
    if isinstance(e, TNot):
        return (e.arg,)
    if isinstance(e, TWhere):
        return (e.body,) + tuple(t for _, t in e.equations)
    return ()


def has_dyn(e) -> bool:
    if isinstance(e, TDyn):
        return True
    return any(has_dyn(c) for c in texpr_children(e))


def unguarded_refs(e) -> set[str]:
    """Names reachable from e without crossing a product or arrow."""
    if isinstance(e, TRef):
        return {e.name}
    if isinstance(e, _GUARDS):
        return set()
    out = set()
    for c in texpr_children(e):
        out |= unguarded_refs(c)
    return out


def check_contractive(equations: dict) -> list[str]:
    """Return names in dependency order; raise on an unguarded cycle."""
    deps = {n: unguarded_refs(t) & equations.keys() for n, t in equations.items()}
    order, state = [], {}

    def visit(n, path):
        st = state.get(n)
        if st == "done":
            return
        if st == "active":
            cycle = path[path.index(n):] + [n]
            raise ContractivityViolation("unguarded recursion: " + " -> ".join(cycle))
        state[n] = "active"
        for m in sorted(deps[n]):
            visit(m, path + [n])
        state[n] = "done"
        order.append(n)

    for n in sorted(equations):
        visit(n, [])
    return order


# ---------------------------------------------------------------- interned types

class Type:
    """Handle on an interned node; cheap to copy, compares by identity of node id."""
    __slots__ = ("engine", "id")

    def __init__(self, engine: Engine, id: int):
        self.engine = engine
        self.id = id

    def __eq__(self, other):
        return isinstance(other, Type) and other.id == self.id and other.engine is self.engine

    def __hash__(self):
        return hash(self.id)

    def __lt__(self, other):
        return self.id < other.id

    def __or__(self, other):
        return self.engine.or_(self, other)

    def __and__(self, other):
        return self.engine.and_(self, other)

    def __sub__(self, other):
        return self.engine.diff(self, other)

    def __invert__(self):
        return self.engine.not_(self)

    @property
    def node(self):
        return self.engine.node(self.id)

    def __str__(self):
        from .syntax import render_type
        return render_type(self)

    def __repr__(self):
        return f"<type {self}>"


@dataclass(frozen=True)
class Norm:
    """Kind-separated normal form used by the decision procedures.

    The basic part is one merged constant set; the product and arrow parts are
    sets of summands (pos, neg), each a pair of frozensets of node ids.
    """
    basic: BasicSet
    prod: frozenset
    arrow: frozenset


_TOP_PART = frozenset([(frozenset(), frozenset())])


def _absorb(summands):
    s = [x for x in summands if not (x[0] & x[1])]
    s.sort(key=lambda x: len(x[0]) + len(x[1]))
    kept = []
    for cand in s:
        if not any(k[0] <= cand[0] and k[1] <= cand[1] for k in kept):
            kept.append(cand)
    return frozenset(kept)


def part_and(a, b):
    if not a or not b:
        return frozenset()
    if a == _TOP_PART:
        return b
    if b == _TOP_PART:
        return a
    return _absorb([(p1 | p2, n1 | n2) for (p1, n1), (p2, n2) in _cartesian(a, b)])


def part_or(a, b):
    if a == _TOP_PART or b == _TOP_PART:
        return _TOP_PART
    return _absorb(list(a | b))


def part_not(a):
    out = _TOP_PART
    for pos, neg in a:
        lits = [(frozenset(), frozenset([p])) for p in pos]
        lits += [(frozenset([n]), frozenset()) for n in neg]
        out = part_and(out, frozenset(lits))
        if not out:
            break
    return out


def norm_or(a: Norm, b: Norm) -> Norm:
    return Norm(a.basic.union(b.basic), part_or(a.prod, b.prod), part_or(a.arrow, b.arrow))


def norm_and(a: Norm, b: Norm) -> Norm:
    return Norm(a.basic.inter(b.basic), part_and(a.prod, b.prod), part_and(a.arrow, b.arrow))


def norm_not(a: Norm) -> Norm:
    return Norm(a.basic.comp(), part_not(a.prod), part_not(a.arrow))


def norm_diff(a: Norm, b: Norm) -> Norm:
    return norm_and(a, norm_not(b))


NORM_EMPTY = Norm(EMPTY_SET, frozenset(), frozenset())
NORM_ANY = Norm(ALL_BASIC, _TOP_PART, _TOP_PART)

KINDS = ("basic", "prod", "arrow")


@dataclass(frozen=True)
class Summand:
    """One disjunct of a Dnf: an intersection of atoms of a single kind."""
    kind: str
    pos: frozenset  # of Type
    neg: frozenset  # of Type


@dataclass(frozen=True)
class Dnf:
    summands: tuple

    def to_type(self, engine: Engine) -> Type:
        out = engine.empty()
        for s in self.summands:
            out = out | engine.summand_type(s)
        return out


class Engine:
    """Intern table plus the caches of the decision procedures."""

    def __init__(self):
        self._nodes: list = []
        self._index: dict = {}
        self._norms: dict = {}
        self._rec_cache: dict = {}
        self._dnf_cache: dict = {}
        self._shapes: dict = {}
        self.caches: dict = {}  # per-module memo tables, keyed by module name

    # -- raw nodes
    def node(self, i: int):
        n = self._nodes[i]
        if n is None:
            raise ValueError(f"type {i} used before its recursive definition completed")
        return n

    def _intern(self, node) -> Type:
        i = self._index.get(node)
        if i is None:
            i = len(self._nodes)
            self._nodes.append(node)
            self._index[node] = i
        return Type(self, i)

    def reserve(self) -> Type:
        """Allocate an id whose node is supplied later (for recursion)."""
        self._nodes.append(None)
        return Type(self, len(self._nodes) - 1)

    def define(self, t: Type, node) -> None:
        assert self._nodes[t.id] is None
        self._nodes[t.id] = node

    def size(self) -> int:
        return len(self._nodes)

    # -- constructors
    def basic(self, s: BasicSet) -> Type:
        return self._intern(("basic", s))

    def prod(self, a: Type, b: Type) -> Type:
        return self._intern(("prod", a.id, b.id))

    def arrow(self, a: Type, b: Type) -> Type:
        return self._intern(("arrow", a.id, b.id))

    def or_(self, a: Type, b: Type) -> Type:
        return self._intern(("or", a.id, b.id))

    def not_(self, a: Type) -> Type:
        return self._intern(("not", a.id))

    def empty(self) -> Type:
        return self._intern(("empty",))

    def any(self) -> Type:
        return self.not_(self.empty())

    def and_(self, a: Type, b: Type) -> Type:
        return self.not_(self.or_(self.not_(a), self.not_(b)))

    def diff(self, a: Type, b: Type) -> Type:
        return self.and_(a, self.not_(b))

    def const(self, c) -> Type:
        if isinstance(c, Const):
            c = c.value
        return self.basic(BasicSet.of(c))

    def join(self, types) -> Type:
        """Union that skips Empty and duplicates (keeps the output readable)."""
        parts, seen, basics = [], set(), None
        e = self.empty()
        for t in types:
            if t == e or t in seen:
                continue
            seen.add(t)
            node = self.node(t.id)
            if node[0] == "basic":
                if basics is None:
                    basics = len(parts)
                    parts.append(node[1])
                else:
                    parts[basics] = parts[basics].union(node[1])
            else:
                parts.append(t)
        out = None
        for p in parts:
            t = self.basic(p) if isinstance(p, BasicSet) else p
            out = t if out is None else self.or_(out, t)
        return e if out is None else out

    def meet(self, types) -> Type:
        out, seen = None, set()
        top = self.any()
        for t in types:
            if t == top or t in seen:
                continue
            seen.add(t)
            out = t if out is None else self.and_(out, t)
        return top if out is None else out

    def child(self, t: Type, k: int) -> Type:
        return Type(self, self.node(t.id)[k + 1])

    # -- building from expressions
    def build(self, e, env: dict | None = None) -> Type:
        env = env or {}
        if isinstance(e, TType):
            return e.type
        if isinstance(e, TBasic):
            return self.basic(e.set)
        if isinstance(e, TEmpty):
            return self.empty()
        if isinstance(e, TAny):
            return self.any()
        if isinstance(e, TProd):
            return self.prod(self.build(e.left, env), self.build(e.right, env))
        if isinstance(e, TArrow):
            return self.arrow(self.build(e.dom, env), self.build(e.cod, env))
        if isinstance(e, TOr):
            return self.or_(self.build(e.left, env), self.build(e.right, env))
        if isinstance(e, TAnd):
            return self.and_(self.build(e.left, env), self.build(e.right, env))
        if isinstance(e, TDiff):
            return self.diff(self.build(e.left, env), self.build(e.right, env))
        if isinstance(e, TNot):
            return self.not_(self.build(e.arg, env))
        if isinstance(e, TRef):
            if e.name not in env:
                raise UnboundTypeName(f"unknown type name {e.name}")
            return env[e.name]
        if isinstance(e, TWhere):
            inner = dict(env)
            inner.update(self.rec(dict(e.equations), env))
            return self.build(e.body, inner)
        if isinstance(e, TDyn):
            raise ValueError("the dynamic type ? is not a static type")
        raise TypeError(f"not a type expression: {e!r}")

    def rec(self, equations: dict, env: dict | None = None) -> dict:
        """Solve mutually recursive equations name -> type expression."""
        env = dict(env or {})
        key = (tuple(sorted(equations.items(), key=lambda kv: kv[0])),
               tuple(sorted((k, v.id) for k, v in env.items() if _mentions(equations, k))))
        hit = self._rec_cache.get(key)
        if hit is not None:
            return dict(hit)
        order = check_contractive(equations)
        holes = {n: self.reserve() for n in equations}
        scope = dict(env)
        scope.update(holes)
        bodies = {n: self.build(t, scope) for n, t in equations.items()}
        # dependency order: a body that is itself a name needs that name filled first
        for n in order:
            body = bodies[n]
            self.define(holes[n], self._nodes[body.id])
        # isomorphic recursive graphs share one id, whatever the equation names
        for n, h in holes.items():
            shape = self._shape(h.id)
            holes[n] = Type(self, self._shapes.setdefault(shape, h.id))
        self._rec_cache[key] = holes
        return dict(holes)

    def _shape(self, root: int):
        """Name-free description of the graph reachable from root."""
        order, index, stack = [], {}, [root]
        while stack:
            i = stack.pop()
            if i in index:
                continue
            index[i] = len(order)
            order.append(i)
            node = self._nodes[i]
            if node[0] != "basic":
                stack.extend(reversed(node[1:]))
        out = []
        for i in order:
            node = self._nodes[i]
            out.append(node if node[0] in ("basic", "empty") else
                       (node[0],) + tuple(index[c] for c in node[1:]))
        return tuple(out)

    # -- normal forms
    def norm(self, t: Type) -> Norm:
        n = self._norms.get(t.id)
        if n is not None:
            return n
        node = self.node(t.id)
        tag = node[0]
        if tag == "basic":
            n = Norm(node[1], frozenset(), frozenset())
        elif tag == "prod":
            n = Norm(EMPTY_SET, frozenset([(frozenset([t.id]), frozenset())]), frozenset())
        elif tag == "arrow":
            n = Norm(EMPTY_SET, frozenset(), frozenset([(frozenset([t.id]), frozenset())]))
        elif tag == "or":
            n = norm_or(self.norm(Type(self, node[1])), self.norm(Type(self, node[2])))
        elif tag == "not":
            n = norm_not(self.norm(Type(self, node[1])))
        elif tag == "empty":
            n = NORM_EMPTY
        else:
            raise ValueError(f"not a static type node: {node!r}")
        self._norms[t.id] = n
        return n

    def dnf(self, t: Type) -> Dnf:
        """Literal disjunctive normal form; atoms are basic, product and arrow nodes."""
        hit = self._dnf_cache.get(t.id)
        if hit is None:
            raw = self._dnf(t.id)
            summands = sorted(raw, key=lambda s: (KINDS.index(s[0]), sorted(s[1]), sorted(s[2])))
            hit = Dnf(tuple(Summand(k, frozenset(Type(self, i) for i in p),
                                    frozenset(Type(self, i) for i in n))
                            for k, p, n in summands))
            self._dnf_cache[t.id] = hit
        return hit

    def _dnf(self, i):
        node = self.node(i)
        tag = node[0]
        if tag in KINDS:
            return frozenset([(tag, frozenset([i]), frozenset())])
        if tag == "empty":
            return frozenset()
        if tag == "or":
            return self._lit_simplify(self._dnf(node[1]) | self._dnf(node[2]))
        return self._lit_not(self._dnf(node[1]))

    def _lit_simplify(self, summands):
        live = [s for s in summands if not (s[1] & s[2]) and not self._basic_summand_empty(s)]
        live.sort(key=lambda s: len(s[1]) + len(s[2]))
        kept = []
        for s in live:
            if not any(k[0] == s[0] and k[1] <= s[1] and k[2] <= s[2] for k in kept):
                kept.append(s)
        return frozenset(kept)

    def _basic_summand_empty(self, s):
        if s[0] != "basic":
            return False
        acc = ALL_BASIC
        for p in s[1]:
            acc = acc.inter(self.node(p)[1])
        for n in s[2]:
            acc = acc.diff(self.node(n)[1])
        return acc.is_empty()

    def _lit_not(self, summands):
        out = frozenset((k, frozenset(), frozenset()) for k in KINDS)
        for kind, pos, neg in summands:
            lits = [(kind, frozenset(), frozenset([p])) for p in pos]
            lits += [(kind, frozenset([n]), frozenset()) for n in neg]
            lits += [(k, frozenset(), frozenset()) for k in KINDS if k != kind]
            out = self._lit_simplify(
                (k1, p1 | p2, n1 | n2)
                for (k1, p1, n1), (k2, p2, n2) in _cartesian(out, lits) if k1 == k2)
        return out

    def summand_type(self, s: Summand) -> Type:
        top = {"basic": self.basic(ALL_BASIC),
               "prod": self.prod(self.any(), self.any()),
               "arrow": self.arrow(self.empty(), self.any())}[s.kind]
        parts = sorted(s.pos) or [top]
        t = self.meet(parts)
        for n in sorted(s.neg):
            t = self.diff(t, n)
        return t


def _mentions(equations, name) -> bool:
    def walk(e):
        if isinstance(e, TRef):
            return e.name == name
        return any(walk(c) for c in texpr_children(e))
    return any(walk(t) for t in equations.values())


ENGINE = Engine()


def default_engine() -> Engine:
    return ENGINE


def mk_basic(s: BasicSet, engine: Engine = ENGINE) -> Type:
    return engine.basic(s)


def const_basic(c, engine: Engine = ENGINE) -> Type:
    return engine.const(c)


def mk_rec(equations: dict, engine: Engine = ENGINE) -> dict:
    return engine.rec(equations)


def dnf(t: Type) -> Dnf:
    return t.engine.dnf(t)


def reachable(t: Type) -> list[Type]:
    """All node ids reachable from t, in discovery order."""
    eng, seen, stack = t.engine, [], [t.id]
    mark = set()
    while stack:
        i = stack.pop()
        if i in mark:
            continue
        mark.add(i)
        seen.append(Type(eng, i))
        node = eng.node(i)
        stack.extend(c for c in node[1:] if isinstance(c, int) and node[0] != "basic")
    return seen


# named basic types on the default engine
EMPTY = ENGINE.empty()
ANY = ENGINE.any()
INT = ENGINE.basic(INT_SET)
BOOL = ENGINE.basic(BOOL_SET)
STRING = ENGINE.basic(STRING_SET)
ATOM = ENGINE.basic(ATOM_SET)
TRUE = ENGINE.const(True)
FALSE = ENGINE.const(False)
