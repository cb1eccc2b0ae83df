"""Core calculus: evaluation plus the type checker and runtime membership v ∈ t."""
from __future__ import annotations

import random
from dataclasses import dataclass, field

from . import ops
from .basic import Atom, Const
from .subtype import is_empty, simplify, subtype
from .terms import (Abs, App, Choice, Let, Match, Opaque, Pair, Prim, Proj, SAbs, SCase,
                    TypeCase, Var, free_vars, is_value, subst, subst_many)
from .types import ENGINE, Engine, Type


class Stuck(Exception):
    """Reduction reached a configuration with no applicable rule."""


class Diverged(Exception):
    """Evaluation ran out of fuel."""


class TypeError_(Exception):
    """A typing rule failed; carries the rule name and the offending subterm."""

    def __init__(self, rule: str, message: str, term=None):
        self.rule = rule
        self.message = message
        self.term = term
        super().__init__(f"[{rule}] {message}")


# under the name users expect
TypeError = TypeError_  # noqa: A001


# ---------------------------------------------------------------- built-ins

@dataclass(frozen=True)
class PrimSpec:
    arity: int
    signature: str  # curried type, in surface syntax
    impl: object


def _int_args(*xs):
    return all(isinstance(x, Const) and x.kind == "int" for x in xs)


def _impl_add(a, b):
    return Const(a.value + b.value) if _int_args(a, b) else None


def _impl_sub(a, b):
    return Const(a.value - b.value) if _int_args(a, b) else None


def _impl_mod(a, b):
    if _int_args(a, b) and b.value != 0:
        return Const(a.value % b.value)
    return None


def _impl_eq(a, b):
    return Const(a.value == b.value) if _int_args(a, b) else None


def _impl_concat(a, b):
    if all(isinstance(x, Const) and x.kind == "str" for x in (a, b)):
        return Const(a.value + b.value)
    return None


def _impl_not(a):
    return Const(not a.value) if isinstance(a, Const) and a.kind == "bool" else None


def _impl_bool(a):
    return a if isinstance(a, Const) and a.kind == "bool" else None


PRIMS = {
    "add": PrimSpec(2, "Int -> Int -> Int", _impl_add),
    "sub": PrimSpec(2, "Int -> Int -> Int", _impl_sub),
    # mod by zero has no rule; the type does not rule it out, so it counts as stuck
    "mod": PrimSpec(2, "Int -> (Int \\ 0) -> Int", _impl_mod),
    "eq": PrimSpec(2, "Int -> Int -> Bool", _impl_eq),
    "concat": PrimSpec(2, "String -> String -> String", _impl_concat),
    "not": PrimSpec(1, "(true -> false) & (false -> true)", _impl_not),
    "bool": PrimSpec(1, "(true -> true) & (false -> false)", _impl_bool),
}

PRIM_SYMBOLS = {"add": "+", "sub": "-", "mod": "mod", "eq": "==", "concat": "@"}


def prim_type(op: str, engine: Engine = ENGINE) -> Type:
    from .syntax import parse_type
    cache = engine.caches.setdefault("prims", {})
    if op not in cache:
        cache[op] = parse_type(PRIMS[op].signature, engine)
    return cache[op]


# ---------------------------------------------------------------- v ∈ t

def const_type(c: Const, engine: Engine = ENGINE) -> Type:
    return engine.const(c.value)


def interface_type(iface, engine: Engine) -> Type:
    return engine.meet(engine.arrow(s, t) for s, t in iface)


def typeof_member(v, t: Type) -> bool:
    """Decide v ∈ t for a value v."""
    eng = t.engine
    if isinstance(v, Const):
        return subtype(eng.const(v.value), t)
    if isinstance(v, Pair):
        for pos, neg in eng.norm(t).prod:
            if all(_in_child(v.left, eng, i, 1) and _in_child(v.right, eng, i, 2) for i in pos) \
                    and not any(_in_child(v.left, eng, j, 1) and _in_child(v.right, eng, j, 2)
                                for j in neg):
                return True
        return False
    if isinstance(v, (Abs, SAbs)):
        a = interface_type(v.iface, eng) if isinstance(v, Abs) else \
            eng.arrow(eng.empty(), eng.any())
        for pos, neg in eng.norm(t).arrow:
            if all(subtype(a, Type(eng, i)) for i in pos) and \
                    not any(subtype(a, Type(eng, j)) for j in neg):
                return True
        return False
    raise ValueError(f"not a value: {v!r}")


def _in_child(v, eng, node_id, k):
    return typeof_member(v, Type(eng, eng.node(node_id)[k]))


# ---------------------------------------------------------------- reduction

def reduce(e, rng: random.Random | None = None):
    """One leftmost-outermost step."""
    rng = rng or random.Random(0)
    if is_value(e):
        raise Stuck("already a value")
    if isinstance(e, Var):
        raise Stuck(f"free variable {e.name}")
    if isinstance(e, App):
        if not is_value(e.fn):
            return App(reduce(e.fn, rng), e.arg)
        if not is_value(e.arg):
            return App(e.fn, reduce(e.arg, rng))
        if isinstance(e.fn, (Abs, SAbs)):
            return subst(e.fn.body, e.fn.param, e.arg)
        raise Stuck("application of a non-function")
    if isinstance(e, Pair):
        if not is_value(e.left):
            return Pair(reduce(e.left, rng), e.right)
        return Pair(e.left, reduce(e.right, rng))
    if isinstance(e, Proj):
        if not is_value(e.arg):
            return Proj(e.index, reduce(e.arg, rng))
        if isinstance(e.arg, Pair):
            return e.arg.left if e.index == 1 else e.arg.right
        raise Stuck("projection of a non-pair")
    if isinstance(e, TypeCase):
        if not is_value(e.scrutinee):
            return TypeCase(e.binder, reduce(e.scrutinee, rng), e.test, e.then, e.else_)
        branch = e.then if typeof_member(e.scrutinee, e.test) else e.else_
        return subst(branch, e.binder, e.scrutinee)
    if isinstance(e, SCase):
        if not is_value(e.scrutinee):
            return SCase(reduce(e.scrutinee, rng), e.test, e.then, e.else_)
        return e.then if typeof_member(e.scrutinee, e.test) else e.else_
    if isinstance(e, Choice):
        return e.left if rng.random() < 0.5 else e.right
    if isinstance(e, Let):
        if not is_value(e.bound):
            return Let(e.name, e.annot, reduce(e.bound, rng), e.body)
        return subst(e.body, e.name, e.bound)
    if isinstance(e, Prim):
        for k, a in enumerate(e.args):
            if not is_value(a):
                args = list(e.args)
                args[k] = reduce(a, rng)
                return Prim(e.op, tuple(args))
        out = PRIMS[e.op].impl(*e.args)
        if out is None:
            raise Stuck(f"built-in {e.op} applied outside its domain")
        return out
    if isinstance(e, Match):
        if not is_value(e.scrutinee):
            return Match(reduce(e.scrutinee, rng), e.branches)
        from .patterns import match_value
        for p, body in e.branches:
            sigma = match_value(e.scrutinee, p)
            if sigma is not None:
                return subst_many(body, sigma)
        raise Stuck("no pattern matches")
    if isinstance(e, Opaque):
        raise Stuck(f"opaque constant {e.name} has no runtime value")
    raise Stuck(f"unknown expression {e!r}")


def eval(e, fuel: int = 10_000, seed: int | None = 0):  # noqa: A001
    """Reduce e to a value; raises Diverged when fuel runs out and Stuck on errors."""
    if free_vars(e):
        raise Stuck(f"free variables {sorted(free_vars(e))}")
    rng = random.Random(seed)
    for _ in range(fuel):
        if is_value(e):
            return e
        e = reduce(e, rng)
    if is_value(e):
        return e
    raise Diverged(f"no value after {fuel} steps")


# ---------------------------------------------------------------- type checking

@dataclass
class MatchVisit:
    node: object
    checked: set = field(default_factory=set)


class Checker:
    """Type checker; records which match branches were checked in some context."""

    def __init__(self, engine: Engine = ENGINE):
        self.engine = engine
        self.visits: dict = {}

    def redundant(self) -> list:
        """(match node, branch index) for branches never checked in any context."""
        out = []
        for visit in self.visits.values():
            for k in range(len(visit.node.branches)):
                if k not in visit.checked:
                    out.append((visit.node, k))
        return out

    def check(self, env: dict, e) -> Type:
        eng = self.engine
        if isinstance(e, Const):
            return eng.const(e.value)
        if isinstance(e, Opaque):
            return e.type
        if isinstance(e, Var):
            if e.name not in env:
                raise TypeError_("Var", f"unbound variable {e.name}", e)
            return env[e.name]
        if isinstance(e, Abs):
            for s, t in e.iface:
                if is_empty(s):
                    continue  # ex falso: x : Empty types anything
                body = self.check({**env, e.param: s}, e.body)
                if not subtype(body, t):
                    raise TypeError_("->I", f"body has type {body}, not a subtype of {t} "
                                            f"when {e.param} : {s}", e)
            return interface_type(e.iface, eng)
        if isinstance(e, SAbs):
            raise TypeError_("->I", "abstraction without an interface", e)
        if isinstance(e, App):
            return self.apply(self.check(env, e.fn), self.check(env, e.arg), e)
        if isinstance(e, Pair):
            return eng.prod(self.check(env, e.left), self.check(env, e.right))
        if isinstance(e, Proj):
            t = self.check(env, e.arg)
            if not ops.is_product_type(t):
                raise TypeError_("xE", f"projection of {t}, which is not a product type", e)
            return ops.proj(e.index, t)
        if isinstance(e, TypeCase):
            t0 = self.check(env, e.scrutinee)
            results = []
            for part, branch in ((t0 & e.test, e.then), (t0 - e.test, e.else_)):
                if not is_empty(part):
                    results.append(self.check({**env, e.binder: part}, branch))
            return eng.join(results)
        if isinstance(e, SCase):
            raise TypeError_("Case", "type-case without a binder", e)
        if isinstance(e, Choice):
            return eng.join([self.check(env, e.left), self.check(env, e.right)])
        if isinstance(e, Let):
            t = self.check(env, e.bound)
            if e.annot is not None:
                if not subtype(t, e.annot):
                    raise TypeError_("Let", f"bound expression has type {t}, not {e.annot}", e)
                t = e.annot
            return self.check({**env, e.name: t}, e.body)
        if isinstance(e, Prim):
            t = prim_type(e.op, eng)
            for a in e.args:
                t = self.apply(t, self.check(env, a), e)
            return t
        if isinstance(e, Match):
            return self.check_match(env, e)
        raise TypeError_("?", f"unknown expression {e!r}", e)

    def apply(self, tf: Type, ta: Type, e) -> Type:
        if not ops.is_function_type(tf):
            raise TypeError_("->E", f"application of {tf}, which is not a function type", e)
        d = ops.dom(tf)
        if not subtype(ta, d):
            raise TypeError_("->E", f"argument of type {ta} is outside the domain {d}", e)
        return ops.apply(tf, ta)

    def check_match(self, env: dict, e: Match) -> Type:
        from .patterns import NonExhaustiveMatch, accepted, env_of
        eng = self.engine
        visit = self.visits.setdefault(id(e), MatchVisit(e))
        t0 = self.check(env, e.scrutinee)
        covered = eng.join(accepted(p, eng) for p, _ in e.branches)
        if not subtype(t0, covered):
            raise NonExhaustiveMatch(t0 - covered, e)
        results, seen = [], eng.empty()
        for k, (p, body) in enumerate(e.branches):
            acc = accepted(p, eng)
            part = simplify((t0 & acc) - seen)
            seen = seen | acc
            if is_empty(part):
                continue
            visit.checked.add(k)
            results.append(self.check({**env, **env_of(part, p)}, body))
        return eng.join(results)


def typecheck(env: dict, e, engine: Engine = ENGINE) -> Type:
    return Checker(engine).check(env, e)


# ---------------------------------------------------------------- printing values

def show_value(v) -> str:
    if isinstance(v, Const):
        return str(v)
    if isinstance(v, Pair):
        return f"({show_value(v.left)}, {show_value(v.right)})"
    if isinstance(v, Abs):
        iface = "; ".join(f"{s} -> {t}" for s, t in v.iface)
        return f"fun ({iface}) {v.param} -> ..."
    if isinstance(v, SAbs):
        return f"fun {v.param} -> ..."
    return repr(v)


__all__ = ["Atom", "Checker", "Diverged", "PRIMS", "Stuck", "TypeError", "eval", "reduce",
           "show_value", "typecheck", "typeof_member"]
