"""Abstract syntax of terms and patterns, for both the annotated core language
and the unannotated source language."""
from __future__ import annotations

from dataclasses import dataclass

from .basic import Const  # noqa: F401  (constants are expressions and values)


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Abs:
    """Annotated abstraction; iface is a tuple of (domain, codomain) pairs."""
    iface: tuple
    param: str
    body: object


@dataclass(frozen=True)
class App:
    fn: object
    arg: object


@dataclass(frozen=True)
class Pair:
    left: object
    right: object


@dataclass(frozen=True)
class Proj:
    index: int
    arg: object


@dataclass(frozen=True)
class TypeCase:
    """(binder = scrutinee) in test ? then : else_"""
    binder: str
    scrutinee: object
    test: object
    then: object
    else_: object


@dataclass(frozen=True)
class Choice:
    left: object
    right: object


@dataclass(frozen=True)
class Let:
    name: str
    annot: object  # Type or None
    bound: object
    body: object


@dataclass(frozen=True)
class Prim:
    """Built-in operator applied to all its arguments."""
    op: str
    args: tuple


@dataclass(frozen=True)
class Match:
    scrutinee: object
    branches: tuple  # of (pattern, expr)


@dataclass(frozen=True)
class Opaque:
    """A named constant known only by its declared type."""
    name: str
    type: object


# source language (unannotated)

@dataclass(frozen=True)
class SAbs:
    param: str
    body: object


@dataclass(frozen=True)
class SCase:
    scrutinee: object
    test: object
    then: object
    else_: object


# patterns

@dataclass(frozen=True)
class PType:
    type: object


@dataclass(frozen=True)
class PVar:
    name: str


@dataclass(frozen=True)
class PPair:
    left: object
    right: object


@dataclass(frozen=True)
class PAnd:
    left: object
    right: object


@dataclass(frozen=True)
class POr:
    left: object
    right: object


def children(e) -> tuple:
    """Immediate subexpressions, in evaluation order."""
    if isinstance(e, (Abs, SAbs)):
        return (e.body,)
    if isinstance(e, App):
        return (e.fn, e.arg)
    if isinstance(e, (Pair, Choice)):
        return (e.left, e.right)
    if isinstance(e, Proj):
        return (e.arg,)
    if isinstance(e, TypeCase):
        return (e.scrutinee, e.then, e.else_)
    if isinstance(e, SCase):
        return (e.scrutinee, e.then, e.else_)
    if isinstance(e, Let):
        return (e.bound, e.body)
    if isinstance(e, Prim):
        return e.args
    if isinstance(e, Match):
        return (e.scrutinee,) + tuple(b for _, b in e.branches)
    return ()


def pattern_vars(p) -> frozenset:
    if isinstance(p, PVar):
        return frozenset([p.name])
    if isinstance(p, (PPair, PAnd, POr)):
        return pattern_vars(p.left) | pattern_vars(p.right)
    return frozenset()


def free_vars(e) -> frozenset:
    if isinstance(e, Var):
        return frozenset([e.name])
    if isinstance(e, (Abs, SAbs)):
        return free_vars(e.body) - {e.param}
    if isinstance(e, TypeCase):
        return free_vars(e.scrutinee) | ((free_vars(e.then) | free_vars(e.else_)) - {e.binder})
    if isinstance(e, Let):
        return free_vars(e.bound) | (free_vars(e.body) - {e.name})
    if isinstance(e, Match):
        out = free_vars(e.scrutinee)
        for p, b in e.branches:
            out |= free_vars(b) - pattern_vars(p)
        return out
    out = frozenset()
    for c in children(e):
        out |= free_vars(c)
    return out


def is_value(e) -> bool:
    if isinstance(e, (Const, Abs, SAbs)):
        return True
    if isinstance(e, Pair):
        return is_value(e.left) and is_value(e.right)
    return False


_fresh_counter = [0]


def fresh(base: str, avoid) -> str:
    base = base.rstrip("0123456789'") or "v"
    while True:
        _fresh_counter[0] += 1
        name = f"{base}{_fresh_counter[0]}"
        if name not in avoid:
            return name


def subst(e, name: str, v):
    """Capture-avoiding substitution of v for the free variable name in e."""
    return subst_many(e, {name: v})


def subst_many(e, sigma: dict):
    if not sigma:
        return e
    if isinstance(e, Var):
        return sigma.get(e.name, e)
    if isinstance(e, (Const, Opaque)):
        return e
    if isinstance(e, (Abs, SAbs)):
        param, body = _bind(e.param, e.body, sigma)
        if param is None:
            return e
        return Abs(e.iface, param, body) if isinstance(e, Abs) else SAbs(param, body)
    if isinstance(e, App):
        return App(subst_many(e.fn, sigma), subst_many(e.arg, sigma))
    if isinstance(e, Pair):
        return Pair(subst_many(e.left, sigma), subst_many(e.right, sigma))
    if isinstance(e, Choice):
        return Choice(subst_many(e.left, sigma), subst_many(e.right, sigma))
    if isinstance(e, Proj):
        return Proj(e.index, subst_many(e.arg, sigma))
    if isinstance(e, Prim):
        return Prim(e.op, tuple(subst_many(a, sigma) for a in e.args))
    if isinstance(e, SCase):
        return SCase(subst_many(e.scrutinee, sigma), e.test,
                     subst_many(e.then, sigma), subst_many(e.else_, sigma))
    if isinstance(e, TypeCase):
        scrut = subst_many(e.scrutinee, sigma)
        binder, pair = _bind(e.binder, Pair(e.then, e.else_), sigma)
        if binder is None:
            return TypeCase(e.binder, scrut, e.test, e.then, e.else_)
        return TypeCase(binder, scrut, e.test, pair.left, pair.right)
    if isinstance(e, Let):
        bound = subst_many(e.bound, sigma)
        name, body = _bind(e.name, e.body, sigma)
        if name is None:
            return Let(e.name, e.annot, bound, e.body)
        return Let(name, e.annot, bound, body)
    if isinstance(e, Match):
        branches = []
        for p, b in e.branches:
            inner = {k: v for k, v in sigma.items() if k not in pattern_vars(p)}
            clash = set().union(*(free_vars(v) for v in inner.values())) & pattern_vars(p)
            if clash:
                ren = {x: fresh(x, clash | free_vars(b)) for x in clash}
                p = rename_pattern(p, ren)
                b = subst_many(b, {x: Var(y) for x, y in ren.items()})
            branches.append((p, subst_many(b, inner)))
        return Match(subst_many(e.scrutinee, sigma), tuple(branches))
    raise TypeError(f"not an expression: {e!r}")


def _bind(param, body, sigma):
    inner = {k: v for k, v in sigma.items() if k != param}
    if not inner:
        return None, None
    fv = set()
    for v in inner.values():
        fv |= free_vars(v)
    if param in fv:
        new = fresh(param, fv | free_vars(body) | set(inner))
        body = subst_many(body, {param: Var(new)})
        param = new
    return param, subst_many(body, inner)


def rename_pattern(p, ren: dict):
    if isinstance(p, PVar):
        return PVar(ren.get(p.name, p.name))
    if isinstance(p, (PPair, PAnd, POr)):
        return type(p)(rename_pattern(p.left, ren), rename_pattern(p.right, ren))
    return p
