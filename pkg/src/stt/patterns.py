"""Pattern matching and the typing of match expressions."""
from __future__ import annotations

from dataclasses import dataclass

from . import ops
from .basic import Const
from .subtype import is_empty, simplify, subtype
from .terms import Match, Pair, PAnd, POr, PPair, PType, PVar, pattern_vars
from .types import ENGINE, Engine, Type


class PatternTypeMismatch(Exception):
    """env_of called with a type not contained in the pattern's accepted type."""


class MalformedPattern(ValueError):
    pass


class NonExhaustiveMatch(Exception):
    def __init__(self, residue: Type, term=None):
        self.residue = residue
        self.term = term
        super().__init__(f"match is not exhaustive: values of type {residue} are not matched")


def wildcard(engine: Engine = ENGINE) -> PType:
    return PType(engine.any())


def const_pattern(value, engine: Engine = ENGINE) -> PType:
    return PType(engine.const(value))


def validate(p) -> None:
    """Pair and & need disjoint captures; | needs identical ones."""
    if isinstance(p, (PPair, PAnd)):
        validate(p.left)
        validate(p.right)
        shared = pattern_vars(p.left) & pattern_vars(p.right)
        if shared:
            raise MalformedPattern(f"variables {sorted(shared)} captured twice")
    elif isinstance(p, POr):
        validate(p.left)
        validate(p.right)
        if pattern_vars(p.left) != pattern_vars(p.right):
            raise MalformedPattern("both sides of | must capture the same variables")


def match_value(v, p):
    """The substitution produced by matching v against p, or None on failure."""
    from .lang import typeof_member
    if isinstance(p, PType):
        return {} if typeof_member(v, p.type) else None
    if isinstance(p, PVar):
        return {p.name: v}
    if isinstance(p, PPair):
        if not isinstance(v, Pair):
            return None
        a = match_value(v.left, p.left)
        if a is None:
            return None
        b = match_value(v.right, p.right)
        return None if b is None else {**a, **b}
    if isinstance(p, PAnd):
        a = match_value(v, p.left)
        if a is None:
            return None
        b = match_value(v, p.right)
        return None if b is None else {**a, **b}
    if isinstance(p, POr):
        a = match_value(v, p.left)
        return a if a is not None else match_value(v, p.right)
    raise MalformedPattern(f"not a pattern: {p!r}")


def accepted(p, engine: Engine = ENGINE) -> Type:
    if isinstance(p, PType):
        return p.type
    if isinstance(p, PVar):
        return engine.any()
    if isinstance(p, PPair):
        return engine.prod(accepted(p.left, engine), accepted(p.right, engine))
    if isinstance(p, PAnd):
        return accepted(p.left, engine) & accepted(p.right, engine)
    if isinstance(p, POr):
        return accepted(p.left, engine) | accepted(p.right, engine)
    raise MalformedPattern(f"not a pattern: {p!r}")


def env_of(t: Type, p) -> dict:
    """Types of p's captures when a value of type t matches p."""
    eng = t.engine
    if not subtype(t, accepted(p, eng)):
        raise PatternTypeMismatch(f"{t} is not contained in the accepted type {accepted(p, eng)}")
    return _env(t, p)


def _env(t: Type, p) -> dict:
    eng = t.engine
    if isinstance(p, PType):
        return {}
    if isinstance(p, PVar):
        return {p.name: simplify(t)}
    if isinstance(p, PPair):
        if is_empty(t):
            return {x: eng.empty() for x in pattern_vars(p)}
        return {**_env(ops.proj(1, t), p.left), **_env(ops.proj(2, t), p.right)}
    if isinstance(p, PAnd):
        return {**_env(t, p.left), **_env(t, p.right)}
    if isinstance(p, POr):
        a1 = accepted(p.left, eng)
        left = _env(t & a1, p.left)
        right = _env(t - a1, p.right)
        return {x: left[x] | right[x] for x in left}
    raise MalformedPattern(f"not a pattern: {p!r}")


@dataclass(frozen=True)
class MatchReport:
    type: Type
    redundant: tuple  # branch indices never checked


def typecheck_match(env: dict, scrutinee, branches, engine: Engine = ENGINE) -> MatchReport:
    """Type a match and report the branches no context selects."""
    from .lang import Checker
    node = Match(scrutinee, tuple(branches))
    checker = Checker(engine)
    t = checker.check(env, node)
    return MatchReport(t, tuple(k for n, k in checker.redundant() if n is node))


__all__ = ["Const", "MalformedPattern", "MatchReport", "NonExhaustiveMatch",
           "PatternTypeMismatch", "accepted", "env_of", "match_value", "typecheck_match",
           "validate", "wildcard"]
