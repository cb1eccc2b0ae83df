"""Operators reading the domain and result of function types, and the components of products."""
from __future__ import annotations

from itertools import combinations

from .subtype import _summand_empty, is_empty, simplify, subtype
from .types import Type


class NotAFunctionType(ValueError):
    pass


class ArgumentOutsideDomain(ValueError):
    pass


class NotAProductType(ValueError):
    pass


def _arrow(eng):
    return eng.arrow(eng.empty(), eng.any())


def is_function_type(t: Type) -> bool:
    return subtype(t, _arrow(t.engine))


def is_product_type(t: Type) -> bool:
    eng = t.engine
    return subtype(t, eng.prod(eng.any(), eng.any()))


def _live(t: Type, kind: str):
    """Non-empty summands of the given kind as (positive, negative) child pairs."""
    eng = t.engine
    part = eng.norm(t).arrow if kind == "arrow" else eng.norm(t).prod
    out = []
    for s in sorted(part, key=lambda s: (sorted(s[0]), sorted(s[1]))):
        if _summand_empty(eng, kind, s):
            continue
        pos = [(Type(eng, eng.node(i)[1]), Type(eng, eng.node(i)[2])) for i in sorted(s[0])]
        neg = [(Type(eng, eng.node(i)[1]), Type(eng, eng.node(i)[2])) for i in sorted(s[1])]
        out.append((pos, neg))
    return out


def dom(t: Type) -> Type:
    if not is_function_type(t):
        raise NotAFunctionType(f"{t} is not a function type")
    eng = t.engine
    return simplify(eng.meet(eng.join(s for s, _ in pos) for pos, _ in _live(t, "arrow")))


def apply(t: Type, s: Type) -> Type:
    if not is_function_type(t):
        raise NotAFunctionType(f"{t} is not a function type")
    if not subtype(s, dom(t)):
        raise ArgumentOutsideDomain(f"{s} is not in the domain of {t}")
    eng = t.engine
    results = []
    for pos, _ in _live(t, "arrow"):
        n = len(pos)
        chosen = []
        # smallest selections first; a superset of an accepted one adds nothing
        for k in range(n + 1):
            for q in combinations(range(n), k):
                qs = set(q)
                if any(c <= qs for c in chosen):
                    continue
                rest = eng.join(pos[i][0] for i in range(n) if i not in qs)
                if not subtype(s, rest):
                    chosen.append(qs)
                    results.append(eng.meet(pos[i][1] for i in sorted(qs)))
    return simplify(eng.join(results))


def proj(i: int, t: Type) -> Type:
    if i not in (1, 2):
        raise ValueError("projection index must be 1 or 2")
    if not is_product_type(t):
        raise NotAProductType(f"{t} is not a product type")
    eng = t.engine
    results = []
    for pos, neg in _live(t, "prod"):
        left = eng.meet(a for a, _ in pos)
        right = eng.meet(b for _, b in pos)
        m = len(neg)
        for k in range(m + 1):
            for sel in combinations(range(m), k):
                l2 = eng.meet([left] + [eng.not_(neg[j][0]) for j in sel])
                r2 = eng.meet([right] + [eng.not_(neg[j][1]) for j in range(m) if j not in sel])
                if is_empty(l2) or is_empty(r2):
                    continue
                results.append(l2 if i == 1 else r2)
    return simplify(eng.join(results))
