"""Deciding emptiness of recursive set-theoretic types, and subtyping through it.

Emptiness is a greatest fixpoint: while a summand is being examined it is
assumed empty, and a recursive encounter of the same summand succeeds. Results
proved under hypotheses stay tentative until the outermost query finishes; a
refuted hypothesis discards everything recorded after it was made.
"""
from __future__ import annotations

from .types import (NORM_ANY, NORM_EMPTY, Engine, Norm, Type, norm_and, norm_diff, norm_not,
                    norm_or)


class Memo:
    def __init__(self):
        self.settled: dict = {}
        self.assumed: set = set()
        self.tentative: list = []
        self.tentative_set: set = set()
        self.sub: dict = {}


def memo_of(engine: Engine) -> Memo:
    m = engine.caches.get("subtype")
    if m is None:
        m = engine.caches["subtype"] = Memo()
    return m


def norm_is_empty(engine: Engine, n: Norm) -> bool:
    if not n.basic.is_empty():
        return False
    # cheap summands first
    for s in sorted(n.prod, key=_weight):
        if not _summand_empty(engine, "prod", s):
            return False
    for s in sorted(n.arrow, key=_weight):
        if not _summand_empty(engine, "arrow", s):
            return False
    return True


def _weight(s):
    return (len(s[0]) + len(s[1]), sorted(s[0]), sorted(s[1]))


def _summand_empty(engine: Engine, kind: str, s) -> bool:
    memo = memo_of(engine)
    key = (kind, s)
    hit = memo.settled.get(key)
    if hit is not None:
        return hit
    if key in memo.assumed or key in memo.tentative_set:
        return True
    mark = len(memo.tentative)
    memo.assumed.add(key)
    try:
        if kind == "prod":
            result = _prod_empty(engine, s)
        else:
            result = _arrow_empty(engine, s)
    finally:
        memo.assumed.discard(key)
    if result:
        memo.tentative.append(key)
        memo.tentative_set.add(key)
    else:
        memo.settled[key] = False
        for k in memo.tentative[mark:]:
            memo.tentative_set.discard(k)
        del memo.tentative[mark:]
    if not memo.assumed:
        for k in memo.tentative:
            memo.settled[k] = True
        memo.tentative.clear()
        memo.tentative_set.clear()
    return result


def _children(engine, ids, k):
    return [engine.norm(Type(engine, engine.node(i)[k])) for i in sorted(ids)]


def _meet(norms):
    out = NORM_ANY
    for n in norms:
        out = norm_and(out, n)
    return out


def _prod_empty(engine, s) -> bool:
    pos, neg = s
    left = _meet(_children(engine, pos, 1))
    right = _meet(_children(engine, pos, 2))
    negs = list(zip(_children(engine, neg, 1), _children(engine, neg, 2)))
    return _covered(engine, left, right, negs)


def _covered(engine, left: Norm, right: Norm, negs) -> bool:
    """Is left×right included in the union of the products in negs?"""
    if norm_is_empty(engine, left) or norm_is_empty(engine, right):
        return True
    if not negs:
        return False
    (s1, t1), rest = negs[0], negs[1:]
    return (_covered(engine, norm_diff(left, s1), right, rest)
            and _covered(engine, norm_and(left, s1), norm_diff(right, t1), rest))


def _arrow_empty(engine, s) -> bool:
    pos, neg = s
    arrows = list(zip(_children(engine, pos, 1), _children(engine, pos, 2)))
    domain = NORM_EMPTY
    for d, _ in arrows:
        domain = norm_or(domain, d)
    for i in sorted(neg):
        node = engine.node(i)
        s2 = engine.norm(Type(engine, node[1]))
        t2 = engine.norm(Type(engine, node[2]))
        if not norm_is_empty(engine, norm_diff(s2, domain)):
            continue
        if _explore(engine, arrows, s2, norm_not(t2)):
            return True
    return False


def _explore(engine, arrows, dom_left: Norm, cod: Norm) -> bool:
    """Every split of arrows into covering domains / excluded codomains works."""
    if norm_is_empty(engine, dom_left) or norm_is_empty(engine, cod):
        return True
    if not arrows:
        return False
    (s1, t1), rest = arrows[0], arrows[1:]
    return (_explore(engine, rest, norm_diff(dom_left, s1), cod)
            and _explore(engine, rest, dom_left, norm_and(cod, t1)))


def is_empty(t: Type) -> bool:
    return norm_is_empty(t.engine, t.engine.norm(t))


def subtype(t1: Type, t2: Type) -> bool:
    eng = t1.engine
    memo = memo_of(eng)
    key = (t1.id, t2.id)
    hit = memo.sub.get(key)
    if hit is None:
        hit = norm_is_empty(eng, norm_diff(eng.norm(t1), eng.norm(t2)))
        memo.sub[key] = hit
    return hit


def equiv(t1: Type, t2: Type) -> bool:
    return subtype(t1, t2) and subtype(t2, t1)


def simplify(t: Type) -> Type:
    """An equivalent type rebuilt from its normal form: one constant set, merged
    positive products, and no empty, redundant or non-cutting parts.

    When the complement of the result prints shorter, the negation of the
    simplified complement is returned instead.
    """
    from .syntax import render_type
    out = _simplify(t, frozenset(), {})
    if out in (t.engine.empty(), t.engine.any()):
        return out
    flip = t.engine.not_(_simplify(t.engine.not_(t), frozenset(), {}))
    return flip if len(render_type(flip)) < len(render_type(out)) else out


def _simplify(t: Type, active: frozenset, memo: dict) -> Type:
    hit = memo.get(t.id)
    if hit is not None:
        return hit
    eng = t.engine
    n = eng.norm(t)
    inner = active | {t.id}

    def child(i):
        c = Type(eng, i)
        return c if i in inner else _simplify(c, inner, memo)

    summands = []
    if not n.basic.is_empty():
        summands.append(eng.basic(n.basic))
    for kind, part in (("prod", n.prod), ("arrow", n.arrow)):
        for s in sorted(part, key=_weight):
            if _summand_empty(engine=eng, kind=kind, s=s):
                continue
            pos = sorted(s[0])
            if kind == "prod":
                if pos:
                    base = eng.prod(eng.meet(child(eng.node(i)[1]) for i in pos),
                                    eng.meet(child(eng.node(i)[2]) for i in pos))
                else:
                    base = eng.prod(eng.any(), eng.any())
            else:
                base = eng.meet(eng.arrow(child(eng.node(i)[1]), child(eng.node(i)[2]))
                                for i in pos) if pos else eng.arrow(eng.empty(), eng.any())
            out = base
            for j in sorted(s[1]):
                neg = Type(eng, j)
                if not is_empty(eng.and_(base, neg)):
                    out = eng.diff(out, neg)
            summands.append(out)
    kept = []
    for k, s in enumerate(summands):
        others = summands[:k] + summands[k + 1:]
        if any(subtype(s, o) and (not subtype(o, s) or summands.index(o) < k) for o in others):
            continue
        kept.append(s)
    out = eng.join(kept)
    if subtype(eng.any(), out):
        out = eng.any()
    memo[t.id] = out
    return out
