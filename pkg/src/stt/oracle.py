"""A bounded model of the interpretation domain, used as ground truth.

Elements are constants, pairs or finite relations whose outputs may be the
failure marker OMEGA. Membership follows the set-theoretic interpretation
clause by clause and never consults the subtyping engine.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, product

from .basic import Const, render_const
from .types import Type, reachable


class _Omega:
    def __repr__(self):
        return "Ω"

    __str__ = __repr__


OMEGA = _Omega()


@dataclass(frozen=True)
class DPair:
    left: object
    right: object

    def __str__(self):
        return f"({self.left}, {self.right})"


@dataclass(frozen=True)
class DRel:
    pairs: frozenset  # of (element, element-or-OMEGA)

    def __str__(self):
        items = sorted(f"({d}, {w})" for d, w in self.pairs)
        return "{" + ", ".join(items) + "}"


@dataclass(frozen=True)
class OracleConfig:
    universe: tuple = (0, 1, True)
    depth: int = 3
    rel_size: int = 2

    def __post_init__(self):
        if self.depth < 1 or self.rel_size < 0 or not self.universe:
            raise ValueError("oracle bounds must be positive and the universe non-empty")


def show(d) -> str:
    if isinstance(d, Const):
        return render_const(d.value)
    return str(d)


def belongs(d, t: Type) -> bool:
    if d is OMEGA:
        return False
    eng = t.engine
    node = eng.node(t.id)
    tag = node[0]
    if tag == "basic":
        return isinstance(d, Const) and node[1].contains(d.value)
    if tag == "prod":
        return (isinstance(d, DPair) and belongs(d.left, Type(eng, node[1]))
                and belongs(d.right, Type(eng, node[2])))
    if tag == "arrow":
        if not isinstance(d, DRel):
            return False
        dom, cod = Type(eng, node[1]), Type(eng, node[2])
        return all(not belongs(a, dom) or belongs(w, cod) for a, w in d.pairs)
    if tag == "or":
        return belongs(d, Type(eng, node[1])) or belongs(d, Type(eng, node[2]))
    if tag == "not":
        return not belongs(d, Type(eng, node[1]))
    return False


def enumerate_domain(cfg: OracleConfig):
    """Every element within the bounds, each once, shallowest first."""
    level = [Const(c) for c in cfg.universe]
    seen = set(level)
    yield from level
    for _ in range(cfg.depth - 1):
        outs = level + [OMEGA]
        new = [DPair(a, b) for a, b in product(level, level)]
        io = list(product(level, outs))
        for k in range(cfg.rel_size + 1):
            new.extend(DRel(frozenset(c)) for c in combinations(io, k))
        fresh = [x for x in new if x not in seen]
        seen.update(fresh)
        yield from fresh
        level = level + fresh


@dataclass
class _Classes:
    """Elements grouped by which constructor nodes of the type they satisfy."""
    ctors: list
    members: dict = field(default_factory=dict)  # (kind, frozenset) -> representative


def find_witness(t: Type, cfg: OracleConfig = OracleConfig()):
    """Some element of t within the bounds, or None.

    Two elements that satisfy the same constructor nodes reachable from t are
    indistinguishable by t, so the search keeps one representative per class.
    This explores exactly the elements enumerate_domain would produce.
    """
    eng = t.engine
    nodes = reachable(t)
    ctor = {n.id: eng.node(n.id) for n in nodes if eng.node(n.id)[0] in ("basic", "prod", "arrow")}
    prods = [i for i, nd in ctor.items() if nd[0] == "prod"]
    arrows = [i for i, nd in ctor.items() if nd[0] == "arrow"]
    full_cache: dict = {}

    def full(sig):
        hit = full_cache.get(sig)
        if hit is None:
            hit = _closure(eng, nodes, sig)
            full_cache[sig] = hit
        return hit

    reps: dict = {}
    for c in cfg.universe:
        sig = ("basic", frozenset(i for i, nd in ctor.items()
                                  if nd[0] == "basic" and nd[1].contains(c)))
        reps.setdefault(sig, Const(c))
    for sig, d in reps.items():
        if t.id in full(sig):
            return d
    for _ in range(cfg.depth - 1):
        classes = list(reps.items())
        new = {}
        for (s1, d1), (s2, d2) in product(classes, classes):
            f1, f2 = full(s1), full(s2)
            sig = ("prod", frozenset(i for i in prods
                                     if ctor[i][1] in f1 and ctor[i][2] in f2))
            if sig not in reps:
                new.setdefault(sig, DPair(d1, d2))
        # each input/output pair satisfies a set of arrows; a relation satisfies
        # the intersection of those sets
        vectors = {}
        outs = classes + [(None, OMEGA)]
        for (s1, d1), (s2, d2) in product(classes, outs):
            f1 = full(s1)
            f2 = full(s2) if s2 is not None else frozenset()
            vec = frozenset(i for i in arrows
                            if ctor[i][1] not in f1 or ctor[i][2] in f2)
            vectors.setdefault(vec, (d1, d2))
        vlist = list(vectors.items())
        for k in range(cfg.rel_size + 1):
            for combo in combinations(vlist, k):
                acc = frozenset(arrows)
                for vec, _ in combo:
                    acc &= vec
                sig = ("arrow", acc)
                if sig not in reps and sig not in new:
                    new[sig] = DRel(frozenset(p for _, p in combo))
        for sig, d in new.items():
            if t.id in full(sig):
                return d
        reps.update(new)
    return None


def _closure(eng, nodes, sig):
    """All reachable node ids satisfied by an element with constructor signature sig."""
    kind, hits = sig
    memo = {}

    def sat(i):
        if i in memo:
            return memo[i]
        node = eng.node(i)
        tag = node[0]
        if tag in ("basic", "prod", "arrow"):
            r = tag == kind and i in hits
        elif tag == "or":
            r = sat(node[1]) or sat(node[2])
        elif tag == "not":
            r = not sat(node[1])
        else:
            r = False
        memo[i] = r
        return r

    return frozenset(n.id for n in nodes if sat(n.id))
