"""Constants and the Boolean algebra of basic-type constant sets."""
from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Atom:
    """A user atom, written `` `name `` in surface syntax."""
    name: str

    def __str__(self):
        return "`" + self.name


def const_kind(value) -> str:
    # bool is a subclass of int, so test it first
    if isinstance(value, bool):
        return "bool"
    if isinstance(value, int):
        return "int"
    if isinstance(value, str):
        return "str"
    if isinstance(value, Atom):
        return "atom"
    raise TypeError(f"not a constant: {value!r}")


class Const:
    """A language constant. Equality keeps kinds apart, so Const(True) != Const(1)."""
    __slots__ = ("value", "kind")

    def __init__(self, value):
        object.__setattr__(self, "kind", const_kind(value))
        object.__setattr__(self, "value", value)

    def __setattr__(self, *_):
        raise AttributeError("Const is immutable")

    def __eq__(self, other):
        return isinstance(other, Const) and self.kind == other.kind and self.value == other.value

    def __hash__(self):
        return hash((self.kind, self.value))

    def __repr__(self):
        return f"Const({self.value!r})"

    def __str__(self):
        return render_const(self.value)


def render_const(value) -> str:
    kind = const_kind(value)
    if kind == "bool":
        return "true" if value else "false"
    if kind == "str":
        return '"' + value.replace("\\", "\\\\").replace('"', '\\"') + '"'
    return str(value)


@dataclass(frozen=True)
class Cof:
    """A finite (co=False) or cofinite (co=True) set of hashable literals."""
    co: bool = False
    items: frozenset = frozenset()

    def union(self, o: Cof) -> Cof:
        if not self.co and not o.co:
            return Cof(False, self.items | o.items)
        if self.co and o.co:
            return Cof(True, self.items & o.items)
        fin, cof = (self, o) if not self.co else (o, self)
        return Cof(True, cof.items - fin.items)

    def inter(self, o: Cof) -> Cof:
        return self.comp().union(o.comp()).comp()

    def comp(self) -> Cof:
        return Cof(not self.co, self.items)

    def contains(self, x) -> bool:
        return (x in self.items) != self.co

    def is_empty(self) -> bool:
        return not self.co and not self.items


# integer intervals: tuples (lo, hi) with None standing for an infinite end
def _norm_intervals(ivs):
    ivs = sorted(ivs, key=lambda iv: (float("-inf") if iv[0] is None else iv[0]))
    out = []
    for lo, hi in ivs:
        if lo is not None and hi is not None and lo > hi:
            continue
        if out:
            plo, phi = out[-1]
            if phi is None or lo is None or lo <= phi + 1:
                if phi is not None and (hi is None or hi > phi):
                    out[-1] = (plo, hi)
                continue
        out.append((lo, hi))
    return tuple(out)


def _comp_intervals(ivs):
    out, cur = [], None  # cur None = starts at -inf
    for lo, hi in ivs:
        if lo is not None:
            out.append((cur, lo - 1))
        if hi is None:
            return tuple(out)
        cur = hi + 1
    out.append((cur, None))
    return tuple(out)


def _inter_intervals(a, b):
    out = []
    for lo1, hi1 in a:
        for lo2, hi2 in b:
            lo = lo2 if lo1 is None else lo1 if lo2 is None else max(lo1, lo2)
            hi = hi2 if hi1 is None else hi1 if hi2 is None else min(hi1, hi2)
            if lo is None or hi is None or lo <= hi:
                out.append((lo, hi))
    return _norm_intervals(out)


@dataclass(frozen=True)
class BasicSet:
    """A set of constants, kept per kind in a canonical form."""
    ints: tuple = ()
    bools: frozenset = frozenset()
    strs: Cof = Cof()
    atoms: Cof = Cof()

    @staticmethod
    def of(value) -> BasicSet:
        kind = const_kind(value)
        if kind == "int":
            return BasicSet(ints=((value, value),))
        if kind == "bool":
            return BasicSet(bools=frozenset([value]))
        if kind == "str":
            return BasicSet(strs=Cof(False, frozenset([value])))
        return BasicSet(atoms=Cof(False, frozenset([value.name])))

    @staticmethod
    def interval(lo, hi) -> BasicSet:
        return BasicSet(ints=_norm_intervals([(lo, hi)]))

    def union(self, o: BasicSet) -> BasicSet:
        return BasicSet(_norm_intervals(self.ints + o.ints), self.bools | o.bools,
                        self.strs.union(o.strs), self.atoms.union(o.atoms))

    def inter(self, o: BasicSet) -> BasicSet:
        return BasicSet(_inter_intervals(self.ints, o.ints), self.bools & o.bools,
                        self.strs.inter(o.strs), self.atoms.inter(o.atoms))

    def comp(self) -> BasicSet:
        return BasicSet(_comp_intervals(self.ints), frozenset([True, False]) - self.bools,
                        self.strs.comp(), self.atoms.comp())

    def diff(self, o: BasicSet) -> BasicSet:
        return self.inter(o.comp())

    def is_empty(self) -> bool:
        return not self.ints and not self.bools and self.strs.is_empty() and self.atoms.is_empty()

    def contains(self, value) -> bool:
        kind = const_kind(value)
        if kind == "int":
            return any((lo is None or lo <= value) and (hi is None or value <= hi)
                       for lo, hi in self.ints)
        if kind == "bool":
            return value in self.bools
        if kind == "str":
            return self.strs.contains(value)
        return self.atoms.contains(value.name)

    def pieces(self) -> list[str]:
        """Surface tokens whose union denotes this set."""
        out = []
        if self.ints == ((None, None),):
            out.append("Int")
        else:
            for lo, hi in self.ints:
                if lo == hi:
                    out.append(str(lo))
                else:
                    out.append(f"{'*' if lo is None else lo}--{'*' if hi is None else hi}")
        if self.bools == frozenset([True, False]):
            out.append("Bool")
        else:
            out.extend(render_const(b) for b in sorted(self.bools, reverse=True))
        out.extend(_cof_pieces(self.strs, "String", render_const))
        out.extend(_cof_pieces(self.atoms, "Atom", lambda n: "`" + n))
        return out


def _cof_pieces(c: Cof, top: str, show) -> list[str]:
    items = [show(x) for x in sorted(c.items)]
    if not c.co:
        return items
    if not items:
        return [top]
    excl = items[0] if len(items) == 1 else "(" + " | ".join(items) + ")"
    return [f"({top} \\ {excl})"]


EMPTY_SET = BasicSet()
INT_SET = BasicSet(ints=((None, None),))
BOOL_SET = BasicSet(bools=frozenset([True, False]))
STRING_SET = BasicSet(strs=Cof(True))
ATOM_SET = BasicSet(atoms=Cof(True))
ALL_BASIC = EMPTY_SET.comp()
