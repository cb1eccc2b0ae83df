"""Maximal-sharing canonical forms of unannotated terms.

A form binds every distinct subterm once. Annotated forms can be checked, and
annotations for an unannotated form are found by repeated refinement."""
from __future__ import annotations

from dataclasses import dataclass, field, replace

from . import ops
from .basic import Const
from .subtype import is_empty, simplify, subtype
from .terms import App, Opaque, Pair, Prim, Proj, SAbs, SCase, Var
from .types import ENGINE, Engine, Type


class MscError(ValueError):
    """The expression is outside the source language handled here."""


class AnnotationRejected(Exception):
    def __init__(self, rule: str, binder: str | None, message: str):
        self.rule = rule
        self.binder = binder
        where = f" at {binder}" if binder else ""
        super().__init__(f"[{rule}]{where} {message}")


class Failure(Exception):
    def __init__(self, diagnostics: list[str], passes: int):
        self.diagnostics = diagnostics
        self.passes = passes
        super().__init__("no annotation found: " + "; ".join(diagnostics[:3]))


# ---------------------------------------------------------------- forms

@dataclass(frozen=True)
class Row:
    """Under env (pairs name/type), the annotated variable has the given type."""
    env: tuple
    type: Type

    def applies(self, gamma: dict) -> bool:
        return all(x in gamma and subtype(gamma[x], t) for x, t in self.env)


@dataclass(frozen=True)
class AConst:
    value: Const


@dataclass(frozen=True)
class AOpaque:
    name: str
    type: Type


@dataclass(frozen=True)
class AAbs:
    param: str
    body: object
    ann: tuple | None = None  # of Row


@dataclass(frozen=True)
class APair:
    left: str
    right: str


@dataclass(frozen=True)
class AApp:
    fn: str
    arg: str


@dataclass(frozen=True)
class AProj:
    index: int
    arg: str


@dataclass(frozen=True)
class ACase:
    scrutinee: str
    test: Type
    then: str
    else_: str


@dataclass(frozen=True)
class APrim:
    op: str
    operands: tuple  # variable names, or constants kept inline


@dataclass(frozen=True)
class MVar:
    name: str


@dataclass(frozen=True)
class MBind:
    name: str
    atom: object
    body: object
    ann: tuple | None = None  # of Row


def atom_vars(a) -> tuple:
    if isinstance(a, APair):
        return (a.left, a.right)
    if isinstance(a, AApp):
        return (a.fn, a.arg)
    if isinstance(a, AProj):
        return (a.arg,)
    if isinstance(a, ACase):
        return (a.scrutinee, a.then, a.else_)
    if isinstance(a, APrim):
        return tuple(o for o in a.operands if isinstance(o, str))
    return ()


def bindings(k) -> list:
    """Top-level binds of a form, outermost first."""
    out = []
    while isinstance(k, MBind):
        out.append(k)
        k = k.body
    return out


def result_var(k) -> str:
    while isinstance(k, MBind):
        k = k.body
    return k.name


def walk_binders(k):
    """Every bind and abstraction in the form, in binding order."""
    for b in bindings(k):
        yield b
        if isinstance(b.atom, AAbs):
            yield b.atom
            yield from walk_binders(b.atom.body)


# ---------------------------------------------------------------- α-keys

def alpha_key(e, bound: tuple = ()):
    """Nameless rendering of a source term: bound variables become indices."""
    if isinstance(e, Var):
        for depth, name in enumerate(reversed(bound)):
            if name == e.name:
                return ("#", depth)
        return ("v", e.name)
    if isinstance(e, Const):
        return ("c", e.kind, e.value)
    if isinstance(e, Opaque):
        return ("o", e.name)
    if isinstance(e, SAbs):
        return ("fun", alpha_key(e.body, bound + (e.param,)))
    if isinstance(e, App):
        return ("app", alpha_key(e.fn, bound), alpha_key(e.arg, bound))
    if isinstance(e, Pair):
        return ("pair", alpha_key(e.left, bound), alpha_key(e.right, bound))
    if isinstance(e, Proj):
        return ("proj", e.index, alpha_key(e.arg, bound))
    if isinstance(e, SCase):
        return ("case", alpha_key(e.scrutinee, bound), e.test.id,
                alpha_key(e.then, bound), alpha_key(e.else_, bound))
    if isinstance(e, Prim):
        return ("prim", e.op) + tuple(alpha_key(a, bound) for a in e.args)
    raise MscError(f"not a source-language expression: {type(e).__name__}")


def alpha_equiv(a, b) -> bool:
    return alpha_key(a) == alpha_key(b)


def source_free_vars(e) -> set:
    if isinstance(e, Var):
        return {e.name}
    if isinstance(e, SAbs):
        return source_free_vars(e.body) - {e.param}
    out = set()
    for c in _src_children(e):
        out |= source_free_vars(c)
    return out


def _src_children(e):
    if isinstance(e, SAbs):
        return (e.body,)
    if isinstance(e, App):
        return (e.fn, e.arg)
    if isinstance(e, Pair):
        return (e.left, e.right)
    if isinstance(e, Proj):
        return (e.arg,)
    if isinstance(e, SCase):
        return (e.scrutinee, e.then, e.else_)
    if isinstance(e, Prim):
        return e.args
    if isinstance(e, (Var, Const, Opaque)):
        return ()
    raise MscError(f"not a source-language expression: {type(e).__name__}")


# ---------------------------------------------------------------- construction

def _all_names(e, acc):
    if isinstance(e, Var):
        acc.add(e.name)
    elif isinstance(e, SAbs):
        acc.add(e.param)
    for c in _src_children(e):
        _all_names(c, acc)
    return acc


class _Builder:
    def __init__(self, e):
        self.taken = _all_names(e, set())
        self.free = source_free_vars(e)
        self.counter = 0
        self.params: dict = {}      # unique param name -> nesting depth
        self.table: dict = {}       # α-key -> binding variable
        self.homes: dict = {}       # home param (or None) -> [(var, atom)]

    def fresh_var(self):
        while True:
            self.counter += 1
            name = f"x{self.counter}"
            if name not in self.taken:
                self.taken.add(name)
                return name

    def unique(self, e, ren: dict):
        """α-rename every abstraction parameter to a distinct name."""
        if isinstance(e, Var):
            return Var(ren.get(e.name, e.name))
        if isinstance(e, SAbs):
            name = e.param
            # a parameter may not share its name with another parameter or a free variable
            if name in self.params or name in self.free:
                k = 1
                while f"{e.param}_{k}" in self.taken:
                    k += 1
                name = f"{e.param}_{k}"
            self.taken.add(name)
            self.params[name] = None
            return SAbs(name, self.unique(e.body, {**ren, e.param: name}))
        if isinstance(e, App):
            return App(self.unique(e.fn, ren), self.unique(e.arg, ren))
        if isinstance(e, Pair):
            return Pair(self.unique(e.left, ren), self.unique(e.right, ren))
        if isinstance(e, Proj):
            return Proj(e.index, self.unique(e.arg, ren))
        if isinstance(e, SCase):
            return SCase(self.unique(e.scrutinee, ren), e.test, self.unique(e.then, ren),
                         self.unique(e.else_, ren))
        if isinstance(e, Prim):
            return Prim(e.op, tuple(self.unique(a, ren) for a in e.args))
        return e

    def home(self, e, depth_of):
        params = [x for x in source_free_vars(e) if x in depth_of]
        return max(params, key=lambda x: depth_of[x]) if params else None

    def visit(self, e, depth_of):
        """Variable standing for e; emits bindings into their homes."""
        if isinstance(e, Var):
            return e.name
        key = alpha_key(e)
        hit = self.table.get(key)
        if hit is not None:
            return hit
        if isinstance(e, Const):
            atom = AConst(e)
        elif isinstance(e, Opaque):
            atom = AOpaque(e.name, e.type)
        elif isinstance(e, SAbs):
            inner = {**depth_of, e.param: len(depth_of)}
            self.homes.setdefault(e.param, [])
            res = self.visit(e.body, inner)
            body = MVar(res)
            for var, a in reversed(self.homes.pop(e.param)):
                body = MBind(var, a, body)
            atom = AAbs(e.param, body)
        elif isinstance(e, App):
            atom = AApp(self.visit(e.fn, depth_of), self.visit(e.arg, depth_of))
        elif isinstance(e, Pair):
            atom = APair(self.visit(e.left, depth_of), self.visit(e.right, depth_of))
        elif isinstance(e, Proj):
            atom = AProj(e.index, self.visit(e.arg, depth_of))
        elif isinstance(e, SCase):
            atom = ACase(self.visit(e.scrutinee, depth_of), e.test,
                         self.visit(e.then, depth_of), self.visit(e.else_, depth_of))
        elif isinstance(e, Prim):
            atom = APrim(e.op, tuple(a if isinstance(a, Const) else self.visit(a, depth_of)
                                     for a in e.args))
        else:
            raise MscError(f"not a source-language expression: {type(e).__name__}")
        var = self.fresh_var()
        self.table[key] = var
        self.homes.setdefault(self.home(e, depth_of), []).append((var, atom))
        return var


def to_msc(e):
    """The maximal-sharing form of a source expression; bindings in post-order."""
    b = _Builder(e)
    e = b.unique(e, {})
    b.homes[None] = []
    res = b.visit(e, {})
    body = MVar(res)
    for var, a in reversed(b.homes[None]):
        body = MBind(var, a, body)
    return body


def unwind(k):
    """Substitute every binding back into its uses."""
    return _unwind(k, {})


def binding_sources(k) -> list:
    """(name, source term) for each top-level bind, outermost first."""
    out, sub = [], {}
    for b in bindings(k):
        sub[b.name] = _unwind_atom(b.atom, sub)
        out.append((b.name, sub[b.name]))
    return out


def _unwind(k, sub):
    if isinstance(k, MVar):
        return sub.get(k.name, Var(k.name))
    if isinstance(k, MBind):
        return _unwind(k.body, {**sub, k.name: _unwind_atom(k.atom, sub)})
    raise MscError(f"not a form: {k!r}")


def _unwind_atom(a, sub):
    v = lambda x: sub.get(x, Var(x))  # noqa: E731
    if isinstance(a, AConst):
        return a.value
    if isinstance(a, AOpaque):
        return Opaque(a.name, a.type)
    if isinstance(a, AAbs):
        inner = {k: t for k, t in sub.items() if k != a.param}
        return SAbs(a.param, _unwind(a.body, inner))
    if isinstance(a, APair):
        return Pair(v(a.left), v(a.right))
    if isinstance(a, AApp):
        return App(v(a.fn), v(a.arg))
    if isinstance(a, AProj):
        return Proj(a.index, v(a.arg))
    if isinstance(a, ACase):
        return SCase(v(a.scrutinee), a.test, v(a.then), v(a.else_))
    if isinstance(a, APrim):
        return Prim(a.op, tuple(o if isinstance(o, Const) else v(o) for o in a.operands))
    raise MscError(f"not an atom: {a!r}")


# ---------------------------------------------------------------- atom typing

class _AtomFail(Exception):
    """An atom rule failed; requests name variables whose split would help."""

    def __init__(self, rule, message, requests=()):
        self.rule = rule
        self.requests = list(requests)
        super().__init__(message)


def _lookup(gamma, x):
    if x not in gamma:
        raise _AtomFail("var", f"{x} is not bound in this context")
    return gamma[x]


def _prim_atom_type(a: APrim, gamma, engine):
    from .lang import prim_type
    t = prim_type(a.op, engine)
    for o in a.operands:
        arg = engine.const(o.value) if isinstance(o, Const) else _lookup(gamma, o)
        d = ops.dom(t)
        if not subtype(arg, d):
            reqs = [(o, d)] if isinstance(o, str) else []
            raise _AtomFail("->E", f"operand {o} of type {arg} is outside {d}", reqs)
        t = ops.apply(t, arg)
    return t


def _simple_atom_type(a, gamma, engine):
    """Rules for every atom except abstractions."""
    if isinstance(a, AConst):
        return engine.const(a.value.value)
    if isinstance(a, AOpaque):
        return a.type
    if isinstance(a, APair):
        return engine.prod(_lookup(gamma, a.left), _lookup(gamma, a.right))
    if isinstance(a, AApp):
        tf, ta = _lookup(gamma, a.fn), _lookup(gamma, a.arg)
        if not ops.is_function_type(tf):
            raise _AtomFail("->E", f"{a.fn} : {tf} is not a function",
                            [(a.fn, engine.arrow(engine.empty(), engine.any()))])
        d = ops.dom(tf)
        if not subtype(ta, d):
            raise _AtomFail("->E", f"{a.arg} : {ta} is outside the domain {d}", [(a.arg, d)])
        return ops.apply(tf, ta)
    if isinstance(a, AProj):
        t = _lookup(gamma, a.arg)
        pair = engine.prod(engine.any(), engine.any())
        if not subtype(t, pair):
            raise _AtomFail("xE", f"{a.arg} : {t} is not a pair", [(a.arg, pair)])
        return ops.proj(a.index, t)
    if isinstance(a, ACase):
        t0 = _lookup(gamma, a.scrutinee)
        if is_empty(t0):
            return engine.empty()
        if subtype(t0, a.test):
            return _lookup(gamma, a.then)
        if subtype(t0, ~a.test):
            return _lookup(gamma, a.else_)
        raise _AtomFail("case", f"{a.scrutinee} : {t0} straddles the test {a.test}",
                        [(a.scrutinee, a.test)])
    if isinstance(a, APrim):
        return _prim_atom_type(a, gamma, engine)
    raise MscError(f"not an atom: {a!r}")


# ---------------------------------------------------------------- checking

def check_annotated(env: dict, k, engine: Engine = ENGINE) -> Type:
    """Type an annotated form; raises AnnotationRejected."""
    if isinstance(k, MVar):
        if k.name not in env:
            raise AnnotationRejected("var", k.name, "unbound variable")
        return env[k.name]
    if not isinstance(k, MBind):
        raise MscError(f"not a form: {k!r}")
    if k.ann is None:
        raise AnnotationRejected("bind", k.name, "binding without annotation")
    if k.name in env:
        raise AnnotationRejected("bind", k.name, "variable already in the environment")
    rows = [r for r in k.ann if r.applies(env)]
    if not rows:  # no row selected: the binding plays no part here
        return check_annotated(env, k.body, engine)
    t = _check_atom(env, k.name, k.atom, engine)
    cover = engine.join(r.type for r in rows)
    if not subtype(t, cover):
        raise AnnotationRejected("bind", k.name, f"atom type {t} is not within {cover}")
    return engine.join(check_annotated({**env, k.name: r.type}, k.body, engine) for r in rows)


def _check_atom(env, name, a, engine):
    if isinstance(a, AAbs):
        if a.ann is None:
            raise AnnotationRejected("->I", a.param, "parameter without annotation")
        rows = [r for r in a.ann if r.applies(env)]
        if not rows:
            raise AnnotationRejected("->I", a.param, "no annotation row applies")
        arrows = [engine.arrow(r.type, check_annotated({**env, a.param: r.type}, a.body, engine))
                  for r in rows]
        return engine.meet(arrows)
    try:
        return _simple_atom_type(a, env, engine)
    except _AtomFail as err:
        raise AnnotationRejected(err.rule, name, str(err)) from None


# ---------------------------------------------------------------- inference

def split(t: Type, tests) -> list:
    """t cut by each test type; empty pieces dropped (Empty stays as itself)."""
    if is_empty(t):
        return [t]
    parts = [t]
    for tau in tests:
        nxt = []
        for p in parts:
            for q in (p & tau, p - tau):
                if not is_empty(q):
                    nxt.append(simplify(q))
        parts = nxt
    return parts


class _Fail(Exception):
    pass


@dataclass
class InferResult:
    form: object
    type: Type
    passes: int
    history: list = field(default_factory=list)  # per pass: {binder: [row types]}


class _Pass:
    def __init__(self, engine, splits, atoms):
        self.engine = engine
        self.splits = splits          # var -> list of test types
        self.atoms = atoms            # var -> atom bound to it
        self.rows: dict = {}          # binder -> list of (gamma, type)
        self.requests: list = []      # (var, type)
        self.diagnostics: list = []

    def request(self, var, tau, gamma, seen=None):
        seen = seen if seen is not None else set()
        if (var, tau) in seen:
            return
        seen.add((var, tau))
        self.requests.append((var, tau))
        # a split of an application result asks for a split of its argument
        a = self.atoms.get(var)
        if isinstance(a, AApp) and a.fn in gamma:
            for s in _arrow_domains(gamma[a.fn], self.engine):
                self.request(a.arg, s, gamma, seen)
        elif isinstance(a, APrim) and len(a.operands) == 1 and isinstance(a.operands[0], str):
            from .lang import prim_type
            for s in _arrow_domains(prim_type(a.op, self.engine), self.engine):
                self.request(a.operands[0], s, gamma, seen)

    def form(self, k, gamma) -> Type:
        if isinstance(k, MVar):
            if k.name not in gamma:
                self.diagnostics.append(f"{k.name} is needed but has no type in this context")
                raise _Fail()
            return gamma[k.name]
        try:
            t = self.atom(k.name, k.atom, gamma)
        except _AtomFail as err:
            self.diagnostics.append(f"{k.name}: {err}")
            for var, tau in err.requests:
                self.request(var, tau, gamma)
            return self.form(k.body, gamma)
        parts = split(t, self.splits.get(k.name, []))
        self.rows.setdefault(k.name, []).extend((gamma, p) for p in parts)
        return self.engine.join(self.form(k.body, {**gamma, k.name: p}) for p in parts)

    def atom(self, name, a, gamma) -> Type:
        if not isinstance(a, AAbs):
            return _simple_atom_type(a, gamma, self.engine)
        arrows = []
        for p in split(self.engine.any(), self.splits.get(a.param, [])):
            inner = {**gamma, a.param: p}
            try:
                s = self.form(a.body, inner)
            except _Fail:
                continue  # this part of the domain is rejected
            self.rows.setdefault(a.param, []).append((gamma, p))
            arrows.append(self.engine.arrow(p, s))
        if not arrows:
            raise _AtomFail("->I", f"no part of the domain of {a.param} type-checks")
        return self.engine.meet(arrows)


def _arrow_domains(t: Type, engine) -> list:
    out = []
    for s in engine.dnf(t).summands:
        if s.kind == "arrow":
            for a in sorted(s.pos):
                d = engine.child(a, 0)
                if d not in out:
                    out.append(d)
    return out


def _collect_atoms(k, acc):
    for b in bindings(k):
        acc[b.name] = b.atom
        if isinstance(b.atom, AAbs):
            _collect_atoms(b.atom.body, acc)
    return acc


def _binder_order(k, acc):
    for b in bindings(k):
        acc.append(b.name)
        if isinstance(b.atom, AAbs):
            acc.append(b.atom.param)
            _binder_order(b.atom.body, acc)
    return acc


def infer_annotations(k, engine: Engine = ENGINE, max_passes: int = 16,
                      env: dict | None = None) -> InferResult:
    """Refine annotations pass by pass until no new split is requested."""
    env = dict(env or {})
    atoms = _collect_atoms(k, {})
    order = _binder_order(k, [])
    splits: dict = {}
    history = []
    result, last = None, None
    for n in range(1, max_passes + 1):
        run = _Pass(engine, splits, atoms)
        try:
            result = run.form(k, env)
        except _Fail:
            result = None
        last = run
        history.append({x: [t for _, t in run.rows.get(x, [])] for x in order})
        fresh = False
        for var, tau in run.requests:
            known = splits.setdefault(var, [])
            if not any(tau == u for u in known):
                known.append(tau)
                fresh = True
        if not fresh:
            break
    if result is None:
        raise Failure(last.diagnostics or ["no context type-checks"], n)
    annotated = _annotate(k, _rows_for(last.rows, order))
    annotated = _simplify(annotated, env, engine, order)
    try:
        final = check_annotated(env, annotated, engine)
    except AnnotationRejected as err:  # never report an unchecked success
        raise Failure([f"inferred annotations rejected: {err}"], n) from None
    return InferResult(annotated, final, n, history)


def _rows_for(raw: dict, order: list) -> dict:
    """Restrict row environments to variables that take several types, dedupe."""
    varying = set()
    for x, rs in raw.items():
        types = []
        for _, t in rs:
            if t not in types:
                types.append(t)
        if len(types) > 1:
            varying.add(x)
    out = {}
    for x, rs in raw.items():
        rows = []
        for gamma, t in rs:
            env = tuple((y, gamma[y]) for y in order if y in gamma and y in varying)
            row = Row(env, t)
            if row not in rows:
                rows.append(row)
        out[x] = tuple(rows)
    return out


def _annotate(k, rows: dict):
    if isinstance(k, MVar):
        return k
    a = k.atom
    if isinstance(a, AAbs):
        a = AAbs(a.param, _annotate(a.body, rows), rows.get(a.param, ()))
    return MBind(k.name, a, _annotate(k.body, rows), rows.get(k.name, ()))


def with_annotations(k, rows: dict):
    """Copy of k with the annotations of the named binders replaced."""
    for name, new in rows.items():
        k = _replace_rows(k, name, tuple(new))
    return k


def _replace_rows(k, name, new):
    if isinstance(k, MVar):
        return k
    a = k.atom
    if isinstance(a, AAbs):
        a = replace(a, body=_replace_rows(a.body, name, new),
                    ann=new if a.param == name else a.ann)
    return MBind(k.name, a, _replace_rows(k.body, name, new),
                 new if k.name == name else k.ann)


def _rows_of(k, name):
    for b in walk_binders(k):
        if isinstance(b, MBind) and b.name == name:
            return b.ann
        if isinstance(b, AAbs) and b.param == name:
            return b.ann
    return None


def _simplify(k, env, engine, order):
    """Merge a binder's rows into one environment-free row when that still checks."""
    try:
        target = check_annotated(env, k, engine)
    except AnnotationRejected:
        return k
    for name in order:
        rows = _rows_of(k, name)
        if not rows or all(not r.env for r in rows):
            continue
        types = []
        for r in rows:
            if r.type not in types:
                types.append(r.type)
        candidates = [tuple(Row((), t) for t in types)]
        if len(types) > 1:
            candidates.insert(0, (Row((), engine.join(types)),))
        for cand in candidates:
            trial = _replace_rows(k, name, cand)
            try:
                t = check_annotated(env, trial, engine)
            except AnnotationRejected:
                continue
            if subtype(t, target) and subtype(target, t):
                k = trial
                break
    return k


# ---------------------------------------------------------------- printing

def _show_type(t):
    return str(t)


def render_rows(rows) -> str:
    items = []
    for r in rows:
        if r.env:
            env = ", ".join(f"{x}: {_show_type(t)}" for x, t in r.env)
            items.append(f"[{env}] {_show_type(r.type)}")
        else:
            items.append(_show_type(r.type))
    return "{" + "; ".join(items) + "}"


def _show_operand(o):
    return str(o) if isinstance(o, Const) else o


def render_atom(a, indent: int) -> str:
    if isinstance(a, AConst):
        return str(a.value)
    if isinstance(a, AOpaque):
        return a.name
    if isinstance(a, AAbs):
        head = f"fun {a.param}"
        if a.ann is not None:
            head += f" : {render_rows(a.ann)}"
        return head + " ->\n" + render_form(a.body, indent + 2)
    if isinstance(a, APair):
        return f"({a.left}, {a.right})"
    if isinstance(a, AApp):
        return f"{a.fn} {a.arg}"
    if isinstance(a, AProj):
        return f"{'fst' if a.index == 1 else 'snd'} {a.arg}"
    if isinstance(a, ACase):
        return f"case {a.scrutinee} in {_show_type(a.test)} ? {a.then} : {a.else_}"
    if isinstance(a, APrim):
        from .lang import PRIM_SYMBOLS
        ops_ = [_show_operand(o) for o in a.operands]
        if a.op in PRIM_SYMBOLS and len(ops_) == 2:
            return f"{ops_[0]} {PRIM_SYMBOLS[a.op]} {ops_[1]}"
        return f"{a.op} {' '.join(ops_)}"
    raise MscError(f"not an atom: {a!r}")


def render_form(k, indent: int = 0) -> str:
    pad = " " * indent
    lines = []
    while isinstance(k, MBind):
        head = f"{pad}bind {k.name}"
        if k.ann is not None:
            head += f" : {render_rows(k.ann)}"
        lines.append(f"{head} = {render_atom(k.atom, indent)} in")
        k = k.body
    lines.append(f"{pad}{k.name}")
    return "\n".join(lines)


def check_msc_invariants(k) -> list[str]:
    """Violations of the maximal-sharing conditions (empty when the form is canonical)."""
    problems = []
    keys = {}
    for b in walk_binders(k):
        if not isinstance(b, MBind):
            continue
        key = alpha_key(_unwind_atom(b.atom, {}))
        if key in keys:
            problems.append(f"{b.name} and {keys[key]} bind the same atom")
        keys[key] = b.name
    _check_scoping(k, (), problems)
    return problems


def _form_free(k) -> set:
    if isinstance(k, MVar):
        return {k.name}
    inner = _form_free(k.body) - {k.name}
    return inner | _atom_free(k.atom)


def _atom_free(a) -> set:
    if isinstance(a, AAbs):
        return _form_free(a.body) - {a.param}
    return set(atom_vars(a))


def _check_scoping(k, lambdas, problems):
    for b in bindings(k):
        if b.name not in _form_free(b.body):
            problems.append(f"{b.name} is never used")
        if lambdas:
            fv_lam = lambdas[-1]
            if _atom_free(b.atom) <= fv_lam:
                problems.append(f"{b.name} could be hoisted out of its abstraction")
        if isinstance(b.atom, AAbs):
            _check_scoping(b.atom.body, lambdas + (_atom_free(b.atom),), problems)


__all__ = ["AAbs", "AApp", "ACase", "AConst", "AOpaque", "APair", "APrim", "AProj",
           "AnnotationRejected", "Failure", "InferResult", "MBind", "MVar", "Row",
           "MscError", "alpha_equiv", "alpha_key", "binding_sources", "bindings",
           "check_annotated", "check_msc_invariants", "infer_annotations",
           "render_form", "render_rows", "split", "to_msc", "unwind", "with_annotations"]
