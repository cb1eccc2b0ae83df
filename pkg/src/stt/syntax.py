"""Parsing of types and programs, plus rendering of types back to text.

Type precedence, loosest first: `where`, `->` (right associative), `|` and `\\`
(left associative), `&`, `~`.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field

from . import gradual
from .basic import (ATOM_SET, BOOL_SET, INT_SET, STRING_SET, Atom, BasicSet, Const)
from .terms import (Abs, App, Choice, Let, Match, Opaque, PAnd, Pair, POr, PPair, Prim,
                    Proj, PType, PVar, SAbs, SCase, TypeCase, Var, fresh)
from .types import (ENGINE, Engine, TAnd, TAny, TArrow, TBasic, TDiff, TDyn, TEmpty, TNot,
                    TOr, TProd, TRef, TWhere, Type)


class ParseError(ValueError):
    def __init__(self, message, pos=None, text=None):
        self.pos = pos
        if pos is not None and text is not None:
            line = text.count("\n", 0, pos) + 1
            col = pos - (text.rfind("\n", 0, pos) + 1) + 1
            self.span = (line, col)
            message = f"{message} at line {line}, column {col}"
        else:
            self.span = None
        super().__init__(message)


BUILTIN_TYPES = {
    "Int": TBasic(INT_SET), "Bool": TBasic(BOOL_SET), "String": TBasic(STRING_SET),
    "Atom": TBasic(ATOM_SET), "Any": TAny(), "Empty": TEmpty(),
}

KEYWORDS = {"fun", "case", "in", "choice", "let", "match", "with", "fst", "snd", "not",
            "if", "then", "else", "mod", "type", "val", "where", "and", "as", "true",
            "false"}

_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<int>\d+)
  | (?P<str>"(?:[^"\\]|\\.)*")
  | (?P<atom>`[A-Za-z_][A-Za-z0-9_']*)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
  | (?P<sym>->|--|==|[()\[\]{},;|&~\\?:=+\-@*])
""", re.VERBOSE)


@dataclass
class Tok:
    kind: str
    text: str
    pos: int


def tokenize(text: str) -> list[Tok]:
    toks, i, n = [], 0, len(text)
    while i < n:
        if text.startswith("(*", i):
            depth, j = 1, i + 2
            while depth and j < n:
                if text.startswith("(*", j):
                    depth, j = depth + 1, j + 2
                elif text.startswith("*)", j):
                    depth, j = depth - 1, j + 2
                else:
                    j += 1
            if depth:
                raise ParseError("unterminated comment", i, text)
            i = j
            continue
        m = _TOKEN.match(text, i)
        if not m:
            raise ParseError(f"unexpected character {text[i]!r}", i, text)
        kind = m.lastgroup
        if kind != "ws":
            toks.append(Tok(kind, m.group(), i))
        i = m.end()
    toks.append(Tok("eof", "", n))
    return toks


def _unquote(s: str) -> str:
    return re.sub(r"\\(.)", r"\1", s[1:-1])


class Parser:
    def __init__(self, text: str, engine: Engine = ENGINE, types: dict | None = None,
                 vals: dict | None = None):
        self.text = text
        self.toks = tokenize(text)
        self.i = 0
        self.engine = engine
        self.types = dict(types or {})
        self.vals = dict(vals or {})

    # -- token helpers
    @property
    def tok(self) -> Tok:
        return self.toks[self.i]

    def peek(self, k=1) -> Tok:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def at(self, *texts) -> bool:
        t = self.tok
        return t.kind in ("sym", "ident") and t.text in texts

    def advance(self) -> Tok:
        t = self.tok
        self.i += 1
        return t

    def expect(self, text) -> Tok:
        if not self.at(text):
            self.fail(f"expected {text!r}, found {self.tok.text or 'end of input'!r}")
        return self.advance()

    def fail(self, msg):
        raise ParseError(msg, self.tok.pos, self.text)

    def ident(self) -> str:
        t = self.tok
        if t.kind != "ident" or t.text in KEYWORDS:
            self.fail(f"expected an identifier, found {t.text or 'end of input'!r}")
        return self.advance().text

    def done(self):
        if self.tok.kind != "eof":
            self.fail(f"unexpected {self.tok.text!r}")

    # -- types
    def texpr(self):
        body = self.t_arrow()
        if self.at("where"):
            self.advance()
            eqs = [self._equation()]
            while self.at("and"):
                self.advance()
                eqs.append(self._equation())
            return TWhere(body, tuple(eqs))
        return body

    def _equation(self):
        name = self.ident()
        self.expect("=")
        return (name, self.t_arrow())

    def t_arrow(self):
        left = self.t_union()
        if self.at("->"):
            self.advance()
            return TArrow(left, self.t_arrow())
        return left

    def t_union(self):
        left = self.t_inter()
        while self.at("|", "\\"):
            op = self.advance().text
            right = self.t_inter()
            left = TOr(left, right) if op == "|" else TDiff(left, right)
        return left

    def t_inter(self):
        left = self.t_unary()
        while self.at("&"):
            self.advance()
            left = TAnd(left, self.t_unary())
        return left

    def t_unary(self):
        if self.at("~"):
            self.advance()
            return TNot(self.t_unary())
        return self.t_primary()

    def _int_lit(self):
        neg = False
        if self.at("-"):
            self.advance()
            neg = True
        if self.tok.kind != "int":
            self.fail("expected an integer")
        v = int(self.advance().text)
        return -v if neg else v

    def _bound(self):
        if self.at("*"):
            self.advance()
            return None
        return self._int_lit()

    def t_primary(self):
        t = self.tok
        if t.kind == "int" or self.at("-", "*"):
            lo = self._bound()
            if self.at("--"):
                self.advance()
                hi = self._bound()
                return TBasic(BasicSet.interval(lo, hi))
            if lo is None:
                self.fail("expected '--' after '*'")
            return TBasic(BasicSet.of(lo))
        if t.kind == "str":
            self.advance()
            return TBasic(BasicSet.of(_unquote(t.text)))
        if t.kind == "atom":
            self.advance()
            return TBasic(BasicSet.of(Atom(t.text[1:])))
        if self.at("true", "false"):
            self.advance()
            return TBasic(BasicSet.of(t.text == "true"))
        if self.at("?"):
            self.advance()
            return TDyn()
        if self.at("("):
            self.advance()
            first = self.texpr()
            if self.at(","):
                items = [first]
                while self.at(","):
                    self.advance()
                    items.append(self.texpr())
                self.expect(")")
                out = items[-1]
                for it in reversed(items[:-1]):
                    out = TProd(it, out)
                return out
            self.expect(")")
            return first
        if t.kind == "ident" and t.text not in KEYWORDS:
            self.advance()
            if t.text in BUILTIN_TYPES:
                return BUILTIN_TYPES[t.text]
            return TRef(t.text)
        self.fail(f"expected a type, found {t.text or 'end of input'!r}")

    def build_type(self, e):
        try:
            return gradual.build(self.engine, e, self.types)
        except ValueError as err:
            if isinstance(err, ParseError):
                raise
            raise ParseError(str(err)) from err

    def static_type(self):
        pos = self.tok.pos
        t = self.build_type(self.texpr())
        if not isinstance(t, Type):
            raise ParseError("the dynamic type ? is not allowed here", pos, self.text)
        return t

    # -- declarations
    def declarations(self):
        eqs = {}
        while self.at("type", "val"):
            if self.advance().text == "type":
                name = self.ident()
                self.expect("=")
                eqs[name] = self.texpr()
            else:
                if eqs:
                    self._flush_types(eqs)
                    eqs = {}
                name = self.ident()
                self.expect(":")
                self.vals[name] = self.static_type()
        if eqs:
            self._flush_types(eqs)

    def _flush_types(self, eqs):
        try:
            if any(_has_dyn(t) for t in eqs.values()):
                self.types.update(gradual._rec(self.engine, eqs, self.types))
            else:
                self.types.update(self.engine.rec(eqs, {k: v for k, v in self.types.items()
                                                        if isinstance(v, Type)}))
        except ValueError as err:
            raise ParseError(str(err)) from err

    # -- expressions
    def expr(self):
        if self.at("fun"):
            return self.e_fun()
        if self.at("let"):
            return self.e_let()
        if self.at("case"):
            return self.e_case()
        if self.at("match"):
            return self.e_match()
        if self.at("if"):
            self.advance()
            cond = self.expr()
            self.expect("then")
            a = self.expr()
            self.expect("else")
            b = self.expr()
            return IfThenElse(cond, a, b)
        return self.e_cmp()

    def e_fun(self):
        self.expect("fun")
        if self.at("("):
            self.advance()
            iface = self._arrow_annot()
            while self.at(";"):
                self.advance()
                iface += self._arrow_annot()
            self.expect(")")
            x = self.ident()
            self.expect("->")
            return Abs(tuple(iface), x, self.expr())
        x = self.ident()
        self.expect("->")
        return SAbs(x, self.expr())

    def _arrow_annot(self):
        """One interface entry: an arrow, or an intersection of arrows (several entries)."""
        pos = self.tok.pos
        t = self.build_type(self.texpr())
        if not isinstance(t, Type):
            raise ParseError("interfaces must be static types", pos, self.text)
        summands = self.engine.dnf(t).summands
        if len(summands) != 1 or summands[0].kind != "arrow" or summands[0].neg \
                or not summands[0].pos:
            raise ParseError("interface entries must be arrows s -> t", pos, self.text)
        eng = self.engine
        return [(eng.child(a, 0), eng.child(a, 1)) for a in sorted(summands[0].pos)]

    def e_let(self):
        self.expect("let")
        x = self.ident()
        annot = None
        if self.at(":"):
            self.advance()
            annot = self.static_type()
        self.expect("=")
        bound = self.expr()
        self.expect("in")
        return Let(x, annot, bound, self.expr())

    def e_case(self):
        self.expect("case")
        binder = None
        if self.tok.kind == "ident" and self.tok.text not in KEYWORDS and self.peek().text == "=" \
                and self.peek().kind == "sym":
            binder = self.ident()
            self.expect("=")
        scrut = self.expr()
        self.expect("in")
        test = self.static_type()
        self.expect("?")
        a = self.expr()
        self.expect(":")
        b = self.expr()
        if binder is None:
            return SCase(scrut, test, a, b)
        return TypeCase(binder, scrut, test, a, b)

    def e_match(self):
        self.expect("match")
        scrut = self.expr()
        self.expect("with")
        if self.at("|"):
            self.advance()
        branches = [self._branch()]
        while self.at("|"):
            self.advance()
            branches.append(self._branch())
        return Match(scrut, tuple(branches))

    def _branch(self):
        from .patterns import MalformedPattern, validate
        pos = self.tok.pos
        p = self.pattern()
        try:
            validate(p)
        except MalformedPattern as err:
            raise ParseError(str(err), pos, self.text) from err
        self.expect("->")
        return (p, self.expr())

    def e_cmp(self):
        left = self.e_add()
        if self.at("=="):
            self.advance()
            left = Prim("eq", (left, self.e_add()))
        return left

    _BINOPS = {"+": "add", "-": "sub", "@": "concat", "mod": "mod"}

    def e_add(self):
        left = self.e_app()
        while self.at(*self._BINOPS):
            op = self._BINOPS[self.advance().text]
            left = Prim(op, (left, self.e_app()))
        return left

    def e_app(self):
        if self.at("fst", "snd"):
            i = 1 if self.advance().text == "fst" else 2
            return Proj(i, self.e_app())
        if self.at("not"):
            self.advance()
            return Prim("not", (self.e_app(),))
        e = self.e_atom()
        while self._starts_atom():
            e = App(e, self.e_atom())
        return e

    def _starts_atom(self):
        t = self.tok
        if t.kind in ("int", "str", "atom"):
            return True
        if t.kind == "ident":
            return t.text not in KEYWORDS or t.text in ("true", "false", "choice")
        return self.at("(")

    def e_atom(self):
        t = self.tok
        if t.kind == "int":
            self.advance()
            return Const(int(t.text))
        if self.at("-") and self.peek().kind == "int":
            self.advance()
            return Const(-int(self.advance().text))
        if t.kind == "str":
            self.advance()
            return Const(_unquote(t.text))
        if t.kind == "atom":
            self.advance()
            return Const(Atom(t.text[1:]))
        if self.at("true", "false"):
            self.advance()
            return Const(t.text == "true")
        if self.at("choice"):
            self.advance()
            self.expect("(")
            a = self.expr()
            self.expect(",")
            b = self.expr()
            self.expect(")")
            return Choice(a, b)
        if self.at("("):
            self.advance()
            first = self.expr()
            if self.at(","):
                items = [first]
                while self.at(","):
                    self.advance()
                    items.append(self.expr())
                self.expect(")")
                out = items[-1]
                for it in reversed(items[:-1]):
                    out = Pair(it, out)
                return out
            self.expect(")")
            return first
        if t.kind == "ident" and t.text not in KEYWORDS:
            self.advance()
            if t.text in self.vals:
                return Opaque(t.text, self.vals[t.text])
            return Var(t.text)
        self.fail(f"expected an expression, found {t.text or 'end of input'!r}")

    # -- patterns
    def pattern(self):
        p = self.p_or()
        while self.at("as"):
            self.advance()
            p = PAnd(p, PVar(self.ident()))
        return p

    def p_or(self):
        # inside a pattern the branch arrow has not been seen yet, so '|' is an
        # alternative; the branch separator only follows a body expression
        p = self.p_and()
        while self.at("|"):
            self.advance()
            p = POr(p, self.p_and())
        return p

    def p_and(self):
        p = self.p_atom()
        while self.at("&"):
            self.advance()
            p = PAnd(p, self.p_atom())
        return p

    def p_atom(self):
        t = self.tok
        if self.at("_"):
            self.advance()
            return PType(self.engine.any())
        if self.at("("):
            self.advance()
            first = self.pattern()
            if self.at(","):
                items = [first]
                while self.at(","):
                    self.advance()
                    items.append(self.pattern())
                self.expect(")")
                out = items[-1]
                for it in reversed(items[:-1]):
                    out = PPair(it, out)
                return out
            self.expect(")")
            return first
        if self.at("{"):
            self.advance()
            ty = self.static_type()
            self.expect("}")
            return PType(ty)
        if t.kind == "ident" and t.text not in KEYWORDS and t.text[0].islower():
            self.advance()
            return PVar(t.text)
        ty = self.build_type(self.t_primary())
        if not isinstance(ty, Type):
            self.fail("patterns test static types only")
        return PType(ty)


@dataclass(frozen=True)
class IfThenElse:
    """`if c then a else b`: resolved to a type-case on a Boolean check."""
    cond: object
    then: object
    else_: object


def _has_dyn(e):
    from .types import has_dyn
    return has_dyn(e)


@dataclass
class Program:
    expr: object
    types: dict = field(default_factory=dict)
    vals: dict = field(default_factory=dict)


def parse_type(text: str, engine: Engine = ENGINE, types: dict | None = None):
    """Parse a (possibly gradual) type; `type X = ...` declarations may precede it."""
    p = Parser(text, engine, types)
    p.declarations()
    t = p.build_type(p.texpr())
    p.done()
    return t


def parse_program(text: str, engine: Engine = ENGINE, mode: str = "core") -> Program:
    """Parse declarations followed by one expression.

    mode "core" keeps annotated forms; mode "src" inlines lets, which is what a
    shared binding amounts to once maximal sharing is applied. Both turn `if`
    into a type-case on `bool c`.
    """
    p = Parser(text, engine)
    p.declarations()
    e = p.expr()
    p.done()
    e = _desugar(e, mode, engine)
    return Program(e, p.types, p.vals)


def parse_expr(text: str, engine: Engine = ENGINE, mode: str = "core"):
    return parse_program(text, engine, mode).expr


def _desugar(e, mode, engine):
    from .terms import children  # noqa: F401
    d = lambda x: _desugar(x, mode, engine)  # noqa: E731
    if isinstance(e, IfThenElse):
        cond, a, b = d(e.cond), d(e.then), d(e.else_)
        true = engine.const(True)
        check = Prim("bool", (cond,))
        if mode == "src":
            return SCase(check, true, a, b)
        return TypeCase(fresh("c", set()), check, true, a, b)
    if isinstance(e, Let):
        if mode == "src":
            from .terms import subst
            return subst(d(e.body), e.name, d(e.bound))
        return Let(e.name, e.annot, d(e.bound), d(e.body))
    if isinstance(e, Abs):
        return Abs(e.iface, e.param, d(e.body))
    if isinstance(e, SAbs):
        return SAbs(e.param, d(e.body))
    if isinstance(e, App):
        return App(d(e.fn), d(e.arg))
    if isinstance(e, Pair):
        return Pair(d(e.left), d(e.right))
    if isinstance(e, Choice):
        return Choice(d(e.left), d(e.right))
    if isinstance(e, Proj):
        return Proj(e.index, d(e.arg))
    if isinstance(e, Prim):
        return Prim(e.op, tuple(d(a) for a in e.args))
    if isinstance(e, TypeCase):
        return TypeCase(e.binder, d(e.scrutinee), e.test, d(e.then), d(e.else_))
    if isinstance(e, SCase):
        return SCase(d(e.scrutinee), e.test, d(e.then), d(e.else_))
    if isinstance(e, Match):
        return Match(d(e.scrutinee), tuple((p, d(b)) for p, b in e.branches))
    return e


def T(text: str, engine: Engine = ENGINE):
    """Shorthand for parse_type."""
    return parse_type(text, engine)


# ---------------------------------------------------------------- rendering

ARROW, UNION, INTER, ATOMIC = 0, 1, 2, 3


class _Renderer:
    def __init__(self, engine, gradual_nodes):
        self.engine = engine
        self.g = gradual_nodes
        self.names = {}

    def node(self, key):
        kind, i = key
        if kind == "s":
            return self.engine.node(i)
        node = self.g.nodes[i]
        if node[0] == "static":
            return None
        return node

    def kids(self, key):
        kind, i = key
        node = self.node(key)
        if node is None:
            return [("s", self.g.nodes[i][1])]
        if node[0] in ("basic", "empty", "dyn"):
            return []
        return [(kind, c) for c in node[1:]]

    def find_cycles(self, root):
        # nodes that are the target of a back-edge get a name
        state, targets = {}, []

        def visit(k):
            state[k] = 1
            for c in self.kids(k):
                s = state.get(c)
                if s == 1:
                    if c not in targets:
                        targets.append(c)
                elif s is None:
                    visit(c)
            state[k] = 2

        visit(root)
        for n, k in enumerate(targets, 1):
            self.names[k] = f"X{n}"

    def render(self, key, prec, top=False):
        if key in self.names and not top:
            return self.names[key]
        text, p = self.raw(key)
        return f"({text})" if p < prec else text

    def raw(self, key):
        node = self.node(key)
        if node is None:
            inner = ("s", self.g.nodes[key[1]][1])
            if inner in self.names:
                return self.names[inner], ATOMIC
            return self.raw(inner)
        kind = key[0]
        tag = node[0]
        if tag == "basic":
            pieces = node[1].pieces()
            if not pieces:
                return "Empty", ATOMIC
            return " | ".join(pieces), (UNION if len(pieces) > 1 else ATOMIC)
        if tag == "empty":
            return "Empty", ATOMIC
        if tag == "dyn":
            return "?", ATOMIC
        if tag in ("prod", "arrow", "or"):
            left, right = (kind, node[1]), (kind, node[2])
        if tag == "prod":
            return f"({self.render(left, ARROW)}, {self.render(right, ARROW)})", ATOMIC
        if tag == "arrow":
            return f"{self.render(left, UNION)} -> {self.render(right, ARROW)}", ARROW
        if tag == "or":
            return f"{self.render(left, UNION)} | {self.render(right, INTER)}", UNION
        # negation
        inner_key = (kind, node[1])
        inner = self.node(inner_key)
        if inner_key not in self.names and inner is not None:
            if inner[0] == "empty":
                return "Any", ATOMIC
            if inner[0] == "or":
                lk, rk = (kind, inner[1]), (kind, inner[2])
                ln, rn = self._neg_of(lk), self._neg_of(rk)
                if ln is not None and rn is not None:
                    rnode = self._neg_of(rn)
                    if rnode is not None:
                        return f"{self.render(ln, UNION)} \\ {self.render(rnode, INTER)}", UNION
                    return f"{self.render(ln, INTER)} & {self.render(rn, ATOMIC)}", INTER
        return f"~{self.render(inner_key, ATOMIC)}", ATOMIC

    def _neg_of(self, key):
        """If key is a negation node (and not a named one), the negated child."""
        if key in self.names:
            return None
        node = self.node(key)
        if node is not None and node[0] == "not":
            return (key[0], node[1])
        return None


def render_type(t) -> str:
    from .gradual import GType, _table
    if isinstance(t, GType):
        r = _Renderer(t.engine, _table(t.engine))
        root = ("g", t.id)
    else:
        r = _Renderer(t.engine, None)
        root = ("s", t.id)
    r.find_cycles(root)
    text = r.render(root, ARROW)
    if r.names:
        eqs = " and ".join(f"{name} = {r.render(k, ARROW, top=True)}"
                           for k, name in sorted(r.names.items(), key=lambda kv: kv[1]))
        text = f"{text} where {eqs}"
    return text
