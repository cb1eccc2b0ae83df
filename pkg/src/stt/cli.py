"""Command-line front end: `stt <command> ...`."""
from __future__ import annotations

import argparse
import json
import os
import shlex
import sys
from dataclasses import dataclass, field

from . import gradual, lang, msc, ops, oracle
from .patterns import NonExhaustiveMatch
from .subtype import equiv, is_empty, simplify, subtype
from .syntax import ParseError, parse_program, parse_type, render_type
from .types import Engine, Type

EXIT_OK, EXIT_NEGATIVE, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    """Bad input; carries a diagnostic."""

    def __init__(self, kind, message, span=None):
        self.kind = kind
        self.span = span
        super().__init__(message)


@dataclass
class Outcome:
    lines: list
    result: dict
    verdict: bool | None = None
    diagnostics: list = field(default_factory=list)


def diag(severity, kind, message, span=None, **extra):
    d = {"severity": severity, "kind": kind, "span": list(span) if span else None,
         "message": message}
    d.update(extra)
    return d


# ---------------------------------------------------------------- input helpers

def _type(text, engine, static=True):
    try:
        t = parse_type(text, engine)
    except ParseError as err:
        kind = type(err.__cause__).__name__ if err.__cause__ else "ParseError"
        raise InputError(kind, str(err), err.span) from None
    if static and not isinstance(t, Type):
        raise InputError("ParseError", "the dynamic type ? is only allowed by gradual commands")
    return t


def _read(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as err:
        raise InputError("IOError", str(err)) from None


def _program(path, engine, mode):
    try:
        return parse_program(_read(path), engine, mode)
    except ParseError as err:
        kind = type(err.__cause__).__name__ if err.__cause__ else "ParseError"
        raise InputError(kind, str(err), err.span) from None


def _show(t, args, engine):
    if getattr(args, "dnf", False) and isinstance(t, Type):
        summands = engine.dnf(t).summands
        return [render_type(engine.summand_type(s)) for s in summands] or ["Empty"]
    return [render_type(t)]


def _verdict(v):
    return "true" if v else "false"


# ---------------------------------------------------------------- commands

def cmd_sub(args, eng):
    v = subtype(_type(args.t1, eng), _type(args.t2, eng))
    return Outcome([_verdict(v)], {"verdict": v}, v)


def cmd_empty(args, eng):
    v = is_empty(_type(args.t, eng))
    return Outcome([_verdict(v)], {"verdict": v}, v)


def cmd_equiv(args, eng):
    v = equiv(_type(args.t1, eng), _type(args.t2, eng))
    return Outcome([_verdict(v)], {"verdict": v}, v)


def _op(fn, *xs):
    try:
        return fn(*xs)
    except (ops.NotAFunctionType, ops.ArgumentOutsideDomain, ops.NotAProductType) as err:
        raise InputError(type(err).__name__, str(err)) from None


def _type_outcome(t, args, eng):
    lines = _show(t, args, eng)
    result = {"type": render_type(t)}
    if args.dnf:
        result["dnf"] = lines
    return Outcome(lines, result)


def cmd_dom(args, eng):
    return _type_outcome(_op(ops.dom, _type(args.t, eng)), args, eng)


def cmd_apply(args, eng):
    return _type_outcome(_op(ops.apply, _type(args.t, eng), _type(args.s, eng)), args, eng)


def cmd_proj(args, eng):
    return _type_outcome(_op(ops.proj, args.i, _type(args.t, eng)), args, eng)


def cmd_check(args, eng):
    prog = _program(args.file, eng, "core")
    checker = lang.Checker(eng)
    try:
        t = checker.check({}, prog.expr)
    except lang.TypeError as err:
        d = diag("error", err.rule, err.message)
        return Outcome(["ill-typed", f"error[{err.rule}]: {err.message}"],
                       {"verdict": False, "type": None}, False, [d])
    except NonExhaustiveMatch as err:
        d = diag("error", "non-exhaustive", str(err), residue=render_type(err.residue))
        return Outcome(["ill-typed", f"error[non-exhaustive]: {err}"],
                       {"verdict": False, "type": None}, False, [d])
    diags, lines = _redundancy(checker)
    return Outcome(_show(t, args, eng) + lines, {"verdict": True, "type": render_type(t)},
                   True, diags)


def _redundancy(checker):
    diags, lines = [], []
    order = {id(v.node): n for n, v in enumerate(checker.visits.values())}
    for node, k in sorted(checker.redundant(), key=lambda p: (order[id(p[0])], p[1])):
        m = order[id(node)] + 1
        msg = f"branch {k + 1} of match {m} is never selected"
        diags.append(diag("warning", "redundant", msg, **{"branch-index": k + 1, "match": m}))
        lines.append(f"warning[redundant]: {msg}")
    return diags, lines


def cmd_match_check(args, eng):
    prog = _program(args.file, eng, "core")
    checker = lang.Checker(eng)
    try:
        t = checker.check({}, prog.expr)
    except NonExhaustiveMatch as err:
        residue = render_type(err.residue)
        d = diag("error", "non-exhaustive", str(err), **{"branch-index": None,
                                                         "residue-type": residue})
        return Outcome(["non-exhaustive", f"residue: {residue}"],
                       {"verdict": False, "exhaustive": False, "type": None, "redundant": []},
                       False, [d])
    except lang.TypeError as err:
        d = diag("error", err.rule, err.message)
        return Outcome(["ill-typed", f"error[{err.rule}]: {err.message}"],
                       {"verdict": False, "exhaustive": None, "type": None, "redundant": []},
                       False, [d])
    diags, lines = _redundancy(checker)
    result = {"verdict": True, "exhaustive": True, "type": render_type(t),
              "redundant": [d["branch-index"] for d in diags]}
    return Outcome(["exhaustive", f"type: {render_type(t)}"] + lines, result, True, diags)


def _seed(args):
    if args.seed is not None:
        return args.seed
    env = os.environ.get("STT_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise InputError("BadSeed", f"STT_SEED must be an integer, not {env!r}") from None
    return 0


def cmd_eval(args, eng):
    prog = _program(args.file, eng, "src" if args.src else "core")
    try:
        v = lang.eval(prog.expr, fuel=args.fuel, seed=_seed(args))
    except lang.Stuck as err:
        d = diag("error", "Stuck", str(err))
        return Outcome(["stuck", f"error[stuck]: {err}"],
                       {"verdict": False, "outcome": "stuck", "value": None}, False, [d])
    except lang.Diverged as err:
        d = diag("error", "Diverged", str(err))
        return Outcome(["diverged", f"error[diverged]: {err}"],
                       {"verdict": False, "outcome": "diverged", "value": None}, False, [d])
    shown = lang.show_value(v)
    return Outcome([shown], {"verdict": True, "outcome": "value", "value": shown}, True)


def _form(args, eng):
    prog = _program(args.file, eng, "src")
    try:
        return msc.to_msc(prog.expr)
    except msc.MscError as err:
        raise InputError("MscError", str(err)) from None


def cmd_msc(args, eng):
    k = _form(args, eng)
    text = msc.render_form(k)
    return Outcome(text.splitlines(), {"form": text, "bindings": len(list(
        b for b in msc.walk_binders(k) if isinstance(b, msc.MBind)))})


def cmd_infer(args, eng):
    k = _form(args, eng)
    try:
        r = msc.infer_annotations(k, eng, max_passes=args.max_passes)
    except msc.Failure as err:
        ds = [diag("error", "Failure", m) for m in err.diagnostics]
        return Outcome(["no annotation found"] + [f"error[infer]: {m}" for m in err.diagnostics],
                       {"verdict": False, "form": None, "type": None, "passes": err.passes},
                       False, ds)
    text = msc.render_form(r.form)
    return Outcome(text.splitlines() + [f"type: {render_type(r.type)}"],
                   {"verdict": True, "form": text, "type": render_type(r.type),
                    "passes": r.passes}, True)


def cmd_bounds(args, eng):
    lo, hi = (simplify(x) for x in gradual.extrema(_type(args.t, eng, static=False)))
    return Outcome([f"down: {render_type(lo)}", f"up: {render_type(hi)}"],
                   {"down": render_type(lo), "up": render_type(hi)})


def cmd_gsub(args, eng):
    v = gradual.gsub(_type(args.t1, eng, False), _type(args.t2, eng, False))
    return Outcome([_verdict(v)], {"verdict": v}, v)


def cmd_precision(args, eng):
    v = gradual.precision(_type(args.t1, eng, False), _type(args.t2, eng, False))
    return Outcome([_verdict(v)], {"verdict": v}, v)


def _universe(text):
    out = []
    for item in (text.split(",") if text else []):
        item = item.strip()
        if item in ("true", "false"):
            out.append(item == "true")
        elif item.lstrip("-").isdigit():
            out.append(int(item))
        elif len(item) >= 2 and item[0] == item[-1] == '"':
            out.append(item[1:-1])
        elif item.startswith("`"):
            from .basic import Atom
            out.append(Atom(item[1:]))
        else:
            raise InputError("BadUniverse", f"cannot read constant {item!r}")
    return tuple(out)


def cmd_oracle_witness(args, eng):
    t = _type(args.t, eng)
    try:
        cfg = oracle.OracleConfig(_universe(args.universe), args.depth, args.rel)
    except ValueError as err:
        raise InputError("BadConfig", str(err)) from None
    w = oracle.find_witness(t, cfg)
    if w is None:
        return Outcome(["none"], {"verdict": False, "witness": None}, False)
    return Outcome([oracle.show(w)], {"verdict": True, "witness": oracle.show(w)}, True)


COMMANDS = {
    "sub": (cmd_sub, ["t1", "t2"]), "empty": (cmd_empty, ["t"]),
    "equiv": (cmd_equiv, ["t1", "t2"]), "dom": (cmd_dom, ["t"]),
    "apply": (cmd_apply, ["t", "s"]), "proj": (cmd_proj, ["i", "t"]),
    "check": (cmd_check, ["file"]), "eval": (cmd_eval, ["file"]),
    "match-check": (cmd_match_check, ["file"]), "msc": (cmd_msc, ["file"]),
    "infer": (cmd_infer, ["file"]), "bounds": (cmd_bounds, ["t"]),
    "gsub": (cmd_gsub, ["t1", "t2"]), "precision": (cmd_precision, ["t1", "t2"]),
    "oracle-witness": (cmd_oracle_witness, ["t"]),
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InputError("Usage", f"{self.prog}: {message}")


def _common(nested: bool):
    # flags are accepted before and after the command; the copy on each
    # command must not reset values given before it
    common = argparse.ArgumentParser(add_help=False)
    d = (lambda v: argparse.SUPPRESS) if nested else (lambda v: v)  # noqa: E731
    common.add_argument("--json", action="store_true", default=d(False),
                        help="machine-readable output")
    common.add_argument("--strict", action="store_true", default=d(False),
                        help="exit 1 when a verdict-style command answers negatively")
    common.add_argument("--dnf", action="store_true", default=d(False),
                        help="print result types as DNF summands")
    common.add_argument("--seed", type=int, default=d(None), help="seed for choice (or STT_SEED)")
    common.add_argument("--fuel", type=int, default=d(10_000),
                        help="reduction step bound for eval")
    common.add_argument("--max-passes", type=int, default=d(16), help="cap on inference passes")
    common.add_argument("--batch", metavar="FILE", default=d(None),
                        help="run one command per line of FILE (shell quoting)")
    return common


def build_parser():
    p = _Parser(prog="stt", parents=[_common(False)],
                description="Set-theoretic types: subtyping, type operators, Core CDuce, "
                            "patterns, occurrence typing and gradual types.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    for name, (_, params) in COMMANDS.items():
        sp = sub.add_parser(name, parents=[_common(True)])
        for prm in params:
            sp.add_argument(prm, type=int if prm == "i" else str)
        if name == "eval":
            sp.add_argument("--src", action="store_true", help="read the unannotated language")
        if name == "oracle-witness":
            sp.add_argument("--depth", type=int, default=3)
            sp.add_argument("--rel", type=int, default=2)
            sp.add_argument("--universe", default="0,1,true")
    return p


def _inputs(args):
    _, params = COMMANDS[args.command]
    return {prm: getattr(args, prm) for prm in params}


def run(argv, out=None) -> int:
    """Run one command line; returns the exit status."""
    out = out or sys.stdout
    as_json = "--json" in argv
    try:
        args = build_parser().parse_args(argv)
        if args.batch:
            return _batch(args, out)
        if not args.command:
            raise InputError("Usage", "stt: a command is required (see stt --help)")
        fn, _ = COMMANDS[args.command]
        outcome = fn(args, Engine())
    except InputError as err:
        d = diag("error", err.kind, str(err), err.span)
        if as_json:
            cmd = next((a for a in argv if a in COMMANDS), None)
            print(json.dumps({"command": cmd, "inputs": None, "result": None,
                              "diagnostics": [d]}), file=out)
        else:
            print(f"error[{err.kind}]: {err}", file=out)
        return EXIT_INPUT
    if args.json:
        print(json.dumps({"command": args.command, "inputs": _inputs(args),
                          "result": outcome.result, "diagnostics": outcome.diagnostics}),
              file=out)
    else:
        for line in outcome.lines:
            print(line, file=out)
    if args.strict and outcome.verdict is False:
        return EXIT_NEGATIVE
    return EXIT_OK


def _batch(args, out) -> int:
    worst = EXIT_OK
    for line in _read(args.batch).splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        argv = shlex.split(line)
        for flag in ("json", "strict", "dnf"):
            if getattr(args, flag) and f"--{flag}" not in argv:
                argv.append(f"--{flag}")
        worst = max(worst, run(argv, out))
    return worst


def main(argv=None):
    sys.exit(run(sys.argv[1:] if argv is None else argv))


if __name__ == "__main__":
    main()
