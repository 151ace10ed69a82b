"""Command-line front end and the session description language.

A session file is a sequence of statements::

    field 3;
    var x, y;                  # or: var x1..x4;
    set C { eq: x^2 + y^2 - 1; neq: x; }
    group { table: [[0,1],[1,0]]; }
    universe 3;

``#`` starts a comment.  Polynomials use ``+ - *`` and ``^`` with the usual
precedence (``^`` binds tightest, ``-x^2`` is ``-(x^2)``); multiplication is
always written out.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import additivity as add
from .core import (
    BudgetExceeded,
    CheckReport,
    PreconditionError,
    StructuralError,
    TabulatedInstance,
    check_sw_axioms,
    check_subtraction_axioms,
    check_subtractive_axioms,
    to_jsonable,
)
from .functors import check_splitting
from .instances import GroupTable, cyclic_group, finset_instance, gset_instance
from .k0 import additivity_on_k0, k0_group, smith_normal_form
from .sdot import check_simplicial_identities, enumerate_flags, validate_flag
from .varieties import Poly, canonical_set, constructible, enumerate_points, is_prime, varieties_instance

SCHEMA_VERSION = 1
DEFAULT_UNIVERSE = 3

EXIT_OK, EXIT_VIOLATIONS, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3


# ---------------------------------------------------------------------------
# lexer and parser


class DSLError(ValueError):
    def __init__(self, message: str, line: int, col: int, expected=()):
        self.line, self.col, self.expected = line, col, tuple(sorted(expected))
        text = f"{line}:{col}: {message}"
        if self.expected:
            text += " (expected one of: " + ", ".join(self.expected) + ")"
        super().__init__(text)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int


_TOKEN_RE = re.compile(
    r"(?P<ws>[ \t\r]+)|(?P<nl>\n)|(?P<comment>#[^\n]*)"
    r"|(?P<range>\.\.)|(?P<int>\d+)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<sym>[;,:{}()\[\]+\-*^])"
)
KEYWORDS = {"field", "var", "set", "group", "universe", "eq", "neq", "table"}


def tokenize(text: str) -> list:
    out, line, start, pos = [], 1, 0, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise DSLError(f"unexpected character {text[pos]!r}", line, pos - start + 1)
        kind = m.lastgroup
        if kind == "nl":
            line, start = line + 1, m.end()
        elif kind not in ("ws", "comment"):
            word = m.group()
            if kind == "name" and word in KEYWORDS:
                kind = word
            elif kind in ("sym", "range"):
                kind = word
            out.append(Token(kind, word, line, m.start() - start + 1))
        pos = m.end()
    out.append(Token("end of input", "", line, pos - start + 1))
    return out


@dataclass
class SetSpec:
    name: str
    equations: tuple = ()
    inequations: tuple = ()


@dataclass
class SessionConfig:
    """Structured form of a session file."""

    field: int | None = None
    variables: tuple = ()
    sets: tuple = ()
    group: tuple | None = None
    universe: int | None = None

    @property
    def instance_kind(self) -> str:
        if self.field is not None:
            return "varieties"
        if self.group is not None:
            return "gset"
        return "finset"

    def structure(self):
        return {
            "field": self.field,
            "variables": list(self.variables),
            "sets": [
                {"name": s.name, "eq": [list(f.terms) for f in s.equations], "neq": [list(f.terms) for f in s.inequations]}
                for s in self.sets
            ],
            "group": None if self.group is None else [list(r) for r in self.group],
            "universe": self.universe,
        }

    def __eq__(self, other):
        return isinstance(other, SessionConfig) and json.dumps(self.structure(), default=str) == json.dumps(
            other.structure(), default=str
        )


class _Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0
        self.cfg = SessionConfig()
        self.sets: list = []

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def error(self, expected, message=None):
        t = self.tok
        shown = t.text or t.kind
        raise DSLError(message or f"unexpected {shown!r}", t.line, t.col, expected)

    def take(self, *kinds) -> Token:
        if self.tok.kind not in kinds:
            self.error(kinds)
        t = self.tok
        self.i += 1
        return t

    def accept(self, kind) -> bool:
        if self.tok.kind == kind:
            self.i += 1
            return True
        return False

    def program(self) -> SessionConfig:
        starts = ("field", "var", "set", "group", "universe")
        while self.tok.kind != "end of input":
            kind = self.tok.kind
            if kind not in starts:
                self.error(starts + ("end of input",))
            getattr(self, "stmt_" + kind)()
        self.cfg.sets = tuple(self.sets)
        return self.cfg

    def stmt_field(self):
        self.take("field")
        t = self.take("int")
        p = int(t.text)
        if not is_prime(p):
            raise DSLError(f"{p} is not prime", t.line, t.col)
        if self.cfg.field is not None:
            raise DSLError("field declared twice", t.line, t.col)
        self.cfg.field = p
        self.take(";")

    def stmt_universe(self):
        self.take("universe")
        t = self.take("int")
        n = int(t.text)
        if n < 0:
            raise DSLError("universe size must be non-negative", t.line, t.col)
        self.cfg.universe = n
        self.take(";")

    def stmt_var(self):
        start = self.take("var")
        names = [self.take("name").text]
        if self.accept(".."):
            last = self.take("name")
            a, b = re.fullmatch(r"(.*?)(\d+)", names[0]), re.fullmatch(r"(.*?)(\d+)", last.text)
            if not a or not b or a.group(1) != b.group(1) or int(a.group(2)) > int(b.group(2)):
                raise DSLError("a variable range needs matching names like x1..x4", last.line, last.col)
            names = [f"{a.group(1)}{k}" for k in range(int(a.group(2)), int(b.group(2)) + 1)]
        else:
            while self.accept(","):
                names.append(self.take("name").text)
        if len(set(names)) != len(names):
            raise DSLError("repeated variable name", start.line, start.col)
        if self.cfg.variables:
            raise DSLError("variables declared twice", start.line, start.col)
        if self.sets:
            raise DSLError("variables must be declared before any set", start.line, start.col)
        self.cfg.variables = tuple(names)
        self.take(";")

    def stmt_set(self):
        start = self.take("set")
        name = self.take("name").text
        if self.cfg.field is None:
            raise DSLError("a set needs a field declaration first", start.line, start.col)
        if any(s.name == name for s in self.sets):
            raise DSLError(f"set {name!r} declared twice", start.line, start.col)
        self.take("{")
        eqs, neqs = [], []
        while not self.accept("}"):
            kind = self.take("eq", "neq", "}").kind
            self.take(":")
            (eqs if kind == "eq" else neqs).append(self.poly())
            self.take(";")
        self.accept(";")
        self.sets.append(SetSpec(name, tuple(eqs), tuple(neqs)))

    def stmt_group(self):
        start = self.take("group")
        self.take("{")
        self.take("table")
        self.take(":")
        rows = self.int_matrix()
        self.take(";")
        self.take("}")
        self.accept(";")
        try:
            GroupTable(rows)
        except StructuralError as exc:
            raise DSLError(str(exc), start.line, start.col) from None
        self.cfg.group = tuple(tuple(r) for r in rows)

    def int_matrix(self) -> list:
        self.take("[")
        rows = []
        while True:
            self.take("[")
            row = [int(self.take("int").text)]
            while self.accept(","):
                row.append(int(self.take("int").text))
            self.take("]")
            rows.append(row)
            if not self.accept(","):
                break
        self.take("]")
        return rows

    # polynomials
    def poly(self) -> Poly:
        p, n = self.cfg.field, len(self.cfg.variables)
        out = self.term(p, n)
        while self.tok.kind in ("+", "-"):
            op = self.take("+", "-").kind
            rhs = self.term(p, n)
            out = out + rhs if op == "+" else out - rhs
        if self.tok.kind not in (";", ")"):
            self.error(("+", "-", "*", "^", ";", ")"))
        return out

    def term(self, p, n) -> Poly:
        out = self.unary(p, n)
        while self.accept("*"):
            out = out * self.unary(p, n)
        return out

    def unary(self, p, n) -> Poly:
        if self.accept("-"):
            return -self.unary(p, n)
        return self.power(p, n)

    def power(self, p, n) -> Poly:
        base = self.atom(p, n)
        if self.accept("^"):
            return base ** int(self.take("int").text)
        return base

    def atom(self, p, n) -> Poly:
        t = self.tok
        if t.kind == "int":
            self.i += 1
            return Poly.const(p, n, int(t.text))
        if t.kind == "name":
            self.i += 1
            if t.text not in self.cfg.variables:
                declared = ", ".join(self.cfg.variables) or "none"
                raise DSLError(f"arity mismatch: {t.text!r} is not a declared variable (declared: {declared})", t.line, t.col)
            return Poly.var(p, n, self.cfg.variables.index(t.text))
        if self.accept("("):
            inner = self.poly()
            self.take(")")
            return inner
        self.error(("int", "name", "(", "-"))


def parse_dsl(text: str) -> SessionConfig:
    return _Parser(text).program()


def serialize(cfg: SessionConfig) -> str:
    lines = []
    if cfg.field is not None:
        lines.append(f"field {cfg.field};")
    if cfg.variables:
        lines.append(f"var {', '.join(cfg.variables)};")
    for s in cfg.sets:
        body = [f"eq: {f.format(cfg.variables)};" for f in s.equations]
        body += [f"neq: {f.format(cfg.variables)};" for f in s.inequations]
        lines.append(f"set {s.name} {{ {' '.join(body)} }}")
    if cfg.group is not None:
        rows = ",".join("[" + ",".join(map(str, r)) + "]" for r in cfg.group)
        lines.append(f"group {{ table: [{rows}]; }}")
    if cfg.universe is not None:
        lines.append(f"universe {cfg.universe};")
    return "\n".join(lines) + ("\n" if lines else "")


def realize(cfg: SessionConfig, item: SetSpec):
    return constructible(cfg.field, len(cfg.variables), item.equations, item.inequations)


# ---------------------------------------------------------------------------
# instances from arguments


def build_instance(args, cfg: SessionConfig):
    kind = args.instance or cfg.instance_kind
    if kind == "finset":
        n = args.bound if args.bound is not None else (cfg.universe if cfg.universe is not None else DEFAULT_UNIVERSE)
        return finset_instance(n), None
    if kind == "gset":
        group = GroupTable(cfg.group) if cfg.group is not None else cyclic_group(2)
        n = args.bound if args.bound is not None else 4
        return gset_instance(group, n), None
    if kind == "varieties":
        p = args.field if args.field is not None else (cfg.field if cfg.field is not None else 2)
        nv = args.vars if args.vars is not None else (len(cfg.variables) if cfg.variables else 1)
        inst = varieties_instance(p, nv)
        return inst, args.bound
    if kind == "tabulated":
        if not args.file:
            raise PreconditionError("a tabulated instance needs a JSON file argument")
        doc = json.loads(Path(args.file).read_text(encoding="utf-8"))
        return TabulatedInstance.from_json(doc), args.bound
    raise PreconditionError(f"unknown instance {kind!r}")


def load_config(args) -> SessionConfig:
    if args.file and (args.instance != "tabulated") and args.command not in ("snf",):
        return parse_dsl(Path(args.file).read_text(encoding="utf-8"))
    return SessionConfig()


# ---------------------------------------------------------------------------
# commands


def _doc(command: str, **fields) -> dict:
    return {"schema_version": SCHEMA_VERSION, "command": command, **fields}


def cmd_axioms(args, cfg):
    inst, bound = build_instance(args, cfg)
    reports = [f(inst, bound) for f in (check_subtraction_axioms, check_subtractive_axioms, check_sw_axioms)]
    ok = all(r.ok for r in reports)
    doc = _doc("axioms", instance=inst.name, ok=ok, reports=[r.to_json() for r in reports])
    text = [f"{r.name}: {'ok' if r.ok else 'violated ' + ', '.join(r.axioms_violated())} ({sum(r.checked.values())} checks)" for r in reports]
    return doc, text, ok


def cmd_flags(args, cfg):
    inst, bound = build_instance(args, cfg)
    top = args.degree if args.degree is not None else 2
    valid = CheckReport("flag validity")
    counts = {}
    all_flags = []
    for n in range(top + 1):
        fl = enumerate_flags(inst, n, bound)
        counts[n] = len(fl)
        for F in fl:
            valid.merge(validate_flag(inst, F))
        all_flags.extend(fl)
    valid.finalize()
    ident = check_simplicial_identities(inst, all_flags)
    ok = valid.ok and ident.ok
    doc = _doc(
        "flags",
        instance=inst.name,
        ok=ok,
        flag_counts={str(k): v for k, v in counts.items()},
        validity=valid.to_json(),
        identities=ident.to_json(),
    )
    text = [f"degree {k}: {v} flags" for k, v in counts.items()]
    text.append(f"validity: {'ok' if valid.ok else 'violated'}; identities: {'ok' if ident.ok else 'violated'}")
    return doc, text, ok


def cmd_k0(args, cfg):
    inst, bound = build_instance(args, cfg)
    G = k0_group(inst, bound)
    doc = _doc("k0", instance=inst.name, **G.to_json())
    inv = G.snf.invariants
    text = [f"K0({inst.name}) = Z^{inv.free_rank}" + "".join(f" + Z/{d}" for d in inv.torsion)]
    return doc, text, True


def _excision(cfg, item):
    # V(eqs) splits into the part where some inequation vanishes and the set itself
    whole = constructible(cfg.field, len(cfg.variables), item.equations)
    if item.inequations:
        prod = item.inequations[0]
        for g in item.inequations[1:]:
            prod = prod * g
        closed = constructible(cfg.field, len(cfg.variables), (*item.equations, prod))
    else:
        closed = constructible(cfg.field, len(cfg.variables), (Poly.const(cfg.field, len(cfg.variables), 1),))
    opened = realize(cfg, item)
    holds = len(whole) == len(closed) + len(opened) and set(whole.points) == set(closed.points) | set(opened.points)
    return {"whole": len(whole), "closed": len(closed), "open": len(opened), "holds": holds}


def cmd_measure(args, cfg):
    if cfg.field is None or not cfg.sets:
        raise PreconditionError("measure needs a session file with a field and at least one set")
    nv = len(cfg.variables)
    kinst = varieties_instance(cfg.field, nv, bound=1)
    G = k0_group(kinst, 1)
    entries = []
    ok = True
    for item in cfg.sets:
        X = realize(cfg, item)
        pts = enumerate_points(X.system)
        cls = G.class_of(canonical_set(cfg.field, nv, frozenset(pts)))
        cert = _excision(cfg, item)
        ok &= cert["holds"]
        entries.append({"name": item.name, "point_count": len(pts), "k0_class": list(cls), "excision_certificates": [cert]})
    doc = _doc("measure", field=cfg.field, variables=list(cfg.variables), sets=entries)
    if len(entries) == 1:
        doc.update({k: v for k, v in entries[0].items() if k != "name"})
    text = [f"{e['name']}: {e['point_count']} points, class {e['k0_class']}" for e in entries]
    return doc, text, ok


def cmd_additivity(args, cfg):
    if args.golden_appendix:
        produced = add.golden_appendix_text()
        stored = add.stored_appendix_text()
        match = produced == stored
        return None, [produced.rstrip("\n")], match
    universe = args.bound if args.bound is not None else (cfg.universe if cfg.universe is not None else 2)
    top = args.degree if args.degree is not None else 2
    inst = finset_instance(universe)
    if universe <= 2:
        corpus = add.exhaustive_corpus(inst, top, top)
        how = "exhaustive"
    else:
        corpus = add.random_corpus(inst, args.samples, args.seed, max_m=top, max_n=top)
        how = f"random(seed={args.seed})"
    rep = add.verify_homotopy(inst, corpus, validate=not args.fast)
    verdict = additivity_on_k0(finset_instance(min(universe, 3)), None)
    ok = rep.ok and verdict.isomorphism
    doc = _doc(
        "additivity",
        instance=inst.name,
        corpus=how,
        elements_checked=len(corpus),
        identities_checked=add.identities_checked(rep),
        failures=[v.to_json() for v in rep.violations],
        k0=verdict.to_json(),
        ok=ok,
    )
    text = [
        f"{how} corpus over {inst.name}: {len(corpus)} elements, {add.identities_checked(rep)} identities, {len(rep.violations)} failures",
        f"K0 additivity map is an isomorphism: {verdict.isomorphism}",
    ]
    return doc, text, ok


def cmd_splitting(args, cfg):
    size = args.bound if args.bound is not None else 6
    p = args.field if args.field is not None else (cfg.field or 2)
    v = check_splitting(max_size=size, prime=p)
    doc = _doc("splitting", max_size=size, prime=p, **v.to_json())
    text = [f"strict identity on pointed sets up to {size}: {v.strict} ({v.morphisms_checked} morphisms)"]
    return doc, text, v.strict


def read_matrix(text: str) -> list:
    text = text.strip()
    if not text:
        return []
    if text.startswith("["):
        rows = json.loads(text)
    else:
        rows = [[int(x) for x in re.split(r"[\s,]+", line.strip()) if x] for line in text.splitlines() if line.strip()]
    if any(len(r) != len(rows[0]) for r in rows):
        raise PreconditionError("matrix rows have different lengths")
    return [[int(x) for x in r] for r in rows]


def cmd_snf(args, cfg):
    src = sys.stdin.read() if args.file in (None, "-") else Path(args.file).read_text(encoding="utf-8")
    M = read_matrix(src)
    form = smith_normal_form(M)
    inv = form.invariants
    doc = _doc(
        "snf",
        matrix=M,
        diagonal=list(form.diagonal),
        U=[list(r) for r in form.U],
        V=[list(r) for r in form.V],
        certificate="UMV=D verified",
        **inv.to_json(),
    )
    text = [f"diagonal: {list(form.diagonal)}", f"cokernel: Z^{inv.free_rank}" + "".join(f" + Z/{d}" for d in inv.torsion)]
    return doc, text, True


COMMANDS = {
    "axioms": cmd_axioms,
    "flags": cmd_flags,
    "k0": cmd_k0,
    "measure": cmd_measure,
    "additivity": cmd_additivity,
    "splitting": cmd_splitting,
    "snf": cmd_snf,
}


def make_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="swkit", description="Checks for subtraction-sequence categories and their K-theory.")
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("file", nargs="?", help="session file (matrix file for snf, JSON table for --instance tabulated)")
    ap.add_argument("--instance", choices=["finset", "gset", "varieties", "tabulated"])
    ap.add_argument("--field", type=int, help="prime for the varieties instance")
    ap.add_argument("--vars", type=int, help="number of affine coordinates")
    ap.add_argument("--bound", type=int, help="object-size bound or universe size")
    ap.add_argument("--degree", type=int, help="simplicial degree bound")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--samples", type=int, default=100, help="random corpus size")
    ap.add_argument("--fast", action="store_true", help="skip validating homotopy outputs")
    ap.add_argument("--json", action="store_true")
    ap.add_argument("--golden-appendix", action="store_true")
    return ap


def _positive(args):
    for name in ("bound", "degree", "samples", "vars"):
        v = getattr(args, name)
        if v is not None and v < 0:
            raise PreconditionError(f"--{name} must be non-negative")
    if args.field is not None and not is_prime(args.field):
        raise PreconditionError(f"{args.field} is not prime")


def main(argv=None) -> int:
    ap = make_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        _positive(args)
        cfg = load_config(args)
        doc, text, ok = COMMANDS[args.command](args, cfg)
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (DSLError, PreconditionError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if doc is None:
        print("\n".join(text))
    elif args.json:
        print(json.dumps(to_jsonable(doc), sort_keys=True, indent=2))
    else:
        print("\n".join(text))
    return EXIT_OK if ok else EXIT_VIOLATIONS


if __name__ == "__main__":
    sys.exit(main())
