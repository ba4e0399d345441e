"""Surface syntax for formulas and problem files, and a printer that round-trips through it.

Precedence, tightest first: ``~``, ``*``, ``+``, ``/\\``, ``\\/``, ``->`` (right-associative),
``<->``. ``0`` and ``1`` are the constants, ``(p >= 2/3)`` is an interval literal.
"""
from __future__ import annotations

import re
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .abduction import FRESH_PREFIX, AbductionProblem
from .clausal import FuzzyRule, as_simple_clause
from .intervals import IntervalTerm
from .syntax import (
    BOT,
    TOP,
    Constant,
    Formula,
    Iff,
    Implies,
    IntLit,
    Neg,
    Relation,
    StrongConj,
    StrongDisj,
    Var,
    WeakConj,
    WeakDisj,
    fmt_rational,
)


class ParseError(ValueError):
    def __init__(self, message: str, line: int = 1, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class DuplicateHypothesis(UserWarning):
    pass


_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+(?:/\d+)?)|(?P<name>[A-Za-z_][A-Za-z0-9_']*)"
    r"|(?P<op><->|->|/\\|\\/|<=|>=|<|>|~|\*|\+|\(|\)|@))"
)

_RELS = {"<=": Relation.LEQ, "<": Relation.LT, ">=": Relation.GEQ, ">": Relation.GT}
# binary operators by precedence level, loosest first
_LEVELS = [("<->", Iff), ("->", Implies), ("\\/", WeakDisj), ("/\\", WeakConj), ("+", StrongDisj), ("*", StrongConj)]
_OP_OF = {cls: op for op, cls in _LEVELS}
_PREC = {cls: i for i, (_, cls) in enumerate(_LEVELS)}


@dataclass
class _Tok:
    kind: str
    text: str
    col: int


def _tokenize(text: str, line: int, col0: int) -> list:
    out = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            col = col0 + pos + (len(text[pos:]) - len(text[pos:].lstrip()))
            raise ParseError(f"unexpected character {text[col - col0]!r}", line, col)
        kind = m.lastgroup
        start = m.start(kind)
        out.append(_Tok(kind, m.group(kind), col0 + start))
        pos = m.end()
    out.append(_Tok("end", "", col0 + len(text)))
    return out


def parse_rational(s: str, line: int = 1, col: int = 1) -> Fraction:
    if not re.fullmatch(r"\d+(?:/\d+)?", s.strip()):
        raise ParseError(f"expected a rational a/b, got {s!r}", line, col)
    num, _, den = s.strip().partition("/")
    if den and int(den) == 0:
        raise ParseError("zero denominator", line, col)
    return Fraction(int(num), int(den) if den else 1)


class _Parser:
    def __init__(self, text: str, line: int = 1, col0: int = 1):
        self.toks = _tokenize(text, line, col0)
        self.i = 0
        self.line = line

    def peek(self, k=0) -> _Tok:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def take(self) -> _Tok:
        t = self.toks[self.i]
        self.i += 1
        return t

    def error(self, msg, tok=None):
        tok = tok or self.peek()
        raise ParseError(msg, self.line, tok.col)

    def expect(self, text):
        t = self.peek()
        if t.text != text or t.kind == "end":
            self.error(f"expected {text!r}, got {t.text or 'end of input'!r}")
        return self.take()

    def done(self):
        if self.peek().kind != "end":
            self.error(f"unexpected {self.peek().text!r}")

    def formula(self, level: int = 0) -> Formula:
        if level == len(_LEVELS):
            return self.unary()
        op, cls = _LEVELS[level]
        left = self.formula(level + 1)
        if op == "->":
            if self.peek().text == op:
                self.take()
                return cls(left, self.formula(level))
            return left
        while self.peek().text == op:
            self.take()
            left = cls(left, self.formula(level + 1))
        return left

    def unary(self) -> Formula:
        t = self.peek()
        if t.text == "~":
            self.take()
            return Neg(self.unary())
        return self.atom()

    def atom(self) -> Formula:
        t = self.take()
        if t.kind == "num":
            if t.text == "0":
                return BOT
            if t.text == "1":
                return TOP
            self.error(f"numeric constant {t.text} is only allowed as a literal bound", t)
        if t.kind == "name":
            return Var(self.check_name(t))
        if t.text == "(":
            if self.peek().kind == "name" and self.peek(1).text in _RELS:
                lam = self.literal_body()
                self.expect(")")
                return lam
            f = self.formula()
            self.expect(")")
            return f
        self.error(f"unexpected {t.text or 'end of input'!r}", t)

    def check_name(self, t: _Tok) -> str:
        if t.text.startswith(FRESH_PREFIX):
            self.error(f"names starting with {FRESH_PREFIX!r} are reserved", t)
        return t.text

    def literal_body(self) -> IntLit:
        name = self.check_name(self.take())
        rel = _RELS[self.take().text]
        t = self.take()
        if t.kind != "num":
            self.error("expected a rational bound", t)
        return IntLit(name, rel, parse_rational(t.text, self.line, t.col))

    def literal(self) -> IntLit:
        if self.peek().text == "(":
            self.take()
            lam = self.literal_body()
            self.expect(")")
        elif self.peek().kind == "name" and self.peek(1).text in _RELS:
            lam = self.literal_body()
        else:
            self.error("expected an interval literal")
        return lam


def parse_formula(text: str, line: int = 1, col0: int = 1) -> Formula:
    p = _Parser(text, line, col0)
    f = p.formula()
    p.done()
    return f


def parse_literal(text: str, line: int = 1, col0: int = 1) -> IntLit:
    p = _Parser(text, line, col0)
    lam = p.literal()
    p.done()
    return lam


def parse_term(text: str) -> IntervalTerm:
    """A ⊙-product of interval literals, or ``1`` for the empty term."""
    f = parse_formula(text)
    lits = []
    stack = [f]
    while stack:
        g = stack.pop()
        if isinstance(g, StrongConj):
            stack.extend((g.right, g.left))
        elif isinstance(g, IntLit):
            lits.append(g)
        elif g == TOP:
            continue
        else:
            raise ParseError(f"not an interval term: {text}")
    return IntervalTerm(lits)


def parse_theory_item(text: str, line: int = 1, col0: int = 1):
    """A formula, or ``clause @ degree`` for a graded simple clause."""
    p = _Parser(text, line, col0)
    f = p.formula()
    if p.peek().text == "@":
        at = p.take()
        t = p.take()
        if t.kind != "num":
            p.error("expected a degree", t)
        p.done()
        clause = as_simple_clause(f)
        if clause is None:
            p.error("only simple clauses may carry a degree", at)
        d = parse_rational(t.text, line, t.col)
        if not 0 < d <= 1:
            p.error("degrees must lie in (0, 1]", t)
        return FuzzyRule(clause, d)
    p.done()
    return f


_MACRO = re.compile(r"^\s*([A-Za-z][A-Za-z0-9']*)\s*\{([^}]*)\}\s*\{\s*(\d+)\s*\.\.\s*(\d+)\s*\}\s*/\s*(\d+)\s*$")


def expand_range(text: str, line: int = 1) -> Optional[list]:
    """``c {<=,<,>=,>} {0..12}/12`` to the 52 literals it names; None if the text is not a macro."""
    m = _MACRO.match(text)
    if not m:
        return None
    name, rels, lo, hi, den = m.groups()
    out = []
    for r in (s.strip() for s in rels.split(",")):
        if r not in _RELS:
            raise ParseError(f"unknown relation {r!r} in range", line, m.start(2) + 1)
        for i in range(int(lo), int(hi) + 1):
            out.append(IntLit(name, _RELS[r], Fraction(i, int(den))))
    return out


def _split_top(text: str):
    """Split on commas outside parentheses and braces; yields (piece, offset)."""
    depth, start = 0, 0
    for k, ch in enumerate(text):
        if ch in "({":
            depth += 1
        elif ch in ")}":
            depth -= 1
        elif ch == "," and depth == 0:
            yield text[start:k], start
            start = k + 1
    yield text[start:], start


def parse_hypotheses(text: str, line: int = 1, col0: int = 1) -> list:
    out = []
    for piece, off in _split_top(text):
        if not piece.strip():
            continue
        macro = expand_range(piece, line)
        if macro is not None:
            out.extend(macro)
        else:
            out.append(parse_literal(piece, line, col0 + off))
    return out


@dataclass
class ProblemFile:
    problem: AbductionProblem
    options: dict = field(default_factory=dict)


_SECTIONS = ("theory", "observation", "hypotheses", "options")


def parse_problem_file(text: str) -> ProblemFile:
    sections = {s: [] for s in _SECTIONS}
    seen = set()
    current = None
    for n, raw in enumerate(text.splitlines(), 1):
        body = raw.split("#", 1)[0]
        if not body.strip():
            continue
        m = re.match(r"^\s*([a-z]+)\s*:", body)
        if m and m.group(1) in _SECTIONS:
            current = m.group(1)
            if current in seen:
                raise ParseError(f"section {current!r} given twice", n, 1)
            seen.add(current)
            rest = body[m.end():]
            if rest.strip():
                sections[current].append((rest, n, m.end() + 1))
            continue
        if current is None:
            raise ParseError("expected a section header (theory:, observation:, hypotheses:, options:)", n, 1)
        sections[current].append((body, n, 1))

    theory = [parse_theory_item(t, n, c) for t, n, c in sections["theory"]]
    obs_lines = sections["observation"]
    if "observation" not in seen or not obs_lines:
        raise ParseError("missing observation", len(text.splitlines()) or 1, 1)
    if len(obs_lines) > 1:
        raise ParseError("the observation must be a single formula", obs_lines[1][1], 1)
    obs = parse_theory_item(*obs_lines[0])
    H = []
    for t, n, c in sections["hypotheses"]:
        for lam in parse_hypotheses(t, n, c):
            if lam in H:
                warnings.warn(f"line {n}: duplicate hypothesis {format_formula(lam)}", DuplicateHypothesis, stacklevel=2)
                continue
            H.append(lam)
    options = {}
    for t, n, c in sections["options"]:
        key, eq, value = t.partition("=")
        if not eq:
            raise ParseError("options are written key = value", n, c)
        options[key.strip()] = _option_value(value.strip())
    return ProblemFile(AbductionProblem(tuple(theory), obs, tuple(H)), options)


def _option_value(v: str):
    if v.lower() in ("true", "yes", "on"):
        return True
    if v.lower() in ("false", "no", "off"):
        return False
    if re.fullmatch(r"\d+", v):
        return int(v)
    return v


def parse_problem(text: str) -> AbductionProblem:
    return parse_problem_file(text).problem


# ---------------------------------------------------------------------------
# printing


def format_literal(lam: IntLit) -> str:
    return f"({lam.var} {lam.rel.value} {fmt_rational(lam.bound)})"


def format_formula(f: Formula) -> str:
    if isinstance(f, Var):
        return f.name
    if isinstance(f, Constant):
        return "1" if f.value else "0"
    if isinstance(f, IntLit):
        return format_literal(f)
    if isinstance(f, Neg):
        inner = format_formula(f.arg)
        return "~" + (inner if _is_atomic(f.arg) else f"({inner})")
    cls = type(f)
    prec = _PREC[cls]
    left, right = format_formula(f.left), format_formula(f.right)
    if cls is Implies:
        # right-associative: parenthesize a left operand of equal or looser binding
        if _prec(f.left) <= prec:
            left = f"({left})"
        if _prec(f.right) < prec:
            right = f"({right})"
    else:
        if _prec(f.left) < prec:
            left = f"({left})"
        if _prec(f.right) <= prec:
            right = f"({right})"
    return f"{left} {_OP_OF[cls]} {right}"


def _is_atomic(f) -> bool:
    return isinstance(f, (Var, Constant, IntLit, Neg))


def _prec(f) -> int:
    return _PREC.get(type(f), len(_LEVELS))


def format_term(tau: IntervalTerm) -> str:
    lits = list(tau)
    return " * ".join(format_literal(l) for l in lits) if lits else "1"


def format_item(item) -> str:
    if isinstance(item, FuzzyRule):
        return f"{format_formula(item.clause.to_formula())} @ {fmt_rational(item.degree)}"
    if isinstance(item, IntervalTerm):
        return format_term(item)
    if hasattr(item, "to_formula"):
        return format_formula(item.to_formula())
    return format_formula(item)


def format_problem(P: AbductionProblem, options: Optional[dict] = None) -> str:
    lines = ["theory:"]
    lines += [f"  {format_item(it)}" for it in P.theory]
    lines.append(f"observation: {format_item(P.observation)}")
    lines.append("hypotheses: " + ", ".join(format_literal(h) for h in P.hypotheses))
    if options:
        lines.append("options:")
        lines += [f"  {k} = {str(v).lower() if isinstance(v, bool) else v}" for k, v in options.items()]
    return "\n".join(lines) + "\n"
