"""Workbench documents: tokenizer, parser, element formatter and serializer.

A document is a sequence of sections (``algebra``, ``lie``, ``problem``,
``command``), one statement per line, ``#`` starting a comment.  The
grammar is in docs/grammar.ebnf.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from .graded import Element, Generator, GradedError, Ring, mono_key, ring_for

SECTIONS = ("algebra", "lie", "problem", "command")
RESERVED = {"d", "del", "gen", "delta", "partial", "chain", "cochain", "weight"}

_TOKEN = re.compile(r"\s*(?:(?P<num>\d+(?:/\d+)?)|(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[-+*^()=]))")


class DocumentError(GradedError):
    """Parse or validation failure with a source location."""

    def __init__(self, msg: str, line: int = 0, col: int = 0, token: str = "", code: str = "parse-error"):
        where = f"line {line}, column {col}: " if line else ""
        super().__init__(f"{where}{msg}" + (f" (at {token!r})" if token else ""))
        self.line, self.col, self.token, self.code = line, col, token, code
        self.msg = msg


# ---------------------------------------------------------------------------
# formatting

def format_coeff(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def format_monomial(ring, m) -> str:
    parts = []
    for i, e in enumerate(m):
        if e:
            name = ring.symbols[i].name
            parts.append(name if e == 1 else f"{name}^{e}")
    return "*".join(parts)


def format_element(e: Element) -> str:
    """Normal-form text: terms in monomial order, coefficients as p/q, zero as "0"."""
    if not e.terms:
        return "0"
    out = []
    for k, (m, c) in enumerate(sorted(e.terms.items(), key=lambda t: mono_key(t[0]))):
        mono = format_monomial(e.ring, m)
        a = abs(c)
        if not mono:
            body = format_coeff(a)
        elif a == 1:
            body = mono
        else:
            body = f"{format_coeff(a)} * {mono}"
        if k == 0:
            out.append(("-" if c < 0 else "") + body)
        else:
            out.append((" - " if c < 0 else " + ") + body)
    return "".join(out)


# ---------------------------------------------------------------------------
# tokens and expressions

@dataclass
class Token:
    kind: str
    text: str
    line: int
    col: int


def tokenize(text: str, line: int = 1, col0: int = 1) -> List[Token]:
    out: List[Token] = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            bad = text[pos:].lstrip()
            c = len(text) - len(bad)
            raise DocumentError("unexpected character", line, col0 + c, bad[:1])
        kind = m.lastgroup
        start = m.start(kind)
        out.append(Token(kind, m.group(kind), line, col0 + start))
        pos = m.end()
    return out


class ExprParser:
    """Recursive descent over one expression, producing an Element of ``ring``."""

    def __init__(self, ring: Ring, tokens: List[Token], env: Optional[Dict[str, Element]] = None,
                 line: int = 0):
        self.ring, self.toks, self.i = ring, tokens, 0
        self.env = env or {}
        self.line = line

    def peek(self) -> Optional[Token]:
        return self.toks[self.i] if self.i < len(self.toks) else None

    def take(self, text: Optional[str] = None) -> Token:
        t = self.peek()
        if t is None:
            col = self.toks[-1].col + len(self.toks[-1].text) if self.toks else 1
            raise DocumentError("unexpected end of expression", self.line, col)
        if text is not None and t.text != text:
            raise DocumentError(f"expected {text!r}", t.line, t.col, t.text)
        self.i += 1
        return t

    def parse(self) -> Element:
        if not self.toks:
            raise DocumentError("empty expression", self.line, 1)
        e = self.expr()
        t = self.peek()
        if t is not None:
            raise DocumentError("unexpected token", t.line, t.col, t.text)
        return e

    def expr(self) -> Element:
        out = self.term()
        while self.peek() is not None and self.peek().text in "+-" and self.peek().kind == "op":
            op = self.take().text
            rhs = self.term()
            out = out + rhs if op == "+" else out - rhs
        return out

    def term(self) -> Element:
        out = self.unary()
        while self.peek() is not None and self.peek().text == "*":
            self.take()
            out = out * self.unary()
        return out

    def unary(self) -> Element:
        t = self.peek()
        if t is not None and t.text == "-":
            self.take()
            return -self.unary()
        if t is not None and t.text == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self) -> Element:
        base, sym = self.atom()
        t = self.peek()
        if t is not None and t.text == "^":
            self.take()
            et = self.take()
            if et.kind != "num" or "/" in et.text:
                raise DocumentError("exponent must be a non-negative integer", et.line, et.col, et.text)
            k = int(et.text)
            if sym is not None and self.ring.odd[sym] and k >= 2:
                raise DocumentError(f"odd symbol {self.ring.symbols[sym].name} cannot be raised to power {k}",
                                    et.line, et.col, et.text, "odd-power")
            return base ** k
        return base

    def _symbol(self, name: str, tok: Token) -> int:
        if name not in self.ring.index:
            raise DocumentError(f"unknown name {name!r}", tok.line, tok.col, tok.text, "unknown-name")
        return self.ring.index[name]

    def atom(self) -> Tuple[Element, Optional[int]]:
        t = self.take()
        if t.kind == "num":
            return self.ring.const(Fraction(t.text)), None
        if t.text == "(":
            e = self.expr()
            self.take(")")
            return e, None
        if t.kind == "name":
            if t.text in ("d", "del") and self.peek() is not None and self.peek().text == "(":
                self.take("(")
                arg = self.take()
                self.take(")")
                idx = self.ring.index.get(arg.text) if arg.kind == "name" else None
                if idx is None or self.ring.symbols[idx].kind != "x":
                    raise DocumentError(f"{t.text}(...) needs a generator name", arg.line, arg.col, arg.text,
                                        "unknown-name")
                name = ("dx_" if t.text == "d" else "pv_") + arg.text
                i = self._symbol(name, arg)
                return self.ring.sym(i), i
            if t.text in self.env:
                return self.env[t.text], None
            i = self._symbol(t.text, t)
            return self.ring.sym(i), i
        raise DocumentError("unexpected token", t.line, t.col, t.text)


def parse_expression(ring: Ring, text: str, env=None, line: int = 0, col0: int = 1) -> Element:
    return ExprParser(ring, tokenize(text, line, col0), env, line).parse()


# ---------------------------------------------------------------------------
# documents

@dataclass
class LieSection:
    basis: List[str] = field(default_factory=list)
    brackets: Dict[Tuple[str, str], Dict[str, Fraction]] = field(default_factory=dict)
    action: Dict[Tuple[str, str], str] = field(default_factory=dict)     # (basis, generator) -> expression text


@dataclass
class NamedElement:
    name: str
    kind: str          # "poly" | "form"
    element: Element
    line: int = 0


@dataclass
class WorkbenchDocument:
    generators: List[Generator]
    delta: Dict[str, Element]
    partial: Dict[str, Element]
    lie: Optional[LieSection]
    shift: int = 0
    truncation: int = 4
    max_poly_weight: int = 2
    model: str = "plain"
    elements: Dict[str, NamedElement] = field(default_factory=dict)
    verb: Optional[str] = None
    args: Dict[str, str] = field(default_factory=dict)
    warnings: List[str] = field(default_factory=list)


def _split_statement(line: str) -> str:
    return line.split("#", 1)[0].rstrip()


def parse_document(text: str, ring_hook=None) -> WorkbenchDocument:
    """Parse a workbench document.  ``ring_hook(doc)`` may supply the ring for problem elements."""
    lines = text.splitlines()
    section = None
    gens: List[Generator] = []
    diff_src: List[Tuple[str, str, str, int, int]] = []     # (table, name, expr, line, col)
    lie: Optional[LieSection] = None
    action_src: List[Tuple[str, str, str, int, int]] = []
    settings: Dict[str, Tuple[str, int]] = {}
    elem_src: List[Tuple[str, str, str, int, int]] = []
    verb: Optional[str] = None
    args: Dict[str, str] = {}
    seen = set()
    for ln, raw in enumerate(lines, 1):
        s = _split_statement(raw)
        if not s.strip():
            continue
        toks = tokenize(s, ln)
        head = toks[0]
        if head.text in SECTIONS and len(toks) == 1:
            if head.text in seen:
                raise DocumentError(f"section {head.text!r} repeated", ln, head.col, head.text)
            seen.add(head.text)
            section = head.text
            if section == "lie":
                lie = LieSection()
            continue
        if section is None:
            raise DocumentError("statement outside any section", ln, head.col, head.text)
        if section == "algebra":
            if head.text == "gen":
                gens.append(_parse_gen(toks, ln))
            elif head.text in ("delta", "partial"):
                name, rhs_col = _lhs_name(toks, ln, 1)
                diff_src.append((head.text, name, s[rhs_col - 1:], ln, rhs_col))
            else:
                raise DocumentError("expected gen, delta or partial", ln, head.col, head.text)
        elif section == "lie":
            if head.text == "basis":
                if len(toks) < 2 or any(t.kind != "name" for t in toks[1:]):
                    raise DocumentError("basis needs one or more names", ln, head.col, head.text)
                lie.basis = [t.text for t in toks[1:]]
            elif head.text == "bracket":
                if len(toks) < 5 or toks[3].text != "=":
                    raise DocumentError("expected: bracket A B = expression", ln, head.col, head.text)
                a, b = toks[1], toks[2]
                for t in (a, b):
                    if t.text not in lie.basis:
                        raise DocumentError(f"unknown Lie basis element {t.text!r}", ln, t.col, t.text, "unknown-name")
                lie.brackets[(a.text, b.text)] = _parse_linear(lie.basis, s[toks[4].col - 1:], ln, toks[4].col)
            elif head.text == "action":
                if len(toks) < 5 or toks[3].text != "=":
                    raise DocumentError("expected: action E GEN = expression", ln, head.col, head.text)
                e, g = toks[1], toks[2]
                if e.text not in lie.basis:
                    raise DocumentError(f"unknown Lie basis element {e.text!r}", ln, e.col, e.text, "unknown-name")
                action_src.append((e.text, g.text, s[toks[4].col - 1:], ln, toks[4].col))
            else:
                raise DocumentError("expected basis, bracket or action", ln, head.col, head.text)
        elif section == "problem":
            if head.text in ("shift", "truncation", "max-poly-weight", "model") or (
                    head.text == "max" and len(toks) > 1):
                key, val_tok = _setting(toks, ln)
                settings[key] = (val_tok.text, ln)
            elif head.text in ("poly", "form"):
                name, rhs_col = _lhs_name(toks, ln, 1)
                elem_src.append((head.text, name, s[rhs_col - 1:], ln, rhs_col))
            else:
                raise DocumentError("expected shift, truncation, max-poly-weight, model, poly or form",
                                    ln, head.col, head.text)
        elif section == "command":
            if head.text == "verb":
                if len(toks) < 2:
                    raise DocumentError("verb needs a name", ln, head.col, head.text)
                verb = s[toks[1].col - 1:].strip()
            elif "=" in s and re.fullmatch(r"[A-Za-z_][A-Za-z0-9_-]*", s.split("=", 1)[0].strip()):
                key, val = s.split("=", 1)
                args[key.strip()] = val.strip()
            else:
                raise DocumentError("expected: verb NAME or KEY = VALUE", ln, head.col, head.text)
    # resolve
    names = [g.name for g in gens]
    for g in gens:
        if g.name in RESERVED or g.name.startswith(("dx_", "pv_")):
            raise DocumentError(f"generator name {g.name!r} is reserved", 0, 0, g.name, "spec-invalid")
    if len(set(names)) != len(names):
        raise DocumentError("duplicate generator names", 0, 0, "", "spec-invalid")
    ring0 = ring_for(gens, 0)
    delta: Dict[str, Element] = {}
    partial: Dict[str, Element] = {}
    for table, name, src, ln, col in diff_src:
        if name not in names:
            raise DocumentError(f"unknown generator {name!r}", ln, 1, name, "unknown-name")
        (delta if table == "delta" else partial)[name] = parse_expression(ring0, src, None, ln, col)
    if lie is not None:
        for e, g, src, ln, col in action_src:
            if g not in names:
                raise DocumentError(f"unknown generator {g!r}", ln, col, g, "unknown-name")
            parse_expression(ring0, src, None, ln, col)      # validate now
            lie.action[(e, g)] = src.strip()
    doc = WorkbenchDocument(gens, delta, partial, lie)
    for key, (val, ln) in settings.items():
        if key == "model":
            if val not in ("plain", "ce"):
                raise DocumentError("model must be plain or ce", ln, 1, val)
            doc.model = val
            continue
        try:
            v = int(val)
        except ValueError:
            raise DocumentError(f"{key} needs an integer", ln, 1, val) from None
        if key == "shift":
            doc.shift = v
        elif key == "truncation":
            doc.truncation = v
        else:
            doc.max_poly_weight = v
    doc.verb, doc.args = verb, args
    ring = ring_hook(doc) if ring_hook is not None else ring_for(gens, doc.shift)
    env: Dict[str, Element] = {}
    for kind, name, src, ln, col in elem_src:
        if name in ring.index:
            raise DocumentError(f"element name {name!r} shadows a symbol", ln, 1, name, "spec-invalid")
        e = parse_expression(ring, src, env, ln, col)
        if len(e.degrees()) > 1:
            doc.warnings.append(f"line {ln}: {kind} {name} is not homogeneous (degrees {sorted(e.degrees())})")
        env[name] = e
        doc.elements[name] = NamedElement(name, kind, e, ln)
    return doc


def _lhs_name(toks: List[Token], ln: int, k: int) -> Tuple[str, int]:
    if len(toks) < k + 3 or toks[k].kind != "name" or toks[k + 1].text != "=":
        t = toks[min(k, len(toks) - 1)]
        raise DocumentError("expected: NAME = expression", ln, t.col, t.text)
    return toks[k].text, toks[k + 2].col


def _setting(toks: List[Token], ln: int) -> Tuple[str, Token]:
    # "max-poly-weight" tokenizes as max - poly - weight
    if toks[0].text == "max":
        if [t.text for t in toks[:5]] != ["max", "-", "poly", "-", "weight"] or len(toks) != 6:
            raise DocumentError("expected: max-poly-weight INT", ln, toks[0].col, toks[0].text)
        return "max-poly-weight", toks[5]
    if len(toks) == 3 and toks[1].text == "-" and toks[2].kind == "num":
        return toks[0].text, Token("num", "-" + toks[2].text, ln, toks[1].col)
    if len(toks) != 2:
        raise DocumentError(f"expected: {toks[0].text} VALUE", ln, toks[0].col, toks[0].text)
    return toks[0].text, toks[1]


def _parse_gen(toks: List[Token], ln: int) -> Generator:
    if len(toks) < 2 or toks[1].kind != "name":
        raise DocumentError("expected: gen NAME [chain INT] [cochain INT] [weight INT]", ln, toks[0].col, toks[0].text)
    name = toks[1].text
    vals = {"chain": 0, "cochain": 0, "weight": 1}
    i = 2
    while i < len(toks):
        key = toks[i]
        if key.text not in vals:
            raise DocumentError("expected chain, cochain or weight", ln, key.col, key.text)
        if i + 1 >= len(toks) or toks[i + 1].kind != "num" or "/" in toks[i + 1].text:
            raise DocumentError(f"{key.text} needs a non-negative integer", ln, key.col, key.text)
        vals[key.text] = int(toks[i + 1].text)
        i += 2
    return Generator(name, vals["chain"], vals["cochain"], vals["weight"])


def _parse_linear(basis: List[str], src: str, ln: int, col: int) -> Dict[str, Fraction]:
    ring = ring_for([Generator(b) for b in basis], 0)
    e = parse_expression(ring, src, None, ln, col)
    out: Dict[str, Fraction] = {}
    for m, c in e.terms.items():
        if sum(m) != 1 or any(m[ring.ngens:]):
            raise DocumentError("bracket values must be linear in the basis", ln, col, src.strip())
        out[basis[m.index(1)]] = c
    return out


# ---------------------------------------------------------------------------
# serialization

def serialize_document(doc: WorkbenchDocument) -> str:
    """Canonical text of a document; parse(serialize(doc)) serializes identically."""
    out = ["algebra"]
    for g in doc.generators:
        out.append(f"  gen {g.name} chain {g.chain} cochain {g.cochain} weight {g.weight}")
    for g in doc.generators:
        if g.name in doc.delta:
            out.append(f"  delta {g.name} = {format_element(doc.delta[g.name])}")
    for g in doc.generators:
        if g.name in doc.partial:
            out.append(f"  partial {g.name} = {format_element(doc.partial[g.name])}")
    if doc.lie is not None:
        out.append("lie")
        out.append("  basis " + " ".join(doc.lie.basis))
        ring = ring_for([Generator(b) for b in doc.lie.basis], 0)
        for (a, b), val in doc.lie.brackets.items():
            e = ring.zero()
            for k, c in val.items():
                e = e + ring.x(k).scale(c)
            out.append(f"  bracket {a} {b} = {format_element(e)}")
        ring0 = ring_for(doc.generators, 0)
        for (e, g), src in doc.lie.action.items():
            out.append(f"  action {e} {g} = {format_element(parse_expression(ring0, src))}")
    out.append("problem")
    out.append(f"  shift {doc.shift}")
    out.append(f"  truncation {doc.truncation}")
    out.append(f"  max-poly-weight {doc.max_poly_weight}")
    if doc.model != "plain":
        out.append(f"  model {doc.model}")
    for ne in doc.elements.values():
        out.append(f"  {ne.kind} {ne.name} = {format_element(ne.element)}")
    if doc.verb is not None or doc.args:
        out.append("command")
        if doc.verb is not None:
            out.append(f"  verb {doc.verb}")
        for k, v in doc.args.items():
            out.append(f"  {k} = {v}")
    return "\n".join(out) + "\n"
