"""Plain-text reaction format (``.crn``).

One reaction per line::

    # comment
    species X1, X2, X3           # optional, fixes the species order
    X1 + X2 -> 2 X1 ; k = 1
    0 -> X ; k = 3/2              # "0" is the empty complex
    A <-> B ; k = 1, 0.5          # forward, backward

Rate constants are all-or-nothing: either every reaction line has one or
none does. Numbers may be integers, decimals (with exponent) or ``p/q``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .errors import DuplicateEdge, MixedRates, NonpositiveRate, ParseError
from .model import RateAssignment, ReactionNetwork, complex_to_str

_TOKEN = re.compile(
    r"(?P<ws>\s+)|(?P<arrow><->|->)|(?P<plus>\+)|(?P<int>\d+)|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)"
)
_NUM = r"[-+]?(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][-+]?\d+)?"
_RATE = re.compile(rf"\s*k\s*=\s*(?P<a>{_NUM}(?:\s*/\s*{_NUM})?)(?:\s*,\s*(?P<b>{_NUM}(?:\s*/\s*{_NUM})?))?\s*$")
_HEADER = re.compile(r"\s*species\b")


@dataclass(frozen=True)
class ParseDiagnostic:
    line: int
    column: int
    message: str

    def __str__(self):
        return f"line {self.line}, column {self.column}: {self.message}"


class _LineError(Exception):
    def __init__(self, column, message):
        self.column = column
        self.message = message


def _tokens(text: str, offset: int):
    pos = 0
    out = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise _LineError(offset + pos + 1, f"unexpected character {text[pos]!r}")
        if m.lastgroup != "ws":
            out.append((m.lastgroup, m.group(), offset + pos + 1))
        pos = m.end()
    out.append(("end", "", offset + len(text) + 1))
    return out


def _parse_complex(toks, i):
    """Parse a complex starting at token ``i``; returns ``({name: coeff}, next_i)``."""
    kind, val, col = toks[i]
    if kind == "int" and val == "0" and toks[i + 1][0] != "ident":
        return {}, i + 1
    terms: dict[str, int] = {}
    while True:
        kind, val, col = toks[i]
        coeff = 1
        if kind == "int":
            coeff = int(val)
            if coeff == 0:
                raise _LineError(col, "zero coefficient")
            i += 1
            kind, val, col = toks[i]
        if kind != "ident":
            what = f"{val!r}" if val else "end of line"
            raise _LineError(col, f"expected a species term, found {what}")
        terms[val] = terms.get(val, 0) + coeff
        i += 1
        if toks[i][0] != "plus":
            return terms, i
        i += 1


def _number(text: str) -> float:
    if "/" in text:
        p, q = (s.strip() for s in text.split("/"))
        return float(Fraction(p) / Fraction(q))
    return float(text)


def _parse_line(body: str, rates_part: str | None, rate_col: int):
    toks = _tokens(body, 0)
    lhs, i = _parse_complex(toks, 0)
    kind, val, col = toks[i]
    if kind != "arrow":
        what = f"{val!r}" if val else "end of line"
        raise _LineError(col, f"expected '->' or '<->', found {what}")
    reversible = val == "<->"
    rhs, i = _parse_complex(toks, i + 1)
    kind, val, col = toks[i]
    if kind != "end":
        raise _LineError(col, f"unexpected {val!r} after reaction")
    rates = None
    if rates_part is not None:
        m = _RATE.match(rates_part)
        if m is None:
            raise _LineError(rate_col, "expected 'k = <number>' after ';'")
        try:
            rates = [_number(m.group("a"))]
            if m.group("b") is not None:
                rates.append(_number(m.group("b")))
        except (ValueError, ZeroDivisionError):
            raise _LineError(rate_col, "malformed rate constant") from None
        if len(rates) == 2 and not reversible:
            raise _LineError(rate_col, "two rate constants given for an irreversible reaction")
    return lhs, rhs, reversible, rates


def parse_network(text: str) -> tuple[ReactionNetwork, RateAssignment | None]:
    """Read a network (and rate constants, when every line has them).

    Raises:
        ParseError: syntax errors; ``diagnostics`` lists every offending line.
        MixedRates: only some reaction lines carry rate constants.
        DuplicateEdge: the same (source, target) pair appears twice.
        NonpositiveRate: a rate constant is zero or negative.
    """
    diags: list[ParseDiagnostic] = []
    declared: list[str] | None = None
    reactions = []  # (lineno, rate_col, lhs, rhs, rate or None)
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        if _HEADER.match(line) and "->" not in line:
            names = re.split(r"[\s,]+", line.strip()[len("species"):].strip())
            names = [n for n in names if n]
            col = line.index("species") + 1
            if reactions or declared is not None:
                diags.append(ParseDiagnostic(lineno, col, "species header must come first and only once"))
            elif not names:
                diags.append(ParseDiagnostic(lineno, col, "empty species header"))
            elif any(not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", n) for n in names):
                diags.append(ParseDiagnostic(lineno, col, "malformed species name in header"))
            elif len(set(names)) != len(names):
                diags.append(ParseDiagnostic(lineno, col, "species declared twice"))
            else:
                declared = names
            continue
        body, sep, rates_part = line.partition(";")
        try:
            lhs, rhs, reversible, rates = _parse_line(body, rates_part if sep else None, len(body) + 2)
        except _LineError as err:
            diags.append(ParseDiagnostic(lineno, err.column, err.message))
            continue
        col = len(body) + 2
        if reversible:
            fwd = rates[0] if rates else None
            bwd = rates[-1] if rates else None
            reactions.append((lineno, col, lhs, rhs, fwd))
            reactions.append((lineno, col, rhs, lhs, bwd))
        else:
            reactions.append((lineno, col, lhs, rhs, rates[0] if rates else None))
    if diags:
        raise ParseError(diags)
    if not reactions:
        raise ParseError([ParseDiagnostic(1, 1, "input contains no reactions")])

    species = list(declared) if declared is not None else []
    for lineno, _, lhs, rhs, _ in reactions:
        for name in list(lhs) + list(rhs):
            if name not in species:
                if declared is not None:
                    col = max(1, text.splitlines()[lineno - 1].find(name) + 1)
                    diags.append(ParseDiagnostic(lineno, col, f"species {name!r} not in header"))
                    species.append(name)  # keep going to report everything once
                else:
                    species.append(name)
    if diags:
        raise ParseError(diags)

    def vec(terms):
        return tuple(terms.get(s, 0) for s in species)

    seen: dict[tuple, int] = {}
    pairs = []
    dups = []
    for lineno, _, lhs, rhs, _ in reactions:
        pair = (vec(lhs), vec(rhs))
        if pair[0] == pair[1]:
            diags.append(ParseDiagnostic(lineno, 1, "reaction has identical source and target"))
        if pair in seen:
            dups.append(ParseDiagnostic(lineno, 1, f"duplicate reaction (first on line {seen[pair]})"))
        else:
            seen[pair] = lineno
        pairs.append(pair)
    if diags:
        raise ParseError(diags)
    if dups:
        raise DuplicateEdge(dups)

    with_rate = [r for r in reactions if r[4] is not None]
    rates = None
    if with_rate and len(with_rate) != len(reactions):
        missing = sorted({r[0] for r in reactions if r[4] is None})
        raise MixedRates([ParseDiagnostic(n, 1, "reaction has no rate constant while others do") for n in missing])
    if with_rate:
        bad = [ParseDiagnostic(r[0], r[1], f"rate constant must be positive and finite, got {r[4]}") for r in reactions if not 0 < r[4] < float("inf")]
        if bad:
            raise NonpositiveRate(bad)
        rates = RateAssignment(tuple(r[4] for r in reactions))
    return ReactionNetwork.from_reactions(species, pairs), rates


def _fmt_number(v: float) -> str:
    if float(v).is_integer() and abs(v) < 1e15:
        return str(int(v))
    return repr(float(v))


def format_network(net: ReactionNetwork, rates: RateAssignment | None = None) -> str:
    """Emit one line per edge; ``parse_network`` reads the result back unchanged."""
    if rates is not None and len(rates) != net.n_edges:
        raise ValueError("rates do not match the network's edges")
    order: list[int] = []
    for e in net.edges:
        for v in (e.source, e.target):
            for i, c in enumerate(net.vertices[v]):
                if c and i not in order:
                    order.append(i)
    lines = []
    if order != list(range(net.n_species)):
        lines.append("species " + ", ".join(net.species))
    for j in range(net.n_edges):
        e = net.edges[j]
        s = f"{complex_to_str(net.vertices[e.source], net.species)} -> {complex_to_str(net.vertices[e.target], net.species)}"
        if rates is not None:
            s += f" ; k = {_fmt_number(rates.k[j])}"
        lines.append(s)
    return "\n".join(lines) + "\n"
