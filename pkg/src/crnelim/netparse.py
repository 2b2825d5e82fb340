"""Reading and writing ``.crn`` network files and JSON result documents.

A ``.crn`` file holds one declaration per line; ``#`` starts a comment::

    species: A, B, U            # optional; fixes species order
    set fast: U                 # optional named species sets
    beta: U=1                   # optional scaling exponents
    A -> U : k=1                # mass-action with rate constant 1
    U -> A + 2 B : rate=2*U*ind(U >= 1)
    A -> 0 : k=1/2              # "0" is the empty complex
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Mapping, Sequence

from .expr import ExprSyntaxError, parse_expr
from .model import Complex, MassAction, Network, RateExpr, Reaction, format_complex, validate_network


class NetParseError(ValueError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"line {line}, column {col}: {message}")
        self.line = line
        self.col = col


class NetworkSyntaxError(NetParseError):
    def __init__(self, line: int, col: int, expected: str, found: str = ""):
        msg = f"expected {expected}" + (f", found {found!r}" if found else "")
        super().__init__(msg, line, col)
        self.expected = expected


class UnknownSpecies(NetParseError):
    def __init__(self, name: str, line: int, col: int):
        super().__init__(f"unknown species {name!r}", line, col)
        self.name = name


class DuplicateReaction(NetParseError):
    def __init__(self, line: int, first_line: int):
        super().__init__(f"duplicate of the reaction on line {first_line}", line, 1)
        self.first_line = first_line


class InvalidNetwork(ValueError):
    def __init__(self, violations):
        super().__init__("; ".join(str(v) for v in violations))
        self.violations = list(violations)


@dataclass(frozen=True)
class NetworkDocument:
    network: Network
    sets: dict[str, tuple[str, ...]] = field(default_factory=dict)
    beta: dict[str, Fraction] | None = None


_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_RATIONAL = re.compile(r"\d+(?:\.\d+)?(?:/\d+)?")
_TERM = re.compile(r"(?P<coef>\d+)?\s*(?P<name>[A-Za-z_][A-Za-z0-9_]*)")


def _strip_comment(line: str) -> str:
    i = line.find("#")
    return line if i < 0 else line[:i]


def _skip_ws(s: str, pos: int) -> int:
    while pos < len(s) and s[pos].isspace():
        pos += 1
    return pos


def _parse_complex(text: str, lineno: int, offset: int) -> list[tuple[str, int, int]]:
    """Return ``(name, coefficient, column)`` triples of a complex spelling."""
    if not text.strip() or text.strip() == "0":
        return []
    terms = []
    pos = _skip_ws(text, 0)
    while True:
        m = _TERM.match(text, pos)
        if not m:
            found = text[pos:].split()[0] if text[pos:].split() else ""
            raise NetworkSyntaxError(lineno, offset + pos + 1, "species term like '2 B'", found)
        coef = int(m.group("coef")) if m.group("coef") else 1
        if coef == 0:
            raise NetworkSyntaxError(lineno, offset + pos + 1, "positive coefficient", "0")
        terms.append((m.group("name"), coef, offset + m.start("name") + 1))
        pos = _skip_ws(text, m.end())
        if pos >= len(text):
            return terms
        if text[pos] != "+":
            raise NetworkSyntaxError(lineno, offset + pos + 1, "'+' or end of complex", text[pos])
        pos = _skip_ws(text, pos + 1)


def _parse_rational(text: str, lineno: int, col: int) -> Fraction:
    t = text.strip()
    if not _RATIONAL.fullmatch(t):
        raise NetworkSyntaxError(lineno, col, "nonnegative rational number", t)
    return Fraction(t)


def _parse_name_list(body: str, lineno: int, col: int) -> list[tuple[str, int]]:
    out = []
    pos = 0
    for part in body.split(","):
        name = part.strip()
        c = col + pos + (len(part) - len(part.lstrip()))
        if not _NAME.fullmatch(name):
            raise NetworkSyntaxError(lineno, c, "species name", name)
        out.append((name, c))
        pos += len(part) + 1
    return out


def parse_document(text: str, validate: bool = True) -> NetworkDocument:
    declared: list[str] | None = None
    raw_sets: list[tuple[str, list[tuple[str, int]], int]] = []
    raw_beta: list[tuple[str, Fraction, int, int]] | None = None
    raw_reactions = []  # (lineno, lhs terms, rhs terms, kind, value, col)

    for lineno, full in enumerate(text.splitlines(), start=1):
        line = _strip_comment(full)
        if not line.strip():
            continue
        head = line.lstrip()
        indent = len(line) - len(head)
        if head.startswith("species:"):
            if declared is not None:
                raise NetworkSyntaxError(lineno, indent + 1, "a single species header", "species:")
            start = indent + len("species:")
            declared = [n for n, _ in _parse_name_list(line[start:], lineno, start + 1)]
            if len(set(declared)) != len(declared):
                raise NetworkSyntaxError(lineno, start + 1, "distinct species names")
            continue
        m = re.match(r"set\s+([A-Za-z_][A-Za-z0-9_]*)\s*:", head)
        if m:
            start = indent + m.end()
            raw_sets.append((m.group(1), _parse_name_list(line[start:], lineno, start + 1), lineno))
            continue
        if head.startswith("beta:"):
            raw_beta = []
            start = indent + len("beta:")
            pos = start
            for part in line[start:].split(","):
                c = pos + 1 + (len(part) - len(part.lstrip()))
                if "=" not in part:
                    raise NetworkSyntaxError(lineno, c, "'<species>=<rational>'", part.strip())
                name, val = part.split("=", 1)
                name = name.strip()
                if not _NAME.fullmatch(name):
                    raise NetworkSyntaxError(lineno, c, "species name", name)
                raw_beta.append((name, _parse_rational(val, lineno, c + len(name) + 1), lineno, c))
                pos += len(part) + 1
            continue

        arrow = line.find("->")
        if arrow < 0:
            raise NetworkSyntaxError(lineno, indent + 1, "reaction 'lhs -> rhs : k=...'", head.strip())
        colon = line.find(":", arrow)
        if colon < 0:
            raise NetworkSyntaxError(lineno, len(line.rstrip()) + 1, "':' followed by kinetics")
        lhs = _parse_complex(line[:arrow], lineno, 0)
        rhs = _parse_complex(line[arrow + 2 : colon], lineno, arrow + 2)
        kin = line[colon + 1 :]
        kcol = colon + 2 + (len(kin) - len(kin.lstrip()))
        kin = kin.strip()
        if kin.startswith("k="):
            raw_reactions.append((lineno, lhs, rhs, "k", _parse_rational(kin[2:], lineno, kcol + 2), kcol))
        elif kin.startswith("rate="):
            raw_reactions.append((lineno, lhs, rhs, "rate", kin[5:], kcol + 5))
        else:
            raise NetworkSyntaxError(lineno, kcol, "'k=<rational>' or 'rate=<expression>'", kin)

    if declared is None:
        names: list[str] = []
        for _, lhs, rhs, *_ in raw_reactions:
            for name, _, _ in lhs + rhs:
                if name not in names:
                    names.append(name)
    else:
        names = declared
    index = {n: i for i, n in enumerate(names)}

    def vec(terms, lineno) -> Complex:
        v = [0] * len(names)
        for name, coef, col in terms:
            if name not in index:
                raise UnknownSpecies(name, lineno, col)
            v[index[name]] += coef
        return tuple(v)

    reactions = []
    seen: dict[tuple[Complex, Complex], int] = {}
    for lineno, lhs, rhs, kind, value, col in raw_reactions:
        y, y2 = vec(lhs, lineno), vec(rhs, lineno)
        if (y, y2) in seen:
            raise DuplicateReaction(lineno, seen[(y, y2)])
        seen[(y, y2)] = lineno
        if kind == "k":
            if value <= 0:
                raise NetworkSyntaxError(lineno, col, "positive rate constant", str(value))
            kinetics = MassAction(value)
        else:
            try:
                node = parse_expr(value, index)
            except ExprSyntaxError as exc:
                m = re.match(r"unknown species '(.+)'", exc.message)
                if m:
                    raise UnknownSpecies(m.group(1), lineno, col + exc.col) from None
                raise NetworkSyntaxError(lineno, col + exc.col, exc.message) from None
            kinetics = RateExpr(value, node)
        reactions.append(Reaction(y, y2, kinetics))

    net = Network(tuple(names), tuple(reactions))

    sets = {}
    for set_name, members, lineno in raw_sets:
        for name, col in members:
            if name not in index:
                raise UnknownSpecies(name, lineno, col)
        sets[set_name] = tuple(n for n, _ in members)
    beta = None
    if raw_beta is not None:
        beta = {}
        for name, value, lineno, col in raw_beta:
            if name not in index:
                raise UnknownSpecies(name, lineno, col)
            beta[name] = value

    if validate:
        violations = validate_network(net)
        if violations:
            raise InvalidNetwork(violations)
    return NetworkDocument(net, sets, beta)


def parse_network(text: str, validate: bool = True) -> NetworkDocument:
    """Parse ``.crn`` text into a network plus its declared species sets."""
    return parse_document(text, validate=validate)


def read_network(path, validate: bool = True) -> NetworkDocument:
    with open(path, encoding="utf-8") as fh:
        return parse_document(fh.read(), validate=validate)


def format_rational(q: Fraction) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def serialize_network(net: Network) -> str:
    lines = ["species: " + ", ".join(net.species)]
    for r in net.reactions:
        lhs = format_complex(r.reactant, net.species)
        rhs = format_complex(r.product, net.species)
        if isinstance(r.kinetics, MassAction):
            kin = f"k={format_rational(r.kinetics.rate)}"
        else:
            kin = f"rate={r.kinetics.text}"
        lines.append(f"{lhs} -> {rhs} : {kin}")
    return "\n".join(lines) + "\n"


def serialize_document(doc: NetworkDocument) -> str:
    text = serialize_network(doc.network)
    head, _, body = text.partition("\n")
    extra = [f"set {name}: " + ", ".join(members) for name, members in doc.sets.items()]
    if doc.beta is not None:
        extra.append("beta: " + ", ".join(f"{k}={format_rational(v)}" for k, v in doc.beta.items()))
    return "\n".join([head, *extra, body.rstrip("\n")]) + "\n"


# JSON

RATIONAL_PATTERN = r"^-?\d+/\d+$"


def rational_json(q) -> str | float:
    """``"p/q"`` for exact values, plain floats pass through."""
    if isinstance(q, float):
        return q
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def parse_rational_json(value) -> Fraction | float:
    if isinstance(value, str):
        return Fraction(value)
    return value


_NUMBER = {"oneOf": [{"type": "string", "pattern": RATIONAL_PATTERN}, {"type": "number"}]}
_STATE = {"type": "array", "items": {"type": "integer", "minimum": 0}}
_NAMES = {"type": "array", "items": {"type": "string"}}

DISTRIBUTION_SCHEMA: dict[str, Any] = {
    "type": "object",
    "required": ["species", "entries"],
    "properties": {
        "species": _NAMES,
        "normalizer": {"oneOf": [_NUMBER, {"type": "null"}]},
        "entries": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["state", "p"],
                "properties": {"state": _STATE, "p": _NUMBER},
                "additionalProperties": False,
            },
        },
    },
}

_WALK = {
    "type": "object",
    "required": ["nodes", "reactions"],
    "properties": {
        "nodes": _NAMES,
        "reactions": {"type": "array", "items": {"type": "integer", "minimum": 0}},
    },
}

_PAIR = {
    "type": "object",
    "required": ["reactant", "product"],
    "properties": {
        "reactant": {"type": "string"},
        "product": {"type": "string"},
        "reactant_vector": _STATE,
        "product_vector": _STATE,
        "provenance_count": {"type": "integer", "minimum": 1},
        "example_walk": _WALK,
    },
}

_CERT: dict[str, Any] = {
    "type": "object",
    "required": ["holds", "witness"],
    "properties": {
        "holds": {"type": "boolean"},
        "witness": {
            "oneOf": [
                {"type": "null"},
                {
                    "type": "object",
                    "required": ["coefficients", "cycles", "vector"],
                    "properties": {
                        "coefficients": {"type": "array", "items": {"type": "integer"}},
                        "cycles": {"type": "array", "items": _WALK},
                        "vector": {"type": "array", "items": {"type": "integer"}},
                    },
                },
            ]
        },
    },
}

CONDITION_SCHEMA: dict[str, Any] = {
    "type": "object",
    "required": [
        "u",
        "u_pro",
        "u_deg",
        "eliminable",
        "weakly_reversible",
        "condition1",
        "condition2_i",
        "condition2_ii",
    ],
    "properties": {
        "u": _NAMES,
        "u_pro": _NAMES,
        "u_deg": _NAMES,
        "eliminable": {"type": "boolean"},
        "weakly_reversible": {"type": "boolean"},
        "condition1": {
            "type": "object",
            "required": ["holds", "witness"],
            "properties": {"holds": {"type": "boolean"}, "witness": {"oneOf": [_WALK, {"type": "null"}]}},
        },
        "condition2_i": _CERT,
        "condition2_ii": _CERT,
    },
}

REDUCED_SCHEMA: dict[str, Any] = {
    "type": "object",
    "required": ["species", "core_species", "eliminated", "reactions", "walk_sums", "conditions"],
    "properties": {
        "species": _NAMES,
        "core_species": _NAMES,
        "eliminated": _NAMES,
        "reactions": {"type": "array", "items": _PAIR},
        "walk_sums": {"type": "array", "items": _PAIR},
        "conditions": CONDITION_SCHEMA,
    },
}

RESIDUAL_SCHEMA: dict[str, Any] = {
    "type": "object",
    "required": ["stationary", "complex_balance"],
    "properties": {
        "stationary": _NUMBER,
        "complex_balance": {"type": "object", "additionalProperties": _NUMBER},
        "detailed_balance": {"oneOf": [{"type": "object", "additionalProperties": _NUMBER}, {"type": "null"}]},
    },
}

CONVERGENCE_SCHEMA: dict[str, Any] = {
    "type": "object",
    "required": ["beta", "gamma0", "gap", "rows", "limit"],
    "properties": {
        "beta": {"type": "object", "additionalProperties": _NUMBER},
        "gamma0": _NUMBER,
        "gap": {"oneOf": [_NUMBER, {"type": "null"}]},
        "rows": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["N", "tv", "normalizer"],
                "properties": {"N": {"type": "integer", "minimum": 1}, "tv": _NUMBER, "normalizer": _NUMBER},
            },
        },
        "limit": DISTRIBUTION_SCHEMA,
    },
}


def distribution_json(dist, species: Sequence[str]) -> dict[str, Any]:
    entries = [{"state": list(x), "p": rational_json(p)} for x, p in sorted(dist.items())]
    norm = dist.normalizer
    return {
        "species": list(species),
        "normalizer": None if norm is None else rational_json(norm),
        "entries": entries,
    }


def distribution_from_json(doc: Mapping[str, Any]) -> dict[tuple[int, ...], Fraction | float]:
    return {tuple(e["state"]): parse_rational_json(e["p"]) for e in doc["entries"]}
