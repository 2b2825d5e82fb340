"""Core reaction network model: complexes, reactions, kinetics, intensities.

Complexes and states are plain tuples of nonnegative ints indexed by species
position.  Networks are immutable; every operation here is pure.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Iterable, Sequence, Union

from .expr import BinOp, Const, ExprEvaluationError, Node, normalize_text

log = logging.getLogger(__name__)

Complex = tuple[int, ...]
State = tuple[int, ...]


def falling_factorial(x: int, k: int) -> int:
    """``x! / (x - k)!``, zero when ``x < k``."""
    if x < k:
        return 0
    return math.perm(x, k)


def geq(x: Sequence[int], y: Sequence[int]) -> bool:
    return all(a >= b for a, b in zip(x, y))


def add(x: Sequence[int], y: Sequence[int]) -> tuple[int, ...]:
    return tuple(a + b for a, b in zip(x, y))


def sub(x: Sequence[int], y: Sequence[int]) -> tuple[int, ...]:
    return tuple(a - b for a, b in zip(x, y))


@dataclass(frozen=True)
class MassAction:
    rate: Fraction

    def __post_init__(self):
        object.__setattr__(self, "rate", Fraction(self.rate))
        if self.rate <= 0:
            raise ValueError(f"mass-action rate must be positive, got {self.rate}")

    def intensity(self, reactant: Complex, x: State) -> Fraction:
        value = self.rate
        for xi, yi in zip(x, reactant):
            if yi:
                f = falling_factorial(xi, yi)
                if not f:
                    return Fraction(0)
                value *= f
        return value

    def scaled(self, factor: Fraction) -> "MassAction":
        return MassAction(self.rate * factor)


@dataclass(frozen=True)
class RateExpr:
    """Closed-form intensity; ``text`` is the canonical source spelling."""

    text: str
    node: Node = field(compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "text", normalize_text(self.text))

    def intensity(self, reactant: Complex, x: State) -> Fraction:
        value = self.node.eval(x)
        if value < 0:
            raise ExprEvaluationError(f"rate {self.text!r} is negative ({value}) at {x}")
        return value

    def scaled(self, factor: Fraction) -> "RateExpr":
        factor = Fraction(factor)
        if factor == 1:
            return self
        return RateExpr(f"{factor} * ({self.text})", BinOp("*", Const(factor), self.node))


Kinetics = Union[MassAction, RateExpr]


@dataclass(frozen=True)
class Reaction:
    reactant: Complex
    product: Complex
    kinetics: Kinetics

    @property
    def vector(self) -> tuple[int, ...]:
        return reaction_vector(self)

    @property
    def pair(self) -> tuple[Complex, Complex]:
        return (self.reactant, self.product)


def reaction_vector(r: Reaction) -> tuple[int, ...]:
    return sub(r.product, r.reactant)


@dataclass(frozen=True)
class Network:
    species: tuple[str, ...]
    reactions: tuple[Reaction, ...]

    def __post_init__(self):
        object.__setattr__(self, "species", tuple(self.species))
        object.__setattr__(self, "reactions", tuple(self.reactions))
        if len(set(self.species)) != len(self.species):
            raise ValueError("species names must be unique")
        n = len(self.species)
        for r in self.reactions:
            if len(r.reactant) != n or len(r.product) != n:
                raise ValueError("complex length does not match species count")
            if min(r.reactant + r.product, default=0) < 0:
                raise ValueError("negative stoichiometry")

    @property
    def n(self) -> int:
        return len(self.species)

    def index(self, name: str) -> int:
        try:
            return self.species.index(name)
        except ValueError:
            raise KeyError(name) from None

    @property
    def complexes(self) -> list[Complex]:
        seen: dict[Complex, None] = {}
        for r in self.reactions:
            seen.setdefault(r.reactant)
            seen.setdefault(r.product)
        return list(seen)

    @property
    def mass_action(self) -> bool:
        return all(isinstance(r.kinetics, MassAction) for r in self.reactions)

    def intensity(self, j: int, x: State) -> Fraction:
        r = self.reactions[j]
        return r.kinetics.intensity(r.reactant, x)

    def propensities(self, x: State) -> list[Fraction]:
        return [r.kinetics.intensity(r.reactant, x) for r in self.reactions]

    def propensities_float(self, x: State) -> list[float]:
        out = []
        for r in self.reactions:
            k = r.kinetics
            if isinstance(k, MassAction):
                v = float(k.rate)
                for xi, yi in zip(x, r.reactant):
                    if yi:
                        v *= falling_factorial(xi, yi)
                out.append(v)
            else:
                out.append(float(k.intensity(r.reactant, x)))
        return out

    def format_complex(self, y: Complex) -> str:
        return format_complex(y, self.species)


def format_complex(y: Sequence[int], names: Sequence[str]) -> str:
    terms = sorted((names[i], c) for i, c in enumerate(y) if c)
    if not terms:
        return "0"
    return " + ".join(name if c == 1 else f"{c} {name}" for name, c in terms)


def eval_intensity(net: Network, r: int, x: State) -> Fraction:
    """Intensity of reaction ``r`` at state ``x``.

    Raises :class:`ExprEvaluationError` when a rate expression is invalid at ``x``.
    """
    if len(x) != net.n:
        raise ValueError(f"state has length {len(x)}, expected {net.n}")
    return net.intensity(r, tuple(x))


# validation


@dataclass(frozen=True)
class UnusedSpecies:
    name: str

    def __str__(self):
        return f"species {self.name} has no positive coefficient in any complex"


@dataclass(frozen=True)
class SelfLoopReaction:
    index: int

    def __str__(self):
        return f"reaction {self.index} has identical reactant and product"


@dataclass(frozen=True)
class IncompatibleKinetics:
    index: int
    state: State
    value: Fraction | None
    reason: str = ""

    def __str__(self):
        if self.reason:
            return f"reaction {self.index} at {self.state}: {self.reason}"
        return (
            f"reaction {self.index}: intensity {self.value} at {self.state} "
            "violates positivity iff the reactant is present"
        )


Violation = Union[UnusedSpecies, SelfLoopReaction, IncompatibleKinetics]


def box_states(box: Sequence[int]) -> Iterable[State]:
    return product(*(range(b + 1) for b in box))


def check_compatibility(net: Network, box: Sequence[int]) -> list[IncompatibleKinetics]:
    """Check ``intensity > 0  <=>  x >= reactant`` on every state of ``box``.

    Mass-action reactions satisfy it by construction and are skipped.
    """
    found = []
    for j, r in enumerate(net.reactions):
        if isinstance(r.kinetics, MassAction):
            continue
        for x in box_states(box):
            try:
                v = net.intensity(j, x)
            except ExprEvaluationError as exc:
                found.append(IncompatibleKinetics(j, x, None, str(exc)))
                break
            if (v > 0) != geq(x, r.reactant):
                found.append(IncompatibleKinetics(j, x, v))
                break
    return found


def validate_network(net: Network, probe_box: Sequence[int] | None = None) -> list[Violation]:
    """Structural checks; an empty list means the network is well formed.

    Rate expressions are probed on ``probe_box`` when given; otherwise their
    compatibility with the reactant is trusted and a warning is logged.
    """
    out: list[Violation] = []
    used = [False] * net.n
    for r in net.reactions:
        for i in range(net.n):
            if r.reactant[i] or r.product[i]:
                used[i] = True
    out.extend(UnusedSpecies(net.species[i]) for i in range(net.n) if not used[i])
    out.extend(SelfLoopReaction(j) for j, r in enumerate(net.reactions) if r.reactant == r.product)
    if probe_box is not None:
        out.extend(check_compatibility(net, probe_box))
    elif not net.mass_action:
        log.warning("rate expressions not probed; assuming intensity > 0 iff reactant present")
    return out
