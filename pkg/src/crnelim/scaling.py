"""Scaled kinetics ``N^<β, ρ(y)>`` and the limit of the scaled distributions."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .elimination import resolve_species
from .markov import Distribution, conditional_distribution, total_variation
from .model import Network, Reaction, State


class IrrationalPower(ValueError):
    pass


def _iroot(n: int, k: int) -> int | None:
    """Exact integer ``k``-th root of ``n``, or ``None``."""
    lo, hi = 0, 1
    while hi**k <= n:
        hi *= 2
    while lo < hi - 1:
        mid = (lo + hi) // 2
        if mid**k <= n:
            lo = mid
        else:
            hi = mid
    return lo if lo**k == n else None


def rational_power(n: int, e: Fraction) -> Fraction:
    """``n ** e`` as an exact rational; raises when the value is irrational."""
    e = Fraction(e)
    base = Fraction(n) ** e.numerator
    if e.denominator == 1:
        return base
    num = _iroot(base.numerator, e.denominator)
    den = _iroot(base.denominator, e.denominator)
    if num is None or den is None:
        raise IrrationalPower(f"{n}^{e} is not rational")
    return Fraction(num, den)


@dataclass(frozen=True)
class ScalingSpec:
    beta: tuple[Fraction, ...]
    N: int

    def __post_init__(self):
        beta = tuple(Fraction(b) for b in self.beta)
        object.__setattr__(self, "beta", beta)
        if not beta or any(b <= 0 for b in beta):
            raise ValueError("beta must be strictly positive")
        if int(self.N) != self.N or self.N < 1:
            raise ValueError("N must be a positive integer")


def _beta_vector(beta, u: Sequence[int], names: Sequence[str] | None = None) -> tuple[Fraction, ...]:
    if isinstance(beta, Mapping):
        if names is None:
            raise ValueError("named beta needs species names")
        return tuple(Fraction(beta[names[i]]) for i in u)
    if isinstance(beta, (int, Fraction, str)):
        return (Fraction(beta),) * len(u)
    beta = tuple(Fraction(b) for b in beta)
    if len(beta) == 1:
        return beta * len(u)
    if len(beta) != len(u):
        raise ValueError(f"beta has {len(beta)} entries for {len(u)} eliminated species")
    return beta


def exponent(beta: Sequence[Fraction], u: Sequence[int], x: Sequence[int]) -> Fraction:
    """``<β, ρ(x)>``."""
    return sum((b * x[i] for b, i in zip(beta, u)), Fraction(0))


def scale_kinetics(net: Network, u: Sequence[str | int], spec: ScalingSpec) -> Network:
    """Multiply each intensity by ``N^<β, ρ(reactant)>``; the set need not be non-interacting."""
    idx = resolve_species(net, u)
    beta = _beta_vector(spec.beta, idx)
    reactions = []
    for r in net.reactions:
        factor = rational_power(spec.N, exponent(beta, idx, r.reactant))
        reactions.append(Reaction(r.reactant, r.product, r.kinetics.scaled(factor)))
    return Network(net.species, tuple(reactions))


def scaled_distribution(pi: Distribution, u: Sequence[int], spec: ScalingSpec) -> Distribution:
    """``g_N(x) = N^-<β, ρ(x)> π(x)`` normalized; ``normalizer`` is ``M_N = Σ g_N``."""
    beta = _beta_vector(spec.beta, u)
    g = {x: p / rational_power(spec.N, exponent(beta, u, x)) for x, p in pi.probabilities.items()}
    m = sum(g.values(), Fraction(0))
    return Distribution({x: v / m for x, v in g.items()}, normalizer=m, support=pi.support)


def limit_support(gamma: Iterable[State], u: Sequence[int], beta) -> tuple[Fraction, frozenset[State]]:
    """Minimum of ``<β, ρ(x)>`` over ``gamma`` and the states attaining it."""
    states = [tuple(x) for x in gamma]
    beta = _beta_vector(beta, u)
    values = {x: exponent(beta, u, x) for x in states}
    gamma0 = min(values.values())
    return gamma0, frozenset(x for x, v in values.items() if v == gamma0)


def limit_gap(gamma: Iterable[State], u: Sequence[int], beta) -> Fraction | None:
    """Smallest positive ``<β, ρ(x)> - γ0``; the rate exponent of the convergence."""
    states = [tuple(x) for x in gamma]
    beta = _beta_vector(beta, u)
    values = [exponent(beta, u, x) for x in states]
    low = min(values)
    gaps = [v - low for v in values if v > low]
    return min(gaps) if gaps else None


def limit_distribution(pi: Distribution, gamma: Iterable[State], u: Sequence[int], beta) -> Distribution:
    """``π(x) / π(Γ0)`` on the minimizing slice ``Γ0``."""
    _, slice0 = limit_support(gamma, u, beta)
    return conditional_distribution(pi, sorted(slice0, reverse=True))


@dataclass(frozen=True)
class ConvergenceRow:
    N: int
    tv: Fraction
    normalizer: Fraction


@dataclass(frozen=True)
class ConvergenceTable:
    beta: tuple[Fraction, ...]
    gamma0: Fraction
    gap: Fraction | None
    rows: tuple[ConvergenceRow, ...]
    limit: Distribution

    def ratios(self) -> list[float]:
        return [float(a.tv / b.tv) if b.tv else float("inf") for a, b in zip(self.rows, self.rows[1:])]


def convergence_table(
    pi: Distribution, gamma: Iterable[State], u: Sequence[int], beta, Ns: Sequence[int]
) -> ConvergenceTable:
    """Exact total variation between each ``π_N`` and the limit."""
    Ns = list(Ns)
    if not Ns or any(b <= a for a, b in zip(Ns, Ns[1:])):
        raise ValueError("Ns must be a nonempty strictly increasing list")
    states = [tuple(x) for x in gamma]
    bvec = _beta_vector(beta, u)
    gamma0, _ = limit_support(states, u, bvec)
    limit = limit_distribution(pi, states, u, bvec)
    rows = []
    for n in Ns:
        pn = scaled_distribution(pi, u, ScalingSpec(bvec, n))
        rows.append(ConvergenceRow(n, total_variation(pn, limit), pn.normalizer))
    return ConvergenceTable(bvec, gamma0, limit_gap(states, u, bvec), tuple(rows), limit)
