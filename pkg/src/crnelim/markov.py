"""Irreducible components, stationary distributions and balance checks."""

from __future__ import annotations

import logging
import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Mapping, Sequence, Union

import networkx as nx
import numpy as np

from . import config, exact
from .model import MassAction, Network, State, add, geq, sub

log = logging.getLogger(__name__)

Number = Union[Fraction, float]
Bound = Union[Sequence[int], Callable[[State], bool]]


class BoundExceeded(RuntimeError):
    """The forward closure left the bound; ``partial`` holds what lies inside."""

    def __init__(self, partial: "ComponentSet", state: State):
        super().__init__(f"component leaves the bound at {state}")
        self.partial = partial
        self.state = state


class NotClosed(ValueError):
    pass


class SingularBeyondNullity(ArithmeticError):
    """The generator kernel is not one-dimensional: the set is not irreducible."""


class NotReversible(ValueError):
    pass


class EmptySlice(ValueError):
    pass


class OverflowGuard(OverflowError):
    pass


@dataclass(frozen=True)
class ComponentSet:
    states: frozenset[State]
    closed: bool
    generator_nnz: int = 0

    def __len__(self):
        return len(self.states)

    def __iter__(self) -> Iterator[State]:
        return iter(sorted(self.states, reverse=True))

    def __contains__(self, x) -> bool:
        return tuple(x) in self.states


@dataclass(frozen=True)
class Distribution(Mapping):
    """Probabilities on a finite support.

    Calling a distribution returns zero off the support.  ``normalizer`` is
    the constant ``M`` of a closed form ``M * weight(x)`` when one was used.
    """

    probabilities: dict[State, Number]
    normalizer: Number | None = None
    support: frozenset[State] = field(default=frozenset())

    def __post_init__(self):
        if not self.support:
            object.__setattr__(self, "support", frozenset(self.probabilities))

    def __getitem__(self, x):
        return self.probabilities[tuple(x)]

    def __iter__(self):
        return iter(sorted(self.probabilities, reverse=True))

    def __len__(self):
        return len(self.probabilities)

    def __call__(self, x) -> Number:
        return self.probabilities.get(tuple(x), 0)

    @property
    def exact(self) -> bool:
        return all(isinstance(v, (Fraction, int)) for v in self.probabilities.values())

    def mass(self, states: Iterable[State]) -> Number:
        return sum((self(s) for s in states), Fraction(0) if self.exact else 0.0)


def _in_bound(bound: Bound, x: State) -> bool:
    if callable(bound):
        return bool(bound(x))
    return all(0 <= a <= b for a, b in zip(x, bound))


def _feasible_successors(net: Network, x: State) -> Iterator[State]:
    for j, r in enumerate(net.reactions):
        if geq(x, r.reactant) and net.intensity(j, x) > 0:
            yield add(x, r.vector)


def irreducible_component(
    net: Network, seed: Sequence[int], bound: Bound, weakly_reversible: bool | None = None
) -> ComponentSet:
    """Forward closure of ``seed`` by single firings, restricted to ``bound``.

    ``bound`` is a box of per-species maxima or a predicate on states.  The
    result is closed when every member can also return to ``seed``; for weakly
    reversible networks this holds automatically and the backward pass is
    skipped.
    """
    from .elimination import check_weak_reversibility

    seed = tuple(seed)
    if not _in_bound(bound, seed):
        raise ValueError(f"seed {seed} lies outside the bound")
    seen = {seed}
    edges: dict[State, list[State]] = {}
    queue = deque([seed])
    escaped = None
    while queue:
        x = queue.popleft()
        edges[x] = []
        for y in _feasible_successors(net, x):
            if not _in_bound(bound, y):
                escaped = escaped or y
                continue
            edges[x].append(y)
            if y not in seen:
                seen.add(y)
                queue.append(y)
    nnz = sum(len(v) for v in edges.values()) + len(seen)
    if weakly_reversible is None:
        weakly_reversible = check_weak_reversibility(net)
    if weakly_reversible:
        mutual = True
    else:
        back: dict[State, list[State]] = {}
        for x, ys in edges.items():
            for y in ys:
                back.setdefault(y, []).append(x)
        reach = {seed}
        queue = deque([seed])
        while queue:
            y = queue.popleft()
            for x in back.get(y, ()):
                if x not in reach:
                    reach.add(x)
                    queue.append(x)
        mutual = reach == seen
    comp = ComponentSet(frozenset(seen), mutual and escaped is None, nnz)
    if escaped is not None:
        raise BoundExceeded(comp, escaped)
    return comp


def conservation_bound(weights: Sequence[int], total: int) -> Callable[[State], bool]:
    """Predicate ``<weights, x> == total`` for use as a component bound."""
    w = tuple(weights)
    return lambda x: sum(a * b for a, b in zip(w, x)) == total


def stationary_distribution(net: Network, gamma: ComponentSet, numeric: str | None = None) -> Distribution:
    """Solve the master equation ``π Q = 0``, ``Σ π = 1`` on a closed component."""
    if not gamma.closed:
        raise NotClosed("stationary distributions are only computed on closed components")
    states = sorted(gamma.states, reverse=True)
    index = {x: k for k, x in enumerate(states)}
    n = len(states)
    if n == 1:
        return Distribution({states[0]: Fraction(1)})
    exact_mode = config.use_exact(n, numeric)
    # column t of Q gives equation t of π Q = 0
    cols: list[dict[int, Number]] = [{} for _ in range(n)]
    for s, x in enumerate(states):
        out = Fraction(0)
        for j, r in enumerate(net.reactions):
            lam = net.intensity(j, x)
            if not lam:
                continue
            y = add(x, r.vector)
            t = index.get(y)
            if t is None:
                raise NotClosed(f"reaction {j} leaves the component at {x}")
            cols[t][s] = cols[t].get(s, 0) + lam
            out += lam
        cols[s][s] = cols[s].get(s, 0) - out
    if exact_mode:
        try:
            v = exact.null_vector(cols, n)
        except exact.NullityError as exc:
            raise SingularBeyondNullity(str(exc)) from exc
        total = sum(v)
        probs = {states[k]: v[k] / total for k in range(n)}
    else:
        probs = dict(zip(states, _float_null_vector(cols, n)))
    return Distribution(probs)


def _float_null_vector(cols, n) -> list[float]:
    from scipy.sparse import csr_matrix
    from scipy.sparse.linalg import spsolve

    rs, cs, vs = [], [], []
    for t, row in enumerate(cols[:-1]):
        for s, v in row.items():
            rs.append(t)
            cs.append(s)
            vs.append(float(v))
    rs.extend([n - 1] * n)
    cs.extend(range(n))
    vs.extend([1.0] * n)
    a = csr_matrix((vs, (rs, cs)), shape=(n, n))
    b = np.zeros(n)
    b[-1] = 1.0
    p = spsolve(a.tocsc(), b)
    full = csr_matrix(
        ([float(v) for row in cols for v in row.values()],
         ([t for t, row in enumerate(cols) for _ in row], [s for row in cols for s in row])),
        shape=(n, n),
    )
    if not np.all(np.isfinite(p)) or np.abs(full @ p).max() > 1e-10 or p.min() < -1e-10:
        raise SingularBeyondNullity("float stationary solve failed its residual check")
    return [float(v) for v in p]


# balance checks


def _pi(pi) -> Callable[[State], Number]:
    if callable(pi):
        return pi
    return lambda x: pi.get(tuple(x), 0)


def _safe_intensity(net: Network, j: int, x: State) -> Number:
    return net.intensity(j, x) if min(x) >= 0 else 0


def _abs(v) -> Number:
    return abs(v)


def check_stationary(net: Network, gamma: Iterable[State], pi) -> Number:
    """Largest violation of the master equation over the states of ``gamma``."""
    p = _pi(pi)
    worst: Number = 0
    for x in gamma:
        x = tuple(x)
        out = p(x) * sum(net.propensities(x), Fraction(0)) if p(x) else 0
        inflow = 0
        for j, r in enumerate(net.reactions):
            prev = sub(x, r.vector)
            if min(prev) < 0:
                continue
            w = p(prev)
            if w:
                inflow += w * net.intensity(j, prev)
        worst = max(worst, _abs(out - inflow))
    return worst


def check_complex_balance(net: Network, gamma: Iterable[State], pi) -> dict[tuple, Number]:
    """Per complex, the largest violation of flux balance through that complex."""
    p = _pi(pi)
    complexes = net.complexes
    worst: dict[tuple, Number] = {c: 0 for c in complexes}
    for x in gamma:
        x = tuple(x)
        bal: dict[tuple, Number] = {c: 0 for c in complexes}
        for j, r in enumerate(net.reactions):
            if p(x):
                bal[r.reactant] += p(x) * net.intensity(j, x)
            prev = sub(x, r.vector)
            if min(prev) >= 0 and p(prev):
                bal[r.product] -= p(prev) * net.intensity(j, prev)
        for c, v in bal.items():
            worst[c] = max(worst[c], _abs(v))
    return worst


def check_detailed_balance(net: Network, gamma: Iterable[State], pi) -> dict[tuple, Number]:
    """Per reversible pair ``(y, y')``, the largest violation of flux equality."""
    p = _pi(pi)
    groups: dict[tuple, list[int]] = {}
    for j, r in enumerate(net.reactions):
        groups.setdefault(r.pair, []).append(j)
    for y, yp in groups:
        if (yp, y) not in groups:
            raise NotReversible(f"no reverse for {net.format_complex(y)} -> {net.format_complex(yp)}")
    worst: dict[tuple, Number] = {}
    for (y, yp), js in groups.items():
        if (yp, y) in worst:
            continue
        back = groups[(yp, y)]
        zeta = sub(yp, y)
        w: Number = 0
        for x in gamma:
            x = tuple(x)
            fwd = p(x) * sum(net.intensity(j, x) for j in js) if p(x) else 0
            nxt = add(x, zeta)
            rev = 0
            if min(nxt) >= 0 and p(nxt):
                rev = p(nxt) * sum(net.intensity(j, nxt) for j in back)
            w = max(w, _abs(fwd - rev))
        worst[(y, yp)] = w
    return worst


def max_residual(report) -> Number:
    if isinstance(report, Mapping):
        return max(report.values(), default=0)
    return report


# product form


def poisson_weight(c: Sequence[Fraction], x: State) -> Fraction:
    w = Fraction(1)
    for ci, xi in zip(c, x):
        w *= Fraction(ci) ** xi / math.factorial(xi)
    return w


def poisson_product_form(c: Sequence, gamma: Iterable[State], log_space: bool = False) -> Distribution:
    """``π(x) = M c^x / x!`` normalized over ``gamma``.

    Exact by default; states with very large counts raise :class:`OverflowGuard`
    unless ``log_space`` selects the float path.
    """
    c = [Fraction(v) for v in c]
    if any(v <= 0 for v in c):
        raise ValueError("product form needs c > 0")
    states = sorted(set(map(tuple, gamma)), reverse=True)
    if log_space:
        logs = np.array(
            [sum(xi * math.log(ci) - math.lgamma(xi + 1) for ci, xi in zip(c, x)) for x in states]
        )
        top = logs.max()
        w = np.exp(logs - top)
        total = w.sum()
        return Distribution(
            {x: float(v / total) for x, v in zip(states, w)}, normalizer=float(math.exp(-top) / total)
        )
    if max((sum(x) for x in states), default=0) > 5000:
        raise OverflowGuard("state counts too large for exact factorials; use log_space")
    weights = {x: poisson_weight(c, x) for x in states}
    total = sum(weights.values(), Fraction(0))
    return Distribution({x: w / total for x, w in weights.items()}, normalizer=1 / total)


def verify_deterministic_complex_balance(net: Network, c: Sequence) -> dict[tuple, Fraction]:
    """Per complex, ``Σ_out κ c^η - Σ_in κ c^y`` for mass-action rates."""
    if not net.mass_action:
        raise ValueError("deterministic complex balance needs mass-action kinetics")
    c = [Fraction(v) for v in c]

    def mono(y):
        out = Fraction(1)
        for ci, yi in zip(c, y):
            out *= ci**yi
        return out

    bal = {y: Fraction(0) for y in net.complexes}
    for r in net.reactions:
        flux = r.kinetics.rate * mono(r.reactant)
        bal[r.reactant] += flux
        bal[r.product] -= flux
    return bal


def find_complex_balanced_equilibrium(net: Network, max_denominator: int = 10_000) -> list[Fraction] | None:
    """Search for a positive complex balanced equilibrium and verify it exactly.

    Least squares on the balance equations in log coordinates, then rounding
    to nearby rationals.  Returns ``None`` unless the rounded point passes
    :func:`verify_deterministic_complex_balance` with zero residual.
    """
    from scipy.optimize import least_squares

    if not net.mass_action:
        raise ValueError("deterministic complex balance needs mass-action kinetics")
    complexes = net.complexes
    cidx = {y: k for k, y in enumerate(complexes)}
    ys = np.array(complexes, dtype=float)
    src = np.array([cidx[r.reactant] for r in net.reactions])
    dst = np.array([cidx[r.product] for r in net.reactions])
    k = np.array([float(r.kinetics.rate) for r in net.reactions])

    def resid(logc):
        flux = k * np.exp(ys[src] @ logc)
        bal = np.zeros(len(complexes))
        np.add.at(bal, src, flux)
        np.add.at(bal, dst, -flux)
        return bal / (1.0 + np.abs(flux).max())

    sol = least_squares(resid, np.zeros(net.n), xtol=1e-15, ftol=1e-15, gtol=1e-15)
    point = np.exp(sol.x)
    # equilibria come in families; pinning one coordinate to 1 makes
    # rational representatives more likely to round exactly
    for scale in [1.0] + [float(v) for v in point]:
        guess = [Fraction(float(v / scale)).limit_denominator(max_denominator) for v in point]
        if all(v > 0 for v in guess) and not any(verify_deterministic_complex_balance(net, guess).values()):
            return guess
    log.info("no rational complex balanced equilibrium near %s", point)
    return None


# conditioning and decomposition


def conditional_distribution(pi: Distribution, gamma0) -> Distribution:
    """``π`` restricted to ``gamma0`` (an iterable of states or a predicate) and renormalized."""
    if callable(gamma0):
        keep = [x for x in pi.probabilities if gamma0(x)]
    else:
        keep = [tuple(x) for x in gamma0]
    mass = pi.mass(keep)
    if not mass:
        raise EmptySlice("the conditioning set has zero probability")
    return Distribution({x: pi(x) / mass for x in keep if pi(x)}, support=frozenset(keep))


def project(pi: Distribution, indices: Sequence[int]) -> Distribution:
    """Marginal on the coordinates in ``indices``."""
    out: dict[State, Number] = {}
    for x, v in pi.probabilities.items():
        z = tuple(x[i] for i in indices)
        out[z] = out.get(z, 0) + v
    return Distribution(out)


def decompose_reduced_component(net: Network, gamma0: Iterable[State]) -> list[ComponentSet]:
    """Split ``gamma0`` into mutual-reachability classes under ``net``.

    Only transitions between members of ``gamma0`` are followed; a class is
    closed when no feasible transition leaves it.
    """
    states = [tuple(x) for x in gamma0]
    members = set(states)
    d = nx.DiGraph()
    d.add_nodes_from(states)
    leaves: set[State] = set()
    for x in states:
        for y in _feasible_successors(net, x):
            if y in members:
                d.add_edge(x, y)
            else:
                leaves.add(x)
    out = []
    for scc in nx.strongly_connected_components(d):
        exits = any(x in leaves or any(y not in scc for y in d.successors(x)) for x in scc)
        nnz = sum(1 for x in scc for _ in d.successors(x)) + len(scc)
        out.append(ComponentSet(frozenset(scc), not exits, nnz))
    out.sort(key=lambda c: max(c.states), reverse=True)
    return out


def mixture_weights(pi: Distribution, components: Sequence[ComponentSet]) -> list[Number]:
    """``π(Γ_k) / π(Γ_0)`` for a partition of ``Γ_0`` into components."""
    total = pi.mass(x for comp in components for x in comp.states)
    if not total:
        raise EmptySlice("the components carry no probability")
    return [pi.mass(comp.states) / total for comp in components]


def total_variation(p, q) -> Number:
    keys = set(p.keys()) | set(q.keys())
    return sum((_abs(p.get(k, 0) - q.get(k, 0)) for k in keys), Fraction(0)) / 2
