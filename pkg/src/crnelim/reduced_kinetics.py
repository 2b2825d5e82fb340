"""Reduced intensities by absorbing-chain linear algebra.

A walk through the eliminated species is a discrete-time chain on
``(node, state, accumulated pair)``.  Starting from a core state ``x`` with
weight ``λ_r0(x)`` for each reaction leaving the core node, every step picks
an outgoing reaction with probability ``λ_r(z) / Σ λ(z)``.  The reduced
intensity of a pair ``p`` is the total weight absorbed at the core node with
accumulated pair ``p``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from . import config, exact
from .algebra import ReactionPair, oplus
from .elimination import EliminationGraph, ReducedNetwork
from .model import Network, Reaction, State, add, geq, sub

DEFAULT_CHAIN_CAP = 200_000
FLOAT_RESIDUAL = 1e-12


class ChainNotFinite(RuntimeError):
    def __init__(self, explored: int):
        super().__init__(f"walk chain exceeded {explored} transient states")
        self.explored = explored


def branch_probabilities(net: Network, g: EliminationGraph, x: State, i: int) -> dict[int, Fraction]:
    """``β_r(x)`` for every reaction ``r`` leaving node ``i``; all zero when nothing can fire."""
    out = [r for _, r in g.out_edges(i)]
    lam = {r: net.intensity(r, tuple(x)) for r in out}
    total = sum(lam.values(), Fraction(0))
    if total == 0:
        return {r: Fraction(0) for r in out}
    return {r: v / total for r, v in lam.items()}


def reverse_branch_probabilities(
    net: Network, g: EliminationGraph, pi: Callable[[State], Fraction], z: State, i: int
) -> dict[int, Fraction]:
    """Probabilities of stepping back along each reaction entering node ``i`` at ``z``.

    Weights are the probability fluxes ``π(z - ζ_r) λ_r(z - ζ_r)``.
    """
    flux = {}
    for a, b, r in g.edges:
        if b != i:
            continue
        prev = sub(z, net.reactions[r].vector)
        flux[r] = pi(prev) * net.intensity(r, prev) if min(prev) >= 0 else Fraction(0)
    total = sum(flux.values(), Fraction(0))
    if total == 0:
        return {r: Fraction(0) for r in flux}
    return {r: v / total for r, v in flux.items()}


@dataclass
class AbsorbingChain:
    """Transient states, their sparse transitions and absorption weights.

    ``transitions[s]`` maps transient indices to probabilities and
    ``absorb[s]`` maps completed pairs to probabilities.  ``initial`` gives
    the seed weight of each transient state and ``direct`` the weight that is
    absorbed without entering any transient state.
    """

    states: list[tuple[int, State, ReactionPair]]
    transitions: list[dict[int, Fraction]]
    absorb: list[dict[ReactionPair, Fraction]]
    initial: dict[int, Fraction]
    direct: dict[ReactionPair, Fraction]

    def __len__(self):
        return len(self.states)

    def solve(self, numeric: str | None = None) -> dict[ReactionPair, Fraction | float]:
        """Total absorbed weight per completed pair."""
        n = len(self.states)
        result: dict[ReactionPair, Fraction | float] = dict(self.direct)
        if n == 0:
            return result
        if config.use_exact(n, numeric):
            # visits h solve (I - Q^T) h = w0
            rows = [{s: Fraction(1)} for s in range(n)]
            for s, row in enumerate(self.transitions):
                for t, p in row.items():
                    rows[t][s] = rows[t].get(s, Fraction(0)) - p
            rhs = [self.initial.get(s, Fraction(0)) for s in range(n)]
            h = exact.solve(rows, rhs, n)
        else:
            h = self._solve_float()
        for s, buckets in enumerate(self.absorb):
            for pair, p in buckets.items():
                result[pair] = result.get(pair, 0) + h[s] * (p if isinstance(h[s], Fraction) else float(p))
        return result

    def _solve_float(self) -> list[float]:
        from scipy.sparse import csr_matrix, identity
        from scipy.sparse.linalg import spsolve

        n = len(self.states)
        rs, cs, vs = [], [], []
        for s, row in enumerate(self.transitions):
            for t, p in row.items():
                rs.append(t)
                cs.append(s)
                vs.append(float(p))
        a = identity(n, format="csr") - csr_matrix((vs, (rs, cs)), shape=(n, n))
        b = np.zeros(n)
        for s, w in self.initial.items():
            b[s] = float(w)
        h = spsolve(a.tocsc(), b)
        scale = max(1.0, float(np.abs(b).max()))
        if np.abs(a @ h - b).max() > FLOAT_RESIDUAL * scale:
            raise exact.SingularSystemError("float solve of the walk chain failed its residual check")
        return list(h)


def _forward_steps(net, g, pairs):
    def steps(node, z, acc):
        beta = branch_probabilities(net, g, z, node)
        for j, r in g.out_edges(node):
            if beta[r]:
                yield j, add(z, net.reactions[r].vector), oplus(acc, pairs[r]), beta[r]

    def seeds(x):
        for j, r in g.out_edges(0):
            w = net.intensity(r, x)
            if w:
                yield j, add(x, net.reactions[r].vector), pairs[r], w

    return seeds, steps


def _reverse_steps(net, g, pairs, pi):
    def steps(node, z, acc):
        beta = reverse_branch_probabilities(net, g, pi, z, node)
        for a, b, r in g.edges:
            if b == node and beta.get(r):
                yield a, sub(z, net.reactions[r].vector), oplus(pairs[r], acc), beta[r]

    def seeds(x):
        for a, b, r in g.edges:
            if b != 0:
                continue
            prev = sub(x, net.reactions[r].vector)
            if min(prev) < 0:
                continue
            w = pi(prev) * net.intensity(r, prev)
            if w:
                yield a, prev, pairs[r], w

    return seeds, steps


def build_chain(
    net: Network,
    g: EliminationGraph,
    x: State,
    direction: str = "forward",
    pi: Callable[[State], Fraction] | None = None,
    cap: int = DEFAULT_CHAIN_CAP,
) -> AbsorbingChain:
    """Absorbing chain of walks from (forward) or into (reverse) the core state ``x``.

    The reverse chain walks reactions backwards with probabilities
    proportional to the probability flux under ``pi``; its seeds are the
    fluxes of reactions entering the core node at ``x``.
    """
    pairs = [ReactionPair(*r.pair) for r in net.reactions]
    if direction == "forward":
        seeds, steps = _forward_steps(net, g, pairs)
    elif direction == "reverse":
        if pi is None:
            raise ValueError("the reverse chain needs a distribution")
        seeds, steps = _reverse_steps(net, g, pairs, pi)
    else:
        raise ValueError(f"unknown direction {direction!r}")

    x = tuple(x)
    index: dict[tuple, int] = {}
    states: list = []
    transitions: list[dict[int, Fraction]] = []
    absorb: list[dict[ReactionPair, Fraction]] = []
    initial: dict[int, Fraction] = {}
    direct: dict[ReactionPair, Fraction] = {}
    queue: deque[int] = deque()

    def intern(key) -> int:
        s = index.get(key)
        if s is None:
            s = index[key] = len(states)
            if s >= cap:
                raise ChainNotFinite(cap)
            states.append(key)
            transitions.append({})
            absorb.append({})
            queue.append(s)
        return s

    for node, z, acc, w in seeds(x):
        if node == 0:
            direct[acc] = direct.get(acc, Fraction(0)) + w
        else:
            s = intern((node, z, acc))
            initial[s] = initial.get(s, Fraction(0)) + w
    while queue:
        s = queue.popleft()
        for node, z, acc, p in steps(*states[s]):
            if node == 0:
                absorb[s][acc] = absorb[s].get(acc, Fraction(0)) + p
            else:
                t = intern((node, z, acc))
                transitions[s][t] = transitions[s].get(t, Fraction(0)) + p
    return AbsorbingChain(states, transitions, absorb, initial, direct)


def _core_state(rn: ReducedNetwork, x: Sequence[int]) -> State:
    x = tuple(x)
    if len(x) == len(rn.core):
        return rn.embed(x)
    if len(x) == rn.net.n and not any(rn.graph.rho(x)):
        return x
    raise ValueError(f"expected a core state of length {len(rn.core)}, got {x}")


def _full_pair(rn: ReducedNetwork, r) -> ReactionPair:
    need, result = r
    if len(need) == len(rn.core):
        return ReactionPair(rn.embed(need), rn.embed(result))
    return ReactionPair(tuple(need), tuple(result))


def reduced_intensities(
    rn: ReducedNetwork, x: Sequence[int], numeric: str | None = None
) -> dict[ReactionPair, Fraction | float]:
    """Reduced intensity of every walk sum (full coordinates) at core state ``x``."""
    chain = build_chain(rn.net, rn.graph, _core_state(rn, x))
    return chain.solve(numeric)


def reduced_intensity(rn: ReducedNetwork, r, x: Sequence[int], numeric: str | None = None):
    """Reduced intensity of pair ``r`` (core or full coordinates) at core state ``x``."""
    return reduced_intensities(rn, x, numeric).get(_full_pair(rn, r), Fraction(0))


@dataclass(frozen=True)
class TruncatedSum:
    """Weight absorbed by walks of bounded length, plus the weight still in flight.

    ``tail`` bounds what longer walks could add to any pair.
    """

    value: Fraction
    tail: Fraction


def truncated_walk_sum(rn: ReducedNetwork, r, x: Sequence[int], depth: int) -> TruncatedSum:
    """Sum of walk weights over walks of length at most ``depth`` with sum ``r``.

    Propagates weight step by step instead of solving the chain.
    """
    if depth < 1:
        raise ValueError("depth must be at least 1")
    net, g = rn.net, rn.graph
    target = _full_pair(rn, r)
    x = _core_state(rn, x)
    pairs = [ReactionPair(*q.pair) for q in net.reactions]
    value = Fraction(0)
    front: dict[tuple, Fraction] = {}
    for j, q in g.out_edges(0):
        w = net.intensity(q, x)
        if not w:
            continue
        if j == 0:
            if pairs[q] == target:
                value += w
        else:
            key = (j, add(x, net.reactions[q].vector), pairs[q])
            front[key] = front.get(key, Fraction(0)) + w
    for _ in range(depth - 1):
        nxt: dict[tuple, Fraction] = {}
        for (node, z, acc), w in front.items():
            beta = branch_probabilities(net, g, z, node)
            for j, q in g.out_edges(node):
                if not beta[q]:
                    continue
                acc2 = oplus(acc, pairs[q])
                if j == 0:
                    if acc2 == target:
                        value += w * beta[q]
                else:
                    key = (j, add(z, net.reactions[q].vector), acc2)
                    nxt[key] = nxt.get(key, Fraction(0)) + w * beta[q]
        front = nxt
    return TruncatedSum(value, sum(front.values(), Fraction(0)))


class ReducedKinetics:
    """Kinetics object for one reduced reaction; evaluates through a shared cache."""

    def __init__(self, table: Callable[[State], dict], pair: ReactionPair):
        self._table = table
        self.pair = pair

    def intensity(self, reactant, z) -> Fraction:
        return self._table(tuple(z)).get(self.pair, Fraction(0))

    def __repr__(self):
        return f"ReducedKinetics({self.pair})"


def reduced_srn(rn: ReducedNetwork, numeric: str | None = None, cache_size: int = 100_000) -> Network:
    """The reduced network on the core species as an ordinary :class:`Network`.

    Intensities come from the absorbing chain and are cached per state.
    """

    @lru_cache(maxsize=cache_size)
    def table(z: State) -> dict:
        return reduced_intensities(rn, z, numeric)

    reactions = tuple(
        Reaction(rn.project(p.need), rn.project(p.result), ReducedKinetics(table, p)) for p in rn.reactions
    )
    srn = Network(rn.species, reactions)
    object.__setattr__(srn, "_table", table)
    return srn


def domination_gap(rn: ReducedNetwork, x: Sequence[int]) -> Fraction:
    """``Σ λ(x) - Σ λ_U(x)`` over all reactions; never negative."""
    x = _core_state(rn, x)
    full = sum(rn.net.propensities(x), Fraction(0))
    red = sum((v for p, v in reduced_intensities(rn, x, "exact").items() if not p.is_trivial), Fraction(0))
    return full - red


def positive_iff_feasible(rn: ReducedNetwork, z: Sequence[int]) -> bool:
    values = reduced_intensities(rn, z, "exact")
    x = _core_state(rn, z)
    return all((values.get(p, 0) > 0) == geq(x, p.need) for p in rn.reactions)
