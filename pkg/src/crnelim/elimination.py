"""Non-interacting species: classification, conditions and the reduced network."""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import networkx as nx

from . import exact
from .algebra import CapExceeded, ReactionPair, Walk, oplus
from .model import Complex, Network, add, format_complex

DEFAULT_CAP = 10**6


class NotNonInteracting(ValueError):
    def __init__(self, complex_: Complex, text: str):
        super().__init__(f"complex {text} holds more than one molecule of the eliminated species")
        self.complex = complex_


class NotEliminable(ValueError):
    def __init__(self, missing: Sequence[str]):
        super().__init__("produced but never degraded: " + ", ".join(missing))
        self.missing = tuple(missing)


class Condition1Violated(ValueError):
    def __init__(self, witness: Walk, vector: tuple[int, ...]):
        super().__init__(f"closed walk avoiding the core node has net change {vector}")
        self.witness = witness
        self.vector = vector


def resolve_species(net: Network, u: Sequence[str | int]) -> tuple[int, ...]:
    out = []
    for s in u:
        i = s if isinstance(s, int) else net.index(s)
        if not 0 <= i < net.n:
            raise IndexError(i)
        if i not in out:
            out.append(i)
    return tuple(out)


@dataclass(frozen=True)
class EliminationGraph:
    """Complex partition and multigraph on ``{U0} | U`` induced by a species set.

    Node 0 stands for the complexes free of eliminated species, node ``i``
    for complexes holding exactly one ``u[i-1]``.  Each reaction is one edge.
    """

    net: Network
    u: tuple[int, ...]
    node_of: dict[Complex, int]
    edges: tuple[tuple[int, int, int], ...]

    @property
    def m(self) -> int:
        return len(self.u)

    @property
    def u_names(self) -> tuple[str, ...]:
        return tuple(self.net.species[i] for i in self.u)

    @property
    def core(self) -> tuple[int, ...]:
        return tuple(i for i in range(self.net.n) if i not in self.u)

    def node_name(self, i: int) -> str:
        return "U0" if i == 0 else self.net.species[self.u[i - 1]]

    def rho(self, x: Sequence[int]) -> tuple[int, ...]:
        return tuple(x[i] for i in self.u)

    def partition(self) -> list[list[Complex]]:
        parts: list[list[Complex]] = [[] for _ in range(self.m + 1)]
        for y, i in self.node_of.items():
            parts[i].append(y)
        return parts

    def edge_nodes(self, r: int) -> tuple[int, int]:
        i, j, _ = self.edges[r]
        return i, j

    def out_edges(self, i: int) -> list[tuple[int, int]]:
        return [(j, r) for (a, j, r) in self.edges if a == i]

    def edges_between(self, i: int, j: int) -> list[int]:
        return [r for (a, b, r) in self.edges if a == i and b == j]

    def node_of_state(self, x: Sequence[int]) -> int:
        rho = self.rho(x)
        total = sum(rho)
        if total == 0:
            return 0
        if total == 1:
            return rho.index(1) + 1
        raise ValueError(f"state {tuple(x)} holds more than one eliminated molecule")

    @property
    def is_intermediate(self) -> bool:
        """Every complex touching an eliminated species is that species alone."""
        for y, i in self.node_of.items():
            if i and any(y[k] for k in range(self.net.n) if k != self.u[i - 1]):
                return False
        return True


def classify(net: Network, u: Sequence[str | int]) -> EliminationGraph:
    idx = resolve_species(net, u)
    if not idx or len(idx) >= net.n:
        raise ValueError("the eliminated species must form a nonempty proper subset")
    node_of: dict[Complex, int] = {}
    for y in net.complexes:
        rho = [y[i] for i in idx]
        total = sum(rho)
        if total == 0:
            node_of[y] = 0
        elif total == 1:
            node_of[y] = rho.index(1) + 1
        else:
            raise NotNonInteracting(y, net.format_complex(y))
    edges = tuple(
        (node_of[r.reactant], node_of[r.product], k) for k, r in enumerate(net.reactions)
    )
    return EliminationGraph(net, idx, node_of, edges)


def _digraph(g: EliminationGraph, include_core: bool = True) -> nx.DiGraph:
    d = nx.DiGraph()
    d.add_nodes_from(range(0 if include_core else 1, g.m + 1))
    for i, j, _ in g.edges:
        if include_core or (i and j):
            d.add_edge(i, j)
    return d


def produced_degraded(g: EliminationGraph) -> tuple[frozenset[str], frozenset[str], bool]:
    d = _digraph(g)
    pro = {i for i in nx.descendants(d, 0) if i}
    deg = {i for i in nx.ancestors(d, 0) if i}
    names = lambda s: frozenset(g.node_name(i) for i in s)  # noqa: E731
    return names(pro), names(deg), pro <= deg


def check_weak_reversibility(net: Network) -> bool:
    d = nx.DiGraph()
    d.add_edges_from((r.reactant, r.product) for r in net.reactions)
    comp = {}
    for k, scc in enumerate(nx.strongly_connected_components(d)):
        for y in scc:
            comp[y] = k
    return all(comp[r.reactant] == comp[r.product] for r in net.reactions)


def is_reversible(net: Network) -> bool:
    pairs = {r.pair for r in net.reactions}
    return all((p, y) in pairs for y, p in pairs)


def simple_cycles(g: EliminationGraph) -> list[Walk]:
    """All simple cycles of the multigraph restricted to eliminated nodes.

    Parallel edges yield distinct cycles; self-loops are cycles of length 1.
    """
    d = _digraph(g, include_core=False)
    out = []
    for cyc in sorted(nx.simple_cycles(d), key=lambda c: (len(c), c)):
        nodes = tuple(cyc) + (cyc[0],)
        choices = [g.edges_between(nodes[k], nodes[k + 1]) for k in range(len(cyc))]
        for edges in itertools.product(*choices):
            out.append(Walk(nodes, edges))
    return out


def walk_vector(g: EliminationGraph, w: Walk) -> tuple[int, ...]:
    v = (0,) * g.net.n
    for r in w.edges:
        v = add(v, g.net.reactions[r].vector)
    return v


@dataclass(frozen=True)
class Condition1Result:
    holds: bool
    witness: Walk | None = None
    vector: tuple[int, ...] | None = None


def check_condition1(g: EliminationGraph) -> Condition1Result:
    """Every closed walk avoiding the core node sums to some ``(y, y)``.

    The net change is additive over reaction sums and closed walks split
    into simple cycles, so it suffices that every simple cycle has zero net
    change.
    """
    for w in simple_cycles(g):
        v = walk_vector(g, w)
        if any(v):
            return Condition1Result(False, w, v)
    return Condition1Result(True)


@dataclass(frozen=True)
class Certificate:
    """Nonnegative integer combination of simple cycles and its net change."""

    coefficients: tuple[int, ...]
    cycles: tuple[Walk, ...]
    vector: tuple[int, ...]


@dataclass(frozen=True)
class Condition2Result:
    holds_i: bool
    holds_ii: bool
    witness_i: Certificate | None = None
    witness_ii: Certificate | None = None

    @property
    def holds(self) -> bool:
        return self.holds_i and self.holds_ii


def _cycle_vectors(g: EliminationGraph) -> list[tuple[tuple[int, ...], Walk]]:
    seen: dict[tuple[int, ...], Walk] = {}
    for w in simple_cycles(g):
        v = walk_vector(g, w)
        if any(v) and v not in seen:
            seen[v] = w
    return list(seen.items())


def positive_combination(vectors: Sequence[Sequence[int]]) -> list[Fraction] | None:
    """Coefficients ``k >= 0`` with ``sum k_i v_i`` nonnegative and nonzero.

    Solved as exact LP feasibility; the system is homogeneous, so the
    slack vector is normalized to sum to one.
    """
    if not vectors:
        return None
    n = len(vectors[0])
    q = len(vectors)
    a_eq = []
    for d in range(n):
        row = [Fraction(v[d]) for v in vectors] + [Fraction(-int(e == d)) for e in range(n)]
        a_eq.append(row)
    a_eq.append([Fraction(0)] * q + [Fraction(1)] * n)
    b_eq = [Fraction(0)] * n + [Fraction(1)]
    sol = exact.feasible_point(a_eq, b_eq)
    return None if sol is None else sol[:q]


def _certificate(pairs, sign: int) -> Certificate | None:
    vecs = [tuple(sign * c for c in v) for v, _ in pairs]
    k = positive_combination(vecs)
    if k is None:
        return None
    ints = exact.integer_scaling(k)
    used = [(c, pairs[i]) for i, c in enumerate(ints) if c]
    n = len(pairs[0][0])
    vector = tuple(sum(c * p[0][d] for c, p in used) for d in range(n))
    return Certificate(tuple(c for c, _ in used), tuple(p[1] for _, p in used), vector)


def check_condition2(g: EliminationGraph) -> Condition2Result:
    """No cycle combination strictly gains (part i) or strictly loses (part ii)."""
    pairs = _cycle_vectors(g)
    if not pairs:
        return Condition2Result(True, True)
    wi = _certificate(pairs, +1)
    wii = _certificate(pairs, -1)
    return Condition2Result(wi is None, wii is None, wi, wii)


@dataclass(frozen=True)
class ConditionReport:
    u: tuple[str, ...]
    u_pro: frozenset[str]
    u_deg: frozenset[str]
    eliminable: bool
    weakly_reversible: bool
    condition1: Condition1Result
    condition2: Condition2Result
    intermediate: bool


def condition_report(net: Network, u: Sequence[str | int]) -> ConditionReport:
    g = classify(net, u)
    pro, deg, elim = produced_degraded(g)
    return ConditionReport(
        u=g.u_names,
        u_pro=pro,
        u_deg=deg,
        eliminable=elim,
        weakly_reversible=check_weak_reversibility(net),
        condition1=check_condition1(g),
        condition2=check_condition2(g),
        intermediate=g.is_intermediate,
    )


@dataclass(frozen=True)
class ReducedNetwork:
    """Reduced reactions on the core species and the walks that produce them.

    Pairs are kept in full species coordinates (eliminated entries are zero);
    :meth:`project` drops the eliminated coordinates.
    """

    graph: EliminationGraph
    walk_sums: tuple[ReactionPair, ...]
    provenance: dict[ReactionPair, tuple[Walk, ...]] = field(repr=False)

    @property
    def net(self) -> Network:
        return self.graph.net

    @property
    def reactions(self) -> tuple[ReactionPair, ...]:
        return tuple(p for p in self.walk_sums if not p.is_trivial)

    @property
    def core(self) -> tuple[int, ...]:
        return self.graph.core

    @property
    def species(self) -> tuple[str, ...]:
        return tuple(self.net.species[i] for i in self.core)

    @property
    def core_species(self) -> tuple[str, ...]:
        """Species in the support of some reduced complex."""
        used = set()
        for p in self.reactions:
            used.update(i for i in self.core if p.need[i] or p.result[i])
        return tuple(self.net.species[i] for i in self.core if i in used)

    def project(self, x: Sequence[int]) -> tuple[int, ...]:
        return tuple(x[i] for i in self.core)

    def embed(self, z: Sequence[int]) -> tuple[int, ...]:
        x = [0] * self.net.n
        for k, i in enumerate(self.core):
            x[i] = z[k]
        return tuple(x)

    @property
    def core_reactions(self) -> tuple[ReactionPair, ...]:
        return tuple(ReactionPair(self.project(p.need), self.project(p.result)) for p in self.reactions)

    def format_pair(self, p: ReactionPair) -> str:
        names = self.net.species
        return f"{format_complex(p.need, names)} -> {format_complex(p.result, names)}"


def _rebuild(parents, key, last_edge: int) -> Walk:
    edges = [last_edge]
    nodes = [0]
    while key is not None:
        node, _ = key
        nodes.append(node)
        key, r = parents[key]
        edges.append(r)
    nodes.append(0)
    return Walk(tuple(reversed(nodes)), tuple(reversed(edges)))


def reduce(net: Network, u: Sequence[str | int], cap: int = DEFAULT_CAP) -> ReducedNetwork:
    """Eliminate ``u`` from ``net``.

    Breadth-first search over (node, accumulated reaction sum) starting from
    every edge out of the core node; the sum is recorded whenever a walk
    returns to the core node.  Revisited (node, sum) states are pruned.
    """
    g = classify(net, u)
    _, _, eliminable = produced_degraded(g)
    if not eliminable:
        pro, deg, _ = produced_degraded(g)
        raise NotEliminable(sorted(pro - deg))
    c1 = check_condition1(g)
    if not c1.holds:
        raise Condition1Violated(c1.witness, c1.vector)

    out = {i: g.out_edges(i) for i in range(g.m + 1)}
    pairs = [ReactionPair(*r.pair) for r in net.reactions]
    parents: dict[tuple[int, ReactionPair], tuple] = {}
    terminals: dict[ReactionPair, list] = {}
    queue: deque = deque()

    def visit(key_from, node: int, acc: ReactionPair, r: int):
        if node == 0:
            cls = terminals.setdefault(acc, [])
            if (key_from, r) not in cls:
                cls.append((key_from, r))
            return
        key = (node, acc)
        if key not in parents:
            parents[key] = (key_from, r)
            queue.append(key)
            if len(parents) > cap:
                raise CapExceeded(f"more than {cap} walk states", len(parents))

    for j, r in out[0]:
        visit(None, j, pairs[r], r)
    while queue:
        key = queue.popleft()
        node, acc = key
        for j, r in out[node]:
            visit(key, j, oplus(acc, pairs[r]), r)

    provenance = {
        acc: tuple(_rebuild(parents, k, r) if k is not None else Walk((0, 0), (r,)) for k, r in cls)
        for acc, cls in terminals.items()
    }
    return ReducedNetwork(g, tuple(terminals), provenance)
