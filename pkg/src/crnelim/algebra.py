"""Reaction sums, walk sums and reachability between states."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import reduce
from typing import Iterable, NamedTuple, Sequence

from .model import Complex, Network, State, add, geq, sub


class ReactionPair(NamedTuple):
    """A pair ``(need, result)``: what must be present, what is left after."""

    need: Complex
    result: Complex

    @property
    def vector(self) -> tuple[int, ...]:
        return sub(self.result, self.need)

    @property
    def is_trivial(self) -> bool:
        return self.need == self.result


class EmptySequence(ValueError):
    pass


class CapExceeded(RuntimeError):
    """A bounded search ran out of budget before reaching a decision."""

    def __init__(self, message: str, explored: int = 0):
        super().__init__(message)
        self.explored = explored


def oplus(p: Sequence[Complex], q: Sequence[Complex]) -> ReactionPair:
    """Sum of two reactions fired in succession.

    ``(y1, y1') + (y2, y2') = (y1 + max(0, y2 - y1'), y2' + max(0, y1' - y2))``.
    """
    (y1, y1p), (y2, y2p) = p, q
    need = tuple(a + max(0, c - b) for a, b, c in zip(y1, y1p, y2))
    result = tuple(d + max(0, b - c) for b, c, d in zip(y1p, y2, y2p))
    return ReactionPair(need, result)


def oplus_fold(pairs: Iterable[Sequence[Complex]]) -> ReactionPair:
    pairs = list(pairs)
    if not pairs:
        raise EmptySequence("cannot sum an empty sequence of reactions")
    first = ReactionPair(*pairs[0])
    return reduce(oplus, pairs[1:], first)


@dataclass(frozen=True)
class Walk:
    """Walk in the elimination multigraph.

    ``nodes`` has one more entry than ``edges``; node 0 is the core node and
    node ``i >= 1`` is the ``i``-th eliminated species.  Edges are reaction
    indices of the underlying network.
    """

    nodes: tuple[int, ...]
    edges: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(self.nodes))
        object.__setattr__(self, "edges", tuple(self.edges))
        if len(self.nodes) != len(self.edges) + 1:
            raise InconsistentWalk("a walk has exactly one more node than edges")

    @property
    def closed(self) -> bool:
        return self.nodes[0] == self.nodes[-1]

    def __len__(self):
        return len(self.edges)


class InconsistentWalk(ValueError):
    pass


def walk_sum(graph, walk: Walk) -> ReactionPair:
    """Reaction sum along ``walk`` in an :class:`~crnelim.elimination.EliminationGraph`."""
    if not walk.edges:
        raise InconsistentWalk("empty walk")
    for k, r in enumerate(walk.edges):
        if graph.edge_nodes(r) != (walk.nodes[k], walk.nodes[k + 1]):
            raise InconsistentWalk(
                f"reaction {r} does not connect node {walk.nodes[k]} to node {walk.nodes[k + 1]}"
            )
    net = graph.net
    return oplus_fold(net.reactions[r].pair for r in walk.edges)


def successors(net: Network, x: State) -> Iterable[State]:
    for r in net.reactions:
        if geq(x, r.reactant):
            yield add(x, r.vector)


def leads_to(net: Network, x: State, z: State, cap: int = 100_000) -> bool:
    """Whether ``z`` can be reached from ``x`` by feasible single firings.

    Breadth-first over states; raises :class:`CapExceeded` once ``cap``
    states have been expanded without finding ``z`` or exhausting the
    reachable set.  Reactions are taken as firable exactly when the reactant
    is present, the compatibility contract of every accepted network.
    """
    if cap < 1:
        raise ValueError("cap must be positive")
    x, z = tuple(x), tuple(z)
    if x == z:
        return True
    seen = {x}
    queue = deque([x])
    expanded = 0
    while queue:
        if expanded >= cap:
            raise CapExceeded(f"reachability undecided after expanding {cap} states", expanded)
        s = queue.popleft()
        expanded += 1
        for t in successors(net, s):
            if t == z:
                return True
            if t not in seen:
                seen.add(t)
                queue.append(t)
    return False
