"""Gillespie direct-method simulation and occupation measures."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .markov import Distribution
from .model import Network, State

DEFAULT_MAX_JUMPS = 10_000_000


class ExplosionGuard(RuntimeError):
    """The jump cap was reached before ``t_end``; ``partial`` is the run so far."""

    def __init__(self, partial: "Trajectory", cap: int):
        super().__init__(f"more than {cap} jumps before t = {partial.t_end}")
        self.partial = partial
        self.cap = cap


@dataclass(frozen=True)
class Trajectory:
    """Jump times (starting at 0) and the state entered at each of them."""

    times: tuple[float, ...]
    states: tuple[State, ...]
    t_end: float
    seed: int

    def __len__(self):
        return len(self.states)

    def state_at(self, t: float) -> State:
        k = int(np.searchsorted(self.times, t, side="right")) - 1
        return self.states[max(k, 0)]


def gillespie(
    net: Network, x0: Sequence[int], t_end: float, seed: int, max_jumps: int = DEFAULT_MAX_JUMPS
) -> Trajectory:
    """Sample the continuous-time chain of ``net`` on ``[0, t_end]``.

    Works for any :class:`Network`, including the reduced network from
    :func:`~crnelim.reduced_kinetics.reduced_srn`, whose intensities are cached.
    """
    if t_end <= 0:
        raise ValueError("t_end must be positive")
    rng = np.random.default_rng(seed)
    vectors = [r.vector for r in net.reactions]
    x = tuple(int(v) for v in x0)
    if len(x) != net.n:
        raise ValueError(f"initial state has length {len(x)}, expected {net.n}")
    times = [0.0]
    states = [x]
    t = 0.0
    jumps = 0
    while True:
        props = net.propensities_float(x)
        total = sum(props)
        if total <= 0:
            break
        t += rng.exponential(1.0 / total)
        if t >= t_end:
            break
        if jumps >= max_jumps:
            raise ExplosionGuard(Trajectory(tuple(times), tuple(states), t, seed), max_jumps)
        pick = rng.random() * total
        acc = 0.0
        j = len(props) - 1
        for k, p in enumerate(props):
            acc += p
            if pick < acc:
                j = k
                break
        while props[j] == 0:  # rounding at the top of the cumulative sum
            j -= 1
        x = tuple(a + b for a, b in zip(x, vectors[j]))
        times.append(t)
        states.append(x)
        jumps += 1
    return Trajectory(tuple(times), tuple(states), float(t_end), seed)


def empirical_distribution(
    traj: Trajectory, burn_in: float = 0.0, indices: Sequence[int] | None = None
) -> Distribution:
    """Fraction of time spent in each state after ``burn_in``.

    ``indices`` projects states onto a subset of coordinates first.
    """
    if burn_in >= traj.t_end:
        raise ValueError("burn_in must be smaller than t_end")
    ends = list(traj.times[1:]) + [traj.t_end]
    occ: dict[State, float] = {}
    for start, stop, x in zip(traj.times, ends, traj.states):
        dt = min(stop, traj.t_end) - max(start, burn_in)
        if dt <= 0:
            continue
        if indices is not None:
            x = tuple(x[i] for i in indices)
        occ[x] = occ.get(x, 0.0) + dt
    span = traj.t_end - burn_in
    return Distribution({x: v / span for x, v in occ.items()})


def mean_holding_times(traj: Trajectory) -> dict[State, tuple[float, float, int]]:
    """Per state: mean sojourn, its standard error and the number of completed visits."""
    visits: dict[State, list[float]] = {}
    for start, stop, x in zip(traj.times, traj.times[1:], traj.states):
        visits.setdefault(x, []).append(stop - start)
    out = {}
    for x, v in visits.items():
        a = np.asarray(v)
        se = float(a.std(ddof=1) / np.sqrt(len(a))) if len(a) > 1 else float("inf")
        out[x] = (float(a.mean()), se, len(a))
    return out


def write_trajectory_csv(traj: Trajectory, path, species: Sequence[str]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["time", *species])
        for t, x in zip(traj.times, traj.states):
            w.writerow([repr(t), *x])


def write_occupation_json(dist: Distribution, path, species: Sequence[str]) -> None:
    from .netparse import distribution_json

    with open(path, "w", encoding="utf-8") as fh:
        json.dump(distribution_json(dist, species), fh, indent=2)
