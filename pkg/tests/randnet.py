"""Random weakly reversible networks with a non-interacting species set."""

from fractions import Fraction

import numpy as np

from crnelim.model import MassAction, Network, Reaction


def random_weakly_reversible(seed: int):
    rng = np.random.default_rng(seed)
    n_core = int(rng.integers(2, 4))
    m = int(rng.integers(1, 3))
    names = tuple(f"X{i}" for i in range(n_core)) + tuple(f"U{i}" for i in range(m))
    n = n_core + m

    def complex_():
        y = [int(v) for v in rng.integers(0, 2, size=n_core)] + [0] * m
        if rng.random() < 0.6:
            y[n_core + int(rng.integers(0, m))] = 1
        return tuple(y)

    pairs: dict = {}
    for _ in range(int(rng.integers(1, 4))):
        length = int(rng.integers(2, 5))
        cycle = [complex_() for _ in range(length)]
        for a, b in zip(cycle, cycle[1:] + cycle[:1]):
            if a != b and (a, b) not in pairs:
                pairs[(a, b)] = Fraction(int(rng.integers(1, 5)))
    reactions = tuple(Reaction(a, b, MassAction(k)) for (a, b), k in pairs.items())
    return Network(names, reactions), tuple(range(n_core, n))
