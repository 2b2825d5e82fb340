"""Exact rational linear algebra on sparse rows.

Rows are ``dict[int, Fraction]`` mapping column index to a nonzero entry.
Everything here works for any field type supporting ``+ - * /`` exactly,
which in practice means :class:`fractions.Fraction`.
"""

from __future__ import annotations

from fractions import Fraction
from math import lcm, gcd
from typing import Iterable, Mapping, Sequence

Row = dict[int, Fraction]


class SingularSystemError(ArithmeticError):
    """The linear system has no unique solution."""


class NullityError(ArithmeticError):
    """The kernel does not have the expected dimension."""

    def __init__(self, nullity: int):
        super().__init__(f"expected a one-dimensional kernel, found nullity {nullity}")
        self.nullity = nullity


def _reduce(row: Row, pivots: Mapping[int, Row]) -> Row:
    # pivot rows only carry columns >= their pivot, so eliminating in
    # increasing column order terminates
    while True:
        hits = [c for c in row if c in pivots]
        if not hits:
            return row
        c = min(hits)
        f = row[c]
        for k, v in pivots[c].items():
            nv = row.get(k, 0) - f * v
            if nv:
                row[k] = nv
            else:
                row.pop(k, None)


def _echelon(rows: Iterable[Mapping[int, Fraction]]) -> dict[int, Row]:
    pivots: dict[int, Row] = {}
    for raw in rows:
        row = _reduce({k: Fraction(v) for k, v in raw.items() if v}, pivots)
        if not row:
            continue
        p = min(row)
        inv = 1 / row[p]
        pivots[p] = {k: v * inv for k, v in row.items()}
    return pivots


def rank(rows: Iterable[Mapping[int, Fraction]]) -> int:
    return len(_echelon(rows))


def null_vector(rows: Iterable[Mapping[int, Fraction]], ncols: int) -> list[Fraction]:
    """Return a basis vector of a one-dimensional kernel.

    The free coordinate is set to one, so the result is not normalized.
    Raises :class:`NullityError` if the kernel is not one-dimensional.
    """
    pivots = _echelon(rows)
    free = [c for c in range(ncols) if c not in pivots]
    if len(free) != 1:
        raise NullityError(len(free))
    x: dict[int, Fraction] = {free[0]: Fraction(1)}
    for p in sorted(pivots, reverse=True):
        x[p] = -sum((v * x.get(k, 0) for k, v in pivots[p].items() if k != p), Fraction(0))
    return [x[c] for c in range(ncols)]


def solve(rows: Sequence[Mapping[int, Fraction]], rhs: Sequence[Fraction], ncols: int) -> list[Fraction]:
    """Solve the square system ``A x = rhs`` exactly."""
    aug = []
    for row, b in zip(rows, rhs):
        r = dict(row)
        if b:
            r[ncols] = Fraction(b)
        aug.append(r)
    pivots = _echelon(aug)
    if ncols in pivots:
        raise SingularSystemError("inconsistent system")
    if len(pivots) < ncols:
        raise SingularSystemError(f"rank {len(pivots)} < {ncols}")
    x: dict[int, Fraction] = {}
    for p in sorted(pivots, reverse=True):
        row = pivots[p]
        x[p] = row.get(ncols, Fraction(0)) - sum(
            (v * x[k] for k, v in row.items() if k != p and k != ncols), Fraction(0)
        )
    return [x[c] for c in range(ncols)]


def feasible_point(a_eq: Sequence[Sequence[Fraction]], b_eq: Sequence[Fraction]) -> list[Fraction] | None:
    """Find ``v >= 0`` with ``a_eq @ v == b_eq``, or return ``None``.

    Phase-one simplex over exact rationals with Bland's rule, so it
    terminates and the answer is a certificate rather than a float guess.
    """
    m = len(a_eq)
    n = len(a_eq[0]) if m else 0
    # tableau rows: [coeffs (n) | artificials (m) | rhs]
    tab: list[list[Fraction]] = []
    for i in range(m):
        sign = -1 if b_eq[i] < 0 else 1
        row = [Fraction(sign * a) for a in a_eq[i]]
        row += [Fraction(int(i == j)) for j in range(m)]
        row.append(Fraction(sign * b_eq[i]))
        tab.append(row)
    basis = [n + i for i in range(m)]
    width = n + m
    # objective: minimize sum of artificials, expressed in reduced costs
    cost = [Fraction(0)] * (width + 1)
    for row in tab:
        for j in range(width + 1):
            cost[j] -= row[j]
    for j in range(n, width):
        cost[j] += 1

    while True:
        entering = next((j for j in range(width) if cost[j] < 0), None)
        if entering is None:
            break
        best = None
        for i in range(m):
            a = tab[i][entering]
            if a > 0:
                ratio = tab[i][-1] / a
                key = (ratio, basis[i])
                if best is None or key < best[0]:
                    best = (key, i)
        if best is None:  # unbounded direction; cannot happen in phase one
            break
        r = best[1]
        piv = tab[r][entering]
        tab[r] = [v / piv for v in tab[r]]
        for i in range(m):
            if i != r and tab[i][entering]:
                f = tab[i][entering]
                tab[i] = [v - f * w for v, w in zip(tab[i], tab[r])]
        f = cost[entering]
        cost = [v - f * w for v, w in zip(cost, tab[r])]
        basis[r] = entering

    if -cost[-1] != 0:
        return None
    x = [Fraction(0)] * width
    for i, b in enumerate(basis):
        x[b] = tab[i][-1]
    return x[:n]


def integer_scaling(values: Sequence[Fraction]) -> list[int]:
    """Scale a rational vector to the primitive integer vector on its ray."""
    den = 1
    for v in values:
        den = lcm(den, Fraction(v).denominator)
    ints = [int(Fraction(v) * den) for v in values]
    g = 0
    for v in ints:
        g = gcd(g, v)
    return [v // g for v in ints] if g else ints
