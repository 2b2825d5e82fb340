from fractions import Fraction as F
from itertools import product

import pytest

from crnelim.algebra import ReactionPair
from crnelim.elimination import classify, reduce
from crnelim.reduced_kinetics import (
    ChainNotFinite,
    branch_probabilities,
    build_chain,
    domination_gap,
    positive_iff_feasible,
    reduced_intensities,
    reduced_intensity,
    reduced_srn,
    truncated_walk_sum,
)
from conftest import exp1_weight

A_TO_B = ((1, 0), (0, 1))
B_TO_A = ((0, 1), (1, 0))


@pytest.fixture(scope="module")
def rn_exp1(exp1):
    return reduce(exp1, ["U"])


@pytest.fixture(scope="module")
def rn_unit(enzyme_unit):
    return reduce(enzyme_unit, ["EA", "EAB"])


@pytest.fixture(scope="module")
def rn_fast(enzyme):
    return reduce(enzyme, ["EA", "EAB"])


def enzyme_pair(rn, need, result):
    return ReactionPair(rn.embed(need), rn.embed(result))


def test_branch_probabilities_exp1(exp1):
    g = classify(exp1, ["U"])
    beta = branch_probabilities(exp1, g, (0, 0, 1), 1)
    assert beta == {1: F(1, 2), 2: F(1, 2)}


@pytest.mark.parametrize("b", [1, 2, 5])
def test_branch_probabilities_enzyme(enzyme_unit, b):
    g = classify(enzyme_unit, ["EA", "EAB"])
    x = (0, 0, b, 0, 0, 1, 0)
    beta = branch_probabilities(enzyme_unit, g, x, 1)
    assert beta == {1: F(1, 1 + b), 2: F(b, 1 + b)}
    assert sum(beta.values()) == 1


def test_branch_probabilities_outside_domain(exp1, enzyme_unit):
    g = classify(exp1, ["U"])
    assert branch_probabilities(exp1, g, (3, 0, 0), 1) == {1: 0, 2: 0}
    # at node 0 out edges are A -> U and B -> U
    assert branch_probabilities(exp1, g, (0, 0, 0), 0) == {0: 0, 3: 0}


@pytest.mark.parametrize("xa,xb", list(product(range(4), range(4))))
def test_exp1_reduced_intensities(rn_exp1, xa, xb):
    assert reduced_intensity(rn_exp1, A_TO_B, (xa, xb)) == F(xa, 2)
    assert reduced_intensity(rn_exp1, B_TO_A, (xa, xb)) == F(3 * xb, 2)


def test_full_coordinates_accepted(rn_exp1):
    assert reduced_intensity(rn_exp1, ((1, 0, 0), (0, 1, 0)), (4, 0, 0)) == 2
    with pytest.raises(ValueError):
        reduced_intensity(rn_exp1, A_TO_B, (1, 0, 1))


@pytest.mark.parametrize("state", [(1, 1, 1, 0, 0), (2, 3, 4, 0, 0), (1, 2, 0, 1, 1), (3, 1, 7, 2, 0)])
def test_enzyme_closed_form(rn_unit, rn_fast, state):
    e, a, b, _, _ = state
    values = reduced_intensities(rn_unit, state)
    cat = enzyme_pair(rn_unit, (1, 1, 1, 0, 0), (1, 0, 0, 1, 1))
    back = enzyme_pair(rn_unit, (1, 1, 0, 0, 0), (1, 1, 0, 0, 0))
    loop = enzyme_pair(rn_unit, (1, 1, 1, 0, 0), (1, 1, 1, 0, 0))
    assert values.get(cat, 0) == F(e * a * b, b + 2)
    assert values.get(back, 0) == F(e * a, 1 + b)
    assert values.get(loop, 0) == F(e * a * b, (1 + b) * (b + 2))
    assert reduced_intensity(rn_fast, cat, state) == F(e * a * 10 * b, 10 * b + 11)


def test_truncated_examples(rn_exp1, rn_unit):
    t = truncated_walk_sum(rn_exp1, A_TO_B, (1, 0), 2)
    assert t.value == F(1, 2) and t.tail == 0
    r = rn_unit.reactions[0]
    x = (2, 3, 4, 0, 0)
    t3, t9 = truncated_walk_sum(rn_unit, r, x, 3), truncated_walk_sum(rn_unit, r, x, 9)
    exact = reduced_intensity(rn_unit, r, x)
    assert t3.value < t9.value < exact
    assert exact - t9.value <= t9.tail
    # infeasible need gives 0 at every depth
    for d in (1, 5, 20):
        assert truncated_walk_sum(rn_unit, r, (2, 3, 0, 0, 0), d).value == 0


def test_truncated_monotone_and_bounded(rn_unit):
    r = rn_unit.reactions[0]
    x = (1, 2, 3, 0, 0)
    exact = reduced_intensity(rn_unit, r, x)
    prev = F(0)
    for d in range(1, 30, 2):
        t = truncated_walk_sum(rn_unit, r, x, d)
        assert prev <= t.value <= exact <= t.value + t.tail
        prev = t.value


def test_depth_must_be_positive(rn_exp1):
    with pytest.raises(ValueError):
        truncated_walk_sum(rn_exp1, A_TO_B, (1, 0), 0)


@pytest.mark.parametrize("state", [(0, 0, 0, 0, 0), (1, 1, 1, 0, 0), (2, 0, 3, 1, 0), (3, 2, 2, 2, 2)])
def test_domination_and_positivity(rn_unit, state):
    assert domination_gap(rn_unit, state) >= 0
    assert positive_iff_feasible(rn_unit, state)


def test_float_mode_agrees(rn_unit):
    x = (2, 3, 4, 0, 0)
    ex = reduced_intensities(rn_unit, x, "exact")
    fl = reduced_intensities(rn_unit, x, "float")
    for p, v in ex.items():
        assert fl[p] == pytest.approx(float(v), rel=1e-12)


def test_chain_not_finite(exp_count):
    g = classify(exp_count, ["U"])
    with pytest.raises(ChainNotFinite):
        build_chain(exp_count, g, (1, 0), cap=500)


def test_chain_rows_substochastic(rn_unit):
    chain = build_chain(rn_unit.net, rn_unit.graph, rn_unit.embed((2, 3, 4, 0, 0)))
    for s in range(len(chain)):
        assert sum(chain.transitions[s].values()) + sum(chain.absorb[s].values()) <= 1


def _reverse_identity(rn, pi, z):
    """Reverse-chain absorption at z equals pi(z - zeta) * reduced intensity at z - zeta."""
    x = rn.embed(z)
    chain = build_chain(rn.net, rn.graph, x, "reverse", pi)
    absorbed = chain.solve("exact")
    for p, v in absorbed.items():
        start = tuple(a - (r - n) for a, n, r in zip(x, p.need, p.result))
        assert v == pi(start) * reduced_intensities(rn, rn.project(start))[p]
    return absorbed


def test_reverse_chain_exp1(rn_exp1):
    for z in [(2, 0), (1, 1), (0, 3)]:
        _reverse_identity(rn_exp1, exp1_weight, z)


def test_reverse_chain_enzyme_rev(enzyme_rev):
    from math import factorial

    rn = reduce(enzyme_rev, ["EA", "EAB"])

    def pi(x):
        w = F(1)
        for v in x:
            w /= factorial(v)
        return w

    for z in [(1, 1, 1, 0, 0), (1, 0, 0, 1, 1), (2, 1, 2, 1, 0)]:
        _reverse_identity(rn, pi, z)


def test_reduced_srn_network(rn_exp1):
    srn = reduced_srn(rn_exp1)
    assert srn.species == ("A", "B")
    assert [r.pair for r in srn.reactions] == [A_TO_B, B_TO_A]
    assert srn.propensities((4, 2)) == [2, 3]
    assert srn.propensities_float((4, 2)) == [2.0, 3.0]
