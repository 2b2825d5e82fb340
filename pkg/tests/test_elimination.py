import pytest

from crnelim.algebra import CapExceeded, ReactionPair, walk_sum
from crnelim.elimination import (
    Condition1Violated,
    NotEliminable,
    NotNonInteracting,
    check_condition1,
    check_condition2,
    check_weak_reversibility,
    classify,
    condition_report,
    is_reversible,
    produced_degraded,
    reduce,
    simple_cycles,
    walk_vector,
)
from crnelim.model import format_complex
from crnelim.netparse import parse_network
from randnet import random_weakly_reversible


def labels(net, pairs):
    return [f"{format_complex(p.need, net.species)} -> {format_complex(p.result, net.species)}" for p in pairs]


def test_classify_partition(enzyme):
    g = classify(enzyme, ["EA", "EAB"])
    parts = g.partition()
    names = enzyme.species
    as_text = [sorted(format_complex(y, names) for y in part) for part in parts]
    assert as_text == [["A + E", "E + P + Q"], ["B + EA", "EA"], ["EAB"]]
    assert [g.edge_nodes(r) for r in range(5)] == [(0, 1), (1, 0), (1, 2), (2, 1), (2, 0)]
    assert not g.is_intermediate


def test_classify_rejects_double_molecule():
    net = parse_network("species: A, U\nA -> 2 U : k=1\n2 U -> A : k=1").network
    with pytest.raises(NotNonInteracting):
        classify(net, ["U"])


def test_classify_rejects_improper_set(exp1):
    with pytest.raises(ValueError):
        classify(exp1, [])
    with pytest.raises(ValueError):
        classify(exp1, ["A", "B", "U"])


def test_intermediate_flag(exp1):
    assert classify(exp1, ["U"]).is_intermediate


def test_produced_degraded(enzyme):
    pro, deg, ok = produced_degraded(classify(enzyme, ["EA", "EAB"]))
    assert pro == deg == {"EA", "EAB"} and ok


def test_not_eliminable():
    net = parse_network("species: A, U, V\nA -> U : k=1\nU -> V : k=1\nV -> U : k=1").network
    pro, deg, ok = produced_degraded(classify(net, ["U", "V"]))
    assert pro == {"U", "V"} and deg == set() and not ok
    with pytest.raises(NotEliminable):
        reduce(net, ["U", "V"])


def test_weak_reversibility(exp1, enzyme, enzyme_rev):
    assert check_weak_reversibility(exp1)
    assert not check_weak_reversibility(enzyme)
    assert check_weak_reversibility(enzyme_rev)
    assert is_reversible(exp1) and is_reversible(enzyme_rev) and not is_reversible(enzyme)


def test_enzyme_walk_sums(enzyme):
    rn = reduce(enzyme, ["EA", "EAB"])
    assert sorted(labels(enzyme, rn.walk_sums)) == sorted(
        ["A + E -> A + E", "A + B + E -> A + B + E", "A + B + E -> E + P + Q"]
    )
    assert labels(enzyme, rn.reactions) == ["A + B + E -> E + P + Q"]
    assert rn.species == ("E", "A", "B", "P", "Q")
    assert rn.core_reactions == (ReactionPair((1, 1, 1, 0, 0), (1, 0, 0, 1, 1)),)


def test_provenance_walks_reproduce_sums(enzyme, exp1):
    for net, u in ((enzyme, ["EA", "EAB"]), (exp1, ["U"])):
        rn = reduce(net, u)
        for p, walks in rn.provenance.items():
            assert walks
            for w in walks:
                assert w.nodes[0] == w.nodes[-1] == 0
                assert 0 not in w.nodes[1:-1]
                assert walk_sum(rn.graph, w) == p


def test_exp1_reduction(exp1):
    rn = reduce(exp1, ["U"])
    assert sorted(labels(exp1, rn.reactions)) == ["A -> B", "B -> A"]
    assert sorted(labels(exp1, rn.walk_sums)) == ["A -> A", "A -> B", "B -> A", "B -> B"]


def test_direct_core_reaction_is_kept():
    net = parse_network("species: A, B, U\nA -> B : k=1\nB -> U : k=1\nU -> A : k=1").network
    rn = reduce(net, ["U"])
    assert sorted(labels(net, rn.reactions)) == ["A -> B", "B -> A"]


def test_no_reduced_reactions():
    # every walk through U returns what it took
    net = parse_network("species: A, U\nA -> U : k=1\nU -> A : k=1").network
    rn = reduce(net, ["U"])
    assert rn.reactions == () and len(rn.walk_sums) == 1


def test_cap(enzyme):
    with pytest.raises(CapExceeded):
        reduce(enzyme, ["EA", "EAB"], cap=1)


def test_exp_count_conditions(exp_count):
    g = classify(exp_count, ["U"])
    c1 = check_condition1(g)
    assert not c1.holds and c1.witness.nodes == (1, 1)
    assert abs(c1.vector[0]) == 1 and c1.vector[1] == 0
    c2 = check_condition2(g)
    assert not c2.holds_i and not c2.holds_ii
    assert c2.witness_i.vector == (1, 0)
    assert c2.witness_ii.vector == (-1, 0)
    for cert in (c2.witness_i, c2.witness_ii):
        total = [0, 0]
        for k, w in zip(cert.coefficients, cert.cycles):
            assert k > 0 and w.nodes == (1, 1)
            total = [a + k * b for a, b in zip(total, walk_vector(g, w))]
        assert tuple(total) == cert.vector
    with pytest.raises(Condition1Violated) as info:
        reduce(exp_count, ["U"])
    assert info.value.witness.nodes == (1, 1)


def test_condition2_can_hold_without_condition1():
    # two opposite catalytic loops: nonzero cycles that cancel
    net = parse_network("species: A, B, U\nA -> U : k=1\nU -> A : k=1\nA + U -> B + U : k=1\nB + U -> A + U : k=1").network
    g = classify(net, ["U"])
    assert not check_condition1(g).holds
    assert check_condition2(g).holds


def test_multi_node_cycle_and_parallel_edges():
    net = parse_network(
        "species: A, B, U, V\nA -> U : k=1\nU -> V : k=1\nB + U -> V : k=1\nV -> U : k=1\nV -> A : k=1"
    ).network
    g = classify(net, ["U", "V"])
    cycles = simple_cycles(g)
    assert sorted(w.edges for w in cycles) == [(1, 3), (2, 3)]
    c1 = check_condition1(g)
    assert not c1.holds and c1.witness.edges == (2, 3)
    c2 = check_condition2(g)
    assert c2.holds_i and not c2.holds_ii


def test_condition_report_flags(enzyme):
    rep = condition_report(enzyme, ["EA", "EAB"])
    assert rep.eliminable and rep.condition1.holds and rep.condition2.holds
    assert not rep.weakly_reversible


@pytest.mark.parametrize("seed", range(100))
def test_random_weakly_reversible_corpus(seed):
    net, u = random_weakly_reversible(seed)
    g = classify(net, u)
    pro, deg, ok = produced_degraded(g)
    assert check_weak_reversibility(net)
    assert pro == deg and ok
    if check_condition1(g).holds:
        assert check_condition2(g).holds
