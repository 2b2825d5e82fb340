from fractions import Fraction as F

import pytest

from crnelim.model import (
    IncompatibleKinetics,
    MassAction,
    Network,
    Reaction,
    SelfLoopReaction,
    UnusedSpecies,
    eval_intensity,
    falling_factorial,
    format_complex,
    validate_network,
)
from crnelim.netparse import parse_network


def test_falling_factorial():
    assert falling_factorial(5, 2) == 20
    assert falling_factorial(1, 2) == 0
    assert falling_factorial(3, 0) == 1


def test_mass_action_intensity():
    # k * x_A * x_B (x_B - 1) for A + 2B
    net = parse_network("species: A, B\nA + 2 B -> 0 : k=3/2").network
    assert eval_intensity(net, 0, (2, 3)) == F(3, 2) * 2 * 3 * 2
    assert eval_intensity(net, 0, (2, 1)) == 0


def test_mass_action_positive():
    with pytest.raises(ValueError):
        MassAction(0)


def test_rate_expression_intensity(exp_count):
    # first reaction is (x_A!)^2 when x_A >= 1
    assert eval_intensity(exp_count, 0, (3, 0)) == 36
    assert eval_intensity(exp_count, 0, (0, 2)) == 0


def test_eval_intensity_checks_length(exp1):
    with pytest.raises(ValueError):
        eval_intensity(exp1, 0, (1, 0))


def test_propensities_float_match_exact(exp1):
    x = (3, 1, 2)
    assert exp1.propensities_float(x) == [float(v) for v in exp1.propensities(x)]


def test_network_invariants():
    with pytest.raises(ValueError):
        Network(("A", "A"), ())
    with pytest.raises(ValueError):
        Network(("A",), (Reaction((1, 0), (0,), MassAction(1)),))


def test_format_complex():
    assert format_complex((0, 2, 1), ("C", "B", "A")) == "A + 2 B"
    assert format_complex((0, 0), ("A", "B")) == "0"


def test_validate_clean(exp1, enzyme):
    assert validate_network(exp1) == []
    assert validate_network(enzyme) == []


def test_validate_unused_and_self_loop():
    net = Network(("A", "B"), (Reaction((1, 0), (1, 0), MassAction(1)),))
    found = validate_network(net)
    assert UnusedSpecies("B") in found
    assert SelfLoopReaction(0) in found


def test_validate_probe_detects_incompatible_rate():
    doc = parse_network("species: A\nA -> 0 : rate=A - 1", validate=False)
    found = validate_network(doc.network, probe_box=(3,))
    assert len(found) == 1 and isinstance(found[0], IncompatibleKinetics)


def test_validate_probe_accepts_factorial_rates(exp_count):
    assert validate_network(exp_count, probe_box=(5, 5)) == []
