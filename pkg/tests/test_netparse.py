import json
from fractions import Fraction as F

import jsonschema
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from crnelim.markov import Distribution
from crnelim.netparse import (
    DISTRIBUTION_SCHEMA,
    DuplicateReaction,
    InvalidNetwork,
    NetworkSyntaxError,
    UnknownSpecies,
    distribution_from_json,
    distribution_json,
    parse_network,
    serialize_document,
    serialize_network,
)
from crnelim.model import MassAction, Network, Reaction


def test_parse_exp1(exp1):
    assert exp1.species == ("A", "B", "U")
    assert [r.pair for r in exp1.reactions] == [
        ((1, 0, 0), (0, 0, 1)),
        ((0, 0, 1), (1, 0, 0)),
        ((0, 0, 1), (0, 1, 0)),
        ((0, 1, 0), (0, 0, 1)),
    ]
    assert [r.kinetics.rate for r in exp1.reactions] == [1, 2, 2, 3]


def test_species_order_from_first_appearance():
    net = parse_network("U -> A : k=1\nA -> U + 2B : k=1/2").network
    assert net.species == ("U", "A", "B")
    assert net.reactions[1].product == (1, 0, 2)
    assert net.reactions[1].kinetics.rate == F(1, 2)


def test_empty_complex_and_compact_coefficient():
    net = parse_network("species: A, B\n0 -> 2B : k=1\nB -> : k=1\nA -> 0 : k=1\n0 -> A : k=1").network
    assert net.reactions[0].pair == ((0, 0), (0, 2))
    assert net.reactions[1].product == (0, 0)


def test_sets_and_beta():
    doc = parse_network("species: A, U, V\nset fast: U, V\nbeta: U=1, V=1/2\nA -> U : k=1\nU -> V : k=1\nV -> A : k=1")
    assert doc.sets == {"fast": ("U", "V")}
    assert doc.beta == {"U": 1, "V": F(1, 2)}


def test_species_named_set_is_a_reaction():
    net = parse_network("set -> A : k=1\nA -> set : k=1").network
    assert net.species == ("set", "A")


def test_unknown_species_in_reaction_has_position():
    with pytest.raises(UnknownSpecies) as info:
        parse_network("species: A\nA -> B : k=1")
    assert (info.value.line, info.value.col) == (2, 6)


def test_unknown_species_in_rate():
    with pytest.raises(UnknownSpecies) as info:
        parse_network("species: A, U\nA -> U : rate=2*X")
    assert info.value.name == "X" and info.value.line == 2


def test_syntax_error_positions():
    with pytest.raises(NetworkSyntaxError) as info:
        parse_network("A -> U k=1")
    assert info.value.line == 1
    with pytest.raises(NetworkSyntaxError) as info:
        parse_network("A -> U : speed=1")
    assert info.value.expected.startswith("'k=")
    with pytest.raises(NetworkSyntaxError):
        parse_network("A -> U : k=0")
    with pytest.raises(NetworkSyntaxError):
        parse_network("A -> 0 U : k=1")


def test_duplicate_reaction():
    with pytest.raises(DuplicateReaction) as info:
        parse_network("A -> U : k=1\nU -> A : k=1\nA -> U : k=2")
    assert info.value.first_line == 1 and info.value.line == 3


def test_invalid_network_reports_violations():
    with pytest.raises(InvalidNetwork):
        parse_network("species: A, B\nA -> A : k=1")


def test_round_trip_fixtures(exp1, exp_count, enzyme):
    for net in (exp1, exp_count, enzyme):
        again = parse_network(serialize_network(net)).network
        assert again == net


def test_document_round_trip():
    doc = parse_network("species: A, U\nset u: U\nbeta: U=3/2\nA -> U : k=1\nU -> A : k=2")
    assert parse_network(serialize_document(doc)) == doc


@st.composite
def networks(draw):
    n = draw(st.integers(1, 4))
    names = tuple(f"S{i}" for i in range(n))
    cplx = st.tuples(*[st.integers(0, 2)] * n)
    pairs = draw(st.lists(st.tuples(cplx, cplx).filter(lambda p: p[0] != p[1]), min_size=1, max_size=6,
                          unique=True))
    rates = draw(st.lists(st.fractions(min_value=F(1, 10), max_value=10), min_size=len(pairs),
                          max_size=len(pairs)))
    return Network(names, tuple(Reaction(a, b, MassAction(k)) for (a, b), k in zip(pairs, rates)))


@settings(max_examples=200, deadline=None)
@given(networks())
def test_round_trip_property(net):
    assert parse_network(serialize_network(net), validate=False).network == net


def test_distribution_json_schema_and_round_trip():
    d = Distribution({(1, 0): F(1, 3), (0, 1): F(2, 3)}, normalizer=F(3, 2))
    doc = distribution_json(d, ["A", "B"])
    jsonschema.validate(doc, DISTRIBUTION_SCHEMA)
    assert doc["entries"][0] == {"state": [0, 1], "p": "2/3"}
    back = distribution_from_json(json.loads(json.dumps(doc)))
    assert back == dict(d)
