"""JSON encoders for condition reports, reduced networks and convergence tables."""

from __future__ import annotations

from typing import Any, Mapping, Sequence

from .algebra import ReactionPair, Walk
from .elimination import Certificate, ConditionReport, EliminationGraph, ReducedNetwork
from .markov import Number
from .model import format_complex
from .netparse import distribution_json, rational_json
from .scaling import ConvergenceTable


def walk_json(g: EliminationGraph, w: Walk) -> dict[str, Any]:
    return {"nodes": [g.node_name(i) for i in w.nodes], "reactions": list(w.edges)}


def _certificate_json(g: EliminationGraph, c: Certificate | None):
    if c is None:
        return None
    return {
        "coefficients": list(c.coefficients),
        "cycles": [walk_json(g, w) for w in c.cycles],
        "vector": list(c.vector),
    }


def condition_json(report: ConditionReport, g: EliminationGraph) -> dict[str, Any]:
    c1, c2 = report.condition1, report.condition2
    return {
        "u": list(report.u),
        "u_pro": sorted(report.u_pro),
        "u_deg": sorted(report.u_deg),
        "eliminable": report.eliminable,
        "weakly_reversible": report.weakly_reversible,
        "intermediate": report.intermediate,
        "condition1": {
            "holds": c1.holds,
            "witness": None if c1.witness is None else walk_json(g, c1.witness),
            "vector": None if c1.vector is None else list(c1.vector),
        },
        "condition2_i": {"holds": c2.holds_i, "witness": _certificate_json(g, c2.witness_i)},
        "condition2_ii": {"holds": c2.holds_ii, "witness": _certificate_json(g, c2.witness_ii)},
    }


def pair_json(rn: ReducedNetwork, p: ReactionPair) -> dict[str, Any]:
    names = rn.net.species
    walks = rn.provenance[p]
    return {
        "reactant": format_complex(p.need, names),
        "product": format_complex(p.result, names),
        "reactant_vector": list(rn.project(p.need)),
        "product_vector": list(rn.project(p.result)),
        "provenance_count": len(walks),
        "example_walk": walk_json(rn.graph, walks[0]),
    }


def reduced_json(rn: ReducedNetwork, report: ConditionReport) -> dict[str, Any]:
    return {
        "species": list(rn.species),
        "core_species": list(rn.core_species),
        "eliminated": list(rn.graph.u_names),
        "reactions": [pair_json(rn, p) for p in rn.reactions],
        "walk_sums": [pair_json(rn, p) for p in rn.walk_sums],
        "conditions": condition_json(report, rn.graph),
    }


def intensities_json(rn: ReducedNetwork, z: Sequence[int], values: Mapping[ReactionPair, Number]) -> dict:
    return {
        "state": list(z),
        "values": {rn.format_pair(p): rational_json(values.get(p, 0)) for p in rn.reactions},
    }


def residual_json(stationary: Number, complex_balance: Mapping, detailed: Mapping | None, names) -> dict:
    def label(key):
        if isinstance(key[0], tuple):
            return f"{format_complex(key[0], names)} <-> {format_complex(key[1], names)}"
        return format_complex(key, names)

    return {
        "stationary": rational_json(stationary),
        "complex_balance": {label(k): rational_json(v) for k, v in complex_balance.items()},
        "detailed_balance": None if detailed is None else {label(k): rational_json(v) for k, v in detailed.items()},
    }


def convergence_json(table: ConvergenceTable, u_names: Sequence[str], species: Sequence[str]) -> dict:
    return {
        "beta": {n: rational_json(b) for n, b in zip(u_names, table.beta)},
        "gamma0": rational_json(table.gamma0),
        "gap": None if table.gap is None else rational_json(table.gap),
        "rows": [
            {"N": r.N, "tv": rational_json(r.tv), "tv_float": float(r.tv), "normalizer": rational_json(r.normalizer)}
            for r in table.rows
        ],
        "ratios": table.ratios(),
        "limit": distribution_json(table.limit, species),
    }
