"""Command-line interface: ``crnelim validate | reduce | stationary | limit | simulate``.

Exit codes: 0 ok, 1 validation or usage error, 2 input/output error,
3 condition violation, 4 component error, 5 simulation guard.
"""

from __future__ import annotations

import argparse
import json
import logging
import re
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Sequence

from . import config
from .algebra import CapExceeded
from .elimination import (
    DEFAULT_CAP,
    Condition1Violated,
    NotEliminable,
    NotNonInteracting,
    classify,
    condition_report,
    reduce,
)
from .expr import ExprEvaluationError, ExprSyntaxError
from .markov import (
    BoundExceeded,
    EmptySlice,
    NotClosed,
    NotReversible,
    SingularBeyondNullity,
    check_complex_balance,
    check_detailed_balance,
    check_stationary,
    conditional_distribution,
    conservation_bound,
    decompose_reduced_component,
    irreducible_component,
    max_residual,
    project,
    stationary_distribution,
)
from .model import Network
from .netparse import InvalidNetwork, NetParseError, NetworkDocument, distribution_json, read_network
from .reduced_kinetics import ChainNotFinite, reduced_intensities, reduced_srn
from .report import convergence_json, intensities_json, reduced_json, residual_json
from .scaling import ScalingSpec, convergence_table, scale_kinetics
from .simulate import ExplosionGuard, empirical_distribution, gillespie, write_trajectory_csv

log = logging.getLogger("crnelim")

EXIT_OK, EXIT_VALIDATION, EXIT_IO, EXIT_CONDITION, EXIT_COMPONENT, EXIT_GUARD = range(6)


class UsageError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    input: str
    numeric: str = "auto"
    memo_cap: int = DEFAULT_CAP
    output: str | None = None
    seed: int | None = None
    extra: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        config.numeric_mode(self.numeric)
        if self.memo_cap < 1:
            raise UsageError("caps must be positive")


# argument parsing helpers


def parse_state(text: str, species: Sequence[str]) -> tuple[int, ...]:
    """``"A=2,U=0"`` (missing species are 0) or ``"2,0,0"``."""
    text = text.strip()
    parts = [p.strip() for p in text.split(",") if p.strip()]
    if parts and all("=" not in p for p in parts):
        values = [int(p) for p in parts]
        if len(values) != len(species):
            raise UsageError(f"state {text!r} needs {len(species)} entries")
        out = tuple(values)
    else:
        x = dict.fromkeys(species, 0)
        for p in parts:
            name, _, value = p.partition("=")
            name = name.strip()
            if name not in x:
                raise UsageError(f"unknown species {name!r} in state {text!r}")
            x[name] = int(value)
        out = tuple(x.values())
    if min(out, default=0) < 0:
        raise UsageError("state entries must be nonnegative")
    return out


_LIN_TERM = re.compile(r"\s*(?:(\d+)\s*\*?\s*)?([A-Za-z_][A-Za-z0-9_]*)\s*")


def parse_bound(text: str, species: Sequence[str]):
    """``box:5,5,5`` / ``box:A=5,B=3`` or conservation laws ``A + B + U = 2; ...``."""
    text = text.strip()
    if text.startswith("box:"):
        return parse_state(text[4:], species)
    laws = []
    for law in text.split(";"):
        lhs, eq, rhs = law.partition("=")
        if not eq:
            raise UsageError(f"bound {law!r} is neither 'box:...' nor a conservation law")
        weights = [0] * len(species)
        for term in lhs.split("+"):
            m = _LIN_TERM.fullmatch(term)
            if not m or m.group(2) not in species:
                raise UsageError(f"cannot read term {term.strip()!r} of bound {law.strip()!r}")
            weights[species.index(m.group(2))] += int(m.group(1) or 1)
        laws.append(conservation_bound(weights, int(rhs)))
    return lambda x: all(f(x) for f in laws)


def parse_names(text: str | None) -> list[str] | None:
    if text is None:
        return None
    return [s.strip() for s in text.split(",") if s.strip()]


def parse_positive_rationals(text: str) -> list[Fraction]:
    try:
        values = [Fraction(s.strip()) for s in text.split(",") if s.strip()]
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"cannot read {text!r} as rationals") from None
    if not values or any(v <= 0 for v in values):
        raise UsageError("values must be positive")
    return values


def _choose_u(doc: NetworkDocument, names: list[str] | None) -> list[str]:
    if names:
        return names
    if len(doc.sets) == 1:
        return list(next(iter(doc.sets.values())))
    if "u" in doc.sets:
        return list(doc.sets["u"])
    raise UsageError("give the species to eliminate with --u or a single 'set' line")


def _emit(obj: Any, path: str | None) -> None:
    text = json.dumps(obj, indent=2)
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)


# commands


def cmd_validate(args) -> int:
    doc = read_network(args.file, validate=False)
    from .model import validate_network

    box = parse_state(args.probe_box, doc.network.species) if args.probe_box else None
    problems = [str(v) for v in validate_network(doc.network, box)]
    names = parse_names(args.u)
    sets = dict(doc.sets)
    if names:
        sets["--u"] = tuple(names)
    for label, members in sets.items():
        try:
            classify(doc.network, members)
        except NotNonInteracting as exc:
            problems.append(f"set {label}: {exc}")
        except (KeyError, ValueError) as exc:
            problems.append(f"set {label}: {exc}")
    for p in problems:
        print(f"{args.file}: {p}", file=sys.stderr)
    if problems:
        return EXIT_VALIDATION
    print(f"{args.file}: OK ({doc.network.n} species, {len(doc.network.reactions)} reactions)")
    return EXIT_OK


def cmd_reduce(args) -> int:
    doc = read_network(args.file)
    net = doc.network
    u = _choose_u(doc, parse_names(args.u))
    report = condition_report(net, u)
    rn = reduce(net, u, cap=args.cap)
    out = reduced_json(rn, report)
    if args.at:
        out["intensities"] = []
        for text in args.at:
            z = parse_state(text, rn.species)
            out["intensities"].append(intensities_json(rn, z, reduced_intensities(rn, z, args.numeric)))
    _emit(out, args.output)
    return EXIT_OK


def _network_for(args, doc: NetworkDocument) -> Network:
    if getattr(args, "reduced", False):
        rn = reduce(doc.network, _choose_u(doc, parse_names(args.u)))
        return reduced_srn(rn, args.numeric)
    return doc.network


def cmd_stationary(args) -> int:
    doc = read_network(args.file)
    net = _network_for(args, doc)
    seed = parse_state(args.seed_state, net.species)
    gamma = irreducible_component(net, seed, parse_bound(args.bound, net.species))
    pi = stationary_distribution(net, gamma, args.numeric)
    try:
        detailed = check_detailed_balance(net, gamma, pi)
    except NotReversible:
        detailed = None
    out = distribution_json(pi, net.species)
    out["residuals"] = residual_json(
        check_stationary(net, gamma, pi), check_complex_balance(net, gamma, pi), detailed, net.species
    )
    _emit(out, args.output)
    return EXIT_OK


def cmd_limit(args) -> int:
    doc = read_network(args.file)
    net = doc.network
    u = _choose_u(doc, parse_names(args.u))
    g = classify(net, u) if not args.interacting else None
    u_idx = g.u if g else tuple(net.index(s) for s in u)
    if args.beta:
        beta = parse_positive_rationals(args.beta)
    elif doc.beta:
        beta = [Fraction(doc.beta[net.species[i]]) for i in u_idx]
    else:
        beta = [Fraction(1)]
    ns = [int(v) for v in parse_positive_rationals(args.Ns)]
    seed = parse_state(args.seed_state, net.species)
    gamma = irreducible_component(net, seed, parse_bound(args.bound, net.species))
    pi = stationary_distribution(net, gamma, "exact")
    if max_residual(check_complex_balance(net, gamma, pi)):
        print("stationary distribution is not complex balanced; the scaling limit does not apply", file=sys.stderr)
        return EXIT_CONDITION
    table = convergence_table(pi, gamma.states, u_idx, beta, ns)
    out = convergence_json(table, [net.species[i] for i in u_idx], net.species)
    checks: dict[str, Any] = {"limit_equals_conditional": True}
    cond = conditional_distribution(pi, table.limit.support)
    checks["limit_equals_conditional"] = dict(cond) == dict(table.limit)
    checks["limit_equals_reduced_stationary"] = None
    if g is not None and table.gamma0 == 0:
        report = condition_report(net, u)
        if report.eliminable and report.condition1.holds and report.condition2.holds:
            rn = reduce(net, u)
            srn = reduced_srn(rn, "exact")
            limit0 = project(table.limit, rn.core)
            agree = True
            for comp in decompose_reduced_component(srn, limit0.support):
                p0 = stationary_distribution(srn, comp, "exact")
                agree &= dict(p0) == dict(conditional_distribution(limit0, comp.states))
            checks["limit_equals_reduced_stationary"] = agree
    out["checks"] = checks
    _emit(out, args.output)
    return EXIT_OK


def cmd_simulate(args) -> int:
    doc = read_network(args.file)
    net = _network_for(args, doc)
    if args.scale is not None:
        if args.reduced:
            raise UsageError("--scale applies to the full network only")
        u = _choose_u(doc, parse_names(args.u))
        beta = parse_positive_rationals(args.beta) if args.beta else [Fraction(1)]
        net = scale_kinetics(net, u, ScalingSpec(tuple(beta), args.scale))
    x0 = parse_state(args.x0, net.species)
    if args.t_end <= 0 or args.burn_in >= args.t_end:
        raise UsageError("need 0 <= burn-in < t-end")
    traj = gillespie(net, x0, args.t_end, args.seed, args.max_jumps)
    if args.trajectory:
        write_trajectory_csv(traj, args.trajectory, net.species)
    keep = parse_names(args.project)
    indices = [net.index(s) for s in keep] if keep else None
    dist = empirical_distribution(traj, args.burn_in, indices)
    out = distribution_json(dist, keep or net.species)
    out["jumps"] = len(traj) - 1
    out["seed"] = args.seed
    _emit(out, args.output)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="crnelim", description=__doc__.splitlines()[0])
    p.add_argument("--numeric", choices=config.MODES, default=None,
                   help="exact rationals, floats, or exact up to 2000 states (default; CRN_NUMERIC_MODE)")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("validate", help="parse and check a network file")
    v.add_argument("file")
    v.add_argument("--u", help="comma-separated species that must be non-interacting")
    v.add_argument("--probe-box", help="probe rate expressions on this box, e.g. 5,5,5")
    v.set_defaults(func=cmd_validate)

    r = sub.add_parser("reduce", help="eliminate non-interacting species")
    r.add_argument("file")
    r.add_argument("--u", help="comma-separated species to eliminate")
    r.add_argument("--at", action="append", help="core state at which to evaluate reduced intensities")
    r.add_argument("--cap", type=int, default=DEFAULT_CAP, help="walk-state cap")
    r.add_argument("-o", "--output")
    r.set_defaults(func=cmd_reduce)

    s = sub.add_parser("stationary", help="exact stationary distribution on a component")
    s.add_argument("file")
    s.add_argument("--seed-state", required=True)
    s.add_argument("--bound", required=True, help="'box:5,5,5' or conservation laws 'A + B + U = 2'")
    s.add_argument("--reduced", action="store_true", help="use the reduced network")
    s.add_argument("--u")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_stationary)

    lim = sub.add_parser("limit", help="convergence of scaled distributions")
    lim.add_argument("file")
    lim.add_argument("--u")
    lim.add_argument("--beta", help="one positive rational, or one per eliminated species")
    lim.add_argument("--Ns", default="1,2,4,8,16,32", help="increasing list of N")
    lim.add_argument("--seed-state", required=True)
    lim.add_argument("--bound", required=True)
    lim.add_argument("--interacting", action="store_true", help="allow a set that is not non-interacting")
    lim.add_argument("-o", "--output")
    lim.set_defaults(func=cmd_limit)

    sm = sub.add_parser("simulate", help="Gillespie simulation")
    sm.add_argument("file")
    sm.add_argument("--x0", required=True)
    sm.add_argument("--t-end", type=float, required=True)
    sm.add_argument("--seed", type=int, default=0)
    sm.add_argument("--burn-in", type=float, default=0.0)
    sm.add_argument("--max-jumps", type=int, default=10_000_000)
    sm.add_argument("--reduced", action="store_true")
    sm.add_argument("--u")
    sm.add_argument("--scale", type=int, help="simulate the network scaled by this N")
    sm.add_argument("--beta")
    sm.add_argument("--project", help="species kept in the occupation measure")
    sm.add_argument("--trajectory", help="write the trajectory as CSV")
    sm.add_argument("-o", "--output")
    sm.set_defaults(func=cmd_simulate)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse uses 2 for usage errors; keep 2 for I/O
        return EXIT_OK if exc.code == 0 else EXIT_VALIDATION
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR, format="%(levelname)s: %(message)s")
    try:
        args.numeric = config.numeric_mode(args.numeric)
        RunConfig(args.command, args.file, args.numeric, getattr(args, "cap", DEFAULT_CAP), getattr(args, "output", None),
                  getattr(args, "seed", None))
        return args.func(args)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (NetParseError, InvalidNetwork, NotNonInteracting, ExprSyntaxError, UsageError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except Condition1Violated as exc:
        g_nodes = " -> ".join(str(n) for n in exc.witness.nodes)
        print(f"condition violated: {exc}; witness cycle through nodes {g_nodes} "
              f"using reactions {list(exc.witness.edges)}", file=sys.stderr)
        return EXIT_CONDITION
    except (NotEliminable, ChainNotFinite, CapExceeded) as exc:
        print(f"condition violated: {exc}", file=sys.stderr)
        return EXIT_CONDITION
    except (BoundExceeded, NotClosed, SingularBeyondNullity, EmptySlice) as exc:
        print(f"component error: {exc}", file=sys.stderr)
        return EXIT_COMPONENT
    except ExplosionGuard as exc:
        print(f"simulation guard: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except (KeyError, ValueError, ExprEvaluationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


def main_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
