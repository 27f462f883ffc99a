"""Command-line front end.

Exit codes: 0 success, 2 spec parse error, 3 validation error,
4 certification verdict differs from the expected one.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import circuits, estimator
from .errors import PhaseSRMError, ValidationError
from .optimality import (
    Verdict,
    average_score_quadrature,
    certify,
    default_gridpoints,
    max_average_score,
    score_operators_closed,
)
from .pom import sample_angles, sample_states, srm, srm_reciprocal
from .report import ProblemSpec, SpecParseError, dump_report, parse_problem
from .symstate import overlap_coefficients, symmetric_amplitudes

EXIT_OK, EXIT_PARSE, EXIT_INVALID, EXIT_VERDICT = 0, 2, 3, 4
CIRCUIT_GRID = 64


def _derived(problem: ProblemSpec, N: int) -> tuple:
    sym = symmetric_amplitudes(problem.state, N)
    d = overlap_coefficients(problem.state)
    return sym, d, {
        "ladder_amplitudes": list(sym.A),
        "overlap_coefficients": list(d.d),
        "ladder_dim": sym.dim,
        "bosonic_dim": sym.bosonic_dim,
        "max_average_score": max_average_score(sym, d),
    }


def cmd_score(problem: ProblemSpec, grid: int | None) -> tuple[dict, int]:
    sym, d, derived = _derived(problem, problem.copies)
    M = problem.resolved_M()
    grid = grid or default_gridpoints(sym.K, sym.N)
    pom = srm(sample_states(sym, M))
    quad = average_score_quadrature(problem.state, sym, pom, sample_angles(M), grid)
    derived["quadrature_score"] = quad
    derived["quadrature_gridpoints"] = grid
    derived["abs_difference"] = abs(quad - derived["max_average_score"])
    return {"command": "score", "inputs": problem.echo(), "derived": derived}, EXIT_OK


def cmd_certify(problem: ProblemSpec, strategy: str) -> tuple[dict, int]:
    sym, d, derived = _derived(problem, problem.copies)
    M = problem.resolved_M()
    W = score_operators_closed(sym, d, M)
    if strategy == "plain":
        pom = srm(sample_states(sym, M))
        expected = Verdict.GLOBAL_MAXIMUM
    else:
        pom = srm_reciprocal(sym, M)
        expected = Verdict.GLOBAL_MINIMUM if sym.K == 1 else None
    rep = certify(W, pom, problem.tolerance)
    cert = rep.as_dict()
    cert["strategy"] = strategy
    cert["expected_verdict"] = expected.value if expected else None
    code = EXIT_OK if expected is None or rep.verdict is expected else EXIT_VERDICT
    doc = {"command": "certify", "inputs": problem.echo(), "derived": derived, "certification": cert}
    return doc, code


def cmd_simulate(problem: ProblemSpec) -> tuple[dict, int]:
    if problem.trials is None:
        raise ValidationError("simulate needs 'trials' in the spec")
    sym, d, derived = _derived(problem, problem.copies)
    seed = 0 if problem.seed is None else problem.seed
    summ = estimator.simulate(problem.state, problem.copies, problem.resolved_M(), problem.trials, seed)
    target = derived["max_average_score"]
    sim = summ.as_dict()
    sim["z_score"] = (summ.mean_score - target) / summ.std_error if summ.std_error > 0 else None
    sim["abs_difference"] = abs(summ.mean_score - target)
    if problem.trials == 1:
        rec = estimator.trial_records(problem.state, problem.copies, problem.resolved_M(), 1, seed)[0]
        sim["record"] = {
            "theta_true": rec.theta_true,
            "outcome": rec.outcome,
            "theta_guess": rec.theta_guess,
            "fidelity": rec.fidelity,
        }
    return {"command": "simulate", "inputs": problem.echo(), "derived": derived, "simulation": sim}, EXIT_OK


def cmd_circuit(problem: ProblemSpec, n: int | None, grid: int | None) -> tuple[dict, int]:
    N = problem.copies if n is None else n
    lay = circuits.pipeline_layout(N)
    sym, d, derived = _derived(problem, N)
    pom = circuits.abstract_pom(N)
    pipe = circuits.pipeline_circuit(N)
    U = pipe.unitary()
    deviation = 0.0
    for theta in sample_angles(CIRCUIT_GRID):
        p_circ = circuits.pipeline_distribution(problem.state, N, theta, U)
        p_abs = estimator.outcome_distribution(pom, sym, theta)
        deviation = max(deviation, float(np.max(np.abs(p_circ - p_abs))))
    score = circuits.pipeline_average_score(problem.state, N, grid)
    parts = circuits.circuits_for(N)
    doc = {
        "command": "circuit",
        "inputs": problem.echo(),
        "derived": derived,
        "circuit": {
            "copies": N,
            "outcomes": lay.outcomes,
            "measured_qubits": list(lay.measured),
            "listings": {name: c.listing() for name, c in parts.items()},
            "unitarity_deviation": {name: circuits.unitarity_deviation(c.unitary()) for name, c in parts.items()},
            "theta_grid": CIRCUIT_GRID,
            "max_pom_deviation": deviation,
            "pipeline_average_score": score,
            "score_abs_difference": abs(score - derived["max_average_score"]),
        },
    }
    return doc, EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="phase-srm", description="Optimal phase estimation with square-root measurements."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--spec", required=True, type=Path, help="problem spec (JSON)")
        p.add_argument("--out", type=Path, help="write the report here instead of stdout")

    p = sub.add_parser("score", help="closed-form maximum score with quadrature cross-check")
    common(p)
    p.add_argument("--grid", type=int, help="quadrature gridpoints")
    p = sub.add_parser("certify", help="check global optimality conditions")
    common(p)
    p.add_argument("--strategy", choices=("plain", "reciprocal"), default="plain")
    p = sub.add_parser("simulate", help="Monte Carlo run of the estimation protocol")
    common(p)
    p = sub.add_parser("circuit", help="gate-level qubit pipeline check")
    common(p)
    p.add_argument("--n", type=int, help="copies (2, 3 or 4); defaults to the spec's")
    p.add_argument("--grid", type=int, help="quadrature gridpoints for the score")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        text = args.spec.read_text()
    except OSError as err:
        print(f"error: cannot read spec: {err}", file=sys.stderr)
        return EXIT_PARSE
    try:
        problem = parse_problem(text)
        if args.command == "score":
            doc, code = cmd_score(problem, args.grid)
        elif args.command == "certify":
            doc, code = cmd_certify(problem, args.strategy)
        elif args.command == "simulate":
            doc, code = cmd_simulate(problem)
        else:
            doc, code = cmd_circuit(problem, args.n, args.grid)
    except SpecParseError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_PARSE
    except (ValidationError, PhaseSRMError) as err:
        print(f"error: {type(err).__name__}: {err}", file=sys.stderr)
        return EXIT_INVALID
    out = dump_report(doc)
    if args.out:
        args.out.write_text(out)
    else:
        sys.stdout.write(out)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
