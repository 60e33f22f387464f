"""Command-line front door.

Subcommands: `measure` runs the bipartite or multipartite solver on a state
from a file, inline ket text, or a named family; `generate` and `random`
write state files; `parse` validates ket text and echoes the state document.
Results go to stdout, diagnostics to stderr. Exit status: 0 success, 1 input
error, 2 solver non-convergence.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import __version__
from .bipartite import DEFAULT_MAX_ITERS, DEFAULT_TOL, bipartite_measure
from .errors import (
    KetSyntaxError,
    NoConvergenceError,
    StateFormatError,
    ZeroContractionError,
)
from .ketparse import parse_state
from .multipartite import DEFAULT_MAX_SWEEPS, DEFAULT_RESTARTS, als_measure
from .states import (
    PureState,
    dumps_state,
    load_state,
    make_named_state,
    make_perm_phase_state,
    random_state,
)


class _CliError(Exception):
    """Input-level failure; maps to exit status 1."""


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        raise _CliError(message)


def _build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(prog="entmeasure", description=__doc__)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)

    measure = commands.add_parser("measure", help="measure entanglement of a state")
    source = measure.add_mutually_exclusive_group(required=True)
    source.add_argument("--state", metavar="FILE", help="state file to read")
    source.add_argument("--ket", metavar="TEXT", help="inline ket expression")
    source.add_argument("--named", metavar="NAME", help="canonical state name")
    measure.add_argument("--n", type=int, default=None, help="size for ghz/w names")
    measure.add_argument(
        "--split",
        metavar="I,J,...",
        default=None,
        help="left-group subsystem indices (bipartite mode; default 0)",
    )
    measure.add_argument(
        "--mode",
        choices=("auto", "bipartite", "multipartite"),
        default="auto",
        help="auto picks bipartite for 2 subsystems, multipartite otherwise",
    )
    measure.add_argument("--method", choices=("jacobi", "power"), default="jacobi")
    measure.add_argument("--tol", type=float, default=DEFAULT_TOL)
    measure.add_argument("--max-iters", type=int, default=DEFAULT_MAX_ITERS)
    measure.add_argument("--max-sweeps", type=int, default=DEFAULT_MAX_SWEEPS)
    measure.add_argument("--restarts", type=int, default=DEFAULT_RESTARTS)
    measure.add_argument("--seed", type=int, default=0)
    measure.add_argument("--format", choices=("text", "json"), default="text")
    measure.add_argument(
        "--factors", action="store_true", help="include the optimal factors in the output"
    )
    measure.add_argument(
        "--no-normalize",
        action="store_true",
        help="measure the state as given instead of normalizing on ingestion",
    )

    generate = commands.add_parser("generate", help="write a canonical state file")
    kind = generate.add_mutually_exclusive_group(required=True)
    kind.add_argument("--named", metavar="NAME", help="canonical state name")
    kind.add_argument(
        "--perm-phase",
        action="store_true",
        help="seeded random permutation-phase state on dims [n, n]",
    )
    generate.add_argument("--n", type=int, default=None)
    generate.add_argument("--seed", type=int, default=0)
    generate.add_argument("--output", metavar="FILE", default=None)

    rand = commands.add_parser("random", help="write a seeded random state file")
    rand.add_argument("--dims", metavar="D,D,...", required=True)
    rand.add_argument("--seed", type=int, default=0)
    rand.add_argument("--output", metavar="FILE", default=None)

    parse_cmd = commands.add_parser("parse", help="validate ket text, echo the state file")
    parse_cmd.add_argument("--ket", metavar="TEXT", required=True)
    parse_cmd.add_argument("--normalize", action="store_true")
    parse_cmd.add_argument("--output", metavar="FILE", default=None)
    return parser


def _parse_index_list(text: str, what: str) -> list[int]:
    try:
        return [int(piece) for piece in text.split(",") if piece.strip() != ""]
    except ValueError as exc:
        raise _CliError(f"could not parse {what} {text!r}: {exc}") from exc


def _load_input_state(args) -> PureState:
    if args.state is not None:
        try:
            return load_state(args.state)
        except OSError as exc:
            raise _CliError(f"cannot read state file: {exc}") from exc
    if args.ket is not None:
        return parse_state(args.ket)
    try:
        return make_named_state(args.named, args.n)
    except ValueError as exc:
        raise _CliError(str(exc)) from exc


def _complex_pairs(vector: np.ndarray) -> list[list[float]]:
    return [[float(z.real), float(z.imag)] for z in vector]


def _emit_state(state: PureState, output: str | None) -> None:
    text = dumps_state(state)
    if output is None:
        print(text)
    else:
        with open(output, "w", encoding="utf-8") as handle:
            handle.write(text)
            handle.write("\n")


def _run_measure(args) -> int:
    state = _load_input_state(args)
    n_subsystems = len(state.dims)
    mode = args.mode
    if mode == "auto":
        mode = "bipartite" if n_subsystems == 2 else "multipartite"
    if mode == "multipartite" and args.split is not None:
        raise _CliError("--split applies to bipartite mode only")

    factors_out = None
    if mode == "bipartite":
        split = _parse_index_list(args.split, "--split") if args.split is not None else [0]
        report = bipartite_measure(
            state,
            split,
            method=args.method,
            tol=args.tol,
            max_iters=args.max_iters,
            seed=args.seed,
            normalize_input=not args.no_normalize,
        )
        document = {
            "command": "measure",
            "mode": "bipartite",
            "dims": list(state.dims.dims),
            "split": split,
            "j": report.j,
            "lambda": report.lam,
            "k": report.k,
            "gamma": None,
            "factors": None,
            "diagnostics": {
                "method": report.method,
                "iterations": report.iterations,
                "stationarity_residual": report.stationarity_residual,
                "seed": args.seed,
                "tol": args.tol,
                "max_iters": args.max_iters,
                "normalized": report.normalized,
                "norm_squared": report.norm_squared,
            },
        }
        if args.factors:
            factors_out = [report.u_tilde, report.v_tilde]
        text_lines = [
            "mode = bipartite",
            f"dims = {list(state.dims.dims)}",
            f"split = {split}",
            f"J = {report.j!r}",
            f"lambda = {report.lam!r}",
            f"K = {report.k!r}",
            f"method = {report.method}",
            f"iterations = {report.iterations}",
            f"stationarity_residual = {report.stationarity_residual!r}",
        ]
        exit_status = 0
    else:
        report = als_measure(
            state,
            restarts=args.restarts,
            tol=args.tol,
            max_sweeps=args.max_sweeps,
            seed=args.seed,
            normalize_input=not args.no_normalize,
        )
        document = {
            "command": "measure",
            "mode": "multipartite",
            "dims": list(state.dims.dims),
            "split": None,
            "j": report.j,
            "lambda": None,
            "k": report.gamma,
            "gamma": report.gamma,
            "factors": None,
            "diagnostics": {
                "restarts": report.restarts_used,
                "best_restart": report.best_restart,
                "iterations": report.iterations,
                "fixed_point_residual": report.fixed_point_residual,
                "converged": report.converged,
                "restart_gammas": list(report.restart_gammas),
                "seed": args.seed,
                "tol": args.tol,
                "max_sweeps": args.max_sweeps,
                "normalized": report.normalized,
                "norm_squared": report.norm_squared,
            },
        }
        if args.factors:
            factors_out = list(report.factors)
        text_lines = [
            "mode = multipartite",
            f"dims = {list(state.dims.dims)}",
            f"J = {report.j!r}",
            f"gamma = {report.gamma!r}",
            f"gamma^2 = {report.gamma ** 2!r}",
            f"K = {report.gamma!r}",
            f"restarts = {report.restarts_used}",
            f"best_restart = {report.best_restart}",
            f"iterations = {report.iterations}",
            f"fixed_point_residual = {report.fixed_point_residual!r}",
            f"converged = {report.converged}",
        ]
        exit_status = 0 if any(report.restart_converged) else 2
        if exit_status == 2:
            print(
                "warning: no restart converged; gamma is a lower bound",
                file=sys.stderr,
            )

    if factors_out is not None:
        print(
            "note: factors are gauge- and degeneracy-dependent; states with equal "
            "measure may report different factors",
            file=sys.stderr,
        )
        document["factors"] = [_complex_pairs(vec) for vec in factors_out]
        for index, vec in enumerate(factors_out):
            text_lines.append(f"factor[{index}] = {[str(z) for z in vec]}")

    if args.format == "json":
        print(json.dumps(document, sort_keys=True))
    else:
        print("\n".join(text_lines))
    return exit_status


def _run_generate(args) -> int:
    if args.perm_phase:
        n = args.n
        if n is None:
            raise _CliError("--perm-phase requires --n")
        rng = np.random.default_rng(args.seed)
        perm = [int(p) for p in rng.permutation(n)]
        phases = rng.uniform(0.0, 2.0 * np.pi, size=(n, n))
        state = make_perm_phase_state(n, perm, phases)
    else:
        try:
            state = make_named_state(args.named, args.n)
        except ValueError as exc:
            raise _CliError(str(exc)) from exc
    _emit_state(state, args.output)
    return 0


def _run_random(args) -> int:
    dims = _parse_index_list(args.dims, "--dims")
    try:
        state = random_state(dims, args.seed)
    except ValueError as exc:
        raise _CliError(str(exc)) from exc
    _emit_state(state, args.output)
    return 0


def _run_parse(args) -> int:
    state = parse_state(args.ket, normalize=args.normalize)
    _emit_state(state, args.output)
    return 0


_RUNNERS = {
    "measure": _run_measure,
    "generate": _run_generate,
    "random": _run_random,
    "parse": _run_parse,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return _RUNNERS[args.command](args)
    except _CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except KetSyntaxError as exc:
        print(f"ket syntax error: {exc}", file=sys.stderr)
        return 1
    except StateFormatError as exc:
        print(f"state file error: {exc}", file=sys.stderr)
        return 1
    except (NoConvergenceError, ZeroContractionError) as exc:
        print(f"solver did not converge: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
