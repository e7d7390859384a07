"""Command-line front end.

Exit codes: 0 success, 1 failed axiom check, 2 configuration or parse error,
3 numeric failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path

from .chain import RNG_ALGORITHM, correlation_table, sample_path
from .copula import check_axioms, parse_copula
from .errors import (
    ConfigurationError,
    DegenerateFunctionError,
    InvalidEnvelopeError,
    InvalidParameterError,
    NumericFailure,
)
from .metrics import mixing_report, rho_n, theorem2_bound
from .mh import build_model, certify, mh_transition_matrix
from .transition import discretize

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3

log = logging.getLogger("copula_mixing")


@dataclass
class RunConfig:
    command: str
    copula_spec: str | None = None
    grid_n: int = 200
    lags: list[int] = field(default_factory=lambda: [1, 2, 3, 4, 5])
    seed: int = 0
    output_path: str = "-"
    format: str = "json"

    def __post_init__(self):
        if self.grid_n < 2:
            raise ConfigurationError("--grid must be >= 2")
        if not self.lags or min(self.lags) < 1:
            raise ConfigurationError("--lags must be a nonempty list of positive integers")
        if self.format not in ("json", "csv"):
            raise ConfigurationError("--format must be json or csv")


def _lags(text: str) -> list[int]:
    try:
        return [int(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad lag list {text!r}") from None


def _emit(text: str, path: str) -> None:
    if path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _dump(obj, path: str) -> None:
    _emit(json.dumps(obj, indent=2) + "\n", path)


def cmd_axioms(cfg: RunConfig) -> int:
    report = check_axioms(parse_copula(cfg.copula_spec), cfg.grid_n)
    _dump({"copula": cfg.copula_spec, **report.to_dict()}, cfg.output_path)
    return EXIT_OK if report.passed else 1


def cmd_mixing(cfg: RunConfig) -> int:
    copula = parse_copula(cfg.copula_spec)
    Q = discretize(copula, cfg.grid_n)
    if cfg.format == "csv":
        _emit(Q.to_csv(), cfg.output_path)
        return EXIT_OK
    report = mixing_report(Q, cfg.lags, copula)
    _dump({"copula": copula.spec, **report.to_dict()}, cfg.output_path)
    return EXIT_OK


def cmd_mh(cfg: RunConfig, target: str, proposal: str) -> int:
    model = build_model(target, proposal)
    cert = certify(model)
    Q = mh_transition_matrix(model, cfg.grid_n)
    if cfg.format == "csv":
        _emit(Q.to_csv(), cfg.output_path)
        return EXIT_OK
    report = mixing_report(Q, cfg.lags)
    report.rho1_bound = cert.rho1_bound
    _dump({"target": target, "proposal": proposal,
           "certification": cert.to_dict(), "mixing": report.to_dict()}, cfg.output_path)
    return EXIT_OK


def cmd_simulate(cfg: RunConfig, steps: int, x0: float, path_file: str | None) -> int:
    copula = parse_copula(cfg.copula_spec)
    path = sample_path(copula, x0, steps, cfg.seed)
    if path_file:
        path.to_csv(path_file)
    if cfg.format == "csv":
        _emit(path.to_csv(), cfg.output_path)
        return EXIT_OK
    Q = discretize(copula, cfg.grid_n)
    lags = [k for k in cfg.lags if k < len(path.states) / 10] or [1]
    out = {
        "copula": copula.spec,
        "seed": cfg.seed,
        "steps": steps,
        "x0": x0,
        "rng": RNG_ALGORITHM,
        "grid_n": cfg.grid_n,
        "lags": lags,
        "corr": {},
        "operator_rho": {},
        "max_excess": {},
    }
    for k in lags:
        table = correlation_table(path, k)
        rho = rho_n(Q, k)
        out["corr"][str(k)] = table
        out["operator_rho"][str(k)] = rho
        out["max_excess"][str(k)] = max(abs(c) for c in table.values()) - rho
    _dump(out, cfg.output_path)
    return EXIT_OK


def cmd_bound(cfg: RunConfig, eps1: float, eps2: float) -> int:
    _dump({"eps1_int": eps1, "eps2_int": eps2, "rho1_bound": theorem2_bound(eps1, eps2)},
          cfg.output_path)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="copula-mixing",
        description="Mixing coefficients of copula-based and Metropolis-Hastings Markov chains.",
    )
    parser.add_argument("--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, copula=True):
        if copula:
            p.add_argument("--copula", required=True, help="e.g. frechet:a=0.3,b=0.2")
        p.add_argument("--grid", type=int, default=200)
        p.add_argument("--lags", type=_lags, default=[1, 2, 3, 4, 5])
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--output", default="-", help="file path, or - for stdout")
        p.add_argument("--format", choices=["json", "csv"], default="json")

    common(sub.add_parser("axioms", help="check copula axioms on a grid"))
    common(sub.add_parser("mixing", help="rho/beta/phi of the discretized chain"))
    p = sub.add_parser("mh", help="certify and analyze a Metropolis-Hastings chain")
    common(p, copula=False)
    p.add_argument("--target", required=True)
    p.add_argument("--proposal", required=True)
    p = sub.add_parser("simulate", help="simulate a copula chain")
    common(p)
    p.add_argument("--steps", type=int, default=100_000)
    p.add_argument("--x0", type=float, default=0.5)
    p.add_argument("--path-file", default=None, help="also write the path CSV here")
    p = sub.add_parser("bound", help="evaluate 1 - (eps1 + eps2)/2")
    common(p, copula=False)
    p.add_argument("--eps1-int", type=float, required=True)
    p.add_argument("--eps2-int", type=float, required=True)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = RunConfig(args.command, getattr(args, "copula", None), args.grid, args.lags,
                        args.seed, args.output, args.format)
        if args.command == "axioms":
            return cmd_axioms(cfg)
        if args.command == "mixing":
            return cmd_mixing(cfg)
        if args.command == "mh":
            return cmd_mh(cfg, args.target, args.proposal)
        if args.command == "simulate":
            return cmd_simulate(cfg, args.steps, args.x0, args.path_file)
        return cmd_bound(cfg, args.eps1_int, args.eps2_int)
    except (ConfigurationError, InvalidParameterError, InvalidEnvelopeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericFailure, DegenerateFunctionError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
