"""Command-line entry point.

Exit codes: 0 success, 1 inequality violation or failed contract, 2 usage or
input error.  All randomness is driven by ``--seed`` (default: the
``LINFJUNTA_SEED`` environment variable, else 0).
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field
from typing import Optional, Sequence

from . import __version__
from .geometry import hamming_junta_map, random_separated_boxes, separated_junta_sets
from .inequalities import DEFAULT_SUITE, GAUSSIAN, SPECTRAL, run_suite
from .junta import best_junta_oracle, extract_junta, influences, select_parameters
from .quadrature import QuadratureSpec
from .report import emit_report
from .specs import load_boxset, load_function, load_map

SEED_ENV = "LINFJUNTA_SEED"
CONVENTIONS = f"{SPECTRAL} | {GAUSSIAN}"


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    inputs: dict = field(default_factory=dict)
    seed: int = 0
    samples: Optional[int] = None
    grid: Optional[int] = None
    epsilon: Optional[float] = None
    t: Optional[float] = None
    eta: Optional[float] = None
    mode: str = "empirical"
    output: Optional[str] = None
    fmt: str = "json"
    extra: dict = field(default_factory=dict)

    def quad(self, dim: int) -> Optional[QuadratureSpec]:
        if self.grid is not None:
            return QuadratureSpec.grid(self.grid, self.seed)
        if self.samples is not None:
            return QuadratureSpec.mc(self.samples, self.seed)
        return None

    def header(self) -> dict:
        return {"tool": f"linfjunta {__version__}", "command": self.command,
                "seed": self.seed, "conventions": CONVENTIONS}


def _default_seed() -> int:
    raw = os.environ.get(SEED_ENV, "0")
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{SEED_ENV} must be an integer, got {raw!r}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None,
                        help=f"random seed (default ${SEED_ENV} or 0)")
    common.add_argument("--out", default=None, help="output path (default stdout)")
    common.add_argument("--format", choices=("json", "csv"), default="json", dest="fmt")
    q = common.add_mutually_exclusive_group()
    q.add_argument("--grid", type=int, help="tensor grid with this many points per axis")
    q.add_argument("--samples", type=int, help="Monte-Carlo with this many samples")

    p = argparse.ArgumentParser(prog="linfjunta", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"linfjunta {__version__}")
    sub = p.add_subparsers(dest="command", metavar="command")

    s = sub.add_parser("influences", parents=[common], help="per-coordinate gradient mass")
    s.add_argument("--fn", required=True, help="function spec (JSON)")

    s = sub.add_parser("junta", parents=[common], help="extract a junta approximation")
    s.add_argument("--fn", required=True)
    s.add_argument("--epsilon", type=float, required=True)
    m = s.add_mutually_exclusive_group()
    m.add_argument("--mode", choices=("certified", "empirical"))
    m.add_argument("--eta", type=float, help="fixed threshold (empirical schedule)")

    s = sub.add_parser("verify", parents=[common], help="run an inequality suite")
    s.add_argument("--suite", help="suite definition (JSON); default: built-in suite")

    s = sub.add_parser("hamming", parents=[common], help="junta approximation of a vector map")
    s.add_argument("--map", required=True, help="vector map spec (JSON)")
    s.add_argument("--epsilon", type=float, required=True)

    s = sub.add_parser("isoperimetry", parents=[common], help="separated junta level sets")
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--sets", nargs=2, metavar=("A", "B"), help="two box-set files (JSON)")
    g.add_argument("--random-dim", type=int, help="draw a random separated pair in this dimension")
    s.add_argument("--delta", type=float, required=True)
    s.add_argument("--epsilon", type=float, required=True)
    s.add_argument("--mc-samples", type=int, default=2**13, help="samples for the loss estimates")

    s = sub.add_parser("oracle", parents=[common], help="exhaustive best junta of size <= p")
    s.add_argument("--fn", required=True)
    s.add_argument("--p", type=int, required=True)
    return p


def config_from_args(args: argparse.Namespace) -> RunConfig:
    seed = args.seed if args.seed is not None else _default_seed()
    cfg = RunConfig(args.command, seed=seed, samples=args.samples, grid=args.grid,
                    output=args.out, fmt=args.fmt)
    for key in ("fn", "suite", "map", "sets"):
        if getattr(args, key, None) is not None:
            cfg.inputs[key] = getattr(args, key)
    cfg.epsilon = getattr(args, "epsilon", None)
    cfg.eta = getattr(args, "eta", None)
    cfg.mode = getattr(args, "mode", None) or "empirical"
    for key in ("p", "delta", "random_dim", "mc_samples"):
        if getattr(args, key, None) is not None:
            cfg.extra[key] = getattr(args, key)
    if cfg.grid is not None and cfg.grid < 1 or cfg.samples is not None and cfg.samples < 1:
        raise UsageError("--grid and --samples must be positive")
    if cfg.epsilon is not None and not 0 < cfg.epsilon <= 2:
        raise UsageError("epsilon must lie in (0, 2]")
    if cfg.eta is not None and not cfg.eta > 0:
        raise UsageError("eta must be positive")
    return cfg


# -- subcommands -------------------------------------------------------------

def cmd_influences(cfg):
    f = load_function(cfg.inputs["fn"])
    prof = influences(f, cfg.quad(f.dim))
    return [{"dim": f.dim, **prof.to_dict(), "total": prof.total.value,
             "total_half_width": prof.total.half_width}], True


def cmd_junta(cfg):
    f = load_function(cfg.inputs["fn"])
    sch = select_parameters(cfg.epsilon, cfg.mode, cfg.eta)
    approx = extract_junta(f, cfg.epsilon, sch, cfg.quad(f.dim))
    rec = approx.to_report()
    ok = approx.l1_error.value < cfg.epsilon if cfg.mode == "empirical" else True
    rec["contract_met"] = bool(ok)
    return [rec], ok


def cmd_verify(cfg):
    suite = DEFAULT_SUITE
    if "suite" in cfg.inputs:
        with open(cfg.inputs["suite"]) as fh:
            suite = json.load(fh)
    recs, ok = [], True
    for rep in run_suite(suite, cfg.seed):
        recs.append(rep.to_dict())
        ok = ok and rep.passed
    return recs, ok


def cmd_hamming(cfg):
    F = load_map(cfg.inputs["map"])
    J = hamming_junta_map(F, cfg.epsilon, cfg.quad(F.N))
    rec = {**F.to_dict(), **J.to_dict()}
    ok = J.selection_ok and J.total_error.value < cfg.epsilon
    rec["contract_met"] = bool(ok)
    return [rec], ok


def cmd_isoperimetry(cfg):
    if "sets" in cfg.inputs:
        A, B = (load_boxset(p) for p in cfg.inputs["sets"])
    else:
        A, B = random_separated_boxes(cfg.extra["random_dim"], cfg.extra["delta"], cfg.seed)
    quad = cfg.quad(A.dim)
    if quad is not None and quad.scheme != "grid":
        raise UsageError("isoperimetry needs a grid (use --grid)")
    S, _, rep = separated_junta_sets(A, B, cfg.extra["delta"], cfg.epsilon, quad,
                                     samples=cfg.extra["mc_samples"], seed=cfg.seed)
    return [{"A": A.boxes, "B": B.boxes, **rep.to_dict()}], rep.passed


def cmd_oracle(cfg):
    f = load_function(cfg.inputs["fn"])
    S, err = best_junta_oracle(f, cfg.extra["p"], cfg.quad(f.dim))
    return [{"p": cfg.extra["p"], "S": list(S), "l1_error": err.value,
             "half_width": err.half_width}], True


COMMANDS = {
    "influences": cmd_influences,
    "junta": cmd_junta,
    "verify": cmd_verify,
    "hamming": cmd_hamming,
    "isoperimetry": cmd_isoperimetry,
    "oracle": cmd_oracle,
}


def dispatch(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.command is None:
        parser.print_usage(sys.stderr)
        return 2
    try:
        cfg = config_from_args(args)
        records, ok = COMMANDS[cfg.command](cfg)
        emit_report(records, cfg.fmt, cfg.output, header=cfg.header())
    except BrokenPipeError:
        # reader went away (e.g. piped into head); not an input error
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
    except (UsageError, ValueError, KeyError, TypeError, OSError) as exc:
        print(f"linfjunta {args.command}: error: {exc}", file=sys.stderr)
        return 2
    return 0 if ok else 1


def main() -> None:
    sys.exit(dispatch())


if __name__ == "__main__":
    main()
