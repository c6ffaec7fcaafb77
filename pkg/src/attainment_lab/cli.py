"""``attainment-lab`` command line: analysis reports, CSV series and SVG figures.

Exit codes: 0 success, 2 usage error, 3 non-solvable classification
(AttainmentSuspect or Unbounded), 4 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .attainment import Classification, classify
from .errors import NumericalError, UnsupportedProblemError
from .lp import LpStatus, lp_verify
from .robust import build_canonical
from .solvers import (
    default_schedule,
    direction_error,
    poly_inner,
    poly_outer,
    regularization_path,
    sequence_values,
    theta_grid,
)
from .svg import figure1_svg, figure2_svg

EXIT_OK, EXIT_USAGE, EXIT_NONSOLVABLE, EXIT_NUMERICAL = 0, 2, 3, 4

COMMANDS = ("analyze", "sequence", "regpath", "poly", "figure1")
FORMATS = ("json", "csv", "svg")
DEFAULT_K_MAX = {"analyze": 2**20, "sequence": 1000, "regpath": 2**20, "poly": 10, "figure1": 5}
DEFAULT_SEED = 20240531


def seed_from_env() -> int:
    """Seed for sampling checks: ``ATTAINMENT_LAB_SEED`` or a fixed default."""
    raw = os.environ.get("ATTAINMENT_LAB_SEED", "")
    return int(raw) if raw.strip() else DEFAULT_SEED


@dataclass(frozen=True)
class RunConfig:
    command: str
    n: int = 2
    tol: float = 1e-9
    k_max: int = 1000
    theta_count: int = 16
    include_endpoints: bool = True
    output_dir: str = "."
    formats: tuple[str, ...] = FORMATS
    objective: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ValueError(f"unknown command {self.command!r}")
        if not self.n >= 2:
            raise ValueError("--n must be >= 2")
        if not (self.tol > 0 and math.isfinite(self.tol)):
            raise ValueError("--tol must be a positive number")
        if self.k_max < 1:
            raise ValueError("--k-max must be >= 1")
        if self.theta_count < 1:
            raise ValueError("--theta-count must be >= 1")
        bad = set(self.formats) - set(FORMATS)
        if bad:
            raise ValueError(f"unknown formats: {', '.join(sorted(bad))}")
        if self.objective is not None and len(self.objective) != self.n:
            raise ValueError(f"--objective needs {self.n} entries, got {len(self.objective)}")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["formats"] = list(self.formats)
        d["objective"] = None if self.objective is None else list(self.objective)
        return d


def _bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"expected a boolean, got {text!r}")


def _floats(text: str) -> tuple[float, ...]:
    try:
        vals = tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad float list {text!r}") from exc
    if not vals or not all(math.isfinite(v) for v in vals):
        raise argparse.ArgumentTypeError(f"bad float list {text!r}")
    return vals


def _formats(text: str) -> tuple[str, ...]:
    return tuple(f.strip() for f in text.split(",") if f.strip())


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="attainment-lab", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--n", type=int, default=2, help="dimension of the canonical instance")
    p.add_argument("--tol", type=float, default=1e-9, help="tolerance band for the certificate")
    p.add_argument("--k-max", type=int, default=None, help="largest k (command-specific default)")
    p.add_argument("--theta-count", type=int, default=16, help="largest outer grid size for 'poly'")
    p.add_argument("--include-endpoints", type=_bool, default=True, metavar="BOOL")
    p.add_argument("--objective", type=_floats, default=None, metavar="CSV", help="comma-separated objective")
    p.add_argument("--out", default=".", help="output directory")
    p.add_argument("--formats", type=_formats, default=FORMATS, metavar="LIST", help="subset of json,csv,svg")
    return p


def _num(v: float) -> str:
    return f"{float(v) + 0.0:.17g}"


def _csv(header: str, rows) -> str:
    return header + "\n" + "".join(",".join(r) + "\n" for r in rows)


def _instance(cfg: RunConfig):
    return build_canonical(cfg.n, objective=cfg.objective)


def cmd_analyze(cfg: RunConfig):
    report = classify(_instance(cfg), tol=cfg.tol, config=cfg.to_dict(), schedule=default_schedule(cfg.k_max))
    files = {}
    if "json" in cfg.formats:
        files["analysis.json"] = json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n"
    code = EXIT_NONSOLVABLE if report.classification in (
        Classification.ATTAINMENT_SUSPECT, Classification.UNBOUNDED
    ) else EXIT_OK
    summary = f"classification: {report.classification.value}"
    if report.dual is not None and report.dual.value is not None:
        summary += f"; dual value {report.dual.value:g}"
    return files, code, summary


def cmd_sequence(cfg: RunConfig):
    ks = np.arange(0, cfg.k_max + 1)
    seq = sequence_values(ks)
    rows = []
    for k, x1, x2, f in zip(ks, seq["x1"], seq["x2"], seq["f"]):
        rows.append((str(int(k)), _num(x1), _num(x2), _num(f), _num(direction_error(np.array([x1, x2])))))
    files = {}
    if "csv" in cfg.formats:
        files["sequence.csv"] = _csv("k,x1,x2,f,dir_err", rows)
    return files, EXIT_OK, f"{len(rows)} sequence points, last f = {rows[-1][3]}"


def cmd_regpath(cfg: RunConfig):
    path = regularization_path(_instance(cfg), default_schedule(cfg.k_max))
    files = {}
    if "csv" in cfg.formats:
        rows = [(str(k), _num(e), _num(f), _num(nm), _num(kkt)) for k, e, f, nm, kkt in path.rows()]
        files["regpath.csv"] = _csv("k,epsilon,f,x_norm,kkt", rows)
    if "svg" in cfg.formats:
        files["figure2.svg"] = figure2_svg(path.ks, path.values)
    return files, EXIT_OK, f"{len(path.ks)} regularized solves, final f = {path.values[-1]:.6g}"


def cmd_poly(cfg: RunConfig):
    inst = _instance(cfg)
    c = inst.problem.c
    rows = []
    for K in range(0, cfg.k_max + 1):
        approx = poly_inner(inst, K)
        out = approx.solve(c)
        rows.append(_poly_row("inner", K, approx, c, out))
    for count in range(1, cfg.theta_count + 1):
        approx = poly_outer(inst, theta_grid(count, cfg.include_endpoints))
        out = approx.solve(c)
        rows.append(_poly_row("outer", count, approx, c, out))
    files = {}
    if "csv" in cfg.formats:
        files["poly.csv"] = _csv("kind,size,status,value,verified", rows)
    return files, EXIT_OK, f"{len(rows)} LP solves"


def _poly_row(kind, size, approx, c, out):
    if out.status == LpStatus.OPTIMAL:
        value = _num(out.value)
    else:
        value = "-inf" if out.status == LpStatus.UNBOUNDED else "nan"
    ok = lp_verify(approx.to_lp(c), out)
    return (kind, str(size), out.status.value, value, "true" if ok else "false")


def cmd_figure1(cfg: RunConfig):
    if "svg" not in cfg.formats:
        return {}, EXIT_OK, "svg not requested"
    return {"figure1.svg": figure1_svg(cfg.k_max)}, EXIT_OK, "figure written"


_HANDLERS = {
    "analyze": cmd_analyze,
    "sequence": cmd_sequence,
    "regpath": cmd_regpath,
    "poly": cmd_poly,
    "figure1": cmd_figure1,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = RunConfig(
            command=args.command,
            n=args.n,
            tol=args.tol,
            k_max=DEFAULT_K_MAX[args.command] if args.k_max is None else args.k_max,
            theta_count=args.theta_count,
            include_endpoints=args.include_endpoints,
            output_dir=args.out,
            formats=tuple(args.formats),
            objective=args.objective,
        )
    except ValueError as exc:
        parser.error(str(exc))
    if cfg.command in ("sequence", "poly", "figure1") and cfg.n != 2:
        parser.error(f"'{cfg.command}' is defined for n = 2 only")
    try:
        files, code, summary = _HANDLERS[cfg.command](cfg)
    except (NumericalError, UnsupportedProblemError) as exc:
        print(f"attainment-lab: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    # nothing touches the disk until every computation has finished
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    for name, text in files.items():
        (out / name).write_text(text, encoding="utf-8")
    print(summary)
    return code


if __name__ == "__main__":
    sys.exit(main())
