"""Command-line front end: ``coolsim run | sweep | predict | validate``.

Exit codes: 0 success, 1 invalid input, 2 runtime/convergence failure,
3 validation failure. Diagnostics go to stderr; the level is taken from
COOLSIM_LOG (error, info or debug).
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields
from typing import Optional, Sequence

import numpy as np

from . import analytics
from .protocols import (
    COMPRESSION_MODES,
    KINDS,
    NOE_ORDERS,
    ConvergenceError,
    CoolingTrace,
    InnerPolicy,
    ProtocolSpec,
    RoundSnapshot,
    fixed_point,
    run,
)
from .state import BathModel

log = logging.getLogger("coolsim")

EXIT_OK, EXIT_INPUT, EXIT_RUNTIME, EXIT_VALIDATION = 0, 1, 2, 3

TRACE_FIELDS = ("round", "qubit", "polarization")
SWEEP_FIELDS = ("protocol", "n", "eps_b", "eps_max_sim", "eps_max_theory", "abs_err",
                "rounds_used", "flag")
DEFAULT_N = {"srg3": 3}


class UsageError(ValueError):
    pass


def fmt(x: float) -> str:
    """Shortest decimal that reads back to the same double."""
    return repr(float(x))


# -- run -----------------------------------------------------------------------------

@dataclass
class RunConfig:
    protocol: str = "srg2"
    n: Optional[int] = None
    eps_b: Optional[float] = None
    rounds: int = 10
    delta_inner: float = 1e-8
    max_inner: int = 200
    nested_inner: bool = False
    compression_mode: str = "subset_three_bit_sort"
    noe_order: str = "cms_first"
    output: Optional[str] = None
    format: str = "csv"

    def spec(self) -> ProtocolSpec:
        n = self.n if self.n is not None else DEFAULT_N.get(self.protocol, 2)
        inner = InnerPolicy(self.delta_inner, self.max_inner, not self.nested_inner)
        return ProtocolSpec(self.protocol, n, self.rounds, inner, self.compression_mode,
                            self.noe_order)

    def bath(self) -> BathModel:
        if self.eps_b is None:
            raise UsageError("--eps-b is required")
        return BathModel(self.eps_b)


def trace_rows(trace: CoolingTrace) -> list[dict]:
    return [{"round": snap.k, "qubit": q, "polarization": eps}
            for snap in trace.rounds
            for q, eps in enumerate(snap.polarizations, start=1)]


def write_trace(trace: CoolingTrace, stream, fmt_name: str = "csv",
                meta: Optional[dict] = None):
    rows = trace_rows(trace)
    if fmt_name == "json":
        doc = dict(meta or {}, protocol=trace.protocol, rows=rows)
        stream.write(json.dumps(doc, indent=1) + "\n")
        return
    stream.write(",".join(TRACE_FIELDS) + "\n")
    for row in rows:
        stream.write(f"{row['round']},{row['qubit']},{fmt(row['polarization'])}\n")


def read_trace_rows(stream, fmt_name: str = "csv") -> list[dict]:
    if fmt_name == "json":
        return json.load(stream)["rows"]
    reader = csv.DictReader(stream)
    if tuple(reader.fieldnames or ()) != TRACE_FIELDS:
        raise ValueError(f"unexpected trace header {reader.fieldnames}")
    return [{"round": int(r["round"]), "qubit": int(r["qubit"]),
             "polarization": float(r["polarization"])} for r in reader]


def trace_from_rows(protocol: str, rows: Sequence[dict]) -> CoolingTrace:
    """Rebuild the per-round snapshots (the terminal state is not stored)."""
    by_round: dict[int, list[tuple[int, float]]] = {}
    for row in rows:
        by_round.setdefault(int(row["round"]), []).append((int(row["qubit"]), float(row["polarization"])))
    snaps = []
    for k in sorted(by_round):
        pols = [eps for _, eps in sorted(by_round[k])]
        snaps.append(RoundSnapshot(k, tuple(pols)))
    return CoolingTrace(protocol, tuple(snaps), None)


def cmd_run(cfg: RunConfig) -> int:
    spec, bath = cfg.spec(), cfg.bath()
    if cfg.format not in ("csv", "json"):
        raise UsageError(f"unknown format {cfg.format!r}")
    trace = run(spec, bath)
    meta = {"n": spec.n, "eps_b": bath.eps_b}
    _emit(cfg.output, lambda fh: write_trace(trace, fh, cfg.format, meta))
    return EXIT_OK


def _emit(path: Optional[str], writer):
    if path in (None, "-"):
        writer(sys.stdout)
        return
    with open(path, "w", newline="") as fh:
        writer(fh)


# -- sweep ---------------------------------------------------------------------------

def parse_grid(text: str) -> list[float]:
    try:
        start, stop, count = text.split(":")
        start, stop, count = float(start), float(stop), int(count)
    except ValueError:
        raise UsageError(f"grid must be start:stop:count, got {text!r}") from None
    if count < 1:
        raise UsageError("grid count must be >= 1")
    return [float(x) for x in np.linspace(start, stop, count)]


def theory_value(spec: ProtocolSpec, eps_b: float) -> float:
    kind, n = spec.kind, spec.n
    if kind in ("srg2", "srg3", "srgn"):
        return analytics.predict_sr_asymptote(n, eps_b)
    if kind == "noe":
        return analytics.predict_noe_asymptote(eps_b)
    if kind == "gnoe":
        return analytics.predict_generalized_noe(n, eps_b)
    if kind == "ppa":
        return analytics.predict_ppa_asymptote(n, eps_b)
    return analytics.noe_hbac_coefficients(n, spec.compression_mode)[0] * eps_b


def sweep_cell(args) -> dict:
    spec, eps_b, tol, max_rounds = args
    row = {"protocol": spec.kind, "n": spec.n, "eps_b": eps_b}
    theory = theory_value(spec, eps_b)
    try:
        res = fixed_point(spec, eps_b, tol, max_rounds)
        sim, used, flag = res.eps_inf, res.rounds_used, "ok"
    except ConvergenceError as exc:
        log.info("%s", exc)
        sim, used, flag = exc.eps, exc.rounds_used, "nonconverged"
    row.update(eps_max_sim=sim, eps_max_theory=theory, abs_err=abs(sim - theory),
               rounds_used=used, flag=flag)
    return row


def sweep_specs(protocols: Sequence[str], ns: Sequence[int], compression_mode: str,
                inner: InnerPolicy) -> list[ProtocolSpec]:
    specs = []
    for kind in protocols:
        for n in ns:
            try:
                specs.append(ProtocolSpec(kind, n, 0, inner, compression_mode))
            except ValueError as exc:
                log.info("skipping %s with n=%s: %s", kind, n, exc)
    return specs


def cmd_sweep(protocols: Sequence[str], ns: Sequence[int], grid: Sequence[float],
              tol: float = 1e-12, max_rounds: int = 100_000, jobs: int = 1,
              compression_mode: str = "subset_three_bit_sort",
              inner: InnerPolicy = InnerPolicy()) -> list[dict]:
    for kind in protocols:
        if kind not in KINDS:
            raise UsageError(f"unknown protocol {kind!r}")
    for eps in grid:
        BathModel(eps)
    specs = sweep_specs(protocols, ns, compression_mode, inner)
    if not specs:
        raise UsageError("no valid (protocol, n) combination in the sweep")
    cells = [(spec, eps, tol, max_rounds) for spec in specs for eps in grid]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(sweep_cell, cells))
    else:
        rows = [sweep_cell(c) for c in cells]
    rows.sort(key=lambda r: (r["protocol"], r["n"], r["eps_b"]))
    return rows


def write_sweep(rows: Sequence[dict], stream, fmt_name: str = "csv"):
    if fmt_name == "json":
        stream.write(json.dumps({"rows": list(rows)}, indent=1) + "\n")
        return
    stream.write(",".join(SWEEP_FIELDS) + "\n")
    for r in rows:
        stream.write(",".join([
            r["protocol"], str(r["n"]), fmt(r["eps_b"]), fmt(r["eps_max_sim"]),
            fmt(r["eps_max_theory"]), fmt(r["abs_err"]), str(r["rounds_used"]), r["flag"],
        ]) + "\n")


# -- predict -------------------------------------------------------------------------

def cmd_predict(formula: str, n: Optional[int], eps_b: float, k: Optional[float] = None,
                mode: str = "exact", compression_mode: str = "subset_three_bit_sort") -> str:
    pred = analytics.predict(formula, n, eps_b, k, mode, compression_mode)
    return f"{pred.value:.12g}"


# -- validate ------------------------------------------------------------------------

def cmd_validate(seed: int = 0, corrupt_kraus: bool = False, stream=None) -> int:
    from .validation import run_checks

    stream = stream or sys.stdout
    results = run_checks(seed, corrupt_kraus=corrupt_kraus)
    for res in results:
        stream.write(f"{'PASS' if res.passed else 'FAIL'} {res.name}: {res.detail}\n")
    failed = sum(not r.passed for r in results)
    stream.write(f"{len(results) - failed}/{len(results)} checks passed\n")
    return EXIT_OK if failed == 0 else EXIT_VALIDATION


# -- argument handling ---------------------------------------------------------------

def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from None


def _str_list(text: str) -> list[str]:
    return [x.strip() for x in text.split(",") if x.strip()]


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="coolsim", description="Heat-bath algorithmic cooling simulator")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def inner_flags(p):
        p.add_argument("--delta-inner", type=float, help="relative gap for nested preparations")
        p.add_argument("--max-inner", type=int, help="round cap for nested preparations")
        p.add_argument("--nested-inner", action="store_true", default=None,
                       help="rerun nested preparations every round instead of reusing them")
        p.add_argument("--compression-mode", choices=COMPRESSION_MODES)

    p = sub.add_parser("run", help="run one protocol and write its trace")
    p.add_argument("--config", help="JSON file with the same keys as the flags")
    p.add_argument("--protocol", choices=KINDS)
    p.add_argument("--n", type=int)
    p.add_argument("--eps-b", type=float)
    p.add_argument("--rounds", type=int)
    p.add_argument("--noe-order", choices=NOE_ORDERS)
    p.add_argument("--output", "-o")
    p.add_argument("--format", choices=("csv", "json"))
    inner_flags(p)

    p = sub.add_parser("sweep", help="fixed points over a grid of bath polarizations")
    p.add_argument("--protocols", required=True, type=_str_list, help="e.g. srg2,noe,ppa")
    p.add_argument("--n", default=[2], type=_int_list, help="e.g. 2,3,4")
    p.add_argument("--grid", required=True, type=parse_grid, help="start:stop:count")
    p.add_argument("--tol", type=float, default=1e-12)
    p.add_argument("--max-rounds", type=int, default=100_000)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--output", "-o")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    inner_flags(p)

    p = sub.add_parser("predict", help="evaluate a closed-form prediction")
    p.add_argument("--formula", required=True, choices=analytics.FORMULAS)
    p.add_argument("--n", type=int)
    p.add_argument("--eps-b", type=float, required=True)
    p.add_argument("--k", type=float)
    p.add_argument("--mode", choices=("exact", "low_pol"), default="exact")
    p.add_argument("--compression-mode", choices=COMPRESSION_MODES,
                   default="subset_three_bit_sort")

    p = sub.add_parser("validate", help="run the oracle cross-checks")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--corrupt-kraus", action="store_true", help=argparse.SUPPRESS)
    return parser


def _run_config(args) -> RunConfig:
    values = {}
    if args.config:
        try:
            with open(args.config) as fh:
                raw = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from None
        known = {f.name for f in fields(RunConfig)}
        for key, val in raw.items():
            key = key.replace("-", "_")
            if key not in known:
                raise UsageError(f"unknown config key {key!r}")
            values[key] = val
    for f in fields(RunConfig):
        flag = getattr(args, f.name, None)
        if flag is not None:
            values[f.name] = flag
    return RunConfig(**values)


def _inner_from(args) -> InnerPolicy:
    default = InnerPolicy()
    return InnerPolicy(
        args.delta_inner if args.delta_inner is not None else default.delta_inner,
        args.max_inner if args.max_inner is not None else default.max_inner,
        not args.nested_inner,
    )


def _setup_logging():
    level = os.environ.get("COOLSIM_LOG", "error").lower()
    levels = {"error": logging.ERROR, "info": logging.INFO, "debug": logging.DEBUG}
    logging.basicConfig(stream=sys.stderr, level=levels.get(level, logging.ERROR),
                        format="%(levelname)s %(name)s: %(message)s")


def main(argv: Optional[Sequence[str]] = None) -> int:
    _setup_logging()
    try:
        args = build_parser().parse_args(argv)
        if args.command == "run":
            return cmd_run(_run_config(args))
        if args.command == "sweep":
            rows = cmd_sweep(args.protocols, args.n, args.grid, args.tol, args.max_rounds,
                             args.jobs, args.compression_mode or "subset_three_bit_sort",
                             _inner_from(args))
            _emit(args.output, lambda fh: write_sweep(rows, fh, args.format))
            return EXIT_OK
        if args.command == "predict":
            print(cmd_predict(args.formula, args.n, args.eps_b, args.k, args.mode,
                              args.compression_mode))
            return EXIT_OK
        return cmd_validate(args.seed, args.corrupt_kraus)
    except (UsageError, ValueError, TypeError) as exc:
        print(f"coolsim: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ConvergenceError, OSError, RuntimeError) as exc:
        print(f"coolsim: error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
