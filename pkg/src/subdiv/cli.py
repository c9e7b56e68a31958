"""Command-line front end: ``subdiv refine | experiment | export-svg | analyze``."""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .exceptions import RuleDomainError, SubdivisionError
from .experiments import (
    F1,
    F2,
    MONOTONE_DATA1,
    MONOTONE_DATA2,
    ExperimentRecord,
    approximation_table,
    circle_reproduction,
    conic_reproduction,
    monotone_experiment,
)
from .io import append_jsonl, read_csv, write_csv, write_svg
from .linear import FrequencyParameter
from .nonlinear import gamma_eps_branches, refine_S_eps_diff
from .schemes import SCHEME_NAMES, SchemeDescriptor
from .sequence import RefinableSequence, forward_difference

log = logging.getLogger("subdiv")

EXPERIMENTS = ("circle", "conics", "monotone", "approx-table", "delta-bar", "gradient-tables", "contraction")
FORMATS = ("csv", "svg", "jsonl")
CLI_SCHEMES = tuple(s for s in SCHEME_NAMES if s != "mask")
CIRCLE_FAILURE = 1e-3


class CliError(Exception):
    pass


def _formats(text):
    out = [f.strip() for f in text.split(",") if f.strip()]
    bad = [f for f in out if f not in FORMATS]
    if bad:
        raise argparse.ArgumentTypeError(f"unknown format(s) {bad}; choose from {FORMATS}")
    return out


def _add_scheme_args(p):
    p.add_argument("--scheme", default="s-eps", choices=CLI_SCHEMES, help="refinement rule (default s-eps)")
    p.add_argument("--eps", type=float, default=1.0, help="cut-off parameter of s-eps")
    p.add_argument("--gamma-kind", default="zero", choices=("zero", "hyper", "trig"),
                   help="frequency type of the level-dependent schemes")
    p.add_argument("--gamma-mag", type=float, default=0.0, help="frequency modulus, in units of the abscissa")


def _add_common(p, levels=1, formats="csv"):
    p.add_argument("--levels", type=int, default=levels, help="number of refinement steps")
    p.add_argument("--topology", default="open", choices=("open", "periodic"), help="open or closed data")
    p.add_argument("--seed", type=int, default=0, help="seed recorded with randomised runs")
    p.add_argument("--out-dir", type=Path, default=Path("."), help="directory for output files")
    p.add_argument("--format", type=_formats, default=_formats(formats),
                   help="comma-separated outputs among csv, svg, jsonl")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="subdiv", description="Interpolatory subdivision of sequences and polylines.")
    parser.add_argument("--version", action="version", version=f"subdiv {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("refine", help="refine a CSV of values or 2-D points")
    p.add_argument("input", type=Path)
    _add_scheme_args(p)
    _add_common(p)

    p = sub.add_parser("experiment", help="run a named experiment and append a JSON-lines record")
    p.add_argument("name", choices=EXPERIMENTS)
    _add_scheme_args(p)
    _add_common(p, levels=7, formats="csv,jsonl")
    p.add_argument("--n", type=int, default=3, help="circle: number of samples")
    p.add_argument("--u", type=float, default=1e-5, help="circle: phase")
    p.add_argument("--data", type=int, choices=(1, 2), default=1, help="monotone: which data set")
    p.add_argument("--resolution", type=int, default=32, help="delta-bar: grid points per axis")
    p.add_argument("--trials", type=int, default=1000, help="contraction: random sequences")

    p = sub.add_parser("export-svg", help="write 2-D points as an SVG path")
    p.add_argument("input", type=Path)
    p.add_argument("--topology", default="open", choices=("open", "periodic"))
    p.add_argument("--out-dir", type=Path, default=Path("."))
    p.add_argument("--stroke", default="black")

    p = sub.add_parser("analyze", help="smoothness, monotonicity and rho of refined data")
    p.add_argument("input", type=Path)
    _add_scheme_args(p)
    _add_common(p, levels=10, formats="")
    p.add_argument("--order", type=int, default=3, help="order of the differences in the smoothness estimate")
    return parser


def _scheme(args) -> SchemeDescriptor:
    gamma = FrequencyParameter.parse(args.gamma_kind, args.gamma_mag)
    return SchemeDescriptor(args.scheme, eps=args.eps, gamma=gamma)


def _sequences(data, topology):
    make = RefinableSequence.periodic if topology == "periodic" else RefinableSequence.open
    return [make(data[:, c]) for c in range(data.shape[1])]


def _count_law(scheme, topology):
    if topology == "periodic":
        return "n -> 2n"
    return {"t11": "n -> 2n-1", "2pt-gamma": "n -> 2n-1", "r-rule": "n -> 2n-3"}.get(scheme.name, "n -> 2n-5")


def cmd_refine(args) -> int:
    scheme = _scheme(args)
    data = read_csv(args.input)
    seqs = _sequences(data, args.topology)
    branches = [{1: 0, 2: 0, 3: 0} for _ in seqs]
    counts = [len(data)]
    for _ in range(args.levels):
        for c, s in enumerate(seqs):
            if scheme.name == "s-eps":
                b = gamma_eps_branches(s, scheme.eps)
                for k in (1, 2, 3):
                    branches[c][k] += int(np.sum(b == k))
            seqs[c] = scheme.refine(s)
        counts.append(len(seqs[0]))
    out = np.column_stack([s.values for s in seqs]) if args.levels else data
    print(f"points per level: {' -> '.join(map(str, counts))} ({_count_law(scheme, args.topology)})", file=sys.stderr)
    if scheme.name == "s-eps":
        for c, b in enumerate(branches):
            print(f"coordinate {c}: branch 1 (exact) {b[1]}, branch 2 (flat) {b[2]}, branch 3 (default) {b[3]}",
                  file=sys.stderr)
    args.out_dir.mkdir(parents=True, exist_ok=True)
    stem = args.input.stem + "_refined"
    header = ",".join(("x", "y", "z")[: out.shape[1]]) if out.shape[1] <= 3 else None
    if "csv" in args.format:
        log.info("wrote %s", write_csv(args.out_dir / f"{stem}.csv", out, header))
    if "svg" in args.format:
        if out.shape[1] != 2:
            raise CliError("SVG output needs 2-D points; use --format csv for 1-D data")
        write_svg(args.out_dir / f"{stem}.svg", out, closed=args.topology == "periodic")
    if "jsonl" in args.format:
        rec = ExperimentRecord("refine", _params(args, scheme), {"counts": counts, "branches": branches}, args.seed)
        append_jsonl(args.out_dir / "records.jsonl", rec.to_json())
    return 0


def _params(args, scheme):
    return {"scheme": scheme.name, "eps": scheme.eps, "gamma_kind": scheme.gamma.kind,
            "gamma_mag": scheme.gamma.magnitude, "levels": args.levels, "topology": args.topology}


def _run_experiment(args):
    """Returns ``(record, {table_name: (header, rows)})``."""
    from .analysis import NearConstantPositive, contraction_report, delta_bar_scan, gradient_tables

    name, eps, seed = args.name, args.eps, args.seed
    tables = {}
    if name == "circle":
        dev, branches = circle_reproduction(args.n, args.u, eps, args.levels, with_branches=True)
        params = {"n": args.n, "u": args.u, "eps": eps, "levels": args.levels}
        outputs = {"max_radial_deviation": dev, "failed": dev >= CIRCLE_FAILURE, "branches": branches}
    elif name == "conics":
        res = conic_reproduction(eps=eps, levels=args.levels)
        params = {"eps": eps, "levels": args.levels}
        outputs = res
        tables["conics"] = ("scheme,ellipse,hyperbola,parabola",
                            [[s] + [res[k][s] for k in ("ellipse", "hyperbola", "parabola")] for s in ("s-eps", "t22")])
    elif name == "monotone":
        data = MONOTONE_DATA1 if args.data == 1 else MONOTONE_DATA2
        rec = monotone_experiment(data, eps, args.levels)
        rec.seed = seed
        return rec, tables
    elif name == "approx-table":
        params = {"eps": eps, "refine_levels": args.levels, "k_range": [0, 3]}
        outputs = {}
        rows = []
        for fname, F in (("F1", F1), ("F2", F2)):
            for iv in ((-1.0, -0.3), (-0.4, 0.4)):
                tab = approximation_table(F, iv, (0, 3), args.levels, eps)
                outputs[f"{fname} [{iv[0]}, {iv[1]}]"] = [list(r) for r in tab]
                rows += [[fname, iv[0], iv[1], k, e, "" if o is None else o] for k, e, o in tab]
        tables["approx_table"] = ("function,a,b,k,E_k,order", rows)
    elif name == "delta-bar":
        delta = delta_bar_scan(args.resolution)
        params = {"grid_resolution": args.resolution, "delta_max": 0.5}
        outputs = {"delta_bar": delta}
    elif name == "gradient-tables":
        rep = gradient_tables()
        params = {"step": 1e-5}
        outputs = {k: n for k, (_, n) in rep.gradient_norm_table.items()}
        tables["gradient_tables"] = ("function,norm", [[k, n] for k, n in outputs.items()])
    else:
        general = contraction_report(lambda d: refine_S_eps_diff(d, eps), args.trials, 1, seed=seed)
        near = contraction_report(lambda d: refine_S_eps_diff(d, eps, "divided"), args.trials, 2,
                                  NearConstantPositive(0.05), seed=seed)
        params = {"eps": eps, "trials": args.trials}
        outputs = {"difference_scheme_sup": max(general.contraction_factors),
                   "double_step_rho_ratio_sup": max(near.contraction_factors)}
    return ExperimentRecord(name, params, outputs, seed), tables


def _write_table(path, header, rows):
    lines = [f"# {header}"]
    for r in rows:
        lines.append(",".join(repr(float(v)) if isinstance(v, (float, np.floating)) else str(v) for v in r))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def cmd_experiment(args) -> int:
    rec, tables = _run_experiment(args)
    args.out_dir.mkdir(parents=True, exist_ok=True)
    if "jsonl" in args.format:
        append_jsonl(args.out_dir / "records.jsonl", rec.to_json())
    if "csv" in args.format:
        for tname, (header, rows) in tables.items():
            _write_table(args.out_dir / f"{tname}.csv", header, rows)
    print(json.dumps(rec.outputs, default=str, sort_keys=True))
    return 0


def cmd_export_svg(args) -> int:
    data = read_csv(args.input)
    if data.shape[1] != 2:
        raise CliError("export-svg needs 2-D points; 1-D data is better kept as the CSV from 'refine'")
    args.out_dir.mkdir(parents=True, exist_ok=True)
    write_svg(args.out_dir / f"{args.input.stem}.svg", data, closed=args.topology == "periodic", stroke=args.stroke)
    return 0


def cmd_analyze(args) -> int:
    from .analysis import rho, smoothness_estimate

    scheme = _scheme(args)
    data = read_csv(args.input)
    result = []
    for c, s in enumerate(_sequences(data, args.topology)):
        d = forward_difference(s)
        r = rho(d)
        entry = {"coordinate": c, "rho": r, "nondecreasing": bool(np.all(d.values >= 0)),
                 "nonincreasing": bool(np.all(d.values <= 0))}
        rep = smoothness_estimate(scheme, s, n=args.order, k_max=args.levels)
        entry["alpha"] = rep.estimated_alpha
        entry["alpha_trace"] = rep.alpha_trace
        result.append(entry)
    print(json.dumps(result, sort_keys=True))
    if "jsonl" in args.format:
        args.out_dir.mkdir(parents=True, exist_ok=True)
        rec = ExperimentRecord("analyze", _params(args, scheme), {"coordinates": result}, args.seed)
        append_jsonl(args.out_dir / "records.jsonl", rec.to_json())
    return 0


COMMANDS = {"refine": cmd_refine, "experiment": cmd_experiment, "export-svg": cmd_export_svg, "analyze": cmd_analyze}


def main(argv=None) -> int:
    level = os.environ.get("SUBDIV_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except RuleDomainError as exc:
        print(f"error: {exc} (index {exc.index})", file=sys.stderr)
    except (SubdivisionError, CliError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
    return 2


if __name__ == "__main__":
    sys.exit(main())
