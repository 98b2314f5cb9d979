"""Command-line front end: ``signednet analyze|compensate|simulate|sweep``.

Exit codes: 0 success, 1 usage error, 2 input error, 3 regime mismatch,
4 numerical non-convergence.  Every run that writes to ``--out`` also writes
``manifest.json`` describing how to reproduce it.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
import tempfile
from pathlib import Path

import numpy as np

from . import __version__
from .compensation import (
    CompensationVector,
    classify,
    cluster_compensation,
    compare_delta,
    default_q_grid,
    delta,
    format_sweep_csv,
    predict_steady_state,
    resolve_active,
    sweep,
    zero_crossings,
)
from .dynamics import SimulationConfig, integrate, reconcile
from .errors import (
    ComplexLeadingEigenvalue,
    DisconnectedInput,
    Divergent,
    GraphInputError,
    IndeterminateRegime,
    LengthMismatch,
    NoConvergence,
    NotBalanced,
    NotPSD,
    RegimeMismatch,
    StepInstability,
    StructurallyBalanced,
)
from .graph import (
    FIXTURES,
    GaugePartition,
    SignedGraph,
    classify_negative_cut,
    count_components,
    fixture_path,
    is_connected,
    is_weight_balanced,
    read_edge_list,
    structural_balance,
)
from .spectral import (
    bronski_bounds,
    is_eventually_exp_positive,
    laplacian_matrix,
    predict_inertia_from_cut,
    spectrum,
)

EXIT_OK, EXIT_USAGE, EXIT_INPUT, EXIT_MISMATCH, EXIT_NUMERIC = 0, 1, 2, 3, 4

INPUT_ERRORS = (
    GraphInputError,
    OSError,
    LengthMismatch,
    DisconnectedInput,
    StructurallyBalanced,
    ComplexLeadingEigenvalue,
    NotBalanced,
    NotPSD,
    IndeterminateRegime,
    Divergent,
    KeyError,
    ValueError,
)
NUMERIC_ERRORS = (NoConvergence, StepInstability)


class UsageError(Exception):
    pass


_NUMBER_LIST = re.compile(r"^-\.?\d[\d.eE+,\-]*$")


class _Parser(argparse.ArgumentParser):
    """Raises :class:`UsageError` instead of exiting, and accepts values such
    as ``-0.4,0.1`` that start with a minus sign."""

    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        self._negative_number_matcher = _NUMBER_LIST

    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


# -- helpers ----------------------------------------------------------------


def load_graph(path: str) -> SignedGraph:
    """Read an edge-list file; bare fixture names (``g0``, ``g0.edges``)
    resolve to the bundled copies when no such file exists."""
    p = Path(path)
    if not p.exists() and p.name.removesuffix(".edges") in FIXTURES and p.parent == Path("."):
        p = fixture_path(p.name)
    return read_edge_list(p)


def parse_csv_floats(text: str) -> list[float]:
    try:
        return [float(t) for t in text.replace(" ", "").split(",") if t != ""]
    except ValueError as exc:
        raise UsageError(f"not a comma-separated list of numbers: {text!r}") from exc


def to_jsonable(obj):
    if isinstance(obj, dict):
        return {k: to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def dump_json(obj) -> str:
    return json.dumps(to_jsonable(obj), indent=2, sort_keys=False) + "\n"


def write_atomic(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


class Output:
    """Collects named artefacts, prints the primary one and writes all of
    them (plus a manifest) when ``--out`` is given."""

    def __init__(self, args, argv):
        self.args = args
        self.argv = list(argv)
        self.files: list[tuple[str, str]] = []

    def add(self, name: str, text: str) -> None:
        self.files.append((name, text))

    def emit(self, primary: str, parameters: dict) -> None:
        sys.stdout.write(primary)
        if not self.args.out:
            return
        out = Path(self.args.out)
        written = []
        for name, text in self.files:
            write_atomic(out / name, text)
            written.append(str(out / name))
        manifest = {
            "command": self.args.command,
            "argv": self.argv,
            "input_path": self.args.path,
            "parameters": parameters,
            "tool_version": __version__,
            "outputs": written,
        }
        write_atomic(out / "manifest.json", dump_json(manifest))


def compensation_from(g: SignedGraph, spec: list[str]) -> CompensationVector:
    mode = spec[0]
    if mode == "delta":
        if len(spec) != 1:
            raise UsageError("mode 'delta' takes no values")
        return delta(g)
    if mode == "cluster":
        if len(spec) != 1:
            raise UsageError("mode 'cluster' takes no values")
        return cluster_compensation(g)
    if mode == "zero":
        return CompensationVector(np.zeros(g.n), "custom")
    if mode == "vector":
        if len(spec) != 2:
            raise UsageError("mode 'vector' needs one comma-separated list")
        k = parse_csv_floats(spec[1])
        if len(k) != g.n:
            raise LengthMismatch(f"vector has {len(k)} entries, graph has {g.n} nodes")
        return CompensationVector(k, "custom")
    raise UsageError(f"unknown mode {mode!r}; choose delta, cluster, zero or vector")


def parse_x0(g: SignedGraph, text: str | None, required: bool = False):
    if text is None:
        if required:
            raise UsageError("--x0 is required")
        return None
    x0 = np.array(parse_csv_floats(text))
    if x0.size != g.n:
        raise LengthMismatch(f"x0 has {x0.size} entries, graph has {g.n} nodes")
    return x0


def node_labels(g: SignedGraph, idx) -> list[str]:
    return [g.label(i) for i in idx]


# -- commands ---------------------------------------------------------------


def cmd_analyze(args, out: Output) -> int:
    g = load_graph(args.path)
    pos = sum(1 for e in g.edges if e[2] > 0)
    neg = len(g.edges) - pos
    lap = laplacian_matrix(g)
    rep = spectrum(lap)
    balance = structural_balance(g)
    report = {
        "n": g.n,
        "directed": g.directed,
        "edges": {"positive": pos, "negative": neg},
        "v_minus": node_labels(g, g.v_minus()),
        "connected": is_connected(g),
        "components": count_components(g).count,
        "structurally_balanced": isinstance(balance, GaugePartition),
        "gauge": (
            [int(s) for s in balance.vector] if isinstance(balance, GaugePartition) else None
        ),
        "imbalance_witness": (
            None if isinstance(balance, GaugePartition) else node_labels(g, balance.cycle)
        ),
        "weight_balanced": is_weight_balanced(g),
    }
    if is_connected(g):
        cut = classify_negative_cut(g)
        bounds = bronski_bounds(g)
        pred = predict_inertia_from_cut(g)
        report["negative_cut"] = {
            "class": str(cut),
            "edges": [[g.label(i), g.label(j)] for i, j in sorted(cut.cut_set)],
        }
        report["inertia_bounds"] = [bounds.lower, bounds.upper]
        report["inertia_prediction"] = {"lower": pred.lower, "upper": pred.upper, "rule": pred.rule}
    else:
        report["negative_cut"] = None
        report["inertia_bounds"] = None
        report["inertia_prediction"] = None
    report["spectrum"] = rep.to_dict()
    report["i_minus"] = rep.n_negative
    report["stable"] = rep.n_negative == 0
    report["neg_laplacian_eventually_exp_positive"] = is_eventually_exp_positive(-lap)
    if args.format == "csv":
        lines = ["key,value"]
        for key in ("n", "directed", "i_minus", "stable", "structurally_balanced", "weight_balanced"):
            lines.append(f"{key},{report[key]}")
        lines.append(f"negative_cut,{report['negative_cut']['class'] if report['negative_cut'] else ''}")
        if report["inertia_bounds"]:
            lines.append(f"inertia_lower,{report['inertia_bounds'][0]}")
            lines.append(f"inertia_upper,{report['inertia_bounds'][1]}")
        for i, z in enumerate(rep.eigenvalues):
            lines.append(f"eig{i}_re,{z.real:.6e}")
            lines.append(f"eig{i}_im,{z.imag:.6e}")
        text = "\n".join(lines) + "\n"
        out.add("analyze.csv", text)
    else:
        text = dump_json(report)
        out.add("analyze.json", text)
    out.emit(text, {"format": args.format})
    return EXIT_OK


def cmd_compensate(args, out: Output) -> int:
    g = load_graph(args.path)
    k = compensation_from(g, args.mode)
    x0 = parse_x0(g, args.x0)
    d = delta(g)
    pred = classify(g, k)
    report = {
        "k": k.to_list(),
        "k_regime": k.regime,
        "delta": d.to_list(),
        "comparison": str(compare_delta(k, d, atol=args.tol)),
        "prediction": pred.to_dict(),
    }
    if x0 is not None:
        report["x0"] = x0
        try:
            report["steady_state"] = predict_steady_state(g, k, x0)
        except (Divergent, IndeterminateRegime) as exc:
            report["steady_state"] = None
            report["steady_state_note"] = str(exc)
    if args.format == "csv":
        lines = ["node,k,delta" + (",steady_state" if report.get("steady_state") is not None else "")]
        for i in range(g.n):
            row = f"{g.label(i)},{k.k[i]:.6e},{d.k[i]:.6e}"
            if report.get("steady_state") is not None:
                row += f",{report['steady_state'][i]:.6e}"
            lines.append(row)
        text = "\n".join(lines) + "\n"
        sys.stderr.write(f"regime: {pred.regime}; comparison: {report['comparison']}\n")
        out.add("compensate.csv", text)
    else:
        text = dump_json(report)
        out.add("compensate.json", text)
    out.emit(text, {"mode": args.mode, "x0": args.x0, "tol": args.tol, "format": args.format})
    return EXIT_OK


def cmd_simulate(args, out: Output) -> int:
    g = load_graph(args.path)
    k = compensation_from(g, args.k_mode)
    x0 = parse_x0(g, args.x0, required=True)
    cfg = SimulationConfig(
        dt=args.dt,
        t_max=args.t_max,
        converge_tol=args.converge_tol,
        diverge_threshold=args.diverge_threshold,
        sample_stride=args.stride,
    )
    pred = classify(g, k)
    traj = integrate(g, k, x0, cfg)
    rec = reconcile(traj, pred, atol=args.tol, strict=False)
    report = {
        "k": k.to_list(),
        "prediction": {"regime": pred.regime.value, "certificate": pred.certificate},
        "final_time": traj.final_time,
        "final_state": traj.final_state,
        "final_residual": traj.final_residual,
        "converged": traj.converged,
        "diverged": traj.diverged,
        "reconcile": rec.to_dict(),
    }
    csv_text = traj.to_csv()
    json_text = dump_json(report)
    out.add("trajectory.csv", csv_text)
    out.add("reconcile.json", json_text)
    params = {
        "k_mode": args.k_mode,
        "x0": args.x0,
        "dt": cfg.dt,
        "t_max": cfg.t_max,
        "converge_tol": cfg.converge_tol,
        "diverge_threshold": cfg.diverge_threshold,
        "stride": cfg.sample_stride,
        "tol": args.tol,
        "format": args.format,
    }
    out.emit(csv_text if args.format == "csv" else json_text, params)
    if not rec.agree:
        sys.stderr.write(f"regime mismatch: {rec.detail}\n")
        return EXIT_MISMATCH
    return EXIT_OK


def cmd_sweep(args, out: Output) -> int:
    g = load_graph(args.path)
    if args.active in ("vminus", "all"):
        active = resolve_active(g, args.active)
    else:
        labels = [t for t in args.active.replace(" ", "").split(",") if t]
        active = resolve_active(g, [g.index(lab) for lab in labels])
    if args.steps < 1:
        raise UsageError("--steps must be positive")
    grid = default_q_grid(args.qmin, args.qmax, args.steps)
    pts = sweep(g, active, grid)
    roots = zero_crossings(pts, tol=args.tol)
    summary = "zero crossings at q = " + (", ".join(f"{r:.6g}" for r in roots) if roots else "none")
    csv_text = format_sweep_csv(pts)
    out.add("sweep.csv", csv_text)
    if args.format == "csv":
        sys.stderr.write(summary + "\n")
        text = csv_text
    else:
        text = dump_json(
            {
                "active": node_labels(g, active),
                "points": [{"q": p.q, "min_real_part": p.min_real_part} for p in pts],
                "zero_crossings": roots,
                "summary": summary,
            }
        )
        out.add("sweep.json", text)
    out.emit(text, {"active": args.active, "qmin": args.qmin, "qmax": args.qmax, "steps": args.steps, "tol": args.tol, "format": args.format})
    return EXIT_OK


# -- parser -----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    # SUPPRESS keeps a subcommand's defaults from clobbering flags given
    # before the subcommand name
    common.add_argument("--format", choices=("json", "csv"), default=argparse.SUPPRESS,
                        help="output format")
    common.add_argument("--out", default=argparse.SUPPRESS,
                        help="directory for output files and manifest.json")
    common.add_argument("--tol", type=float, default=argparse.SUPPRESS, help="comparison tolerance")

    parser = _Parser(
        prog="signednet",
        description="Stability analysis and self-loop compensation for signed networks.",
        parents=[common],
    )
    parser.add_argument("--version", action="version", version=f"signednet {__version__}")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("analyze", parents=[common], help="spectrum, inertia and structure report")
    p.add_argument("path")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("compensate", parents=[common], help="compensation vector and predicted regime")
    p.add_argument("path")
    p.add_argument(
        "--mode",
        nargs="+",
        default=["delta"],
        metavar="MODE",
        help="delta | cluster | zero | vector <k1,k2,...>",
    )
    p.add_argument("--x0", default=None, help="initial state, comma separated")
    p.set_defaults(func=cmd_compensate)

    p = sub.add_parser("simulate", parents=[common], help="integrate and reconcile with the prediction")
    p.add_argument("path")
    p.add_argument("--k-mode", nargs="+", default=["delta"], metavar="MODE",
                   help="delta | cluster | zero | vector <k1,k2,...>")
    p.add_argument("--x0", default=None, help="initial state, comma separated")
    p.add_argument("--dt", type=float, default=0.01)
    p.add_argument("--t-max", type=float, default=100.0)
    p.add_argument("--converge-tol", type=float, default=1e-9)
    p.add_argument("--diverge-threshold", type=float, default=1e6)
    p.add_argument("--stride", type=int, default=10)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", parents=[common], help="min real part of the spectrum versus q")
    p.add_argument("path")
    p.add_argument("--active", default="vminus", help="vminus | all | comma-separated node labels")
    p.add_argument("--qmin", type=float, default=0.0)
    p.add_argument("--qmax", type=float, default=2.0)
    p.add_argument("--steps", type=int, default=201)
    p.set_defaults(func=cmd_sweep)
    return parser


_DEFAULT_FORMAT = {"analyze": "json", "compensate": "json", "simulate": "json", "sweep": "csv"}
_DEFAULT_TOL = {"analyze": None, "compensate": None, "simulate": 1e-4, "sweep": 1e-6}


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        sys.stderr.write(f"{exc}\n")
        return EXIT_USAGE
    except SystemExit as exc:  # --help / --version
        return EXIT_OK if not exc.code else EXIT_USAGE
    args.format = getattr(args, "format", None) or _DEFAULT_FORMAT[args.command]
    if getattr(args, "tol", None) is None:
        args.tol = _DEFAULT_TOL[args.command]
    args.out = getattr(args, "out", None)
    out = Output(args, argv)
    try:
        return args.func(args, out)
    except UsageError as exc:
        sys.stderr.write(f"signednet: error: {exc}\n")
        return EXIT_USAGE
    except RegimeMismatch as exc:
        sys.stderr.write(f"signednet: {exc}\n")
        return EXIT_MISMATCH
    except NUMERIC_ERRORS as exc:
        sys.stderr.write(f"signednet: numerical failure: {exc}\n")
        return EXIT_NUMERIC
    except INPUT_ERRORS as exc:
        sys.stderr.write(f"signednet: {type(exc).__name__}: {exc}\n")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
