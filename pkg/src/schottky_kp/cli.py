"""Command-line interface.

Subcommands: validate, periods, kp-check, soliton, degenerate, mcurve, laurent.

Exit codes: 0 success, 1 input error, 2 validation failure, 3 computation
failure or non-convergence, 4 tolerance unmet.  Floats are written with
``%.17g`` and every output is produced in a fixed order, so repeated runs
are byte-identical.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys

import numpy as np

from .differentials import TruncationPolicy, laurent_data
from .errors import ComputationError, InputError, SchottkyError, ValidationError
from .graph import build_curve, dumps_config, loads_config, mcurve_params, validate_classical

EXIT_OK, EXIT_INPUT, EXIT_INVALID, EXIT_COMPUTE, EXIT_TOL = 0, 1, 2, 3, 4

DEFAULT_GRID = "-1:1:5,-0.5:0.5:5,-0.5:0.5:5"
DEFAULT_TOL = {"kp-check": 1e-6, "soliton": 1e-9, "degenerate": 1e-2}


# ---------------------------------------------------------------- formatting


def fmt(v) -> str:
    return "%.17g" % v


def _json_value(v, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if v is None:
        return "null"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return fmt(float(v)) if math.isfinite(v) else "null"
    if isinstance(v, (complex, np.complexfloating)):
        return _json_value([v.real, v.imag], indent, level)
    if isinstance(v, str):
        return json.dumps(v)
    if isinstance(v, np.ndarray):
        return _json_value(v.tolist(), indent, level)
    if isinstance(v, dict):
        if not v:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_json_value(x, indent, level + 1)}" for k, x in v.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(v, (list, tuple)):
        if not v:
            return "[]"
        if all(isinstance(x, (int, float, np.integer, np.floating)) and not isinstance(x, bool) for x in v):
            return "[" + ", ".join(_json_value(x, indent, level + 1) for x in v) + "]"
        items = [pad + _json_value(x, indent, level + 1) for x in v]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(v).__name__}")


def to_json(obj) -> str:
    return _json_value(obj, 2, 0) + "\n"


def to_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(x) if isinstance(x, (float, np.floating)) else x for x in row])
    return buf.getvalue()


def _cx(m):
    m = np.asarray(m, dtype=complex)
    return np.stack([m.real, m.imag], axis=-1).tolist()


# ---------------------------------------------------------------- inputs


def _read_json(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc.msg}") from exc


def _read_config(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    return loads_config(text)


def _policy(args) -> TruncationPolicy:
    return TruncationPolicy(max_len=args.max_word_len, tail_tol=args.tail_tol)


def _floats(text: str | None, g: int, name: str) -> np.ndarray:
    if not text:
        return np.zeros(g)
    try:
        vals = np.array([float(v) for v in text.split(",")])
    except ValueError as exc:
        raise InputError(f"--{name} expects comma-separated numbers") from exc
    if len(vals) != g:
        raise InputError(f"--{name} needs {g} values")
    return vals


def _workers() -> int:
    raw = os.environ.get("SCHOTTKY_KP_THREADS", "1")
    try:
        n = int(raw)
    except ValueError as exc:
        raise InputError("SCHOTTKY_KP_THREADS must be a positive integer") from exc
    if n < 1:
        raise InputError("SCHOTTKY_KP_THREADS must be a positive integer")
    return n


# ---------------------------------------------------------------- subcommands


def cmd_validate(args):
    graph, params = _read_config(args.config)
    curve = build_curve(graph, params, validate=False)
    report = validate_classical(curve.group)
    out = {"genus": graph.genus, "vertices": len(graph.vertices), "edges": len(graph.edges),
           "passed": report.passed, "min_gap": report.min_gap}
    if not report.passed:
        out["error"] = "CirclesOverlap"
    return out, (EXIT_OK if report.passed else EXIT_INVALID)


def cmd_periods(args):
    from .periods import period_matrix

    graph, params = _read_config(args.config)
    curve = build_curve(graph, params)
    pd = period_matrix(curve.group, _policy(args))
    if args.format == "csv":
        g = curve.genus
        rows = [(i + 1, j + 1, pd.P[i, j].real, pd.P[i, j].imag, pd.Z[i, j].real, pd.Z[i, j].imag)
                for i in range(g) for j in range(g)]
        return to_csv(["i", "j", "P_re", "P_im", "Z_re", "Z_im"], rows), EXIT_OK
    out = {"genus": curve.genus, "P": _cx(pd.P), "Z": _cx(pd.Z),
           "symmetry_defect": pd.symmetry_defect, "min_im_eig": pd.min_im_eig,
           "consistency": pd.consistency, "base_point": pd.base_point}
    return out, EXIT_OK


def _residual_output(args, report):
    rows = [(p[0], p[1], p[2], u.real, u.imag, r)
            for p, u, r in zip(report.points, report.u, report.residual)]
    summary = report.as_dict()
    summary["tol"] = args.tol
    summary["passed"] = bool(report.max <= args.tol)
    code = EXIT_OK if summary["passed"] else EXIT_TOL
    if args.format == "json":
        return {"summary": summary, "rows": [list(r) for r in rows]}, code
    text = to_csv(["x", "t2", "t3", "u_re", "u_im", "normalized_residual"], rows)
    sys.stderr.write(f"max_normalized_residual {fmt(report.max)} tol {fmt(args.tol)}\n")
    return text, code


def cmd_kp_check(args):
    from .periods import period_matrix
    from .theta_tau import Characteristic, kp_residual, parse_grid, tau_data_from_curve

    graph, params = _read_config(args.config)
    curve = build_curve(graph, params)
    if curve.marked_point is None:
        raise InputError("kp-check needs a tail numbered 1")
    g = curve.genus
    ch = Characteristic(_floats(args.alpha, g, "alpha"), _floats(args.beta, g, "beta"))
    policy = _policy(args)
    data = tau_data_from_curve(curve, ch, args.times, policy, periods=period_matrix(curve.group, policy),
                               radius=args.lattice_radius)
    data.check_nonzero()
    points = parse_grid(args.grid)
    return _residual_output(args, kp_residual(data, points))


def cmd_soliton(args):
    from .degeneration import soliton_from_dict, soliton_kp_residual
    from .theta_tau import parse_grid

    spec = soliton_from_dict(_read_json(args.spec))
    points = parse_grid(args.grid)
    return _residual_output(args, soliton_kp_residual(spec, points))


def cmd_degenerate(args):
    from .degeneration import degeneration_report, scenario_from_dict

    scenario = scenario_from_dict(_read_json(args.scenario))
    rep = degeneration_report(scenario, M=args.times, policy=_policy(args), workers=_workers())
    passed = bool(rep["monotone"] and rep["final_deviation"] <= args.tol)
    rep["tol"] = args.tol
    rep["passed"] = passed
    code = EXIT_OK if passed else EXIT_TOL
    if args.format == "csv":
        rows = [(r["y"], r["deviation"]) for r in rep["rows"]]
        return to_csv(["y", "deviation"], rows), code
    return rep, code


def cmd_mcurve(args):
    graph, params = mcurve_params(args.genus, args.tails, args.scale, args.y)
    text = dumps_config(graph, params)
    return text, EXIT_OK


def cmd_laurent(args):
    graph, params = _read_config(args.config)
    curve = build_curve(graph, params)
    if curve.marked_point is None:
        raise InputError("laurent needs a tail numbered 1")
    ld = laurent_data(curve.group, complex(curve.marked_point), args.times, _policy(args))
    if args.format == "csv":
        rows = [("r", j + 1, m + 1, ld.r[j, m].real, ld.r[j, m].imag)
                for j in range(ld.r.shape[0]) for m in range(ld.r.shape[1])]
        rows += [("q", n + 1, m + 1, ld.q[n, m].real, ld.q[n, m].imag)
                 for n in range(ld.q.shape[0]) for m in range(ld.q.shape[1])]
        return to_csv(["kind", "row", "col", "re", "im"], rows), EXIT_OK
    out = {"marked_point": complex(curve.marked_point), "M": ld.M, "r": _cx(ld.r), "q": _cx(ld.q),
           "symmetry_defect": ld.symmetry_defect()}
    return out, EXIT_OK


COMMANDS = {
    "validate": cmd_validate,
    "periods": cmd_periods,
    "kp-check": cmd_kp_check,
    "soliton": cmd_soliton,
    "degenerate": cmd_degenerate,
    "mcurve": cmd_mcurve,
    "laurent": cmd_laurent,
}


# ---------------------------------------------------------------- parser


def _positive(kind):
    def conv(text):
        try:
            v = kind(text)
        except ValueError as exc:
            raise argparse.ArgumentTypeError(f"invalid value {text!r}") from exc
        if not v > 0:
            raise argparse.ArgumentTypeError(f"{text!r} must be positive")
        return v

    return conv


def _times(text):
    try:
        v = int(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"invalid value {text!r}") from exc
    if not 1 <= v <= 16:
        raise argparse.ArgumentTypeError("--times must lie in 1..16")
    return v


def _word_len(text):
    try:
        v = int(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"invalid value {text!r}") from exc
    if v < 0:
        raise argparse.ArgumentTypeError("--max-word-len must be non-negative")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=_positive(float), default=None, help="residual tolerance")
    common.add_argument("--max-word-len", type=_word_len, default=30, help="longest summed word")
    common.add_argument("--tail-tol", type=_positive(float), default=1e-12, help="relative shell tolerance")
    common.add_argument("--lattice-radius", type=_positive(int), default=None,
                        help="theta lattice box radius (default: from the tail bound)")
    common.add_argument("--times", type=_times, default=3, help="number of KP times M")
    common.add_argument("--grid", default=DEFAULT_GRID, help='"x0:x1:nx,t20:t21:n2,t30:t31:n3"')
    common.add_argument("--format", choices=("json", "csv"), default=None)
    common.add_argument("--out", default=None, help="output file (default: stdout)")

    p = argparse.ArgumentParser(prog="schottky-kp", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    s = sub.add_parser("validate", parents=[common], help="check a curve configuration")
    s.add_argument("config")
    s = sub.add_parser("periods", parents=[common], help="multiplicative periods and period matrix")
    s.add_argument("config")
    s = sub.add_parser("kp-check", parents=[common], help="KP residual of the tau function on a grid")
    s.add_argument("config")
    s.add_argument("--alpha", default=None, help="comma-separated characteristic alpha")
    s.add_argument("--beta", default=None, help="comma-separated characteristic beta")
    s = sub.add_parser("soliton", parents=[common], help="soliton tau KP residual on a grid")
    s.add_argument("spec")
    s = sub.add_parser("degenerate", parents=[common], help="scaled vs modified tau along a family")
    s.add_argument("scenario")
    s = sub.add_parser("mcurve", parents=[common], help="write a real M-curve configuration")
    s.add_argument("--genus", type=_positive(int), default=2)
    s.add_argument("--tails", type=int, default=1)
    s.add_argument("--scale", type=float, default=2.0)
    s.add_argument("--y", type=float, default=0.01)
    s = sub.add_parser("laurent", parents=[common], help="Taylor data r, q at the marked point")
    s.add_argument("config")
    return p


def _default_format(command: str) -> str:
    return "csv" if command in ("kp-check", "soliton") else "json"


def _emit(text: str, out: str | None):
    if out is None:
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    try:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise InputError(f"cannot write {out}: {exc.strerror}") from exc


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_INPUT
    if args.format is None:
        args.format = _default_format(args.command)
    if args.tol is None:
        args.tol = DEFAULT_TOL.get(args.command, 1e-6)
    try:
        result, code = COMMANDS[args.command](args)
        text = result if isinstance(result, str) else to_json(result)
        _emit(text, args.out)
        return code
    except ValidationError as exc:
        sys.stderr.write(f"{type(exc).__name__}: {exc}\n")
        return EXIT_INVALID
    except InputError as exc:
        sys.stderr.write(f"{type(exc).__name__}: {exc}\n")
        return EXIT_INPUT
    except ComputationError as exc:
        sys.stderr.write(f"{type(exc).__name__}: {exc}\n")
        return EXIT_COMPUTE
    except SchottkyError as exc:
        sys.stderr.write(f"{type(exc).__name__}: {exc}\n")
        return EXIT_COMPUTE


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
