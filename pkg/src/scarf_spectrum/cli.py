"""Command-line surface: spectra, plateau scans, wavefunctions, curve dumps.

Subcommands::

    scarf-spectrum spectrum        both methods side by side, levels 0..
    scarf-spectrum plateau         stability scan over starting points
    scarf-spectrum wavefunction    sampled, normalized bound-state profiles
    scarf-spectrum potential-curve V(x) samples on an open interior grid
    scarf-spectrum tables          canonical parameter sets (table1..table4)

Outputs are CSV (17 significant digits) or JSON (round-trip exact floats)
with a ``params`` / ``results`` / ``diagnostics`` layout.  Exit codes:
0 success, 2 usage or validation error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import io
import json
import sys
from dataclasses import dataclass, field

import numpy as np

from . import __version__, aim, tra
from .errors import (
    CoefficientOverflowError,
    DomainError,
    PoleOnPathError,
    SingularPointError,
    ValidationError,
    ZeroPolynomialError,
)
from .potential import derive_params, physical_energy, potential_value

TABLE1_GRID = (-0.9, -0.7, -0.5, -0.3, -0.1, 0.0, 0.1, 0.3, 0.5, 0.7, 0.9)
TABLE_ITERATIONS = (1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 15, 20, 30, 50, 100)
EXIT_OK, EXIT_USAGE, EXIT_NUMERICAL = 0, 2, 3


@dataclass
class RunConfig:
    V0: float = 0.0
    Vplus: float = 0.0
    Vminus: float = 0.0
    V1: float = 0.0
    L: float = 1.0
    method: str = "both"  # aim | tra | both
    iterations: tuple = (10,)
    y0: float = 0.0
    grid: tuple | None = None
    tol: float = aim.DEFAULT_PLATEAU_TOL
    N: int = 10
    precision: str = "double"  # double | extended
    root_window: tuple = (-1.0e4, 1.0e4)
    levels: tuple = (0,)
    level: int = 0
    samples: int = 201
    fmt: str = "csv"
    out: str | None = None
    workers: int = 1
    diagnostics: list = field(default_factory=list)

    def params(self):
        return derive_params(self.V0, self.Vplus, self.Vminus, self.V1, self.L)


def _fmt(x) -> str:
    return format(float(x), ".16e")


def _parse_scalar(text: str):
    try:
        return float(text)
    except ValueError:
        return text


def _parse_int_list(text: str):
    return tuple(int(tok) for tok in str(text).split(",") if tok != "")


def _parse_grid(text: str):
    text = str(text)
    if ":" in text:
        lo_s, hi_s, step_s = text.split(":")
        lo, hi, step = float(lo_s), float(hi_s), float(step_s)
        if step <= 0 or hi < lo:
            raise ValidationError(f"malformed grid spec {text!r}")
        n = int(round((hi - lo) / step))
        pts = [round(lo + k * step, 12) for k in range(n + 1)]
        return tuple(p for p in pts if p <= hi + 1e-12)
    return tuple(float(tok) for tok in text.split(",") if tok != "")


def _read_config_file(path: str) -> dict:
    values = {}
    with open(path, "r", encoding="utf-8") as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValidationError(f"malformed config line: {raw.strip()!r}")
            key, val = (part.strip() for part in line.split("=", 1))
            values[key.replace("-", "_")] = val
    return values


_CONFIG_PARSERS = {
    "V0": float, "Vplus": float, "Vminus": float, "V1": float, "L": float,
    "method": str, "iterations": _parse_int_list, "y0": float,
    "grid": _parse_grid, "tol": float, "N": int, "precision": str,
    "levels": _parse_int_list, "level": int, "samples": int,
    "format": str, "out": str, "workers": int,
}


def build_config(args) -> RunConfig:
    cfg = RunConfig()
    file_values = _read_config_file(args.config) if getattr(args, "config", None) else {}
    for key, raw in file_values.items():
        name = "fmt" if key == "format" else key
        if key not in _CONFIG_PARSERS:
            raise ValidationError(f"unknown config key {key!r}")
        setattr(cfg, name, _CONFIG_PARSERS[key](raw))
    for key in _CONFIG_PARSERS:
        name = "fmt" if key == "format" else key
        arg = getattr(args, name, None)
        if arg is not None:
            setattr(cfg, name, arg)
    if cfg.method not in ("aim", "tra", "both"):
        raise ValidationError(f"method must be aim|tra|both, got {cfg.method!r}")
    if cfg.precision not in ("double", "extended"):
        raise ValidationError(f"precision must be double|extended, got {cfg.precision!r}")
    if cfg.fmt not in ("csv", "json"):
        raise ValidationError(f"format must be csv|json, got {cfg.fmt!r}")
    if not cfg.iterations or min(cfg.iterations) < 1:
        raise ValidationError("iterations must be positive")
    if cfg.N < 1:
        raise ValidationError("N must be at least 1")
    if not -1.0 < cfg.y0 < 1.0:
        raise ValidationError(f"y0 must lie strictly inside (-1, 1), got {cfg.y0}")
    return cfg


def _select_pair(cfg: RunConfig, p):
    extended = cfg.precision == "extended"
    if p.Vminus == 0.0 and p.V0 == 0.0:
        return aim.make_case1_pair(p, extended=extended)
    pair = aim.make_general_pair(p, extended=extended)
    if pair.convergence_caveat:
        cfg.diagnostics.append(pair.convergence_caveat)
    return pair


def _emit(cfg: RunConfig, command: str, header, rows, results_json,
          summaries=()):
    """Render CSV or JSON deterministically and write to --out or stdout."""
    params_block = {
        "command": command, "V0": cfg.V0, "Vplus": cfg.Vplus,
        "Vminus": cfg.Vminus, "V1": cfg.V1, "L": cfg.L, "method": cfg.method,
        "iterations": list(cfg.iterations), "y0": cfg.y0, "tol": cfg.tol,
        "N": cfg.N, "precision": cfg.precision, "levels": list(cfg.levels),
        "version": __version__,
    }
    if cfg.fmt == "json":
        doc = {"params": params_block, "results": results_json,
               "diagnostics": {"notes": list(cfg.diagnostics)}}
        text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    else:
        buf = io.StringIO()
        buf.write(f"# scarf-spectrum {__version__} {command}\n")
        for note in cfg.diagnostics:
            buf.write(f"# note: {note}\n")
        buf.write(",".join(header) + "\n")
        for row in rows:
            buf.write(",".join(row) + "\n")
        for title, sub_header, sub_rows in summaries:
            buf.write(f"\n# {title}\n")
            buf.write(",".join(sub_header) + "\n")
            for row in sub_rows:
                buf.write(",".join(row) + "\n")
        text = buf.getvalue()
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_spectrum(cfg: RunConfig) -> int:
    p = cfg.params()
    t = max(cfg.iterations)
    want_aim = cfg.method in ("aim", "both")
    want_tra = cfg.method in ("tra", "both")
    eps_aim = eps_tra = None
    if want_tra:
        eps_tra = [float(v) for v in tra.tra_spectrum(p, cfg.N)]
    if want_aim:
        pair = _select_pair(cfg, p)
        result = aim.aim_spectrum(pair, t, cfg.y0, window=cfg.root_window)
        eps_aim = [float(v) for v in result.values]
        if not eps_aim:
            raise ZeroPolynomialError("no real quantization roots in the window")
    exact = p.V1 == 0.0
    if exact:
        cfg.diagnostics.append("exact: V1 = 0, closed-form spectrum applies")
    n_levels = min(x for x in (len(eps_aim) if eps_aim else None,
                               cfg.N if want_tra else None) if x is not None)

    header = ["level"]
    if want_aim:
        header.append("eps_aim")
    if want_tra:
        header.append("eps_tra")
    header.append("E")
    if want_aim and want_tra:
        header.append("abs_delta_cross_method")
    if exact:
        header.append("eps_exact")

    from .potential import scarf_closed_spectrum
    rows, results = [], []
    for m in range(n_levels):
        ea = eps_aim[m] if want_aim else None
        et = eps_tra[m] if want_tra else None
        eps_repr = et if et is not None else ea
        rec = {"level": m, "E": physical_energy(p, eps_repr)}
        row = [str(m)]
        if want_aim:
            row.append(_fmt(ea))
            rec["eps_aim"] = ea
        if want_tra:
            row.append(_fmt(et))
            rec["eps_tra"] = et
        row.append(_fmt(rec["E"]))
        if want_aim and want_tra:
            rec["abs_delta_cross_method"] = abs(ea - et)
            row.append(_fmt(rec["abs_delta_cross_method"]))
        if exact:
            eps_cl = 2.0 * scarf_closed_spectrum(p, m) / (p.lam * p.lam)
            rec["eps_exact"] = eps_cl
            row.append(_fmt(eps_cl))
        rows.append(row)
        results.append(rec)
    return _emit(cfg, "spectrum", header, rows, {"levels": results})


def cmd_plateau(cfg: RunConfig) -> int:
    if cfg.method == "tra":
        raise ValidationError("plateau scan requires the iterative method")
    if not cfg.levels:
        raise ValidationError("at least one level is required")
    p = cfg.params()
    pair = _select_pair(cfg, p)
    report = aim.plateau_scan(pair, cfg.levels, cfg.iterations,
                              grid=cfg.grid, tol=cfg.tol,
                              window=cfg.root_window, max_workers=cfg.workers)
    header = ["level", "iterations", "y0", "eps"]
    rows, recs = [], []
    for m in report.levels:
        for t in report.iterations:
            for y0, v in zip(report.grid, report.values[(m, t)]):
                rows.append([str(m), str(t), _fmt(y0),
                             _fmt(v) if v is not None else ""])
                recs.append({"level": m, "iterations": t, "y0": y0, "eps": v})
    sum_rows = []
    intervals_json = []
    for m in report.levels:
        for t in report.iterations:
            for lo, hi in report.intervals[(m, t)]:
                sum_rows.append([str(m), str(t), _fmt(lo), _fmt(hi),
                                 _fmt(hi - lo)])
                intervals_json.append({"level": m, "iterations": t,
                                       "lo": lo, "hi": hi, "width": hi - lo})
    rec_rows = [[_fmt(report.recommended_y0)]]
    if report.recommendation_warning:
        cfg.diagnostics.append(report.recommendation_warning)
    results = {"grid": list(report.grid), "points": recs,
               "intervals": intervals_json,
               "recommended_y0": report.recommended_y0}
    return _emit(cfg, "plateau", header, rows, results,
                 summaries=[("plateau intervals",
                             ["level", "iterations", "lo", "hi", "width"],
                             sum_rows),
                            ("recommended y0", ["y0"], rec_rows)])


def cmd_wavefunction(cfg: RunConfig) -> int:
    p = cfg.params()
    if cfg.samples < 2:
        raise ValidationError("need at least two samples")
    t = max(cfg.iterations)
    want_aim = cfg.method in ("aim", "both")
    want_tra = cfg.method in ("tra", "both")
    xs = np.linspace(-p.L / 2, p.L / 2, cfg.samples)
    interior = slice(1, cfg.samples - 1)

    psi_aim = psi_tra = None
    gap_warning = None
    if want_tra:
        sol = tra.solve(p, cfg.N)
        if cfg.level >= cfg.N:
            raise ValidationError(f"level {cfg.level} >= N = {cfg.N}")
        coeffs = sol.eigenvectors[:, cfg.level]
        psi_tra = np.zeros_like(xs)
        psi_tra[interior] = tra.tra_wavefunction(p, coeffs, xs[interior])
    if want_aim:
        pair = _select_pair(cfg, p)
        state = aim.aim_iterate(pair, t)
        spec = aim.aim_spectrum(pair, t, cfg.y0, window=cfg.root_window,
                                state=state)
        if cfg.level >= len(spec.values):
            raise ValidationError(
                f"level {cfg.level} beyond the {len(spec.values)} computed levels")
        eps_m = spec.values[cfg.level]
        psi_aim = np.zeros_like(xs)
        try:
            psi_aim[interior] = aim.aim_wavefunction(pair, state, t, eps_m,
                                                     xs[interior])
        except PoleOnPathError as exc:
            psi_aim = None
            gap_warning = f"pole on path: {exc}"
            cfg.diagnostics.append(gap_warning)

    def normalized(v):
        norm = np.sqrt(np.trapz(v * v, xs))
        return v / norm if norm > 0 else v

    if psi_aim is not None:
        psi_aim = normalized(psi_aim)
    if psi_tra is not None:
        psi_tra = normalized(psi_tra)
    overlap = None
    if psi_aim is not None and psi_tra is not None:
        overlap = abs(float(np.trapz(psi_aim * psi_tra, xs)))
        cfg.diagnostics.insert(0, f"overlap = {overlap:.12f}")

    header = ["x"]
    if want_aim:
        header.append("psi_aim")
    if want_tra:
        header.append("psi_tra")
    rows = []
    for i, x in enumerate(xs):
        row = [_fmt(x)]
        if want_aim:
            row.append(_fmt(psi_aim[i]) if psi_aim is not None else "")
        if want_tra:
            row.append(_fmt(psi_tra[i]))
        rows.append(row)
    results = {"level": cfg.level, "overlap": overlap,
               "x": [float(x) for x in xs]}
    if psi_aim is not None:
        results["psi_aim"] = [float(v) for v in psi_aim]
    if psi_tra is not None:
        results["psi_tra"] = [float(v) for v in psi_tra]
    return _emit(cfg, "wavefunction", header, rows, results)


def cmd_potential_curve(cfg: RunConfig) -> int:
    if cfg.samples < 2:
        raise ValidationError("need at least two samples")
    p = cfg.params()
    step = p.L / (cfg.samples + 1)
    xs = [-p.L / 2 + step * (i + 1) for i in range(cfg.samples)]
    rows = [[_fmt(x), _fmt(potential_value(p, x))] for x in xs]
    results = {"x": [float(x) for x in xs],
               "V": [float(potential_value(p, x)) for x in xs]}
    cfg.diagnostics.append("potential diverges at the clipped wall endpoints")
    return _emit(cfg, "potential-curve", ["x", "V"], rows, results)


def cmd_tables(cfg: RunConfig, which: str) -> int:
    case1 = dict(V0=0.0, Vplus=0.25, Vminus=0.0, V1=1.0, L=1.0)
    case2 = dict(V0=0.0, Vplus=0.0, Vminus=0.0, V1=1.0, L=1.0)
    explicit_iters = cfg.iterations != RunConfig().iterations
    if which in ("table1", "table2"):
        for key, val in case1.items():
            setattr(cfg, key, val)
        cfg.levels = (0, 1) if which == "table1" else (0,)
        cfg.grid = TABLE1_GRID if which == "table1" else (-0.1, 0.0, 0.1)
        if not explicit_iters:
            cfg.iterations = TABLE_ITERATIONS
        if max(cfg.iterations) > 10 and cfg.precision == "double":
            cfg.precision = "extended"
            cfg.diagnostics.append(
                "extended precision engaged: double-precision recursion "
                "degrades beyond ten iterations")
        cfg.diagnostics.append(
            "entries at extreme y0 and high iteration counts are reported "
            "as computed; published values there are ambiguous")
        return cmd_plateau(cfg)
    if which in ("table3", "table4"):
        src = case1 if which == "table3" else case2
        for key, val in src.items():
            setattr(cfg, key, val)
        cfg.method = "both"
        cfg.N = 10
        cfg.iterations = (10,)
        cfg.y0 = 0.0
        return cmd_spectrum(cfg)
    raise ValidationError(f"unknown table {which!r}")


def _add_common(sub):
    sub.add_argument("--V0", type=float)
    sub.add_argument("--Vplus", type=float)
    sub.add_argument("--Vminus", type=float)
    sub.add_argument("--V1", type=float)
    sub.add_argument("--L", type=float)
    sub.add_argument("--method", choices=["aim", "tra", "both"])
    sub.add_argument("--iterations", type=_parse_int_list,
                     help="iteration count or comma list, e.g. 10 or 1,2,5,10")
    sub.add_argument("--y0", type=float)
    sub.add_argument("--grid", type=_parse_grid,
                     help="lo:hi:step or comma list of starting points")
    sub.add_argument("--tol", type=float)
    sub.add_argument("--N", type=int)
    sub.add_argument("--precision", choices=["double", "extended"])
    sub.add_argument("--levels", type=_parse_int_list)
    sub.add_argument("--level", type=int)
    sub.add_argument("--samples", type=int)
    sub.add_argument("--format", dest="fmt", choices=["csv", "json"])
    sub.add_argument("--out")
    sub.add_argument("--workers", type=int)
    sub.add_argument("--config", help="key = value file; flags override")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="scarf-spectrum",
        description="Bound states of the generalized trigonometric Scarf well")
    parser.add_argument("--version", action="version",
                        version=f"scarf-spectrum {__version__}")
    subs = parser.add_subparsers(dest="command", required=True)
    for name in ("spectrum", "plateau", "wavefunction", "potential-curve"):
        _add_common(subs.add_parser(name))
    tables = subs.add_parser("tables")
    tables.add_argument("which", choices=["table1", "table2", "table3", "table4"])
    _add_common(tables)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else 0
    try:
        cfg = build_config(args)
        if args.command == "spectrum":
            return cmd_spectrum(cfg)
        if args.command == "plateau":
            return cmd_plateau(cfg)
        if args.command == "wavefunction":
            return cmd_wavefunction(cfg)
        if args.command == "potential-curve":
            return cmd_potential_curve(cfg)
        if args.command == "tables":
            return cmd_tables(cfg, args.which)
        raise ValidationError(f"unknown command {args.command!r}")
    except (ValidationError, DomainError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SingularPointError, PoleOnPathError, ZeroPolynomialError,
            CoefficientOverflowError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
