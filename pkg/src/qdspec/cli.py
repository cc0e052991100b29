"""Command-line front end: value tables and the verification report.

    qdspec gamma --b 1 --x 10 --format csv
    qdspec phi --b 1 --k 0.3 --grid -3:3:61
    qdspec verify --b 1 --tol 1e-5

Exit codes: 0 success, 1 accuracy failure, 2 unparsable input, 3 violated precondition.
"""
from __future__ import annotations

import argparse
import configparser
import csv
import io
import json
import math
import sys
import warnings
from dataclasses import asdict, dataclass, fields
from importlib import metadata

import numpy as np

from .contour import DEFAULT_QUAD, QuadConfig, default_sigma, gamma_line_delta
from .errors import AccuracyError, AccuracyWarning, DomainError, InvalidParameterError, SingularityError
from .params import make_params, spectral_point_from_k

COMMANDS = ("gamma", "phi", "jost", "resolvent", "transform", "scattering", "verify")
EXIT_OK, EXIT_ACCURACY, EXIT_PARSE, EXIT_PRECONDITION = 0, 1, 2, 3

# flags whose values may legitimately start with "-"
_VALUE_FLAGS = {"--b", "--k", "--x", "--y", "--grid", "--tol", "--seed"}


class ParseError(ValueError):
    pass


def parse_complex(text: str) -> complex:
    """'re' or 're,im'."""
    parts = [p.strip() for p in str(text).split(",")]
    if not 1 <= len(parts) <= 2:
        raise ParseError(f"expected 're' or 're,im', got {text!r}")
    try:
        vals = [float(p) for p in parts]
    except ValueError as exc:
        raise ParseError(f"not a number in {text!r}") from exc
    return complex(vals[0], vals[1] if len(vals) == 2 else 0.0)


def parse_grid(text: str) -> np.ndarray:
    """'start:stop:count' -> count equispaced points including both ends."""
    parts = str(text).split(":")
    if len(parts) != 3:
        raise ParseError(f"grid must be start:stop:count, got {text!r}")
    try:
        start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise ParseError(f"bad grid {text!r}") from exc
    if count < 1:
        raise ParseError("grid count must be positive")
    return np.linspace(start, stop, count)


@dataclass
class RunConfig:
    command: str
    b: float | None = None  # None: the command's default (1.0, or each suite's own list)
    k: complex | None = None
    x: complex | None = None
    y: complex | None = None
    grid: np.ndarray | None = None
    tol: float | None = None
    format: str = "json"
    out: str | None = None
    seed: int = 0
    psi: str = "gauss"
    suites: tuple = ()

    @property
    def coupling(self) -> float:
        return 1.0 if self.b is None else self.b

    def quad(self) -> QuadConfig:
        if self.tol is None or self.command == "verify":
            return DEFAULT_QUAD
        return QuadConfig(abs_tol=0.1 * self.tol, rel_tol=self.tol)


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qdspec", description="Evaluate and verify the q-deformed Kontorovich-Lebedev machinery.")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--b", help="coupling b > 0 (default 1)")
    ap.add_argument("--k", help="spectral parameter, 're[,im]'")
    ap.add_argument("--x", help="point, 're[,im]'")
    ap.add_argument("--y", help="second point for the resolvent, 're[,im]'")
    ap.add_argument("--grid", help="start:stop:count (x for tables, k for scattering)")
    ap.add_argument("--tol", help="quadrature tolerance; for verify, a floor under every threshold")
    ap.add_argument("--format", choices=("json", "csv"))
    ap.add_argument("--out", help="write to this file instead of stdout")
    ap.add_argument("--seed", help="seed for randomized sample points in verify")
    ap.add_argument("--psi", help="built-in test function for transform (gauss, xgauss, onepx, shifted)")
    ap.add_argument("--suites", help="comma-separated suite numbers for verify (default all)")
    ap.add_argument("--config", help="key = value file; flags override it")
    return ap


def _join_negative_values(argv):
    """argparse reads '--grid -3:3:61' as two flags; glue such values to their flag."""
    out, i = [], 0
    while i < len(argv):
        tok = argv[i]
        if tok in _VALUE_FLAGS and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def _read_config_file(path: str) -> dict:
    cp = configparser.ConfigParser()
    try:
        with open(path) as fh:
            cp.read_string("[run]\n" + fh.read())
    except (OSError, configparser.Error) as exc:
        raise ParseError(f"cannot read config {path}: {exc}") from exc
    return dict(cp["run"])


def parse_args(argv) -> RunConfig:
    class _Parser(argparse.ArgumentParser):
        def error(self, message):
            raise ParseError(message)

    ap = _build_parser()
    ap.__class__ = _Parser
    ns = ap.parse_args(_join_negative_values(list(argv)))
    raw = {}
    if ns.config:
        raw.update(_read_config_file(ns.config))
    raw.update({k: v for k, v in vars(ns).items() if v is not None and k not in ("command", "config")})
    known = {f.name for f in fields(RunConfig)}
    unknown = set(raw) - known
    if unknown:
        raise ParseError(f"unknown config keys: {sorted(unknown)}")

    cfg = RunConfig(ns.command)
    try:
        if "b" in raw:
            cfg.b = float(raw["b"])
        if "tol" in raw:
            cfg.tol = float(raw["tol"])
        if "seed" in raw:
            cfg.seed = int(raw["seed"])
    except ValueError as exc:
        raise ParseError(str(exc)) from exc
    for name in ("k", "x", "y"):
        if name in raw:
            setattr(cfg, name, parse_complex(raw[name]))
    if "grid" in raw:
        cfg.grid = parse_grid(raw["grid"])
    if "format" in raw:
        if raw["format"] not in ("json", "csv"):
            raise ParseError(f"format must be json or csv, got {raw['format']!r}")
        cfg.format = raw["format"]
    cfg.out = raw.get("out")
    cfg.psi = raw.get("psi", cfg.psi)
    if "suites" in raw:
        try:
            cfg.suites = tuple(int(s) for s in str(raw["suites"]).split(",") if s.strip())
        except ValueError as exc:
            raise ParseError(f"bad suite list {raw['suites']!r}") from exc
    return cfg


# --- output -----------------------------------------------------------------------------

def provenance(cfg: RunConfig) -> dict:
    from .transform import DEFAULT_TRANSFORM, S_EXCLUSION
    from .wavefunctions import WaveContext

    try:
        version = metadata.version("artifact")
    except metadata.PackageNotFoundError:
        version = "unknown"
    p = make_params(cfg.coupling)
    q = cfg.quad()
    return {
        "version": version,
        "command": cfg.command,
        # verify without --b runs every suite at its own couplings
        "b": cfg.b if cfg.command == "verify" else cfg.coupling,
        "seed": cfg.seed,
        "sigma": default_sigma(p),
        "delta": gamma_line_delta(p),
        "k_exclusion": WaveContext.__dataclass_fields__["k_exclusion"].default,
        "s_exclusion": S_EXCLUSION,
        "quad_abs_tol": q.abs_tol,
        "quad_rel_tol": q.rel_tol,
        "verify_tol_floor": cfg.tol if cfg.command == "verify" else None,
        "transform": asdict(DEFAULT_TRANSFORM),
    }


def _cell_json(v):
    if isinstance(v, (complex, np.complexfloating)):
        return {"re": float(v.real), "im": float(v.imag)}
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    return v


def render(table: dict, cfg: RunConfig) -> str:
    """``table`` has 'columns', 'rows' and optional 'extra'; prefixed by the provenance header."""
    head = provenance(cfg)
    if cfg.format == "json":
        doc = {"provenance": head, "columns": table["columns"],
               "rows": [{c: _cell_json(v) for c, v in zip(table["columns"], row)} for row in table["rows"]]}
        for key, val in table.get("extra", {}).items():
            doc[key] = _cell_json(val)
        return json.dumps(doc, indent=1) + "\n"
    buf = io.StringIO()
    for key, val in head.items():
        buf.write(f"# {key}: {json.dumps(val)}\n")
    for key, val in table.get("extra", {}).items():
        buf.write(f"# {key}: {json.dumps(_cell_json(val))}\n")
    w = csv.writer(buf, lineterminator="\n")
    complex_cols = [any(isinstance(r[j], (complex, np.complexfloating)) for r in table["rows"])
                    for j in range(len(table["columns"]))]
    header = []
    for c, is_c in zip(table["columns"], complex_cols):
        header += [f"{c}_re", f"{c}_im"] if is_c else [c]
    w.writerow(header)
    for row in table["rows"]:
        out = []
        for v, is_c in zip(row, complex_cols):
            if is_c:
                v = complex(v)
                out += [repr(float(v.real)), repr(float(v.imag))]
            else:
                out.append(repr(float(v)) if isinstance(v, (float, np.floating)) else v)
        w.writerow(out)
    return buf.getvalue()


# --- commands ---------------------------------------------------------------------------

def _points(cfg: RunConfig, name: str = "x"):
    if cfg.grid is not None:
        offset = complex(getattr(cfg, name) or 0).imag if getattr(cfg, name) is not None else 0.0
        return [complex(g, offset) if offset else float(g) for g in cfg.grid]
    v = getattr(cfg, name)
    if v is None:
        raise DomainError(f"--{name} or --grid is required for {cfg.command}")
    return [v.real if v.imag == 0 else v]


def _need_k(cfg: RunConfig) -> complex:
    if cfg.k is None:
        raise DomainError(f"--k is required for {cfg.command}")
    return cfg.k


def _context(cfg: RunConfig):
    from .wavefunctions import WaveContext

    return WaveContext(make_params(cfg.coupling), cfg=cfg.quad())


def cmd_gamma(cfg: RunConfig) -> dict:
    from .qdilog import gamma

    p = make_params(cfg.coupling)
    rows = []
    for z in _points(cfg):
        g = gamma(z, p, cfg.quad())
        rows.append([z, complex(g.value), bool(g.at_pole), bool(g.at_zero)])
    return {"columns": ["z", "gamma", "at_pole", "at_zero"], "rows": rows}


def cmd_phi(cfg: RunConfig) -> dict:
    from .wavefunctions import phi

    ctx, k = _context(cfg), _need_k(cfg)
    xs = _points(cfg)
    vals = phi(np.asarray(xs, dtype=complex), k, ctx)
    real = k.imag == 0 and all(not isinstance(x, complex) for x in xs)
    # real x and real k give a real function; the residual imaginary part is round-off
    rows = [[x, float(v.real) if real else complex(v)] for x, v in zip(xs, np.atleast_1d(vals))]
    return {"columns": ["x", "phi"], "rows": rows, "extra": {"k": k}}


def cmd_jost(cfg: RunConfig) -> dict:
    from .wavefunctions import jost_f

    ctx, k = _context(cfg), _need_k(cfg)
    rows = [[x, complex(jost_f(x, k, 1, ctx)), complex(jost_f(x, k, -1, ctx))] for x in _points(cfg)]
    return {"columns": ["x", "f_plus", "f_minus"], "rows": rows, "extra": {"k": k}}


def cmd_resolvent(cfg: RunConfig) -> dict:
    from .resolvent import r_kernel

    ctx, k = _context(cfg), _need_k(cfg)
    if cfg.y is None:
        raise DomainError("--y is required for resolvent")
    pt = spectral_point_from_k(ctx.params, k)
    if k.imag <= 0:
        raise DomainError("the resolvent needs Im k > 0")
    y = cfg.y.real if cfg.y.imag == 0 else cfg.y
    rows = [[x, complex(r_kernel(x, y, pt, ctx))] for x in _points(cfg)]
    return {"columns": ["x", "R"], "rows": rows, "extra": {"k": k, "y": cfg.y, "lambda": complex(pt.lam)}}


def cmd_scattering(cfg: RunConfig) -> dict:
    from .transform import scattering_S

    ctx = _context(cfg)
    ks = [float(g) for g in cfg.grid] if cfg.grid is not None else [_need_k(cfg).real]
    rows = []
    for k in ks:
        S = scattering_S(k, ctx)
        rows.append([k, S, abs(S)])
    return {"columns": ["k", "S", "abs_S"], "rows": rows}


def cmd_transform(cfg: RunConfig) -> dict:
    from .testfunctions import BUILTIN, evaluate
    from .transform import inverse, parseval_gap, spectral_samples

    if cfg.psi not in BUILTIN:
        raise DomainError(f"unknown test function {cfg.psi!r}; choose from {sorted(BUILTIN)}")
    psi = BUILTIN[cfg.psi]
    ctx = _context(cfg)
    xs = np.asarray(cfg.grid if cfg.grid is not None else [-1.0, 0.0, 1.0], dtype=float)
    s = spectral_samples(psi, ctx)
    rec = inverse(s, xs, ctx).values
    gap = parseval_gap(psi, ctx, samples=s)
    rows = [[float(k), float(np.real(v)), float(w)] for k, v, w in zip(s.grid, s.values, s.weights)]
    recon = [{"x": float(x), "psi": float(np.real(evaluate(psi, x))), "reconstructed": float(np.real(r))}
             for x, r in zip(xs, rec)]
    return {"columns": ["k", "U_psi", "weight"], "rows": rows,
            "extra": {"psi": cfg.psi, "parseval_gap": float(gap), "k_max": float(s.meta["k_max"]),
                      "reconstruction": recon,
                      "round_trip_error": float(max(abs(r["psi"] - r["reconstructed"]) for r in recon))}}


def cmd_verify(cfg: RunConfig):
    from .suites import SUITES, run_suite

    numbers = cfg.suites or tuple(SUITES)
    bad = [n for n in numbers if n not in SUITES]
    if bad:
        raise DomainError(f"no such suite(s): {bad}")
    reports = []
    for n in numbers:
        rep = run_suite(n, b=cfg.b, seed=cfg.seed, floor=cfg.tol or 0.0)
        print(rep.line(), file=sys.stderr, flush=True)
        reports.append(rep)
    rows = [[r.number, c.name, c.residual, c.tol, "pass" if c.passed else "FAIL"] for r in reports for c in r.checks]
    table = {"columns": ["suite", "check", "residual", "tol", "status"], "rows": rows,
             "extra": {"passed": all(r.passed for r in reports),
                       "suites": [{"suite": r.number, "title": r.title, "passed": r.passed,
                                   "max_residual": max(c.residual for c in r.checks),
                                   "seconds": round(r.seconds, 2), "warnings": r.warnings} for r in reports]}}
    return table


HANDLERS = {
    "gamma": cmd_gamma,
    "phi": cmd_phi,
    "jost": cmd_jost,
    "resolvent": cmd_resolvent,
    "transform": cmd_transform,
    "scattering": cmd_scattering,
    "verify": cmd_verify,
}


def run(cfg: RunConfig) -> int:
    try:
        make_params(cfg.coupling)
        if cfg.tol is not None and not (cfg.tol > 0 and math.isfinite(cfg.tol)):
            raise DomainError("--tol must be positive")
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", AccuracyWarning)
            table = HANDLERS[cfg.command](cfg)
        accuracy_warnings = [str(w.message) for w in caught if issubclass(w.category, AccuracyWarning)]
        if accuracy_warnings:
            table.setdefault("extra", {})["accuracy_warnings"] = accuracy_warnings
    except AccuracyError as exc:
        print(f"accuracy failure: {exc}", file=sys.stderr)
        return EXIT_ACCURACY
    except (DomainError, SingularityError, InvalidParameterError) as exc:
        print(f"precondition violated: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    text = render(table, cfg)
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if cfg.command == "verify" and not table["extra"]["passed"]:
        return EXIT_ACCURACY
    return EXIT_OK


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        cfg = parse_args(argv)
    except ParseError as exc:
        print(f"qdspec: {exc}", file=sys.stderr)
        return EXIT_PARSE
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
