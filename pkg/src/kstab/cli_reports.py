"""Command-line front end and report writer.

Every command loads a model, runs one library operation and writes a
self-describing JSON (or CSV) report.  Reports contain no timestamps or
host data, so the same inputs and seed give byte-identical output.

Exit status: 0 on success, 2 when the answer is undetermined, 1 on error.
Errors are printed to stderr as JSON with a stable ``code``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np
import scipy

from . import __version__
from . import blowup_futaki as bf
from . import burns_simanca as bs
from . import stability_engine as se
from .action_algebra import FactorGeometry, LINALG_TOL, element_coordinates, gram_matrix
from .errors import (DimensionError, InputError, KstabError, SchemaError, UsageError,
                     ValidationError)
from .kahler_models import ModelSpec, decode_matrix, laplacian_moment, moment_value

COMMANDS = ("weight", "classify", "orbit-zero", "alldelta", "futaki", "inner-product",
            "bs-solve", "decay", "obstruction", "verdict", "sweep", "validate")
BLOWUP_COMMANDS = {"futaki", "inner-product", "decay", "obstruction", "verdict", "sweep"}
SWEEP_QUANTITIES = ("inner-product", "futaki", "sbar", "volume")
DEFAULT_DELTA_GRID = (0.01, 0.02, 0.05, 0.1)
DEFAULT_EPS_GRID = (0.02, 0.03, 0.05, 0.07, 0.1)
EXIT_OK, EXIT_ERROR, EXIT_UNDETERMINED = 0, 1, 2
DEMO_DIR = Path(__file__).resolve().parent / "demos"


# --------------------------------------------------------------------------
# configuration
# --------------------------------------------------------------------------

@dataclass
class RunConfig:
    command: str
    model_path: str | None = None
    eps: float = 0.1
    delta_grid: tuple = DEFAULT_DELTA_GRID
    eps_grid: tuple = DEFAULT_EPS_GRID
    point: list | None = None
    gen: int | None = None
    gen2: int | None = None
    xi: list | None = None
    eta: list | None = None
    m: int | None = None
    quantity: str = "inner-product"
    out: str | None = None
    format: str = "json"
    seed: int = 0
    n_directions: int = 200
    extra: dict = field(default_factory=dict)

    def echo(self) -> dict:
        doc = asdict(self)
        doc.pop("extra")
        doc.pop("out")
        return {k: (list(v) if isinstance(v, tuple) else v) for k, v in doc.items()}


def worker_count() -> int:
    """Size of the sweep worker pool; ``KSTAB_THREADS`` caps it."""
    n = os.cpu_count() or 1
    cap = os.environ.get("KSTAB_THREADS")
    if cap:
        try:
            n = min(n, max(1, int(cap)))
        except ValueError as exc:
            raise UsageError("KSTAB_THREADS must be a positive integer", value=cap) from exc
    return n


def parallel_map(fn: Callable, items: Sequence) -> list:
    """Order-preserving map over a thread pool (results do not depend on scheduling)."""
    n = min(worker_count(), len(items))
    if n <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


# --------------------------------------------------------------------------
# model validation
# --------------------------------------------------------------------------

def _diag(code: str, message: str, severity: str = "error", **where) -> dict:
    return {"code": code, "severity": severity, "message": message, **where}


def validate_model(path, command: str | None = None) -> list[dict]:
    """All problems found in a model file, without stopping at the first.

    Checks the schema, shapes, Hermitian symmetry of each generator block,
    the torus marking, positivity of the Gram matrix, bracket closure and,
    for blowup commands, the dimension restriction m > 2.
    """
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        return [_diag("E_IO", f"cannot read {path}: {exc.strerror or exc}")]
    except json.JSONDecodeError as exc:
        return [_diag("E_SCHEMA", f"invalid JSON: {exc}")]
    return validate_document(doc, command)


def validate_document(doc, command: str | None = None) -> list[dict]:
    out = []
    if not isinstance(doc, dict):
        return [_diag("E_SCHEMA", "model document must be a JSON object")]
    for key in ("factors", "generators"):
        if key not in doc:
            out.append(_diag("E_SCHEMA", f"missing required key {key!r}", key=key))
    if out:
        return out
    dims = []
    for i, f in enumerate(doc["factors"]):
        try:
            n, a = int(f["dim"]), float(f["scale"])
        except (KeyError, TypeError, ValueError):
            out.append(_diag("E_SCHEMA", f"factor {i} needs integer 'dim' and numeric 'scale'",
                             factor=i))
            continue
        if n < 1 or not a > 0:
            out.append(_diag("E_VALIDATION", f"factor {i} needs dim >= 1 and scale > 0",
                             factor=i))
        dims.append(n)
    if out:
        return out
    gens = []
    for k, g in enumerate(doc["generators"]):
        if not isinstance(g, list) or len(g) != len(dims):
            out.append(_diag("E_SCHEMA", f"generator {k} needs one block per factor",
                             generator=k))
            continue
        blocks, ok = [], True
        for i, (b, n) in enumerate(zip(g, dims)):
            try:
                arr = decode_matrix(b)
            except (SchemaError, TypeError, ValueError) as exc:
                out.append(_diag("E_SCHEMA", f"generator {k} block {i}: {exc}",
                                 generator=k, block=i))
                ok = False
                continue
            if arr.shape != (n + 1, n + 1):
                out.append(_diag("E_SCHEMA", f"generator {k} block {i} has shape {arr.shape}, "
                                 f"expected {(n + 1, n + 1)}", generator=k, block=i))
                ok = False
            elif np.max(np.abs(arr - arr.conj().T)) > LINALG_TOL:
                out.append(_diag("E_VALIDATION", f"generator {k} block {i} is not Hermitian "
                                 "(the matrix must equal its conjugate transpose)",
                                 generator=k, block=i))
                ok = False
            blocks.append(arr)
        if ok:
            gens.append(tuple(blocks))
    if not doc["generators"]:
        out.append(_diag("E_VALIDATION", "at least one generator is required"))
    if out:
        return out
    geom = FactorGeometry(tuple(dims), tuple(float(f["scale"]) for f in doc["factors"]))
    gram = gram_matrix(geom, gens)
    evals = np.linalg.eigvalsh(gram)
    if evals[0] <= LINALG_TOL * max(1.0, evals[-1]):
        out.append(_diag("E_VALIDATION", "Gram matrix is not positive definite: remove "
                         "linearly dependent generators", min_eigenvalue=float(evals[0])))
    torus = doc.get("torus", [])
    bad = [t for t in torus if not isinstance(t, int) or not 0 <= t < len(gens)]
    if bad:
        out.append(_diag("E_VALIDATION", f"torus indices out of range: {bad}", torus=bad))
    else:
        for x in torus:
            for y in torus:
                if x < y and any(np.max(np.abs(a @ b - b @ a)) > 1e-9
                                 for a, b in zip(gens[x], gens[y])):
                    out.append(_diag("E_VALIDATION", f"torus generators {x} and {y} do not "
                                     "commute", torus=[x, y]))
    if not out:
        try:
            model = ModelSpec.from_dict(doc)
        except KstabError as exc:
            out.append(_diag(exc.code, str(exc)))
        else:
            if "point" in doc:
                try:
                    model.point()
                except KstabError as exc:
                    out.append(_diag(exc.code, f"default point: {exc}"))
            m = model.m
            if m <= 2 and command in BLOWUP_COMMANDS:
                out.append(_diag("E_DIMENSION", f"command {command!r} needs complex dimension "
                                 f"m > 2 (this model has m = {m})", m=m))
    return out


# --------------------------------------------------------------------------
# helpers
# --------------------------------------------------------------------------

def resolve_model_path(name: str) -> Path:
    """A file path, or the name of a shipped demo."""
    path = Path(name)
    if not path.exists() and (DEMO_DIR / f"{name}.json").exists():
        return DEMO_DIR / f"{name}.json"
    return path


def load_model(cfg: RunConfig) -> ModelSpec:
    if cfg.model_path is None:
        raise UsageError(f"command {cfg.command!r} needs --model")
    path = resolve_model_path(cfg.model_path)
    diags = [d for d in validate_model(path, cfg.command) if d["severity"] == "error"]
    if diags:
        first = diags[0]
        cls = {"E_IO": InputError, "E_SCHEMA": SchemaError,
               "E_DIMENSION": DimensionError}.get(first["code"], ValidationError)
        raise cls(first["message"], diagnostics=diags)
    return ModelSpec.load(path)


def _point(cfg: RunConfig, model: ModelSpec):
    return model.point(cfg.point)


def _element(model: ModelSpec, gen: int | None, raw, name: str) -> np.ndarray:
    dim = model.algebra.dim
    if raw is not None:
        arr = raw
        if all(isinstance(x, (int, float)) for x in arr):
            if len(arr) != dim:
                raise UsageError(f"{name} needs {dim} coordinates", got=len(arr))
            return np.asarray(arr, float)
        return element_coordinates(model.algebra, [decode_matrix(b) for b in arr])
    if gen is None:
        raise UsageError(f"this command needs --{'gen' if name == 'xi' else 'gen2'} or --{name}")
    if not 0 <= gen < dim:
        raise UsageError(f"generator index {gen} out of range [0, {dim})")
    return np.eye(dim)[gen]


def _context(cfg: RunConfig, model: ModelSpec, eps: float | None = None) -> bf.BlowupContext:
    return bf.BlowupContext.create(model, _point(cfg, model), cfg.eps if eps is None else eps)


def _slope(eps, values) -> float | None:
    eps, values = np.asarray(eps, float), np.abs(np.asarray(values, float))
    keep = values > 0
    if keep.sum() < 2:
        return None
    return float(np.polyfit(np.log(eps[keep]), np.log(values[keep]), 1)[0])


def tolerances(command: str) -> dict:
    tol = {"residual_tol": se.RESIDUAL_TOL, "weight_tol": se.WEIGHT_TOL,
           "stabilizer_tol": se.STABILIZER_TOL}
    if command in {"futaki", "inner-product", "obstruction", "verdict", "sweep", "decay",
                   "bs-solve"}:
        tol.update({"ode_rtol": bs.ODE_RTOL, "quadrature_rtol": bs.QUAD_RTOL,
                    "quadrature_rule": "gauss-kronrod 21 on log-radius panels",
                    "cutoff_order": bs.CUTOFF_ORDER, "fixed_point_tol": bf.FIXED_TOL,
                    "calibration_tol": bf.CALIBRATION_TOL})
    return tol


def convention_block(m: int | None) -> dict:
    if m is None or m < 3:
        return {"calibrated": False, "reason": "no blowup in this command"}
    return bf.calibrate_convention(m).to_dict()


# --------------------------------------------------------------------------
# commands
# --------------------------------------------------------------------------

def cmd_weight(cfg, model):
    p = _point(cfg, model)
    xi = _element(model, cfg.gen, cfg.xi, "xi")
    return se.weight(model, p, xi).to_dict(), EXIT_OK


def cmd_classify(cfg, model):
    delta = float(cfg.extra.get("delta", 0.0))
    v = se.classify(model, _point(cfg, model), n_directions=cfg.n_directions, seed=cfg.seed,
                    delta=delta)
    return v.to_dict(), EXIT_UNDETERMINED if v.classification == "undetermined" else EXIT_OK


def cmd_orbit_zero(cfg, model):
    p = _point(cfg, model)
    red = se.reduction(model, p, seed=cfg.seed)
    zeros = [se.find_orbit_zero(model, p, d, red.t_perp, cfg.seed).to_dict()
             for d in cfg.delta_grid]
    status = EXIT_OK if all(z["found"] for z in zeros) else EXIT_UNDETERMINED
    return {"t_perp_dim": int(red.t_perp.shape[1]), "zeros": zeros}, status


def cmd_alldelta(cfg, model):
    rep = se.alldelta_check(model, _point(cfg, model), cfg.delta_grid,
                            n_directions=cfg.n_directions, seed=cfg.seed)
    return rep.to_dict(), EXIT_OK if rep.consistent else EXIT_UNDETERMINED


def cmd_futaki(cfg, model):
    ctx = _context(cfg, model)
    xi = _element(model, cfg.gen, cfg.xi, "xi")
    exp = bf.futaki_blowup(ctx, xi)
    return {"context": ctx.to_dict(), "xi": xi.tolist(),
            "deltas": list(bf.blowup_integral_deltas(ctx, xi)), "expansion": exp.to_dict()}, EXIT_OK


def cmd_inner_product(cfg, model):
    ctx = _context(cfg, model)
    v = _element(model, cfg.gen, cfg.xi, "xi")
    w = _element(model, cfg.gen2, cfg.eta, "eta")
    method = cfg.extra.get("method", "localization")
    val = bf.inner_product_blowup(ctx, v, w, method=method)
    return {"context": ctx.to_dict(), "xi": v.tolist(), "eta": w.tolist(), "method": method,
            "base_inner_product": float(model.algebra.inner(v, w)), "value": val}, EXIT_OK


def cmd_bs_solve(cfg, model):
    m = cfg.m if cfg.m is not None else (model.m if model is not None else None)
    if m is None:
        raise UsageError("bs-solve needs --m or --model")
    r_max = float(cfg.extra.get("r_max", 100.0))
    prof = bs.solve_profile(m, r_max=r_max)
    header = prof.header()
    files = []
    if cfg.out:
        stem = Path(cfg.out)
        stem = stem.with_suffix("") if stem.suffix in (".csv", ".json") else stem
        files = [str(f) for f in prof.save(stem)]
    return {"profile": header, "files": files,
            "exact": {"d0": bs.leading_coefficient(m), "d1": bs.second_coefficient(m)}}, EXIT_OK


def cmd_decay(cfg, model):
    p = _point(cfg, model)
    prof = bs.solve_profile(model.m)
    ctxs = [bs_ctx for bs_ctx in (bf._Ctx(model, p, e) for e in cfg.eps_grid)]
    rep = bs.curvature_decay(ctxs, prof)
    return rep.to_dict(), EXIT_UNDETERMINED if rep.flagged else EXIT_OK


def cmd_obstruction(cfg, model):
    ctx = _context(cfg, model)
    prof = bs.solve_profile(model.m)
    obs = bf.gluing_obstruction(ctx, prof.d1)
    return {"context": ctx.to_dict(), "d1": prof.d1, "obstruction": obs.to_dict(),
            "mu_p": moment_value(model, ctx.p).coeffs.tolist(),
            "laplacian_mu_p": laplacian_moment(model, ctx.p).coeffs.tolist()}, EXIT_OK


def cmd_verdict(cfg, model):
    ctx = _context(cfg, model)
    rep = bf.verdict(ctx, cfg.delta_grid, n_directions=cfg.n_directions, seed=cfg.seed)
    return rep.to_dict(), EXIT_UNDETERMINED if rep.verdict == "undetermined" else EXIT_OK


def cmd_sweep(cfg, model):
    q = cfg.quantity
    if q not in SWEEP_QUANTITIES:
        raise UsageError(f"unknown sweep quantity {q!r}", allowed=list(SWEEP_QUANTITIES))
    p = _point(cfg, model)
    if q in ("inner-product", "futaki"):
        v = _element(model, cfg.gen, cfg.xi, "xi")
    if q == "inner-product":
        w = _element(model, cfg.gen2, cfg.eta, "eta")

    def one(e):
        ctx = bf.BlowupContext.create(model, p, e)
        if q == "inner-product":
            return bf.inner_product_blowup(ctx, v, w)
        if q == "futaki":
            return bf.futaki_blowup(ctx, v).fut_blowup
        if q == "sbar":
            return ctx.sbar_eps - ctx.sbar
        return ctx.V - ctx.V_eps

    grid = sorted(float(e) for e in cfg.eps_grid)
    values = parallel_map(one, grid)
    m = model.m
    expected = {"inner-product": 2 * m, "futaki": 2 * m - 2, "sbar": 2 * m - 2,
                "volume": 2 * m}[q]
    return {"quantity": q, "sweeps": [{"eps": e, "value": val} for e, val in zip(grid, values)],
            "slope": _slope(grid, values), "reference_slope": expected}, EXIT_OK


HANDLERS = {"weight": cmd_weight, "classify": cmd_classify, "orbit-zero": cmd_orbit_zero,
            "alldelta": cmd_alldelta, "futaki": cmd_futaki, "inner-product": cmd_inner_product,
            "bs-solve": cmd_bs_solve, "decay": cmd_decay, "obstruction": cmd_obstruction,
            "verdict": cmd_verdict, "sweep": cmd_sweep}


# --------------------------------------------------------------------------
# reports
# --------------------------------------------------------------------------

def _clean(obj):
    """JSON-safe copy: numpy scalars unwrapped, non-finite floats as strings."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return _clean(obj.item())
    if isinstance(obj, float) and not math.isfinite(obj):
        return "nan" if math.isnan(obj) else ("inf" if obj > 0 else "-inf")
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if obj is None or isinstance(obj, (bool, int, float, str)):
        return obj
    if hasattr(obj, "to_json"):
        return obj.to_json()
    if hasattr(obj, "to_dict"):
        return _clean(obj.to_dict())
    return repr(obj)


def dumps(doc) -> str:
    return json.dumps(_clean(doc), sort_keys=True, indent=2, allow_nan=False) + "\n"


def build_report(cfg: RunConfig, model: ModelSpec | None, result: dict, status: int) -> dict:
    m = cfg.m if model is None else model.m
    return {
        "command": cfg.command,
        "status": {EXIT_OK: "ok", EXIT_UNDETERMINED: "undetermined"}.get(status, "error"),
        "inputs": {"config": cfg.echo(), "model": None if model is None else model.to_dict()},
        "versions": {"kstab": __version__, "numpy": np.__version__, "scipy": scipy.__version__},
        "convention": convention_block(m) if cfg.command in BLOWUP_COMMANDS else
        {"calibrated": False, "reason": "no blowup in this command"},
        "tolerances": tolerances(cfg.command),
        "result": result,
    }


def _flatten(prefix: str, obj, rows: list):
    if isinstance(obj, dict):
        for k in sorted(obj):
            _flatten(f"{prefix}.{k}" if prefix else str(k), obj[k], rows)
    elif isinstance(obj, list) and obj and all(not isinstance(x, (dict, list)) for x in obj):
        rows.append((prefix, json.dumps(obj)))
    elif isinstance(obj, list):
        for i, x in enumerate(obj):
            _flatten(f"{prefix}[{i}]", x, rows)
    else:
        rows.append((prefix, obj))


def to_csv(report: dict) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    result = _clean(report["result"])
    if "sweeps" in result and result["sweeps"] and "eps" in result["sweeps"][0]:
        writer.writerow(["eps", "value"])
        for row in result["sweeps"]:
            writer.writerow([repr(row["eps"]), repr(row["value"])])
        return buf.getvalue()
    writer.writerow(["key", "value"])
    rows: list = []
    _flatten("", result, rows)
    writer.writerows(rows)
    return buf.getvalue()


def emit(report: dict, cfg: RunConfig, stdout=None) -> None:
    stdout = stdout or sys.stdout
    text = dumps(report) if cfg.format == "json" else to_csv(report)
    if cfg.out is None or cfg.command == "bs-solve":
        if cfg.command == "bs-solve" and cfg.out is not None:
            text = dumps(report)
        stdout.write(text)
        return
    out = Path(cfg.out)
    try:
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text, encoding="utf-8")
        if cfg.format == "csv":
            out.with_suffix(".json").write_text(dumps(report), encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot write {out}: {exc.strerror or exc}") from exc


def run(cfg: RunConfig, stdout=None) -> int:
    """Execute one configuration; returns the exit status."""
    if cfg.command == "validate":
        if cfg.model_path is None:
            raise UsageError("validate needs --model")
        diags = validate_model(resolve_model_path(cfg.model_path),
                               cfg.extra.get("for_command"))
        doc = {"model": cfg.model_path, "diagnostics": diags,
               "valid": not any(d["severity"] == "error" for d in diags)}
        (stdout or sys.stdout).write(dumps(doc))
        return EXIT_OK if doc["valid"] else EXIT_ERROR
    if cfg.command not in HANDLERS:
        raise UsageError(f"unknown command {cfg.command!r}", allowed=list(COMMANDS))
    for d in cfg.delta_grid:
        if not 0 < d <= se.DEFAULT_DELTA0:
            raise UsageError(f"delta {d} outside (0, {se.DEFAULT_DELTA0}]")
    if cfg.format not in ("json", "csv"):
        raise UsageError("--format must be json or csv")
    needs_model = cfg.command != "bs-solve" or cfg.m is None
    model = load_model(cfg) if needs_model else None
    result, status = HANDLERS[cfg.command](cfg, model)
    emit(build_report(cfg, model, result, status), cfg, stdout)
    return status


# --------------------------------------------------------------------------
# argument parsing
# --------------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _floats(text: str) -> tuple:
    try:
        return tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError as exc:
        raise UsageError(f"expected comma-separated numbers, got {text!r}") from exc


def _json_arg(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"invalid JSON argument: {exc}") from exc


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="kstab", description="Stability and Futaki computations for blowups "
                 "of products of projective spaces.")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--model", help="model JSON file or the name of a shipped demo")
    ap.add_argument("--eps", type=float, default=0.1)
    ap.add_argument("--delta-grid", type=_floats, default=DEFAULT_DELTA_GRID)
    ap.add_argument("--eps-grid", type=_floats, default=DEFAULT_EPS_GRID)
    ap.add_argument("--delta", type=float, default=0.0, help="perturbation for classify")
    ap.add_argument("--point", type=_json_arg, help="point as per-factor coordinate lists")
    ap.add_argument("--gen", type=int)
    ap.add_argument("--gen2", type=int)
    ap.add_argument("--xi", type=_json_arg, help="element coordinates or per-factor blocks")
    ap.add_argument("--eta", type=_json_arg, help="second element for inner products")
    ap.add_argument("--m", type=int, help="dimension for bs-solve without a model")
    ap.add_argument("--r-max", type=float, default=100.0)
    ap.add_argument("--quantity", default="inner-product", choices=SWEEP_QUANTITIES)
    ap.add_argument("--method", default="localization", choices=("localization", "radial"))
    ap.add_argument("--for-command", help="validate: also check restrictions of this command")
    ap.add_argument("--directions", type=int, default=200)
    ap.add_argument("--out")
    ap.add_argument("--format", default="json", choices=("json", "csv"))
    ap.add_argument("--seed", type=int, default=0)
    return ap


def config_from_args(argv: Sequence[str] | None = None) -> RunConfig:
    ns = build_parser().parse_args(argv)
    return RunConfig(command=ns.command, model_path=ns.model, eps=ns.eps,
                     delta_grid=ns.delta_grid, eps_grid=ns.eps_grid, point=ns.point,
                     gen=ns.gen, gen2=ns.gen2, xi=ns.xi, eta=ns.eta, m=ns.m,
                     quantity=ns.quantity, out=ns.out, format=ns.format, seed=ns.seed,
                     n_directions=ns.directions,
                     extra={"delta": ns.delta, "r_max": ns.r_max, "method": ns.method,
                            "for_command": ns.for_command})


def main(argv: Sequence[str] | None = None) -> int:
    try:
        cfg = config_from_args(argv)
        return run(cfg)
    except KstabError as exc:
        sys.stderr.write(json.dumps({"error": _clean(exc.to_dict())}, sort_keys=True) + "\n")
        return EXIT_ERROR
    except Exception as exc:  # noqa: BLE001 - last-resort reporting with a stable code
        sys.stderr.write(json.dumps({"error": {"code": "E_INTERNAL", "message": repr(exc)}},
                                    sort_keys=True) + "\n")
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
