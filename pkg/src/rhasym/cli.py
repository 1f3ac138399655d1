"""Batch driver: ``rhasym <command> [--config FILE] [options]``.

Every command writes ``report.json`` ({command, config, metrics, pass}) and
``data.csv`` into ``--out`` and prints a one-line verdict.  Exit status is
0 when every check passes, 1 on a numerical failure and 2 on a bad
configuration.  Options given on the command line override the JSON
config file, whose keys are the option names with underscores.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import airyparametrix as ap
from .asymlab import (DEFAULT_NS, PARAMETRIX_NS, InadmissibleExponents, error_sweep,
                      exponent_budget, lambda_exponent, parametrix_residual)
from .orthocore import PrecisionError, build_system, norm_pn
from .rhframework import JumpData, circle_contour, circle_grid, roundtrip_check
from .szegomodel import build_model
from .weights import WeightSpec

EXIT_PASS, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2

COMMANDS = ("szego-check", "asym-sweep", "parametrix-check", "airy-check", "sie-roundtrip",
            "budget")

DEFAULTS = {
    "weight": "legendre",
    "sigma_plus": 0.0,
    "sigma_minus": 0.0,
    "kappa": 1.0,
    "scale": 1.0,
    "out": ".",
    "n": 100,
    "tol": None,
    "z": "2",
    "region": "outer",
    "ns": None,
    "slack": None,
    "delta": 0.2,
    "samples": 64,
    "center": 1.0,
    "resolutions": [8, 16, 32, 64, 128, 256, 512],
    "strength": 0.3,
    "seed": 0,
    "nu_plus": "inf",
    "nu_minus": "inf",
}


class ConfigError(ValueError):
    pass


# -- configuration ---------------------------------------------------------------

def _int_list(text: str):
    return [int(v) for v in text.replace(",", " ").split()]


def build_parser() -> argparse.ArgumentParser:
    ap_ = argparse.ArgumentParser(prog="rhasym", description=__doc__.splitlines()[0])
    sub = ap_.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file with option defaults")
    common.add_argument("--out", help="output directory (default: current)")
    wopts = argparse.ArgumentParser(add_help=False)
    wopts.add_argument("--weight", help="legendre, chebyshev, endpoint-power, exp_sqrt or "
                                        "exp_linear")
    wopts.add_argument("--sigma-plus", type=float)
    wopts.add_argument("--sigma-minus", type=float)
    wopts.add_argument("--kappa", type=float)
    wopts.add_argument("--scale", type=float)

    p = sub.add_parser("szego-check", parents=[common, wopts],
                       help="||p_n|| against sqrt(pi) D_inf")
    p.add_argument("--n", type=int)
    p.add_argument("--tol", type=float)

    p = sub.add_parser("asym-sweep", parents=[common, wopts],
                       help="oracle against the leading-order formulas")
    p.add_argument("--z", help="evaluation point, e.g. 2 or 0.3 or 0.2+0.1j")
    p.add_argument("--region", choices=("outer", "lens"))
    p.add_argument("--ns", type=_int_list, help="comma-separated degrees")
    p.add_argument("--slack", type=float)

    p = sub.add_parser("parametrix-check", parents=[common, wopts],
                       help="||S N^-1 - I|| on a circle around an endpoint")
    p.add_argument("--delta", type=float)
    p.add_argument("--samples", type=int)
    p.add_argument("--center", type=float)
    p.add_argument("--ns", type=_int_list)
    p.add_argument("--slack", type=float)

    p = sub.add_parser("airy-check", parents=[common], help="Airy jump data suite")
    p.add_argument("--seed", type=int)

    p = sub.add_parser("sie-roundtrip", parents=[common],
                       help="Phi <-> R round trip on a scalar circle jump")
    p.add_argument("--resolutions", type=_int_list)
    p.add_argument("--strength", type=float)

    p = sub.add_parser("budget", parents=[common], help="lambda and Hoelder exponents")
    p.add_argument("--nu-plus")
    p.add_argument("--nu-minus")
    return ap_


def resolve_config(args: argparse.Namespace) -> dict:
    cfg = dict(DEFAULTS)
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                loaded = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config: {exc}") from exc
        if not isinstance(loaded, dict):
            raise ConfigError("config must be a JSON object")
        unknown = set(loaded) - set(DEFAULTS)
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        cfg.update(loaded)
    for key, val in vars(args).items():
        if key in ("command", "config") or val is None:
            continue
        cfg[key] = val
    return cfg


def make_weight(cfg: dict) -> WeightSpec:
    choice = cfg["weight"]
    try:
        if isinstance(choice, dict):
            return WeightSpec.from_record(choice)
        extra = {} if cfg["scale"] == 1.0 else {"scale": float(cfg["scale"])}
        if choice == "legendre":
            return WeightSpec.legendre(**extra)
        if choice in ("chebyshev", "chebyshev-first-kind"):
            return WeightSpec.chebyshev(**extra)
        if choice == "endpoint-power":
            return WeightSpec.endpoint_power(float(cfg["sigma_plus"]),
                                             float(cfg["sigma_minus"]), **extra)
        if choice in ("exp_sqrt", "exp_linear"):
            return WeightSpec.custom(choice, float(cfg["kappa"]), float(cfg["sigma_plus"]),
                                     float(cfg["sigma_minus"]), **extra)
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"invalid weight: {exc}") from exc
    raise ConfigError(f"unknown weight {choice!r}")


def _parse_point(text) -> complex:
    try:
        return complex(str(text).replace(" ", "").replace("i", "j"))
    except ValueError as exc:
        raise ConfigError(f"cannot parse point {text!r}") from exc


def _parse_nu(v):
    if isinstance(v, str) and v.strip().lower() in ("inf", "infinity"):
        return math.inf
    try:
        from fractions import Fraction
        return Fraction(str(v))
    except ValueError as exc:
        raise ConfigError(f"cannot parse exponent {v!r}") from exc


# -- output ---------------------------------------------------------------------------

def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    if isinstance(v, complex):
        return f"{v.real:.17g}{v.imag:+.17g}j"
    return str(v)


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else str(v)
    if isinstance(v, complex):
        return [v.real, v.imag]
    if v is None or isinstance(v, str):
        return v
    return str(v)


def write_outputs(out: Path, command: str, cfg: dict, metrics: dict, passed: bool,
                  header, rows):
    out.mkdir(parents=True, exist_ok=True)
    report = {"command": command, "config": _jsonable(cfg), "metrics": _jsonable(metrics),
              "pass": bool(passed)}
    (out / "report.json").write_text(json.dumps(report, indent=2, sort_keys=True) + "\n",
                                     encoding="utf-8")
    with open(out / "data.csv", "w", newline="", encoding="utf-8") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(header)
        for row in rows:
            wr.writerow([_fmt(v) for v in row])


# -- commands ---------------------------------------------------------------------

def cmd_szego(cfg):
    w = make_weight(cfg)
    n = int(cfg["n"])
    if n < 1:
        raise ConfigError("n must be positive")
    tol = cfg["tol"]
    if tol is None:
        tol = 0.01 if w.family == "legendre" else 0.02
    cfg["tol"] = tol
    sys_ = build_system(w, n)
    m = build_model(w)
    limit = math.sqrt(math.pi) * m.D_inf
    degrees = sorted(set(list(range(10, n + 1, 10)) + [n]))
    rows = []
    for k in degrees:
        nrm = norm_pn(sys_, k)
        rows.append((k, nrm, limit, abs(nrm / limit - 1)))
    err = rows[-1][3]
    metrics = {"weight": w.name, "n": n, "norm": rows[-1][1], "limit": limit,
               "D_inf": m.D_inf, "rel_error": err, "tol": tol}
    return metrics, err <= tol, ("n", "norm", "limit", "rel_error"), rows


def cmd_sweep(cfg):
    w = make_weight(cfg)
    ns = list(DEFAULT_NS) if cfg["ns"] is None else [int(v) for v in cfg["ns"]]
    cfg["ns"] = ns
    slack = 0.05 if cfg["slack"] is None else float(cfg["slack"])
    cfg["slack"] = slack
    z = _parse_point(cfg["z"])
    sys_ = build_system(w, max(ns))
    m = build_model(w)
    try:
        rep = error_sweep(sys_, m, z, ns, region=cfg["region"], slack=slack)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    metrics = {"weight": rep.weight, "region": rep.region, "z": z, "exponent": rep.exponent,
               "lambda": rep.lam, "admissible": rep.admissible, "window_start": rep.window_start,
               "correlation": rep.correlation, "errors": rep.errors}
    return metrics, rep.passed, ("n", "error", "prediction", "oracle"), rep.rows()


def cmd_parametrix(cfg):
    w = make_weight(cfg)
    ns = list(PARAMETRIX_NS) if cfg["ns"] is None else [int(v) for v in cfg["ns"]]
    cfg["ns"] = ns
    slack = 0.2 if cfg["slack"] is None else float(cfg["slack"])
    cfg["slack"] = slack
    center = float(cfg["center"])
    if center not in (1.0, -1.0):
        raise ConfigError("center must be 1 or -1")
    sys_ = build_system(w, max(ns))
    m = build_model(w)
    try:
        rep = parametrix_residual(sys_, m, ns, delta=float(cfg["delta"]),
                                  samples=int(cfg["samples"]), center=center, slack=slack)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    metrics = rep.to_record()
    rows = list(zip(rep.ns, rep.residuals, rep.det_errors))
    return metrics, rep.passed, ("n", "residual", "det_error"), rows


AIRY_THRESHOLDS = {"connection": 1e-8, "jump": 1e-8, "F": 1e-8, "F_cauchy": 1e-8,
                   "det_drift": 1e-10}


def airy_suite(seed: int = 0) -> dict:
    rng = np.random.default_rng(seed)
    r = np.linspace(0.0, 10.0, 41)[1:]
    ang = np.linspace(-math.pi, math.pi, 32, endpoint=False) + math.pi / 64
    grid = (r[:, None] * np.exp(1j * ang[None, :])).ravel()
    radii = np.linspace(0.25, 5.0, 20)
    layout = ap.AirySectorLayout()
    pts = np.empty(0, dtype=complex)
    while pts.size < 50:
        cand = rng.uniform(-5, 5, 50) + 1j * rng.uniform(-5, 5, 50)
        pts = np.concatenate([pts, cand[layout.ray_distance(cand) > 1e-6]])[:50]
    dets = ap.det_upsilon(pts)
    return {
        "cyclic_identity": ap.check_cyclic_airy(),
        "connection": float(np.max(ap.check_connection(grid))),
        "jump": max(ap.jump_residual(j, radii) for j in (1, 2, 3, 4)),
        "F": float(np.max(ap.check_F(pts))),
        "F_cauchy": float(np.max(ap.check_F(pts, method="cauchy"))),
        "det_drift": float(np.max(np.abs(dets - ap.DET_E)) / abs(ap.DET_E)),
    }


def cmd_airy(cfg):
    res = airy_suite(int(cfg["seed"]))
    rows = [("cyclic_identity", res["cyclic_identity"], "exact")]
    ok = res["cyclic_identity"]
    for key, thr in AIRY_THRESHOLDS.items():
        rows.append((key, res[key], thr))
        ok = ok and res[key] <= thr
    metrics = dict(res, thresholds=AIRY_THRESHOLDS)
    return metrics, ok, ("check", "value", "threshold"), rows


def scalar_exp_jump(strength: float = 0.3) -> JumpData:
    """v(k) = exp(c/k) on the unit circle: R = 1 inside, exp(-c/z) outside."""
    return JumpData(circle_contour(), lambda k: np.exp(strength / k), True)


def cmd_sie(cfg):
    res_list = sorted(int(v) for v in cfg["resolutions"])
    if not res_list or res_list[0] < 4:
        raise ConfigError("resolutions must be >= 4")
    j = scalar_exp_jump(float(cfg["strength"]))
    reps = [roundtrip_check(j, circle_grid(m)) for m in res_list]
    rows = [(r.resolution, r.residual_jump, r.residual_sie, r.condition_number) for r in reps]
    worst = [max(r.residual_jump, r.residual_sie) for r in reps]
    spectral = True
    for (m0, e0), (m1, e1) in zip(zip(res_list, worst), zip(res_list[1:], worst[1:])):
        if m1 == 2 * m0 and e0 > 1e-12 and e1 > e0 / 10:
            spectral = False
    final = worst[-1]
    ok = final <= 1e-8 and spectral
    metrics = {"final_residual": final, "resolution": res_list[-1], "spectral": spectral,
               "residuals": worst}
    return metrics, ok, ("resolution", "residual_jump", "residual_sie", "condition"), rows


def cmd_budget(cfg):
    nup, num = _parse_nu(cfg["nu_plus"]), _parse_nu(cfg["nu_minus"])
    try:
        lam, admissible = lambda_exponent(nup, num)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    metrics = {"lambda": str(lam), "lambda_float": float(lam), "admissible": admissible}
    rows = [("lambda", str(lam), float(lam)), ("admissible", admissible, "")]
    ok = admissible
    if admissible:
        b = exponent_budget(nup, num)
        rec = b.to_record()
        metrics.update(budget=rec, reciprocal_sum=str(b.reciprocal_sum()))
        ok = b.reciprocal_sum() == 1
        for key in ("p", "theta", "tau", "omega", "q", "chi", "r", "s", "nu0"):
            val = getattr(b, key)
            rows.append((key, rec[key], float(val)))
        rows.append(("reciprocal_sum", str(b.reciprocal_sum()), float(b.reciprocal_sum())))
    return metrics, ok, ("quantity", "exact", "value"), rows


HANDLERS = {
    "szego-check": cmd_szego,
    "asym-sweep": cmd_sweep,
    "parametrix-check": cmd_parametrix,
    "airy-check": cmd_airy,
    "sie-roundtrip": cmd_sie,
    "budget": cmd_budget,
}


def run(command: str, cfg: dict) -> int:
    """Execute one command with a resolved config; returns the exit code."""
    try:
        metrics, ok, header, rows = HANDLERS[command](cfg)
    except ConfigError as exc:
        print(f"CONFIG ERROR {command}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (PrecisionError, InadmissibleExponents) as exc:
        print(f"CONFIG ERROR {command}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"FAIL {command}: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except ValueError as exc:
        # invalid inputs reaching the library (weights, points, degree lists)
        print(f"CONFIG ERROR {command}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    write_outputs(Path(cfg["out"]), command, cfg, metrics, ok, header, rows)
    summary = ", ".join(f"{k}={_fmt(v)}" for k, v in metrics.items()
                        if isinstance(v, (int, float, str, bool)) and k != "weight")
    print(f"{'PASS' if ok else 'FAIL'} {command}: {summary}")
    return EXIT_PASS if ok else EXIT_FAIL


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_CONFIG
    try:
        cfg = resolve_config(args)
    except ConfigError as exc:
        print(f"CONFIG ERROR: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return run(args.command, cfg)


if __name__ == "__main__":
    sys.exit(main())
