"""Batch front-end: parse a run configuration, execute the requested checks,
and emit machine-readable reports.

A run is described by a JSON config file (key-value with nesting) or by
flags; flags override file values. Reports echo the fully normalized
configuration so a report alone reproduces its run. JSON output is canonical
(sorted keys, two-space indent) and byte-identical across repeat runs except
for the wall_clock_seconds field.

Exit codes: 0 all checks passed, 1 at least one check failed, 2 invalid
input or configuration.
"""

import argparse
import csv
import json
import platform
import sys
import time
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np
import scipy

from . import __version__
from .cp import CpObjectiveKind, find_constant
from .cubature import IntegrationSettings
from .fields import TestFieldSpec, build_extremal_field, build_test_field
from .geometry import (
    Point,
    SpaceParams,
    div_weighted_rho_closed_form,
    fd_divergence,
    grad_gamma_rho,
    radial_coords,
    rho,
)
from .verifier import (
    CknParams,
    sharpness_probe,
    verify_ckn,
    verify_hpw,
    verify_identity,
    verify_inequality,
    verify_remainder_p_ge2,
    verify_remainder_p_lt2,
)
from .weights import condition_report, make_pair

__all__ = ["RunConfig", "run", "report_export", "main"]

CHECK_NAMES = (
    "identity",
    "inequality",
    "remainder_pge2",
    "remainder_plt2",
    "sharpness",
    "ckn",
    "hpw",
    "divergence",
    "condition",
)

CONSTANT_KINDS = {
    "cp": "cp_pge2",
    "c1": "c1_inf",
    "c2": "c2_sup",
    "c3": "c3_min",
}

HPW_CASE_FOR_PAIR = {
    "nch_ball": "ball_nch",
    "dambrosio_power": "whole_dambrosio",
    "log_ball": "log_ball",
}

DEFAULT_PAIR_PARAMS = {
    "dambrosio_power": {"alpha": 0.0, "beta": 0.0},
    "nch_ball": {"R": 4.0},
    "darca_power": {"theta": 0.5, "alpha": 1.0, "R": 1e30},
    "log_ball": {"alpha": -3.0, "R": 4.0},
}

DIVERGENCE_COMBOS = ((0.0, 0.0), (1.0, -1.0), (-1.0, 1.0))


@dataclass(frozen=True)
class RunConfig:
    """Normalized run description; every field is echoed into the report."""

    space: SpaceParams
    pair_id: str
    pair_params: Dict[str, float]
    p: float
    field: Dict[str, object]
    quadrature: IntegrationSettings
    checks: Tuple[str, ...]
    ckn: Optional[CknParams]
    seed: int


def _take(data: Dict, allowed: Dict[str, object], section: str) -> Dict:
    out = dict(allowed)
    for key, value in data.items():
        if key not in allowed:
            raise ValueError(f"unknown {section} key {key!r}")
        out[key] = value
    return out


def _num(value: object, label: str) -> float:
    """Reject config values that are not plain numbers; a nested structure
    in a numeric slot would otherwise surface as a bare TypeError."""
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValueError(f"{label} must be a number")
    return float(value)


def config_from_dict(data: Dict) -> RunConfig:
    """Build and validate a RunConfig; raises ValueError on any bad value."""
    known = {"space", "pair", "p", "field", "quadrature", "checks", "ckn", "seed"}
    for key in data:
        if key not in known:
            raise ValueError(f"unknown config key {key!r}")
    if "space" not in data or "pair" not in data:
        raise ValueError("config requires 'space' and 'pair' sections")

    sp = _take(data["space"], {"m": 1, "k": 1, "gamma": 1.0}, "space")
    space = SpaceParams(
        int(_num(sp["m"], "space.m")),
        int(_num(sp["k"], "space.k")),
        _num(sp["gamma"], "space.gamma"),
    )

    pair_section = dict(data["pair"])
    pair_id = pair_section.pop("id", None)
    if pair_id is None:
        raise ValueError("pair section requires an 'id'")
    pair_params = {k: _num(v, f"pair.{k}") for k, v in pair_section.items()}

    p = _num(data.get("p", 2.0), "p")

    defaults = {
        "family": None,
        "inner_rho": 0.5,
        "outer_rho": 2.0,
        "x_floor": None,
        "smoothness_margin": 0.25,
        "phase_kappa": 0.0,
        "truncation_level": 0,
    }
    field_cfg = _take(dict(data.get("field", {})), defaults, "field")
    if field_cfg["family"] is not None and not isinstance(field_cfg["family"], str):
        raise ValueError("field.family must be a string")
    for key in ("inner_rho", "outer_rho", "smoothness_margin", "phase_kappa"):
        field_cfg[key] = _num(field_cfg[key], f"field.{key}")
    if field_cfg["x_floor"] is not None:
        field_cfg["x_floor"] = _num(field_cfg["x_floor"], "field.x_floor")
    field_cfg["truncation_level"] = int(
        _num(field_cfg["truncation_level"], "field.truncation_level")
    )

    quad = _take(
        dict(data.get("quadrature", {})),
        {"rel_tol": 1e-8, "abs_tol": 1e-12, "max_evals": 50_000_000, "rule": None},
        "quadrature",
    )
    if quad["rule"] is not None and not isinstance(quad["rule"], str):
        raise ValueError("quadrature.rule must be a string")
    settings = IntegrationSettings(
        rel_tol=_num(quad["rel_tol"], "quadrature.rel_tol"),
        abs_tol=_num(quad["abs_tol"], "quadrature.abs_tol"),
        max_evals=int(_num(quad["max_evals"], "quadrature.max_evals")),
        rule=quad["rule"],
    )

    raw_checks = data.get("checks", [])
    if isinstance(raw_checks, str) or not all(isinstance(c, str) for c in raw_checks):
        raise ValueError("checks must be a list of check names")
    checks = tuple(raw_checks)
    for name in checks:
        if name not in CHECK_NAMES:
            raise ValueError(f"unknown check {name!r}; expected one of {CHECK_NAMES}")

    ckn = None
    if data.get("ckn") is not None:
        ck = _take(
            dict(data["ckn"]),
            {"p": p, "q": 2.0, "r": 2.0, "delta": 0.5, "b": -0.5, "c": 0.0},
            "ckn",
        )
        ckn = CknParams(
            p=_num(ck["p"], "ckn.p"),
            q=_num(ck["q"], "ckn.q"),
            r=_num(ck["r"], "ckn.r"),
            delta=_num(ck["delta"], "ckn.delta"),
            b=_num(ck["b"], "ckn.b"),
            c=_num(ck["c"], "ckn.c"),
        )

    seed = int(_num(data.get("seed", 0), "seed"))
    return RunConfig(
        space=space,
        pair_id=str(pair_id),
        pair_params=pair_params,
        p=p,
        field=field_cfg,
        quadrature=settings,
        checks=checks,
        ckn=ckn,
        seed=seed,
    )


def config_to_dict(config: RunConfig) -> Dict:
    pair = {"id": config.pair_id}
    pair.update(config.pair_params)
    field = dict(config.field)
    return {
        "space": {"m": config.space.m, "k": config.space.k, "gamma": config.space.gamma},
        "pair": pair,
        "p": config.p,
        "field": field,
        "quadrature": {
            "rel_tol": config.quadrature.rel_tol,
            "abs_tol": config.quadrature.abs_tol,
            "max_evals": config.quadrature.max_evals,
            "rule": config.quadrature.rule,
        },
        "checks": list(config.checks),
        "ckn": None
        if config.ckn is None
        else {
            "p": config.ckn.p,
            "q": config.ckn.q,
            "r": config.ckn.r,
            "delta": config.ckn.delta,
            "b": config.ckn.b,
            "c": config.ckn.c,
        },
        "seed": config.seed,
    }


def _build_objects(config: RunConfig):
    """Pair, field, and the normalized field echo for a run.

    The config may leave family and x_floor open; the defaults depend on the
    pair (a pair singular on {x=0} gets the quarter-inner-radius tube), so
    they are resolved here and returned for the report echo.
    """
    pair = make_pair(
        config.pair_id,
        config.space,
        config.p,
        config.pair_params,
    )
    field_cfg = dict(config.field)
    family = field_cfg["family"]
    x_floor = field_cfg["x_floor"]
    if x_floor is None:
        x_floor = 0.25 * float(field_cfg["inner_rho"]) if pair.x_singular else 0.0
    if family is None:
        family = "bump_radial_x_cutoff" if x_floor > 0.0 else "bump_radial"
    field_cfg["family"] = family
    field_cfg["x_floor"] = x_floor

    level = int(field_cfg["truncation_level"])
    if family == "extremal_truncated":
        params = dict(config.pair_params)
        params["p"] = config.p
        field = build_extremal_field(
            config.space, config.pair_id, params, truncation_level=level
        )
    else:
        spec = TestFieldSpec(
            family=family,
            inner_rho=float(field_cfg["inner_rho"]),
            outer_rho=float(field_cfg["outer_rho"]),
            x_floor=float(x_floor),
            smoothness_margin=float(field_cfg["smoothness_margin"]),
            phase_kappa=float(field_cfg["phase_kappa"]),
            R=pair.radius if pair.radius is not None else float("inf"),
        )
        field = build_test_field(config.space, spec)
    return pair, field, field_cfg


def _validate_checks(config: RunConfig, pair, field) -> None:
    """Every referenced check's preconditions, before any integration."""
    zero_phi = ("dambrosio_power", "darca_power")
    for name in config.checks:
        if name == "remainder_pge2":
            if pair.id not in zero_phi:
                raise ValueError("remainder bounds need a pair with phi identically 0")
            if config.p < 2.0:
                raise ValueError("remainder_pge2 needs p >= 2")
        elif name == "remainder_plt2":
            if pair.id not in zero_phi:
                raise ValueError("remainder bounds need a pair with phi identically 0")
            if not 1.0 < config.p < 2.0:
                raise ValueError("remainder_plt2 needs 1 < p < 2")
        elif name == "ckn":
            if config.ckn is None:
                raise ValueError("ckn check requires a ckn section in the config")
            if abs(config.ckn.p - config.p) > 1e-12:
                raise ValueError("CknParams p must match the pair's p")
        elif name == "hpw":
            case = HPW_CASE_FOR_PAIR.get(pair.id)
            if case is None:
                raise ValueError(f"no hpw case corresponds to pair {pair.id!r}")
            if case in ("ball_nch", "log_ball") and not np.isfinite(field.spec.R):
                raise ValueError(f"{case} needs a field built with finite R")


def _divergence_samples(space: SpaceParams, samples: int, seed: int) -> List[Point]:
    rng = np.random.default_rng(seed)
    pts: List[Point] = []
    while len(pts) < samples:
        x = rng.uniform(-2.0, 2.0, size=(4 * samples, space.m))
        y = rng.uniform(-2.0, 2.0, size=(4 * samples, space.k))
        r, rho_v = radial_coords(space, x, y)
        good = (rho_v >= 0.5) & (rho_v <= 2.0) & (r >= 0.2)
        for i in np.nonzero(good)[0]:
            pts.append(Point(x[i], y[i]))
            if len(pts) == samples:
                break
    return pts


def _weighted_rho_field(space: SpaceParams, c: float, s: float):
    def field(z: Point) -> np.ndarray:
        r = float(np.linalg.norm(z.x))
        return rho(space, z) ** c * r**s * grad_gamma_rho(space, z)

    return field


def divergence_check(space: SpaceParams, samples: int, seed: int) -> Dict[str, object]:
    """Closed-form vs finite-difference divergence on random sample points."""
    worst = 0.0
    for z in _divergence_samples(space, samples, seed):
        r = float(np.linalg.norm(z.x))
        dist = min(r, rho(space, z))
        # Richardson error ~ step^4; 1e-3 of the singular-set distance keeps
        # it far below the 1e-6 gate without hitting roundoff
        step = 1e-3 * dist
        for c, s in DIVERGENCE_COMBOS:
            closed = div_weighted_rho_closed_form(space, z, c, s)
            approx = fd_divergence(space, _weighted_rho_field(space, c, s), z, step)
            worst = max(worst, abs(approx - closed) / abs(closed))
    return {
        "samples": samples,
        "combos": [list(cs) for cs in DIVERGENCE_COMBOS],
        "max_rel_err": worst,
        "passed": bool(worst <= 1e-6),
    }


def condition_check(pair, samples: int, seed: int) -> Dict[str, object]:
    rep = condition_report(pair, samples=samples, seed=seed)
    phi_ok = pair.allow_negative_phi or rep["min_phi"] >= -1e-9
    out: Dict[str, object] = dict(rep)
    out["samples"] = samples
    out["passed"] = bool(phi_ok and rep["max_abs_mismatch"] <= 1e-6)
    return out


def _run_check(name: str, config: RunConfig, pair, field) -> Dict[str, object]:
    settings = config.quadrature
    if name == "identity":
        rep = verify_identity(pair, field, settings)
        return _record(name, rep.passed, rep.to_dict(), rep.residual, rep.quadrature_error)
    if name == "inequality":
        rep = verify_inequality(pair, field, settings)
        return _record(name, rep.passed, rep.to_dict(), rep.margin, rep.quadrature_error)
    if name == "remainder_pge2":
        rep = verify_remainder_p_ge2(pair, field, settings)
        return _record(name, rep.passed, rep.to_dict(), rep.margin, rep.quadrature_error)
    if name == "remainder_plt2":
        rep = verify_remainder_p_lt2(pair, field, settings)
        residual = min(rep.lower_margin, rep.upper_margin, rep.min_margin)
        return _record(name, rep.passed, rep.to_dict(), residual, rep.quadrature_error)
    if name == "sharpness":
        rep = sharpness_probe(pair, settings=settings)
        return _record(name, rep.passed, rep.to_dict(), rep.final_gap, rep.quadrature_error)
    if name == "ckn":
        rep = verify_ckn(pair, field, config.ckn, settings)
        return _record(
            name, rep.passed, rep.to_dict(), rep.left - rep.right, rep.quadrature_error
        )
    if name == "hpw":
        case = HPW_CASE_FOR_PAIR[pair.id]
        rep = verify_hpw(case, config.p, field, settings)
        return _record(
            name, rep.passed, rep.to_dict(), rep.left - rep.right, rep.quadrature_error
        )
    if name == "divergence":
        rec = divergence_check(config.space, 100, config.seed)
        return _record(name, rec.pop("passed"), rec, rec["max_rel_err"], 0.0)
    if name == "condition":
        rec = condition_check(pair, 200, config.seed)
        return _record(name, rec.pop("passed"), rec, rec["max_abs_mismatch"], 0.0)
    raise ValueError(f"unknown check {name!r}")


def _record(name: str, passed: bool, terms: Dict, residual: float, qerr: float) -> Dict:
    return {
        "name": name,
        "passed": bool(passed),
        "terms": terms,
        "residual": float(residual),
        "quadrature_error": float(qerr),
    }


def _versions() -> Dict[str, str]:
    return {
        "package": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
    }


def run(config: RunConfig) -> Dict:
    """Execute the configured checks in declared order and build the report."""
    t0 = time.time()
    pair, field, field_echo = _build_objects(config)
    _validate_checks(config, pair, field)
    checks = [_run_check(name, config, pair, field) for name in config.checks]
    n_pass = sum(1 for c in checks if c["passed"])
    echo = config_to_dict(config)
    echo["field"] = field_echo
    return {
        "config": echo,
        "checks": checks,
        "summary": {"passed": n_pass, "failed": len(checks) - n_pass},
        "versions": _versions(),
        "wall_clock_seconds": time.time() - t0,
    }


def _dump(report: Dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True)


def _flatten_terms(terms: Dict) -> Dict[str, object]:
    flat: Dict[str, object] = {}
    for key, value in terms.items():
        if isinstance(value, (str, int, float, bool)) or value is None:
            flat[key] = value
        elif isinstance(value, dict):
            for sub, sval in value.items():
                if isinstance(sval, (str, int, float, bool)) or sval is None:
                    flat[f"{key}.{sub}"] = sval
    return flat


def report_export(report: Dict, fmt: str, path: str) -> None:
    """Write a report as canonical json or as a per-check csv table."""
    if fmt == "json":
        with open(path, "w") as fh:
            fh.write(_dump(report) + "\n")
        return
    if fmt != "csv":
        raise ValueError(f"unknown format {fmt!r}; expected json or csv")
    rows = []
    columns = ["name", "passed", "residual", "quadrature_error"]
    for check in report.get("checks", []):
        row = {
            "name": check["name"],
            "passed": check["passed"],
            "residual": check["residual"],
            "quadrature_error": check["quadrature_error"],
        }
        for key, value in _flatten_terms(check.get("terms", {})).items():
            col = f"terms.{key}"
            if col not in columns:
                columns.append(col)
            row[col] = value
        rows.append(row)
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=columns, restval="")
        writer.writeheader()
        writer.writerows(rows)


# -- pinned verify --all suite ------------------------------------------------

ALL_SUITE: Tuple[Dict, ...] = (
    {
        "space": {"m": 1, "k": 1, "gamma": 1.0},
        "pair": {"id": "dambrosio_power", "alpha": 0.0, "beta": 0.0},
        "p": 2.0,
        "checks": [
            "identity",
            "inequality",
            "remainder_pge2",
            "sharpness",
            "ckn",
            "hpw",
            "divergence",
            "condition",
        ],
        "ckn": {"q": 2.0, "r": 2.0, "delta": 0.5, "b": -0.5, "c": 0.0},
        "seed": 20240816,
    },
    {
        "space": {"m": 1, "k": 1, "gamma": 1.0},
        "pair": {"id": "nch_ball", "R": 4.0},
        "p": 3.0,
        "checks": ["identity", "inequality", "condition"],
        "seed": 20240816,
    },
    {
        "space": {"m": 1, "k": 1, "gamma": 1.0},
        "pair": {"id": "dambrosio_power", "alpha": 0.0, "beta": 0.0},
        "p": 2.0,
        "field": {"family": "phase_twisted", "phase_kappa": 1.0, "x_floor": 0.125},
        "checks": ["identity"],
        "seed": 20240816,
    },
    {
        "space": {"m": 1, "k": 1, "gamma": 2.0},
        "pair": {"id": "log_ball", "alpha": -3.0, "R": 44.0},
        "p": 2.0,
        "checks": ["identity", "hpw", "condition"],
        "seed": 20240816,
    },
)


def _execute_suite(entries: List[Dict], out: Optional[str]) -> int:
    t0 = time.time()
    configs = [config_from_dict(e) for e in entries]
    checks: List[Dict] = []
    echoes: List[Dict] = []
    for config in configs:
        rep = run(config)
        echoes.append(rep["config"])
        pr = rep["config"]["pair"]
        tag = (
            f"{pr['id']}@({config.space.m},{config.space.k},{config.space.gamma})"
            f",p={config.p}"
        )
        family = rep["config"]["field"]["family"]
        if family in ("phase_twisted", "extremal_truncated"):
            tag += f",{family}"
        for check in rep["checks"]:
            check["name"] = f"{check['name']}[{tag}]"
            checks.append(check)
    n_pass = sum(1 for c in checks if c["passed"])
    report = {
        "config": {"suite": "all", "entries": echoes},
        "checks": checks,
        "summary": {"passed": n_pass, "failed": len(checks) - n_pass},
        "versions": _versions(),
        "wall_clock_seconds": time.time() - t0,
    }
    _emit(report, out)
    return 0 if n_pass == len(checks) else 1


def _emit(report: Dict, out: Optional[str]) -> None:
    text = _dump(report)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _parse_space_flag(text: str) -> Dict[str, float]:
    parts = text.split(",")
    if len(parts) != 3:
        raise ValueError("--space expects m,k,gamma")
    return {"m": int(parts[0]), "k": int(parts[1]), "gamma": float(parts[2])}


def _apply_overrides(data: Dict, args) -> Dict:
    data = dict(data)
    if args.space is not None:
        data["space"] = _parse_space_flag(args.space)
    if args.pair is not None:
        data["pair"] = {"id": args.pair, **DEFAULT_PAIR_PARAMS.get(args.pair, {})}
    if args.p is not None:
        data["p"] = args.p
    if args.seed is not None:
        data["seed"] = args.seed
    if args.checks is not None:
        data["checks"] = [c.strip() for c in args.checks.split(",") if c.strip()]
    quad = dict(data.get("quadrature", {}))
    if args.rel_tol is not None:
        quad["rel_tol"] = args.rel_tol
    if args.max_evals is not None:
        quad["max_evals"] = args.max_evals
    if quad:
        data["quadrature"] = quad
    return data


def cmd_verify(args) -> int:
    if args.all:
        entries = []
        for entry in ALL_SUITE:
            patched = _apply_overrides(dict(entry), args)
            entries.append(patched)
        return _execute_suite(entries, args.out)
    if args.config is None:
        raise ValueError("verify needs --config FILE or --all")
    with open(args.config) as fh:
        data = json.load(fh)
    data = _apply_overrides(data, args)
    report = run(config_from_dict(data))
    _emit(report, args.out)
    return 0 if report["summary"]["failed"] == 0 else 1


def cmd_constants(args) -> int:
    mapped = CONSTANT_KINDS.get(args.kind)
    if mapped is None:
        raise ValueError(f"unknown kind {args.kind!r}; expected one of {sorted(CONSTANT_KINDS)}")
    est = find_constant(CpObjectiveKind(kind=mapped, p=args.p))
    width = est.bracket[1] - est.bracket[0]
    out = {
        "kind": args.kind,
        "p": args.p,
        "value": est.value,
        "argmin_s": est.argmin_s,
        "argmin_t": est.argmin_t,
        "bracket": list(est.bracket),
        "bracket_width": width,
        "refined": est.refined,
    }
    print(_dump(out))
    if args.tol is not None and width > args.tol:
        print(f"bracket width {width:.3e} exceeds --tol {args.tol:.3e}", file=sys.stderr)
        return 1
    return 0


def cmd_sharpness(args) -> int:
    space_dict = _parse_space_flag(args.space)
    space = SpaceParams(space_dict["m"], space_dict["k"], space_dict["gamma"])
    params = DEFAULT_PAIR_PARAMS.get(args.pair)
    if params is None:
        raise ValueError(f"unknown pair id {args.pair!r}")
    pair = make_pair(args.pair, space, args.p, dict(params))
    rep = sharpness_probe(pair, levels=args.levels)
    out = {"pair": args.pair, "p": args.p}
    out.update(rep.to_dict())
    print(_dump(out))
    return 0 if rep.passed else 1


def cmd_check_divergence(args) -> int:
    space_dict = _parse_space_flag(args.space)
    space = SpaceParams(space_dict["m"], space_dict["k"], space_dict["gamma"])
    rec = divergence_check(space, args.samples, args.seed)
    print(_dump(rec))
    return 0 if rec["passed"] else 1


def cmd_condition(args) -> int:
    space_dict = _parse_space_flag(args.space)
    space = SpaceParams(space_dict["m"], space_dict["k"], space_dict["gamma"])
    params = DEFAULT_PAIR_PARAMS.get(args.pair)
    if params is None:
        raise ValueError(f"unknown pair id {args.pair!r}")
    pair = make_pair(args.pair, space, args.p, dict(params))
    rec = condition_check(pair, args.samples, args.seed)
    print(_dump(rec))
    return 0 if rec["passed"] else 1


def cmd_export(args) -> int:
    with open(args.report) as fh:
        report = json.load(fh)
    report_export(report, args.format, args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="grushin-hardy",
        description="Verification runs for weighted Hardy identities on Grushin space.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    pv = sub.add_parser("verify", help="run configured checks and emit a json report")
    pv.add_argument("--config", help="json config file")
    pv.add_argument("--all", action="store_true", help="run the pinned golden suite")
    pv.add_argument("--out", help="write the report here instead of stdout")
    pv.add_argument("--space", help="override: m,k,gamma")
    pv.add_argument("--pair", help="override: pair id with default params")
    pv.add_argument("--p", type=float, help="override: exponent p")
    pv.add_argument("--seed", type=int, help="override: sampling seed")
    pv.add_argument("--checks", help="override: comma-separated check names")
    pv.add_argument("--rel-tol", dest="rel_tol", type=float, help="override: quadrature rel_tol")
    pv.add_argument("--max-evals", dest="max_evals", type=int, help="override: quadrature max_evals")
    pv.add_argument(
        "--threads",
        type=int,
        default=1,
        help="cap worker count; results never depend on this value",
    )
    pv.set_defaults(func=cmd_verify)

    pc = sub.add_parser("constants", help="compute one remainder constant")
    pc.add_argument("--kind", required=True, choices=sorted(CONSTANT_KINDS))
    pc.add_argument("--p", required=True, type=float)
    pc.add_argument("--tol", type=float, help="fail if the bracket is wider than this")
    pc.set_defaults(func=cmd_constants)

    ps = sub.add_parser("sharpness", help="Rayleigh-ratio probe for one pair")
    ps.add_argument("--pair", required=True)
    ps.add_argument("--levels", type=int, default=3)
    ps.add_argument("--p", type=float, default=2.0)
    ps.add_argument("--space", default="1,1,1.0")
    ps.set_defaults(func=cmd_sharpness)

    pd = sub.add_parser("check-divergence", help="closed form vs finite differences")
    pd.add_argument("--space", required=True, help="m,k,gamma")
    pd.add_argument("--samples", type=int, default=100)
    pd.add_argument("--seed", type=int, default=0)
    pd.set_defaults(func=cmd_check_divergence)

    pn = sub.add_parser("condition", help="defect-condition sampling for one pair")
    pn.add_argument("--pair", required=True)
    pn.add_argument("--samples", type=int, default=200)
    pn.add_argument("--seed", type=int, default=0)
    pn.add_argument("--p", type=float, default=2.0)
    pn.add_argument("--space", default="1,1,1.0")
    pn.set_defaults(func=cmd_condition)

    pe = sub.add_parser("export", help="re-emit a report as json or csv")
    pe.add_argument("--report", required=True, help="existing json report")
    pe.add_argument("--format", required=True, choices=("json", "csv"))
    pe.add_argument("--out", required=True)
    pe.set_defaults(func=cmd_export)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
