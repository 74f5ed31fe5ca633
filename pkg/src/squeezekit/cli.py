"""Command-line front end: protocol runs, sweeps, scaling fits, oracle checks.

Subcommands: run, sweep, scaling, formulas, oracle.  Configuration comes
from an optional JSON file (--config) overridden by flags; outputs are
deterministic CSV (with a '#' metadata header) or JSON files.

Exit codes: 0 success, 2 configuration error, 3 numerical invariant
violation (signals an implementation bug, not bad input).
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import os
import sys
from dataclasses import dataclass, fields

import numpy as np

from . import __version__, exact
from .analysis import fit_scaling, sweep_eta
from .channels import ImperfectionSettings, PhysicalParams, coupling_from_physical
from .protocols import (
    ProtocolSchedule,
    run_protocol,
    zeta_dp,
    zeta_pm,
    zeta_qe,
    zeta_qnd,
)
from .states import UncertaintyViolation

DB_NOTE = "positive dB = squeezing below projection noise (zeta < 1)"

PHYSICAL_KEYS = ("n_atoms", "n_photons", "wavelength", "beam_area", "detuning", "linewidth")


class ConfigError(ValueError):
    """Invalid configuration; maps to exit code 2."""


@dataclass
class RunConfig:
    protocol: str | None = None
    rho: float | None = None
    eta: float | None = None
    xi: float | None = None
    n: int | None = None
    loss: float = 0.0
    det_noise: float = 0.0
    rotation: str = "optimized"
    ideal: bool = False
    format: str = "csv"
    out: str | None = None
    threads: int | None = None
    eta_min: float = 0.01
    eta_max: float = 0.5
    eta_points: int = 25
    rho_list: tuple[float, ...] = ()
    physical: dict | None = None

    def echo(self) -> dict:
        data = {}
        for f in fields(self):
            v = getattr(self, f.name)
            if isinstance(v, tuple):
                v = list(v)
            data[f.name] = v
        return data


_ALLOWED = {f.name for f in fields(RunConfig)}


def _default_threads() -> int:
    env = os.environ.get("SQUEEZEKIT_THREADS")
    if env is not None:
        try:
            val = int(env)
        except ValueError:
            raise ConfigError(f"SQUEEZEKIT_THREADS must be an integer, got {env!r}") from None
        if val < 1:
            raise ConfigError("SQUEEZEKIT_THREADS must be >= 1")
        return val
    return os.cpu_count() or 1


def parse_config(file_text: str | bytes | None = None, overrides: dict | None = None) -> RunConfig:
    """Validated RunConfig from a JSON document plus flag overrides.

    Flags override file values; unknown keys and out-of-range values raise
    ConfigError naming the offending field.
    """
    data: dict = {}
    if file_text is not None and len(file_text) > 0:
        if isinstance(file_text, bytes):
            file_text = file_text.decode("utf-8")
        if file_text.strip():
            try:
                data = json.loads(file_text)
            except json.JSONDecodeError as e:
                raise ConfigError(
                    f"malformed JSON config: {e.msg} at line {e.lineno} column {e.colno}"
                ) from None
            if not isinstance(data, dict):
                raise ConfigError("config file must hold a JSON object")
    for key in data:
        if key not in _ALLOWED:
            raise ConfigError(f"unknown config key {key!r}")
    merged = dict(data)
    for key, value in (overrides or {}).items():
        if key not in _ALLOWED:
            raise ConfigError(f"unknown config key {key!r}")
        if value is not None:
            merged[key] = value

    cfg = RunConfig()
    for key, value in merged.items():
        setattr(cfg, key, value)
    _validate(cfg)
    return cfg


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise ConfigError(message)


def _validate(cfg: RunConfig) -> None:
    if cfg.protocol is not None:
        _require(cfg.protocol in ("qnd", "dp", "qe", "pm"), f"protocol must be one of qnd/dp/qe/pm, got {cfg.protocol!r}")
    if cfg.physical is not None:
        _require(isinstance(cfg.physical, dict), "physical must be an object")
        for key in cfg.physical:
            _require(key in PHYSICAL_KEYS, f"unknown physical key {key!r}")
        missing = [k for k in PHYSICAL_KEYS if k not in cfg.physical]
        _require(not missing, f"physical block missing keys {missing}")
        try:
            params = PhysicalParams(**{k: float(cfg.physical[k]) for k in PHYSICAL_KEYS})
        except ValueError as e:
            raise ConfigError(f"physical: {e}") from None
        _, rho, eta, _ = coupling_from_physical(params)
        if cfg.rho is None:
            cfg.rho = rho
        if cfg.eta is None and cfg.xi is None:
            cfg.eta = eta
    if cfg.rho is not None:
        cfg.rho = float(cfg.rho)
        _require(cfg.rho > 0, f"rho must be > 0, got {cfg.rho}")
    if cfg.eta is not None:
        cfg.eta = float(cfg.eta)
        _require(cfg.eta >= 0, f"eta must be >= 0, got {cfg.eta}")
    if cfg.xi is not None:
        cfg.xi = float(cfg.xi)
        _require(cfg.xi >= 0, f"xi must be >= 0, got {cfg.xi}")
    _require(
        not (cfg.rho is not None and cfg.eta is not None and cfg.xi is not None),
        "xi is mutually exclusive with eta when rho is given",
    )
    if cfg.n is not None:
        _require(float(cfg.n).is_integer() and int(cfg.n) >= 1, f"n must be an integer >= 1, got {cfg.n}")
        cfg.n = int(cfg.n)
    cfg.loss = float(cfg.loss)
    _require(0.0 <= cfg.loss < 1.0, f"loss must be in [0, 1), got {cfg.loss}")
    cfg.det_noise = float(cfg.det_noise)
    _require(cfg.det_noise >= 0.0, f"det_noise must be >= 0, got {cfg.det_noise}")
    _require(cfg.rotation in ("fixed", "optimized"), f"rotation must be fixed or optimized, got {cfg.rotation!r}")
    cfg.ideal = bool(cfg.ideal)
    _require(cfg.format in ("csv", "json"), f"format must be csv or json, got {cfg.format!r}")
    if cfg.threads is not None:
        _require(
            float(cfg.threads).is_integer() and int(cfg.threads) >= 1,
            f"threads must be an integer >= 1, got {cfg.threads}",
        )
        cfg.threads = int(cfg.threads)
    cfg.eta_min = float(cfg.eta_min)
    cfg.eta_max = float(cfg.eta_max)
    _require(cfg.eta_min > 0, f"eta_min must be > 0, got {cfg.eta_min}")
    _require(cfg.eta_max > cfg.eta_min, "eta_max must be > eta_min")
    _require(float(cfg.eta_points).is_integer() and int(cfg.eta_points) >= 2, f"eta_points must be an integer >= 2, got {cfg.eta_points}")
    cfg.eta_points = int(cfg.eta_points)
    if cfg.rho_list:
        values = tuple(float(v) for v in cfg.rho_list)
        _require(all(v > 0 for v in values), "rho_list values must be > 0")
        cfg.rho_list = values


def _rotation_mode(cfg: RunConfig) -> str:
    return "fixed_half_step" if cfg.rotation == "fixed" else "optimized"


def _imperfections(cfg: RunConfig) -> ImperfectionSettings:
    if cfg.ideal:
        return ImperfectionSettings()
    try:
        return ImperfectionSettings(cfg.loss, cfg.det_noise)
    except ValueError as e:
        raise ConfigError(str(e)) from None


def _schedule(cfg: RunConfig) -> ProtocolSchedule:
    _require(cfg.protocol is not None, "protocol is required")
    n = cfg.n if cfg.n is not None else (1024 if cfg.protocol == "pm" else 1)
    try:
        if cfg.rho is not None:
            eta = cfg.eta
            if eta is None:
                _require(cfg.xi is not None, "give eta or xi together with rho")
                eta = 9.0 * cfg.xi / cfg.rho
            return ProtocolSchedule.from_density(
                cfg.protocol,
                cfg.rho,
                eta,
                n=n,
                rotation_mode=_rotation_mode(cfg),
                imperfections=_imperfections(cfg),
                scattering=not cfg.ideal,
            )
        _require(cfg.xi is not None, "give either rho with eta, or xi")
        _require(cfg.ideal, "runs without rho have no scattering model; pass --ideal or provide rho")
        return ProtocolSchedule(
            kind=cfg.protocol,
            xi_total=cfg.xi,
            n=n,
            rotation_mode=_rotation_mode(cfg),
            imperfections=_imperfections(cfg),
            scattering=False,
        )
    except ConfigError:
        raise
    except ValueError as e:
        raise ConfigError(str(e)) from None


def _fmt(x: float) -> str:
    return format(float(x), ".12g")


def _round12(x: float) -> float:
    return float(_fmt(x))


def _meta_lines(cfg: RunConfig, command: str) -> list[str]:
    echo = json.dumps(cfg.echo(), sort_keys=True, separators=(",", ":"))
    return [
        f"# squeezekit {__version__} {command}",
        f"# config: {echo}",
        f"# dB convention: {DB_NOTE}",
    ]


def _emit_csv(cfg: RunConfig, command: str, header: list[str], rows: list[list[float]],
              footer: list[str] | None = None) -> str:
    lines = _meta_lines(cfg, command)
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    lines.extend(footer or [])
    return "\n".join(lines) + "\n"


def _emit_json(cfg: RunConfig, command: str, payload: dict) -> str:
    doc = {
        "meta": {
            "version": __version__,
            "command": command,
            "config": cfg.echo(),
            "db_convention": DB_NOTE,
        }
    }
    doc.update(payload)
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def _clean(obj):
    if isinstance(obj, float):
        return _round12(obj)
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    return obj


def cmd_run(cfg: RunConfig) -> str:
    record = run_protocol(_schedule(cfg))
    if cfg.format == "json":
        return _emit_json(cfg, "run", {"record": _clean(record.to_dict())})
    header = ["zeta", "zeta_db", "theta_min", "contrast", "min_variance"]
    row = [record.zeta, record.zeta_db, record.theta_min, record.contrast, record.min_variance]
    return _emit_csv(cfg, "run", header, [row], ["# trace: included in json format only"])


def _eta_grid(cfg: RunConfig) -> list[float]:
    return list(np.geomspace(cfg.eta_min, cfg.eta_max, cfg.eta_points))


def cmd_sweep(cfg: RunConfig) -> str:
    _require(cfg.rho is not None, "sweep requires rho")
    base = _schedule_for_sweep(cfg)
    result = sweep_eta(base, _eta_grid(cfg), workers=cfg.threads or 1)
    rows = [[g, z] for g, z in result.curve]
    if cfg.format == "json":
        return _emit_json(cfg, "sweep", {
            "curve": _clean(rows),
            "peak_db": _round12(result.peak_db),
            "peak_gamma_perp_tau": _round12(result.peak_gamma_perp_tau),
        })
    footer = [
        f"# peak_db: {_fmt(result.peak_db)}",
        f"# peak_gamma_perp_tau: {_fmt(result.peak_gamma_perp_tau)}",
    ]
    return _emit_csv(cfg, "sweep", ["gamma_perp_tau", "zeta_db"], rows, footer)


def _schedule_for_sweep(cfg: RunConfig) -> ProtocolSchedule:
    _require(cfg.protocol is not None, "protocol is required")
    n = cfg.n if cfg.n is not None else (1024 if cfg.protocol == "pm" else 1)
    try:
        return ProtocolSchedule.from_density(
            cfg.protocol,
            cfg.rho,
            cfg.eta if cfg.eta is not None else cfg.eta_min,
            n=n,
            rotation_mode=_rotation_mode(cfg),
            imperfections=_imperfections(cfg),
            scattering=not cfg.ideal,
        )
    except ValueError as e:
        raise ConfigError(str(e)) from None


def cmd_scaling(cfg: RunConfig) -> str:
    _require(bool(cfg.rho_list), "scaling requires rho_list")
    if cfg.protocol is None:
        cfg.protocol = "pm"
    rows = []
    points = []
    for rho in cfg.rho_list:
        sub = dataclasses.replace(cfg, rho=rho, rho_list=())
        result = sweep_eta(_schedule_for_sweep(sub), _eta_grid(cfg), workers=cfg.threads or 1)
        eta_star = 9.0 * result.peak_gamma_perp_tau / 4.0
        rows.append([rho, result.peak_db, eta_star])
        points.append((rho, 10.0 ** (-result.peak_db / 10.0)))
    fit = fit_scaling(points, "log_over_rho")
    a_ln, b_ln = fit.coefficients(math.e)
    a_10, b_10 = fit.coefficients(10.0)
    fit_info = {
        "model": fit.model,
        "a_ln": _round12(a_ln),
        "b_ln": _round12(b_ln),
        "a_log10": _round12(a_10),
        "b_log10": _round12(b_10),
        "r_squared": _round12(fit.r_squared),
    }
    if cfg.format == "json":
        return _emit_json(cfg, "scaling", {"rows": _clean(rows), "fit": fit_info})
    footer = ["# fit: " + json.dumps(fit_info, sort_keys=True, separators=(",", ":"))]
    return _emit_csv(cfg, "scaling", ["rho", "peak_zeta_db", "eta_star"], rows, footer)


FORMULA_GRID = [0.0] + list(np.geomspace(0.1, 100.0, 25))


def cmd_formulas(cfg: RunConfig) -> str:
    grid = [cfg.xi] if cfg.xi is not None else FORMULA_GRID
    rows = [[xi, zeta_qnd(xi), zeta_dp(xi), zeta_qe(xi), zeta_pm(xi)] for xi in grid]
    if cfg.format == "json":
        return _emit_json(cfg, "formulas", {"rows": _clean(rows)})
    return _emit_csv(cfg, "formulas", ["xi", "zeta_qnd", "zeta_dp", "zeta_qe", "zeta_pm"], rows)


ORACLE_SIZES = (20, 40)
ORACLE_XIS = (0.25, 0.5, 1.0)


def cmd_oracle(cfg: RunConfig) -> str:
    rows = []
    for n in ORACLE_SIZES:
        for xi in ORACLE_XIS:
            chi = exact.chi_for_coupling(xi, n, n)
            state = exact.evolve_faraday_exact(exact.coherent_state(n, n), chi)
            exact_var = exact.light_moments(state)["var_xl"]
            hpa_var = 0.5 * (1.0 + xi)
            rows.append([n, n, xi, exact_var, hpa_var, abs(exact_var - hpa_var) / hpa_var])
    if cfg.format == "json":
        return _emit_json(cfg, "oracle", {"rows": _clean(rows)})
    return _emit_csv(cfg, "oracle", ["N_A", "N_L", "xi", "exact_var", "hpa_var", "rel_err"], rows)


COMMANDS = {
    "run": cmd_run,
    "sweep": cmd_sweep,
    "scaling": cmd_scaling,
    "formulas": cmd_formulas,
    "oracle": cmd_oracle,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="squeezekit", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, metavar="{run,sweep,scaling,formulas,oracle}")
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--protocol", choices=["qnd", "dp", "qe", "pm"], default=None)
        p.add_argument("--rho", type=float, default=None)
        p.add_argument("--eta", type=float, default=None)
        p.add_argument("--xi", type=float, default=None)
        p.add_argument("--n", type=int, default=None)
        p.add_argument("--loss", type=float, default=None)
        p.add_argument("--det-noise", dest="det_noise", type=float, default=None)
        p.add_argument("--rotation", choices=["fixed", "optimized"], default=None)
        p.add_argument("--eta-min", dest="eta_min", type=float, default=None)
        p.add_argument("--eta-max", dest="eta_max", type=float, default=None)
        p.add_argument("--eta-points", dest="eta_points", type=int, default=None)
        p.add_argument("--rho-list", dest="rho_list", default=None,
                       help="comma separated optical densities")
        p.add_argument("--ideal", action="store_const", const=True, default=None,
                       help="zero decoherence and imperfections")
        p.add_argument("--format", choices=["csv", "json"], default=None)
        p.add_argument("--out", default=None)
        p.add_argument("--threads", type=int, default=None)
        p.add_argument("--config", default=None, help="JSON config file")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        file_text = None
        if args.config is not None:
            try:
                with open(args.config, "rb") as fh:
                    file_text = fh.read()
            except OSError as e:
                raise ConfigError(f"cannot read config file: {e}") from None
        overrides = {
            k: v
            for k, v in vars(args).items()
            if k not in ("command", "config") and v is not None
        }
        if overrides.get("rho_list") is not None:
            try:
                overrides["rho_list"] = tuple(
                    float(v) for v in str(overrides["rho_list"]).split(",") if v.strip()
                )
            except ValueError:
                raise ConfigError("rho_list must be comma separated numbers") from None
        cfg = parse_config(file_text, overrides)
        if cfg.threads is None:
            cfg.threads = _default_threads()
        text = COMMANDS[args.command](cfg)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    except UncertaintyViolation as e:
        print(f"numerical invariant violation: {e}", file=sys.stderr)
        return 3
    if cfg.out is None:
        sys.stdout.write(text)
    else:
        with open(cfg.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
