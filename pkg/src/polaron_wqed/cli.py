"""Command-line front end writing deterministic CSV/JSON tables.

Exit codes: 0 success, 2 validation error, 3 convergence failure, 4 I/O error.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .dynamics import emission_run
from .model import Dispersion, ModelParams
from .polaron import PolaronConvergenceError, asymptotic_gap, solve_self_consistent
from .scattering import ScatteringConfig, SigmaSource, compute_lineshape
from .toulouse import compare_with_polaron_rwa, default_scan

log = logging.getLogger(__name__)

EXIT_OK, EXIT_VALIDATION, EXIT_CONVERGENCE, EXIT_IO = 0, 2, 3, 4
COMMANDS = ("polaron", "lineshape", "sweep", "emission", "toulouse")
FORMATS = ("csv", "json")
SIG_DIGITS = 12

LINESHAPE_COLUMNS = ["omega", "R", "T", "re_r", "im_r", "re_t", "im_t", "delta_L", "gamma"]
EMISSION_COLUMNS = ["t", "p_e", "n_total"]
SPECTRUM_COLUMNS = ["omega", "n_k"]
TOULOUSE_COLUMNS = ["omega", "R_exact", "T_exact", "arg_r_exact", "arg_t_exact", "R_rwa", "T_rwa", "P1_exact"]
POLARON_COLUMNS = ["alpha", "omega_c", "delta_tilde", "asymptotic_gap", "iterations", "residual", "method"]
SUMMARY_COLUMNS = ["alpha", "delta_tilde", "omega_reson", "fwhm", "alpha_lower", "asymmetry"]
SURFACE_COLUMNS = ["alpha", "omega", "R"]


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    alpha: float
    delta: float
    omega_c: float
    dispersion: str
    num_modes: int
    dephasing: float
    sigma: str
    omega_min: float | None
    omega_max: float | None
    points: int
    alphas: list[float]
    t_max: float
    samples: int
    out: str
    format: str
    sources: dict[str, str] = field(default_factory=dict)

    def model(self, alpha: float | None = None) -> ModelParams:
        return ModelParams(alpha=self.alpha if alpha is None else alpha, omega_c=self.omega_c, delta=self.delta,
                           dispersion=self.dispersion, num_modes=self.num_modes)

    def scattering(self) -> ScatteringConfig:
        return ScatteringConfig(dephasing_rate=self.dephasing * self.delta, sigma_source=SigmaSource(self.sigma))


# per-command defaults; anything not listed falls back to BASE_DEFAULTS
BASE_DEFAULTS = {
    "alpha": 0.1, "delta": 1.0, "omega_c": 100.0, "dispersion": "linear", "num_modes": 512, "dephasing": 0.0,
    "sigma": "closed", "omega_min": 0.01, "omega_max": 3.0, "points": 400, "alphas": [0.1, 0.2, 0.3],
    "t_max": 30.0, "samples": 301, "out": "out", "format": "csv",
}
COMMAND_DEFAULTS = {
    "emission": {"dispersion": "cosine", "omega_c": 6.0, "alpha": 0.07},
    "toulouse": {"alpha": 0.5, "omega_c": 1e8, "omega_min": None, "omega_max": None},
}
CONFIG_KEYS = ["command", *BASE_DEFAULTS]


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="polaron-wqed", description=__doc__.splitlines()[0],
                argument_default=argparse.SUPPRESS)
    p.add_argument("--command", choices=COMMANDS)
    p.add_argument("--config", help="key=value lines or a JSON object; flags override it")
    p.add_argument("--alpha", type=float)
    p.add_argument("--delta", type=float)
    p.add_argument("--omega-c", dest="omega_c", type=float)
    p.add_argument("--dispersion", choices=[d.value for d in Dispersion])
    p.add_argument("--num-modes", dest="num_modes", type=int)
    p.add_argument("--dephasing", type=float, help="Gamma_phi in units of Delta")
    p.add_argument("--sigma", choices=[s.value for s in SigmaSource], help="self-energy source")
    p.add_argument("--omega-min", dest="omega_min", type=float)
    p.add_argument("--omega-max", dest="omega_max", type=float)
    p.add_argument("--points", type=int)
    p.add_argument("--alphas", help="comma-separated alpha values for sweep")
    p.add_argument("--t-max", dest="t_max", type=float)
    p.add_argument("--samples", type=int, help="time samples for emission")
    p.add_argument("--out")
    p.add_argument("--format", choices=FORMATS)
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def _read_config_file(path: str) -> dict:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    if text.lstrip().startswith("{"):
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"bad JSON in {path}: {exc.msg}") from None
    else:
        raw = {}
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key=value")
            key, value = (s.strip() for s in line.split("=", 1))
            raw[key] = value
    out = {}
    for key, value in raw.items():
        norm = key.replace("-", "_")
        if norm not in CONFIG_KEYS:
            raise ConfigError(f"unknown config key {key!r}")
        out[norm] = value
    return out


def _coerce(key, value):
    if value is None:
        return None
    try:
        if key in ("alpha", "delta", "omega_c", "dephasing", "omega_min", "omega_max", "t_max"):
            return float(value)
        if key in ("num_modes", "points", "samples"):
            if isinstance(value, float) and not value.is_integer():
                raise ValueError
            return int(value)
        if key == "alphas":
            if isinstance(value, str):
                return [float(v) for v in value.split(",") if v.strip()]
            return [float(v) for v in value]
    except (TypeError, ValueError):
        raise ConfigError(f"invalid value for {key}: {value!r}") from None
    return str(value)


def parse_config(argv=None) -> RunConfig:
    args = vars(build_parser().parse_args(argv))
    args.pop("verbose", None)
    file_values = _read_config_file(args.pop("config")) if "config" in args else {}
    command = args.get("command", file_values.get("command"))
    if command is None:
        raise ConfigError("no command given (use --command)")
    if command not in COMMANDS:
        raise ConfigError(f"unknown command {command!r}")
    defaults = {**BASE_DEFAULTS, **COMMAND_DEFAULTS.get(command, {})}
    values, sources = {}, {}
    for key in BASE_DEFAULTS:
        if key in args:
            values[key], sources[key] = args[key], "flag"
        elif key in file_values:
            values[key], sources[key] = file_values[key], "file"
        else:
            values[key], sources[key] = defaults[key], "default"
        values[key] = _coerce(key, values[key])
    sources["command"] = "flag" if "command" in args else "file"
    cfg = RunConfig(command=command, sources=sources, **values)
    validate(cfg)
    return cfg


def validate(cfg: RunConfig):
    try:
        Dispersion.parse(cfg.dispersion)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    cfg.dispersion = Dispersion.parse(cfg.dispersion).value
    if cfg.sigma not in [s.value for s in SigmaSource]:
        raise ConfigError(f"unknown self-energy source {cfg.sigma!r}")
    if cfg.format not in FORMATS:
        raise ConfigError(f"unknown format {cfg.format!r}")
    checks = [
        (cfg.alpha >= 0, f"alpha must be >= 0, got {cfg.alpha}"),
        (all(a >= 0 for a in cfg.alphas) and cfg.alphas, "alphas must be a non-empty list of values >= 0"),
        (cfg.omega_c > 0, f"omega_c must be > 0, got {cfg.omega_c}"),
        (cfg.delta > 0, f"delta must be > 0, got {cfg.delta}"),
        (cfg.num_modes >= 2, f"num_modes must be >= 2, got {cfg.num_modes}"),
        (cfg.dephasing >= 0, f"dephasing must be >= 0, got {cfg.dephasing}"),
        (cfg.points >= 16, f"points must be >= 16, got {cfg.points}"),
        (cfg.t_max > 0, f"t_max must be > 0, got {cfg.t_max}"),
        (cfg.samples >= 2, f"samples must be >= 2, got {cfg.samples}"),
    ]
    for ok, message in checks:
        if not ok:
            raise ConfigError(message)
    if cfg.omega_min is not None and cfg.omega_max is not None and not 0 < cfg.omega_min < cfg.omega_max:
        raise ConfigError("need 0 < omega_min < omega_max")
    if cfg.command == "toulouse" and cfg.alpha != 0.5:
        raise ConfigError("the toulouse command is fixed at alpha = 0.5")


def fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), f".{SIG_DIGITS}g")
    return str(value)


def _json_value(value):
    if isinstance(value, (float, np.floating)):
        return float(fmt(value))
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return int(value)
    return value


def emit_table(records, path, format: str = "csv", columns=None) -> Path:
    """Write homogeneous records as CSV (header row) or a JSON array."""
    records = list(records)
    if columns is None:
        if not records:
            raise ValueError("columns are required for an empty table")
        columns = list(records[0])
    for rec in records:
        if list(rec) != list(columns):
            raise ValueError("records are not homogeneous")
    path = Path(path)
    if format == "csv":
        with path.open("w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(columns)
            for rec in records:
                writer.writerow([fmt(rec[c]) for c in columns])
    elif format == "json":
        data = [{c: _json_value(rec[c]) for c in columns} for rec in records]
        path.write_text(json.dumps(data, indent=1) + "\n", encoding="utf-8")
    else:
        raise ValueError(f"unknown format {format!r}")
    return path


def _columns_to_records(columns, arrays):
    return [dict(zip(columns, row)) for row in zip(*(arrays[c] for c in columns))]


def _lineshape_records(ls, delta):
    a = ls.amplitudes
    arrays = {
        "omega": ls.omegas / delta, "R": a.reflectivity, "T": a.transmissivity,
        "re_r": a.r.real, "im_r": a.r.imag, "re_t": a.t.real, "im_t": a.t.imag,
        "delta_L": ls.sigma.lamb_shift / delta, "gamma": ls.sigma.decay_rate / delta,
    }
    return _columns_to_records(LINESHAPE_COLUMNS, arrays)


def _lineshape(cfg, alpha):
    params = cfg.model(alpha)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        sol = solve_self_consistent(params)
    return compute_lineshape(params, cfg.scattering(), cfg.omega_min * cfg.delta, cfg.omega_max * cfg.delta,
                             cfg.points, sol=sol)


def _summary(alpha, ls, delta):
    scale = lambda x: None if x is None else x / delta  # noqa: E731
    return {"alpha": alpha, "delta_tilde": ls.delta_tilde / delta, "omega_reson": ls.omega_reson / delta,
            "fwhm": scale(ls.fwhm), "alpha_lower": ls.alpha_lower, "asymmetry": ls.asymmetry}


def _run_polaron(cfg, out):
    params = cfg.model()
    sol = solve_self_consistent(params)
    asym = asymptotic_gap(params) / cfg.delta if params.alpha < 1 else None
    rec = {"alpha": cfg.alpha, "omega_c": cfg.omega_c / cfg.delta, "delta_tilde": sol.delta_tilde / cfg.delta,
           "asymptotic_gap": asym, "iterations": sol.iterations, "residual": sol.residual, "method": sol.method}
    return [emit_table([rec], out / f"polaron.{cfg.format}", cfg.format, POLARON_COLUMNS)]


def _run_lineshape(cfg, out):
    ls = _lineshape(cfg, cfg.alpha)
    if ls.diagnostic:
        log.warning(ls.diagnostic)
    files = [emit_table(_lineshape_records(ls, cfg.delta), out / f"lineshape.{cfg.format}", cfg.format,
                        LINESHAPE_COLUMNS)]
    files.append(emit_table([_summary(cfg.alpha, ls, cfg.delta)], out / f"lineshape_summary.{cfg.format}",
                            cfg.format, SUMMARY_COLUMNS))
    return files


def _run_sweep(cfg, out):
    with ThreadPoolExecutor() as pool:
        shapes = list(pool.map(lambda a: _lineshape(cfg, a), cfg.alphas))
    surface, summary = [], []
    for alpha, ls in zip(cfg.alphas, shapes):
        if ls.diagnostic:
            log.warning("alpha=%g: %s", alpha, ls.diagnostic)
        surface += [{"alpha": alpha, "omega": w / cfg.delta, "R": r} for w, r in zip(ls.omegas, ls.reflectivities)]
        summary.append(_summary(alpha, ls, cfg.delta))
    return [emit_table(surface, out / f"sweep_surface.{cfg.format}", cfg.format, SURFACE_COLUMNS),
            emit_table(summary, out / f"sweep_summary.{cfg.format}", cfg.format, SUMMARY_COLUMNS)]


def _run_emission(cfg, out):
    params = cfg.model()
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", UserWarning)
        sol = solve_self_consistent(params)
    trace = emission_run(params, cfg.t_max / cfg.delta, cfg.samples, sol=sol)
    series = _columns_to_records(EMISSION_COLUMNS, {"t": trace.times * cfg.delta, "p_e": trace.p_e,
                                                    "n_total": trace.n_total})
    spectrum = _columns_to_records(SPECTRUM_COLUMNS, {"omega": trace.frequencies / cfg.delta,
                                                      "n_k": trace.spectrum})
    return [emit_table(series, out / f"emission.{cfg.format}", cfg.format, EMISSION_COLUMNS),
            emit_table(spectrum, out / f"emission_spectrum.{cfg.format}", cfg.format, SPECTRUM_COLUMNS)]


def _run_toulouse(cfg, out):
    if cfg.omega_min is None or cfg.omega_max is None:
        scan = default_scan(cfg.delta, cfg.omega_c, cfg.points)
        cfg.omega_min = float(scan[0]) / cfg.delta
        cfg.omega_max = float(scan[-1]) / cfg.delta
    scan = np.geomspace(cfg.omega_min, cfg.omega_max, cfg.points) * cfg.delta
    curves = compare_with_polaron_rwa(cfg.delta, cfg.omega_c, scan)
    curves["omega"] = curves["omega"] / cfg.delta
    return [emit_table(_columns_to_records(TOULOUSE_COLUMNS, curves), out / f"toulouse.{cfg.format}", cfg.format,
                       TOULOUSE_COLUMNS)]


RUNNERS = {"polaron": _run_polaron, "lineshape": _run_lineshape, "sweep": _run_sweep, "emission": _run_emission,
           "toulouse": _run_toulouse}


def write_manifest(cfg: RunConfig, files, out: Path) -> Path:
    resolved = {k: v for k, v in asdict(cfg).items() if k != "sources"}
    params = cfg.model()
    resolved["c"] = params.speed
    resolved["k_max"] = params.band_k_max
    resolved["quadrature"] = "uniform grid" if params.dispersion is Dispersion.COSINE_HARD else "log grid, 400/decade"
    resolved["units"] = "frequencies in Delta, times in 1/Delta"
    manifest = {
        "tool": "polaron_wqed",
        "version": __version__,
        "resolved": {k: _json_value(v) for k, v in resolved.items()},
        "sources": cfg.sources,
        "files": sorted(p.name for p in files),
    }
    path = out / "manifest.json"
    path.write_text(json.dumps(manifest, indent=1, sort_keys=True) + "\n", encoding="utf-8")
    return path


def run(cfg: RunConfig) -> int:
    out = Path(cfg.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
        files = RUNNERS[cfg.command](cfg, out)
        write_manifest(cfg, files, out)
    except PolaronConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except OSError as exc:
        print(f"error: cannot write output: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    return EXIT_OK


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    logging.basicConfig(level=logging.INFO if ("-v" in argv or "--verbose" in argv) else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    logging.captureWarnings(True)
    try:
        cfg = parse_config(argv)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
