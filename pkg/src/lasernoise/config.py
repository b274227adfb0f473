"""Run configuration: INI-style text with [laser], [sweep], [simulation], [output].

All rates are in 1/ps.  The pump axis may be given per emitter or as the
total n0*P (pump_units); internally everything is per emitter, and result
tables always carry both columns.  Unknown keys are rejected so that typos
cannot silently fall back to defaults.  "auto" for burn_in, sample_dt or
t_end defers to heuristics derived from the mean-field model at run time.
"""

from __future__ import annotations

import configparser
import io
import math
from dataclasses import dataclass, replace

from .presets import PRESETS
from .ratemodel import LaserParams

__all__ = ["ConfigError", "RunConfig", "parse_config", "dump_config",
           "load_config", "preset_config_text"]

METHODS = ("sta", "me", "analytic", "meanfield")
ME_MAX_EMITTERS = 3


class ConfigError(ValueError):
    """Malformed or inconsistent run configuration."""


@dataclass(frozen=True)
class RunConfig:
    laser: LaserParams              # pump field = first grid point
    sweep_variable: str             # "pump" | "n0"
    pump_values: tuple              # per-emitter pump rates, one per point
    pump_units: str                 # convention the config used: "per_emitter" | "total"
    n0_values: tuple                # emitter counts (n0 sweeps), else (laser.n0,)
    methods: tuple
    t_end: float | None             # None = auto
    burn_in: float | None
    sample_dt: float | None
    n_traj: int
    base_seed: int
    threads: int
    output_dir: str
    plots: bool

    def points(self):
        """(n0, per-emitter pump) for every sweep point, in order."""
        if self.sweep_variable == "pump":
            return [(self.laser.n0, p) for p in self.pump_values]
        return [(n, self.pump_values[0]) for n in self.n0_values]


_SCHEMA = {
    "laser": ("g", "kappa", "gamma_a", "gamma_d", "n0", "alpha"),
    "sweep": ("variable", "pump_units", "scale", "start", "stop", "points",
              "values", "pump", "n0_values"),
    "simulation": ("t_end", "burn_in", "sample_dt", "n_traj", "base_seed",
                   "threads", "methods"),
    "output": ("directory", "plots"),
}

_REQUIRED_LASER = ("g", "kappa", "gamma_a", "gamma_d", "n0")


def _get_float(section, key, path, default=None, allow_auto=False):
    raw = section.get(key)
    if raw is None or raw.strip() == "":
        if default is not None or allow_auto:
            return default
        raise ConfigError(f"missing required key {path}")
    raw = raw.strip()
    if allow_auto and raw == "auto":
        return None
    try:
        value = float(raw)
    except ValueError:
        raise ConfigError(f"{path}: expected a number, got {raw!r}") from None
    if not math.isfinite(value):
        raise ConfigError(f"{path}: must be finite")
    return value


def _get_int(section, key, path, default=None):
    raw = section.get(key)
    if raw is None or raw.strip() == "":
        if default is not None:
            return default
        raise ConfigError(f"missing required key {path}")
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"{path}: expected an integer, got {raw!r}") from None


def _get_bool(section, key, path, default):
    raw = section.get(key)
    if raw is None or raw.strip() == "":
        return default
    raw = raw.strip().lower()
    if raw in ("true", "yes", "1", "on"):
        return True
    if raw in ("false", "no", "0", "off"):
        return False
    raise ConfigError(f"{path}: expected a boolean, got {raw!r}")


def parse_config(text: str) -> RunConfig:
    """Parse and validate a configuration document."""
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from None

    for section in cp.sections():
        if section not in _SCHEMA:
            raise ConfigError(f"unknown section [{section}]")
        for key in cp[section]:
            if key not in _SCHEMA[section]:
                raise ConfigError(f"unknown key {section}.{key}")
    if "laser" not in cp:
        raise ConfigError("missing required section [laser]")

    laser_sec = cp["laser"]
    for key in _REQUIRED_LASER:
        if key not in laser_sec:
            raise ConfigError(f"missing required key laser.{key}")
    n0 = _get_int(laser_sec, "n0", "laser.n0")
    try:
        laser = LaserParams(
            g=_get_float(laser_sec, "g", "laser.g"),
            kappa=_get_float(laser_sec, "kappa", "laser.kappa"),
            gamma_a=_get_float(laser_sec, "gamma_a", "laser.gamma_a"),
            gamma_d=_get_float(laser_sec, "gamma_d", "laser.gamma_d"),
            n0=n0,
            pump=0.0,
            alpha=_get_float(laser_sec, "alpha", "laser.alpha", default=0.0),
        )
    except ValueError as exc:
        raise ConfigError(f"laser block: {exc}") from None

    sweep = cp["sweep"] if "sweep" in cp else {}
    variable = (sweep.get("variable") or "pump").strip()
    if variable not in ("pump", "n0"):
        raise ConfigError(f"sweep.variable must be 'pump' or 'n0', got {variable!r}")
    pump_units = (sweep.get("pump_units") or "per_emitter").strip()
    if pump_units not in ("per_emitter", "total"):
        raise ConfigError("sweep.pump_units must be 'per_emitter' or 'total'")

    n0_values = (laser.n0,)
    if variable == "pump":
        raw_values = (sweep.get("values") or "").strip() if sweep else ""
        if raw_values:
            try:
                grid = [float(v) for v in raw_values.split()]
            except ValueError:
                raise ConfigError("sweep.values: expected whitespace-separated "
                                  "numbers") from None
        else:
            if not sweep or "start" not in sweep:
                raise ConfigError("missing required key sweep.start (or sweep.values)")
            start = _get_float(sweep, "start", "sweep.start")
            stop = _get_float(sweep, "stop", "sweep.stop")
            npts = _get_int(sweep, "points", "sweep.points")
            scale = (sweep.get("scale") or "log").strip()
            if scale not in ("log", "linear"):
                raise ConfigError("sweep.scale must be 'log' or 'linear'")
            if npts < 1:
                raise ConfigError("sweep.points must be >= 1")
            if scale == "log":
                if start <= 0 or stop <= 0:
                    raise ConfigError("log sweep needs positive start/stop")
                if npts == 1:
                    grid = [start]
                else:
                    ratio = (stop / start) ** (1.0 / (npts - 1))
                    grid = [start * ratio ** i for i in range(npts)]
            else:
                step = (stop - start) / max(npts - 1, 1)
                grid = [start + step * i for i in range(npts)]
        if not grid or any(p <= 0 or not math.isfinite(p) for p in grid):
            raise ConfigError("sweep grid must be non-empty and positive")
        divisor = laser.n0 if pump_units == "total" else 1
        pump_values = tuple(p / divisor for p in grid)
    else:
        raw_n0 = (sweep.get("n0_values") or "").strip() if sweep else ""
        if not raw_n0:
            raise ConfigError("missing required key sweep.n0_values for an n0 sweep")
        try:
            n0_values = tuple(int(v) for v in raw_n0.split())
        except ValueError:
            raise ConfigError("sweep.n0_values: expected whitespace-separated "
                              "integers") from None
        if not n0_values or any(v < 1 for v in n0_values):
            raise ConfigError("sweep.n0_values must be positive integers")
        pump = _get_float(sweep, "pump", "sweep.pump")
        if pump is None or pump <= 0:
            raise ConfigError("sweep.pump must be a positive per-emitter rate")
        if pump_units == "total":
            raise ConfigError("n0 sweeps require pump_units = per_emitter "
                              "(total pump is ambiguous across the grid)")
        pump_values = (pump,)

    sim = cp["simulation"] if "simulation" in cp else {}
    raw_methods = (sim.get("methods") or "sta meanfield").strip() if sim else "sta meanfield"
    methods = tuple(raw_methods.replace(",", " ").split())
    for m in methods:
        if m not in METHODS:
            raise ConfigError(f"simulation.methods: unknown method {m!r}; "
                              f"options {METHODS}")
    if not methods:
        methods = ()
    max_n0 = max(n0_values) if variable == "n0" else laser.n0
    if "me" in methods and max_n0 > ME_MAX_EMITTERS:
        raise ConfigError(
            f"method 'me' limited to n0 <= {ME_MAX_EMITTERS} emitters "
            f"(config reaches n0 = {max_n0}); drop 'me' or shrink n0")

    t_end = _get_float(sim, "t_end", "simulation.t_end", allow_auto=True) if sim else None
    burn_in = _get_float(sim, "burn_in", "simulation.burn_in", allow_auto=True) if sim else None
    sample_dt = _get_float(sim, "sample_dt", "simulation.sample_dt", allow_auto=True) if sim else None
    n_traj = _get_int(sim, "n_traj", "simulation.n_traj", default=4) if sim else 4
    base_seed = _get_int(sim, "base_seed", "simulation.base_seed", default=20260810) if sim else 20260810
    threads = _get_int(sim, "threads", "simulation.threads", default=1) if sim else 1
    if n_traj < 1 or threads < 1:
        raise ConfigError("simulation.n_traj and simulation.threads must be >= 1")
    for name, value in (("t_end", t_end), ("burn_in", burn_in),
                        ("sample_dt", sample_dt)):
        if value is not None and value < 0:
            raise ConfigError(f"simulation.{name} must be >= 0")

    out = cp["output"] if "output" in cp else {}
    directory = (out.get("directory") or "lasernoise-out").strip() if out else "lasernoise-out"
    plots = _get_bool(out, "plots", "output.plots", default=False) if out else False

    laser = replace(laser, pump=pump_values[0])
    return RunConfig(laser=laser, sweep_variable=variable,
                     pump_values=pump_values, pump_units=pump_units,
                     n0_values=n0_values, methods=methods, t_end=t_end,
                     burn_in=burn_in, sample_dt=sample_dt, n_traj=n_traj,
                     base_seed=base_seed, threads=threads,
                     output_dir=directory, plots=plots)


def _fmt(value) -> str:
    if value is None:
        return "auto"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def dump_config(config: RunConfig) -> str:
    """Canonical text form; parse_config(dump_config(c)) == c."""
    lines = ["[laser]"]
    for key in ("g", "kappa", "gamma_a", "gamma_d"):
        lines.append(f"{key} = {_fmt(getattr(config.laser, key))}")
    lines.append(f"n0 = {config.laser.n0}")
    lines.append(f"alpha = {_fmt(config.laser.alpha)}")
    lines.append("")
    lines.append("[sweep]")
    lines.append(f"variable = {config.sweep_variable}")
    lines.append(f"pump_units = {config.pump_units}")
    if config.sweep_variable == "pump":
        factor = config.laser.n0 if config.pump_units == "total" else 1
        values = " ".join(repr(p * factor) for p in config.pump_values)
        lines.append(f"values = {values}")
    else:
        lines.append(f"pump = {_fmt(config.pump_values[0])}")
        lines.append(f"n0_values = {' '.join(str(n) for n in config.n0_values)}")
    lines.append("")
    lines.append("[simulation]")
    lines.append(f"t_end = {_fmt(config.t_end)}")
    lines.append(f"burn_in = {_fmt(config.burn_in)}")
    lines.append(f"sample_dt = {_fmt(config.sample_dt)}")
    lines.append(f"n_traj = {config.n_traj}")
    lines.append(f"base_seed = {config.base_seed}")
    lines.append(f"threads = {config.threads}")
    lines.append(f"methods = {' '.join(config.methods)}")
    lines.append("")
    lines.append("[output]")
    lines.append(f"directory = {config.output_dir}")
    lines.append(f"plots = {_fmt(config.plots)}")
    lines.append("")
    return "\n".join(lines)


def load_config(path) -> RunConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read())


_PRESET_SWEEPS = {
    "five_emitter": ("pump", "start = 0.005\nstop = 10.0\npoints = 12\nscale = log"),
    "kilo_emitter_narrow": ("pump", "start = 0.1\nstop = 2.0\npoints = 8\nscale = log"),
    "kilo_emitter_broad": ("pump", "start = 0.1\nstop = 2.0\npoints = 8\nscale = log"),
    "emitter_scaling": ("n0", "pump = 0.63\nn0_values = 1 2 3 10 30 100 300 1000"),
}


def preset_config_text(name: str) -> str:
    """Ready-to-edit configuration for a named parameter preset."""
    if name not in PRESETS:
        raise ConfigError(f"unknown preset {name!r}; options {sorted(PRESETS)}")
    params = PRESETS[name]()
    variable, sweep_body = _PRESET_SWEEPS[name]
    methods = "sta meanfield analytic"
    buf = io.StringIO()
    buf.write("[laser]\n")
    buf.write(f"g = {params.g}\nkappa = {params.kappa}\n")
    buf.write(f"gamma_a = {params.gamma_a}\ngamma_d = {params.gamma_d}\n")
    buf.write(f"n0 = {params.n0}\nalpha = {params.alpha}\n\n")
    buf.write(f"[sweep]\nvariable = {variable}\npump_units = per_emitter\n")
    buf.write(sweep_body + "\n\n")
    buf.write("[simulation]\nt_end = auto\nburn_in = auto\nsample_dt = auto\n")
    buf.write(f"n_traj = 4\nbase_seed = 20260810\nthreads = 1\nmethods = {methods}\n\n")
    buf.write("[output]\ndirectory = lasernoise-out\nplots = true\n")
    return buf.getvalue()
