"""Flat ``key = value`` configuration files.

Example::

    # reference cesium parameters, detuned probe
    2pi_times = true          # "Hz" values are cycle frequencies, multiplied by 2 pi
    lambda_p = 852 nm
    gamma_ca_decay = 5.2 MHz
    kappa = 173 kHz
    detuning_p = 0.25 Gca     # in units of Gamma_ca
    length = 8 um
    photon_number = 1

``:`` is accepted in place of ``=``; ``#`` starts a comment. Sections and
inline tables/lists are rejected. Units:

* lengths: ``m cm mm um nm`` (bare numbers are metres); ``spatial_period``
  also accepts ``lambda_p`` and ``position`` accepts ``period``;
* rates and detunings: ``Hz kHz MHz GHz`` (times 2 pi when ``2pi_times`` is
  true, the default), ``rad/s`` (also the meaning of a bare number), or
  ``Gca`` for multiples of ``gamma_ca_decay``;
* density: ``m-3`` (bare) or ``cm-3``.

Resolution order is defaults < file < overrides.
"""

from __future__ import annotations

import dataclasses
import math
import re

from .errors import ConfigError, DomainError
from .experiments import FIELD_NAMES, ScenarioConfig, SweepAxis

TWO_PI = 2.0 * math.pi

# divisors, so "852 nm" gives exactly 8.52e-07
_LENGTH = {"m": 1.0, "cm": 1e2, "mm": 1e3, "um": 1e6, "µm": 1e6, "nm": 1e9}
_FREQ = {"hz": 1.0, "khz": 1e3, "mhz": 1e6, "ghz": 1e9}

# key -> unit kind
_KINDS = {
    "wavelength": "length",
    "dipole_moment": "dipole",
    "epsilon_0": "permittivity",
    "density": "density",
    "cooperativity": "number",
    "coupling_g": "rate",
    "gamma_ca_decay": "rate",
    "gamma_cb_decay": "rate",
    "dephase_b": "rate",
    "dephase_c": "rate",
    "kappa": "rate",
    "photon_number": "int",
    "spatial_period": "period",
    "length": "length",
    "num_periods": "int",
    "detuning_p": "rate",
    "detuning_c": "rate",
    "position": "position",
    "probe_rabi": "rate",
    "quad_tol": "number",
    "quad_min_panels": "int",
    "quad_max_panels": "int",
    "2pi_times": "bool",
    "sweep_param": "name",
    "sweep_start": "sweep",
    "sweep_stop": "sweep",
    "sweep_points": "int",
}

ALIASES = {
    "lambda_p": "wavelength",
    "mu_ca": "dipole_moment",
    "eps0": "epsilon_0",
    "n": "density",
    "beta": "cooperativity",
    "g": "coupling_g",
    "n_c": "photon_number",
    "ell": "length",
    "m": "num_periods",
    "x": "position",
    "omega_p": "probe_rabi",
}

_NUMBER = re.compile(r"\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*(.*?)\s*$")


@dataclasses.dataclass
class _Entry:
    key: str
    text: str
    line: int | None
    column: int | None

    def error(self, message):
        return ConfigError(f"{self.key}: {message}", self.line, self.column, self.key)


def _canonical(key):
    k = key.strip()
    if k in _KINDS:
        return k
    return ALIASES.get(k.lower(), ALIASES.get(k, k))


def _split_line(raw, lineno):
    text = raw.split("#", 1)[0].rstrip()
    if not text.strip():
        return None
    stripped = text.lstrip()
    indent = len(text) - len(stripped)
    if stripped.startswith("["):
        raise ConfigError("sections are not supported (flat key = value only)", lineno, indent + 1)
    m = re.match(r"([^=:]+?)\s*[=:]\s*(.*)$", stripped)
    if not m:
        raise ConfigError(f"expected 'key = value', got {stripped!r}", lineno, indent + 1)
    key, value = m.group(1).strip(), m.group(2).strip()
    vcol = indent + m.start(2) + 1
    if not value:
        raise ConfigError(f"{key}: missing value", lineno, vcol, key)
    if value[0] in "{[":
        raise ConfigError(f"{key}: nested values are not supported", lineno, vcol, key)
    return key, value, vcol


def _collect(text, entries):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        parsed = _split_line(raw, lineno)
        if parsed is None:
            continue
        key, value, vcol = parsed
        canon = _canonical(key)
        if canon not in _KINDS:
            raise ConfigError(f"unknown key {key!r}", lineno, 1, key)
        entries[canon] = _Entry(canon, value, lineno, vcol)


def _split_number(entry):
    m = _NUMBER.fullmatch(entry.text)
    if not m:
        raise entry.error(f"cannot parse number from {entry.text!r}")
    value = float(m.group(1))
    if not math.isfinite(value):
        raise entry.error("value must be finite")
    return value, m.group(2)


def _to_bool(entry):
    t = entry.text.lower()
    if t in ("true", "yes", "1", "on"):
        return True
    if t in ("false", "no", "0", "off"):
        return False
    raise entry.error(f"expected true/false, got {entry.text!r}")


def _convert(entry, kind, ctx):
    """Convert one entry to SI / rad/s given the partially resolved context."""
    if kind == "bool":
        return _to_bool(entry)
    if kind == "name":
        return entry.text.strip()
    value, unit = _split_number(entry)
    u = unit.lower()

    if kind == "int":
        if unit or value != int(value):
            raise entry.error(f"expected an integer, got {entry.text!r}")
        return int(value)
    if kind == "number":
        if unit:
            raise entry.error(f"unit mismatch: {entry.key} is dimensionless, got {unit!r}")
        return value
    if kind in ("length", "period", "position"):
        if not unit:
            return value
        if unit in _LENGTH:
            return value / _LENGTH[unit]
        if kind == "period" and u == "lambda_p":
            return value * ctx["wavelength"]
        if kind == "position" and u in ("period", "lambda"):
            return value * ctx["period"]
        raise entry.error(f"unit mismatch: expected a length, got {unit!r}")
    if kind == "rate":
        if not unit or u == "rad/s":
            return value
        if u in _FREQ:
            return value * _FREQ[u] * (TWO_PI if ctx["2pi_times"] else 1.0)
        if u == "gca":
            if entry.key == "gamma_ca_decay":
                raise entry.error("cannot be given in units of Gca")
            return value * ctx["gamma_ca_decay"]
        raise entry.error(f"unit mismatch: expected a rate (Hz, rad/s, Gca), got {unit!r}")
    if kind == "density":
        if not unit or u in ("m-3", "m^-3", "/m3", "/m^3"):
            return value
        if u in ("cm-3", "cm^-3", "/cm3", "/cm^3"):
            return value * 1e6
        raise entry.error(f"unit mismatch: expected a density, got {unit!r}")
    if kind == "dipole":
        if not unit or u in ("cm", "c*m", "c m", "c·m"):
            return value
        raise entry.error(f"unit mismatch: expected C m, got {unit!r}")
    if kind == "permittivity":
        if not unit or u in ("f/m", "fm-1", "fm^-1"):
            return value
        raise entry.error(f"unit mismatch: expected F/m, got {unit!r}")
    raise AssertionError(kind)


def _parse_overrides(overrides):
    entries = {}
    for item in overrides or ():
        if "=" not in item:
            raise ConfigError(f"override {item!r} is not key=value")
        key, value = item.split("=", 1)
        canon = _canonical(key)
        if canon not in _KINDS:
            raise ConfigError(f"unknown key {key.strip()!r} in override", key=key.strip())
        if not value.strip():
            raise ConfigError(f"{canon}: missing value in override", key=canon)
        entries[canon] = _Entry(canon, value.strip(), None, None)
    return entries


def parse_config(text: str = "", overrides=None, base: ScenarioConfig | None = None) -> ScenarioConfig:
    """Parse configuration text (plus ``key=value`` override strings).

    Raises :class:`ConfigError` for unknown keys, unparsable numbers, unit
    mismatches and physically invalid values, with line/column context when
    the value came from the text.
    """
    entries: dict[str, _Entry] = {}
    _collect(text, entries)
    entries.update(_parse_overrides(overrides))

    base = base or ScenarioConfig()
    ctx = {"2pi_times": True}
    if "2pi_times" in entries:
        ctx["2pi_times"] = _convert(entries["2pi_times"], "bool", ctx)

    # wavelength and gamma_ca_decay first: the lambda_p, period and Gca
    # suffixes of later keys depend on them
    order = ["wavelength", "gamma_ca_decay"] + [k for k in _KINDS if k not in ("wavelength", "gamma_ca_decay", "2pi_times")]
    values = {}
    for key in order:
        ctx["wavelength"] = values.get("wavelength", base.wavelength)
        ctx["gamma_ca_decay"] = values.get("gamma_ca_decay", base.gamma_ca_decay)
        if "spatial_period" in values:
            ctx["period"] = values["spatial_period"]
        elif base.spatial_period is None:
            ctx["period"] = 4.0 * ctx["wavelength"]
        else:
            ctx["period"] = base.spatial_period
        if key in entries and _KINDS[key] != "sweep":
            values[key] = _convert(entries[key], _KINDS[key], ctx)

    if "coupling_g" in values:
        if "cooperativity" in values:
            e = entries["coupling_g"]
            raise e.error("give either coupling_g or cooperativity, not both")
        g = values.pop("coupling_g")
        gca = values.get("gamma_ca_decay", base.gamma_ca_decay)
        kap = values.get("kappa", base.kappa)
        if not (g > 0 and gca > 0 and kap > 0):
            raise entries["coupling_g"].error("coupling_g, gamma_ca_decay and kappa must be positive")
        values["cooperativity"] = 4.0 * g * g / (gca * kap)

    sweep_keys = [k for k in ("sweep_param", "sweep_start", "sweep_stop", "sweep_points") if k in entries]
    if sweep_keys:
        if len(sweep_keys) != 4:
            missing = sorted({"sweep_param", "sweep_start", "sweep_stop", "sweep_points"} - set(sweep_keys))
            raise entries[sweep_keys[0]].error(f"incomplete sweep, missing {missing}")
        name = _canonical(values.pop("sweep_param"))
        kind = _KINDS.get(name)
        if name not in FIELD_NAMES or kind is None:
            raise entries["sweep_param"].error(f"unknown sweep parameter {name!r}")
        start = _convert(entries["sweep_start"], kind, ctx)
        stop = _convert(entries["sweep_stop"], kind, ctx)
        num = values.pop("sweep_points")
        try:
            values["sweep"] = SweepAxis(name, float(start), float(stop), num)
        except ValueError as exc:
            raise entries["sweep_param"].error(str(exc)) from exc

    try:
        return dataclasses.replace(base, **values)
    except DomainError as exc:
        entry = entries.get(exc.param)
        if entry is None:
            # derived parameters (e.g. gamma_ca from its parts) or closures
            raise ConfigError(str(exc), key=exc.param) from exc
        raise entry.error(str(exc).split(": ", 1)[-1]) from exc
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def serialize_config(cfg: ScenarioConfig) -> str:
    """Exact text form: ``parse_config(serialize_config(c)) == c``."""
    lines = ["2pi_times = true"]
    for f in dataclasses.fields(cfg):
        value = getattr(cfg, f.name)
        if f.name == "sweep" or value is None:
            continue
        kind = _KINDS[f.name]
        if kind == "int":
            lines.append(f"{f.name} = {int(value)}")
        elif kind == "rate":
            lines.append(f"{f.name} = {float(value)!r} rad/s")
        else:
            lines.append(f"{f.name} = {float(value)!r}")
    if cfg.sweep is not None:
        s = cfg.sweep
        unit = " rad/s" if _KINDS[s.name] == "rate" else ""
        lines.append(f"sweep_param = {s.name}")
        lines.append(f"sweep_start = {float(s.start)!r}{unit}")
        lines.append(f"sweep_stop = {float(s.stop)!r}{unit}")
        lines.append(f"sweep_points = {int(s.num)}")
    return "\n".join(lines) + "\n"
