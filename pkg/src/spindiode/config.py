"""Experiment configuration files.

INI-style ``key = value`` lines under bracketed sections. Keys are case
sensitive (``Delta`` and ``delta`` are different parameters)::

    [chain]
    preset = H3            ; H1, H2, H3, H4 or generic
    h = 0.3
    zeta = 5
    Delta = 0.7
    delta = 0.2
    theta = 1.2
    # generic: gammas = 0.9, 0.4, 1.3    (gamma_2 .. gamma_N)
    # explicit chain instead of a preset:
    #   n_sites = 3
    #   fields = 0.1, 0.2, 0.3
    #   couplings = 1-2:0.5, 2-3:0.3

    [baths]
    T_left = 2             ; or beta_left, never both
    T_right = 1            ; T_right = 0 is an exact zero-temperature bath
    lambda = 1

    [run]
    policy = paper-equal-current
    seed = 0

    [sweep]               ; optional
    parameter = T_right    ; a chain parameter, T_left, T_right or lambda
    start = 1e-3
    stop = 1
    count = 50
    scale = log
"""

from __future__ import annotations

import configparser
import dataclasses
import math
import re
from pathlib import Path
from typing import Mapping

import numpy as np

from .exceptions import ConfigError, PresetError
from .model import ChainSpec, preset
from .steadystate import parse_policy

__all__ = ["SweepAxis", "ExperimentConfig", "load_config", "parse_config"]

_BATH_KEYS = ("T_left", "T_right", "lambda")
_PRESET_KEYS = {
    "H1": ("h", "Delta", "delta"),
    "H2": ("h", "zeta", "Delta", "delta"),
    "H3": ("h", "zeta", "Delta", "delta", "theta"),
    "H4": ("h", "zeta", "Delta", "delta", "theta", "phi", "gamma"),
}


@dataclasses.dataclass(frozen=True)
class SweepAxis:
    parameter: str
    start: float
    stop: float
    count: int
    scale: str = "linear"

    def values(self) -> np.ndarray:
        if self.scale == "log":
            return np.geomspace(self.start, self.stop, self.count)
        return np.linspace(self.start, self.stop, self.count)


@dataclasses.dataclass(frozen=True)
class ExperimentConfig:
    """Parsed configuration; :meth:`spec` builds the chain."""

    preset: str | None
    params: Mapping
    n_sites: int | None
    fields: tuple
    couplings: Mapping
    T_left: float
    T_right: float
    lam: float
    policy: object
    seed: int = 0
    sweep: SweepAxis | None = None

    def spec(self, overrides: Mapping | None = None) -> ChainSpec:
        overrides = dict(overrides or {})
        if self.preset is not None:
            params = dict(self.params)
            params.update({k: v for k, v in overrides.items() if k not in _BATH_KEYS})
            if self.preset.lower() == "generic":
                gammas = list(params.pop("gammas"))
                for k in list(params):
                    m = re.fullmatch(r"gamma_(\d+)", k)
                    if m:
                        gammas[int(m.group(1)) - 2] = params.pop(k)
                params["gammas"] = gammas
            return preset(self.preset, params)
        fields = list(self.fields)
        couplings = dict(self.couplings)
        for k, v in overrides.items():
            m = re.fullmatch(r"h_(\d+)", k)
            if m:
                fields[int(m.group(1)) - 1] = v
            m = re.fullmatch(r"D_(\d+)_(\d+)", k)
            if m:
                couplings[(int(m.group(1)), int(m.group(2)))] = v
        return ChainSpec(self.n_sites, tuple(fields), couplings, "explicit")

    def parameter_columns(self) -> list:
        """(name, value) pairs describing the chain, in CSV column order."""
        if self.preset is None:
            cols = [(f"h_{i}", f) for i, f in enumerate(self.fields, start=1)]
            cols += [(f"D_{i}_{k}", v) for (i, k), v in sorted(self.couplings.items())]
            return cols
        if self.preset.lower() == "generic":
            cols = [("h", self.params["h"]), ("zeta", self.params["zeta"])]
            cols += [(f"gamma_{i}", g) for i, g in enumerate(self.params["gammas"], start=2)]
            return cols
        return [(k, self.params[k]) for k in _PRESET_KEYS[self.preset] if k in self.params]

    def sweep_names(self) -> list:
        names = [name for name, _ in self.parameter_columns()]
        return names + list(_BATH_KEYS)

    def with_overrides(self, **kw) -> "ExperimentConfig":
        return dataclasses.replace(self, **kw)


def _line_of(text: str, section: str, key: str | None) -> int | None:
    current = None
    for n, line in enumerate(text.splitlines(), start=1):
        s = line.strip()
        m = re.fullmatch(r"\[([^\]]+)\].*", s)
        if m:
            current = m.group(1).strip()
            if key is None and current == section:
                return n
            continue
        if current == section and key is not None and re.match(rf"{re.escape(key)}\s*[=:]", s):
            return n
    return None


class _Reader:
    def __init__(self, parser, text, source):
        self.p, self.text, self.source = parser, text, source

    def fail(self, section, key, message):
        line = _line_of(self.text, section, key)
        where = f"{self.source}:{line}" if line else self.source
        field = f"[{section}] {key}" if key else f"[{section}]"
        raise ConfigError(f"{where}: {field}: {message}")

    def float(self, section, key, lo=None, allow_inf=False):
        raw = self.p[section][key]
        try:
            value = float(raw)
        except ValueError:
            self.fail(section, key, f"expected a number, got {raw!r}")
        if math.isnan(value) or (math.isinf(value) and not allow_inf):
            self.fail(section, key, f"must be finite, got {raw!r}")
        if lo is not None and value < lo:
            self.fail(section, key, f"must be >= {lo}, got {raw!r}")
        return value

    def floats(self, section, key):
        raw = self.p[section][key]
        try:
            return tuple(float(x) for x in raw.replace(";", ",").split(",") if x.strip())
        except ValueError:
            self.fail(section, key, f"expected a comma-separated list of numbers, got {raw!r}")

    def couplings(self, section, key) -> dict:
        out = {}
        for item in self.p[section][key].replace(";", ",").split(","):
            item = item.strip()
            if not item:
                continue
            m = re.fullmatch(r"(\d+)\s*-\s*(\d+)\s*:\s*(\S+)", item)
            if not m:
                self.fail(section, key, f"expected entries like '1-2:0.5', got {item!r}")
            try:
                out[(int(m.group(1)), int(m.group(2)))] = float(m.group(3))
            except ValueError:
                self.fail(section, key, f"bad coupling value in {item!r}")
        return out


def parse_config(text: str, source: str = "<config>") -> ExperimentConfig:
    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"), interpolation=None)
    parser.optionxform = str
    try:
        parser.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError(f"{source}: {exc}") from exc
    rd = _Reader(parser, text, source)
    for sec in parser.sections():
        if sec not in ("chain", "baths", "run", "sweep"):
            rd.fail(sec, None, "unknown section (expected chain, baths, run, sweep)")
    if "chain" not in parser:
        raise ConfigError(f"{source}: missing [chain] section")
    if "baths" not in parser:
        raise ConfigError(f"{source}: missing [baths] section")

    chain = parser["chain"]
    name = chain.get("preset")
    explicit_keys = {"n_sites", "fields", "couplings"}
    params: dict = {}
    n_sites, fields, couplings = None, (), {}
    if name is not None:
        if explicit_keys & set(chain):
            rd.fail("chain", "preset", "give either a preset or n_sites/fields/couplings, not both")
        for key in chain:
            if key == "preset":
                continue
            if key == "gammas":
                params[key] = rd.floats("chain", key)
            else:
                params[key] = rd.float("chain", key)
    else:
        if "n_sites" not in chain or "fields" not in chain:
            rd.fail("chain", None, "needs 'preset' or both 'n_sites' and 'fields'")
        unknown = set(chain) - explicit_keys
        if unknown:
            rd.fail("chain", sorted(unknown)[0], "unknown key for an explicit chain")
        try:
            n_sites = int(chain["n_sites"])
        except ValueError:
            rd.fail("chain", "n_sites", f"expected an integer, got {chain['n_sites']!r}")
        fields = rd.floats("chain", "fields")
        if len(fields) != n_sites:
            rd.fail("chain", "fields", f"expected {n_sites} values, got {len(fields)}")
        couplings = rd.couplings("chain", "couplings") if "couplings" in chain else {}

    baths = parser["baths"]
    temps = {}
    for side in ("left", "right"):
        t_key, b_key = f"T_{side}", f"beta_{side}"
        if t_key in baths and b_key in baths:
            rd.fail("baths", b_key, f"give {t_key} or {b_key}, not both")
        if t_key in baths:
            temps[side] = rd.float("baths", t_key, lo=0.0)
        elif b_key in baths:
            beta = rd.float("baths", b_key, allow_inf=True)
            if not beta > 0:
                rd.fail("baths", b_key, "must be > 0 (use T = 0 ... or beta = inf for zero temperature)")
            temps[side] = 0.0 if math.isinf(beta) else 1.0 / beta
        else:
            rd.fail("baths", None, f"missing {t_key} (or {b_key})")
    lam = rd.float("baths", "lambda") if "lambda" in baths else 1.0
    if not lam > 0:
        rd.fail("baths", "lambda", "must be > 0")
    extra = set(baths) - {"T_left", "T_right", "beta_left", "beta_right", "lambda"}
    if extra:
        rd.fail("baths", sorted(extra)[0], "unknown key")

    policy, seed = parse_policy("paper-equal-current"), 0
    if "run" in parser:
        run = parser["run"]
        if "policy" in run:
            try:
                policy = parse_policy(run["policy"])
            except ValueError as exc:
                rd.fail("run", "policy", str(exc))
        if "seed" in run:
            try:
                seed = int(run["seed"])
            except ValueError:
                rd.fail("run", "seed", f"expected an integer, got {run['seed']!r}")

    cfg = ExperimentConfig(
        preset=name, params=params, n_sites=n_sites, fields=fields, couplings=couplings,
        T_left=temps["left"], T_right=temps["right"], lam=lam, policy=policy, seed=seed,
    )
    try:
        cfg.spec()
    except (PresetError, ValueError, KeyError, TypeError) as exc:
        rd.fail("chain", None, str(exc))

    if "sweep" in parser:
        sw = parser["sweep"]
        for key in ("parameter", "start", "stop", "count"):
            if key not in sw:
                rd.fail("sweep", None, f"missing '{key}'")
        axis_name = sw["parameter"].strip()
        if axis_name not in cfg.sweep_names():
            rd.fail("sweep", "parameter", f"unknown parameter {axis_name!r}; choose from {', '.join(cfg.sweep_names())}")
        try:
            count = int(sw["count"])
        except ValueError:
            rd.fail("sweep", "count", "expected an integer")
        if count < 1:
            rd.fail("sweep", "count", "must be >= 1")
        scale = sw.get("scale", "linear").strip().lower()
        if scale not in ("linear", "log"):
            rd.fail("sweep", "scale", "must be 'linear' or 'log'")
        start, stop = rd.float("sweep", "start"), rd.float("sweep", "stop")
        if scale == "log" and not (start > 0 and stop > 0):
            rd.fail("sweep", "start", "log sweeps need positive start and stop")
        cfg = cfg.with_overrides(sweep=SweepAxis(axis_name, start, stop, count, scale))
    return cfg


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    return parse_config(text, str(path))
